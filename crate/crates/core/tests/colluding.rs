//! Colluding eavesdroppers: Laplace functionals against simulation and
//! direct quadrature, and the gamma-approximation series against the
//! expectation it stands for.

mod common;

use common::{exp_sinh, gamma_oracle, rel_err};
use sopcalc_core::model::{ChannelDraw, ConditioningState, SystemParams};
use sopcalc_core::montecarlo::{estimate_aggregate_mean, estimate_laplace, Conditioning, Scheme, SimSpec};
use sopcalc_core::sop_colluding::{self as coll, CollConfig};

fn params() -> SystemParams {
    SystemParams { r_guard: 0.1, p_j: 1e3, ..SystemParams::default() }
}

fn spec(scheme: Scheme, trials: u64, eve_noise: bool) -> SimSpec {
    let mut s = SimSpec::new(scheme, trials, 17);
    s.conditioning = Conditioning::Given(ChannelDraw::nominal(5));
    s.colluding = true;
    s.eve_noise = eve_noise;
    s
}

#[test]
fn laplace_transform_matches_simulation() {
    let p = params();
    let cfg = CollConfig::default();
    for s in [1e-3, 1e-2, 0.1] {
        let want = coll::laplace_ie_tas(s, &p, &cfg).unwrap();
        let est = estimate_laplace(&spec(Scheme::Tas, 40_000, true), &p, s).unwrap();
        assert!((est.mean - want).abs() <= 4.0 * est.std_err + 1e-4, "s {s}: {} ± {} vs {want}", est.mean, est.std_err);
    }
}

#[test]
fn an_laplace_transform_matches_simulation() {
    let p = SystemParams { eps: 0.1, ..params() };
    let cfg = CollConfig::default();
    for s in [1e-3, 1e-2, 0.1] {
        let want = coll::laplace_ie_tab_an(s, &p, &cfg).unwrap();
        let est = estimate_laplace(&spec(Scheme::Tab, 40_000, false), &p, s).unwrap();
        assert!((est.mean - want).abs() <= 4.0 * est.std_err + 1e-4, "s {s}: {} ± {} vs {want}", est.mean, est.std_err);
    }
}

#[test]
fn an_deficit_matches_double_integral() {
    let p = SystemParams { eps: 0.2, ..params() };
    let cfg = CollConfig::default();
    let k = (p.antennas - 1) as f64;
    let leak = p.eps / k;
    let norm = gamma_oracle(k);
    for (s, r, th) in [(1e-3, 0.5, 1.0), (0.05, 2.0, 0.2), (1.0, 4.0, 2.5), (10.0, 0.9, 0.05)] {
        let d_be = (r * r + p.d * p.d - 2.0 * r * p.d * f64::cos(th)).sqrt();
        let f = p.m() * (r / d_be).powf(p.alpha);
        // E over X₂ ~ Exp(1), Y ~ Gamma(M−1) of s/(s + f X₂ + leak·Y)
        let want = exp_sinh(
            |y, _| {
                let inner = exp_sinh(|x2, _| (-x2).exp() * s / (s + f * x2 + leak * y), 0.0, 1e-12);
                y.powf(k - 1.0) * (-y).exp() / norm * inner
            },
            0.0,
            1e-11,
        );
        let got = coll::an_deficit(s, r, th, &p, &cfg).unwrap();
        assert!(rel_err(got, want) < 1e-8, "s {s} r {r}: {got} vs {want}");
    }
}

#[test]
fn half_duplex_transform_matches_adaptive_route() {
    let cfg = CollConfig::default();
    let hd = SystemParams { p_j: 0.0, ..SystemParams::default() };
    let guarded = SystemParams { r_guard: 1e-4, ..hd.clone() };
    for s in [1e-3, 1e-1, 10.0] {
        let a = coll::laplace_ie_hd(s, &hd, &cfg).unwrap();
        let b = coll::laplace_ie_tas(s, &guarded, &cfg).unwrap();
        assert!(rel_err(a, b) < 1e-6, "s {s}: {a} vs {b}");
    }
}

/// The series is E[(1 − e^{−aI/y0})^N] exactly; only the gamma
/// approximation of the indicator separates it from the outage probability.
#[test]
fn series_equals_expectation_of_its_integrand() {
    let cfg = CollConfig::default();
    let a = cfg.series.a();
    let n = cfg.series.order as i32;
    for (scheme, eps, p_j) in [(Scheme::Tas, 0.0, 1e3), (Scheme::Tab, 0.0, 1e4), (Scheme::Tab, 0.05, 1e4)] {
        let p = SystemParams { eps, p_j, ..params() };
        let st = ConditioningState::from_draw(&p, &ChannelDraw::nominal(5));
        let (series, thr) = match (scheme, eps > 0.0) {
            (Scheme::Tas, _) => (coll::sop_tas_colluding(st.y0, &p, &cfg).unwrap(), st.y0),
            (_, false) => {
                let t = st.z / p.beta() - 1.0 + 1.0 / p.beta();
                (coll::sop_tab_colluding_eps0(st.z, &p, &cfg).unwrap(), t)
            }
            (_, true) => (
                coll::sop_tab_colluding_an(st.z, &p, &cfg).unwrap(),
                sopcalc_core::model::tab_threshold(st.z, p.beta(), eps),
            ),
        };
        let est = estimate_aggregate_mean(&spec(scheme, 40_000, eps == 0.0), &p, |i| {
            (-(-a * i / thr).exp_m1()).powi(n)
        })
        .unwrap();
        assert!(
            (est.mean - series.value).abs() <= 4.0 * est.std_err + 1e-4,
            "{scheme:?} eps {eps}: series {} vs mc {} ± {}",
            series.value,
            est.mean,
            est.std_err
        );
    }
}

#[test]
fn series_edge_cases() {
    let cfg = CollConfig::default();
    let p = params();
    assert_eq!(coll::sop_tas_colluding(-0.5, &p, &cfg).unwrap().value, 1.0);
    let silent = SystemParams { rho_e: 0.0, ..p.clone() };
    assert_eq!(coll::sop_tas_colluding(10.0, &silent, &cfg).unwrap().value, 0.0);
    let no_guard = SystemParams { r_guard: 0.0, ..p };
    assert!(coll::laplace_ie_tas(0.1, &no_guard, &cfg).is_err());
    // L ≡ 1 makes every alternating sum vanish
    assert_eq!(coll::alternating_series(&[1.0; 21]).value, 0.0);
}
