//! Worked cross-checks: single-location probabilities against direct fading
//! simulation, limiting forms against the generic routes, and scenario-level
//! agreement between the analytic engine and the simulator.

mod common;

use common::{ks_statistic, rel_err, rng};
use rand::Rng;
use sopcalc_core::model::{self, complex_normal, ChannelDraw, ConditioningState, SystemParams};
use sopcalc_core::montecarlo::{estimate_laplace, estimate_sop, estimate_sop_userselect, Conditioning, Scheme, SimSpec};
use sopcalc_core::quadrature::{integrate_1d, integrate_semi_infinite, QuadConfig};
use sopcalc_core::sop_colluding::{self as coll, CollConfig, XiParams};
use sopcalc_core::sop_noncolluding::{self as nc, AnalyticConfig, OmegaForm, TabIntegrand, TasIntegrand};
use sopcalc_core::sop_userselect::{self as us, UsConfig};
use sopcalc_core::specfun;
use std::f64::consts::PI;

const DRAWS: usize = 1_000_000;

fn cfg() -> AnalyticConfig {
    AnalyticConfig::default()
}

fn exp1<R: Rng>(r: &mut R) -> f64 {
    complex_normal(r).norm_sqr()
}

fn d_be(r: f64, th: f64, d: f64) -> f64 {
    (r * r + d * d - 2.0 * r * d * th.cos()).sqrt()
}

fn within(p_hat: f64, want: f64, n: usize, k: f64) -> bool {
    let se = (want * (1.0 - want) / n as f64).sqrt();
    (p_hat - want).abs() <= k * se + 1e-12
}

#[test]
fn quadrature_worked_values() {
    let q = QuadConfig::new(1e-12, 0.0);
    // degree-7 polynomial against its antiderivative
    let c = [0.3, -1.2, 2.0, 0.5, -0.7, 0.11, 0.9, -0.25];
    let poly = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
    let anti = |x: f64| c.iter().enumerate().map(|(i, k)| k * x.powi(i as i32 + 1) / (i + 1) as f64).sum::<f64>();
    let v = integrate_1d(poly, -1.3, 2.1, &q).unwrap().value;
    assert!(rel_err(v, anti(2.1) - anti(-1.3)) < 1e-13);
    // ∫₀^∞ e^{−x}/(1+x) dx = e·E₁(1)
    let v = integrate_semi_infinite(|x| (-x).exp() / (1.0 + x), 0.0, &q).unwrap().value;
    assert!(rel_err(v, 1f64.exp() * specfun::exp_integral_e1(1.0).unwrap()) < 1e-10);
}

#[test]
fn eavesdropper_count_has_poisson_mean() {
    let p = SystemParams::default();
    let mut r = rng(91);
    let n = 100_000;
    let total: usize = (0..n).map(|_| model::sample_ed_field(&p, &mut r).points.len()).sum();
    let mean = total as f64 / n as f64;
    let want = 25.0 * PI;
    assert!((mean - want).abs() <= 3.0 * (want / n as f64).sqrt(), "{mean} vs {want}");
}

#[test]
fn theta_samplers_agree() {
    let mut r = rng(92);
    for m in [2usize, 5] {
        let cdf = |x: f64| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(m as i32 - 1);
        let mut geo: Vec<f64> = (0..100_000).map(|_| model::sample_theta_geometric(m, &mut r)).collect();
        let mut inv: Vec<f64> = (0..100_000).map(|_| model::sample_theta(m, &mut r)).collect();
        assert!(ks_statistic(&mut geo, cdf) < 0.01);
        assert!(ks_statistic(&mut inv, cdf) < 0.01);
    }
}

#[test]
fn psi_matches_fading_simulation() {
    let p = SystemParams::default();
    let st = ConditioningState::from_draw(&p, &ChannelDraw::nominal(p.antennas));
    let (rr, th) = (2.0, PI / 3.0);
    let want = nc::psi_integrand(rr, th, &TasIntegrand::new(st.y, &p));
    let dbe = d_be(rr, th, p.d);
    let mut r = rng(93);
    let hits = (0..DRAWS)
        .filter(|_| {
            let snr = exp1(&mut r) * p.p_t / rr.powf(p.alpha) / (1.0 + p.p_j * exp1(&mut r) / dbe.powf(p.alpha));
            snr > st.y0
        })
        .count();
    assert!(within(hits as f64 / DRAWS as f64, want, DRAWS, 3.5), "{} vs {want}", hits as f64 / DRAWS as f64);
}

#[test]
fn omega_matches_fading_simulation() {
    let p = SystemParams { p_j: 1e3, eps: 0.1, ..SystemParams::default() };
    let st = ConditioningState::from_draw(&p, &ChannelDraw::nominal(p.antennas));
    let k = (p.antennas - 1) as f64;
    let mut r = rng(94);
    for (rr, th) in [(2.0, PI / 3.0), (0.6, 0.2)] {
        let ti = TabIntegrand::new(st.z, &p, OmegaForm::Exact).unwrap();
        let want = nc::omega_integrand(rr, th, &ti);
        let dbe = d_be(rr, th, p.d);
        let ra = rr.powf(p.alpha);
        let hits = (0..DRAWS)
            .filter(|_| {
                let x = exp1(&mut r);
                let an: f64 = (0..p.antennas - 1).map(|_| exp1(&mut r)).sum();
                let sinr = (1.0 - p.eps) * p.p_t * x / ra
                    / (1.0 + p.eps * p.p_t * an / (k * ra) + p.p_j * exp1(&mut r) / dbe.powf(p.alpha));
                sinr / (1.0 - p.eps) >= ti.t
            })
            .count();
        let got = hits as f64 / DRAWS as f64;
        assert!(within(got, want, DRAWS, 3.5), "r {rr}: {got} vs {want}");
    }
}

#[test]
fn small_threshold_limit_is_continuous() {
    let p = SystemParams::default();
    // P_con ≈ e^{−78} here, so compare the Campbell exponents
    let a = nc::tas_campbell_integral(0.0, &p, &cfg()).unwrap().value;
    let b = nc::tas_campbell_integral(1e-6, &p, &cfg()).unwrap().value;
    assert!(rel_err(a, b) < 1e-5, "{a} vs {b}");
    assert!(rel_err(a, 25.0 * PI) < 1e-12);
}

#[test]
fn half_duplex_limits() {
    let p = SystemParams { p_t: 1e6, p_j: 0.0, ..SystemParams::default() };
    for h in [0.2, 1.0, 3.0] {
        let a = nc::pcon_tas_hd(h, &p).unwrap();
        let b = nc::pcon_tas_conditional(h * p.p_t, &p, &cfg()).unwrap();
        assert!(rel_err(a, b) < 1e-4, "tas h {h}: {a} vs {b}");
        let tiny = SystemParams { p_j: 1e-9, r_s: 1.0, ..p.clone() };
        let a = nc::pcon_tab_hd(h, &SystemParams { r_s: 1.0, ..p.clone() }).unwrap();
        let b = nc::pcon_tab_conditional(h * p.p_t / (1.0 + tiny.rho * tiny.p_j), &tiny, &cfg()).unwrap();
        assert!(rel_err(a, b) < 1e-3, "tab h {h}: {a} vs {b}");
    }
}

#[test]
fn strong_jamming_limits() {
    let draw = ChannelDraw::nominal(5);
    let p = SystemParams { p_j: 1e10, ..SystemParams::default() };
    let st = ConditioningState::from_draw(&p, &draw);
    let a = nc::pcon_tas_pj_infinity(draw.h_star_sq(), draw.g_b_sq(), &p, &cfg()).unwrap();
    let b = nc::pcon_tas_conditional(st.y, &p, &cfg()).unwrap();
    assert!((a - b).abs() < 1e-3, "tas {a} vs {b}");
    let a = nc::pcon_tab_pj_infinity(draw.h_norm_sq(), draw.g_b_sq(), &p, &cfg()).unwrap();
    let b = nc::pcon_tab_conditional(st.z, &p, &cfg()).unwrap();
    assert!((a - b).abs() < 1e-3, "tab {a} vs {b}");
}

#[test]
fn unconditional_averages_match_redrawn_simulation() {
    let p = SystemParams { p_j: 1e3, ..SystemParams::default() };
    for scheme in [Scheme::Tas, Scheme::Tab] {
        let want = match scheme {
            Scheme::Tas => nc::sop_tas_unconditional(&p, &cfg()).unwrap(),
            _ => nc::sop_tab_unconditional(&p, &cfg()).unwrap(),
        };
        let mut spec = SimSpec::new(scheme, 100_000, 95);
        spec.conditioning = Conditioning::Redraw;
        let est = estimate_sop(&spec, &p).unwrap();
        assert!((est.p_hat - want).abs() <= 3.5 * est.std_err, "{scheme:?}: mc {} ± {} vs {want}", est.p_hat, est.std_err);
    }
}

#[test]
fn laplace_deficit_matches_fading_simulation() {
    let p = SystemParams { r_guard: 0.1, ..SystemParams::default() };
    let (rr, th) = (2.0, PI / 3.0);
    let dbe = d_be(rr, th, p.d);
    let mut r = rng(96);
    for s in [1e-3, 0.5] {
        let want = coll::xi_integrand(rr, th, &XiParams::new(s, &p)).unwrap();
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..DRAWS {
            let h = exp1(&mut r) * p.p_t / rr.powf(p.alpha) / (1.0 + p.p_j * exp1(&mut r) / dbe.powf(p.alpha));
            let v = 1.0 - (-s * h).exp();
            sum += v;
            sum2 += v * v;
        }
        let n = DRAWS as f64;
        let mean = sum / n;
        let se = ((sum2 / n - mean * mean) / n).sqrt();
        assert!((mean - want).abs() <= 3.5 * se, "s {s}: {mean} ± {se} vs {want}");
    }
}

#[test]
fn laplace_at_half_matches_field_simulation() {
    let p = SystemParams { r_guard: 0.1, ..SystemParams::default() };
    let want = coll::laplace_ie_tas(0.5, &p, &CollConfig::default()).unwrap();
    let mut spec = SimSpec::new(Scheme::Tas, 100_000, 97);
    spec.colluding = true;
    let est = estimate_laplace(&spec, &p, 0.5).unwrap();
    assert!((est.mean - want).abs() <= 3.5 * est.std_err + 1e-12, "{} ± {} vs {want}", est.mean, est.std_err);
}

#[test]
fn tiny_jamming_laplace_matches_half_duplex_form() {
    let cfg = CollConfig::default();
    let hd = SystemParams { p_j: 0.0, ..SystemParams::default() };
    let tiny = SystemParams { p_j: 1e-9, r_guard: 1e-4, ..SystemParams::default() };
    for s in [0.01, 0.5, 5.0] {
        let a = coll::laplace_ie_hd(s, &hd, &cfg).unwrap();
        let b = coll::laplace_ie_tas(s, &tiny, &cfg).unwrap();
        assert!(rel_err(a, b) < 1e-3, "s {s}: {a} vs {b}");
    }
}

#[test]
fn an_series_approaches_eps0_series() {
    let cfg = CollConfig { an_eve_noise: true, ..CollConfig::default() };
    let draw = ChannelDraw::nominal(5);
    for p_j in [1e2, 1e4] {
        let p0 = SystemParams { p_j, eps: 0.0, r_guard: 0.1, ..SystemParams::default() };
        let pe = SystemParams { eps: 1e-9, ..p0.clone() };
        let a = coll::sop_tab_colluding_eps0(ConditioningState::from_draw(&p0, &draw).z, &p0, &cfg).unwrap().value;
        let b = coll::sop_tab_colluding_an(ConditioningState::from_draw(&pe, &draw).z, &pe, &cfg).unwrap().value;
        assert!((a - b).abs() < 1e-3, "P_J {p_j}: {a} vs {b}");
    }
}

fn us_params() -> SystemParams {
    SystemParams { p_t: 1e5, p_j: 0.0, r_s: 1.0, eps: 1e-5, rho_e: 0.1, rho_u: 0.5, ..SystemParams::default() }
}

#[test]
fn user_selection_sop_grows_with_order() {
    let cfg = UsConfig::default();
    let p = us_params();
    let sops: Vec<f64> = (1..=5).map(|n| us::sop_tabus(&p, n, &cfg).unwrap()).collect();
    assert!(sops.windows(2).all(|w| w[0] < w[1]), "{sops:?}");
    let mc: Vec<f64> = (1..=5)
        .map(|n| estimate_sop_userselect(&SimSpec::new(Scheme::TabUs, 20_000, 98), &p, n).unwrap().p_hat)
        .collect();
    assert!(mc.windows(2).all(|w| w[0] <= w[1]), "{mc:?}");
}

#[test]
fn nearest_user_setup_matches_simulation() {
    let p = SystemParams { p_t: 1e5, ..us_params() };
    let want = us::sop_tabus(&p, 1, &UsConfig::default()).unwrap();
    let est = estimate_sop_userselect(&SimSpec::new(Scheme::TabUs, 100_000, 99), &p, 1).unwrap();
    assert!((est.p_hat - want).abs() <= 3.0 * est.std_err, "mc {} ± {} vs {want}", est.p_hat, est.std_err);
}

#[test]
fn beamforming_beats_selection_for_selected_users() {
    for m in 2..=8 {
        let p = SystemParams { antennas: m, ..us_params() };
        let tab = estimate_sop_userselect(&SimSpec::new(Scheme::TabUs, 20_000, 100), &p, 1).unwrap();
        let tas = estimate_sop_userselect(&SimSpec::new(Scheme::TasUs, 20_000, 100), &p, 1).unwrap();
        assert!(tab.p_hat <= tas.p_hat + 3.0 * tab.std_err.hypot(tas.std_err), "M {m}: {} vs {}", tab.p_hat, tas.p_hat);
    }
}
