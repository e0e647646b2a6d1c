//! TAB with user selection against a Campbell-integral oracle and the
//! simulator.

mod common;

use common::{exp_sinh, gamma_oracle, rel_err};
use sopcalc_core::model::SystemParams;
use sopcalc_core::montecarlo::{estimate_sop_userselect, Scheme, SimSpec};
use sopcalc_core::sop_userselect::{self as us, UsConfig};
use std::f64::consts::PI;

fn params() -> SystemParams {
    SystemParams { p_j: 0.0, r_s: 1.0, rho_e: 0.1, rho_u: 0.5, ..SystemParams::default() }
}

/// −ln P_con given the user distance: each eavesdropper succeeds with
/// E_X[e^{−X r^α/(βd^α)}(1 + εP_T X/((M−1)βd^α))^{−(M−1)}], X ~ Gamma(M),
/// and the radial integral of e^{−k r^α} is (2π/α)Γ(2/α)k^{−2/α}.
fn oracle_exponent(d: f64, p: &SystemParams) -> f64 {
    let mf = p.antennas as f64;
    let nu = 2.0 / p.alpha;
    let bd = 2f64.powf(p.r_s) * d.powf(p.alpha);
    let c = p.eps * p.p_t / ((mf - 1.0) * bd);
    let ex = exp_sinh(
        |x, _| x.powf(mf - 1.0 - nu) * (-x).exp() / gamma_oracle(mf) * (1.0 + c * x).powf(1.0 - mf),
        0.0,
        1e-12,
    );
    p.rho_e * 2.0 * PI / p.alpha * gamma_oracle(nu) * bd.powf(nu) * ex
}

#[test]
fn conditional_form_matches_campbell_oracle() {
    let cfg = UsConfig::default();
    for alpha in [2.0, 3.0, 4.0] {
        for eps in [1e-4, 0.01, 0.3] {
            for d in [0.2, 1.0, 3.0] {
                let p = SystemParams { alpha, eps, ..params() };
                let want = (-oracle_exponent(d, &p)).exp();
                let got = us::pcon_tabus_conditional(d, &p, &cfg).unwrap();
                assert!(rel_err(got, want) < 1e-8, "alpha {alpha} eps {eps} d {d}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn distance_average_reproduces_eps0_closed_form() {
    // with ε = 0 the conditional exponent is ∝ d², whose Gamma average is
    // the closed form exactly
    let cfg = UsConfig::default();
    for (rho_e, rho_u) in [(0.1, 0.5), (1.0, 0.5), (0.01, 5.0)] {
        let p = SystemParams { eps: 0.0, rho_e, rho_u, ..params() };
        for n in 1..=4 {
            let a = us::sop_tabus(&p, n, &cfg).unwrap();
            let b = 1.0 - us::pcon_tabus_eps0(&p, n).unwrap();
            assert!(rel_err(a, b) < 1e-8, "rho_E {rho_e} n {n}: {a} vs {b}");
        }
    }
}

#[test]
fn small_eps_approaches_eps0_form() {
    let cfg = UsConfig::default();
    // the AN term vanishes as ε → 0
    let p = SystemParams { eps: 1e-9, ..params() };
    for n in 1..=3 {
        let a = us::sop_tabus(&p, n, &cfg).unwrap();
        let b = 1.0 - us::pcon_tabus_eps0(&p, n).unwrap();
        assert!(rel_err(a, b) < 1e-3, "n {n}: {a} vs {b}");
    }
}

#[test]
fn shared_fading_route_matches_simulation() {
    let cfg = UsConfig::default();
    let p = SystemParams { p_t: 1e6, eps: 0.0, ..params() };
    for n in [1, 3] {
        let want = 1.0 - us::pcon_tabus_eps0_shared_fading(&p, n, &cfg).unwrap();
        let est = estimate_sop_userselect(&SimSpec::new(Scheme::TabUs, 20_000, 9), &p, n).unwrap();
        assert!(
            (est.p_hat - want).abs() <= 4.0 * est.std_err + 2e-3,
            "n {n}: mc {} ± {} vs {want}",
            est.p_hat,
            est.std_err
        );
    }
}

#[test]
fn per_eavesdropper_averaging_overstates_outage() {
    let cfg = UsConfig::default();
    let p = SystemParams { p_t: 1e6, eps: 0.0, ..params() };
    for n in 1..=4 {
        let closed = us::pcon_tabus_eps0(&p, n).unwrap();
        let shared = us::pcon_tabus_eps0_shared_fading(&p, n, &cfg).unwrap();
        assert!(closed < shared, "n {n}: {closed} vs {shared}");
    }
}
