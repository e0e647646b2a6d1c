//! TAB with user selection: Alice serves the n-th nearest of a Poisson field
//! of half-duplex users (P_J = 0 throughout; the `p_j` field is ignored).
//!
//! Eavesdroppers are integrated over the whole plane here, so `r_outer` and
//! `r_guard` do not enter these formulas.

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::quadrature::{try_integrate_semi_infinite_scaled, QuadConfig};
use crate::specfun::{self, ln_beta, ln_gamma, SpecFunConfig};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsConfig {
    pub specfun: SpecFunConfig,
    /// Also drives the average over the user distance.
    pub quad: QuadConfig,
}

impl Default for UsConfig {
    fn default() -> Self {
        UsConfig {
            specfun: SpecFunConfig::default(),
            quad: QuadConfig::new(1e-10, 0.0),
        }
    }
}

fn check(params: &SystemParams, n: usize, func: &'static str) -> Result<()> {
    params.validate()?;
    if n == 0 {
        return Err(Error::domain(func, "user order n must be >= 1"));
    }
    if params.antennas < 2 {
        return Err(Error::domain(func, "needs M >= 2"));
    }
    if !(params.antennas as f64 > 2.0 / params.alpha) {
        return Err(Error::domain(func, "needs M > 2/alpha"));
    }
    Ok(())
}

/// Log of the Campbell exponent conditioned on the selected user's distance,
/// ε > 0:
/// (2πρ_E/α)(βd^α)^M B(M−2/α, 2/α) U(M−2/α, 2−2/α, (M−1)βd^α/(εP_T)) / (εP_T/(M−1))^{M−2/α}.
fn ln_exponent_eps(d: f64, params: &SystemParams, sf: &SpecFunConfig) -> Result<f64> {
    let mf = params.antennas as f64;
    let nu = 2.0 / params.alpha;
    let a = mf - nu;
    let bd = params.beta() * d.powf(params.alpha);
    let eps_pt = params.eps * params.p_t / (mf - 1.0);
    let z = bd / eps_pt;
    Ok((2.0 * PI * params.rho_e / params.alpha).ln() + mf * bd.ln() + ln_beta(a, nu)
        - a * eps_pt.ln()
        + sf.ln_hypergeom_u(a, 2.0 - nu, z)?)
}

/// Campbell exponent for ε = 0: ρ_E π d² (2/α) β^{2/α} B(M−2/α, 2/α).
fn exponent_eps0(d: f64, params: &SystemParams) -> f64 {
    let nu = 2.0 / params.alpha;
    let mf = params.antennas as f64;
    params.rho_e * PI * d * d * nu * params.beta().powf(nu) * ln_beta(mf - nu, nu).exp()
}

/// P_con conditioned on the distance d of the n-th nearest user (ε > 0).
pub fn pcon_tabus_conditional(d: f64, params: &SystemParams, cfg: &UsConfig) -> Result<f64> {
    check(params, 1, "pcon_tabus_conditional")?;
    if !(params.eps > 0.0) {
        return Err(Error::domain(
            "pcon_tabus_conditional",
            "the U-function form needs eps > 0; use pcon_tabus_eps0",
        ));
    }
    if !(d >= 0.0) {
        return Err(Error::domain("pcon_tabus_conditional", format!("d = {d} must be >= 0")));
    }
    if params.rho_e == 0.0 || d == 0.0 {
        return Ok(1.0);
    }
    Ok((-ln_exponent_eps(d, params, &cfg.specfun)?.exp()).exp())
}

fn sop_given_distance(d: f64, params: &SystemParams, cfg: &UsConfig) -> Result<f64> {
    if params.rho_e == 0.0 || d == 0.0 {
        return Ok(0.0);
    }
    let e = if params.eps > 0.0 {
        ln_exponent_eps(d, params, &cfg.specfun)?.exp()
    } else {
        exponent_eps0(d, params)
    };
    Ok(-(-e).exp_m1())
}

/// SOP of TAB-US for the n-th nearest user, averaged over its distance.
pub fn sop_tabus(params: &SystemParams, n: usize, cfg: &UsConfig) -> Result<f64> {
    check(params, n, "sop_tabus")?;
    if params.rho_e == 0.0 {
        return Ok(0.0);
    }
    let rho_u = params.rho_u;
    if !(rho_u > 0.0) {
        return Err(Error::domain("sop_tabus", "rho_U must be > 0"));
    }
    // x = πρ_U d² of the n-th nearest user is Gamma(n, 1). Averaging in x
    // keeps the integrand smooth at both ends, unlike the u-space rule whose
    // integrand behaves like (1 − u)^{ρ_E/ρ_U·const} near u = 1.
    let nf = n as f64;
    let ln_norm = ln_gamma(nf);
    let res = try_integrate_semi_infinite_scaled(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let dens = ((nf - 1.0) * x.ln() - x - ln_norm).exp();
            Ok(dens * sop_given_distance((x / (PI * rho_u)).sqrt(), params, cfg)?)
        },
        0.0,
        1.0,
        &cfg.quad,
    )?;
    Ok(res.value.clamp(0.0, 1.0))
}

pub fn pcon_tabus(params: &SystemParams, n: usize, cfg: &UsConfig) -> Result<f64> {
    Ok(1.0 - sop_tabus(params, n, cfg)?)
}

/// ε = 0 closed form: (1 + (ρ_E/ρ_U)(2/α)β^{2/α}B(M−2/α, 2/α))^{−n}.
pub fn pcon_tabus_eps0(params: &SystemParams, n: usize) -> Result<f64> {
    check(params, n, "pcon_tabus_eps0")?;
    if params.rho_e == 0.0 {
        return Ok(1.0);
    }
    if !(params.rho_u > 0.0) {
        return Err(Error::domain("pcon_tabus_eps0", "rho_U must be > 0"));
    }
    let nu = 2.0 / params.alpha;
    let mf = params.antennas as f64;
    let k = params.rho_e / params.rho_u * nu * params.beta().powf(nu) * ln_beta(mf - nu, nu).exp();
    Ok((-(n as f64) * k.ln_1p()).exp())
}

/// Nearest-user SOP for ε = 0.
pub fn sop_tabus_eps0_nearest(params: &SystemParams) -> Result<f64> {
    Ok(1.0 - pcon_tabus_eps0(params, 1)?)
}

/// ε = 0, large-P_T connection probability with the user's channel gain
/// X = ‖h_ABn‖² ~ Gamma(M) kept inside the expectation:
/// E_X[(1 + (ρ_E/ρ_U)Γ(1+2/α)(β/X)^{2/α})^{−n}].
///
/// The closed form above averages each eavesdropper's success probability
/// over X separately, which ignores that all eavesdroppers share the same X;
/// by Jensen's inequality it understates P_con. This routine is the exact
/// counterpart under the same large-P_T approximation.
pub fn pcon_tabus_eps0_shared_fading(params: &SystemParams, n: usize, cfg: &UsConfig) -> Result<f64> {
    check(params, n, "pcon_tabus_eps0_shared_fading")?;
    if params.rho_e == 0.0 {
        return Ok(1.0);
    }
    let nu = 2.0 / params.alpha;
    let mf = params.antennas as f64;
    let k = params.rho_e / params.rho_u * specfun::gamma_fn(1.0 + nu) * params.beta().powf(nu);
    let nf = n as f64;
    let ln_norm = ln_gamma(mf);
    let res = try_integrate_semi_infinite_scaled(
        |x| {
            if x == 0.0 {
                return Ok(0.0);
            }
            let dens = ((mf - 1.0) * x.ln() - x - ln_norm).exp();
            Ok(dens * (-nf * (k * x.powf(-nu)).ln_1p()).exp())
        },
        0.0,
        mf,
        &cfg.quad,
    )?;
    Ok(res.value)
}
