//! Connection and secrecy outage probabilities for TAS and TAB against
//! non-colluding eavesdroppers (the strongest eavesdropper decides).
//!
//! Every conditional routine reduces to P_con = exp(−ρ_E ∫∫ q(r,θ) r dθ dr)
//! where q is the probability that a single eavesdropper at (r, θ) beats the
//! secrecy threshold. The functions named `sop_*` return 1 − P_con computed
//! as −expm1(·) so small outage probabilities keep their relative accuracy.

use crate::averaging::{average_in_u, invert_cdf};
use crate::error::{Error, Result};
use crate::model::{self, distance_bob_to_point, tab_threshold, y0_from_y, SystemParams};
use crate::quadrature::{
    try_integrate_pieces, try_integrate_polar, PolarOptions, QuadConfig, QuadResult,
};
use crate::specfun::{self, gamma_fn};
use std::f64::consts::PI;

/// How the single-eavesdropper TAB failure probability is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaForm {
    /// exp(−r^α t/P_T) / ((1 + f_e t)(1 + εt/(M−1))^{M−1}), t the threshold on
    /// the eavesdropper's SNR/(1−ε). Exact for Rayleigh fading.
    #[default]
    Exact,
    /// e^{d_BE^α/P_J} / ((1 + f_e/g)(1 + ε/((M−1)g))^{M−1}) with g = β/z, the
    /// form found in the literature. It comes from an approximate ratio
    /// density, can exceed 1 and is undefined at P_J = 0.
    Published,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConfig {
    pub quad: QuadConfig,
    /// Relative tolerance of the outer average in unconditional results.
    pub avg_tol: f64,
    pub omega: OmegaForm,
}

impl Default for AnalyticConfig {
    fn default() -> Self {
        AnalyticConfig {
            quad: QuadConfig {
                rel_tol: 1e-9,
                abs_tol: 1e-15,
                max_subdivisions: 2000,
            },
            avg_tol: 1e-6,
            omega: OmegaForm::Exact,
        }
    }
}

fn from_log_pcon(l: f64) -> (f64, f64) {
    (l.exp(), -l.exp_m1())
}

fn radial_breaks(params: &SystemParams) -> PolarOptions {
    PolarOptions::symmetric().with_break(params.d)
}

/// Inputs of the TAS single-eavesdropper failure probability Ψ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TasIntegrand {
    pub y0: f64,
    pub m: f64,
    pub alpha: f64,
    pub d: f64,
    pub p_t: f64,
}

impl TasIntegrand {
    pub fn new(y: f64, params: &SystemParams) -> Self {
        TasIntegrand {
            y0: y0_from_y(y, params.beta()),
            m: params.m(),
            alpha: params.alpha,
            d: params.d,
            p_t: params.p_t,
        }
    }
}

/// Ψ(r, θ) = exp(−r^α Y0/P_T)/(1 + m (r/d_BE)^α Y0): probability that one
/// eavesdropper at (r, θ) sees an SNR above Y0.
pub fn psi_integrand(r: f64, theta: f64, p: &TasIntegrand) -> f64 {
    if p.y0 <= 0.0 || r == 0.0 {
        return 1.0;
    }
    let ra = r.powf(p.alpha);
    let num = (-ra * p.y0 / p.p_t).exp();
    if p.m == 0.0 {
        return num;
    }
    let d_be = distance_bob_to_point(r, theta, p.d);
    if d_be == 0.0 {
        return 0.0;
    }
    num / (1.0 + p.m * (r / d_be).powf(p.alpha) * p.y0)
}

/// ∫∫ Ψ r dθ dr over the eavesdropper annulus.
pub fn tas_campbell_integral(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<QuadResult> {
    let p = TasIntegrand::new(y, params);
    try_integrate_polar(
        |r, t| Ok(psi_integrand(r, t, &p)),
        params.r_guard,
        params.r_outer,
        &radial_breaks(params),
        &cfg.quad,
    )
}

fn tas_log_pcon(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    params.validate()?;
    if y0_from_y(y, params.beta()) < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if params.rho_e == 0.0 || params.r_guard >= params.r_outer {
        return Ok(0.0);
    }
    Ok(-params.rho_e * tas_campbell_integral(y, params, cfg)?.value)
}

/// P_con of TAS conditioned on the main-channel SNR Y.
pub fn pcon_tas_conditional(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tas_log_pcon(y, params, cfg)?).0)
}

/// SOP of TAS conditioned on Y.
pub fn sop_tas_conditional(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tas_log_pcon(y, params, cfg)?).1)
}

/// Reduced form for α = 2, R_s = 0 on a full disk: the θ-integral is done in
/// closed form and one radial integral remains.
pub fn pcon_tas_alpha2_closedform(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tas_alpha2_log_pcon(y, params, cfg)?).0)
}

pub fn sop_tas_alpha2_closedform(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tas_alpha2_log_pcon(y, params, cfg)?).1)
}

fn tas_alpha2_log_pcon(y: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    const F: &str = "pcon_tas_alpha2_closedform";
    params.validate()?;
    if params.alpha != 2.0 || params.r_s != 0.0 || params.r_guard != 0.0 {
        return Err(Error::precondition(F, "requires alpha = 2, R_s = 0 and R_g = 0"));
    }
    if !(y >= 0.0) {
        return Err(Error::domain(F, format!("Y = {y} must be >= 0")));
    }
    let big_r2 = params.r_outer * params.r_outer;
    let p_t = params.p_t;
    let first = if y > 0.0 {
        PI * p_t / y * -(-y * big_r2 / p_t).exp_m1()
    } else {
        PI * big_r2
    };
    let my = params.m() * y;
    let d2 = params.d * params.d;
    let second = if my > 0.0 {
        let a = 1.0 + my;
        // ((1+mY)r + d²)² − 4rd² rewritten as (Ar − d²)² + 4rd²mY
        let integral = try_integrate_pieces(
            |r| {
                let den = ((a * r - d2).powi(2) + 4.0 * r * d2 * my).sqrt();
                Ok((-y * r / p_t).exp() * r / den)
            },
            0.0,
            big_r2,
            &[d2 / a],
            &cfg.quad,
        )?;
        PI * my * integral.value
    } else {
        0.0
    };
    Ok(-params.rho_e * (first - second))
}

/// Unconditional TAS outage probability, averaged over Y.
pub fn sop_tas_unconditional(params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    params.validate()?;
    let beta = params.beta();
    let cdf = |y: f64| Ok(model::cdf_y(y, params));
    let scale = params.p_t;
    let quantile = |u: f64| invert_cdf(&cdf, u, scale);
    // Y < β − 1 means Y0 < 0: outage is certain there
    let u0 = model::cdf_y(beta - 1.0, params);
    average_in_u(
        &|y| sop_tas_conditional(y, params, cfg),
        &quantile,
        u0,
        u0,
        cfg.avg_tol,
    )
}

pub fn pcon_tas_unconditional(params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(1.0 - sop_tas_unconditional(params, cfg)?)
}

/// Half-duplex TAS (P_J = 0, large P_T): ln P_con / ρ_E =
/// −(2πβ^{2/α}/(α h*^{4/α}))·[γ(2/α, h*²R^α/β) − γ(2/α, h*²R_g^α/β)].
pub fn pcon_tas_hd(h_star_sq: f64, params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if params.p_j != 0.0 {
        return Err(Error::precondition("pcon_tas_hd", "requires P_J = 0"));
    }
    let k = h_star_sq / params.beta();
    Ok((-params.rho_e * hd_disk_integral(k, params)?).exp())
}

/// ∫_{R_g}^{R} 2π r e^{−k r^α} dr.
fn hd_disk_integral(k: f64, params: &SystemParams) -> Result<f64> {
    let nu = 2.0 / params.alpha;
    if k == 0.0 {
        return Ok(params.field_area());
    }
    let hi = specfun::lower_incomplete_gamma(nu, k * params.r_outer.powf(params.alpha))?;
    let lo = if params.r_guard > 0.0 {
        specfun::lower_incomplete_gamma(nu, k * params.r_guard.powf(params.alpha))?
    } else {
        0.0
    };
    Ok(2.0 * PI / params.alpha * k.powf(-nu) * (hi - lo))
}

/// R → ∞ limit of ln P_con / ρ_E for half-duplex TAS: −π(β/h*²)^{2/α}(2/α)Γ(2/α).
pub fn tas_hd_limit_r_inf(h_star_sq: f64, params: &SystemParams) -> f64 {
    let nu = 2.0 / params.alpha;
    -PI * (params.beta() / h_star_sq).powf(nu) * nu * gamma_fn(nu)
}

/// P_J → ∞ limit for α = 2, R_s = 0:
/// exp(−ρ_E 2π ∫ (1 − 1/(√(1+q(1+d/r)²)√(1+q(1−d/r)²))) r dr), q = ρ|g_B|²/h*².
pub fn pcon_tas_pj_infinity(
    h_star_sq: f64,
    g_b_sq: f64,
    params: &SystemParams,
    cfg: &AnalyticConfig,
) -> Result<f64> {
    params.validate()?;
    if params.alpha != 2.0 || params.r_s != 0.0 {
        return Err(Error::precondition("pcon_tas_pj_infinity", "requires alpha = 2 and R_s = 0"));
    }
    let q = params.rho * g_b_sq / h_star_sq;
    Ok((-params.rho_e * pj_infinity_integral(q, params, cfg)?).exp())
}

fn pj_infinity_integral(q: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    if q == 0.0 || params.rho_e == 0.0 {
        return Ok(0.0);
    }
    let d = params.d;
    let res = try_integrate_pieces(
        |r| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let a = q * (1.0 + d / r).powi(2);
            let b = q * (1.0 - d / r).powi(2);
            Ok(-(-0.5 * (a + b + a * b).ln_1p()).exp_m1() * r)
        },
        params.r_guard,
        params.r_outer,
        &[d],
        &cfg.quad,
    )?;
    Ok(2.0 * PI * res.value)
}

/// Inputs of the TAB single-eavesdropper failure probability Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabIntegrand {
    /// Threshold on the eavesdropper's SNR/(1−ε) (1/g in the exact form).
    pub t: f64,
    pub eps: f64,
    pub antennas: usize,
    pub m: f64,
    pub alpha: f64,
    pub d: f64,
    pub p_t: f64,
    pub p_j: f64,
    pub form: OmegaForm,
}

impl TabIntegrand {
    pub fn new(z: f64, params: &SystemParams, form: OmegaForm) -> Result<Self> {
        let beta = params.beta();
        let t = match form {
            OmegaForm::Exact => tab_threshold(z, beta, params.eps),
            OmegaForm::Published => {
                if !(params.p_j > 0.0) {
                    return Err(Error::domain(
                        "omega_integrand",
                        "the published form needs P_J > 0",
                    ));
                }
                z / beta
            }
        };
        Ok(TabIntegrand {
            t,
            eps: params.eps,
            antennas: params.antennas,
            m: params.m(),
            alpha: params.alpha,
            d: params.d,
            p_t: params.p_t,
            p_j: params.p_j,
            form,
        })
    }

    fn an_factor(&self) -> f64 {
        if self.antennas <= 1 || self.eps == 0.0 {
            return 1.0;
        }
        let k = (self.antennas - 1) as f64;
        (k * (self.eps * self.t / k).ln_1p()).exp()
    }
}

/// Ω(r, θ): probability that one eavesdropper at (r, θ) beats the TAB threshold.
pub fn omega_integrand(r: f64, theta: f64, p: &TabIntegrand) -> f64 {
    let d_be = distance_bob_to_point(r, theta, p.d);
    match p.form {
        OmegaForm::Exact => {
            if p.t <= 0.0 {
                return 1.0;
            }
            if r == 0.0 {
                return 1.0 / p.an_factor();
            }
            let num = (-r.powf(p.alpha) * p.t / p.p_t).exp();
            if d_be == 0.0 && p.m > 0.0 {
                return 0.0;
            }
            let f_e = if p.m == 0.0 { 0.0 } else { (r / d_be).powf(p.alpha) * p.m };
            num / ((1.0 + f_e * p.t) * p.an_factor())
        }
        OmegaForm::Published => {
            let f_e = if r == 0.0 { 0.0 } else { (r / d_be).powf(p.alpha) * p.m };
            (d_be.powf(p.alpha) / p.p_j).exp() / ((1.0 + f_e * p.t) * p.an_factor())
        }
    }
}

/// ∫∫ Ω r dθ dr over the eavesdropper annulus.
pub fn tab_campbell_integral(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<QuadResult> {
    let p = TabIntegrand::new(z, params, cfg.omega)?;
    try_integrate_polar(
        |r, t| Ok(omega_integrand(r, t, &p)),
        params.r_guard,
        params.r_outer,
        &radial_breaks(params),
        &cfg.quad,
    )
}

fn tab_log_pcon(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    params.validate()?;
    if !(z >= 0.0) {
        return Err(Error::domain("pcon_tab_conditional", format!("z = {z} must be >= 0")));
    }
    if cfg.omega == OmegaForm::Exact && tab_threshold(z, params.beta(), params.eps) < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if params.rho_e == 0.0 || params.r_guard >= params.r_outer {
        return Ok(0.0);
    }
    if cfg.omega == OmegaForm::Published
        && params.p_j > 0.0
        && (params.r_outer + params.d).powf(params.alpha) / params.p_j > 700.0
    {
        // e^{d_BE^α/P_J} passes e^700 near the far edge: the integral
        // overflows and P_con underflows to 0
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-params.rho_e * tab_campbell_integral(z, params, cfg)?.value)
}

/// P_con of TAB conditioned on z = ‖h‖²/(1/P_T + ρm|g_B|²).
pub fn pcon_tab_conditional(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tab_log_pcon(z, params, cfg)?).0.min(1.0))
}

pub fn sop_tab_conditional(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tab_log_pcon(z, params, cfg)?).1.max(0.0))
}

/// Unconditional TAB outage probability, averaged over Z.
pub fn sop_tab_unconditional(params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    params.validate()?;
    let cdf = |z: f64| model::cdf_z(z, params);
    let scale = params.p_t;
    let quantile = |u: f64| invert_cdf(&cdf, u, scale);
    let u0 = if cfg.omega == OmegaForm::Exact {
        // threshold negative for z < (β − 1)/(1 − ε)
        cdf((params.beta() - 1.0) / (1.0 - params.eps))?
    } else {
        0.0
    };
    average_in_u(
        &|z| sop_tab_conditional(z, params, cfg),
        &quantile,
        u0,
        u0,
        cfg.avg_tol,
    )
}

pub fn pcon_tab_unconditional(params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(1.0 - sop_tab_unconditional(params, cfg)?)
}

/// Reduced TAB form for α = 2, β = 1 on a full disk:
/// ∫∫ Ω = 2π/(1+zε/(M−1))^{M−1} ∫₀^R e^{−r²z/P_T}
///        (1 − 1/(√(1+(r+d)²/(r²zm)) √(1+(r−d)²/(r²zm)))) r dr.
pub fn pcon_tab_alpha2_beta1(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tab_alpha2_log_pcon(z, params, cfg)?).0)
}

pub fn sop_tab_alpha2_beta1(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    Ok(from_log_pcon(tab_alpha2_log_pcon(z, params, cfg)?).1)
}

fn tab_alpha2_log_pcon(z: f64, params: &SystemParams, cfg: &AnalyticConfig) -> Result<f64> {
    params.validate()?;
    if params.alpha != 2.0 || params.r_s != 0.0 || params.r_guard != 0.0 {
        return Err(Error::precondition(
            "pcon_tab_alpha2_beta1",
            "requires alpha = 2, R_s = 0 and R_g = 0",
        ));
    }
    if params.rho_e == 0.0 {
        return Ok(0.0);
    }
    let zm = z * params.m();
    let d = params.d;
    let p_t = params.p_t;
    let radial = try_integrate_pieces(
        |r| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let shield = if zm == 0.0 {
                1.0
            } else {
                let a = (r + d).powi(2) / (r * r * zm);
                let b = (r - d).powi(2) / (r * r * zm);
                -(-0.5 * (a + b + a * b).ln_1p()).exp_m1()
            };
            Ok((-r * r * z / p_t).exp() * shield * r)
        },
        0.0,
        params.r_outer,
        &[d],
        &cfg.quad,
    )?;
    let an = TabIntegrand::new(z, params, OmegaForm::Exact)?.an_factor();
    Ok(-params.rho_e * 2.0 * PI * radial.value / an)
}

/// P_J → ∞ limit of TAB for α = 2, R_s = 0 (q = ρ|g_B|²/‖h‖²).
pub fn pcon_tab_pj_infinity(
    h_norm_sq: f64,
    g_b_sq: f64,
    params: &SystemParams,
    cfg: &AnalyticConfig,
) -> Result<f64> {
    params.validate()?;
    if params.alpha != 2.0 || params.r_s != 0.0 {
        return Err(Error::precondition("pcon_tab_pj_infinity", "requires alpha = 2 and R_s = 0"));
    }
    let q = params.rho * g_b_sq / h_norm_sq;
    Ok((-params.rho_e * pj_infinity_integral(q, params, cfg)?).exp())
}

/// Half-duplex TAB (P_J = 0, large P_T):
/// ln P_con/ρ_E = −2πβ^{2/α}γ(2/α, R^α‖h‖²/β) / (α‖h‖^{4/α}(1 + εP_T‖h‖²/((M−1)β))^{M−1}).
pub fn pcon_tab_hd(h_norm_sq: f64, params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if params.p_j != 0.0 {
        return Err(Error::precondition("pcon_tab_hd", "requires P_J = 0"));
    }
    let beta = params.beta();
    let k = h_norm_sq / beta;
    let an = if params.antennas > 1 {
        let mm = (params.antennas - 1) as f64;
        (mm * (params.eps * params.p_t * h_norm_sq / (mm * beta)).ln_1p()).exp()
    } else {
        1.0
    };
    Ok((-params.rho_e * hd_disk_integral(k, params)? / an).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> AnalyticConfig {
        AnalyticConfig::default()
    }

    #[test]
    fn psi_limits() {
        let p = SystemParams::default();
        let zero = TasIntegrand::new(0.0, &p);
        assert_eq!(psi_integrand(2.0, 1.0, &zero), 1.0);
        let hd = TasIntegrand::new(3.0, &SystemParams { p_j: 0.0, ..p.clone() });
        let v = psi_integrand(2.0, 0.3, &hd);
        assert!((v - (-4.0 * 3.0 / 1e4f64).exp()).abs() < 1e-15);
        let at_bob = TasIntegrand::new(100.0, &p);
        assert_eq!(psi_integrand(1.0, 0.0, &at_bob), 0.0);
    }

    #[test]
    fn void_probability_when_threshold_is_zero() {
        let p = SystemParams { rho_e: 1.0, r_outer: 1.0, ..SystemParams::default() };
        let v = pcon_tas_conditional(0.0, &p, &cfg()).unwrap();
        let want = (-PI).exp();
        assert!(((v - want) / want).abs() < 1e-10);
    }

    #[test]
    fn negative_y0_is_certain_outage() {
        let p = SystemParams { r_s: 2.0, ..SystemParams::default() };
        assert_eq!(pcon_tas_conditional(1.0, &p, &cfg()).unwrap(), 0.0);
        assert_eq!(pcon_tab_conditional(1.0, &p, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn no_eavesdroppers_no_outage() {
        let p = SystemParams { rho_e: 0.0, ..SystemParams::default() };
        assert_eq!(sop_tas_conditional(5e3, &p, &cfg()).unwrap(), 0.0);
        assert_eq!(sop_tab_conditional(5e3, &p, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn published_omega_rejects_zero_jamming() {
        let p = SystemParams { p_j: 0.0, ..SystemParams::default() };
        assert!(TabIntegrand::new(10.0, &p, OmegaForm::Published).is_err());
    }

    #[test]
    fn hd_limit_example() {
        let p = SystemParams { p_j: 0.0, rho_e: 1.0, ..SystemParams::default() };
        let slope = tas_hd_limit_r_inf(1.0, &p);
        assert!(((slope.exp() - (-PI).exp()) / (-PI).exp()).abs() < 1e-14);
    }

    #[test]
    fn reduced_forms_check_preconditions() {
        let p = SystemParams { alpha: 3.0, ..SystemParams::default() };
        assert!(pcon_tas_alpha2_closedform(10.0, &p, &cfg()).is_err());
        assert!(pcon_tab_alpha2_beta1(10.0, &p, &cfg()).is_err());
        assert!(pcon_tas_pj_infinity(1.0, 1.0, &p, &cfg()).is_err());
        assert!(pcon_tas_hd(1.0, &SystemParams::default()).is_err());
        assert!(pcon_tab_hd(1.0, &SystemParams::default()).is_err());
    }
}
