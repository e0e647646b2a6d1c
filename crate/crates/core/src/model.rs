//! System parameters, geometry, random fields and the distributions of the
//! conditioning variables.
//!
//! Powers are linear and relative to a unit noise variance. Alice sits at the
//! origin and Bob on the positive x-axis at distance `d`.

use crate::error::{Error, Result};
use crate::specfun::{self, ln_gamma, SpecFunConfig};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// All physical-layer parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Number of transmit antennas at Alice (M).
    pub antennas: usize,
    /// Transmit power P_T.
    pub p_t: f64,
    /// Jamming power P_J of a full-duplex Bob.
    pub p_j: f64,
    /// Residual self-interference gain ρ.
    pub rho: f64,
    /// Fraction ε of P_T spent on artificial noise.
    pub eps: f64,
    /// Path-loss exponent α.
    pub alpha: f64,
    /// Outer radius R of the eavesdropper field.
    pub r_outer: f64,
    /// Guard radius R_g (eavesdropper-free disk around Alice).
    pub r_guard: f64,
    /// Alice–Bob distance.
    pub d: f64,
    /// Eavesdropper intensity ρ_E.
    pub rho_e: f64,
    /// User intensity ρ_U (user-selection scenarios).
    pub rho_u: f64,
    /// Target secrecy rate R_s in bit/s/Hz.
    pub r_s: f64,
    /// Target data rate R_D in bit/s/Hz.
    pub r_d: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            antennas: 5,
            p_t: 1e4,
            p_j: 1e4,
            rho: 0.01,
            eps: 0.01,
            alpha: 2.0,
            r_outer: 5.0,
            r_guard: 0.0,
            d: 1.0,
            rho_e: 1.0,
            rho_u: 0.5,
            r_s: 0.0,
            r_d: 4.0,
        }
    }
}

impl SystemParams {
    /// β = 2^{R_s}.
    pub fn beta(&self) -> f64 {
        self.r_s.exp2()
    }

    /// m = P_J / P_T.
    pub fn m(&self) -> f64 {
        self.p_j / self.p_t
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, msg: String| Err(Error::InvalidParam { name, msg });
        if self.antennas < 1 {
            return bad("M", "need at least one antenna".into());
        }
        let nonneg = [
            ("P_T", self.p_t),
            ("P_J", self.p_j),
            ("rho", self.rho),
            ("R", self.r_outer),
            ("R_g", self.r_guard),
            ("d", self.d),
            ("rho_E", self.rho_e),
            ("rho_U", self.rho_u),
            ("R_s", self.r_s),
            ("R_D", self.r_d),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || v.is_nan() {
                return bad(name, format!("{v} must be a nonnegative number"));
            }
        }
        if !(self.p_t > 0.0) {
            return bad("P_T", "transmit power must be positive".into());
        }
        if !(self.alpha > 0.0) {
            return bad("alpha", format!("{} must be positive", self.alpha));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return bad("eps", format!("{} must lie in [0, 1)", self.eps));
        }
        if !(self.r_guard <= self.r_outer) {
            return bad("R_g", format!("{} exceeds R = {}", self.r_guard, self.r_outer));
        }
        Ok(())
    }

    /// Area of the eavesdropper annulus.
    pub fn field_area(&self) -> f64 {
        PI * (self.r_outer * self.r_outer - self.r_guard * self.r_guard)
    }
}

/// Distance from Bob (at (d, 0)) to the point (r cos θ, r sin θ).
pub fn distance_bob_to_point(r: f64, theta: f64, d: f64) -> f64 {
    (r * r + d * d - 2.0 * r * d * theta.cos()).max(0.0).sqrt()
}

/// Main-channel fading: Alice→Bob vector h and Bob's self-interference g_B.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h: Vec<Complex64>,
    pub g_b: Complex64,
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(antennas: usize, rng: &mut R) -> Self {
        let h = (0..antennas).map(|_| complex_normal(rng)).collect();
        let g_b = complex_normal(rng);
        ChannelDraw { h, g_b }
    }

    /// Channel with unit gain on every antenna and |g_B|² = 1.
    pub fn nominal(antennas: usize) -> Self {
        ChannelDraw {
            h: vec![Complex64::new(1.0, 0.0); antennas],
            g_b: Complex64::new(1.0, 0.0),
        }
    }

    /// Index of the strongest antenna (TAS choice).
    pub fn best_antenna(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.h.iter().enumerate() {
            if v.norm_sqr() > self.h[best].norm_sqr() {
                best = i;
            }
        }
        best
    }

    /// max_i |h_i|².
    pub fn h_star_sq(&self) -> f64 {
        self.h[self.best_antenna()].norm_sqr()
    }

    /// ‖h‖².
    pub fn h_norm_sq(&self) -> f64 {
        self.h.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn g_b_sq(&self) -> f64 {
        self.g_b.norm_sqr()
    }
}

/// Standard circularly-symmetric complex Gaussian CN(0, 1).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Conditioning variables for one realization of (h, g_B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningState {
    /// TAS SNR at Bob.
    pub y: f64,
    /// Y/β + 1/β − 1.
    pub y0: f64,
    /// TAB SNR at Bob divided by (1 − ε).
    pub z: f64,
    /// β(1 + ρP_J|g_B|²)/(P_T‖h‖²).
    pub g: f64,
    /// 1/(g P_T).
    pub c: f64,
}

impl ConditioningState {
    pub fn new(params: &SystemParams, h_star_sq: f64, h_norm_sq: f64, g_b_sq: f64) -> Self {
        let beta = params.beta();
        let si = 1.0 + params.rho * params.p_j * g_b_sq;
        let y = h_star_sq * params.p_t / si;
        let z = h_norm_sq * params.p_t / si;
        let g = beta * si / (params.p_t * h_norm_sq);
        ConditioningState {
            y,
            y0: y / beta + 1.0 / beta - 1.0,
            z,
            g,
            c: 1.0 / (g * params.p_t),
        }
    }

    pub fn from_draw(params: &SystemParams, draw: &ChannelDraw) -> Self {
        Self::new(params, draw.h_star_sq(), draw.h_norm_sq(), draw.g_b_sq())
    }
}

/// Y0 = Y/β + 1/β − 1 for a given TAS SNR.
pub fn y0_from_y(y: f64, beta: f64) -> f64 {
    y / beta + 1.0 / beta - 1.0
}

/// Eavesdropper threshold on SNR/(1−ε) for TAB: z/β + (1/β − 1)/(1 − ε).
pub fn tab_threshold(z: f64, beta: f64, eps: f64) -> f64 {
    z / beta + (1.0 / beta - 1.0) / (1.0 - eps)
}

/// One realization of the eavesdropper point process, in polar coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdField {
    pub points: Vec<(f64, f64)>,
}

/// Poisson field of intensity ρ_E on the annulus [R_g, R].
pub fn sample_ed_field<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> EdField {
    let n = sample_poisson(params.rho_e * params.field_area(), rng);
    let (r2_lo, r2_span) = annulus_r2(params.r_guard, params.r_outer);
    let points = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let r = (r2_lo + u * r2_span).sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            (r, theta)
        })
        .collect();
    EdField { points }
}

pub(crate) fn annulus_r2(r_lo: f64, r_hi: f64) -> (f64, f64) {
    (r_lo * r_lo, r_hi * r_hi - r_lo * r_lo)
}

pub(crate) fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    let p = Poisson::new(mean).expect("positive finite mean");
    let k: f64 = p.sample(rng);
    k as usize
}

/// F_Y(y) = Σ_{i=0}^{M} C(M,i)(−1)^i e^{−iy/P_T}/(1 + iyρm).
pub fn cdf_y(y: f64, params: &SystemParams) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let m = params.m();
    let mm = params.antennas as u64;
    let mut sum = 0.0;
    for i in 0..=mm {
        let fi = i as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * specfun::binomial(mm, i) * (-fi * y / params.p_t).exp()
            / (1.0 + fi * y * params.rho * m);
    }
    sum.clamp(0.0, 1.0)
}

/// Density of Y, the derivative of [`cdf_y`].
pub fn pdf_y(y: f64, params: &SystemParams) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let m = params.m();
    let rm = params.rho * m;
    let mm = params.antennas as u64;
    let mut sum = 0.0;
    for i in 1..=mm {
        let fi = i as f64;
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        let den = 1.0 + fi * y * rm;
        sum += sign
            * specfun::binomial(mm, i)
            * fi
            * (-fi * y / params.p_t).exp()
            * (fi * y * rm / params.p_t + 1.0 / params.p_t + rm)
            / (den * den);
    }
    sum.max(0.0)
}

/// CDF of Z = ‖h‖²/(1/P_T + ρm|g_B|²), exact for every m ≥ 0.
pub fn cdf_z(z: f64, params: &SystemParams) -> Result<f64> {
    if z <= 0.0 {
        return Ok(0.0);
    }
    let sf = SpecFunConfig::default();
    let mf = params.antennas as f64;
    let a = z / params.p_t;
    let b = z * params.rho * params.m();
    let p = sf.gamma_p(mf, a)?;
    if b == 0.0 {
        return Ok(p);
    }
    // E_X[P(M, a + bX)] = P(M,a) + e^{a/b}(1+1/b)^{−M} Q(M, a(1+1/b))
    let k = 1.0 + 1.0 / b;
    let ln_tail = a / b - mf * k.ln() + sf.ln_gamma_q(mf, a * k)?;
    Ok((p + ln_tail.exp()).clamp(0.0, 1.0))
}

/// Exact density of Z for m > 0:
/// M(ρm)^M z^{M−1} e^{−z/P_T} Σ_{k=0}^{M} t^k/k! / (1+zρm)^{M+1}, t = z/P_T + 1/(ρP_J).
pub fn pdf_z(z: f64, params: &SystemParams) -> Result<f64> {
    let rm = params.rho * params.m();
    if !(rm > 0.0) {
        return Err(Error::domain(
            "pdf_z",
            "ρm = 0: Z = P_T‖h‖² is gamma distributed, use pdf_z_gamma",
        ));
    }
    if z <= 0.0 {
        return Ok(if params.antennas == 1 && z == 0.0 {
            rm * (1.0 + 1.0 / (params.rho * params.p_j))
        } else {
            0.0
        });
    }
    let mf = params.antennas as f64;
    let t = z / params.p_t + 1.0 / (params.rho * params.p_j);
    let ln_t = t.ln();
    let terms: Vec<f64> = (0..=params.antennas)
        .map(|k| k as f64 * ln_t - ln_gamma(k as f64 + 1.0))
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = top + terms.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
    let ln_f = mf.ln() + mf * rm.ln() + (mf - 1.0) * z.ln() - z / params.p_t
        - (mf + 1.0) * (z * rm).ln_1p()
        + ln_sum;
    Ok(ln_f.exp())
}

/// The density as printed in the literature, M ρm (zρm)^{M−1}/(1+zρm)^{M+1}·e^{1/(ρP_J)}.
/// It integrates to e^{1/(ρP_J)} rather than 1; kept for comparison only.
pub fn pdf_z_published(z: f64, params: &SystemParams) -> Result<f64> {
    let rm = params.rho * params.m();
    if !(rm > 0.0) {
        return Err(Error::domain("pdf_z_published", "requires ρm > 0"));
    }
    let mf = params.antennas as f64;
    let w = z * rm;
    Ok(mf * rm * w.powf(mf - 1.0) / (1.0 + w).powf(mf + 1.0) * (1.0 / (params.rho * params.p_j)).exp())
}

/// Density of Z = P_T‖h‖² when m = 0 (gamma with shape M, scale P_T).
pub fn pdf_z_gamma(z: f64, params: &SystemParams) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let mf = params.antennas as f64;
    let x = z / params.p_t;
    if x == 0.0 {
        return if params.antennas == 1 { 1.0 / params.p_t } else { 0.0 };
    }
    ((mf - 1.0) * x.ln() - x - ln_gamma(mf)).exp() / params.p_t
}

/// Θ by inverse CDF: 1 − u^{1/(M−1)}.
pub fn sample_theta<R: Rng + ?Sized>(antennas: usize, rng: &mut R) -> f64 {
    if antennas <= 1 {
        return 1.0;
    }
    let u: f64 = rng.random();
    1.0 - u.powf(1.0 / (antennas as f64 - 1.0))
}

/// Θ = |h_AEᵀh*|²/(‖h_AE‖²‖h‖²) from fresh Gaussian vectors.
pub fn sample_theta_geometric<R: Rng + ?Sized>(antennas: usize, rng: &mut R) -> f64 {
    if antennas <= 1 {
        return 1.0;
    }
    let h: Vec<Complex64> = (0..antennas).map(|_| complex_normal(rng)).collect();
    let h_ae: Vec<Complex64> = (0..antennas).map(|_| complex_normal(rng)).collect();
    beam_fraction(&h_ae, &h)
}

/// Fraction of ‖h_AE‖² captured by the beam direction h*/‖h‖.
pub fn beam_fraction(h_ae: &[Complex64], h: &[Complex64]) -> f64 {
    let dot: Complex64 = h_ae.iter().zip(h).map(|(a, b)| a * b.conj()).sum();
    let n_ae: f64 = h_ae.iter().map(|v| v.norm_sqr()).sum();
    let n_h: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    dot.norm_sqr() / (n_ae * n_h)
}

/// Density of the distance to the n-th nearest point of a planar PPP of intensity ρ_U.
pub fn pdf_dabn(x: f64, n: usize, rho_u: f64) -> f64 {
    if x <= 0.0 || n == 0 || !(rho_u > 0.0) {
        return 0.0;
    }
    let nf = n as f64;
    let ln = -rho_u * PI * x * x + 2f64.ln() + nf * (rho_u * PI).ln() + (2.0 * nf - 1.0) * x.ln()
        - ln_gamma(nf);
    ln.exp()
}

/// CDF of the n-th nearest distance: P(n, ρ_U π x²).
pub fn cdf_dabn(x: f64, n: usize, rho_u: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if n == 0 || !(rho_u > 0.0) {
        return Err(Error::domain("cdf_dabn", "need n >= 1 and rho_U > 0"));
    }
    specfun::gamma_p(n as f64, rho_u * PI * x * x)
}

/// Largest AN fraction that still supports the data rate R_D.
pub fn eps_max(params: &SystemParams, h_norm_sq: f64, g_b_sq: f64) -> f64 {
    let need = (1.0 + params.rho * g_b_sq * params.p_j) * (params.r_d.exp2() - 1.0)
        / (h_norm_sq * params.p_t);
    (1.0 - need).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bob_distance_geometry() {
        assert!(distance_bob_to_point(1.0, 0.0, 1.0).abs() < 1e-15);
        assert!((distance_bob_to_point(3.0, PI / 2.0, 1.0) - 10f64.sqrt()).abs() < 1e-14);
        assert!((distance_bob_to_point(3.0, PI, 1.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn cdf_y_endpoints() {
        let p = SystemParams::default();
        assert_eq!(cdf_y(0.0, &p), 0.0);
        assert!((cdf_y(1e12, &p) - 1.0).abs() < 1e-9);
        let p0 = SystemParams { p_j: 0.0, ..p };
        let y = 2.0e4;
        let want = (1.0 - (-y / p0.p_t).exp()).powi(5);
        assert!((cdf_y(y, &p0) - want).abs() < 1e-14);
    }

    #[test]
    fn cdf_z_reduces_to_gamma_at_zero_jamming() {
        let p = SystemParams { p_j: 0.0, ..SystemParams::default() };
        let z = 3.0e4;
        let want = specfun::gamma_p(5.0, 3.0).unwrap();
        assert!((cdf_z(z, &p).unwrap() - want).abs() < 1e-14);
        assert!(pdf_z(z, &p).is_err());
    }

    #[test]
    fn cdf_z_tiny_jamming_is_finite() {
        let p = SystemParams { p_j: 1e-9, p_t: 1e6, ..SystemParams::default() };
        let v = cdf_z(5e6, &p).unwrap();
        let want = specfun::gamma_p(5.0, 5.0).unwrap();
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn eps_max_examples() {
        let p = SystemParams::default();
        let v = eps_max(&p, 5.0, 1.0);
        assert!((v - (1.0 - 101.0 * 15.0 / 5e4)).abs() < 1e-12);
        assert!((v - 0.9697).abs() < 1e-4);
        let free = SystemParams { r_d: 0.0, ..p.clone() };
        assert_eq!(eps_max(&free, 5.0, 1.0), 1.0);
        let weak = SystemParams { p_t: 1.0, ..p };
        assert_eq!(eps_max(&weak, 0.1, 1.0), 0.0);
    }

    #[test]
    fn conditioning_identity() {
        let p = SystemParams { r_s: 1.3, ..SystemParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let draw = ChannelDraw::sample(p.antennas, &mut rng);
            let c = ConditioningState::from_draw(&p, &draw);
            assert!((c.g * c.z / p.beta() - 1.0).abs() < 1e-14);
            assert!(c.y <= c.z);
        }
    }

    #[test]
    fn empty_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = SystemParams { rho_e: 0.0, ..SystemParams::default() };
        assert!(sample_ed_field(&p, &mut rng).points.is_empty());
        let p = SystemParams { r_guard: 5.0, ..SystemParams::default() };
        assert!(sample_ed_field(&p, &mut rng).points.is_empty());
    }

    #[test]
    fn theta_degenerate_single_antenna() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_theta(1, &mut rng), 1.0);
        assert_eq!(sample_theta_geometric(1, &mut rng), 1.0);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut p = SystemParams::default();
        p.eps = 1.0;
        assert!(p.validate().is_err());
        let p = SystemParams { r_guard: 6.0, ..SystemParams::default() };
        assert!(p.validate().is_err());
        assert!(SystemParams::default().validate().is_ok());
    }
}
