//! Adaptive Gauss–Kronrod quadrature: finite intervals, semi-infinite
//! intervals through a logarithmic map, and nested polar integrals over an
//! annulus.

use crate::error::{Error, Result};
use std::cell::RefCell;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            abs_tol,
            ..QuadConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParam {
                name: "QuadConfig",
                msg: format!(
                    "rel_tol = {}, abs_tol = {}, max_subdivisions = {}",
                    self.rel_tol, self.abs_tol, self.max_subdivisions
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk15<F>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (1.0f64).min((200.0 * err / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        return Err(Error::domain(
            "integrate_1d",
            format!("integrand not finite on [{lo}, {hi}]"),
        ));
    }
    Ok((value, err))
}

/// Adaptive integration of a fallible integrand over [lo, hi]. Subintervals
/// are bisected in order of decreasing error estimate.
pub fn try_integrate_1d<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(
            "integrate_1d",
            format!("need finite lo < hi (lo = {lo}, hi = {hi})"),
        ));
    }
    let (v, e) = qk15(&mut f, lo, hi)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    let mut splits = 0;
    loop {
        if total_err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            break;
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                func: "integrate_1d",
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // interval cannot be split further in floating point
            return Err(Error::NonConvergence {
                func: "integrate_1d",
                estimate: total,
                error: total_err,
            });
        }
        let (v1, e1) = qk15(&mut f, worst.lo, mid)?;
        let (v2, e2) = qk15(&mut f, mid, worst.hi)?;
        evaluations += 30;
        splits += 1;
        total += v1 + v2 - worst.value;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
        // re-sum periodically to keep the running totals free of drift
        if splits % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        } else {
            total_err += e1 + e2 - worst.error;
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

pub fn integrate_1d<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), lo, hi, cfg)
}

/// ∫ over [lo, hi] split at interior breakpoints; tolerances apply to the whole.
pub fn try_integrate_pieces<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);
    if pts.len() == 2 {
        return try_integrate_1d(f, lo, hi, cfg);
    }
    // first pass for a magnitude, then share the absolute budget across pieces
    let mut pieces = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        pieces.push(try_integrate_1d(&mut f, w[0], w[1], cfg)?);
    }
    let total: f64 = pieces.iter().map(|p| p.value).sum();
    let budget = cfg.abs_tol.max(cfg.rel_tol * total.abs());
    let err: f64 = pieces.iter().map(|p| p.error).sum();
    if err <= budget {
        return Ok(QuadResult {
            value: total,
            error: err,
            evaluations: pieces.iter().map(|p| p.evaluations).sum(),
        });
    }
    let n = pieces.len() as f64;
    let piece_cfg = QuadConfig {
        abs_tol: budget / n,
        rel_tol: cfg.rel_tol,
        max_subdivisions: cfg.max_subdivisions,
    };
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in pts.windows(2) {
        let r = try_integrate_1d(&mut f, w[0], w[1], &piece_cfg)?;
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    }
    Ok(out)
}

/// ∫_lo^∞ f(x) dx through x = lo − scale·ln u, u ∈ (0, 1]. `scale` should be
/// comparable to the decay length of f.
pub fn try_integrate_semi_infinite_scaled<F>(
    mut f: F,
    lo: f64,
    scale: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(scale > 0.0) || !lo.is_finite() {
        return Err(Error::domain(
            "integrate_semi_infinite",
            format!("need finite lo and scale > 0 (lo = {lo}, scale = {scale})"),
        ));
    }
    try_integrate_1d(
        |u| {
            let x = lo - scale * u.ln();
            let v = f(x)?;
            Ok(if v == 0.0 { 0.0 } else { v * scale / u })
        },
        0.0,
        1.0,
        cfg,
    )
}

pub fn integrate_semi_infinite<F>(mut f: F, lo: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite_scaled(|x| Ok(f(x)), lo, 1.0, cfg)
}

/// Options for [`integrate_polar`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolarOptions {
    /// Integrand satisfies f(r, θ) = f(r, 2π − θ); integrate [0, π] and double.
    pub theta_symmetric: bool,
    /// Radii where the integrand has a kink or peak (e.g. the receiver's distance).
    pub radial_breaks: Vec<f64>,
}

impl PolarOptions {
    pub fn symmetric() -> Self {
        PolarOptions {
            theta_symmetric: true,
            radial_breaks: Vec::new(),
        }
    }

    pub fn with_break(mut self, r: f64) -> Self {
        self.radial_breaks.push(r);
        self
    }
}

/// ∫_{r_lo}^{r_hi} ∫_0^{2π} f(r, θ) r dθ dr. The Jacobian r is applied here;
/// callers pass the bare integrand.
pub fn try_integrate_polar<F>(
    f: F,
    r_lo: f64,
    r_hi: f64,
    opts: &PolarOptions,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(r_lo >= 0.0) || !(r_lo < r_hi) {
        return Err(Error::domain(
            "integrate_polar",
            format!("need 0 <= r_lo < r_hi (r_lo = {r_lo}, r_hi = {r_hi})"),
        ));
    }
    let (theta_hi, factor) = if opts.theta_symmetric {
        (PI, 2.0)
    } else {
        (2.0 * PI, 1.0)
    };
    // inner integrals run tighter so their noise stays below the outer tolerance
    let inner_cfg = QuadConfig {
        rel_tol: cfg.rel_tol * 0.1,
        abs_tol: cfg.abs_tol * 0.01,
        max_subdivisions: cfg.max_subdivisions,
    };
    let evals = RefCell::new(0usize);
    let res = try_integrate_pieces(
        |r| {
            if r == 0.0 {
                return Ok(0.0);
            }
            let inner = try_integrate_1d(|t| f(r, t), 0.0, theta_hi, &inner_cfg)?;
            *evals.borrow_mut() += inner.evaluations;
            Ok(factor * inner.value * r)
        },
        r_lo,
        r_hi,
        &opts.radial_breaks,
        cfg,
    )?;
    Ok(QuadResult {
        value: res.value,
        error: res.error,
        evaluations: evals.into_inner(),
    })
}

pub fn integrate_polar<F>(
    f: F,
    r_lo: f64,
    r_hi: f64,
    opts: &PolarOptions,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    try_integrate_polar(|r, t| Ok(f(r, t)), r_lo, r_hi, opts, cfg)
}

/// Nodes and weights of a Gauss rule, weights normalized to sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub–Welsch: eigen-decomposition of the Jacobi matrix with diagonal `diag`
/// and off-diagonal `off` (off[0] unused). Weights are the squared first
/// components of the normalized eigenvectors.
fn golub_welsch(mut diag: Vec<f64>, off: &[f64]) -> Result<GaussRule> {
    let n = diag.len();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { off[i + 1] } else { 0.0 }).collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    // implicit QL with Wilkinson shifts, tracking only the first eigenvector row
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = diag[mm].abs() + diag[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    func: "golub_welsch",
                    estimate: f64::NAN,
                    error: e[l].abs(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[mm] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = mm;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[mm] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if early {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    })
}

/// n-point Gauss–Legendre rule on [−1, 1], weights summing to 1.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::domain("gauss_legendre", "need at least one node"));
    }
    let off: Vec<f64> = (0..n)
        .map(|i| {
            let k = i as f64;
            if i == 0 { 0.0 } else { k / (4.0 * k * k - 1.0).sqrt() }
        })
        .collect();
    golub_welsch(vec![0.0; n], &off)
}

/// n-point generalized Gauss–Laguerre rule for the weight y^a e^{−y} on
/// [0, ∞), normalized so the weights are Gamma(a+1) probabilities.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<GaussRule> {
    if n == 0 || !(a > -1.0) {
        return Err(Error::domain("gauss_laguerre", format!("need n >= 1 and a > -1 (n = {n}, a = {a})")));
    }
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + a + 1.0).collect();
    let off: Vec<f64> = (0..n)
        .map(|i| {
            let k = i as f64;
            (k * (k + a)).sqrt()
        })
        .collect();
    golub_welsch(diag, &off)
}
