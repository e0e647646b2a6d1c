//! Averaging a conditional probability over a conditioning variable.
//!
//! The average E[f(X)] is computed in probability space as ∫ f(F⁻¹(u)) du
//! with a tanh-sinh rule in u. The conditioning CDFs behave like x^M near 0,
//! so f(F⁻¹(u)) has algebraic endpoint singularities that defeat rules on a
//! uniform u-grid; the double-exponential clustering absorbs them. Halving
//! the step keeps every earlier node, and each node is typically a 2-D
//! quadrature, so values are reused across levels.

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// Tail mass dropped at each end of the u-range.
const U_TAIL: f64 = 1e-12;
/// Half-width of the truncated t-range; the weights there are below 1e-16.
const T_MAX: f64 = 3.2;
const START_STEP: f64 = 0.25;
const MAX_LEVELS: usize = 8;

/// Invert a continuous CDF by bracketing and bisection. `scale` is a typical
/// magnitude of the variable, used to seed the bracket.
pub(crate) fn invert_cdf<C>(cdf: &C, u: f64, scale: f64) -> Result<f64>
where
    C: Fn(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let mut hi = scale.max(f64::MIN_POSITIVE);
    let mut guard = 0;
    while cdf(hi)? < u {
        lo = hi;
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::domain("invert_cdf", format!("cannot bracket quantile {u}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// E[f(X)] restricted to u ∈ [u_start, 1], plus `head` (the already-known
/// contribution of u < u_start). `quantile` maps u to x.
pub(crate) fn average_in_u<F, Q>(
    f: &F,
    quantile: &Q,
    u_start: f64,
    head: f64,
    tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
    Q: Fn(f64) -> Result<f64> + Sync,
{
    let a = u_start.max(U_TAIL);
    let b = 1.0 - U_TAIL;
    if a >= b {
        return Ok(head + (1.0 - u_start) * f(quantile(b.max(u_start))?)?);
    }
    let half = 0.5 * (b - a);
    // node t ↦ (u, weight·dt⁻¹); u is built from the nearer end
    let node = |t: f64| -> (f64, f64) {
        let s = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * s.abs()).exp();
        let near = 2.0 * half * e / (1.0 + e);
        let u = if s >= 0.0 { b - near } else { a + near };
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        (u.clamp(a, b), w)
    };
    let sum_at = |ts: Vec<f64>| -> Result<f64> {
        let terms: Vec<f64> = ts
            .par_iter()
            .map(|&t| {
                let (u, w) = node(t);
                Ok(w * f(quantile(u)?)?)
            })
            .collect::<Result<_>>()?;
        Ok(terms.iter().sum())
    };
    let mut h = START_STEP;
    let kmax = (T_MAX / h) as i64;
    let mut sum = sum_at((-kmax..=kmax).map(|k| k as f64 * h).collect())?;
    let mut prev = sum * h;
    let mut level = 0;
    loop {
        h *= 0.5;
        let kmax = (T_MAX / h) as i64;
        sum += sum_at((-kmax..=kmax).filter(|k| k % 2 != 0).map(|k| k as f64 * h).collect())?;
        let cur = sum * h;
        let change = (cur - prev).abs();
        prev = cur;
        level += 1;
        if change <= tol * cur.abs().max(1e-300) {
            break;
        }
        if level >= MAX_LEVELS {
            return Err(Error::NonConvergence {
                func: "average_in_u",
                estimate: head + cur,
                error: change,
            });
        }
    }
    // the dropped tails are filled with the values at the cut
    let tails = (a - u_start) * f(quantile(a)?)? + U_TAIL * f(quantile(b)?)?;
    Ok(head + prev + tails)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_mean_of_indicator_like_function() {
        // X ~ Exp(1), E[e^{-X}] = 1/2
        let cdf = |x: f64| Ok(1.0 - (-x).exp());
        let q = |u: f64| invert_cdf(&cdf, u, 1.0);
        let v = average_in_u(&|x: f64| Ok((-x).exp()), &q, 0.0, 0.0, 1e-9).unwrap();
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn endpoint_singularities_converge() {
        // X ~ Gamma(5): F ~ x⁵/120 at 0, so 1 − e^{−x} is ~u^{1/5} there
        let cdf = |x: f64| crate::specfun::gamma_p(5.0, x);
        let q = |u: f64| invert_cdf(&cdf, u, 5.0);
        let v = average_in_u(&|x: f64| Ok(-(-x).exp_m1()), &q, 0.0, 0.0, 1e-9).unwrap();
        let want = 1.0 - 0.5f64.powi(5);
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn head_and_start_are_respected() {
        let cdf = |x: f64| Ok(1.0 - (-x).exp());
        let q = |u: f64| invert_cdf(&cdf, u, 1.0);
        // f = 1 on u ∈ [0.3, 1] plus a head of 0.3
        let v = average_in_u(&|_| Ok(1.0), &q, 0.3, 0.3, 1e-9).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }
}
