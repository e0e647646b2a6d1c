//! Test-side oracles, written independently of the crate's numerics:
//! double-exponential quadrature, a KS statistic and seeded RNGs.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ∫_a^b f by tanh-sinh. `f(x, x − a, b − x)` receives both endpoint
/// distances computed without cancellation.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mut h = 0.5;
    let mut prev = f64::NAN;
    for _level in 0..12 {
        let mut sum = 0.0;
        let kmax = (6.5 / h) as i64;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let c = FRAC_PI_2 * t.cosh();
            // 1 − tanh(s) and 1 + tanh(s) without cancellation
            let e = (-2.0 * s.abs()).exp();
            let small = 2.0 * e / (1.0 + e);
            let (dl, dr) = if s >= 0.0 { (half * (2.0 - small), half * small) } else { (half * small, half * (2.0 - small)) };
            if dl <= 0.0 || dr <= 0.0 {
                continue;
            }
            let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
            let w = c * sech2;
            let x = if s >= 0.0 { b - dr } else { a + dl };
            let v = f(x, dl, dr);
            if v.is_finite() {
                sum += w * v;
            }
        }
        let est = sum * h * half;
        if (est - prev).abs() <= tol * est.abs() {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
    prev
}

/// ∫_a^∞ f(x) by exp-sinh; `f(x, x − a)`.
pub fn exp_sinh<F: Fn(f64, f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    let mut h = 0.5;
    let mut prev = f64::NAN;
    for _level in 0..12 {
        let mut sum = 0.0;
        let kmax = (4.5 / h) as i64;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = (FRAC_PI_2 * t.sinh()).exp();
            let w = FRAC_PI_2 * t.cosh() * u;
            if u == 0.0 || !u.is_finite() {
                continue;
            }
            let v = f(a + u, u);
            if v.is_finite() {
                sum += w * v;
            }
        }
        let est = sum * h;
        if (est - prev).abs() <= tol * est.abs() {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
    prev
}

/// Largest gap between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Standard-library Γ via a Lanczos sum (g = 7, n = 9), independent of the
/// crate's implementation.
pub fn gamma_oracle(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_oracle(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}
