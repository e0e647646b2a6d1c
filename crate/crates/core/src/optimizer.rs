//! Jamming-power search and parameter sweeps.
//!
//! The search runs on the dB axis: an 8-point coarse scan brackets the
//! minimum and golden-section search refines it. When the scan shows more
//! than one local minimum the objective is not treated as unimodal; a dense
//! grid picks the best basin and golden-section refines inside it.

use crate::error::{Error, Result};
use crate::model::SystemParams;
use rayon::prelude::*;

const COARSE_POINTS: usize = 8;
const FALLBACK_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptSpec {
    pub pj_range_db: (f64, f64),
    pub tol_db: f64,
    /// Optional ε values; `optimal_pj_over_eps` searches P_J for each.
    pub eps_grid: Option<Vec<f64>>,
}

impl Default for OptSpec {
    fn default() -> Self {
        OptSpec {
            pj_range_db: (-20.0, 80.0),
            tol_db: 0.05,
            eps_grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Linear jamming power.
    pub pj_star: f64,
    pub pj_star_db: f64,
    pub sop_star: f64,
    /// Set when the optimum sits within `tol_db` of a range end.
    pub boundary: Option<Boundary>,
    pub warnings: Vec<String>,
    pub evaluations: usize,
}

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Minimizes f on [lo, hi] by golden-section search; returns (x, f(x), evals).
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = 2;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evals += 1;
    }
    let (fa, fb) = (f(a)?, f(b)?);
    evals += 2;
    let best = [(a, fa), (c, fc), (d, fd), (b, fb)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    Ok((best.0, best.1, evals))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Indices of local minima on a scan, with runs of equal values merged.
fn local_minima(values: &[f64]) -> Vec<usize> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if values[run.0] == *v => run.1 = i,
            _ => runs.push((i, i)),
        }
    }
    let mut out = Vec::new();
    for k in 0..runs.len() {
        let v = values[runs[k].0];
        let left = k == 0 || values[runs[k - 1].0] > v;
        let right = k + 1 == runs.len() || values[runs[k + 1].0] > v;
        if left && right {
            out.push(runs[k].0);
        }
    }
    out
}

fn eval_grid<F>(f: &F, xs: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

/// Minimizes an objective given on the dB axis over `[lo, hi]`.
pub fn minimize_db<F>(f: F, spec: &OptSpec) -> Result<OptResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (lo, hi) = spec.pj_range_db;
    if !(lo < hi) || !(spec.tol_db > 0.0) {
        return Err(Error::domain(
            "optimal_pj",
            format!("need lo < hi and tol_db > 0, got [{lo}, {hi}], tol {}", spec.tol_db),
        ));
    }
    let mut warnings = Vec::new();
    let mut xs = linspace(lo, hi, COARSE_POINTS);
    let mut vs = eval_grid(&f, &xs)?;
    let mut evaluations = xs.len();
    let minima = local_minima(&vs);
    if minima.len() > 1 {
        warnings.push(format!(
            "objective is not unimodal on the coarse scan ({} local minima); using a {}-point grid",
            minima.len(),
            FALLBACK_POINTS
        ));
        xs = linspace(lo, hi, FALLBACK_POINTS);
        vs = eval_grid(&f, &xs)?;
        evaluations += xs.len();
    }
    let best = (0..vs.len())
        .min_by(|&i, &j| vs[i].total_cmp(&vs[j]))
        .expect("nonempty scan");
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(xs.len() - 1)];
    let (mut x, mut v, n) = golden_section(&f, a, b, spec.tol_db)?;
    evaluations += n;
    if vs[best] < v {
        x = xs[best];
        v = vs[best];
    }
    let boundary = if x - lo <= spec.tol_db {
        Some(Boundary::Lower)
    } else if hi - x <= spec.tol_db {
        Some(Boundary::Upper)
    } else {
        None
    };
    Ok(OptResult {
        pj_star: db_to_lin(x),
        pj_star_db: x,
        sop_star: v,
        boundary,
        warnings,
        evaluations,
    })
}

/// P_J minimizing `objective` with every other parameter held at `params`.
pub fn optimal_pj<F>(objective: F, spec: &OptSpec, params: &SystemParams) -> Result<OptResult>
where
    F: Fn(&SystemParams) -> Result<f64> + Sync,
{
    minimize_db(
        |db| {
            let p = SystemParams { p_j: db_to_lin(db), ..params.clone() };
            objective(&p)
        },
        spec,
    )
}

/// `optimal_pj` for each ε of `spec.eps_grid`.
pub fn optimal_pj_over_eps<F>(objective: F, spec: &OptSpec, params: &SystemParams) -> Result<Vec<(f64, OptResult)>>
where
    F: Fn(&SystemParams) -> Result<f64> + Sync,
{
    let grid = spec
        .eps_grid
        .as_ref()
        .ok_or_else(|| Error::domain("optimal_pj_over_eps", "eps_grid is empty"))?;
    grid.iter()
        .map(|&eps| {
            let p = SystemParams { eps, ..params.clone() };
            Ok((eps, optimal_pj(&objective, spec, &p)?))
        })
        .collect()
}

/// Quantity varied by a sweep. `Pj` values are in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Pj,
    Eps,
    RhoE,
    RhoU,
    M,
    N,
    R,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Pj => "P_J_dB",
            Axis::Eps => "eps",
            Axis::RhoE => "rho_E",
            Axis::RhoU => "rho_U",
            Axis::M => "M",
            Axis::N => "n",
            Axis::R => "R",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        Some(match s {
            "P_J" | "P_J_dB" | "pj" => Axis::Pj,
            "eps" => Axis::Eps,
            "rho_E" => Axis::RhoE,
            "rho_U" => Axis::RhoU,
            "M" => Axis::M,
            "n" => Axis::N,
            "R" => Axis::R,
            _ => return None,
        })
    }

    pub fn apply(self, base: &Setting, value: f64) -> Result<Setting> {
        let mut s = base.clone();
        let count = |v: f64| -> Result<usize> {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::domain("sweep", format!("{} = {v} must be a positive integer", self.name())))
            }
        };
        match self {
            Axis::Pj => s.params.p_j = db_to_lin(value),
            Axis::Eps => s.params.eps = value,
            Axis::RhoE => s.params.rho_e = value,
            Axis::RhoU => s.params.rho_u = value,
            Axis::M => s.params.antennas = count(value)?,
            Axis::N => s.n = count(value)?,
            Axis::R => s.params.r_outer = value,
        }
        Ok(s)
    }
}

/// Parameters of one evaluation: the system plus the served user's order.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub params: SystemParams,
    pub n: usize,
}

#[derive(Debug)]
pub struct SweepRow<T> {
    pub axis: Axis,
    pub value: f64,
    pub outcome: Result<T>,
}

/// Evaluates `objective` at every grid value, in parallel, keeping grid
/// order. Failing rows keep their error and the sweep goes on.
pub fn sweep<T, F>(objective: F, axis: Axis, grid: &[f64], base: &Setting) -> Result<Vec<SweepRow<T>>>
where
    T: Send,
    F: Fn(&Setting) -> Result<T> + Sync,
{
    if grid.is_empty() {
        return Err(Error::domain("sweep", "grid is empty"));
    }
    Ok(grid
        .par_iter()
        .map(|&value| SweepRow {
            axis,
            value,
            outcome: axis.apply(base, value).and_then(|s| objective(&s)),
        })
        .collect())
}
