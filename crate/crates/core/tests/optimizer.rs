//! Golden-section search against a dense grid on real SOP objectives.

use rayon::prelude::*;
use sopcalc_core::model::SystemParams;
use sopcalc_core::montecarlo::Scheme;
use sopcalc_core::optimizer::{db_to_lin, optimal_pj, OptSpec, Setting};
use sopcalc_core::scenario::{evaluate, Method, Scenario};

fn objective(scheme: Scheme) -> impl Fn(&SystemParams) -> sopcalc_core::error::Result<f64> + Sync {
    let sc = Scenario::new(scheme);
    move |p: &SystemParams| Ok(evaluate(&sc, &Setting { params: p.clone(), n: 1 }, Method::Analytic)?.sop)
}

#[test]
fn golden_section_matches_dense_grid() {
    let spec = OptSpec::default();
    let (lo, hi) = spec.pj_range_db;
    let step = (hi - lo) / 1023.0;
    for (scheme, eps) in [(Scheme::Tab, 0.01), (Scheme::Tab, 0.1), (Scheme::Tas, 0.0)] {
        let base = SystemParams { eps, ..SystemParams::default() };
        let f = objective(scheme);
        let grid: Vec<(f64, f64)> = (0..1024)
            .into_par_iter()
            .map(|i| {
                let db = lo + step * i as f64;
                (db, f(&SystemParams { p_j: db_to_lin(db), ..base.clone() }).unwrap())
            })
            .collect();
        let (best_db, best) = grid.iter().copied().fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let res = optimal_pj(&f, &spec, &base).unwrap();
        // the grid argmin itself is only known to half a grid step
        assert!(
            (res.pj_star_db - best_db).abs() <= spec.tol_db + step / 2.0,
            "{scheme:?} eps {eps}: {} dB vs grid {best_db} dB",
            res.pj_star_db
        );
        assert!(res.sop_star <= best * (1.0 + 1e-6), "{scheme:?} eps {eps}: {} vs {best}", res.sop_star);
    }
}
