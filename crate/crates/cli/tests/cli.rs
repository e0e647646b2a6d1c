use sopcalc::output::{read_csv, CSV_HEADER};
use std::process::{Command, Output};

fn sopcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sopcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analytic_sweep_writes_csv() {
    let o = sopcalc(&["analytic", "--set", "scheme=tab", "--set", "axis=P_J", "--set", "grid=0,20,40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with(&CSV_HEADER.join(",")));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.method == "analytic" && r.sop.is_some_and(|p| (0.0..=1.0).contains(&p))));
    assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), [0.0, 20.0, 40.0]);
}

#[test]
fn config_file_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    let out = dir.path().join("rows.json");
    std::fs::write(&cfg, "# TAS sweep over eavesdropper density\nscheme = tas\naxis = rho_E\ngrid = 0.1, 1\n").unwrap();
    let o = sopcalc(&["analytic", "--config", cfg.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["sop"].as_f64().unwrap() < rows[1]["sop"].as_f64().unwrap());
}

#[test]
fn zero_density_gives_zero_everywhere() {
    for cmd in ["analytic", "simulate"] {
        for scheme in ["tas", "tab"] {
            let o = sopcalc(&[cmd, "--set", &format!("scheme={scheme}"), "--set", "rho_E=0", "--set", "axis=P_J", "--set", "grid=lin(-10,60,8)", "--trials", "500"]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            let rows = read_csv(stdout(&o).as_bytes()).unwrap();
            assert!(rows.iter().all(|r| r.sop == Some(0.0)), "{cmd} {scheme}");
        }
    }
}

#[test]
fn configuration_errors_exit_2() {
    let o = sopcalc(&["analytic", "--set", "bogus=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert_eq!(sopcalc(&["analytic", "--set", "M=0"]).status.code(), Some(2));
    assert_eq!(sopcalc(&["figure", "fig99"]).status.code(), Some(2));
    assert_eq!(sopcalc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn optimize_reports_one_row_per_eps() {
    let o = sopcalc(&["optimize", "--set", "scheme=tab", "--set", "eps_grid=0.01,0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(stdout(&o).as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.meta.starts_with("optimum;")));
}

#[test]
fn simulation_output_is_reproducible_across_threads() {
    let args = |threads: &'static str| {
        vec!["simulate", "--set", "scheme=tab", "--set", "eps=0.01", "--set", "axis=P_J", "--set", "grid=0,30", "--trials", "4000", "--seed", "42", "--threads", threads]
    };
    let one = sopcalc(&args("1"));
    let eight = sopcalc(&args("8"));
    let again = sopcalc(&args("8"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout);
    assert_eq!(eight.stdout, again.stdout);
}

#[test]
fn figure_list_names_every_preset() {
    let o = sopcalc(&["figure", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for n in 2..=10 {
        assert!(text.contains(&format!("fig{n}")), "fig{n}");
    }
}
