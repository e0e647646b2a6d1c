//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 2 for configuration errors, 3 when a numerical routine
//! failed to converge.

pub mod config;
pub mod output;
pub mod presets;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigError, MethodChoice, ScenarioConfig};
use output::{Format, Row};
use sopcalc_core::optimizer::{self, lin_to_db, Axis, Boundary};
use sopcalc_core::scenario::{self, Method};
use sopcalc_core::Error;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sopcalc", version, about = "Secrecy outage probabilities for multi-antenna downlinks")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the analytic SOP over the configured grid.
    Analytic(Common),
    /// Estimate the SOP by Monte Carlo over the configured grid.
    Simulate(Common),
    /// Search the jamming power minimizing the SOP.
    Optimize(Common),
    /// Reproduce a figure preset (fig2 ... fig10); `list` prints them.
    Figure {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

impl Common {
    fn overrides(&self) -> Vec<String> {
        let mut o = self.set.clone();
        if let Some(t) = self.trials {
            o.push(format!("trials={t}"));
        }
        if let Some(s) = self.seed {
            o.push(format!("seed={s}"));
        }
        o
    }

    fn load(&self, preset_text: &str) -> Result<ScenarioConfig, Failure> {
        let mut text = String::new();
        if let Some(path) = &self.config {
            text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        }
        text.push('\n');
        text.push_str(preset_text);
        ScenarioConfig::load(&text, &self.overrides()).map_err(Failure::from)
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Tracks the worst row error seen.
#[derive(Default)]
struct Status {
    non_convergence: bool,
    other: bool,
}

impl Status {
    fn note(&mut self, e: &Error) {
        if e.is_non_convergence() {
            self.non_convergence = true;
        } else {
            self.other = true;
        }
    }

    fn code(&self) -> i32 {
        if self.non_convergence {
            EXIT_NON_CONVERGENCE
        } else if self.other {
            EXIT_CONFIG
        } else {
            EXIT_OK
        }
    }
}

fn methods(choice: MethodChoice) -> Vec<Method> {
    match choice {
        MethodChoice::Analytic => vec![Method::Analytic],
        MethodChoice::Mc => vec![Method::MonteCarlo],
        MethodChoice::Both => vec![Method::Analytic, Method::MonteCarlo],
    }
}

fn axis_grid(cfg: &ScenarioConfig) -> (Axis, Vec<f64>) {
    match cfg.axis {
        Some(a) => (a, cfg.grid.clone()),
        None => (Axis::Pj, vec![lin_to_db(cfg.setting.params.p_j)]),
    }
}

fn sweep_rows(cfg: &ScenarioConfig, method: Method, label: Option<&str>, status: &mut Status) -> Vec<Row> {
    let (axis, grid) = axis_grid(cfg);
    let mut sc = cfg.scenario.clone();
    // parallelism comes from the pool installed by `run`
    sc.threads = None;
    let rows = optimizer::sweep(|s| scenario::evaluate(&sc, s, method), axis, &grid, &cfg.setting)
        .expect("grid checked by config validation");
    let prefix = label.map(|l| format!("curve={l};")).unwrap_or_default();
    rows.into_iter()
        .map(|r| match r.outcome {
            Ok(res) => Row {
                axis: axis.name().into(),
                value: r.value,
                sop: Some(res.sop),
                method: method.name().into(),
                std_err: res.std_err,
                meta: format!("{prefix}{}", res.meta),
            },
            Err(e) => {
                eprintln!("warning: {}={}: {e}", axis.name(), r.value);
                status.note(&e);
                Row {
                    axis: axis.name().into(),
                    value: r.value,
                    sop: None,
                    method: method.name().into(),
                    std_err: None,
                    meta: format!("{prefix}error={e}"),
                }
            }
        })
        .collect()
}

fn optimize_rows(cfg: &ScenarioConfig, status: &mut Status) -> Vec<Row> {
    let method = match cfg.method {
        MethodChoice::Mc => Method::MonteCarlo,
        _ => Method::Analytic,
    };
    let mut sc = cfg.scenario.clone();
    sc.threads = None;
    let n = cfg.setting.n;
    let objective = |p: &sopcalc_core::SystemParams| {
        let s = optimizer::Setting { params: p.clone(), n };
        scenario::evaluate(&sc, &s, method).map(|r| r.sop)
    };
    let eps_list = cfg
        .opt
        .eps_grid
        .clone()
        .unwrap_or_else(|| vec![cfg.setting.params.eps]);
    let mut rows = Vec::new();
    for eps in eps_list {
        let params = sopcalc_core::SystemParams { eps, ..cfg.setting.params.clone() };
        let row = match optimizer::optimal_pj(objective, &cfg.opt, &params) {
            Ok(r) => {
                for w in &r.warnings {
                    eprintln!("warning: eps={eps}: {w}");
                }
                let boundary = match r.boundary {
                    None => "none",
                    Some(Boundary::Lower) => "lower",
                    Some(Boundary::Upper) => "upper",
                };
                Row {
                    axis: Axis::Pj.name().into(),
                    value: r.pj_star_db,
                    sop: Some(r.sop_star),
                    method: method.name().into(),
                    std_err: None,
                    meta: format!(
                        "optimum;eps={eps};boundary={boundary};evaluations={};warnings={}",
                        r.evaluations,
                        r.warnings.len()
                    ),
                }
            }
            Err(e) => {
                eprintln!("warning: eps={eps}: {e}");
                status.note(&e);
                Row {
                    axis: Axis::Pj.name().into(),
                    value: f64::NAN,
                    sop: None,
                    method: method.name().into(),
                    std_err: None,
                    meta: format!("optimum;eps={eps};error={e}"),
                }
            }
        };
        rows.push(row);
    }
    rows
}

fn emit(rows: &[Row], common: &Common, cfg_out: Option<PathBuf>) -> Result<(), Failure> {
    let format = match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match common.out.clone().or(cfg_out) {
        Some(path) => {
            let f = std::fs::File::create(&path).map_err(io)?;
            let mut w = std::io::BufWriter::new(f);
            output::write(rows, format, &mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => output::write(rows, format, std::io::stdout().lock()).map_err(io),
    }
}

fn execute(cmd: Command) -> Result<i32, Failure> {
    let mut status = Status::default();
    let (rows, common, out) = match cmd {
        Command::Analytic(c) => {
            let cfg = c.load("")?;
            (sweep_rows(&cfg, Method::Analytic, None, &mut status), c, cfg.out)
        }
        Command::Simulate(c) => {
            let cfg = c.load("")?;
            (sweep_rows(&cfg, Method::MonteCarlo, None, &mut status), c, cfg.out)
        }
        Command::Optimize(c) => {
            let cfg = c.load("")?;
            (optimize_rows(&cfg, &mut status), c, cfg.out)
        }
        Command::Figure { name, common } => {
            if name == "list" {
                for p in presets::PRESETS {
                    println!("{:6} {}", p.name, p.about);
                }
                return Ok(EXIT_OK);
            }
            let preset = presets::find(&name)
                .ok_or_else(|| Failure::Config(format!("unknown figure `{name}` (try `figure list`)")))?;
            let mut rows = Vec::new();
            let mut out = None;
            for (label, text) in preset.curves {
                let cfg = common.load(text)?;
                out = out.or(cfg.out.clone());
                for m in methods(cfg.method) {
                    rows.extend(sweep_rows(&cfg, m, Some(label), &mut status));
                }
            }
            (rows, common, out)
        }
    };
    emit(&rows, &common, out)?;
    Ok(status.code())
}

fn threads_of(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Analytic(c) | Command::Simulate(c) | Command::Optimize(c) => c.threads,
        Command::Figure { common, .. } => common.threads,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = threads_of(&cli.cmd);
    let job = move || match execute(cli.cmd) {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    };
    match threads {
        None => job(),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => pool.install(job),
            Err(e) => {
                eprintln!("error: thread pool: {e}");
                1
            }
        },
    }
}
