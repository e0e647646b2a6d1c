//! One entry point for every SOP route: picks the analytic formula or the
//! simulator for a scheme and reports which one ran.

use crate::error::{Error, Result};
use crate::model::{ChannelDraw, ConditioningState};
use crate::montecarlo::{self, Conditioning, Scheme, SimSpec};
use crate::optimizer::Setting;
use crate::sop_colluding::{self as coll, CollConfig};
use crate::sop_noncolluding::{self as nc, AnalyticConfig};
use crate::sop_userselect::{self as us, UsConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub scheme: Scheme,
    pub colluding: bool,
    /// Main-channel conditioning; `Redraw` selects the unconditional
    /// analytic average.
    pub conditioning: Conditioning,
    pub trials: u64,
    pub seed: u64,
    pub eve_noise: bool,
    pub threads: Option<usize>,
    pub analytic: AnalyticConfig,
    pub coll: CollConfig,
    pub us: UsConfig,
}

impl Scenario {
    pub fn new(scheme: Scheme) -> Self {
        Scenario {
            scheme,
            colluding: false,
            conditioning: Conditioning::Seeded,
            trials: 100_000,
            seed: 1,
            eve_noise: true,
            threads: None,
            analytic: AnalyticConfig::default(),
            coll: CollConfig::default(),
            us: UsConfig::default(),
        }
    }

    pub fn sim_spec(&self) -> SimSpec {
        SimSpec {
            scheme: self.scheme,
            colluding: self.colluding,
            conditioning: self.conditioning.clone(),
            trials: self.trials,
            seed: self.seed,
            eve_noise: self.eve_noise,
            threads: self.threads,
        }
    }

    fn conditioning_name(&self) -> &'static str {
        match self.conditioning {
            Conditioning::Seeded => "seeded",
            Conditioning::Nominal => "nominal",
            Conditioning::Given(_) => "given",
            Conditioning::Redraw => "redraw",
        }
    }

    fn channel(&self, antennas: usize) -> Option<ChannelDraw> {
        match &self.conditioning {
            Conditioning::Seeded => Some(montecarlo::seeded_channel(self.seed, antennas)),
            Conditioning::Nominal => Some(ChannelDraw::nominal(antennas)),
            Conditioning::Given(c) => Some(c.clone()),
            Conditioning::Redraw => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopResult {
    pub sop: f64,
    pub method: Method,
    pub std_err: Option<f64>,
    /// Semicolon-separated key=value notes on the route taken.
    pub meta: String,
}

/// SOP of the scenario at one parameter setting.
pub fn evaluate(sc: &Scenario, setting: &Setting, method: Method) -> Result<SopResult> {
    match method {
        Method::Analytic => analytic(sc, setting),
        Method::MonteCarlo => simulate(sc, setting),
    }
}

fn simulate(sc: &Scenario, setting: &Setting) -> Result<SopResult> {
    let spec = sc.sim_spec();
    let est = if sc.scheme.is_user_selection() {
        montecarlo::estimate_sop_userselect(&spec, &setting.params, setting.n)?
    } else {
        montecarlo::estimate_sop(&spec, &setting.params)?
    };
    let mut meta = format!(
        "scheme={};colluding={};cond={};trials={};seed={};outages={}",
        sc.scheme.name(),
        sc.colluding,
        sc.conditioning_name(),
        est.trials,
        sc.seed,
        est.outage_count
    );
    if sc.scheme.is_user_selection() {
        meta += &format!(";n={};resampled={}", setting.n, est.resampled);
    }
    Ok(SopResult {
        sop: est.p_hat,
        method: Method::MonteCarlo,
        std_err: Some(est.std_err),
        meta,
    })
}

fn analytic(sc: &Scenario, setting: &Setting) -> Result<SopResult> {
    let p = &setting.params;
    let cond = sc.conditioning_name();
    let channel = sc.channel(p.antennas);
    let state = channel.as_ref().map(|c| ConditioningState::from_draw(p, c));
    let conditional = |what: &str| -> Result<ConditioningState> {
        state.ok_or_else(|| {
            Error::precondition("analytic", format!("{what} has no unconditional form; pick a fixed channel"))
        })
    };
    let (sop, meta) = match (sc.scheme, sc.colluding) {
        (Scheme::Tas, false) => match state {
            Some(s) => (nc::sop_tas_conditional(s.y, p, &sc.analytic)?, format!("tas;cond={cond}")),
            None => (nc::sop_tas_unconditional(p, &sc.analytic)?, "tas;cond=averaged".into()),
        },
        (Scheme::Tab, false) => {
            let form = format!("{:?}", sc.analytic.omega).to_lowercase();
            match state {
                Some(s) => (
                    nc::sop_tab_conditional(s.z, p, &sc.analytic)?,
                    format!("tab;cond={cond};omega={form}"),
                ),
                None => (
                    nc::sop_tab_unconditional(p, &sc.analytic)?,
                    format!("tab;cond=averaged;omega={form}"),
                ),
            }
        }
        (Scheme::TabUs, false) => {
            if p.eps > 0.0 {
                (us::sop_tabus(p, setting.n, &sc.us)?, format!("tab-us;n={}", setting.n))
            } else {
                (
                    1.0 - us::pcon_tabus_eps0(p, setting.n)?,
                    format!("tab-us;n={};eps0-closed-form", setting.n),
                )
            }
        }
        (Scheme::Tas, true) => {
            let s = conditional("colluding TAS")?;
            let r = if p.p_j == 0.0 {
                coll::sop_tas_colluding_hd(s.y0, p, &sc.coll)?
            } else {
                coll::sop_tas_colluding(s.y0, p, &sc.coll)?
            };
            (r.value, series_meta("tas", cond, &sc.coll, r))
        }
        (Scheme::Tab, true) => {
            let s = conditional("colluding TAB")?;
            let r = if p.p_j == 0.0 && p.eps == 0.0 {
                coll::sop_tab_colluding_hd(s.z, p, &sc.coll)?
            } else if p.eps == 0.0 {
                coll::sop_tab_colluding_eps0(s.z, p, &sc.coll)?
            } else {
                coll::sop_tab_colluding_an(s.z, p, &sc.coll)?
            };
            (r.value, series_meta("tab", cond, &sc.coll, r))
        }
        (scheme, colluding) => {
            return Err(Error::precondition(
                "analytic",
                format!(
                    "no analytic route for scheme {} (colluding = {colluding}); use the simulator",
                    scheme.name()
                ),
            ))
        }
    };
    Ok(SopResult {
        sop,
        method: Method::Analytic,
        std_err: None,
        meta,
    })
}

fn series_meta(scheme: &str, cond: &str, cfg: &CollConfig, r: coll::SeriesSop) -> String {
    format!(
        "{scheme}-colluding;cond={cond};N={};raw={};cancellation={}",
        cfg.series.order, r.raw, r.cancellation
    )
}
