//! Monte Carlo simulator built from the signal model alone: it draws the
//! eavesdropper field and every fading coefficient, forms the SNRs of Bob and
//! each eavesdropper and counts secrecy outages. No analytic result is used,
//! which makes it the reference for every closed form in the crate.
//!
//! Randomness is counter based. Each trial owns the ChaCha8 stream numbered by
//! its index under a key derived from (seed, purpose), so results do not
//! depend on how trials are spread over threads.

use crate::error::{Error, Result};
use crate::model::{
    annulus_r2, complex_normal, distance_bob_to_point, sample_poisson, ChannelDraw, SystemParams,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

const TAG_TRIAL: u64 = 0x7472_6961_6c5f_7631;
const TAG_CHANNEL: u64 = 0x6368_616e_6e65_6c31;
const TAG_LAPLACE: u64 = 0x6c61_706c_6163_6531;
const CHUNK: u64 = 512;
/// Eavesdropper disk radius in user-selection runs, in units of the selected
/// user's distance times β^{1/α}. Farther eavesdroppers almost never win.
const US_FIELD_SCALE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Tas,
    Tab,
    TabUs,
    TasUs,
}

impl Scheme {
    pub fn is_user_selection(self) -> bool {
        matches!(self, Scheme::TabUs | Scheme::TasUs)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Tas => "tas",
            Scheme::Tab => "tab",
            Scheme::TabUs => "tab-us",
            Scheme::TasUs => "tas-us",
        }
    }
}

/// How the main channel (h, g_B) is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditioning {
    /// Drawn once from the seed and kept for every trial.
    Seeded,
    /// |h_i| = 1 on every antenna and |g_B| = 1.
    Nominal,
    Given(ChannelDraw),
    /// Fresh draw in every trial.
    Redraw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub scheme: Scheme,
    pub colluding: bool,
    pub conditioning: Conditioning,
    pub trials: u64,
    pub seed: u64,
    /// Unit thermal noise at the eavesdroppers; `false` drops it.
    pub eve_noise: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SimSpec {
    pub fn new(scheme: Scheme, trials: u64, seed: u64) -> Self {
        SimSpec {
            scheme,
            colluding: false,
            conditioning: Conditioning::Seeded,
            trials,
            seed,
            eve_noise: true,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub outage_count: u64,
    /// User fields redrawn because they held fewer than n users.
    pub resampled: u64,
}

impl SopEstimate {
    fn from_counts(outage_count: u64, trials: u64, resampled: u64) -> Self {
        let p_hat = outage_count as f64 / trials as f64;
        SopEstimate {
            p_hat,
            std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
            outage_count,
            resampled,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn base_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(tag)))
}

fn stream(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng
}

/// Main channel of the `Seeded` conditioning mode.
pub fn seeded_channel(seed: u64, antennas: usize) -> ChannelDraw {
    let mut rng = stream(&base_rng(seed, TAG_CHANNEL), 0);
    ChannelDraw::sample(antennas, &mut rng)
}

/// One eavesdropper with its full fading state.
#[derive(Debug, Clone, PartialEq)]
pub struct EveSample {
    pub r: f64,
    pub theta: f64,
    /// Alice→Eve vector (TAS uses entry i*).
    pub h_ae: Vec<Complex64>,
    /// Bob→Eve jamming channel.
    pub h_be: Complex64,
}

/// Everything random in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// Alice→Bob channel and self-interference; for user selection `h` is the
    /// channel to the selected user.
    pub channel: ChannelDraw,
    /// Alice→Bob distance.
    pub d_ab: f64,
    pub eves: Vec<EveSample>,
}

fn check_spec(spec: &SimSpec, params: &SystemParams) -> Result<()> {
    params.validate()?;
    if spec.trials == 0 {
        return Err(Error::domain("montecarlo", "trials must be >= 1"));
    }
    if spec.scheme.is_user_selection() && params.p_j != 0.0 {
        return Err(Error::precondition(
            "montecarlo",
            "user selection runs with half-duplex users (P_J = 0)",
        ));
    }
    if matches!(spec.scheme, Scheme::Tab | Scheme::TabUs) && params.eps > 0.0 && params.antennas < 2 {
        return Err(Error::precondition("montecarlo", "artificial noise needs M >= 2"));
    }
    Ok(())
}

/// SNR at Bob for the given scheme.
fn bob_snr(spec: &SimSpec, params: &SystemParams, channel: &ChannelDraw, d_ab: f64) -> f64 {
    let si = 1.0 + params.rho * channel.g_b_sq() * params.p_j;
    match spec.scheme {
        Scheme::Tas => channel.h_star_sq() * params.p_t / si,
        Scheme::Tab => (1.0 - params.eps) * channel.h_norm_sq() * params.p_t / si,
        Scheme::TasUs => params.p_t * channel.h_star_sq() / d_ab.powf(params.alpha),
        Scheme::TabUs => {
            (1.0 - params.eps) * params.p_t * channel.h_norm_sq() / d_ab.powf(params.alpha)
        }
    }
}

/// Path-loss gains a_e = d_AE^{−α} and b_e = d_BE^{−α}.
fn gains(r: f64, theta: f64, params: &SystemParams) -> (f64, f64) {
    let d_be = distance_bob_to_point(r, theta, params.d);
    (path_gain(r * r, params.alpha), path_gain(d_be * d_be, params.alpha))
}

/// dist^{−α} from the squared distance.
fn path_gain(dist_sq: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        1.0 / dist_sq
    } else if alpha == 4.0 {
        1.0 / (dist_sq * dist_sq)
    } else {
        dist_sq.powf(-0.5 * alpha)
    }
}

fn noise(spec: &SimSpec) -> f64 {
    if spec.eve_noise {
        1.0
    } else {
        0.0
    }
}

/// SNR of one TAS eavesdropper: a|h_AE,i*|²P_T/(1 + b|h_BE|²P_J).
fn tas_eve_snr(a: f64, b: f64, h_ae_star: Complex64, h_be: Complex64, params: &SystemParams, n0: f64) -> f64 {
    a * h_ae_star.norm_sqr() * params.p_t / (n0 + b * h_be.norm_sqr() * params.p_j)
}

/// SNR of one TAB eavesdropper:
/// a(1−ε)|h_AEᵀh*|²/‖h‖² P_T / (1 + b|h_BE|²P_J + a εP_T/(M−1)·‖h_AE‖²(1 − Θ)).
fn tab_eve_snr(
    a: f64,
    b: f64,
    h_ae: &[Complex64],
    h: &[Complex64],
    h_be: Complex64,
    params: &SystemParams,
    n0: f64,
) -> f64 {
    let dot: Complex64 = h_ae.iter().zip(h).map(|(x, y)| x * y.conj()).sum();
    let h_sq: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    let ae_sq: f64 = h_ae.iter().map(|v| v.norm_sqr()).sum();
    let beam = dot.norm_sqr() / h_sq;
    let leak = if params.antennas > 1 {
        params.eps * params.p_t / (params.antennas - 1) as f64 * (ae_sq - beam).max(0.0)
    } else {
        0.0
    };
    a * (1.0 - params.eps) * beam * params.p_t / (n0 + b * h_be.norm_sqr() * params.p_j + a * leak)
}

fn eve_snr(spec: &SimSpec, params: &SystemParams, real: &Realization, eve: &EveSample) -> f64 {
    let (a, mut b) = gains(eve.r, eve.theta, params);
    if spec.scheme.is_user_selection() {
        b = 0.0;
    }
    let n0 = noise(spec);
    match spec.scheme {
        Scheme::Tas | Scheme::TasUs => {
            let i = real.channel.best_antenna();
            tas_eve_snr(a, b, eve.h_ae[i], eve.h_be, params, n0)
        }
        Scheme::Tab | Scheme::TabUs => tab_eve_snr(a, b, &eve.h_ae, &real.channel.h, eve.h_be, params, n0),
    }
}

/// [log₂(1 + SNR_AB) − log₂(1 + F(SNR_AE))]⁺ with F the maximum
/// (non-colluding) or the sum (colluding) over eavesdroppers.
pub fn trial_secrecy_rate(spec: &SimSpec, params: &SystemParams, real: &Realization) -> f64 {
    let snr_b = bob_snr(spec, params, &real.channel, real.d_ab);
    let snrs = real.eves.iter().map(|e| eve_snr(spec, params, real, e));
    let f = if spec.colluding {
        snrs.sum::<f64>()
    } else {
        snrs.fold(0.0, f64::max)
    };
    (snr_b.ln_1p() - f.ln_1p()).max(0.0) / std::f64::consts::LN_2
}

/// Distance to the n-th nearest point of a Poisson field of intensity ρ_U,
/// sampled from a finite disk; returns the distance and how many fields had
/// to be redrawn for holding fewer than n points.
pub fn sample_user_distance<R: Rng + ?Sized>(n: usize, rho_u: f64, rng: &mut R) -> (f64, u64) {
    let nf = n as f64;
    let mean = nf + 12.0 * nf.sqrt() + 30.0;
    let radius = (mean / (PI * rho_u)).sqrt();
    let mut redraws = 0;
    loop {
        let count = sample_poisson(mean, rng);
        if count >= n {
            let mut r2: Vec<f64> = (0..count).map(|_| rng.random::<f64>()).collect();
            r2.select_nth_unstable_by(n - 1, f64::total_cmp);
            return (radius * r2[n - 1].sqrt(), redraws);
        }
        redraws += 1;
    }
}

/// Inner and outer radius of the eavesdropper annulus. User-selection runs
/// stand in for an unbounded field without guard zone.
fn field_annulus(spec: &SimSpec, params: &SystemParams, d_ab: f64) -> (f64, f64) {
    if spec.scheme.is_user_selection() {
        let r = params
            .r_outer
            .max(US_FIELD_SCALE * d_ab * params.beta().powf(1.0 / params.alpha));
        (0.0, r)
    } else {
        (params.r_guard, params.r_outer)
    }
}

fn eve_positions<R: Rng + ?Sized>(params: &SystemParams, (r_lo, r_out): (f64, f64), rng: &mut R) -> Vec<(f64, f64)> {
    let (r2_lo, r2_span) = annulus_r2(r_lo, r_out);
    let count = sample_poisson(params.rho_e * PI * r2_span, rng);
    (0..count)
        .map(|_| {
            let r = (r2_lo + rng.random::<f64>() * r2_span).sqrt();
            (r, 2.0 * PI * rng.random::<f64>())
        })
        .collect()
}

fn fixed_channel(spec: &SimSpec, params: &SystemParams) -> Option<ChannelDraw> {
    match &spec.conditioning {
        Conditioning::Seeded => Some(seeded_channel(spec.seed, params.antennas)),
        Conditioning::Nominal => Some(ChannelDraw::nominal(params.antennas)),
        Conditioning::Given(c) => Some(c.clone()),
        Conditioning::Redraw => None,
    }
}

/// Draws the complete realization of trial `index`, every eavesdropper with
/// its full channel vector.
pub fn sample_realization(spec: &SimSpec, params: &SystemParams, n: usize, index: u64) -> Realization {
    let mut rng = stream(&base_rng(spec.seed, TAG_TRIAL), index);
    let (channel, d_ab) = main_link(spec, params, n, &fixed_channel(spec, params), &mut rng).0;
    let m = params.antennas;
    let eves = eve_positions(params, field_annulus(spec, params, d_ab), &mut rng)
        .into_iter()
        .map(|(r, theta)| EveSample {
            r,
            theta,
            h_ae: (0..m).map(|_| complex_normal(&mut rng)).collect(),
            h_be: complex_normal(&mut rng),
        })
        .collect();
    Realization { channel, d_ab, eves }
}

type Link = ((ChannelDraw, f64), u64);

fn main_link<R: Rng + ?Sized>(
    spec: &SimSpec,
    params: &SystemParams,
    n: usize,
    fixed: &Option<ChannelDraw>,
    rng: &mut R,
) -> Link {
    if spec.scheme.is_user_selection() {
        let (d, redraws) = sample_user_distance(n, params.rho_u, rng);
        let channel = ChannelDraw::sample(params.antennas, rng);
        ((channel, d), redraws)
    } else {
        let channel = match fixed {
            Some(c) => c.clone(),
            None => ChannelDraw::sample(params.antennas, rng),
        };
        ((channel, params.d), 0)
    }
}

/// Orthonormal basis of C^M whose first vector is h/‖h‖ (Gram–Schmidt on the
/// standard basis).
fn beam_basis(h: &[Complex64]) -> Vec<Vec<Complex64>> {
    let m = h.len();
    let norm = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<Complex64>> = vec![h.iter().map(|v| v / norm).collect()];
    for k in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        v[k] = Complex64::new(1.0, 0.0);
        for q in &basis {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 {
            basis.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    basis
}

/// Outcome of one trial: (outage, user-field redraws).
fn run_trial(
    spec: &SimSpec,
    params: &SystemParams,
    n: usize,
    fixed: &Option<ChannelDraw>,
    fixed_basis: &Option<Vec<Vec<Complex64>>>,
    rng: &mut ChaCha8Rng,
) -> (bool, u64) {
    let ((channel, d_ab), redraws) = main_link(spec, params, n, fixed, rng);
    let snr_b = bob_snr(spec, params, &channel, d_ab);
    let thr = (1.0 + snr_b) / params.beta() - 1.0;
    if thr < 0.0 {
        return (true, redraws);
    }
    let n0 = noise(spec);
    let tab = matches!(spec.scheme, Scheme::Tab | Scheme::TabUs);
    let own_basis;
    let basis = if !tab {
        None
    } else if let Some(b) = fixed_basis {
        Some(b)
    } else {
        own_basis = beam_basis(&channel.h);
        Some(&own_basis)
    };
    let jam = !spec.scheme.is_user_selection();
    let m = params.antennas;
    let mut total = 0.0;
    let mut h_ae = vec![Complex64::new(0.0, 0.0); m];
    for (r, theta) in eve_positions(params, field_annulus(spec, params, d_ab), rng) {
        let a = path_gain(r * r, params.alpha);
        let c0 = complex_normal(rng);
        let scale = if basis.is_some() { 1.0 - params.eps } else { 1.0 };
        // SNR upper bounds, first with noise only, then with the jamming term
        // (TAB adds leakage to the denominator); both skip the remaining draws
        let top = a * scale * c0.norm_sqr() * params.p_t;
        if !spec.colluding && top < n0 * thr {
            continue;
        }
        let b = if jam && params.p_j > 0.0 {
            let d_be = distance_bob_to_point(r, theta, params.d);
            path_gain(d_be * d_be, params.alpha)
        } else {
            0.0
        };
        let h_be = if b > 0.0 { complex_normal(rng) } else { Complex64::new(0.0, 0.0) };
        if !spec.colluding && top < thr * (n0 + b * h_be.norm_sqr() * params.p_j) {
            continue;
        }
        let snr = if let Some(basis) = basis {
            h_ae.fill(Complex64::new(0.0, 0.0));
            for (k, q) in basis.iter().enumerate() {
                let c = if k == 0 { c0 } else { complex_normal(rng) };
                for (hv, qv) in h_ae.iter_mut().zip(q) {
                    *hv += c * qv;
                }
            }
            tab_eve_snr(a, b, &h_ae, &channel.h, h_be, params, n0)
        } else {
            tas_eve_snr(a, b, c0, h_be, params, n0)
        };
        if spec.colluding {
            total += snr;
            if total >= thr {
                return (true, redraws);
            }
        } else if snr >= thr {
            return (true, redraws);
        }
    }
    (false, redraws)
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::domain("montecarlo", format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn estimate(spec: &SimSpec, params: &SystemParams, n: usize) -> Result<SopEstimate> {
    check_spec(spec, params)?;
    let fixed = if spec.scheme.is_user_selection() {
        None
    } else {
        fixed_channel(spec, params)
    };
    let fixed_basis = match (&fixed, spec.scheme) {
        (Some(c), Scheme::Tab) => Some(beam_basis(&c.h)),
        _ => None,
    };
    let base = base_rng(spec.seed, TAG_TRIAL);
    let chunks = spec.trials.div_ceil(CHUNK);
    let (outages, redraws) = with_pool(spec.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut out = 0u64;
                let mut red = 0u64;
                for i in c * CHUNK..((c + 1) * CHUNK).min(spec.trials) {
                    let mut rng = stream(&base, i);
                    let (o, r) = run_trial(spec, params, n, &fixed, &fixed_basis, &mut rng);
                    out += o as u64;
                    red += r;
                }
                (out, red)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    })?;
    Ok(SopEstimate::from_counts(outages, spec.trials, redraws))
}

/// SOP estimate for TAS or TAB with a single receiver.
pub fn estimate_sop(spec: &SimSpec, params: &SystemParams) -> Result<SopEstimate> {
    if spec.scheme.is_user_selection() {
        return Err(Error::precondition(
            "estimate_sop",
            "user-selection schemes go through estimate_sop_userselect",
        ));
    }
    estimate(spec, params, 1)
}

/// SOP estimate when Alice serves the n-th nearest user of a Poisson field
/// of intensity ρ_U.
pub fn estimate_sop_userselect(spec: &SimSpec, params: &SystemParams, n: usize) -> Result<SopEstimate> {
    if !spec.scheme.is_user_selection() {
        return Err(Error::precondition(
            "estimate_sop_userselect",
            "needs scheme tab-us or tas-us",
        ));
    }
    if n == 0 || !(params.rho_u > 0.0) {
        return Err(Error::domain("estimate_sop_userselect", "need n >= 1 and rho_U > 0"));
    }
    estimate(spec, params, n)
}

/// Sample mean and standard error of a per-trial statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// E[e^{−s I}] for the aggregate eavesdropper SNR I of `spec.scheme` (TAS or
/// TAB) at the fixed main channel of `spec`. For TAB the SNRs are divided by
/// 1 − ε, matching the normalization of the analytic transform.
pub fn estimate_laplace(spec: &SimSpec, params: &SystemParams, s: f64) -> Result<MeanEstimate> {
    estimate_aggregate_mean(spec, params, |i| (-s * i).exp())
}

/// E[g(I)] over the aggregate eavesdropper SNR I (normalized as in
/// `estimate_laplace`).
pub fn estimate_aggregate_mean<G>(spec: &SimSpec, params: &SystemParams, g: G) -> Result<MeanEstimate>
where
    G: Fn(f64) -> f64 + Sync,
{
    check_spec(spec, params)?;
    if spec.scheme.is_user_selection() {
        return Err(Error::precondition("estimate_aggregate_mean", "needs scheme tas or tab"));
    }
    let channel = fixed_channel(spec, params).unwrap_or_else(|| seeded_channel(spec.seed, params.antennas));
    let base = base_rng(spec.seed, TAG_LAPLACE);
    let n0 = noise(spec);
    let i_star = channel.best_antenna();
    let m = params.antennas;
    let values: Vec<f64> = with_pool(spec.threads, || {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(&base, i);
                let mut total = 0.0;
                for (r, theta) in eve_positions(params, (params.r_guard, params.r_outer), &mut rng) {
                    let (a, b) = gains(r, theta, params);
                    let h_ae: Vec<Complex64> = (0..m).map(|_| complex_normal(&mut rng)).collect();
                    let h_be = complex_normal(&mut rng);
                    total += match spec.scheme {
                        Scheme::Tas => tas_eve_snr(a, b, h_ae[i_star], h_be, params, n0),
                        _ => tab_eve_snr(a, b, &h_ae, &channel.h, h_be, params, n0) / (1.0 - params.eps),
                    };
                }
                g(total)
            })
            .collect()
    })?;
    let n = spec.trials as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(MeanEstimate {
        mean,
        std_err: (var / n).sqrt(),
        trials: spec.trials,
    })
}
