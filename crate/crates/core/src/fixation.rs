//! Eventual fixation of `A` in the finite chain.
//!
//! Without mutation the fixation probability `h(i)` is the harmonic function
//! of the chain with `h(0) = 0` and `h(N) = 1`. [`exact_fixation_prob`]
//! solves the interior system `(I - Q) h = P(·, N)` directly;
//! [`mc_fixation_prob`] estimates the same quantity (or, with mutation, the
//! probability of first reaching frequency 1 before the generation cap) from
//! seeded replicate runs.

use nalgebra::{DMatrix, DVector};

use crate::active_info::{active_info_from_probs, InfoBreakdown, LogBase};
use crate::diffusion::pfix_diffusion_raw;
use crate::par;
use crate::rng::{substream, Stream};
use crate::wf_chain::{step, transition_row_raw, AlleleCount, WfParams};
use crate::{Error, Result};

/// z-value of a two-sided 95% normal interval.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// z-value of a two-sided 99% normal interval.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Maximum residual accepted from the exact solver.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixationMethod {
    ExactSolve,
    MonteCarlo,
}

impl FixationMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FixationMethod::ExactSolve => "exact_solve",
            FixationMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// A fixation probability and how it was obtained.
///
/// `trials`, `ci_halfwidth` and `censored` are set only for Monte Carlo
/// estimates. `ci_halfwidth` is the 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixationResult {
    pub p_fix: f64,
    pub method: FixationMethod,
    pub trials: Option<u64>,
    pub ci_halfwidth: Option<f64>,
    pub censored: Option<u64>,
}

impl FixationResult {
    fn exact(p_fix: f64) -> Self {
        Self {
            p_fix,
            method: FixationMethod::ExactSolve,
            trials: None,
            ci_halfwidth: None,
            censored: None,
        }
    }

    /// Number of successful trials of a Monte Carlo estimate.
    pub fn successes(&self) -> Option<u64> {
        self.trials.map(|n| (self.p_fix * n as f64).round() as u64)
    }

    /// Normal-approximation half-width `z·sqrt(p̂(1-p̂)/n)`.
    pub fn normal_halfwidth(&self, z: f64) -> Option<f64> {
        self.trials
            .map(|n| z * (self.p_fix * (1.0 - self.p_fix) / n as f64).sqrt())
    }

    /// Wilson score interval at critical value `z`. Unlike the normal
    /// interval it does not collapse to a point when no trial succeeds.
    pub fn wilson_interval(&self, z: f64) -> Option<(f64, f64)> {
        let n = self.trials? as f64;
        let p = self.p_fix;
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Some(((centre - half).max(0.0), (centre + half).min(1.0)))
    }
}

/// Controls for the exact solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest `N` solved by dense LU.
    pub dense_cap: u32,
    /// Allow the fixed-point iteration above `dense_cap`.
    pub iterative_fallback: bool,
    /// Relaxation weight `ω` in `h ← (1-ω) h + ω P h`.
    pub relaxation: f64,
    /// Stop when successive iterates differ by less than this (max norm).
    pub tolerance: f64,
    pub max_iterations: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_cap: 2000,
            iterative_fallback: false,
            relaxation: 1.0,
            tolerance: 1e-12,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Dense,
    Iterative { iterations: u64 },
}

/// Fixation probabilities for every starting count `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixationProfile {
    pub h: Vec<f64>,
    /// `max_i |h(i) - Σ_j P(i,j) h(j)|` over interior states.
    pub residual: f64,
    pub solver: Solver,
}

fn require_mutation_free(params: &WfParams) -> Result<()> {
    if params.is_mutation_free() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "exact fixation needs absorbing boundaries (mu1 = mu2 = 0); use Monte Carlo with mutation".into(),
        ))
    }
}

/// Solves for `h(i)` at every `i`.
pub fn fixation_profile(params: &WfParams, opts: &SolverOptions) -> Result<FixationProfile> {
    require_mutation_free(params)?;
    let n = params.n_pop();
    if n <= opts.dense_cap {
        dense_profile(params)
    } else if opts.iterative_fallback {
        iterative_profile(params, opts)
    } else {
        Err(Error::Capacity {
            n_pop: n,
            cap: opts.dense_cap,
        })
    }
}

fn dense_profile(params: &WfParams) -> Result<FixationProfile> {
    let n = params.n_pop() as usize;
    let m = n - 1;
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for r in 0..m {
        let i = AlleleCount::new(r as u32 + 1, params.n_pop())?;
        let row = transition_row_raw(params, i);
        for c in 0..m {
            a[(r, c)] = -row[c + 1];
        }
        a[(r, r)] += 1.0;
        b[r] = row[n];
    }
    let x = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("interior system is singular".into()))?;
    let residual = (&a * &x - &b).amax();
    if !(residual < RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "linear-system residual {residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    let mut h = Vec::with_capacity(n + 1);
    h.push(0.0);
    h.extend(x.iter().map(|v| v.clamp(0.0, 1.0)));
    h.push(1.0);
    Ok(FixationProfile {
        h,
        residual,
        solver: Solver::Dense,
    })
}

// Transition rows with the underflowed tails dropped.
struct BandedRow {
    start: usize,
    weights: Vec<f64>,
}

impl BandedRow {
    fn dot(&self, h: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&h[self.start..])
            .map(|(w, x)| w * x)
            .sum()
    }
}

fn banded_rows(params: &WfParams) -> Result<Vec<BandedRow>> {
    const DROP_BELOW: f64 = 1e-30;
    (1..params.n_pop())
        .map(|i| {
            let row = transition_row_raw(params, params.count(i)?);
            let start = row.iter().position(|&w| w > DROP_BELOW).unwrap_or(0);
            let end = row.iter().rposition(|&w| w > DROP_BELOW).map_or(start, |e| e + 1);
            Ok(BandedRow {
                start,
                weights: row[start..end].to_vec(),
            })
        })
        .collect()
}

fn iterative_profile(params: &WfParams, opts: &SolverOptions) -> Result<FixationProfile> {
    let n = params.n_pop() as usize;
    let rows = banded_rows(params)?;
    let alpha = f64::from(params.n_pop()) * params.sel();
    let mut h: Vec<f64> = (0..=n)
        .map(|i| pfix_diffusion_raw(alpha, i as f64 / n as f64))
        .collect();
    h[0] = 0.0;
    h[n] = 1.0;
    let mut next = h.clone();
    let w = opts.relaxation;
    for iteration in 1..=opts.max_iterations {
        let mut delta: f64 = 0.0;
        for (k, row) in rows.iter().enumerate() {
            let i = k + 1;
            let v = (1.0 - w) * h[i] + w * row.dot(&h);
            delta = delta.max((v - h[i]).abs());
            next[i] = v;
        }
        std::mem::swap(&mut h, &mut next);
        if delta < opts.tolerance {
            let residual = rows
                .iter()
                .enumerate()
                .map(|(k, row)| (h[k + 1] - row.dot(&h)).abs())
                .fold(0.0, f64::max);
            return Ok(FixationProfile {
                h,
                residual,
                solver: Solver::Iterative {
                    iterations: iteration,
                },
            });
        }
    }
    Err(Error::Numerical(format!(
        "fixed-point iteration did not converge in {} iterations",
        opts.max_iterations
    )))
}

/// Exact eventual-fixation probability from count `i` (mutation-free only).
pub fn exact_fixation_prob(params: &WfParams, i: AlleleCount) -> Result<FixationResult> {
    exact_fixation_prob_with(params, i, &SolverOptions::default())
}

pub fn exact_fixation_prob_with(
    params: &WfParams,
    i: AlleleCount,
    opts: &SolverOptions,
) -> Result<FixationResult> {
    require_mutation_free(params)?;
    let n = params.n_pop();
    match i.get() {
        0 => return Ok(FixationResult::exact(0.0)),
        k if k == n => return Ok(FixationResult::exact(1.0)),
        _ => {}
    }
    let profile = fixation_profile(params, opts)?;
    Ok(FixationResult::exact(profile.h[i.get() as usize]))
}

/// Default generation cap for Monte Carlo runs: `20·N` without mutation,
/// `50·N` with it.
pub fn default_mc_max_gens(params: &WfParams) -> u64 {
    let n = u64::from(params.n_pop());
    if params.is_mutation_free() {
        20 * n
    } else {
        50 * n
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    fixed: u64,
    censored: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally {
            fixed: self.fixed + o.fixed,
            censored: self.censored + o.censored,
        }
    }
}

fn run_trial(params: &WfParams, i: AlleleCount, max_gens: u64, rng: &mut Stream) -> Tally {
    let n = params.n_pop();
    let absorbing = params.is_mutation_free();
    let mut current = i;
    let mut gen = 0;
    loop {
        if current.get() == n {
            return Tally { fixed: 1, censored: 0 };
        }
        if absorbing && current.get() == 0 {
            return Tally::default();
        }
        if gen == max_gens {
            return Tally { fixed: 0, censored: 1 };
        }
        current = step(params, current, rng);
        gen += 1;
    }
}

/// Monte Carlo fixation estimate over `trials` replicate runs.
///
/// Trial `t` uses stream `t` of `seed`, and the counts are summed, so the
/// estimate does not depend on how many worker threads ran it. Runs that hit
/// `max_gens` without reaching `N` count as non-fixed and are reported in
/// `censored`.
pub fn mc_fixation_prob(
    params: &WfParams,
    i: AlleleCount,
    trials: u64,
    max_gens: u64,
    seed: u64,
) -> Result<FixationResult> {
    if trials == 0 {
        return Err(Error::invalid("trials", "at least one trial is required"));
    }
    let tally = par::sum_over(trials, |t| {
        let mut rng = substream(seed, t);
        run_trial(params, i, max_gens, &mut rng)
    });
    let p_fix = tally.fixed as f64 / trials as f64;
    Ok(FixationResult {
        p_fix,
        method: FixationMethod::MonteCarlo,
        trials: Some(trials),
        ci_halfwidth: Some(Z_95 * (p_fix * (1.0 - p_fix) / trials as f64).sqrt()),
        censored: Some(tally.censored),
    })
}

/// How to obtain the non-neutral fixation probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixationEstimator {
    Exact(SolverOptions),
    MonteCarlo { trials: u64, max_gens: u64, seed: u64 },
}

/// Active information of eventual fixation plus the estimate behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixationAi {
    pub breakdown: InfoBreakdown,
    pub estimate: FixationResult,
    /// Set when a Monte Carlo estimate rests on fewer than
    /// [`LOW_COUNT_THRESHOLD`] successes.
    pub low_count: bool,
}

pub const LOW_COUNT_THRESHOLD: u64 = 10;

/// Active information of eventual fixation relative to the neutral law
/// `i/N`.
pub fn fixation_ai(
    params: &WfParams,
    i: AlleleCount,
    base: LogBase,
    estimator: FixationEstimator,
) -> Result<FixationAi> {
    let n = params.n_pop();
    if i.get() == 0 || i.get() == n {
        return Err(Error::BoundaryEvent(format!(
            "fixation from i = {} is certain one way or the other for N = {n}",
            i.get()
        )));
    }
    let estimate = match estimator {
        FixationEstimator::Exact(opts) => exact_fixation_prob_with(params, i, &opts)?,
        FixationEstimator::MonteCarlo {
            trials,
            max_gens,
            seed,
        } => mc_fixation_prob(params, i, trials, max_gens, seed)?,
    };
    let p_null = f64::from(i.get()) / f64::from(n);
    let breakdown = active_info_from_probs(p_null, estimate.p_fix, base)?;
    let low_count = estimate
        .successes()
        .is_some_and(|k| k < LOW_COUNT_THRESHOLD);
    Ok(FixationAi {
        breakdown,
        estimate,
        low_count,
    })
}
