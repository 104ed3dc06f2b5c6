//! Backward-time coalescence.
//!
//! Two lineages in a Wright-Fisher population of size `N` share a parent in
//! any given generation with probability `1/N`, so their pairwise
//! coalescence time is geometric with mean `N`. The geometric law is the
//! maximum-entropy law on `{1, 2, …}` with that mean, which makes it the
//! natural baseline when the true size `ν` differs from `N`. In rescaled
//! time (units of `N` generations) `i` lineages merge to `i - 1` at rate
//! `i(i-1)/2`.
//!
//! All values here are in nats; callers convert with
//! [`InfoValue::to_base`].

use rand::Rng;

use crate::active_info::{InfoValue, LogBase};
use crate::par;
use crate::rng::substream;
use crate::{Error, Result};

/// Baseline size `N` and alternative size `ν` of the geometric comparison.
/// `ν` may be fractional: it parameterizes a mean, not a census count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalescentGeomParams {
    n_true: f64,
    n_alt: f64,
}

impl CoalescentGeomParams {
    pub fn new(n_true: u32, n_alt: f64) -> Result<Self> {
        if n_true < 2 {
            return Err(Error::invalid("N", format!("population size must be at least 2, got {n_true}")));
        }
        if !(n_alt > 1.0 && n_alt.is_finite()) {
            return Err(Error::invalid("nu", format!("alternative size must be finite and > 1, got {n_alt}")));
        }
        Ok(Self {
            n_true: f64::from(n_true),
            n_alt,
        })
    }

    pub fn n_true(&self) -> f64 {
        self.n_true
    }

    pub fn n_alt(&self) -> f64 {
        self.n_alt
    }
}

/// `P[τ = k] = (1 - 1/N)^{k-1} / N`.
pub fn geom_coalescence_pmf(n_pop: f64, k: u64) -> Result<f64> {
    if !(n_pop > 1.0) {
        return Err(Error::invalid("N", format!("mean must exceed 1, got {n_pop}")));
    }
    if k == 0 {
        return Err(Error::invalid("k", "coalescence time is at least one generation"));
    }
    Ok(((k - 1) as f64 * (-1.0 / n_pop).ln_1p()).exp() / n_pop)
}

fn log_survival_gap(p: &CoalescentGeomParams) -> f64 {
    (-1.0 / p.n_alt).ln_1p() - (-1.0 / p.n_true).ln_1p()
}

/// Active information of `{τ = k}` when the coalescence-time law moves from
/// mean `N` to mean `ν`, evaluated in log space:
/// `(k-1)[ln(1-1/ν) - ln(1-1/N)] + ln(N/ν)`.
pub fn geom_ai(params: &CoalescentGeomParams, k: u64, base: LogBase) -> Result<InfoValue> {
    if k == 0 {
        return Err(Error::invalid("k", "coalescence time is at least one generation"));
    }
    let nats = (k - 1) as f64 * log_survival_gap(params) + (params.n_true / params.n_alt).ln();
    Ok(InfoValue::from_nats(nats, base))
}

/// The same quantity rearranged as
/// `k[ln(1-1/ν) - ln(1-1/N)] + ln((N-1)/(ν-1))`.
pub fn geom_ai_rearranged(params: &CoalescentGeomParams, k: u64, base: LogBase) -> InfoValue {
    let nats = k as f64 * log_survival_gap(params) + ((params.n_true - 1.0) / (params.n_alt - 1.0)).ln();
    InfoValue::from_nats(nats, base)
}

/// Large-`N` limit with `ν = cN`, `k = dN`: `(1 - 1/c) d - ln c` nats.
pub fn geom_ai_limit(c: f64, d: f64) -> Result<InfoValue> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", format!("scale factor must be positive, got {c}")));
    }
    if !(d >= 0.0) {
        return Err(Error::invalid("d", format!("rescaled time must be nonnegative, got {d}")));
    }
    Ok(InfoValue::from_nats((1.0 - 1.0 / c) * d - c.ln(), LogBase::Nats))
}

/// `d` at which the limit changes sign: `ln c / (1 - 1/c)` (for `c ≠ 1`).
pub fn geom_ai_limit_root(c: f64) -> Option<f64> {
    (c > 0.0 && c != 1.0).then(|| c.ln() / (1.0 - 1.0 / c))
}

/// Rates and means of the Kingman coalescent with an alternative mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KingmanParams {
    pub lineages: u32,
    pub mu_alt: f64,
    pub scale_c: f64,
}

impl KingmanParams {
    pub fn new(lineages: u32, mu_alt: f64, scale_c: f64) -> Result<Self> {
        check_lineages(lineages)?;
        check_positive("mu_alt", mu_alt)?;
        check_positive("c", scale_c)?;
        Ok(Self {
            lineages,
            mu_alt,
            scale_c,
        })
    }
}

fn check_lineages(lineages: u32) -> Result<()> {
    if lineages < 2 {
        return Err(Error::invalid("lineages", format!("need at least 2 lineages, got {lineages}")));
    }
    Ok(())
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(name, format!("must be positive and finite, got {x}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("time must be nonnegative and finite, got {t}")));
    }
    Ok(())
}

/// `i(i-1)/2`, the merge rate of `i` lineages in rescaled time.
pub fn kingman_rate(lineages: u32) -> Result<f64> {
    check_lineages(lineages)?;
    let i = f64::from(lineages);
    Ok(i * (i - 1.0) / 2.0)
}

/// Active information of "the `i → i-1` merge takes longer than `t`" when the
/// waiting time is exponential with mean `μ` instead of `2/(i(i-1))`:
/// `t (i(i-1)/2 - 1/μ)` nats.
pub fn kingman_tail_ai(lineages: u32, mu_alt: f64, t: f64) -> Result<InfoValue> {
    let rate = kingman_rate(lineages)?;
    check_positive("mu_alt", mu_alt)?;
    check_time(t)?;
    Ok(InfoValue::from_nats(t * (rate - 1.0 / mu_alt), LogBase::Nats))
}

/// [`kingman_tail_ai`] with `μ = 2c / (i(i-1))`, i.e. a population `c`
/// times larger: `(i(i-1) t / 2)(1 - 1/c)` nats.
pub fn kingman_tail_ai_scaled(lineages: u32, c: f64, t: f64) -> Result<InfoValue> {
    let rate = kingman_rate(lineages)?;
    check_positive("c", c)?;
    check_time(t)?;
    Ok(InfoValue::from_nats(rate * t * (1.0 - 1.0 / c), LogBase::Nats))
}

/// A simulated pairwise coalescence time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tmrca {
    Coalesced(u64),
    /// No common parent within the generation cap.
    Censored,
}

/// Default cap for pairwise TMRCA simulation: `100·N` generations.
pub fn default_tmrca_max_gens(n_pop: u32) -> u64 {
    100 * u64::from(n_pop)
}

/// Traces two lineages back one generation at a time, each picking a
/// parent uniformly from `N`, until they pick the same one.
pub fn sample_pairwise_tmrca<R: Rng + ?Sized>(n_pop: u32, rng: &mut R, max_gens: u64) -> Result<Tmrca> {
    if n_pop < 2 {
        return Err(Error::invalid("N", format!("population size must be at least 2, got {n_pop}")));
    }
    for gen in 1..=max_gens {
        let a = rng.random_range(0..n_pop);
        let b = rng.random_range(0..n_pop);
        if a == b {
            return Ok(Tmrca::Coalesced(gen));
        }
    }
    Ok(Tmrca::Censored)
}

/// `count` independent samples, sample `k` drawn from stream `k` of `seed`.
pub fn sample_pairwise_tmrcas(n_pop: u32, count: u64, max_gens: u64, seed: u64) -> Result<Vec<Tmrca>> {
    if n_pop < 2 {
        return Err(Error::invalid("N", format!("population size must be at least 2, got {n_pop}")));
    }
    Ok(par::map_collect(count, |k| {
        let mut rng = substream(seed, k);
        sample_pairwise_tmrca(n_pop, &mut rng, max_gens).expect("N validated above")
    }))
}
