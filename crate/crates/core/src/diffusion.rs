//! The diffusion limit of the Wright-Fisher chain.
//!
//! With time measured in units of `N` generations and rescaled parameters
//! `α = N s`, `v1 = N μ1`, `v2 = N μ2`, the allele frequency follows
//! `dX = μ(X) dt + σ(X) dB` with drift `α p(1-p) - v1 p + v2 (1-p)` and
//! variance `p(1-p)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::active_info::{InfoValue, LogBase};
use crate::par;
use crate::rng::substream;
use crate::wf_chain::WfParams;
use crate::{Error, Result};

/// Below this `|α|` the fixation formula switches to its two-term series.
pub const ALPHA_SERIES_CUTOFF: f64 = 1e-8;

/// Rescaled selection and mutation rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub alpha: f64,
    pub v1: f64,
    pub v2: f64,
}

impl DiffusionParams {
    pub fn new(alpha: f64, v1: f64, v2: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be finite, got {alpha}")));
        }
        for (name, v) in [("v1", v1), ("v2", v2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("rescaled mutation rate must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { alpha, v1, v2 })
    }

    /// `α = N s`, `v1 = N μ1`, `v2 = N μ2`.
    pub fn from_wf(params: &WfParams) -> Self {
        let n = f64::from(params.n_pop());
        Self {
            alpha: n * params.sel(),
            v1: n * params.mu_a_to_small(),
            v2: n * params.mu_small_to_a(),
        }
    }

    pub fn is_mutation_free(&self) -> bool {
        self.v1 == 0.0 && self.v2 == 0.0
    }
}

/// Allele frequency in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p0", format!("frequency must lie in [0, 1], got {p}")));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub fn drift(dp: &DiffusionParams, p: Frequency) -> f64 {
    let p = p.0;
    dp.alpha * p * (1.0 - p) - dp.v1 * p + dp.v2 * (1.0 - p)
}

pub fn variance(p: Frequency) -> f64 {
    p.0 * (1.0 - p.0)
}

/// Probability that the mutation-free diffusion started at `p0` is absorbed
/// at 1: `(1 - e^{-2α p0}) / (1 - e^{-2α})`, or `p0` when `α = 0`.
pub fn pfix_diffusion(alpha: f64, p0: Frequency) -> f64 {
    pfix_diffusion_raw(alpha, p0.0)
}

pub(crate) fn pfix_diffusion_raw(alpha: f64, p0: f64) -> f64 {
    if alpha.abs() < ALPHA_SERIES_CUTOFF {
        return p0 + alpha * p0 * (1.0 - p0);
    }
    if alpha > 0.0 {
        ((-2.0 * alpha * p0).exp_m1() / (-2.0 * alpha).exp_m1()).min(1.0)
    } else {
        // Rewritten with a = -2α > 0 so nothing overflows for large |α|:
        // (e^{a p} - 1)/(e^{a} - 1) = e^{a(p-1)} (1 - e^{-a p}) / (1 - e^{-a}).
        let a = -2.0 * alpha;
        (a * (p0 - 1.0)).exp() * (-a * p0).exp_m1() / (-a).exp_m1()
    }
}

/// `log(pfix_diffusion(α, p0) / p0)`.
pub fn pfix_ai(alpha: f64, p0: Frequency, base: LogBase) -> Result<InfoValue> {
    let p = p0.0;
    if p == 0.0 || p == 1.0 {
        return Err(Error::BoundaryEvent(format!(
            "p0 = {p} is absorbing; fixation is certain one way or the other"
        )));
    }
    let nats = if alpha.abs() < ALPHA_SERIES_CUTOFF {
        (alpha * (1.0 - p)).ln_1p()
    } else {
        (pfix_diffusion_raw(alpha, p) / p).ln()
    };
    Ok(InfoValue::from_nats(nats, base))
}

/// Fixation probability of a single new mutant, `p_fix(1/N)`:
/// `(1 - e^{-2s}) / (1 - e^{-2Ns})`, and `1/N` at `s = 0`.
pub fn new_mutant_pfix(n_pop: u32, sel: f64) -> Result<f64> {
    if n_pop < 2 {
        return Err(Error::invalid("N", format!("population size must be at least 2, got {n_pop}")));
    }
    let n = f64::from(n_pop);
    Ok(pfix_diffusion_raw(n * sel, 1.0 / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Deleterious,
    Beneficial,
    NearlyNeutral,
    Unclassified,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Deleterious => "deleterious",
            Regime::Beneficial => "beneficial",
            Regime::NearlyNeutral => "nearly_neutral",
            Regime::Unclassified => "unclassified",
        }
    }
}

/// Cut-offs turning "`|s| ≪ 1`", "`N|s| ≫ 1`" and "`N|s| ≪ 1`" into
/// decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// Largest `|s|` treated as weak selection.
    pub max_abs_sel: f64,
    /// Smallest `N|s|` treated as strong drift-relative selection.
    pub min_scaled_sel: f64,
    /// Largest `N|s|` treated as nearly neutral.
    pub max_neutral_scaled_sel: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            max_abs_sel: 0.05,
            min_scaled_sel: 5.0,
            max_neutral_scaled_sel: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `new_mutant_pfix(N, s)`.
    pub p_fix_exact_formula: f64,
    /// Active information of the exact formula against the neutral `1/N`.
    pub ai_exact_formula: InfoValue,
    /// The regime's approximation to `p_fix(1/N)`; `None` when unclassified.
    pub p_fix_approx: Option<f64>,
    pub ai_approx: Option<InfoValue>,
}

pub fn classify(n_pop: u32, sel: f64, t: &RegimeThresholds) -> Regime {
    let scaled = f64::from(n_pop) * sel.abs();
    if scaled <= t.max_neutral_scaled_sel {
        Regime::NearlyNeutral
    } else if sel < 0.0 && sel.abs() <= t.max_abs_sel && scaled >= t.min_scaled_sel {
        Regime::Deleterious
    } else if sel > 0.0 && sel <= t.max_abs_sel && scaled >= t.min_scaled_sel {
        Regime::Beneficial
    } else {
        Regime::Unclassified
    }
}

/// Classifies `(N, s)` and reports the regime's approximations next to the
/// exact new-mutant formula:
///
/// | regime | `p_fix(1/N)` ≈ | active information ≈ (nats) |
/// |---|---|---|
/// | deleterious | `2|s| e^{-2N|s|}` | `ln(2N|s|) - 2N|s|` |
/// | beneficial | `2s` | `ln(2Ns)` |
/// | nearly neutral | `1/N` | `0` |
pub fn regime_report(
    n_pop: u32,
    sel: f64,
    base: LogBase,
    thresholds: &RegimeThresholds,
) -> Result<RegimeReport> {
    let exact = new_mutant_pfix(n_pop, sel)?;
    let n = f64::from(n_pop);
    let scaled = n * sel.abs();
    let regime = classify(n_pop, sel, thresholds);
    let (p_approx, ai_approx_nats) = match regime {
        Regime::Deleterious => (
            Some(2.0 * sel.abs() * (-2.0 * scaled).exp()),
            Some((2.0 * scaled).ln() - 2.0 * scaled),
        ),
        Regime::Beneficial => (Some(2.0 * sel), Some((2.0 * scaled).ln())),
        Regime::NearlyNeutral => (Some(1.0 / n), Some(0.0)),
        Regime::Unclassified => (None, None),
    };
    Ok(RegimeReport {
        regime,
        p_fix_exact_formula: exact,
        ai_exact_formula: InfoValue::from_nats((exact * n).ln(), base),
        p_fix_approx: p_approx,
        ai_approx: ai_approx_nats.map(|v| InfoValue::from_nats(v, base)),
    })
}

/// One Euler-Maruyama path on the grid `0, dt, 2dt, …, t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdePath {
    pub dt: f64,
    pub values: Vec<f64>,
    /// Time and boundary of absorption (mutation-free paths only).
    pub absorbed: Option<(f64, f64)>,
}

fn n_steps(dt: f64, t_max: f64) -> Result<u64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("time step must be positive, got {dt}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::invalid("t_max", format!("horizon must be positive, got {t_max}")));
    }
    Ok((t_max / dt).round().max(1.0) as u64)
}

#[inline]
fn em_step<R: Rng + ?Sized>(dp: &DiffusionParams, p: f64, dt: f64, sqrt_dt: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let f = Frequency(p);
    let next = p + drift(dp, f) * dt + (variance(f)).sqrt() * sqrt_dt * z;
    next.clamp(0.0, 1.0)
}

/// Euler-Maruyama integration clamped to `[0, 1]`. Without mutation, a path
/// that touches 0 or 1 stays there.
pub fn sde_simulate<R: Rng + ?Sized>(
    dp: &DiffusionParams,
    p0: Frequency,
    dt: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<SdePath> {
    let steps = n_steps(dt, t_max)?;
    let sqrt_dt = dt.sqrt();
    let absorbing = dp.is_mutation_free();
    let mut p = p0.0;
    let mut values = Vec::with_capacity(steps as usize + 1);
    values.push(p);
    let mut absorbed = (absorbing && (p == 0.0 || p == 1.0)).then_some((0.0, p));
    for k in 1..=steps {
        if absorbed.is_none() {
            p = em_step(dp, p, dt, sqrt_dt, rng);
            if absorbing && (p == 0.0 || p == 1.0) {
                absorbed = Some((k as f64 * dt, p));
            }
        }
        values.push(p);
    }
    Ok(SdePath { dt, values, absorbed })
}

/// Outcome counts over an ensemble of paths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SdeFixation {
    pub paths: u64,
    /// Paths reaching 1 by `t_max` (first passage when mutation is on).
    pub hit_one: u64,
    /// Paths absorbed at 0 (mutation-free only).
    pub hit_zero: u64,
    /// Paths still undecided at `t_max`.
    pub unresolved: u64,
}

impl std::ops::Add for SdeFixation {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            paths: self.paths + o.paths,
            hit_one: self.hit_one + o.hit_one,
            hit_zero: self.hit_zero + o.hit_zero,
            unresolved: self.unresolved + o.unresolved,
        }
    }
}

impl SdeFixation {
    pub fn fraction_at_one(&self) -> f64 {
        self.hit_one as f64 / self.paths as f64
    }
}

/// Runs `paths` independent paths (path `k` on stream `k` of `seed`) until
/// they reach 1, are absorbed at 0, or run out of time.
pub fn sde_fixation_fraction(
    dp: &DiffusionParams,
    p0: Frequency,
    dt: f64,
    t_max: f64,
    paths: u64,
    seed: u64,
) -> Result<SdeFixation> {
    let steps = n_steps(dt, t_max)?;
    if paths == 0 {
        return Err(Error::invalid("paths", "at least one path is required"));
    }
    let sqrt_dt = dt.sqrt();
    let absorbing = dp.is_mutation_free();
    Ok(par::sum_over(paths, |k| {
        let mut rng = substream(seed, k);
        let mut p = p0.0;
        let mut out = SdeFixation {
            paths: 1,
            ..Default::default()
        };
        for _ in 0..=steps {
            if p == 1.0 {
                out.hit_one = 1;
                return out;
            }
            if absorbing && p == 0.0 {
                out.hit_zero = 1;
                return out;
            }
            p = em_step(dp, p, dt, sqrt_dt, &mut rng);
        }
        out.unresolved = 1;
        out
    }))
}
