//! Endogenous, exogenous and active information.
//!
//! For a target event with probability `p_null` under the neutral model and
//! `p_alt` under the non-neutral one, the endogenous information is
//! `-log p_null`, the exogenous information is `-log p_alt`, and the active
//! information is their difference, `log(p_alt / p_null)`. It is positive
//! when the alternative makes the target more likely.

use std::f64::consts::LN_2;
use std::fmt;

use crate::wf_chain::{theta_pair, AlleleCount, WfParams};
use crate::{Error, Result};

/// Logarithm base of an information value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogBase {
    Bits,
    #[default]
    Nats,
}

impl LogBase {
    /// Column suffix used in tabular output.
    pub fn suffix(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }

    fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Bits => nats / LN_2,
            LogBase::Nats => nats,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" => Ok(LogBase::Bits),
            "nats" => Ok(LogBase::Nats),
            other => Err(Error::invalid("base", format!("expected `bits` or `nats`, got `{other}`"))),
        }
    }
}

/// An information quantity with its base. May be ±∞, never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoValue {
    pub value: f64,
    pub base: LogBase,
}

impl InfoValue {
    pub fn from_nats(nats: f64, base: LogBase) -> Self {
        debug_assert!(!nats.is_nan());
        Self {
            value: base.from_nats(nats),
            base,
        }
    }

    pub fn nats(self) -> f64 {
        match self.base {
            LogBase::Bits => self.value * LN_2,
            LogBase::Nats => self.value,
        }
    }

    pub fn to_base(self, base: LogBase) -> Self {
        Self::from_nats(self.nats(), base)
    }
}

/// `I_Ω`, `I_1` and `I_+ = I_Ω - I_1` for one target event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoBreakdown {
    pub endogenous: InfoValue,
    pub exogenous: InfoValue,
    pub active: InfoValue,
}

/// Information breakdown for an event of probability `p_null` under the
/// neutral model and `p_alt` under the alternative.
///
/// Events impossible under exactly one model give a signed infinity; an
/// event impossible under both is [`Error::UndefinedEvent`].
pub fn active_info_from_probs(p_null: f64, p_alt: f64, base: LogBase) -> Result<InfoBreakdown> {
    for (name, p) in [("p_null", p_null), ("p_alt", p_alt)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(name, format!("probability must lie in [0, 1], got {p}")));
        }
    }
    if p_null == 0.0 && p_alt == 0.0 {
        return Err(Error::UndefinedEvent);
    }
    let endo = -p_null.ln();
    let exo = -p_alt.ln();
    let active = if p_null == 0.0 {
        f64::INFINITY
    } else if p_alt == 0.0 {
        f64::NEG_INFINITY
    } else {
        (p_alt / p_null).ln()
    };
    Ok(InfoBreakdown {
        endogenous: InfoValue::from_nats(endo, base),
        exogenous: InfoValue::from_nats(exo, base),
        active: InfoValue::from_nats(active, base),
    })
}

fn require_interior(params: &WfParams, i: AlleleCount) -> Result<()> {
    let n = params.n_pop();
    if i.get() == 0 || i.get() == n {
        return Err(Error::BoundaryEvent(format!(
            "i = {} is an absorbing state for N = {n}; use active_info_from_probs for boundary events",
            i.get()
        )));
    }
    Ok(())
}

/// Active information of a single offspring drawing an `A` allele:
/// `log(θ_i / (i/N))`.
pub fn single_draw_ai(params: &WfParams, i: AlleleCount, base: LogBase) -> Result<InfoValue> {
    require_interior(params, i)?;
    let (theta, _) = theta_pair(params, i);
    let ratio = theta * f64::from(params.n_pop()) / f64::from(i.get());
    Ok(InfoValue::from_nats(ratio.ln(), base))
}

/// Selection-only closed form of [`single_draw_ai`]:
/// `log((N + N s) / (N + i s))`.
pub fn single_draw_ai_closed_form(n_pop: u32, i: u32, sel: f64, base: LogBase) -> InfoValue {
    let n = f64::from(n_pop);
    let x = f64::from(i) * sel / n;
    InfoValue::from_nats(sel.ln_1p() - x.ln_1p(), base)
}

/// Active information of the offspring event "`j` copies of `A` next
/// generation, given `i` now":
/// `j log(θ_i/(i/N)) + (N-j) log((1-θ_i)/(1-i/N))`.
///
/// The binomial coefficients of the two pmfs cancel. If the alternative
/// makes the event impossible the result is `-∞`.
pub fn offspring_event_ai(
    params: &WfParams,
    i: AlleleCount,
    j: AlleleCount,
    base: LogBase,
) -> Result<InfoValue> {
    require_interior(params, i)?;
    let n = params.n_pop();
    let (theta, theta_c) = theta_pair(params, i);
    let nf = f64::from(n);
    let fi = f64::from(i.get());
    let up = j.get();
    let down = n - j.get();
    let mut nats = 0.0;
    if up > 0 {
        nats += f64::from(up) * (theta * nf / fi).ln();
    }
    if down > 0 {
        nats += f64::from(down) * (theta_c * nf / (nf - fi)).ln();
    }
    Ok(InfoValue::from_nats(nats, base))
}

/// Selection-only closed form of [`offspring_event_ai`]:
/// `j log(1+s) + N log(N/(N+is))`.
pub fn offspring_event_ai_closed_form(n_pop: u32, i: u32, j: u32, sel: f64, base: LogBase) -> InfoValue {
    let n = f64::from(n_pop);
    let x = f64::from(i) * sel / n;
    let nats = f64::from(j) * sel.ln_1p() - n * x.ln_1p();
    InfoValue::from_nats(nats, base)
}

/// Active information of fixation in the very next generation (mutation-free
/// chains only): `N log((N + N s)/(N + i s))`, i.e. `N` times the
/// single-draw value.
pub fn one_step_fixation_ai(params: &WfParams, i: AlleleCount, base: LogBase) -> Result<InfoValue> {
    if !params.is_mutation_free() {
        return Err(Error::Unsupported(
            "one-step fixation active information is defined for mutation-free chains".into(),
        ));
    }
    require_interior(params, i)?;
    let per_draw = single_draw_ai_closed_form(params.n_pop(), i.get(), params.sel(), LogBase::Nats);
    Ok(InfoValue::from_nats(f64::from(params.n_pop()) * per_draw.value, base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wf_chain::ln_transition_prob;
    use proptest::prelude::*;

    fn p(n: u32, s: f64, mu1: f64, mu2: f64) -> WfParams {
        WfParams::new(n, s, mu1, mu2).unwrap()
    }

    fn c(params: &WfParams, i: u32) -> AlleleCount {
        params.count(i).unwrap()
    }

    #[test]
    fn from_probs_examples() {
        let b = active_info_from_probs(0.5, 0.5, LogBase::Bits).unwrap();
        assert_eq!(b.active.value, 0.0);
        assert_eq!(b.endogenous.value, 1.0);

        let b = active_info_from_probs(0.25, 0.5, LogBase::Bits).unwrap();
        assert!((b.active.value - 1.0).abs() < 1e-15);
        assert!((b.endogenous.value - b.exogenous.value - b.active.value).abs() < 1e-12);

        let b = active_info_from_probs(0.5, 0.0, LogBase::Nats).unwrap();
        assert_eq!(b.active.value, f64::NEG_INFINITY);
        assert_eq!(b.exogenous.value, f64::INFINITY);

        let b = active_info_from_probs(0.0, 0.3, LogBase::Nats).unwrap();
        assert_eq!(b.active.value, f64::INFINITY);

        assert_eq!(active_info_from_probs(0.0, 0.0, LogBase::Nats), Err(Error::UndefinedEvent));
        assert!(active_info_from_probs(1.2, 0.3, LogBase::Nats).is_err());
    }

    #[test]
    fn single_draw_examples() {
        let q = p(100, 0.0, 0.0, 0.0);
        assert_eq!(single_draw_ai(&q, c(&q, 50), LogBase::Nats).unwrap().value, 0.0);

        let q = p(100, 0.1, 0.0, 0.0);
        let v = single_draw_ai(&q, c(&q, 50), LogBase::Nats).unwrap();
        assert!((v.value - (110.0f64 / 105.0).ln()).abs() < 1e-15);
        assert!((v.value - 0.046_520_0).abs() < 5e-8);

        let q = p(100, -0.1, 0.0, 0.0);
        assert!(single_draw_ai(&q, c(&q, 50), LogBase::Nats).unwrap().value < 0.0);

        assert!(matches!(single_draw_ai(&q, c(&q, 0), LogBase::Nats), Err(Error::BoundaryEvent(_))));
        assert!(matches!(single_draw_ai(&q, c(&q, 100), LogBase::Nats), Err(Error::BoundaryEvent(_))));
    }

    #[test]
    fn offspring_event_examples() {
        let q = p(10, 0.0, 0.0, 0.0);
        for j in 0..=10 {
            assert_eq!(offspring_event_ai(&q, c(&q, 3), c(&q, j), LogBase::Nats).unwrap().value, 0.0);
        }
        let q = p(10, 0.2, 0.0, 0.0);
        let top = offspring_event_ai(&q, c(&q, 5), c(&q, 10), LogBase::Nats).unwrap().value;
        assert!((top - (10.0 * 1.2f64.ln() + 10.0 * (10.0f64 / 11.0).ln())).abs() < 1e-12);
        assert!((top - 0.870_114).abs() < 5e-7);
        let bottom = offspring_event_ai(&q, c(&q, 5), c(&q, 0), LogBase::Nats).unwrap().value;
        assert!((bottom - 10.0 * (10.0f64 / 11.0).ln()).abs() < 1e-12);
        assert!((bottom - (-0.953_102)).abs() < 5e-7);
    }

    #[test]
    fn offspring_event_impossible_under_alternative() {
        // μ1 = 1, μ2 = 0: every offspring is `a`, so any j > 0 is impossible.
        let q = p(8, 0.1, 1.0, 0.0);
        let v = offspring_event_ai(&q, c(&q, 4), c(&q, 3), LogBase::Bits).unwrap();
        assert_eq!(v.value, f64::NEG_INFINITY);
        let v = offspring_event_ai(&q, c(&q, 4), c(&q, 0), LogBase::Nats).unwrap();
        assert!((v.value - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn one_step_fixation_examples() {
        let q = p(40, 0.0, 0.0, 0.0);
        assert_eq!(one_step_fixation_ai(&q, c(&q, 9), LogBase::Nats).unwrap().value, 0.0);

        let q = p(100, 0.1, 0.0, 0.0);
        let v = one_step_fixation_ai(&q, c(&q, 50), LogBase::Nats).unwrap().value;
        assert!((v - 100.0 * (110.0f64 / 105.0).ln()).abs() < 1e-12);
        assert!((v - 4.652_00).abs() < 5e-6);

        let q = p(20, 0.3, 0.0, 0.0);
        let v = one_step_fixation_ai(&q, c(&q, 7), LogBase::Bits).unwrap().value;
        let single = single_draw_ai(&q, c(&q, 7), LogBase::Bits).unwrap().value;
        assert!((v - 20.0 * single).abs() < 1e-10);

        let q = p(20, 0.3, 0.01, 0.0);
        assert!(matches!(one_step_fixation_ai(&q, c(&q, 7), LogBase::Nats), Err(Error::Unsupported(_))));
    }

    #[test]
    fn base_parsing() {
        assert_eq!("bits".parse::<LogBase>().unwrap(), LogBase::Bits);
        assert_eq!("nats".parse::<LogBase>().unwrap(), LogBase::Nats);
        assert!("dits".parse::<LogBase>().is_err());
    }

    fn interior(n: u32, frac: f64) -> u32 {
        1 + ((frac * f64::from(n - 1)) as u32).min(n - 2)
    }

    proptest! {
        #[test]
        fn sign_follows_selection(n in 3u32..10_000, frac in 0.0f64..1.0, s in -0.99f64..5.0) {
            let q = p(n, s, 0.0, 0.0);
            let v = single_draw_ai(&q, c(&q, interior(n, frac)), LogBase::Nats).unwrap().value;
            if s > 0.0 { prop_assert!(v > 0.0) } else if s < 0.0 { prop_assert!(v < 0.0) } else { prop_assert_eq!(v, 0.0) }
        }

        #[test]
        fn general_and_closed_forms_agree(n in 3u32..10_000, frac in 0.0f64..1.0, s in -0.5f64..0.5, jfrac in 0.0f64..=1.0) {
            let q = p(n, s, 0.0, 0.0);
            let i = interior(n, frac);
            let j = (jfrac * f64::from(n)).round() as u32;
            let general = single_draw_ai(&q, c(&q, i), LogBase::Nats).unwrap().value;
            let closed = single_draw_ai_closed_form(n, i, s, LogBase::Nats).value;
            prop_assert!((general - closed).abs() < 1e-12);
            let general = offspring_event_ai(&q, c(&q, i), c(&q, j), LogBase::Nats).unwrap().value;
            let closed = offspring_event_ai_closed_form(n, i, j, s, LogBase::Nats).value;
            prop_assert!((general - closed).abs() < 1e-10 * (1.0 + closed.abs()));
        }

        #[test]
        fn one_step_is_n_times_single_draw(n in 3u32..10_000, frac in 0.0f64..1.0, s in -0.5f64..0.5) {
            let q = p(n, s, 0.0, 0.0);
            let i = c(&q, interior(n, frac));
            let one_step = one_step_fixation_ai(&q, i, LogBase::Nats).unwrap().value;
            let single = single_draw_ai(&q, i, LogBase::Nats).unwrap().value;
            prop_assert!((one_step - f64::from(n) * single).abs() < 1e-10);
            let full = offspring_event_ai(&q, i, c(&q, n), LogBase::Nats).unwrap().value;
            prop_assert!((full - one_step).abs() < 1e-10);
        }

        #[test]
        fn offspring_event_is_pmf_log_ratio(n in 3u32..=30, frac in 0.0f64..1.0, s in -0.5f64..1.0, mu1 in 0.0f64..0.2, mu2 in 0.0f64..0.2) {
            let alt = p(n, s, mu1, mu2);
            let neutral = alt.neutral_counterpart();
            let i = c(&alt, interior(n, frac));
            for j in 0..=n {
                let j = c(&alt, j);
                let ratio = ln_transition_prob(&alt, i, j) - ln_transition_prob(&neutral, i, j);
                let v = offspring_event_ai(&alt, i, j, LogBase::Nats).unwrap().value;
                prop_assert!((v - ratio).abs() < 1e-8, "{} vs {}", v, ratio);
            }
        }

        #[test]
        fn bits_times_ln2_is_nats(p_null in 1e-12f64..1.0, p_alt in 1e-12f64..1.0) {
            let bits = active_info_from_probs(p_null, p_alt, LogBase::Bits).unwrap();
            let nats = active_info_from_probs(p_null, p_alt, LogBase::Nats).unwrap();
            prop_assert!((bits.active.value * LN_2 - nats.active.value).abs() < 1e-12);
            prop_assert!((bits.active.to_base(LogBase::Nats).value - nats.active.value).abs() < 1e-12);
        }
    }
}
