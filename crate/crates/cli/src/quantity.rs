//! Every computable quantity, keyed by `group.op`, and its evaluation.

use clap::ValueEnum;
use wfai::active_info::{
    active_info_from_probs, offspring_event_ai, one_step_fixation_ai, single_draw_ai,
    single_draw_ai_closed_form,
};
use wfai::coalescent::{
    default_tmrca_max_gens, geom_ai, geom_ai_limit, geom_ai_rearranged, geom_coalescence_pmf,
    kingman_rate, kingman_tail_ai, kingman_tail_ai_scaled, sample_pairwise_tmrcas,
    CoalescentGeomParams, Tmrca,
};
use wfai::diffusion::{
    drift, new_mutant_pfix, pfix_ai, pfix_diffusion, regime_report, sde_fixation_fraction,
    sde_simulate, variance, RegimeThresholds,
};
use wfai::fixation::{
    default_mc_max_gens, exact_fixation_prob_with, fixation_ai, mc_fixation_prob,
    FixationEstimator, SolverOptions,
};
use wfai::rng::substream;
use wfai::wf_chain::{default_max_gens, simulate, theta, transition_prob};
use wfai::{InfoValue, LogBase};

use crate::params::{MethodArg, Params};
use crate::record::{Record, Value};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    #[value(name = "simulate")]
    Simulate,
    #[value(name = "actinfo.from-probs")]
    FromProbs,
    #[value(name = "actinfo.single-draw")]
    SingleDraw,
    #[value(name = "actinfo.offspring")]
    Offspring,
    #[value(name = "actinfo.one-step-fixation")]
    OneStepFixation,
    #[value(name = "fixation.exact")]
    FixationExact,
    #[value(name = "fixation.mc")]
    FixationMc,
    #[value(name = "fixation.ai")]
    FixationAi,
    #[value(name = "diffusion.drift")]
    Drift,
    #[value(name = "diffusion.variance")]
    Variance,
    #[value(name = "diffusion.pfix")]
    Pfix,
    #[value(name = "diffusion.pfix-ai")]
    PfixAi,
    #[value(name = "diffusion.new-mutant")]
    NewMutant,
    #[value(name = "diffusion.regime")]
    Regime,
    #[value(name = "diffusion.chain-gap")]
    ChainGap,
    #[value(name = "diffusion.sde-path")]
    SdePath,
    #[value(name = "diffusion.sde-fixation")]
    SdeFixation,
    #[value(name = "coalescent.geom-pmf")]
    GeomPmf,
    #[value(name = "coalescent.geom-ai")]
    GeomAi,
    #[value(name = "coalescent.geom-ai-limit")]
    GeomAiLimit,
    #[value(name = "coalescent.kingman-rate")]
    KingmanRate,
    #[value(name = "coalescent.kingman-tail-ai")]
    KingmanTailAi,
    #[value(name = "coalescent.kingman-tail-ai-scaled")]
    KingmanTailAiScaled,
    #[value(name = "coalescent.tmrca")]
    Tmrca,
}

impl Quantity {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_owned()
    }

    /// Whether the quantity draws random numbers (and so needs `--seed`).
    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Quantity::Simulate
                | Quantity::FixationMc
                | Quantity::SdePath
                | Quantity::SdeFixation
                | Quantity::Tmrca
        )
    }

    /// Flags echoed as inputs, in column order.
    pub fn inputs(self) -> &'static [&'static str] {
        use Quantity::*;
        match self {
            Simulate => &["N", "i", "s", "mu1", "mu2", "max_gens", "stop_on_absorption"],
            FromProbs => &["p_null", "p_alt", "base"],
            SingleDraw => &["N", "i", "s", "mu1", "mu2", "base"],
            Offspring => &["N", "i", "j", "s", "mu1", "mu2", "base"],
            OneStepFixation => &["N", "i", "s", "base"],
            FixationExact => &["N", "i", "s"],
            FixationMc => &["N", "i", "s", "mu1", "mu2", "trials", "max_gens"],
            FixationAi => &["N", "i", "s", "mu1", "mu2", "method", "trials", "max_gens", "base"],
            Drift => &["alpha", "v1", "v2", "p0"],
            Variance => &["p0"],
            Pfix => &["alpha", "p0"],
            PfixAi => &["alpha", "p0", "base"],
            NewMutant => &["N", "s"],
            Regime => &["N", "s", "base"],
            ChainGap => &["N", "alpha", "p0"],
            SdePath => &["alpha", "v1", "v2", "p0", "dt", "t_max"],
            SdeFixation => &["alpha", "v1", "v2", "p0", "dt", "t_max", "paths"],
            GeomPmf => &["N", "k"],
            GeomAi => &["N", "nu", "k", "base"],
            GeomAiLimit => &["c", "d", "base"],
            KingmanRate => &["lineages"],
            KingmanTailAi => &["lineages", "mu_alt", "t", "base"],
            KingmanTailAiScaled => &["lineages", "c", "t", "base"],
            Tmrca => &["N", "trials", "max_gens"],
        }
    }
}

fn info_col(name: &str, base: LogBase) -> String {
    format!("{name}_{}", base.suffix())
}

fn info(v: InfoValue, base: LogBase) -> Value {
    Value::Float(v.to_base(base).value)
}

/// Computes one quantity at one parameter point. Most quantities give one
/// record; trajectories give one per time step.
pub fn evaluate(q: Quantity, p: &Params) -> Result<Vec<Record>, CliError> {
    let base = p.base();
    let rec = Record::new(&q.name(), p.echo(q.inputs()));
    let one = |r: Record| Ok(vec![r]);
    match q {
        Quantity::Simulate => {
            let wf = p.wf()?;
            let i0 = p.count(&wf, p.i, "i")?;
            let seed = p.seed()?;
            let max_gens = p.max_gens.unwrap_or_else(|| default_max_gens(wf.n_pop()));
            let traj = simulate(&wf, i0, max_gens, seed, p.stop_on_absorption);
            let (abs_gen, abs_state) = match traj.absorbed_at {
                Some((g, c)) => (Value::from(g), Value::from(c.get())),
                None => (Value::Null, Value::Null),
            };
            let n = f64::from(wf.n_pop());
            Ok(traj
                .counts
                .iter()
                .enumerate()
                .map(|(g, c)| {
                    rec.clone()
                        .out("generation", g as u64)
                        .out("count", c.get())
                        .out("frequency", f64::from(c.get()) / n)
                        .meta("seed", seed)
                        .meta("max_gens_used", max_gens)
                        .meta("absorbed_generation", abs_gen.clone())
                        .meta("absorbed_state", abs_state.clone())
                })
                .collect())
        }
        Quantity::FromProbs => {
            let b = active_info_from_probs(p.req(p.p_null, "p-null")?, p.req(p.p_alt, "p-alt")?, base)?;
            one(rec
                .out(info_col("endogenous", base), b.endogenous.value)
                .out(info_col("exogenous", base), b.exogenous.value)
                .out(info_col("active", base), b.active.value))
        }
        Quantity::SingleDraw => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let v = single_draw_ai(&wf, i, base)?;
            let closed = wf
                .is_mutation_free()
                .then(|| single_draw_ai_closed_form(wf.n_pop(), i.get(), wf.sel(), base).value);
            one(rec
                .out("theta", theta(&wf, i))
                .out("p_null", f64::from(i.get()) / f64::from(wf.n_pop()))
                .out(info_col("active", base), v.value)
                .out(info_col("closed_form", base), closed))
        }
        Quantity::Offspring => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let j = p.count(&wf, p.j, "j")?;
            let v = offspring_event_ai(&wf, i, j, base)?;
            one(rec
                .out("p_null", transition_prob(&wf.neutral_counterpart(), i, j))
                .out("p_alt", transition_prob(&wf, i, j))
                .out(info_col("active", base), v.value))
        }
        Quantity::OneStepFixation => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let v = one_step_fixation_ai(&wf, i, base)?;
            one(rec.out(info_col("active", base), v.value))
        }
        Quantity::FixationExact => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let r = exact_fixation_prob_with(&wf, i, &solver_options(p))?;
            one(rec
                .out("p_fix", r.p_fix)
                .out("p_fix_neutral", f64::from(i.get()) / f64::from(wf.n_pop())))
        }
        Quantity::FixationMc => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let seed = p.seed()?;
            let trials = p.req(p.trials, "trials")?;
            let max_gens = p.max_gens.unwrap_or_else(|| default_mc_max_gens(&wf));
            let r = mc_fixation_prob(&wf, i, trials, max_gens, seed)?;
            one(rec
                .out("p_fix", r.p_fix)
                .out("ci95_halfwidth", r.ci_halfwidth)
                .out("successes", r.successes())
                .meta("seed", seed)
                .meta("max_gens_used", max_gens)
                .meta("censored", r.censored))
        }
        Quantity::FixationAi => {
            let wf = p.wf()?;
            let i = p.count(&wf, p.i, "i")?;
            let (estimator, seed) = match p.req(p.method, "method")? {
                MethodArg::Exact => (FixationEstimator::Exact(solver_options(p)), None),
                MethodArg::Mc => {
                    let seed = p.seed()?;
                    (
                        FixationEstimator::MonteCarlo {
                            trials: p.req(p.trials, "trials")?,
                            max_gens: p.max_gens.unwrap_or_else(|| default_mc_max_gens(&wf)),
                            seed,
                        },
                        Some(seed),
                    )
                }
            };
            let r = fixation_ai(&wf, i, base, estimator)?;
            one(rec
                .out("p_fix", r.estimate.p_fix)
                .out("p_fix_neutral", f64::from(i.get()) / f64::from(wf.n_pop()))
                .out(info_col("endogenous", base), r.breakdown.endogenous.value)
                .out(info_col("exogenous", base), r.breakdown.exogenous.value)
                .out(info_col("active", base), r.breakdown.active.value)
                .out("low_count", r.low_count)
                .meta("seed", seed)
                .meta("censored", r.estimate.censored))
        }
        Quantity::Drift => {
            let dp = p.diffusion()?;
            one(rec.out("drift", drift(&dp, p.p0()?)))
        }
        Quantity::Variance => one(rec.out("variance", variance(p.p0()?))),
        Quantity::Pfix => one(rec.out("p_fix", pfix_diffusion(p.req(p.alpha, "alpha")?, p.p0()?))),
        Quantity::PfixAi => {
            let v = pfix_ai(p.req(p.alpha, "alpha")?, p.p0()?, base)?;
            one(rec.out(info_col("active", base), v.value))
        }
        Quantity::NewMutant => {
            let n = p.n()?;
            let s = p.s.unwrap_or(0.0);
            one(rec
                .out("p_fix", new_mutant_pfix(n, s)?)
                .out("p_fix_neutral", 1.0 / f64::from(n))
                .out("alpha", f64::from(n) * s))
        }
        Quantity::Regime => {
            let r = regime_report(p.n()?, p.s.unwrap_or(0.0), base, &RegimeThresholds::default())?;
            one(rec
                .out("regime", r.regime.as_str())
                .out("p_fix_exact_formula", r.p_fix_exact_formula)
                .out("p_fix_approx", r.p_fix_approx)
                .out(info_col("ai_exact_formula", base), r.ai_exact_formula.value)
                .out(info_col("ai_approx", base), r.ai_approx.map(|v| v.value)))
        }
        Quantity::ChainGap => {
            let n = p.n()?;
            let alpha = p.req(p.alpha, "alpha")?;
            let p0 = p.p0()?;
            let wf = wfai::WfParams::with_selection(n, alpha / f64::from(n))?;
            let i = wf.count((p0.get() * f64::from(n) - 1e-9).ceil().max(0.0) as u32)?;
            let chain = exact_fixation_prob_with(&wf, i, &solver_options(p))?.p_fix;
            let limit = pfix_diffusion(alpha, p0);
            one(rec
                .out("i", i.get())
                .out("p_fix_chain", chain)
                .out("p_fix_diffusion", limit)
                .out("gap", (chain - limit).abs()))
        }
        Quantity::SdePath => {
            let dp = p.diffusion()?;
            let seed = p.seed()?;
            let dt = p.req(p.dt, "dt")?;
            let mut rng = substream(seed, 0);
            let path = sde_simulate(&dp, p.p0()?, dt, p.req(p.t_max, "t-max")?, &mut rng)?;
            let (abs_t, abs_b) = match path.absorbed {
                Some((t, b)) => (Value::from(t), Value::from(b)),
                None => (Value::Null, Value::Null),
            };
            Ok(path
                .values
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    rec.clone()
                        .out("step", k as u64)
                        .out("time", k as f64 * dt)
                        .out("p", x)
                        .meta("seed", seed)
                        .meta("absorbed_time", abs_t.clone())
                        .meta("absorbed_at", abs_b.clone())
                })
                .collect())
        }
        Quantity::SdeFixation => {
            let dp = p.diffusion()?;
            let seed = p.seed()?;
            let p0 = p.p0()?;
            let r = sde_fixation_fraction(
                &dp,
                p0,
                p.req(p.dt, "dt")?,
                p.req(p.t_max, "t-max")?,
                p.req(p.paths, "paths")?,
                seed,
            )?;
            let reference = dp.is_mutation_free().then(|| pfix_diffusion(dp.alpha, p0));
            one(rec
                .out("fraction_at_one", r.fraction_at_one())
                .out("hit_one", r.hit_one)
                .out("hit_zero", r.hit_zero)
                .out("p_fix_closed_form", reference)
                .meta("seed", seed)
                .meta("unresolved", r.unresolved))
        }
        Quantity::GeomPmf => {
            let v = geom_coalescence_pmf(f64::from(p.n()?), p.req(p.k, "k")?)?;
            one(rec.out("pmf", v))
        }
        Quantity::GeomAi => {
            let gp = CoalescentGeomParams::new(p.n()?, p.req(p.nu, "nu")?)?;
            let k = p.req(p.k, "k")?;
            one(rec
                .out(info_col("active", base), geom_ai(&gp, k, base)?.value)
                .out(info_col("active_rearranged", base), geom_ai_rearranged(&gp, k, base).value))
        }
        Quantity::GeomAiLimit => {
            let v = geom_ai_limit(p.req(p.c, "c")?, p.req(p.d, "d")?)?;
            one(rec.out(info_col("active", base), info(v, base)))
        }
        Quantity::KingmanRate => {
            let r = kingman_rate(p.req(p.lineages, "lineages")?)?;
            one(rec.out("rate", r).out("mean", 1.0 / r))
        }
        Quantity::KingmanTailAi => {
            let v = kingman_tail_ai(
                p.req(p.lineages, "lineages")?,
                p.req(p.mu_alt, "mu-alt")?,
                p.req(p.t, "t")?,
            )?;
            one(rec.out(info_col("active", base), info(v, base)))
        }
        Quantity::KingmanTailAiScaled => {
            let v = kingman_tail_ai_scaled(p.req(p.lineages, "lineages")?, p.req(p.c, "c")?, p.req(p.t, "t")?)?;
            one(rec.out(info_col("active", base), info(v, base)))
        }
        Quantity::Tmrca => {
            let n = p.n()?;
            let seed = p.seed()?;
            let samples = p.req(p.trials, "trials")?;
            let max_gens = p.max_gens.unwrap_or_else(|| default_tmrca_max_gens(n));
            let draws = sample_pairwise_tmrcas(n, samples, max_gens, seed)?;
            let times: Vec<f64> = draws
                .iter()
                .filter_map(|t| match t {
                    Tmrca::Coalesced(k) => Some(*k as f64),
                    Tmrca::Censored => None,
                })
                .collect();
            let censored = samples - times.len() as u64;
            let m = times.len() as f64;
            let (mean, var) = if times.is_empty() {
                (None, None)
            } else {
                let mean = times.iter().sum::<f64>() / m;
                let var = times.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
                (Some(mean), Some(var))
            };
            let first = times.iter().filter(|&&x| x == 1.0).count() as f64 / samples as f64;
            one(rec
                .out("mean_generations", mean)
                .out("variance_generations", var)
                .out("fraction_k1", first)
                .out("expected_mean", f64::from(n))
                .meta("seed", seed)
                .meta("max_gens_used", max_gens)
                .meta("censored", censored))
        }
    }
}

fn solver_options(p: &Params) -> SolverOptions {
    let defaults = SolverOptions::default();
    SolverOptions {
        dense_cap: p.dense_cap.unwrap_or(defaults.dense_cap),
        iterative_fallback: p.iterative,
        ..defaults
    }
}
