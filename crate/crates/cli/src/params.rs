//! Flags shared by every subcommand, and their validation.

use clap::{Args, ValueEnum};
use wfai::diffusion::{DiffusionParams, Frequency};
use wfai::{AlleleCount, LogBase, WfParams};

use crate::record::Value;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Bits,
    Nats,
}

impl From<BaseArg> for LogBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Bits => LogBase::Bits,
            BaseArg::Nats => LogBase::Nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Mc,
}

/// Model parameters. Each subcommand reads the subset it needs and reports
/// any missing one as a validation error.
#[derive(Debug, Clone, Args)]
pub struct Params {
    /// Haploid population size N
    #[arg(long = "N", global = true)]
    pub n: Option<u32>,
    /// Number of A alleles now
    #[arg(long = "i", global = true)]
    pub i: Option<u32>,
    /// Number of A alleles in the next generation
    #[arg(long = "j", global = true)]
    pub j: Option<u32>,
    /// Selection coefficient s (> -1)
    #[arg(long = "s", global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Mutation probability A -> a
    #[arg(long = "mu1", global = true)]
    pub mu1: Option<f64>,
    /// Mutation probability a -> A
    #[arg(long = "mu2", global = true)]
    pub mu2: Option<f64>,
    /// Rescaled selection alpha = N s
    #[arg(long = "alpha", global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Rescaled mutation v1 = N mu1
    #[arg(long = "v1", global = true)]
    pub v1: Option<f64>,
    /// Rescaled mutation v2 = N mu2
    #[arg(long = "v2", global = true)]
    pub v2: Option<f64>,
    /// Initial frequency of A in [0, 1]
    #[arg(long = "p0", global = true)]
    pub p0: Option<f64>,
    /// Alternative population size nu (may be fractional)
    #[arg(long = "nu", global = true)]
    pub nu: Option<f64>,
    /// Population scale factor c
    #[arg(long = "c", global = true)]
    pub c: Option<f64>,
    /// Coalescence generation k (>= 1)
    #[arg(long = "k", global = true)]
    pub k: Option<u64>,
    /// Rescaled coalescence time d = k / N
    #[arg(long = "d", global = true)]
    pub d: Option<f64>,
    /// Time threshold t (units of N generations)
    #[arg(long = "t", global = true)]
    pub t: Option<f64>,
    /// Number of lineages i (>= 2)
    #[arg(long = "lineages", global = true)]
    pub lineages: Option<u32>,
    /// Alternative mean coalescence time mu
    #[arg(long = "mu-alt", global = true)]
    pub mu_alt: Option<f64>,
    /// Neutral-model event probability
    #[arg(long = "p-null", global = true)]
    pub p_null: Option<f64>,
    /// Alternative-model event probability
    #[arg(long = "p-alt", global = true)]
    pub p_alt: Option<f64>,
    /// Monte Carlo trials or samples
    #[arg(long = "trials", global = true)]
    pub trials: Option<u64>,
    /// Number of SDE paths
    #[arg(long = "paths", global = true)]
    pub paths: Option<u64>,
    /// Generation cap (defaults: simulate 20N, MC fixation 20N / 50N with mutation, TMRCA 100N)
    #[arg(long = "max-gens", global = true)]
    pub max_gens: Option<u64>,
    /// SDE time step (units of N generations)
    #[arg(long = "dt", global = true)]
    pub dt: Option<f64>,
    /// SDE horizon (units of N generations)
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    /// Master seed; required by stochastic subcommands
    #[arg(long = "seed", global = true)]
    pub seed: Option<u64>,
    /// Estimator for `fixation ai`
    #[arg(long = "method", global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Stop forward simulation at the first absorbing state
    #[arg(long = "stop-on-absorption", global = true)]
    pub stop_on_absorption: bool,
    /// Largest N solved densely by the exact fixation solver
    #[arg(long = "dense-cap", global = true)]
    pub dense_cap: Option<u32>,
    /// Allow the fixed-point solver above the dense cap
    #[arg(long = "iterative", global = true)]
    pub iterative: bool,
    /// Information unit
    #[arg(long = "base", global = true, value_enum, default_value = "nats")]
    pub base: BaseArg,
}

fn missing(flag: &str) -> CliError {
    CliError::Validation(format!("missing required flag --{flag}"))
}

impl Params {
    pub fn base(&self) -> LogBase {
        self.base.into()
    }

    pub fn req<T: Copy>(&self, v: Option<T>, flag: &str) -> Result<T, CliError> {
        v.ok_or_else(|| missing(flag))
    }

    pub fn n(&self) -> Result<u32, CliError> {
        self.req(self.n, "N")
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Validation("stochastic subcommands require an explicit --seed".into()))
    }

    /// `WfParams` from `--N --s --mu1 --mu2`; `s`, `mu1`, `mu2` default to 0.
    pub fn wf(&self) -> Result<WfParams, CliError> {
        Ok(WfParams::new(
            self.n()?,
            self.s.unwrap_or(0.0),
            self.mu1.unwrap_or(0.0),
            self.mu2.unwrap_or(0.0),
        )?)
    }

    pub fn count(&self, wf: &WfParams, v: Option<u32>, flag: &str) -> Result<AlleleCount, CliError> {
        Ok(wf.count(self.req(v, flag)?)?)
    }

    pub fn diffusion(&self) -> Result<DiffusionParams, CliError> {
        Ok(DiffusionParams::new(
            self.req(self.alpha, "alpha")?,
            self.v1.unwrap_or(0.0),
            self.v2.unwrap_or(0.0),
        )?)
    }

    pub fn p0(&self) -> Result<Frequency, CliError> {
        Ok(Frequency::new(self.req(self.p0, "p0")?)?)
    }

    /// Echo of the named flags, in the given order.
    pub fn echo(&self, names: &[&str]) -> Vec<(String, Value)> {
        names
            .iter()
            .map(|&name| (name.to_owned(), self.get(name)))
            .collect()
    }

    pub fn get(&self, name: &str) -> Value {
        match name {
            "N" => self.n.into(),
            "i" => self.i.into(),
            "j" => self.j.into(),
            "s" => Value::from(self.s.or(Some(0.0))),
            "mu1" => Value::from(self.mu1.or(Some(0.0))),
            "mu2" => Value::from(self.mu2.or(Some(0.0))),
            "alpha" => self.alpha.into(),
            "v1" => Value::from(self.v1.or(Some(0.0))),
            "v2" => Value::from(self.v2.or(Some(0.0))),
            "p0" => self.p0.into(),
            "nu" => self.nu.into(),
            "c" => self.c.into(),
            "k" => self.k.into(),
            "d" => self.d.into(),
            "t" => self.t.into(),
            "lineages" => self.lineages.into(),
            "mu_alt" => self.mu_alt.into(),
            "p_null" => self.p_null.into(),
            "p_alt" => self.p_alt.into(),
            "trials" => self.trials.into(),
            "paths" => self.paths.into(),
            "max_gens" => self.max_gens.into(),
            "dt" => self.dt.into(),
            "t_max" => self.t_max.into(),
            "seed" => self.seed.into(),
            "base" => LogBase::from(self.base).suffix().into(),
            "method" => self.method.map(|m| match m {
                MethodArg::Exact => "exact",
                MethodArg::Mc => "mc",
            }).into(),
            "stop_on_absorption" => self.stop_on_absorption.into(),
            other => unreachable!("unknown echo field {other}"),
        }
    }

    /// Sets a numeric flag by name; used by `sweep` axes.
    pub fn set(&mut self, name: &str, v: f64) -> Result<(), CliError> {
        fn int<T: TryFrom<u64>>(name: &str, v: f64) -> Result<T, CliError> {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(CliError::Validation(format!("axis {name} needs nonnegative integers, got {v}")));
            }
            T::try_from(v as u64).map_err(|_| CliError::Validation(format!("axis {name} value {v} out of range")))
        }
        match name {
            "N" => self.n = Some(int(name, v)?),
            "i" => self.i = Some(int(name, v)?),
            "j" => self.j = Some(int(name, v)?),
            "k" => self.k = Some(int(name, v)?),
            "lineages" => self.lineages = Some(int(name, v)?),
            "trials" => self.trials = Some(int(name, v)?),
            "paths" => self.paths = Some(int(name, v)?),
            "max_gens" | "max-gens" => self.max_gens = Some(int(name, v)?),
            "seed" => self.seed = Some(int(name, v)?),
            "s" => self.s = Some(v),
            "mu1" => self.mu1 = Some(v),
            "mu2" => self.mu2 = Some(v),
            "alpha" => self.alpha = Some(v),
            "v1" => self.v1 = Some(v),
            "v2" => self.v2 = Some(v),
            "p0" => self.p0 = Some(v),
            "nu" => self.nu = Some(v),
            "c" => self.c = Some(v),
            "d" => self.d = Some(v),
            "t" => self.t = Some(v),
            "mu_alt" | "mu-alt" => self.mu_alt = Some(v),
            "p_null" | "p-null" => self.p_null = Some(v),
            "p_alt" | "p-alt" => self.p_alt = Some(v),
            "dt" => self.dt = Some(v),
            "t_max" | "t-max" => self.t_max = Some(v),
            other => return Err(CliError::Validation(format!("unknown sweep axis `{other}`"))),
        }
        Ok(())
    }
}
