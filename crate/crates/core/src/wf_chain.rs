//! The forward Wright-Fisher chain on allele counts `{0, …, N}`.
//!
//! Given `i` copies of allele `A` among `N` haploid individuals, the next
//! generation holds `Bin(N, θ_i)` copies, where `θ_i` folds in selection and
//! two-way mutation. With `s = μ1 = μ2 = 0` this is the neutral kernel
//! `Bin(N, i/N)`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::binom;
use crate::rng::{substream, Stream};
use crate::{Error, Result};

/// Population size, selection coefficient and mutation probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WfParams {
    n_pop: u32,
    sel: f64,
    mu_a_to_small: f64,
    mu_small_to_a: f64,
}

impl WfParams {
    /// `mu_a_to_small` is the per-offspring probability of `A → a`,
    /// `mu_small_to_a` that of `a → A`.
    pub fn new(n_pop: u32, sel: f64, mu_a_to_small: f64, mu_small_to_a: f64) -> Result<Self> {
        if n_pop < 2 {
            return Err(Error::invalid("N", format!("population size must be at least 2, got {n_pop}")));
        }
        if !sel.is_finite() || sel <= -1.0 {
            return Err(Error::invalid("s", format!("selection coefficient must be finite and > -1, got {sel}")));
        }
        for (name, mu) in [("mu1", mu_a_to_small), ("mu2", mu_small_to_a)] {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::invalid(name, format!("mutation probability must lie in [0, 1], got {mu}")));
            }
        }
        Ok(Self {
            n_pop,
            sel,
            mu_a_to_small,
            mu_small_to_a,
        })
    }

    pub fn neutral(n_pop: u32) -> Result<Self> {
        Self::new(n_pop, 0.0, 0.0, 0.0)
    }

    /// Selection without mutation.
    pub fn with_selection(n_pop: u32, sel: f64) -> Result<Self> {
        Self::new(n_pop, sel, 0.0, 0.0)
    }

    pub fn n_pop(&self) -> u32 {
        self.n_pop
    }

    pub fn sel(&self) -> f64 {
        self.sel
    }

    pub fn mu_a_to_small(&self) -> f64 {
        self.mu_a_to_small
    }

    pub fn mu_small_to_a(&self) -> f64 {
        self.mu_small_to_a
    }

    /// True when both mutation probabilities are zero, so `0` and `N` absorb.
    pub fn is_mutation_free(&self) -> bool {
        self.mu_a_to_small == 0.0 && self.mu_small_to_a == 0.0
    }

    /// The same population with selection and mutation switched off.
    pub fn neutral_counterpart(&self) -> Self {
        Self {
            sel: 0.0,
            mu_a_to_small: 0.0,
            mu_small_to_a: 0.0,
            ..*self
        }
    }

    /// Validates `i` against this population size.
    pub fn count(&self, i: u32) -> Result<AlleleCount> {
        AlleleCount::new(i, self.n_pop)
    }
}

/// Number of `A` alleles, `0 ≤ count ≤ N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlleleCount(u32);

impl AlleleCount {
    pub fn new(count: u32, n_pop: u32) -> Result<Self> {
        if count > n_pop {
            return Err(Error::invalid("i", format!("allele count {count} exceeds population size {n_pop}")));
        }
        Ok(Self(count))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A distribution over allele counts `{0, …, N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid("weights", "entries must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::invalid("weights", format!("entries sum to {total}, not 1")));
        }
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .0
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| w * w.ln())
            .sum::<f64>()
    }
}

/// `(θ_i, 1 - θ_i)`, both from the common denominator `N + i·s` so neither
/// side loses precision near 0 or 1.
pub fn theta_pair(params: &WfParams, i: AlleleCount) -> (f64, f64) {
    let n = f64::from(params.n_pop);
    let i = f64::from(i.0);
    let a_weight = i * (1.0 + params.sel);
    let small_weight = n - i;
    let denom = a_weight + small_weight;
    let to_a = a_weight * (1.0 - params.mu_a_to_small) + small_weight * params.mu_small_to_a;
    let to_small = a_weight * params.mu_a_to_small + small_weight * (1.0 - params.mu_small_to_a);
    (to_a / denom, to_small / denom)
}

/// Probability that an offspring carries `A`, after selection and mutation.
pub fn theta(params: &WfParams, i: AlleleCount) -> f64 {
    theta_pair(params, i).0
}

/// `(P[A sampled], P[a sampled])` under selection alone; mutation is ignored.
pub fn selection_sampling_probs(params: &WfParams, i: AlleleCount) -> (f64, f64) {
    let n = f64::from(params.n_pop);
    let i = f64::from(i.0);
    let a_weight = i * (1.0 + params.sel);
    let denom = a_weight + (n - i);
    (a_weight / denom, (n - i) / denom)
}

/// `ln P(i → j)`.
pub fn ln_transition_prob(params: &WfParams, i: AlleleCount, j: AlleleCount) -> f64 {
    let (p, q) = theta_pair(params, i);
    binom::ln_pmf(u64::from(j.0), u64::from(params.n_pop), p, q)
}

/// `P(i → j) = C(N,j) θ_i^j (1-θ_i)^(N-j)`.
pub fn transition_prob(params: &WfParams, i: AlleleCount, j: AlleleCount) -> f64 {
    ln_transition_prob(params, i, j).exp()
}

/// Row `i` of the transition matrix.
pub fn transition_row(params: &WfParams, i: AlleleCount) -> ProbVector {
    ProbVector(transition_row_raw(params, i))
}

pub(crate) fn transition_row_raw(params: &WfParams, i: AlleleCount) -> Vec<f64> {
    let (p, q) = theta_pair(params, i);
    let n = u64::from(params.n_pop);
    (0..=n).map(|j| binom::ln_pmf(j, n, p, q).exp()).collect()
}

/// Uniform law on the interior states `{1, …, N-1}`: the maximum-entropy
/// start when both alleles are known to be present. `0` and `N` get weight 0.
pub fn maxent_initial(n_pop: u32) -> Result<ProbVector> {
    if n_pop < 2 {
        return Err(Error::invalid("N", format!("population size must be at least 2, got {n_pop}")));
    }
    let w = 1.0 / f64::from(n_pop - 1);
    let mut weights = vec![w; n_pop as usize + 1];
    weights[0] = 0.0;
    weights[n_pop as usize] = 0.0;
    Ok(ProbVector(weights))
}

/// One generation: a draw from `Bin(N, θ_i)`.
pub fn step<R: Rng + ?Sized>(params: &WfParams, i: AlleleCount, rng: &mut R) -> AlleleCount {
    let (p, q) = theta_pair(params, i);
    if p == 0.0 {
        return AlleleCount(0);
    }
    if q == 0.0 {
        return AlleleCount(params.n_pop);
    }
    let draw = Binomial::new(u64::from(params.n_pop), p)
        .expect("θ lies in (0, 1)")
        .sample(rng);
    AlleleCount(draw as u32)
}

/// Generous default generation cap for forward runs: `20·N`.
pub fn default_max_gens(n_pop: u32) -> u64 {
    20 * u64::from(n_pop)
}

/// A recorded forward run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub counts: Vec<AlleleCount>,
    /// First generation at which an absorbing state was entered, and which
    /// one. Only set for mutation-free chains.
    pub absorbed_at: Option<(u64, AlleleCount)>,
    pub params: WfParams,
    pub seed: u64,
}

impl Trajectory {
    pub fn final_count(&self) -> AlleleCount {
        *self.counts.last().expect("trajectories hold at least the start state")
    }
}

/// Runs the chain from `i0` for at most `max_gens` generations using stream 0
/// of `seed`.
pub fn simulate(
    params: &WfParams,
    i0: AlleleCount,
    max_gens: u64,
    seed: u64,
    stop_on_absorption: bool,
) -> Trajectory {
    let mut rng = substream(seed, 0);
    simulate_with(params, i0, max_gens, &mut rng, seed, stop_on_absorption)
}

pub(crate) fn simulate_with(
    params: &WfParams,
    i0: AlleleCount,
    max_gens: u64,
    rng: &mut Stream,
    seed: u64,
    stop_on_absorption: bool,
) -> Trajectory {
    let n = params.n_pop;
    let absorbing = params.is_mutation_free();
    let is_absorbed = |c: AlleleCount| absorbing && (c.0 == 0 || c.0 == n);

    let mut counts = vec![i0];
    let mut absorbed_at = is_absorbed(i0).then_some((0, i0));
    let mut current = i0;
    for gen in 1..=max_gens {
        if stop_on_absorption && absorbed_at.is_some() {
            break;
        }
        current = step(params, current, rng);
        counts.push(current);
        if absorbed_at.is_none() && is_absorbed(current) {
            absorbed_at = Some((gen, current));
        }
    }
    Trajectory {
        counts,
        absorbed_at,
        params: *params,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};
    use proptest::prelude::*;

    fn params(n: u32, s: f64, mu1: f64, mu2: f64) -> WfParams {
        WfParams::new(n, s, mu1, mu2).unwrap()
    }

    fn rat(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    // θ_i evaluated in exact rational arithmetic on the f64 inputs.
    fn theta_exact(n: u32, s: f64, mu1: f64, mu2: f64, i: u32) -> BigRational {
        let n = BigRational::from_integer(n.into());
        let i = BigRational::from_integer(i.into());
        let one = BigRational::one();
        let a = &i * (&one + rat(s));
        let denom = &a + &n - &i;
        (a * (&one - rat(mu1)) + (&n - &i) * rat(mu2)) / denom
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(WfParams::new(1, 0.0, 0.0, 0.0).is_err());
        assert!(WfParams::new(10, -1.0, 0.0, 0.0).is_err());
        assert!(WfParams::new(10, f64::NAN, 0.0, 0.0).is_err());
        assert!(WfParams::new(10, 0.0, 1.5, 0.0).is_err());
        assert!(WfParams::new(10, 0.0, 0.0, -0.1).is_err());
        assert!(params(10, 0.0, 0.0, 0.0).count(11).is_err());
    }

    #[test]
    fn theta_examples() {
        let p = params(100, 0.0, 0.0, 0.0);
        assert_eq!(theta(&p, p.count(37).unwrap()), 0.37);

        let p = params(100, 0.1, 0.0, 0.0);
        let got = theta(&p, p.count(50).unwrap());
        let exact = theta_exact(100, 0.1, 0.0, 0.0, 50).to_f64().unwrap();
        assert!((got - exact).abs() < 1e-15);
        assert!((got - 0.523_809_523_8).abs() < 1e-10);

        for s in [-0.5, 0.0, 2.0] {
            let p = params(17, s, 0.0, 0.0);
            assert_eq!(theta(&p, p.count(0).unwrap()), 0.0);
        }
    }

    #[test]
    fn neutral_theta_is_exactly_i_over_n() {
        for n in 2..=60u32 {
            let p = WfParams::neutral(n).unwrap();
            for i in 0..=n {
                let exact = BigRational::new(i.into(), n.into());
                assert_eq!(rat(theta(&p, p.count(i).unwrap())), rat(exact.to_f64().unwrap()));
                assert_eq!(theta_exact(n, 0.0, 0.0, 0.0, i), exact);
            }
        }
    }

    #[test]
    fn theta_with_mutation_matches_rational_evaluation() {
        for &(s, mu1, mu2) in &[(0.3, 0.01, 0.02), (-0.4, 0.5, 0.0), (1.5, 0.0, 0.9)] {
            let p = params(23, s, mu1, mu2);
            for i in 0..=23 {
                let exact = theta_exact(23, s, mu1, mu2, i).to_f64().unwrap();
                let (t, c) = theta_pair(&p, p.count(i).unwrap());
                assert!((t - exact).abs() < 1e-15);
                assert!((c - (1.0 - exact)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn selection_sampling_examples() {
        let p = params(10, 0.0, 0.0, 0.0);
        assert_eq!(selection_sampling_probs(&p, p.count(4).unwrap()), (0.4, 0.6));

        let p = params(10, 1.0, 0.0, 0.0);
        let (a, b) = selection_sampling_probs(&p, p.count(4).unwrap());
        assert!((a - 8.0 / 14.0).abs() < 1e-15);
        assert!((b - 6.0 / 14.0).abs() < 1e-15);

        let p = params(10, 0.5, 0.0, 0.0);
        assert_eq!(selection_sampling_probs(&p, p.count(10).unwrap()), (1.0, 0.0));
    }

    #[test]
    fn transition_prob_examples() {
        let p = WfParams::neutral(2).unwrap();
        let c = |i| p.count(i).unwrap();
        assert!((transition_prob(&p, c(1), c(1)) - 0.5).abs() < 1e-15);
        let row = transition_row(&p, c(1));
        for (got, want) in row.as_slice().iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }

        let p = params(7, 0.3, 0.2, 0.0);
        assert_eq!(transition_prob(&p, p.count(0).unwrap(), p.count(0).unwrap()), 1.0);
        let p = WfParams::neutral(3).unwrap();
        assert_eq!(transition_prob(&p, p.count(3).unwrap(), p.count(3).unwrap()), 1.0);

        let p = params(9, -0.2, 0.0, 0.4);
        let row = transition_row(&p, p.count(9).unwrap());
        assert!(row.as_slice()[..9].iter().all(|&w| w == 0.0));
        assert_eq!(row.as_slice()[9], 1.0);

        let p = params(4, 0.2, 0.0, 0.0);
        let s: f64 = transition_row(&p, p.count(2).unwrap()).as_slice().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transition_prob_matches_exact_binomial_at_small_n() {
        let p = params(12, 0.25, 0.05, 0.01);
        for i in 0..=12 {
            let th = theta_exact(12, 0.25, 0.05, 0.01, i);
            let one = BigRational::one();
            for j in 0..=12u32 {
                let mut choose = BigRational::one();
                for m in 0..j {
                    choose = choose * BigRational::from_integer((12 - m).into())
                        / BigRational::from_integer((m + 1).into());
                }
                let mut pmf = choose;
                for _ in 0..j {
                    pmf *= &th;
                }
                for _ in j..12 {
                    pmf *= &one - &th;
                }
                let want = pmf.to_f64().unwrap();
                let got = transition_prob(&p, p.count(i).unwrap(), p.count(j).unwrap());
                assert!((got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-300, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn maxent_initial_examples() {
        assert_eq!(maxent_initial(3).unwrap().as_slice(), &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(maxent_initial(2).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        let w = maxent_initial(11).unwrap();
        assert_eq!(w.len(), 12);
        assert!(w.as_slice()[1..11].iter().all(|&x| (x - 0.1).abs() < 1e-16));
        assert!(maxent_initial(1).is_err());
    }

    #[test]
    fn maxent_initial_has_maximal_entropy() {
        for n in [2u32, 3, 10, 257] {
            let h = maxent_initial(n).unwrap().entropy();
            assert!((h - f64::from(n - 1).ln()).abs() < 1e-12);
        }
        // Any perturbation on the interior lowers it.
        let mut w = maxent_initial(5).unwrap().into_vec();
        w[1] += 0.05;
        w[2] -= 0.05;
        assert!(ProbVector::new(w).unwrap().entropy() < 4f64.ln());
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn step_boundaries() {
        let mut rng = substream(1, 0);
        let p = params(30, 0.4, 0.1, 0.0);
        for _ in 0..100 {
            assert_eq!(step(&p, p.count(0).unwrap(), &mut rng).get(), 0);
        }
        let p = params(30, -0.4, 0.0, 0.3);
        for _ in 0..100 {
            assert_eq!(step(&p, p.count(30).unwrap(), &mut rng).get(), 30);
        }
    }

    #[test]
    fn step_mean_matches_binomial_moment() {
        let p = WfParams::neutral(50).unwrap();
        let i = p.count(25).unwrap();
        let mut rng = substream(2024, 0);
        let draws = 100_000;
        let total: u64 = (0..draws).map(|_| u64::from(step(&p, i, &mut rng).get())).sum();
        let mean = total as f64 / draws as f64;
        // Var = N θ (1-θ) = 12.5 per draw.
        let sigma = (12.5f64 / draws as f64).sqrt();
        assert!((mean - 25.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn simulate_boundaries_and_absorption() {
        let p = WfParams::neutral(20).unwrap();
        let t = simulate(&p, p.count(0).unwrap(), 50, 3, false);
        assert_eq!(t.counts.len(), 51);
        assert!(t.counts.iter().all(|c| c.get() == 0));
        assert_eq!(t.absorbed_at, Some((0, p.count(0).unwrap())));

        let t = simulate(&p, p.count(20).unwrap(), 50, 3, true);
        assert_eq!(t.counts, vec![p.count(20).unwrap()]);

        let t = simulate(&p, p.count(10).unwrap(), 10_000, 9, false);
        let (gen, state) = t.absorbed_at.expect("neutral N=20 absorbs well within the cap");
        assert!(state.get() == 0 || state.get() == 20);
        assert!(t.counts[gen as usize..].iter().all(|&c| c == state));
    }

    #[test]
    fn simulate_neutral_fixation_frequency() {
        let p = WfParams::neutral(20).unwrap();
        let reps = 10_000u64;
        let fixed = (0..reps)
            .filter(|&r| {
                let t = simulate(&p, p.count(10).unwrap(), default_max_gens(20), r, true);
                matches!(t.absorbed_at, Some((_, c)) if c.get() == 20)
            })
            .count();
        let frac = fixed as f64 / reps as f64;
        let sigma = (0.25 / reps as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * sigma, "fraction {frac}");
    }

    #[test]
    fn simulate_is_reproducible() {
        let p = params(40, 0.05, 0.01, 0.01);
        let a = simulate(&p, p.count(5).unwrap(), 500, 77, false);
        let b = simulate(&p, p.count(5).unwrap(), 500, 77, false);
        assert_eq!(a, b);
        assert_eq!(a.absorbed_at, None);
    }

    proptest! {
        #[test]
        fn rows_sum_to_one(n in 2u32..400, s in -0.9f64..3.0, mu1 in 0.0f64..1.0, mu2 in 0.0f64..1.0, frac in 0.0f64..=1.0) {
            let p = params(n, s, mu1, mu2);
            let i = p.count((frac * f64::from(n)).round() as u32).unwrap();
            let total: f64 = transition_row(&p, i).as_slice().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "sum {}", total);
        }

        #[test]
        fn theta_monotone_in_selection(n in 2u32..500, frac in 0.0f64..1.0, s1 in -0.99f64..5.0, s2 in -0.99f64..5.0) {
            let i = 1 + ((frac * f64::from(n - 1)) as u32).min(n - 2);
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let a = params(n, lo, 0.0, 0.0);
            let b = params(n, hi, 0.0, 0.0);
            prop_assert!(theta(&a, a.count(i).unwrap()) <= theta(&b, b.count(i).unwrap()));
        }

        #[test]
        fn sampling_probs_sum_and_match_theta(n in 2u32..10_000, frac in 0.0f64..=1.0, s in -0.99f64..5.0) {
            let p = params(n, s, 0.0, 0.0);
            let i = p.count((frac * f64::from(n)).round() as u32).unwrap();
            let (a, b) = selection_sampling_probs(&p, i);
            prop_assert!((a + b - 1.0).abs() <= 1e-15);
            prop_assert_eq!(a, theta(&p, i));
        }

        #[test]
        fn absorbing_states_without_mutation(n in 2u32..2000, s in -0.99f64..5.0) {
            let p = params(n, s, 0.0, 0.0);
            let zero = p.count(0).unwrap();
            let full = p.count(n).unwrap();
            prop_assert_eq!(transition_prob(&p, zero, zero), 1.0);
            prop_assert_eq!(transition_prob(&p, full, full), 1.0);
        }
    }
}
