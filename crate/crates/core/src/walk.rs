//! The down-up walk on size-`d` sets weighted by `f`.
//!
//! From `S`, drop a uniform `i ∈ S`, then move to `S − i + j` (possibly
//! `j = i`) with probability proportional to `f(S − i + j)`. The stationary
//! distribution is `μ(S) ∝ f(S)`; reversibility is verified on every exact
//! transition matrix.
//!
//! Randomness comes from ChaCha20 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64`; chain `k` of a batch uses stream `k`. Draws are exact:
//! weights are scaled to integers and a uniform integer below their total
//! selects the move.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rational::{bit_size, Rational};
use crate::setfn::SetFunctionTable;
use crate::subset::{subsets_of_size, Subset};

/// Largest support for [`transition_matrix`].
pub const TRANSITION_CAP: usize = 5000;
/// Largest support for [`mixing_time_exact`].
pub const MIXING_CAP: usize = 2000;
/// Steps after which [`mixing_time_exact`] gives up.
pub const MAX_MIXING_STEPS: usize = 1_000_000;
/// Default entry size (bits) above which powering switches to binary64.
pub const DEFAULT_BIT_CAP: u64 = 4096;
/// Slack for the monotonicity check once powering runs in binary64.
pub const FLOAT_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct WalkInstance {
    n: usize,
    d: usize,
    f: SetFunctionTable,
    support: Vec<Subset>,
    index: HashMap<Subset, usize>,
    total: Rational,
}

impl WalkInstance {
    pub fn new(f: &SetFunctionTable, d: usize) -> Result<Self> {
        if d == 0 || d > f.n() {
            return Err(Error::Malformed(format!("walk degree d = {d} outside 1..={}", f.n())));
        }
        let support: Vec<Subset> = subsets_of_size(f.ground(), d)
            .into_iter()
            .filter(|s| f.get(*s).is_positive())
            .collect();
        if support.is_empty() {
            return Err(Error::Malformed(format!("f vanishes on every set of size {d}")));
        }
        let index = support.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        let total = support.iter().fold(Rational::zero(), |acc, s| acc + f.get(*s));
        Ok(WalkInstance {
            n: f.n(),
            d,
            f: f.clone(),
            support,
            index,
            total,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Support states in size-then-lexicographic order.
    pub fn support(&self) -> &[Subset] {
        &self.support
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn weight(&self, s: Subset) -> &Rational {
        self.f.get(s)
    }

    /// `μ(S) = f(S) / Σ f`.
    pub fn mu(&self, s: Subset) -> Rational {
        if self.index.contains_key(&s) {
            self.f.get(s) / &self.total
        } else {
            Rational::zero()
        }
    }

    pub fn stationary(&self) -> Vec<Rational> {
        self.support.iter().map(|s| self.mu(*s)).collect()
    }

    fn require(&self, s: Subset) -> Result<usize> {
        self.index_of(s).ok_or(Error::NotInSupport(s))
    }

    /// Candidates `S − i + j` for `j ∉ S − i`, with their weights.
    fn up_moves(&self, down: Subset) -> impl Iterator<Item = (Subset, &Rational)> + '_ {
        Subset::full(self.n)
            .difference(down)
            .iter()
            .map(move |j| down.with(j))
            .filter(|t| self.index.contains_key(t))
            .map(|t| (t, self.f.get(t)))
    }
}

/// One down-up transition.
pub fn step<R: Rng + ?Sized>(w: &WalkInstance, s: Subset, rng: &mut R) -> Result<Subset> {
    w.require(s)?;
    let members: Vec<usize> = s.iter().collect();
    let down = s.without(members[rng.gen_range(0..members.len())]);
    let moves: Vec<(Subset, &Rational)> = w.up_moves(down).collect();
    let denom = moves.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = moves.iter().map(|(_, v)| v.numer() * (&denom / v.denom())).collect();
    let total: BigInt = scaled.iter().sum();
    if !total.is_positive() {
        return Err(Error::StuckState(s));
    }
    let total = total.to_biguint().expect("positive");
    let mut pick = BigInt::from(rng.gen_biguint_below(&total));
    for ((t, _), v) in moves.iter().zip(&scaled) {
        if pick < *v {
            return Ok(*t);
        }
        pick -= v;
    }
    unreachable!("draw is below the total weight")
}

/// Sparse exact transition matrix over the support states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, Rational)>>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Nonzero entries of row `i`, by increasing column.
    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `v P` for a row vector `v`.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (vi, row) in v.iter().zip(&self.rows) {
            if vi.is_zero() {
                continue;
            }
            for (j, p) in row {
                out[*j] += vi * p;
            }
        }
        out
    }

    fn apply_f64(&self, v: &[f64], probs: &[Vec<(usize, f64)>]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (vi, row) in v.iter().zip(probs) {
            if *vi == 0.0 {
                continue;
            }
            for (j, p) in row {
                out[*j] += vi * p;
            }
        }
        out
    }
}

/// Exact `P`, with row sums and detailed balance `f(S)P(S,T) = f(T)P(T,S)`
/// verified before return.
pub fn transition_matrix(w: &WalkInstance) -> Result<TransitionMatrix> {
    let states = w.support.len();
    if states > TRANSITION_CAP {
        return Err(Error::CapExceeded {
            what: "walk support",
            got: states,
            cap: TRANSITION_CAP,
        });
    }
    let d = Rational::from_integer(BigInt::from(w.d));
    let rows = par::map(&w.support, |&s| {
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for i in s.iter() {
            let down = s.without(i);
            let moves: Vec<(Subset, &Rational)> = w.up_moves(down).collect();
            let total = moves.iter().fold(Rational::zero(), |acc, (_, v)| acc + *v);
            if !total.is_positive() {
                return Err(Error::StuckState(s));
            }
            let scale = (&d * &total).recip();
            for (t, v) in moves {
                *row.entry(w.index[&t]).or_insert_with(Rational::zero) += v * &scale;
            }
        }
        Ok(row.into_iter().filter(|(_, p)| !p.is_zero()).collect::<Vec<_>>())
    });
    let p = TransitionMatrix {
        rows: rows.into_iter().collect::<Result<_>>()?,
    };
    for (i, row) in p.rows.iter().enumerate() {
        let sum = row.iter().fold(Rational::zero(), |acc, (_, v)| acc + v);
        if !sum.is_one() {
            return Err(Error::VerificationFailure(format!(
                "row {} sums to {sum}",
                w.support[i]
            )));
        }
        for (j, pij) in row {
            let lhs = w.weight(w.support[i]) * pij;
            let rhs = w.weight(w.support[*j]) * p.get(*j, i);
            if lhs != rhs {
                return Err(Error::BalanceViolation(w.support[i], w.support[*j]));
            }
        }
    }
    Ok(p)
}

/// States reachable from the first support state by single swaps staying in
/// the support cover the whole support.
pub fn is_irreducible(w: &WalkInstance) -> bool {
    let mut seen = vec![false; w.support.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(k) = queue.pop_front() {
        let s = w.support[k];
        for i in s.iter() {
            for (t, _) in w.up_moves(s.without(i)) {
                let j = w.index[&t];
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    seen.into_iter().all(|b| b)
}

/// `½ Σ |p − q|`.
pub fn tv_distance(p: &[Rational], q: &[Rational]) -> Rational {
    p.iter()
        .zip(q)
        .fold(Rational::zero(), |acc, (a, b)| acc + (a - b).abs())
        / Rational::from_integer(BigInt::from(2))
}

fn tv_f64(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub t_mix: usize,
    /// `t_mix / (d ln(d/ε))`.
    pub ratio: f64,
    /// `max_{S_0} TV(P^t(S_0, ·), μ)` for `t = 0..=t_mix`.
    pub tv_curve: Vec<f64>,
    /// Number of powering steps carried out in exact arithmetic.
    pub exact_steps: usize,
    /// The maximal TV distance never increased along the curve.
    pub monotone: bool,
}

pub fn mixing_time_exact(w: &WalkInstance, epsilon: f64) -> Result<MixingReport> {
    mixing_time_exact_with(w, epsilon, DEFAULT_BIT_CAP)
}

/// Smallest `t` with `max_{S_0} TV(P^t(S_0, ·), μ) ≤ ε`, by powering every
/// start distribution in lock-step. Exact until some entry exceeds
/// `bit_cap` bits, binary64 afterwards.
pub fn mixing_time_exact_with(w: &WalkInstance, epsilon: f64, bit_cap: u64) -> Result<MixingReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Malformed(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    let states = w.support.len();
    if states > MIXING_CAP {
        return Err(Error::CapExceeded {
            what: "walk support for mixing",
            got: states,
            cap: MIXING_CAP,
        });
    }
    let p = transition_matrix(w)?;
    let mu = w.stationary();
    let eps = Rational::from_float(epsilon).expect("finite epsilon");
    let ratio_of = |t: usize| {
        let d = w.d as f64;
        t as f64 / (d * (d / epsilon).ln())
    };

    let mut vectors: Vec<Vec<Rational>> = (0..states)
        .map(|s| {
            (0..states)
                .map(|k| if k == s { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mut tv_curve = Vec::new();
    let mut monotone = true;
    let mut previous: Option<Rational> = None;
    let mut t = 0;
    loop {
        let tv = par::map(&vectors, |v| tv_distance(v, &mu))
            .into_iter()
            .max()
            .expect("nonempty support");
        tv_curve.push(tv.to_f64().unwrap_or(f64::NAN));
        if previous.as_ref().is_some_and(|prev| tv > *prev) {
            monotone = false;
        }
        if tv <= eps {
            return Ok(MixingReport {
                t_mix: t,
                ratio: ratio_of(t),
                tv_curve,
                exact_steps: t,
                monotone,
            });
        }
        previous = Some(tv);
        let too_big = vectors.iter().flatten().any(|v| bit_size(v) > bit_cap);
        if too_big {
            break;
        }
        if t == MAX_MIXING_STEPS {
            return Err(Error::NoConvergence(t));
        }
        t += 1;
        let next = par::map(&vectors, |v| p.apply(v));
        if next == vectors {
            return Err(Error::NoConvergence(t));
        }
        vectors = next;
    }

    let exact_steps = t;
    let probs: Vec<Vec<(usize, f64)>> = p
        .rows
        .iter()
        .map(|r| r.iter().map(|(j, v)| (*j, v.to_f64().unwrap_or(0.0))).collect())
        .collect();
    let mu_f: Vec<f64> = mu.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
    let mut floats: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    drop(vectors);
    let mut prev = *tv_curve.last().expect("at least one entry");
    while t < MAX_MIXING_STEPS {
        t += 1;
        let next: Vec<Vec<f64>> = par::map(&floats, |v| p.apply_f64(v, &probs));
        let stalled = next == floats;
        floats = next;
        let tv = floats.iter().map(|v| tv_f64(v, &mu_f)).fold(0.0, f64::max);
        tv_curve.push(tv);
        if tv > prev + FLOAT_SLACK {
            monotone = false;
        }
        if tv <= epsilon {
            return Ok(MixingReport {
                t_mix: t,
                ratio: ratio_of(t),
                tv_curve,
                exact_steps,
                monotone,
            });
        }
        if stalled {
            break;
        }
        prev = tv;
    }
    Err(Error::NoConvergence(t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainSample {
    pub start: Subset,
    pub final_state: Subset,
    pub steps: usize,
    /// Visit counts of `X_1, …, X_t`.
    pub histogram: BTreeMap<Subset, u64>,
}

impl ChainSample {
    /// TV distance between the empirical histogram and `μ`.
    pub fn tv_to_stationary(&self, w: &WalkInstance) -> f64 {
        if self.steps == 0 {
            return f64::NAN;
        }
        let t = self.steps as f64;
        0.5 * w
            .support
            .iter()
            .map(|s| {
                let emp = self.histogram.get(s).copied().unwrap_or(0) as f64 / t;
                (emp - w.mu(*s).to_f64().unwrap_or(0.0)).abs()
            })
            .sum::<f64>()
    }
}

fn run_chain(w: &WalkInstance, start: Subset, steps: usize, rng: &mut ChaCha20Rng) -> Result<ChainSample> {
    w.require(start)?;
    let mut state = start;
    let mut histogram = BTreeMap::new();
    for _ in 0..steps {
        state = step(w, state, rng)?;
        *histogram.entry(state).or_insert(0) += 1;
    }
    Ok(ChainSample {
        start,
        final_state: state,
        steps,
        histogram,
    })
}

/// One reproducible trajectory of `steps` transitions.
pub fn sample_chain(w: &WalkInstance, start: Subset, steps: usize, seed: u64) -> Result<ChainSample> {
    run_chain(w, start, steps, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// Independent chains; chain `k` uses stream `k` of the seeded generator.
pub fn sample_chains(w: &WalkInstance, starts: &[Subset], steps: usize, seed: u64) -> Result<Vec<ChainSample>> {
    let indexed: Vec<(u64, Subset)> = starts.iter().enumerate().map(|(k, s)| (k as u64, *s)).collect();
    par::map(&indexed, |(k, s)| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(*k);
        run_chain(w, *s, steps, &mut rng)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn pairs_of_three() -> WalkInstance {
        let f = SetFunctionTable::from_fn(3, |s| if s.len() == 2 { int(1) } else { int(0) }).unwrap();
        WalkInstance::new(&f, 2).unwrap()
    }

    #[test]
    fn uniform_pairs_matrix() {
        let w = pairs_of_three();
        let p = transition_matrix(&w).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), if i == j { frac(1, 2) } else { frac(1, 4) });
            }
        }
    }

    #[test]
    fn degree_one_is_one_step() {
        let f = SetFunctionTable::from_fn(3, |s| int(s.bits() as i64)).unwrap();
        let w = WalkInstance::new(&f, 1).unwrap();
        let p = transition_matrix(&w).unwrap();
        let mu = w.stationary();
        assert_eq!(mu, vec![frac(1, 7), frac(2, 7), frac(4, 7)]);
        for i in 0..3 {
            for (j, m) in mu.iter().enumerate() {
                assert_eq!(&p.get(i, j), m);
            }
        }
        assert!(mixing_time_exact(&w, 0.001).unwrap().t_mix <= 1);
    }

    #[test]
    fn single_state() {
        let f = SetFunctionTable::from_fn(3, |s| if s.bits() == 0b011 { int(1) } else { int(0) }).unwrap();
        let w = WalkInstance::new(&f, 2).unwrap();
        assert_eq!(transition_matrix(&w).unwrap().to_dense(), vec![vec![int(1)]]);
        assert_eq!(mixing_time_exact(&w, 0.5).unwrap().t_mix, 0);
        let s = sample_chain(&w, Subset(0b011), 50, 7).unwrap();
        assert_eq!(s.final_state, Subset(0b011));
    }

    #[test]
    fn uniform_pairs_mixing() {
        let w = pairs_of_three();
        let r = mixing_time_exact(&w, 0.01).unwrap();
        // TV from a point mass is (2/3)(1/4)^t: 1/96 > 1/100 at t = 3.
        assert_eq!(r.t_mix, 4);
        assert!(r.monotone);
        assert!((r.tv_curve[3] - 2.0 / 3.0 / 64.0).abs() < 1e-15);
        assert!((r.ratio - 4.0 / (2.0 * (200.0f64).ln())).abs() < 1e-12);
    }

    #[test]
    fn float_phase_agrees() {
        let w = pairs_of_three();
        let r = mixing_time_exact_with(&w, 0.01, 0).unwrap();
        assert_eq!((r.t_mix, r.exact_steps), (4, 0));
    }

    #[test]
    fn reducible_chain_does_not_converge() {
        // {1,2} and {3,4} share no element, so no single swap connects them.
        let f = SetFunctionTable::from_fn(4, |s| {
            if s.bits() == 0b0011 || s.bits() == 0b1100 {
                int(1)
            } else {
                int(0)
            }
        })
        .unwrap();
        let w = WalkInstance::new(&f, 2).unwrap();
        assert!(!is_irreducible(&w));
        assert!(matches!(mixing_time_exact(&w, 0.1), Err(Error::NoConvergence(_))));
        assert!(is_irreducible(&pairs_of_three()));
    }

    #[test]
    fn sampling_is_reproducible() {
        let w = pairs_of_three();
        let a = sample_chain(&w, Subset(0b011), 200, 42).unwrap();
        let b = sample_chain(&w, Subset(0b011), 200, 42).unwrap();
        assert_eq!(a, b);
        let z = sample_chain(&w, Subset(0b011), 0, 42).unwrap();
        assert_eq!(z.final_state, Subset(0b011));
        assert!(z.histogram.is_empty());
        assert!(matches!(
            sample_chain(&w, Subset(0b001), 5, 1),
            Err(Error::NotInSupport(_))
        ));
        let chains = sample_chains(&w, &[Subset(0b011), Subset(0b011)], 100, 42).unwrap();
        assert_ne!(chains[0], chains[1]);
    }

    #[test]
    fn long_chain_approaches_stationary() {
        let w = pairs_of_three();
        let s = sample_chain(&w, Subset(0b011), 100_000, 2024).unwrap();
        assert!(s.tv_to_stationary(&w) <= 0.02);
    }
}
