//! Joint entropy as a set function and its mutual-information weights.
//!
//! Values are binary64 bits. With `x_T = I(Y_T | Y_{T^c})` (recursive
//! multivariate mutual information) the identity
//! `H(Y_S) = Σ_{T∩S≠∅} x_T` holds exactly in real arithmetic; here it is
//! checked to a tolerance. Weights can be negative, in which case the
//! entropy function is not a coverage function.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::subset::{Subset, MAX_GROUND};

/// Tolerance for the numeric identities.
pub const TOLERANCE: f64 = 1e-9;
/// Allowed deviation of the total probability from 1.
pub const PMF_SLACK: f64 = 1e-12;
/// Largest number of variables for [`entropy_decomposition`].
pub const DECOMPOSITION_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    alphabets: Vec<usize>,
    pmf: BTreeMap<Vec<usize>, f64>,
}

impl JointDistribution {
    /// Outcomes absent from `pmf` have probability zero. Repeated outcomes
    /// are rejected.
    pub fn new(alphabets: Vec<usize>, pmf: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        if alphabets.len() > MAX_GROUND {
            return Err(Error::CapExceeded {
                what: "joint distribution variables",
                got: alphabets.len(),
                cap: MAX_GROUND,
            });
        }
        if alphabets.contains(&0) {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (outcome, p) in pmf {
            if outcome.len() != alphabets.len() {
                return Err(Error::DimensionMismatch {
                    expected: alphabets.len(),
                    got: outcome.len(),
                });
            }
            if outcome.iter().zip(&alphabets).any(|(v, k)| v >= k) {
                return Err(Error::InvalidDistribution(format!(
                    "outcome {outcome:?} outside the alphabets"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!("probability {p} of {outcome:?}")));
            }
            total += p;
            if map.insert(outcome.clone(), p).is_some() {
                return Err(Error::InvalidDistribution(format!("outcome {outcome:?} listed twice")));
            }
        }
        if (total - 1.0).abs() > PMF_SLACK {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(JointDistribution { alphabets, pmf: map })
    }

    pub fn n(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn pmf(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.pmf.iter().map(|(o, p)| (o.as_slice(), *p))
    }

    fn check(&self, s: Subset) -> Result<()> {
        if !s.is_subset_of(Subset::full(self.n())) {
            return Err(Error::InvalidSubset { subset: s, n: self.n() });
        }
        Ok(())
    }

    /// `H(Y_S)` in bits, with `0 log 0 = 0`.
    pub fn entropy(&self, s: Subset) -> Result<f64> {
        self.check(s)?;
        Ok(self.entropy_unchecked(s))
    }

    fn entropy_unchecked(&self, s: Subset) -> f64 {
        let mut marginal: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (outcome, p) in &self.pmf {
            let key = s.iter().map(|i| outcome[i]).collect();
            *marginal.entry(key).or_insert(0.0) += p;
        }
        -marginal
            .values()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }

    /// `H(Y_S)` for every `S`, indexed by bitmask.
    pub fn entropy_table(&self) -> Vec<f64> {
        par::map_range(1 << self.n(), |m| self.entropy_unchecked(Subset(m as u32)))
    }
}

/// `H(Y_S | Y_C) = H(Y_{S∪C}) − H(Y_C)`.
pub fn cond_entropy(j: &JointDistribution, s: Subset, c: Subset) -> Result<f64> {
    if s.intersects(c) {
        return Err(Error::Overlap);
    }
    Ok(j.entropy(s.union(c))? - j.entropy(c)?)
}

/// `I(X_1, …, X_k | Z) = I(X_1, …, X_{k−1} | Z) − I(X_1, …, X_{k−1} | X_k, Z)`
/// with `I(X | Z) = H(X | Z)`.
pub fn mmi(j: &JointDistribution, vars: &[usize], c: Subset) -> Result<f64> {
    let t = validate_vars(vars, c, j.n())?;
    j.check(t.union(c))?;
    Ok(mmi_with(&|s| j.entropy_unchecked(s), vars, c))
}

fn validate_vars(vars: &[usize], c: Subset, n: usize) -> Result<Subset> {
    if vars.is_empty() {
        return Err(Error::Malformed(
            "mutual information needs at least one variable".into(),
        ));
    }
    let mut t = Subset::EMPTY;
    for &v in vars {
        if v >= n || t.contains(v) {
            return Err(Error::Malformed(format!("variable {} repeated or out of range", v + 1)));
        }
        t = t.with(v);
    }
    if t.intersects(c) {
        return Err(Error::Overlap);
    }
    Ok(t)
}

fn mmi_with<H: Fn(Subset) -> f64>(h: &H, vars: &[usize], c: Subset) -> f64 {
    match vars {
        [] => unreachable!("validated nonempty"),
        [x] => {
            let s = Subset::singleton(*x);
            h(s.union(c)) - h(c)
        }
        [rest @ .., last] => mmi_with(h, rest, c) - mmi_with(h, rest, c.with(*last)),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyDecomposition {
    pub n: usize,
    /// `H(Y_S)` indexed by bitmask.
    pub entropy: Vec<f64>,
    /// `x_T = I(Y_T | Y_{T^c})` for nonempty `T`.
    pub weights: BTreeMap<Subset, f64>,
    /// `max_S |H(Y_S) − Σ_{T∩S≠∅} x_T|`.
    pub max_identity_residual: f64,
    /// Largest deviation from the Möbius solution of the entropy table.
    pub max_mobius_deviation: f64,
    pub min_weight: Option<(Subset, f64)>,
    /// Some weight is below `−TOLERANCE`, so the decomposition is not a
    /// coverage representation.
    pub negative_weight: bool,
}

impl EntropyDecomposition {
    pub fn identity_holds(&self) -> bool {
        self.max_identity_residual <= TOLERANCE && self.max_mobius_deviation <= TOLERANCE
    }

    pub fn note(&self) -> Option<&'static str> {
        self.negative_weight.then_some(
            "negative mutual-information weight: the sum identity holds but the weights are not a coverage representation",
        )
    }
}

pub fn entropy_decomposition(j: &JointDistribution) -> Result<EntropyDecomposition> {
    let n = j.n();
    if n > DECOMPOSITION_CAP {
        return Err(Error::CapExceeded {
            what: "entropy decomposition variables",
            got: n,
            cap: DECOMPOSITION_CAP,
        });
    }
    let h = j.entropy_table();
    let lookup = |s: Subset| h[s.index()];
    let size = 1usize << n;
    let x: Vec<f64> = par::map_range(size, |m| {
        if m == 0 {
            return 0.0;
        }
        let t = Subset(m as u32);
        let vars: Vec<usize> = t.iter().collect();
        mmi_with(&lookup, &vars, t.complement(n))
    });

    // z(U) = Σ_{T⊆U} x_T; then Σ_{T∩S≠∅} x_T = z(full) − z(S^c).
    let mut z = x.clone();
    for i in 0..n {
        for m in 0..size {
            if m >> i & 1 == 1 {
                z[m] += z[m ^ (1 << i)];
            }
        }
    }
    let full = size - 1;
    let max_identity_residual = (0..size)
        .map(|m| (h[m] - (z[full] - z[full ^ m])).abs())
        .fold(0.0, f64::max);

    let mut mobius: Vec<f64> = (0..size).map(|m| h[full] - h[full ^ m]).collect();
    for i in 0..n {
        for m in 0..size {
            if m >> i & 1 == 1 {
                mobius[m] -= mobius[m ^ (1 << i)];
            }
        }
    }
    let max_mobius_deviation = (1..size).map(|m| (x[m] - mobius[m]).abs()).fold(0.0, f64::max);

    let weights: BTreeMap<Subset, f64> = (1..size).map(|m| (Subset(m as u32), x[m])).collect();
    let min_weight = weights.iter().min_by(|a, b| a.1.total_cmp(b.1)).map(|(t, v)| (*t, *v));
    Ok(EntropyDecomposition {
        n,
        negative_weight: min_weight.is_some_and(|(_, v)| v < -TOLERANCE),
        entropy: h,
        weights,
        max_identity_residual,
        max_mobius_deviation,
        min_weight,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FloatPredicates {
    pub monotone: bool,
    pub submodular: bool,
}

/// Monotonicity and submodularity of a real table indexed by bitmask, each
/// inequality allowed to fail by at most `slack`.
pub fn float_predicates(f: &[f64], n: usize, slack: f64) -> FloatPredicates {
    let size = 1usize << n;
    let mut monotone = true;
    let mut submodular = true;
    for m in 0..size {
        for i in (0..n).filter(|i| m >> i & 1 == 0) {
            let mi = m | 1 << i;
            if f[mi] < f[m] - slack {
                monotone = false;
            }
            for j in (i + 1..n).filter(|j| m >> j & 1 == 0) {
                let mj = m | 1 << j;
                if f[mi] + f[mj] < f[mi | mj] + f[m] - slack {
                    submodular = false;
                }
            }
        }
    }
    FloatPredicates { monotone, submodular }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TOLERANCE
    }

    fn fair_bits() -> JointDistribution {
        let pmf = (0..4).map(|k| (vec![k & 1, k >> 1], 0.25)).collect();
        JointDistribution::new(vec![2, 2], pmf).unwrap()
    }

    pub(crate) fn xor_triple() -> JointDistribution {
        let pmf = (0..4)
            .map(|k| (vec![k & 1, k >> 1, (k & 1) ^ (k >> 1)], 0.25))
            .collect();
        JointDistribution::new(vec![2, 2, 2], pmf).unwrap()
    }

    #[test]
    fn conditional_entropy_examples() {
        let j = fair_bits();
        assert!(close(j.entropy(Subset::singleton(0)).unwrap(), 1.0));
        assert!(close(
            cond_entropy(&j, Subset::singleton(0), Subset::singleton(1)).unwrap(),
            1.0
        ));
        assert!(matches!(
            cond_entropy(&j, Subset::singleton(0), Subset::singleton(0)),
            Err(Error::Overlap)
        ));
        let x = xor_triple();
        assert!(close(
            cond_entropy(&x, Subset::singleton(2), Subset(0b011)).unwrap(),
            0.0
        ));
    }

    #[test]
    fn mmi_examples() {
        let j = fair_bits();
        assert!(close(mmi(&j, &[0, 1], Subset::EMPTY).unwrap(), 0.0));
        assert!(close(mmi(&j, &[0], Subset::singleton(1)).unwrap(), 1.0));
        let x = xor_triple();
        for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            assert!(close(mmi(&x, &order, Subset::EMPTY).unwrap(), -1.0));
        }
        assert!(mmi(&x, &[], Subset::EMPTY).is_err());
        assert!(mmi(&x, &[0, 0], Subset::EMPTY).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = entropy_decomposition(&fair_bits()).unwrap();
        assert!(close(d.weights[&Subset(0b01)], 1.0));
        assert!(close(d.weights[&Subset(0b10)], 1.0));
        assert!(close(d.weights[&Subset(0b11)], 0.0));
        assert!(d.identity_holds() && !d.negative_weight);

        let d = entropy_decomposition(&xor_triple()).unwrap();
        for i in 0..3 {
            assert!(close(d.weights[&Subset::singleton(i)], 0.0));
        }
        for t in [0b011, 0b101, 0b110] {
            assert!(close(d.weights[&Subset(t)], 1.0));
        }
        assert!(close(d.weights[&Subset(0b111)], -1.0));
        assert!(d.identity_holds() && d.negative_weight && d.note().is_some());
        assert_eq!(d.min_weight.unwrap().0, Subset(0b111));
    }

    #[test]
    fn constant_variables() {
        let j = JointDistribution::new(vec![3, 1], vec![(vec![2, 0], 1.0)]).unwrap();
        let d = entropy_decomposition(&j).unwrap();
        assert!(d.entropy.iter().all(|h| close(*h, 0.0)));
        assert!(d.weights.values().all(|x| close(*x, 0.0)));
    }

    #[test]
    fn invalid_distributions() {
        assert!(JointDistribution::new(vec![2], vec![(vec![0], 0.5)]).is_err());
        assert!(JointDistribution::new(vec![2], vec![(vec![2], 1.0)]).is_err());
        assert!(JointDistribution::new(vec![2], vec![(vec![0], 1.5), (vec![1], -0.5)]).is_err());
        assert!(JointDistribution::new(vec![2], vec![(vec![0], 0.5), (vec![0], 0.5)]).is_err());
    }

    #[test]
    fn entropy_is_monotone_submodular() {
        let h = xor_triple().entropy_table();
        assert_eq!(
            float_predicates(&h, 3, TOLERANCE),
            FloatPredicates {
                monotone: true,
                submodular: true
            }
        );
        let bad = [0.0, 1.0, 1.0, 3.0];
        assert!(!float_predicates(&bad, 2, TOLERANCE).submodular);
    }
}
