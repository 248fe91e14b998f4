//! Set-function tables and the representations that materialize into them.
//!
//! A [`SetFunctionTable`] stores `f(S)` for every `S ⊆ [n]`, indexed by the
//! subset bitmask, with exact nonnegative rational values and `f(∅) = 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::rational::Rational;
use crate::subset::{Subset, MAX_GROUND};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctionTable {
    n: usize,
    values: Vec<Rational>,
}

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::CapExceeded {
            what: "ground set",
            got: n,
            cap: MAX_GROUND,
        });
    }
    Ok(())
}

impl SetFunctionTable {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_cap(n)?;
        if values.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: values.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(Error::Malformed("f(∅) must be 0".into()));
        }
        if let Some(pos) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeInput(format!(
                "f({}) = {}",
                Subset(pos as u32),
                values[pos]
            )));
        }
        Ok(SetFunctionTable { n, values })
    }

    /// Tabulates `value` over all subsets; the value at ∅ is forced to 0.
    pub fn from_fn<F>(n: usize, value: F) -> Result<Self>
    where
        F: Fn(Subset) -> Rational + Sync + Send,
    {
        check_cap(n)?;
        let values = par::map_range(1 << n, |m| {
            if m == 0 {
                Rational::zero()
            } else {
                value(Subset(m as u32))
            }
        });
        SetFunctionTable::new(n, values)
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_cap(n)?;
        Ok(SetFunctionTable {
            n,
            values: vec![Rational::zero(); 1 << n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn get(&self, s: Subset) -> &Rational {
        &self.values[s.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Largest `|S|` with `f(S) ≠ 0` (0 for the zero function).
    pub fn degree(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, _)| (m as u32).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Nonzero entries `(S, f(S))` in increasing mask order.
    pub fn support(&self) -> impl Iterator<Item = (Subset, &Rational)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| (Subset(m as u32), v))
    }
}

/// Anything that can be tabulated exhaustively over `2^[n]`.
pub trait SetFunction {
    fn ground_size(&self) -> usize;
    fn materialize(&self) -> Result<SetFunctionTable>;
}

impl SetFunction for SetFunctionTable {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn materialize(&self) -> Result<SetFunctionTable> {
        Ok(self.clone())
    }
}

pub fn materialize<F: SetFunction + ?Sized>(repr: &F) -> Result<SetFunctionTable> {
    repr.materialize()
}

/// `f(T) = w(⋃_{i∈T} A_i)` over a weighted finite universe.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageInstance {
    ids: Vec<String>,
    weights: Vec<Rational>,
    sets: Vec<Vec<usize>>,
}

impl CoverageInstance {
    /// `universe` lists `(id, weight)`; each entry of `sets` lists element ids.
    pub fn new(universe: Vec<(String, Rational)>, sets: Vec<Vec<String>>) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut ids = Vec::with_capacity(universe.len());
        let mut weights = Vec::with_capacity(universe.len());
        for (k, (id, w)) in universe.into_iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeInput(format!("weight of {id} is {w}")));
            }
            if index.insert(id.clone(), k).is_some() {
                return Err(Error::Malformed(format!("duplicate universe element {id}")));
            }
            ids.push(id);
            weights.push(w);
        }
        let sets = sets
            .into_iter()
            .map(|set| {
                let mut members: Vec<usize> = set
                    .iter()
                    .map(|id| {
                        index
                            .get(id)
                            .copied()
                            .ok_or_else(|| Error::Malformed(format!("unknown element {id}")))
                    })
                    .collect::<Result<_>>()?;
                members.sort_unstable();
                members.dedup();
                Ok(members)
            })
            .collect::<Result<Vec<_>>>()?;
        check_cap(sets.len())?;
        Ok(CoverageInstance { ids, weights, sets })
    }

    /// Convenience constructor from universe weights and index-based sets.
    pub fn from_indices(weights: Vec<Rational>, sets: Vec<Vec<usize>>) -> Result<Self> {
        let universe = weights
            .into_iter()
            .enumerate()
            .map(|(k, w)| (format!("u{k}"), w))
            .collect();
        let sets = sets
            .into_iter()
            .map(|s| s.into_iter().map(|k| format!("u{k}")).collect())
            .collect();
        CoverageInstance::new(universe, sets)
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn universe_size(&self) -> usize {
        self.ids.len()
    }

    pub fn universe(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.ids.iter().map(String::as_str).zip(&self.weights)
    }

    /// Members of `A_i` as universe indices.
    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn value(&self, s: Subset) -> Rational {
        let mut covered = vec![false; self.ids.len()];
        for i in s.iter() {
            for &u in &self.sets[i] {
                covered[u] = true;
            }
        }
        covered
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| **c)
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    /// For each universe element, the set `{i : u ∈ A_i}` of sets covering it.
    pub fn element_footprints(&self) -> Vec<Subset> {
        let mut foot = vec![Subset::EMPTY; self.ids.len()];
        for (i, set) in self.sets.iter().enumerate() {
            for &u in set {
                foot[u] = foot[u].with(i);
            }
        }
        foot
    }

    /// The coverage weights `x_T = Σ_{u : footprint(u) = T} w(u)`.
    pub fn coverage_weights(&self) -> CoverageWeights {
        let mut weights = BTreeMap::new();
        for (foot, w) in self.element_footprints().into_iter().zip(&self.weights) {
            if !foot.is_empty() && !w.is_zero() {
                *weights.entry(foot).or_insert_with(Rational::zero) += w;
            }
        }
        CoverageWeights { n: self.n(), weights }
    }
}

impl SetFunction for CoverageInstance {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn materialize(&self) -> Result<SetFunctionTable> {
        SetFunctionTable::from_fn(self.n(), |s| self.value(s))
    }
}

/// Nonnegative weights `x_T` on nonempty subsets; `f(S) = Σ_{T∩S≠∅} x_T`.
///
/// Negative weights are representable so that the Möbius solution of an
/// arbitrary table can be reported; [`CoverageWeights::is_nonnegative`]
/// distinguishes certificates from diagnostics.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoverageWeights {
    pub n: usize,
    pub weights: BTreeMap<Subset, Rational>,
}

impl CoverageWeights {
    pub fn new(n: usize) -> Self {
        CoverageWeights {
            n,
            weights: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, t: Subset, x: Rational) {
        if t.is_empty() || x.is_zero() {
            return;
        }
        let slot = self.weights.entry(t).or_insert_with(Rational::zero);
        *slot += x;
        if slot.is_zero() {
            self.weights.remove(&t);
        }
    }

    pub fn get(&self, t: Subset) -> Rational {
        self.weights.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|x| !x.is_negative())
    }

    pub fn min_weight(&self) -> Option<&Rational> {
        self.weights.values().min()
    }

    /// `Σ_{T ∩ S ≠ ∅} x_T` for a single set.
    pub fn value(&self, s: Subset) -> Rational {
        self.weights
            .iter()
            .filter(|(t, _)| t.intersects(s))
            .fold(Rational::zero(), |acc, (_, x)| acc + x)
    }

    pub fn scaled(&self, alpha: &Rational) -> CoverageWeights {
        let mut out = CoverageWeights::new(self.n);
        for (t, x) in &self.weights {
            out.insert(*t, x * alpha);
        }
        out
    }

    pub fn add(&mut self, other: &CoverageWeights) {
        for (t, x) in &other.weights {
            self.insert(*t, x.clone());
        }
    }
}

impl SetFunction for CoverageWeights {
    fn ground_size(&self) -> usize {
        self.n
    }

    /// Uses a subset-sum (zeta) transform: `f(S) = Σ x − Σ_{T ⊆ S^c} x_T`.
    fn materialize(&self) -> Result<SetFunctionTable> {
        check_cap(self.n)?;
        if let Some(t) = self.weights.keys().find(|t| !t.is_subset_of(Subset::full(self.n))) {
            return Err(Error::InvalidSubset { subset: *t, n: self.n });
        }
        if let Some((t, x)) = self.weights.iter().find(|(_, x)| x.is_negative()) {
            return Err(Error::NotCoverage {
                subset: *t,
                weight: x.to_string(),
            });
        }
        let within = subset_sums(self.n, &self.weights);
        let full = Subset::full(self.n);
        let total = within[full.index()].clone();
        let values = (0..1usize << self.n)
            .map(|m| &total - &within[Subset(m as u32).complement(self.n).index()])
            .collect();
        SetFunctionTable::new(self.n, values)
    }
}

/// `z(U) = Σ_{T ⊆ U} x_T` for every `U`.
fn subset_sums(n: usize, weights: &BTreeMap<Subset, Rational>) -> Vec<Rational> {
    let mut z = vec![Rational::zero(); 1 << n];
    for (t, x) in weights {
        z[t.index()] += x;
    }
    for i in 0..n {
        for m in 0..1usize << n {
            if m >> i & 1 == 1 {
                let lower = z[m ^ (1 << i)].clone();
                z[m] += lower;
            }
        }
    }
    z
}

/// `f(T) = Σ_{i∈T} ℓ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunction {
    pub weights: Vec<Rational>,
}

impl LinearFunction {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::NegativeInput(format!("linear weight {w}")));
        }
        Ok(LinearFunction { weights })
    }

    pub fn value(&self, s: Subset) -> Rational {
        s.iter().fold(Rational::zero(), |acc, i| acc + &self.weights[i])
    }
}

impl SetFunction for LinearFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn materialize(&self) -> Result<SetFunctionTable> {
        SetFunctionTable::from_fn(self.weights.len(), |s| self.value(s))
    }
}

/// `f(S) = min{Σ_{i∈S} w_i, b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetAdditive {
    pub weights: Vec<Rational>,
    pub budget: Rational,
}

impl BudgetAdditive {
    pub fn new(weights: Vec<Rational>, budget: Rational) -> Result<Self> {
        if budget.is_negative() || weights.iter().any(|w| w.is_negative()) {
            return Err(Error::NegativeInput("budget-additive parameters".into()));
        }
        Ok(BudgetAdditive { weights, budget })
    }

    pub fn value(&self, s: Subset) -> Rational {
        let sum = s.iter().fold(Rational::zero(), |acc, i| acc + &self.weights[i]);
        sum.min(self.budget.clone())
    }
}

impl SetFunction for BudgetAdditive {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn materialize(&self) -> Result<SetFunctionTable> {
        SetFunctionTable::from_fn(self.weights.len(), |s| self.value(s))
    }
}

/// `f_τ` on the ground set `[n] \ τ`.
///
/// `table` holds `g(S) = f(S ∪ τ)` for nonempty `S`, re-indexed onto the
/// compressed ground set listed in `ground`; `g(∅) = f(τ)` is carried as
/// `base` and is not folded into the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub tau: Subset,
    pub base: Rational,
    pub table: SetFunctionTable,
    /// `ground[k]` is the original (0-based) element behind compressed index `k`.
    pub ground: Vec<usize>,
}

impl Contraction {
    /// Maps a subset of the original ground set (disjoint from τ) to the
    /// compressed indexing of `table`.
    pub fn compress(&self, s: Subset) -> Option<Subset> {
        if s.intersects(self.tau) {
            return None;
        }
        let mut out = Subset::EMPTY;
        for i in s.iter() {
            out = out.with(self.ground.iter().position(|&g| g == i)?);
        }
        Some(out)
    }

    pub fn expand(&self, s: Subset) -> Subset {
        Subset::from_indices(s.iter().map(|k| self.ground[k]))
    }

    /// `f(S ∪ τ)` for `S` given in original indexing; `S = ∅` yields `base`.
    pub fn value(&self, s: Subset) -> Option<Rational> {
        let c = self.compress(s)?;
        Some(if c.is_empty() {
            self.base.clone()
        } else {
            self.table.get(c).clone()
        })
    }
}

pub fn contract(f: &SetFunctionTable, tau: Subset) -> Result<Contraction> {
    if !tau.is_subset_of(f.ground()) {
        return Err(Error::InvalidSubset { subset: tau, n: f.n() });
    }
    let rest = tau.complement(f.n());
    let ground: Vec<usize> = rest.iter().collect();
    let m = ground.len();
    let table = SetFunctionTable::from_fn(m, |s| {
        let original = Subset::from_indices(s.iter().map(|k| ground[k]));
        f.get(original.union(tau)).clone()
    })?;
    Ok(Contraction {
        tau,
        base: f.get(tau).clone(),
        table,
        ground,
    })
}

/// `f^(d)`: equal to `f` on sets of size `d`, zero elsewhere.
pub fn homogeneous_restrict(f: &SetFunctionTable, d: usize) -> SetFunctionTable {
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(m, v)| {
            if (m as u32).count_ones() as usize == d {
                v.clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    SetFunctionTable { n: f.n, values }
}

/// A violated instance of one of the structural inequalities. `s ⊆ t` and
/// `element ∉ t`; `partner` is the second added element for the
/// two-element inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PredicateWitness {
    pub s: Subset,
    pub t: Subset,
    pub element: usize,
    pub partner: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredicateCheck {
    pub holds: bool,
    pub witness: Option<PredicateWitness>,
}

impl PredicateCheck {
    fn from(witness: Option<PredicateWitness>) -> Self {
        PredicateCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredicateReport {
    pub monotone: PredicateCheck,
    pub submodular: PredicateCheck,
    pub log_submodular: PredicateCheck,
    pub almost_log_submodular: PredicateCheck,
}

/// Table values rescaled by the lcm of the denominators, so that every
/// inequality can be compared on integers. Values that fit in `i64` take a
/// fast `i128` path.
enum Scaled {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

impl Scaled {
    fn of(f: &SetFunctionTable) -> Scaled {
        let lcm = f.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let big: Vec<BigInt> = f.values.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
        match big.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>() {
            Some(small) => Scaled::Small(small),
            None => Scaled::Big(big),
        }
    }

    fn le(&self, a: usize, b: usize) -> bool {
        match self {
            Scaled::Small(v) => v[a] <= v[b],
            Scaled::Big(v) => v[a] <= v[b],
        }
    }

    /// `v[a] + v[b] >= v[c] + v[d]`
    fn sum_ge(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        match self {
            Scaled::Small(v) => v[a] as i128 + v[b] as i128 >= v[c] as i128 + v[d] as i128,
            Scaled::Big(v) => &v[a] + &v[b] >= &v[c] + &v[d],
        }
    }

    /// `k * v[a] * v[b] >= v[c] * v[d]`
    fn prod_ge(&self, k: i64, a: usize, b: usize, c: usize, d: usize) -> bool {
        match self {
            Scaled::Small(v) => {
                let lhs = BigInt::from(v[a] as i128 * v[b] as i128) * k;
                lhs >= BigInt::from(v[c] as i128 * v[d] as i128)
            }
            Scaled::Big(v) => BigInt::from(k) * &v[a] * &v[b] >= &v[c] * &v[d],
        }
    }
}

/// Scans `0..count` for the first index where `scan` reports a violation.
fn first_violation<F>(count: usize, scan: F) -> Option<PredicateWitness>
where
    F: Fn(usize) -> Option<PredicateWitness> + Sync + Send,
{
    let hit = par::first_failure(count, |m| scan(m).is_none())?;
    scan(hit)
}

/// Exhaustive structural predicates of `f`, each with its first violation in
/// mask order.
pub fn predicates(f: &SetFunctionTable) -> PredicateReport {
    let n = f.n;
    let v = Scaled::of(f);
    let count = 1usize << n;

    let monotone = first_violation(count, |m| {
        let s = Subset(m as u32);
        s.complement(n).iter().find_map(|i| {
            (!v.le(s.index(), s.with(i).index())).then_some(PredicateWitness {
                s,
                t: s,
                element: i,
                partner: None,
            })
        })
    });

    // Local diminishing returns: f(S+i) - f(S) >= f(S+i+j) - f(S+j).
    let submodular = first_violation(count, |m| {
        let s = Subset(m as u32);
        let rest: Vec<usize> = s.complement(n).iter().collect();
        for &i in &rest {
            for &j in &rest {
                if i == j {
                    continue;
                }
                let (si, sj, sij) = (s.with(i), s.with(j), s.with(i).with(j));
                if !v.sum_ge(si.index(), sj.index(), sij.index(), s.index()) {
                    return Some(PredicateWitness {
                        s,
                        t: sj,
                        element: i,
                        partner: Some(j),
                    });
                }
            }
        }
        None
    });

    // f(S+i) f(T) >= f(T+i) f(S) for all S ⊆ T, i ∉ T. Zeros make the
    // local form insufficient, so every pair S ⊆ T is visited.
    let log_submodular = first_violation(count, |m| {
        let t = Subset(m as u32);
        for i in t.complement(n).iter() {
            let ti = t.with(i);
            for s in t.submasks() {
                if !v.prod_ge(1, s.with(i).index(), t.index(), ti.index(), s.index()) {
                    return Some(PredicateWitness {
                        s,
                        t,
                        element: i,
                        partner: None,
                    });
                }
            }
        }
        None
    });

    // 2 f(S+i) f(S+j) >= f(S) f(S+i+j).
    let almost_log_submodular = first_violation(count, |m| {
        let s = Subset(m as u32);
        let rest: Vec<usize> = s.complement(n).iter().collect();
        for (a, &i) in rest.iter().enumerate() {
            for &j in &rest[a + 1..] {
                let (si, sj, sij) = (s.with(i), s.with(j), s.with(i).with(j));
                if !v.prod_ge(2, si.index(), sj.index(), s.index(), sij.index()) {
                    return Some(PredicateWitness {
                        s,
                        t: s,
                        element: i,
                        partner: Some(j),
                    });
                }
            }
        }
        None
    });

    PredicateReport {
        monotone: PredicateCheck::from(monotone),
        submodular: PredicateCheck::from(submodular),
        log_submodular: PredicateCheck::from(log_submodular),
        almost_log_submodular: PredicateCheck::from(almost_log_submodular),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusDecomposition {
    /// The unique solution `x` of `f(S) = Σ_{T∩S≠∅} x_T`; may hold negative
    /// entries when `f` is not a coverage function.
    pub weights: CoverageWeights,
    pub is_coverage: bool,
    pub min_weight: Option<Rational>,
}

/// Solves `f(S) = Σ_{T∩S≠∅} x_T` by Möbius inversion of
/// `y(U) = f([n]) − f([n] \ U)`, then re-verifies the reconstruction.
pub fn mobius_coverage_weights(f: &SetFunctionTable) -> Result<MobiusDecomposition> {
    let n = f.n;
    let full = f.ground();
    let top = f.get(full).clone();
    let mut x: Vec<Rational> = (0..1usize << n)
        .map(|m| &top - f.get(Subset(m as u32).complement(n)))
        .collect();
    for i in 0..n {
        for m in 0..1usize << n {
            if m >> i & 1 == 1 {
                let lower = x[m ^ (1 << i)].clone();
                x[m] -= lower;
            }
        }
    }
    let mut weights = CoverageWeights::new(n);
    for (m, value) in x.into_iter().enumerate().skip(1) {
        weights.insert(Subset(m as u32), value);
    }

    let within = subset_sums(n, &weights.weights);
    let total = &within[full.index()];
    for m in 0..1usize << n {
        let s = Subset(m as u32);
        if &(total - &within[s.complement(n).index()]) != f.get(s) {
            return Err(Error::ReconstructionFailure(s));
        }
    }

    Ok(MobiusDecomposition {
        is_coverage: weights.is_nonnegative(),
        min_weight: weights.min_weight().cloned(),
        weights,
    })
}

/// Pointwise `Σ α_i f_i` with nonnegative coefficients.
pub fn combine(fs: &[SetFunctionTable], coeffs: &[Rational]) -> Result<SetFunctionTable> {
    if fs.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            got: coeffs.len(),
        });
    }
    if let Some(c) = coeffs.iter().find(|c| c.is_negative()) {
        return Err(Error::NegativeInput(format!("coefficient {c}")));
    }
    let n = fs.first().map(SetFunctionTable::n).unwrap_or(0);
    if let Some(g) = fs.iter().find(|g| g.n != n) {
        return Err(Error::DimensionMismatch { expected: n, got: g.n });
    }
    let mut values = vec![Rational::zero(); 1 << n];
    for (g, c) in fs.iter().zip(coeffs) {
        for (acc, v) in values.iter_mut().zip(&g.values) {
            *acc += v * c;
        }
    }
    SetFunctionTable::new(n, values)
}

/// `c_i = Σ_{|S|=i} f(S)` for `i = 0..=n`.
pub fn level_sequence(f: &SetFunctionTable) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); f.n + 1];
    for (m, v) in f.values.iter().enumerate() {
        c[(m as u32).count_ones() as usize] += v;
    }
    c
}
