//! 2-coverage and strongly 2-coverage certificates.
//!
//! A 2-coverage certificate for `f` and degree `d` gives, for every `τ` of
//! size `d − 2`, a support `S`, a coverage function `g` on `S` and a linear
//! `ℓ ≤ g` on singletons with `f(τ ∪ T) = g(T) − ½ ℓ(T)` on pairs. A strong
//! certificate gives, for every `|τ| ≤ n − 2`, a coverage function `g_τ`
//! matching the increments of `f` over `f(τ)` on singletons and pairs.
//!
//! All sets are in the original (0-based) indexing of `f`. A `τ` without a
//! witness is read as carrying the zero witness.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lc::is_indecomposable;
use crate::lp::{Feasibility, FeasibilityProblem, Relation};
use crate::matroid::{Matroid, TableMode};
use crate::par;
use crate::poly::generating_poly;
use crate::rational::{frac, Rational};
use crate::setfn::{
    combine, homogeneous_restrict, predicates, CoverageInstance, CoverageWeights, SetFunction, SetFunctionTable,
};
use crate::subset::{subsets_of_size, subsets_up_to, Subset};

/// Largest ground set for certificate synthesis.
pub const SYNTH_CAP: usize = 14;
/// Largest support handled by [`search_2cov_feasible`].
pub const SEARCH_CAP: usize = 10;
/// Largest non-loop set handled by [`search_strong_feasible`].
pub const STRONG_SEARCH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TwoCoverageWitness {
    pub s: Subset,
    pub g: CoverageWeights,
    pub l: BTreeMap<usize, Rational>,
}

impl TwoCoverageWitness {
    fn l(&self, i: usize) -> Rational {
        self.l.get(&i).cloned().unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCoverageCertificate {
    pub d: usize,
    pub witnesses: BTreeMap<Subset, TwoCoverageWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongCertificate {
    pub n: usize,
    pub witnesses: BTreeMap<Subset, CoverageWeights>,
}

impl StrongCertificate {
    pub fn scaled(&self, alpha: &Rational) -> StrongCertificate {
        StrongCertificate {
            n: self.n,
            witnesses: self.witnesses.iter().map(|(t, g)| (*t, g.scaled(alpha))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Decomposable,
    SupportMismatch,
    NegativeWeight,
    WeightOutsideGround,
    LinearExceedsCoverage,
    PairEquation,
    SingletonEquation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tau: Subset,
    pub kind: ViolationKind,
    pub set: Option<Subset>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub holds: bool,
    /// The checked polynomial or table carries nothing to certify.
    pub vacuous: bool,
    pub checks: usize,
    pub violation: Option<Violation>,
}

impl CoverageReport {
    fn from_cells(cells: Vec<(usize, Option<Violation>)>, vacuous: bool) -> Self {
        let checks = cells.iter().map(|c| c.0).sum();
        let violation = cells.into_iter().find_map(|c| c.1);
        CoverageReport {
            holds: violation.is_none(),
            vacuous,
            checks,
            violation,
        }
    }
}

fn violation(tau: Subset, kind: ViolationKind, set: Option<Subset>, detail: String) -> Option<Violation> {
    Some(Violation { tau, kind, set, detail })
}

/// `{i : f(τ ∪ T) ≠ 0 for some pair T ∋ i}`.
pub fn canonical_support(f: &SetFunctionTable, tau: Subset) -> Subset {
    let rest = tau.complement(f.n());
    subsets_of_size(rest, 2)
        .into_iter()
        .filter(|t| !f.get(t.union(tau)).is_zero())
        .fold(Subset::EMPTY, Subset::union)
}

fn check_weights(g: &CoverageWeights, within: Subset, tau: Subset) -> Option<Violation> {
    for (t, x) in &g.weights {
        if x.is_negative() {
            return violation(tau, ViolationKind::NegativeWeight, Some(*t), format!("x_{t} = {x}"));
        }
        if !t.is_subset_of(within) {
            return violation(
                tau,
                ViolationKind::WeightOutsideGround,
                Some(*t),
                format!("x_{t} is supported outside {within}"),
            );
        }
    }
    None
}

fn check_2cov_cell(f: &SetFunctionTable, tau: Subset, w: &TwoCoverageWitness) -> (usize, Option<Violation>) {
    let support = canonical_support(f, tau);
    let mut checks = 1;
    if w.s != support {
        let detail = format!("witness support {} differs from {}", w.s, support);
        return (
            checks,
            violation(tau, ViolationKind::SupportMismatch, Some(w.s), detail),
        );
    }
    if let Some(v) = check_weights(&w.g, support, tau) {
        return (checks, Some(v));
    }
    for (i, li) in &w.l {
        checks += 1;
        let s = Subset::singleton(*i);
        if !support.contains(*i) || li.is_negative() {
            let detail = format!("l({}) = {li} must be nonnegative and inside {support}", i + 1);
            return (checks, violation(tau, ViolationKind::NegativeWeight, Some(s), detail));
        }
    }
    for i in support.iter() {
        checks += 1;
        let gi = w.g.value(Subset::singleton(i));
        let li = w.l(i);
        if li > gi {
            let detail = format!("l({}) = {li} exceeds g({}) = {gi}", i + 1, Subset::singleton(i));
            return (
                checks,
                violation(
                    tau,
                    ViolationKind::LinearExceedsCoverage,
                    Some(Subset::singleton(i)),
                    detail,
                ),
            );
        }
    }
    for t in subsets_of_size(tau.complement(f.n()), 2) {
        checks += 1;
        let got = f.get(t.union(tau));
        let expected = if t.is_subset_of(support) {
            let mut e = w.g.value(t);
            for i in t.iter() {
                e -= w.l(i) * frac(1, 2);
            }
            e
        } else {
            Rational::zero()
        };
        if *got != expected {
            let detail = format!("f_tau({t}) = {got} but g - l/2 = {expected}");
            return (checks, violation(tau, ViolationKind::PairEquation, Some(t), detail));
        }
    }
    (checks, None)
}

/// Checks indecomposability of `(f^(d))_τ` for every `|τ| ≤ d − 2` and the
/// pair equations of the certificate for every `|τ| = d − 2`.
pub fn verify_2cov(f: &SetFunctionTable, d: usize, cert: &TwoCoverageCertificate) -> Result<CoverageReport> {
    if cert.d != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cert.d,
        });
    }
    let fd = homogeneous_restrict(f, d);
    if d < 2 || d > f.n() {
        return Err(Error::Malformed(format!("degree d = {d} outside 2..={}", f.n())));
    }
    if let Some(t) = cert
        .witnesses
        .keys()
        .find(|t| t.len() != d - 2 || !t.is_subset_of(f.ground()))
    {
        return Err(Error::Malformed(format!("witness for tau = {t} of the wrong size")));
    }
    let p = generating_poly(&fd);
    let taus = subsets_up_to(f.ground(), d - 2);
    let empty = TwoCoverageWitness {
        g: CoverageWeights::new(f.n()),
        ..Default::default()
    };
    let cells = par::map(&taus, |&tau| -> Result<(usize, Option<Violation>)> {
        let dp = p.derive(tau, 0)?;
        if !is_indecomposable(&dp)?.indecomposable {
            let detail = format!("derivative at tau = {tau} is decomposable");
            return Ok((1, violation(tau, ViolationKind::Decomposable, None, detail)));
        }
        if tau.len() != d - 2 {
            return Ok((1, None));
        }
        let (checks, v) = match cert.witnesses.get(&tau) {
            Some(w) => check_2cov_cell(f, tau, w),
            None => {
                let (c, v) = check_2cov_cell(f, tau, &empty);
                if v.is_some() {
                    return Err(Error::MissingTauWitness(tau));
                }
                (c, v)
            }
        };
        Ok((checks + 1, v))
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_cells(cells, fd.is_zero()))
}

fn check_strong_cell(f: &SetFunctionTable, tau: Subset, g: &CoverageWeights) -> (usize, Option<Violation>) {
    let rest = tau.complement(f.n());
    if let Some(v) = check_weights(g, rest, tau) {
        return (1, Some(v));
    }
    let base = f.get(tau);
    let mut checks = 1;
    for k in 1..=2 {
        for t in subsets_of_size(rest, k) {
            checks += 1;
            let got = f.get(t.union(tau));
            let expected = g.value(t) + base;
            if *got != expected {
                let kind = if k == 1 {
                    ViolationKind::SingletonEquation
                } else {
                    ViolationKind::PairEquation
                };
                let detail = format!("f(tau + {t}) = {got} but g({t}) + f(tau) = {expected}");
                return (checks, violation(tau, kind, Some(t), detail));
            }
        }
    }
    (checks, None)
}

/// Checks `f(τ ∪ T) = g_τ(T) + f(τ)` for `|T| ∈ {1, 2}` and every `|τ| ≤ n − 2`.
pub fn verify_strong2cov(f: &SetFunctionTable, cert: &StrongCertificate) -> Result<CoverageReport> {
    if cert.n != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: cert.n,
        });
    }
    let n = f.n();
    if let Some(t) = cert
        .witnesses
        .keys()
        .find(|t| t.len() + 2 > n || !t.is_subset_of(f.ground()))
    {
        return Err(Error::Malformed(format!("witness for tau = {t} of the wrong size")));
    }
    let taus = if n >= 2 {
        subsets_up_to(f.ground(), n - 2)
    } else {
        Vec::new()
    };
    let empty = CoverageWeights::new(n);
    let cells = par::map(&taus, |&tau| match cert.witnesses.get(&tau) {
        Some(g) => Ok(check_strong_cell(f, tau, g)),
        None => {
            let (c, v) = check_strong_cell(f, tau, &empty);
            if v.is_some() {
                return Err(Error::MissingTauWitness(tau));
            }
            Ok((c, v))
        }
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_cells(cells, f.is_zero()))
}

fn synth_cap(n: usize) -> Result<()> {
    if n > SYNTH_CAP {
        return Err(Error::CapExceeded {
            what: "certificate synthesis ground set",
            got: n,
            cap: SYNTH_CAP,
        });
    }
    Ok(())
}

fn require(report: CoverageReport) -> Result<()> {
    match report.violation {
        None => Ok(()),
        Some(v) => Err(Error::VerificationFailure(format!("tau = {}: {}", v.tau, v.detail))),
    }
}

/// One unit weight on each parallel class of `M/τ`.
fn class_weights(m: &Matroid, tau: Subset) -> Result<CoverageWeights> {
    let pp = m.contract(tau)?.parallel_partition()?;
    let mut g = CoverageWeights::new(m.n());
    for c in pp.classes {
        g.insert(c, Rational::from_integer(1.into()));
    }
    Ok(g)
}

fn uncontracted(m: &Matroid) -> Result<()> {
    if !m.contraction().is_empty() {
        return Err(Error::Malformed(
            "certificate synthesis expects an uncontracted matroid".into(),
        ));
    }
    synth_cap(m.n())
}

/// Strong certificate for the rank function of `m`, verified before return.
pub fn synth_strong_matroid(m: &Matroid) -> Result<StrongCertificate> {
    uncontracted(m)?;
    let n = m.n();
    let taus = if n >= 2 {
        subsets_up_to(m.ground(), n - 2)
    } else {
        Vec::new()
    };
    let weights = par::map(&taus, |&tau| class_weights(m, tau));
    let mut witnesses = BTreeMap::new();
    for (tau, g) in taus.into_iter().zip(weights) {
        witnesses.insert(tau, g?);
    }
    let cert = StrongCertificate { n, witnesses };
    require(verify_strong2cov(&m.to_setfunction(TableMode::Rank)?, &cert)?)?;
    Ok(cert)
}

/// 2-coverage certificate of degree `d` for the independence indicator of
/// `m`, verified before return. Dependent `τ` carry no witness since every
/// pair value vanishes there.
pub fn synth_2cov_indicator(m: &Matroid, d: usize) -> Result<TwoCoverageCertificate> {
    uncontracted(m)?;
    let rank = m.full_rank();
    if d > rank {
        return Err(Error::DExceedsRank { d, rank });
    }
    if d < 2 {
        return Err(Error::Malformed(format!("degree d = {d} below 2")));
    }
    let taus: Vec<Subset> = subsets_of_size(m.ground(), d - 2)
        .into_iter()
        .filter(|&t| m.is_independent(t))
        .collect();
    let one = Rational::from_integer(1.into());
    let built = par::map(&taus, |&tau| -> Result<TwoCoverageWitness> {
        let g = class_weights(m, tau)?;
        let s = g.weights.keys().fold(Subset::EMPTY, |acc, c| acc.union(*c));
        let l = s.iter().map(|i| (i, one.clone())).collect();
        Ok(TwoCoverageWitness { s, g, l })
    });
    let mut witnesses = BTreeMap::new();
    for (tau, w) in taus.into_iter().zip(built) {
        witnesses.insert(tau, w?);
    }
    let cert = TwoCoverageCertificate { d, witnesses };
    require(verify_2cov(&m.to_setfunction(TableMode::Indicator)?, d, &cert)?)?;
    Ok(cert)
}

/// A summand for [`synth_strong_from_parts`].
#[derive(Clone, Debug)]
pub enum StrongPart<'a> {
    Certified {
        f: &'a SetFunctionTable,
        cert: &'a StrongCertificate,
        coeff: Rational,
    },
    Coverage {
        instance: &'a CoverageInstance,
        coeff: Rational,
    },
}

/// Strong certificate for a coverage instance: `g_τ` is the instance with
/// every `A_i` replaced by `A_i \ A_τ`.
pub fn strong_from_coverage(g: &CoverageInstance) -> Result<StrongCertificate> {
    let n = g.n();
    synth_cap(n)?;
    let weights = g.coverage_weights();
    let taus = if n >= 2 {
        subsets_up_to(Subset::full(n), n - 2)
    } else {
        Vec::new()
    };
    let witnesses = taus
        .into_iter()
        .map(|tau| {
            let mut w = CoverageWeights::new(n);
            for (t, x) in weights.weights.iter().filter(|(t, _)| t.is_disjoint(tau)) {
                w.insert(*t, x.clone());
            }
            (tau, w)
        })
        .collect();
    Ok(StrongCertificate { n, witnesses })
}

/// Nonnegative combination of strongly 2-coverage functions together with
/// its certificate, verified before return.
pub fn synth_strong_from_parts(parts: &[StrongPart<'_>]) -> Result<(SetFunctionTable, StrongCertificate)> {
    let mut tables = Vec::with_capacity(parts.len());
    let mut coeffs = Vec::with_capacity(parts.len());
    let mut certs = Vec::with_capacity(parts.len());
    for part in parts {
        match part {
            StrongPart::Certified { f, cert, coeff } => {
                tables.push((*f).clone());
                coeffs.push(coeff.clone());
                certs.push((*cert).clone());
            }
            StrongPart::Coverage { instance, coeff } => {
                tables.push(instance.materialize()?);
                coeffs.push(coeff.clone());
                certs.push(strong_from_coverage(instance)?);
            }
        }
    }
    let f = combine(&tables, &coeffs)?;
    let n = f.n();
    synth_cap(n)?;
    if let Some(c) = certs.iter().find(|c| c.n != n) {
        return Err(Error::DimensionMismatch { expected: n, got: c.n });
    }
    let mut witnesses: BTreeMap<Subset, CoverageWeights> = BTreeMap::new();
    for (cert, coeff) in certs.iter().zip(&coeffs) {
        for (tau, g) in &cert.witnesses {
            witnesses
                .entry(*tau)
                .or_insert_with(|| CoverageWeights::new(n))
                .add(&g.scaled(coeff));
        }
    }
    let cert = StrongCertificate { n, witnesses };
    require(verify_strong2cov(&f, &cert)?)?;
    Ok((f, cert))
}

/// Outcome of an exact feasibility search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search<W> {
    Feasible(W),
    Infeasible {
        /// Positive phase-one optimum, when the LP was run.
        phase_one_optimum: Option<Rational>,
        detail: String,
    },
}

impl<W> Search<W> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Search::Feasible(_))
    }
}

fn nonempty_submasks(s: Subset) -> Vec<Subset> {
    let mut v: Vec<Subset> = s.submasks().filter(|t| !t.is_empty()).collect();
    v.reverse();
    v
}

fn infeasible<W>(result: Feasibility) -> std::result::Result<Vec<Rational>, Search<W>> {
    match result {
        Feasibility::Feasible(x) => Ok(x),
        Feasibility::Infeasible { phase_one_optimum } => Err(Search::Infeasible {
            detail: format!("phase-one optimum {phase_one_optimum} > 0"),
            phase_one_optimum: Some(phase_one_optimum),
        }),
    }
}

/// Decides whether some coverage `g ≥ 0` on the canonical support `S` and
/// linear `0 ≤ ℓ ≤ g` satisfy `f(τ ∪ T) = g(T) − ½ ℓ(T)` on all pairs
/// `T ⊆ S`. Uses every nonempty `T ⊆ S` as a weight variable.
pub fn search_2cov_feasible(f: &SetFunctionTable, d: usize, tau: Subset) -> Result<Search<TwoCoverageWitness>> {
    if d < 2 || tau.len() != d - 2 || !tau.is_subset_of(f.ground()) {
        return Err(Error::Malformed(format!(
            "tau = {tau} must have size d - 2 = {}",
            d as i64 - 2
        )));
    }
    let s = canonical_support(f, tau);
    if s.len() > SEARCH_CAP {
        return Err(Error::CapExceeded {
            what: "2-coverage search support",
            got: s.len(),
            cap: SEARCH_CAP,
        });
    }
    let ts = nonempty_submasks(s);
    let elems: Vec<usize> = s.iter().collect();
    let l_var = |k: usize| ts.len() + k;
    let mut lp = FeasibilityProblem::new(ts.len() + elems.len());
    let one = Rational::from_integer(1.into());
    let half = frac(1, 2);
    for (a, &i) in elems.iter().enumerate() {
        for (b, &j) in elems.iter().enumerate().skip(a + 1) {
            let pair = Subset::pair(i, j);
            let mut row: Vec<(usize, Rational)> = ts
                .iter()
                .enumerate()
                .filter(|(_, t)| t.intersects(pair))
                .map(|(v, _)| (v, one.clone()))
                .collect();
            row.push((l_var(a), -half.clone()));
            row.push((l_var(b), -half.clone()));
            lp.push(row, Relation::Eq, f.get(pair.union(tau)).clone());
        }
        let mut row: Vec<(usize, Rational)> = ts
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(i))
            .map(|(v, _)| (v, one.clone()))
            .collect();
        row.push((l_var(a), -one.clone()));
        lp.push(row, Relation::Ge, Rational::zero());
    }
    let x = match infeasible(lp.solve()) {
        Ok(x) => x,
        Err(e) => return Ok(e),
    };
    debug_assert!(lp.satisfied_by(&x));
    let mut g = CoverageWeights::new(f.n());
    for (t, v) in ts.iter().zip(&x) {
        g.insert(*t, v.clone());
    }
    let l = elems
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, x[l_var(k)].clone()))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let w = TwoCoverageWitness { s, g, l };
    if let (_, Some(v)) = check_2cov_cell(f, tau, &w) {
        return Err(Error::VerificationFailure(v.detail));
    }
    Ok(Search::Feasible(w))
}

/// Runs [`search_2cov_feasible`] for every `|τ| = d − 2` and verifies the
/// assembled certificate, returning the first infeasible `τ` otherwise.
pub fn search_2cov_certificate(
    f: &SetFunctionTable,
    d: usize,
) -> Result<std::result::Result<TwoCoverageCertificate, (Subset, String)>> {
    if d < 2 || d > f.n() {
        return Err(Error::Malformed(format!("degree d = {d} outside 2..={}", f.n())));
    }
    let taus = subsets_of_size(f.ground(), d - 2);
    let found = par::map(&taus, |&tau| search_2cov_feasible(f, d, tau));
    let mut witnesses = BTreeMap::new();
    for (tau, r) in taus.into_iter().zip(found) {
        match r? {
            Search::Feasible(w) if w.s.is_empty() => {}
            Search::Feasible(w) => {
                witnesses.insert(tau, w);
            }
            Search::Infeasible { detail, .. } => return Ok(Err((tau, detail))),
        }
    }
    let cert = TwoCoverageCertificate { d, witnesses };
    if let Some(v) = verify_2cov(f, d, &cert)?.violation {
        return Ok(Err((v.tau, v.detail)));
    }
    Ok(Ok(cert))
}

/// Decides whether a coverage `g_τ ≥ 0` on `[n] \ τ` matches the increments
/// `f(τ ∪ T) − f(τ)` on all singletons and pairs. Elements with zero
/// increment must carry no weight, so they are resolved directly and the LP
/// runs over subsets of the remaining elements.
pub fn search_strong_feasible(f: &SetFunctionTable, tau: Subset) -> Result<Search<CoverageWeights>> {
    let n = f.n();
    if !tau.is_subset_of(f.ground()) || tau.len() + 2 > n {
        return Err(Error::Malformed(format!("tau = {tau} needs |tau| <= n - 2")));
    }
    let rest = tau.complement(n);
    let base = f.get(tau);
    let inc = |t: Subset| f.get(t.union(tau)) - base;
    let no = |detail: String| {
        Ok(Search::Infeasible {
            phase_one_optimum: None,
            detail,
        })
    };
    let mut live = Subset::EMPTY;
    for i in rest.iter() {
        let a = inc(Subset::singleton(i));
        if a.is_negative() {
            return no(format!("increment of {} is {a} < 0", Subset::singleton(i)));
        }
        if !a.is_zero() {
            live = live.with(i);
        }
    }
    for t in subsets_of_size(rest, 2) {
        let dead = t.difference(live);
        if dead.is_empty() {
            continue;
        }
        let expected = inc(t.intersection(live));
        let expected = if t.intersection(live).is_empty() {
            Rational::zero()
        } else {
            expected
        };
        if inc(t) != expected {
            return no(format!(
                "increment of {t} is {} but a zero-increment member forces {expected}",
                inc(t)
            ));
        }
    }
    if live.len() > STRONG_SEARCH_CAP {
        return Err(Error::CapExceeded {
            what: "strong 2-coverage search support",
            got: live.len(),
            cap: STRONG_SEARCH_CAP,
        });
    }
    let ts = nonempty_submasks(live);
    let one = Rational::from_integer(1.into());
    let mut lp = FeasibilityProblem::new(ts.len());
    for k in 1..=2 {
        for t in subsets_of_size(live, k) {
            let row = ts
                .iter()
                .enumerate()
                .filter(|(_, u)| u.intersects(t))
                .map(|(v, _)| (v, one.clone()))
                .collect();
            lp.push(row, Relation::Eq, inc(t));
        }
    }
    let x = match infeasible(lp.solve()) {
        Ok(x) => x,
        Err(e) => return Ok(e),
    };
    let mut g = CoverageWeights::new(n);
    for (t, v) in ts.iter().zip(x) {
        g.insert(*t, v);
    }
    if let (_, Some(v)) = check_strong_cell(f, tau, &g) {
        return Err(Error::VerificationFailure(v.detail));
    }
    Ok(Search::Feasible(g))
}

/// Runs [`search_strong_feasible`] over every `|τ| ≤ n − 2`, returning either
/// a full certificate or the first `τ` (size, then lexicographic) with no
/// matching coverage function.
pub fn search_strong_certificate(
    f: &SetFunctionTable,
) -> Result<std::result::Result<StrongCertificate, (Subset, String)>> {
    let n = f.n();
    let taus = if n >= 2 {
        subsets_up_to(f.ground(), n - 2)
    } else {
        Vec::new()
    };
    let found = par::map(&taus, |&tau| search_strong_feasible(f, tau));
    let mut witnesses = BTreeMap::new();
    for (tau, r) in taus.into_iter().zip(found) {
        match r? {
            Search::Feasible(g) => {
                witnesses.insert(tau, g);
            }
            Search::Infeasible { detail, .. } => return Ok(Err((tau, detail))),
        }
    }
    Ok(Ok(StrongCertificate { n, witnesses }))
}

/// Decides whether the values of `f` on sets of size `d` extend to a
/// nonnegative, monotone, submodular function with `f(∅) = 0`. The other
/// values are free variables of an exact LP.
pub fn search_submodular_extension(f: &SetFunctionTable, d: usize) -> Result<Search<SetFunctionTable>> {
    let n = f.n();
    if n > SEARCH_CAP {
        return Err(Error::CapExceeded {
            what: "submodular extension ground set",
            got: n,
            cap: SEARCH_CAP,
        });
    }
    let size = 1usize << n;
    // Column of each free set; fixed sets contribute to the right-hand side.
    let column: Vec<Option<usize>> = {
        let mut next = 0;
        (0..size)
            .map(|m| {
                let k = (m as u32).count_ones() as usize;
                (m != 0 && k != d).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let free = column.iter().flatten().count();
    let fixed = |m: usize| -> Rational {
        if m == 0 || column[m].is_some() {
            Rational::zero()
        } else {
            f.get(Subset(m as u32)).clone()
        }
    };
    let mut lp = FeasibilityProblem::new(free);
    // Σ sign·value(mask) ≥ 0, split into variables and constants.
    let mut push = |terms: &[(usize, i64)]| {
        let mut row: Vec<(usize, Rational)> = Vec::new();
        let mut rhs = Rational::zero();
        for &(m, sign) in terms {
            let c = Rational::from_integer(sign.into());
            match column[m] {
                Some(j) => row.push((j, c)),
                None => rhs -= c * fixed(m),
            }
        }
        lp.push(row, Relation::Ge, rhs);
    };
    for m in 0..size {
        for i in (0..n).filter(|i| m >> i & 1 == 0) {
            let mi = m | 1 << i;
            push(&[(mi, 1), (m, -1)]);
            for j in (i + 1..n).filter(|j| m >> j & 1 == 0) {
                let mj = m | 1 << j;
                push(&[(mi, 1), (mj, 1), (mi | mj, -1), (m, -1)]);
            }
        }
    }
    let x = match infeasible(lp.solve()) {
        Ok(x) => x,
        Err(e) => return Ok(e),
    };
    let table = SetFunctionTable::new(
        n,
        (0..size)
            .map(|m| column[m].map_or_else(|| fixed(m), |j| x[j].clone()))
            .collect(),
    )?;
    Ok(Search::Feasible(table))
}

/// Monotonicity and submodularity of `f`, which every strongly 2-coverage
/// function satisfies.
pub fn strong_implies_monotone_submodular(f: &SetFunctionTable) -> bool {
    let p = predicates(f);
    p.monotone.holds && p.submodular.holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lc::{certify_clc_homogeneous, certify_clc_homogenization, Verdict};
    use crate::rational::int;
    use crate::setfn::{BudgetAdditive, LinearFunction};

    fn labels(l: &[usize], n: usize) -> Subset {
        Subset::from_labels(l, n).unwrap()
    }

    fn counterexample_b() -> SetFunctionTable {
        SetFunctionTable::from_fn(3, |s| match s.bits() {
            0b011 => int(3),
            0b101 | 0b110 => int(1),
            _ => int(0),
        })
        .unwrap()
    }

    fn budget() -> SetFunctionTable {
        let w = [1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 0, 0].map(int).to_vec();
        BudgetAdditive::new(w, int(2)).unwrap().materialize().unwrap()
    }

    #[test]
    fn uniform_indicator_certificate() {
        let m = Matroid::uniform(2, 3).unwrap();
        let cert = synth_2cov_indicator(&m, 2).unwrap();
        let w = &cert.witnesses[&Subset::EMPTY];
        assert_eq!(w.s, Subset::full(3));
        for t in subsets_of_size(Subset::full(3), 2) {
            assert_eq!(w.g.value(t), int(2));
        }
        assert!(w.l.values().all(|v| *v == int(1)));
        let f = m.to_setfunction(TableMode::Indicator).unwrap();
        assert!(verify_2cov(&f, 2, &cert).unwrap().holds);
    }

    #[test]
    fn k4_indicator_degree_three() {
        let m = Matroid::complete_graph(4).unwrap();
        let cert = synth_2cov_indicator(&m, 3).unwrap();
        // edges: e12 e13 e14 e23 e24 e34
        let w = &cert.witnesses[&Subset::singleton(0)];
        let tri = Subset::pair(1, 3);
        assert!(w.g.weights.contains_key(&tri));
        assert_eq!(w.g.value(tri), int(1));
        let f = m.to_setfunction(TableMode::Indicator).unwrap();
        assert_eq!(*f.get(tri.with(0)), int(0));
        assert_eq!(certify_clc_homogeneous(&f, 3).unwrap().verdict, Verdict::Certified);
        assert!(matches!(
            synth_2cov_indicator(&m, 4),
            Err(Error::DExceedsRank { d: 4, rank: 3 })
        ));
    }

    #[test]
    fn counterexample_b_is_not_2cov() {
        let f = counterexample_b();
        let r = search_2cov_feasible(&f, 2, Subset::EMPTY).unwrap();
        let Search::Infeasible {
            phase_one_optimum: Some(opt),
            ..
        } = r
        else {
            panic!("expected infeasible")
        };
        assert!(opt.is_positive());
        // Any attempted certificate is rejected: e.g. the Möbius split of the pairs.
        let mut g = CoverageWeights::new(3);
        g.insert(Subset::singleton(0), int(2));
        g.insert(Subset::singleton(1), int(2));
        let l = (0..3).map(|i| (i, int(1))).collect();
        let cert = TwoCoverageCertificate {
            d: 2,
            witnesses: [(
                Subset::EMPTY,
                TwoCoverageWitness {
                    s: Subset::full(3),
                    g,
                    l,
                },
            )]
            .into(),
        };
        assert!(!verify_2cov(&f, 2, &cert).unwrap().holds);
        let empty = TwoCoverageCertificate {
            d: 2,
            witnesses: BTreeMap::new(),
        };
        assert!(matches!(verify_2cov(&f, 2, &empty), Err(Error::MissingTauWitness(_))));
    }

    #[test]
    fn counterexample_b_has_no_submodular_extension() {
        let r = search_submodular_extension(&counterexample_b(), 2).unwrap();
        assert!(!r.is_feasible());
        let rank = Matroid::uniform(2, 3).unwrap().to_setfunction(TableMode::Rank).unwrap();
        let Search::Feasible(ext) = search_submodular_extension(&rank, 2).unwrap() else {
            panic!()
        };
        assert!(strong_implies_monotone_submodular(&ext));
        assert_eq!(ext.get(Subset(0b011)), rank.get(Subset(0b011)));
    }

    #[test]
    fn search_matches_indicator_construction() {
        let f = Matroid::uniform(2, 3)
            .unwrap()
            .to_setfunction(TableMode::Indicator)
            .unwrap();
        let Search::Feasible(w) = search_2cov_feasible(&f, 2, Subset::EMPTY).unwrap() else {
            panic!()
        };
        assert_eq!(w.s, Subset::full(3));
        let zero = SetFunctionTable::zero(4).unwrap();
        let Search::Feasible(w) = search_2cov_feasible(&zero, 3, Subset::singleton(2)).unwrap() else {
            panic!()
        };
        assert!(w.g.weights.is_empty() && w.l.is_empty() && w.s.is_empty());
    }

    #[test]
    fn zero_function_is_vacuous() {
        let zero = SetFunctionTable::zero(3).unwrap();
        let cert = TwoCoverageCertificate {
            d: 2,
            witnesses: BTreeMap::new(),
        };
        let r = verify_2cov(&zero, 2, &cert).unwrap();
        assert!(r.holds && r.vacuous);
    }

    #[test]
    fn strong_matroid_certificates() {
        let m = Matroid::uniform(2, 3).unwrap();
        let cert = synth_strong_matroid(&m).unwrap();
        assert_eq!(cert.witnesses[&Subset::EMPTY].weights.len(), 3);
        let g1 = &cert.witnesses[&Subset::singleton(0)];
        assert_eq!(
            g1.weights.iter().collect::<Vec<_>>(),
            vec![(&labels(&[2, 3], 3), &int(1))]
        );
        let u13 = synth_strong_matroid(&Matroid::uniform(1, 3).unwrap()).unwrap();
        assert_eq!(u13.witnesses[&Subset::EMPTY].get(Subset::full(3)), int(1));
        let rank = m.to_setfunction(TableMode::Rank).unwrap();
        assert!(strong_implies_monotone_submodular(&rank));
        assert_eq!(certify_clc_homogenization(&rank).unwrap().verdict, Verdict::Certified);
    }

    #[test]
    fn linear_function_strong() {
        let f = LinearFunction::new(vec![int(1); 3]).unwrap().materialize().unwrap();
        let witnesses = subsets_up_to(Subset::full(3), 1)
            .into_iter()
            .map(|tau| {
                let mut g = CoverageWeights::new(3);
                for i in tau.complement(3).iter() {
                    g.insert(Subset::singleton(i), int(1));
                }
                (tau, g)
            })
            .collect();
        let cert = StrongCertificate { n: 3, witnesses };
        assert!(verify_strong2cov(&f, &cert).unwrap().holds);
    }

    #[test]
    fn parts_and_coverage() {
        let u12 = Matroid::uniform(1, 2).unwrap();
        let f = u12.to_setfunction(TableMode::Rank).unwrap();
        let cert = synth_strong_matroid(&u12).unwrap();
        let part = StrongPart::Certified {
            f: &f,
            cert: &cert,
            coeff: int(1),
        };
        let (sum, c) = synth_strong_from_parts(&[part.clone(), part]).unwrap();
        assert_eq!(*sum.get(Subset::full(2)), int(2));
        assert_eq!(c.witnesses[&Subset::EMPTY].get(Subset::full(2)), int(2));
        let zero = StrongPart::Certified {
            f: &f,
            cert: &cert,
            coeff: int(0),
        };
        let (z, c) = synth_strong_from_parts(&[zero]).unwrap();
        assert!(z.is_zero() && c.witnesses.values().all(|g| g.weights.is_empty()));

        let inst = CoverageInstance::from_indices(vec![int(1), int(1)], vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        let (_, c) = synth_strong_from_parts(&[StrongPart::Coverage {
            instance: &inst,
            coeff: int(1),
        }])
        .unwrap();
        let g = &c.witnesses[&Subset::singleton(1)];
        assert_eq!(g.value(Subset::singleton(0)), int(0));
        assert_eq!(g.value(Subset::singleton(2)), int(0));

        let other = Matroid::uniform(1, 3).unwrap();
        let (f3, c3) = (
            other.to_setfunction(TableMode::Rank).unwrap(),
            synth_strong_matroid(&other).unwrap(),
        );
        let mixed = [
            StrongPart::Certified {
                f: &f,
                cert: &cert,
                coeff: int(1),
            },
            StrongPart::Certified {
                f: &f3,
                cert: &c3,
                coeff: int(1),
            },
        ];
        assert!(matches!(
            synth_strong_from_parts(&mixed),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn budget_additive_is_not_strong() {
        let f = budget();
        let r = search_strong_feasible(&f, Subset::EMPTY).unwrap();
        assert!(!r.is_feasible());
        let bad = StrongCertificate {
            n: 12,
            witnesses: BTreeMap::new(),
        };
        assert!(verify_strong2cov(&f, &bad).is_err());
    }

    #[test]
    fn strong_search_recovers_rank_certificate() {
        let f = Matroid::complete_graph(4)
            .unwrap()
            .to_setfunction(TableMode::Rank)
            .unwrap();
        let cert = search_strong_certificate(&f).unwrap().unwrap();
        assert!(verify_strong2cov(&f, &cert).unwrap().holds);
        // |S|^2 is supermodular, so already τ = ∅ fails.
        let sq = SetFunctionTable::from_fn(3, |s| int((s.len() * s.len()) as i64)).unwrap();
        let (tau, _) = search_strong_certificate(&sq).unwrap().unwrap_err();
        assert_eq!(tau, Subset::EMPTY);
    }
}
