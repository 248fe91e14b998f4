//! Exact log-concavity machinery.
//!
//! Every sign condition is decided by symmetric congruence diagonalization
//! over the rationals, so inertia is exact (Sylvester's law). The two
//! certification drivers sweep all derivative cells of a homogeneous
//! polynomial, checking indecomposability below degree 2 and "at most one
//! positive eigenvalue" of the constant Hessian at degree 2. Passing is a
//! sufficient condition for complete log-concavity; failing is inconclusive
//! except for a quadratic polynomial, where the Hessian test is exact.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::par;
use crate::poly::{generating_poly, homogenize, Polynomial};
use crate::rational::{binomial, factorial, Rational};
use crate::setfn::{
    homogeneous_restrict, mobius_coverage_weights, CoverageInstance, CoverageWeights, SetFunction, SetFunctionTable,
};
use crate::subset::{subsets_up_to, Subset};

/// Largest ground set swept by [`certify_clc_homogeneous`].
pub const HOMOGENEOUS_CAP: usize = 14;
/// Largest ground set swept by [`certify_clc_homogenization`].
pub const HOMOGENIZATION_CAP: usize = 10;
/// Largest coverage instance accepted by [`mainpsd_witness`].
pub const MAINPSD_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_zero: usize,
    pub n_neg: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_pos + self.n_zero + self.n_neg
    }
}

/// Sign counts of the eigenvalues of a symmetric rational matrix.
///
/// Nonzero diagonal pivots are eliminated one at a time. When the remaining
/// diagonal is zero but some `a_ij ≠ 0`, the block `[[0, a], [a, 0]]`
/// contributes one positive and one negative eigenvalue and is eliminated
/// as a 2×2 pivot.
pub fn inertia(h: &SymMatrix) -> Result<Inertia> {
    h.check_symmetric()?;
    let mut a: Vec<Vec<Rational>> = h.rows().map(<[Rational]>::to_vec).collect();
    let mut rem: Vec<usize> = (0..h.dim()).collect();
    let mut out = Inertia {
        n_pos: 0,
        n_zero: 0,
        n_neg: 0,
    };
    while !rem.is_empty() {
        if let Some(pos) = rem.iter().position(|&k| !a[k][k].is_zero()) {
            let k = rem.swap_remove(pos);
            let pivot = a[k][k].clone();
            if pivot.is_positive() {
                out.n_pos += 1;
            } else {
                out.n_neg += 1;
            }
            let col: Vec<Rational> = rem.iter().map(|&i| &a[i][k] / &pivot).collect();
            for (ci, &i) in col.iter().zip(&rem) {
                if ci.is_zero() {
                    continue;
                }
                for &j in &rem {
                    let delta = ci * &a[k][j];
                    a[i][j] -= delta;
                }
            }
            continue;
        }
        let pair = rem.iter().enumerate().find_map(|(p, &i)| {
            rem[p + 1..]
                .iter()
                .position(|&j| !a[i][j].is_zero())
                .map(|q| (p, p + 1 + q))
        });
        let Some((p, q)) = pair else {
            out.n_zero += rem.len();
            break;
        };
        let (i, j) = (rem[p], rem[q]);
        rem.remove(q);
        rem.remove(p);
        out.n_pos += 1;
        out.n_neg += 1;
        let b = a[i][j].clone();
        // Schur complement of [[0, b], [b, 0]]: a_rs -= (a_ri a_js + a_rj a_is) / b
        let ri: Vec<Rational> = rem.iter().map(|&r| &a[r][i] / &b).collect();
        let rj: Vec<Rational> = rem.iter().map(|&r| &a[r][j] / &b).collect();
        for (x, &r) in rem.iter().enumerate() {
            for &s in &rem {
                let delta = &ri[x] * &a[j][s] + &rj[x] * &a[i][s];
                a[r][s] -= delta;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub indecomposable: bool,
    /// When decomposable: the component holding the smallest occurring
    /// variable, and the remaining occurring variables.
    pub split: Option<(Vec<usize>, Vec<usize>)>,
}

/// Connectivity of the variable co-occurrence graph. The zero polynomial
/// counts as indecomposable.
pub fn is_indecomposable(p: &Polynomial) -> Result<Decomposition> {
    let shift = usize::from(p.has_y());
    let mut components: Vec<u64> = Vec::new();
    for (m, _) in p.terms() {
        if m.degree() == 0 {
            return Err(Error::ConstantTerm);
        }
        let mut mask = (m.x.bits() as u64) << shift;
        if m.y > 0 {
            mask |= 1;
        }
        let mut merged = mask;
        components.retain(|&c| {
            if c & mask != 0 {
                merged |= c;
                false
            } else {
                true
            }
        });
        components.push(merged);
    }
    if components.len() <= 1 {
        return Ok(Decomposition {
            indecomposable: true,
            split: None,
        });
    }
    let all = components.iter().fold(0u64, |acc, c| acc | c);
    let lowest = all & all.wrapping_neg();
    let first = *components
        .iter()
        .find(|&&c| c & lowest != 0)
        .expect("lowest bit is covered");
    let bits = |mask: u64| (0..64).filter(|b| mask >> b & 1 == 1).collect::<Vec<usize>>();
    Ok(Decomposition {
        indecomposable: false,
        split: Some((bits(first), bits(all & !first))),
    })
}

/// Whether a 2-homogeneous polynomial (or zero) is log-concave, decided by
/// the inertia of its constant Hessian.
pub fn quadratic_log_concave(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    Ok(inertia(&p.quadratic_hessian()?)?.n_pos <= 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// All sufficient conditions hold.
    Certified,
    /// Some condition failed; complete log-concavity is not decided.
    ConditionsFail,
    /// The polynomial is quadratic and its Hessian has two or more positive
    /// eigenvalues, so it is not log-concave.
    Refuted,
    /// The polynomial is identically zero.
    Vacuous,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureReason {
    Decomposable,
    Inertia,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellFailure {
    pub tau: Subset,
    /// Order of the `y`-derivative (always 0 for the homogeneous-part driver).
    pub k: u32,
    pub reason: FailureReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_pos: Option<usize>,
}

impl std::fmt::Display for CellFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.reason {
            FailureReason::Inertia => write!(f, "inertia n_pos={} at tau={}", self.n_pos.unwrap_or(0), self.tau)?,
            FailureReason::Decomposable => write!(f, "decomposable at tau={}", self.tau)?,
        }
        if self.k > 0 {
            write!(f, " k={}", self.k)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub checks: usize,
    pub failure: Option<CellFailure>,
}

impl CertificationReport {
    pub fn note(&self) -> &'static str {
        match self.verdict {
            Verdict::Certified => "sufficient conditions hold: completely log-concave",
            Verdict::ConditionsFail => {
                "sufficient conditions fail; this does not prove the polynomial is not completely log-concave"
            }
            Verdict::Refuted => "quadratic Hessian has more than one positive eigenvalue: not log-concave",
            Verdict::Vacuous => "polynomial is identically zero",
        }
    }
}

struct Cell {
    tau: Subset,
    k: u32,
    quadratic: bool,
}

struct CellOutcome {
    checks: usize,
    failure: Option<CellFailure>,
}

fn check_cell(p: &Polynomial, cell: &Cell) -> Result<CellOutcome> {
    let d = p.derive(cell.tau, cell.k)?;
    if d.is_zero() {
        return Ok(CellOutcome {
            checks: 1 + usize::from(cell.quadratic),
            failure: None,
        });
    }
    let fail = |reason, n_pos| CellFailure {
        tau: cell.tau,
        k: cell.k,
        reason,
        n_pos,
    };
    if !is_indecomposable(&d)?.indecomposable {
        return Ok(CellOutcome {
            checks: 1,
            failure: Some(fail(FailureReason::Decomposable, None)),
        });
    }
    if !cell.quadratic {
        return Ok(CellOutcome {
            checks: 1,
            failure: None,
        });
    }
    // Normalize by the factorial from the y-derivatives; inertia is unchanged.
    let norm = Rational::new(BigInt::from(1), factorial(cell.k as usize));
    let h = d.scale(&norm).quadratic_hessian()?;
    let i = inertia(&h)?;
    Ok(CellOutcome {
        checks: 2,
        failure: (i.n_pos > 1).then(|| fail(FailureReason::Inertia, Some(i.n_pos))),
    })
}

fn run_cells(p: &Polynomial, cells: &[Cell]) -> Result<(usize, Option<CellFailure>)> {
    let outcomes = par::map(cells, |c| check_cell(p, c));
    let mut checks = 0;
    let mut first = None;
    for o in outcomes {
        let o = o?;
        checks += o.checks;
        if first.is_none() {
            first = o.failure;
        }
    }
    Ok((checks, first))
}

fn cap_check(what: &'static str, got: usize, cap: usize) -> Result<()> {
    if got > cap {
        return Err(Error::CapExceeded { what, got, cap });
    }
    Ok(())
}

/// Sufficient-condition certificate that `p = generating_poly(f^(d))` is
/// completely log-concave.
pub fn certify_clc_homogeneous(f: &SetFunctionTable, d: usize) -> Result<CertificationReport> {
    certify_clc_homogeneous_with_cap(f, d, HOMOGENEOUS_CAP)
}

pub fn certify_clc_homogeneous_with_cap(f: &SetFunctionTable, d: usize, cap: usize) -> Result<CertificationReport> {
    cap_check("homogeneous certification ground set", f.n(), cap)?;
    if d < 2 || d > f.n() {
        return Err(Error::Malformed(format!("degree d = {d} outside 2..={}", f.n())));
    }
    let p = generating_poly(&homogeneous_restrict(f, d));
    if p.is_zero() {
        return Ok(CertificationReport {
            verdict: Verdict::Vacuous,
            checks: 0,
            failure: None,
        });
    }
    // Only 0/1 multi-indices give nonzero derivatives of a multiaffine p.
    let cells: Vec<Cell> = subsets_up_to(f.ground(), d - 2)
        .into_iter()
        .map(|tau| Cell {
            tau,
            k: 0,
            quadratic: tau.len() == d - 2,
        })
        .collect();
    let (checks, failure) = run_cells(&p, &cells)?;
    let verdict = match &failure {
        None => Verdict::Certified,
        Some(fl) if d == 2 && fl.reason == FailureReason::Inertia => Verdict::Refuted,
        Some(_) => Verdict::ConditionsFail,
    };
    Ok(CertificationReport {
        verdict,
        checks,
        failure,
    })
}

/// Sufficient-condition certificate that the homogenization `q_f` is
/// completely log-concave.
pub fn certify_clc_homogenization(f: &SetFunctionTable) -> Result<CertificationReport> {
    certify_clc_homogenization_with_cap(f, HOMOGENIZATION_CAP)
}

pub fn certify_clc_homogenization_with_cap(f: &SetFunctionTable, cap: usize) -> Result<CertificationReport> {
    let n = f.n();
    cap_check("homogenization certification ground set", n, cap)?;
    let q = homogenize(f);
    if q.is_zero() {
        return Ok(CertificationReport {
            verdict: Verdict::Vacuous,
            checks: 0,
            failure: None,
        });
    }
    // q has degree n + 1; derivative cells of total order ≤ n − 1.
    let top = n - 1;
    let cells: Vec<Cell> = subsets_up_to(f.ground(), top)
        .into_iter()
        .flat_map(|tau| {
            (0..=(top - tau.len()) as u32).map(move |k| Cell {
                tau,
                k,
                quadratic: tau.len() + k as usize == top,
            })
        })
        .collect();
    let (checks, failure) = run_cells(&q, &cells)?;
    let verdict = match &failure {
        None => Verdict::Certified,
        Some(fl) if n == 1 && fl.reason == FailureReason::Inertia => Verdict::Refuted,
        Some(_) => Verdict::ConditionsFail,
    };
    Ok(CertificationReport {
        verdict,
        checks,
        failure,
    })
}

/// `a + b y + c z + d yz` with nonnegative coefficients is log-concave iff `2bc ≥ ad`.
pub fn two_by_two(a: &Rational, b: &Rational, c: &Rational, d: &Rational) -> Result<bool> {
    if [a, b, c, d].iter().any(|v| v.is_negative()) {
        return Err(Error::NegativeInput("two_by_two coefficients".into()));
    }
    Ok(Rational::from_integer(BigInt::from(2)) * b * c >= a * d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UlcReport {
    pub holds: bool,
    pub first_failure: Option<usize>,
}

/// `(c_k / C(n+1,k))² ≥ (c_{k−1} / C(n+1,k−1)) (c_{k+1} / C(n+1,k+1))` for
/// every `1 < k < n`, where the sequence is `c_0..c_n`.
pub fn ulc_check(c: &[Rational]) -> UlcReport {
    let n = c.len().saturating_sub(1);
    let normalized: Vec<Rational> = c
        .iter()
        .enumerate()
        .map(|(k, v)| v / Rational::from_integer(binomial(n + 1, k)))
        .collect();
    let first_failure = (2..n).find(|&k| &normalized[k] * &normalized[k] < &normalized[k - 1] * &normalized[k + 1]);
    UlcReport {
        holds: first_failure.is_none(),
        first_failure,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainPsdWitness {
    /// `D(i,i) = g({i})`.
    pub diagonal: Vec<Rational>,
    /// `R = (DJ + JD) − ∇² p_{g^(2)}`.
    pub r: SymMatrix,
    pub weights: CoverageWeights,
    /// Whether `R = Σ_T x_T B_T + D` holds entrywise.
    pub identity_holds: bool,
    /// Inertia of `R − D`.
    pub gap_inertia: Inertia,
}

impl MainPsdWitness {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.gap_inertia.n_neg == 0
    }
}

/// Builds `R` for a coverage function `g` and checks that `R − D` equals the
/// nonnegative combination `Σ x_T B_T` and is positive semidefinite.
#[allow(clippy::needless_range_loop)]
pub fn mainpsd_witness(g: &CoverageInstance) -> Result<MainPsdWitness> {
    let m = g.n();
    cap_check("coverage instance", m, MAINPSD_CAP)?;
    let table = g.materialize()?;
    let diagonal: Vec<Rational> = (0..m).map(|i| table.get(Subset::singleton(i)).clone()).collect();
    let hess = generating_poly(&homogeneous_restrict(&table, 2)).quadratic_hessian()?;
    let dj = SymMatrix::from_fn(m, |i, j| &diagonal[i] + &diagonal[j])?;
    let r = dj.sub(&hess)?;

    let weights = mobius_coverage_weights(&table)?.weights;
    if let Some((t, x)) = weights.weights.iter().find(|(_, x)| x.is_negative()) {
        return Err(Error::NotCoverage {
            subset: *t,
            weight: x.to_string(),
        });
    }
    let mut sum = SymMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let pair = Subset::singleton(i).with(j);
            let mut v = weights
                .weights
                .iter()
                .filter(|(t, _)| pair.is_subset_of(**t))
                .fold(Rational::zero(), |acc, (_, x)| acc + x);
            if i == j {
                v += &diagonal[i];
            }
            sum.set(i, j, v);
        }
    }
    let identity_holds = sum == r;
    let d = SymMatrix::from_fn(m, |i, j| if i == j { diagonal[i].clone() } else { Rational::zero() })?;
    let gap_inertia = inertia(&r.sub(&d)?)?;
    Ok(MainPsdWitness {
        diagonal,
        r,
        weights,
        identity_holds,
        gap_inertia,
    })
}
