//! Exact phase-one simplex for linear feasibility over nonnegative variables.
//!
//! Exact rationals throughout; Bland's rule guarantees termination.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `{ x ≥ 0 : constraints }` over `n_vars` variables.
#[derive(Clone, Debug, Default)]
pub struct FeasibilityProblem {
    pub n_vars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    /// The minimum total artificial infeasibility, which is strictly positive.
    Infeasible {
        phase_one_optimum: Rational,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

impl FeasibilityProblem {
    pub fn new(n_vars: usize) -> Self {
        FeasibilityProblem {
            n_vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Whether `x` is nonnegative and satisfies every constraint exactly.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.n_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = c.coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j]);
                match c.relation {
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Le => lhs <= c.rhs,
                }
            })
    }

    /// Phase one of the revised simplex method: the basis inverse is kept
    /// explicitly and columns are priced in index order, stopping at the
    /// first improving one (Bland's rule).
    pub fn solve(&self) -> Feasibility {
        let m = self.constraints.len();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.n_vars];
        let mut rhs: Vec<Rational> = Vec::with_capacity(m);
        let mut slacks: Vec<Vec<(usize, Rational)>> = Vec::new();
        for (r, c) in self.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sign = |v: Rational| if flip { -v } else { v };
            let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
            for (j, a) in &c.coeffs {
                *merged.entry(*j).or_insert_with(Rational::zero) += a;
            }
            for (j, a) in merged {
                if !a.is_zero() {
                    columns[j].push((r, sign(a)));
                }
            }
            match c.relation {
                Relation::Eq => {}
                Relation::Ge => slacks.push(vec![(r, sign(-Rational::one()))]),
                Relation::Le => slacks.push(vec![(r, sign(Rational::one()))]),
            }
            rhs.push(sign(c.rhs.clone()));
        }
        columns.extend(slacks);
        let art0 = columns.len();
        columns.extend((0..m).map(|r| vec![(r, Rational::one())]));

        let mut basis: Vec<usize> = (art0..art0 + m).collect();
        let mut binv: Vec<Vec<Rational>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let mut xb = rhs;

        loop {
            // Simplex multipliers y = c_B B^{-1}, with c = 1 on artificials.
            let mut y = vec![Rational::zero(); m];
            for (i, &b) in basis.iter().enumerate() {
                if b >= art0 {
                    for (yk, v) in y.iter_mut().zip(&binv[i]) {
                        if !v.is_zero() {
                            *yk += v;
                        }
                    }
                }
            }
            let entering = columns.iter().enumerate().find(|(j, col)| {
                let cost = if *j >= art0 { Rational::one() } else { Rational::zero() };
                let priced = col.iter().fold(cost, |acc, (r, a)| acc - a * &y[*r]);
                priced.is_negative()
            });
            let Some((q, col)) = entering else { break };
            let d: Vec<Rational> = binv
                .iter()
                .map(|row| col.iter().fold(Rational::zero(), |acc, (r, a)| acc + a * &row[*r]))
                .collect();
            let mut leave: Option<(usize, Rational)> = None;
            for (i, di) in d.iter().enumerate() {
                if !di.is_positive() {
                    continue;
                }
                let ratio = &xb[i] / di;
                let better = match &leave {
                    None => true,
                    Some((best, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*best]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // Phase one is bounded below by zero, so a pivot row always exists.
            let (p, _) = leave.expect("phase-one objective is bounded");
            let inv = d[p].recip();
            for v in binv[p].iter_mut().filter(|v| !v.is_zero()) {
                *v *= &inv;
            }
            xb[p] *= &inv;
            let prow = std::mem::take(&mut binv[p]);
            let support: Vec<usize> = (0..m).filter(|&k| !prow[k].is_zero()).collect();
            for (i, di) in d.iter().enumerate() {
                if i == p || di.is_zero() {
                    continue;
                }
                for &k in &support {
                    binv[i][k] -= di * &prow[k];
                }
                let delta = di * &xb[p];
                xb[i] -= delta;
            }
            binv[p] = prow;
            basis[p] = q;
        }

        let infeasibility = basis
            .iter()
            .zip(&xb)
            .filter(|(b, _)| **b >= art0)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_zero() {
            let mut x = vec![Rational::zero(); self.n_vars];
            for (&b, v) in basis.iter().zip(xb) {
                if b < self.n_vars {
                    x[b] = v;
                }
            }
            Feasibility::Feasible(x)
        } else {
            Feasibility::Infeasible {
                phase_one_optimum: infeasibility,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn simple_feasible() {
        // x + y = 3, x − y ≥ 1, y ≥ 1/2
        let mut lp = FeasibilityProblem::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(3));
        lp.push(vec![(0, int(1)), (1, int(-1))], Relation::Ge, int(1));
        lp.push(vec![(1, int(1))], Relation::Ge, frac(1, 2));
        let Feasibility::Feasible(x) = lp.solve() else {
            panic!("expected feasible")
        };
        assert!(lp.satisfied_by(&x));
    }

    #[test]
    fn simple_infeasible() {
        // x + y = 1, x + y ≥ 2
        let mut lp = FeasibilityProblem::new(2);
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1));
        lp.push(vec![(0, int(1)), (1, int(1))], Relation::Ge, int(2));
        assert_eq!(
            lp.solve(),
            Feasibility::Infeasible {
                phase_one_optimum: int(1)
            }
        );
    }

    #[test]
    fn negative_rhs_and_le() {
        // −x ≤ −2 and x ≤ 5
        let mut lp = FeasibilityProblem::new(1);
        lp.push(vec![(0, int(-1))], Relation::Le, int(-2));
        lp.push(vec![(0, int(1))], Relation::Le, int(5));
        let Feasibility::Feasible(x) = lp.solve() else { panic!() };
        assert!(x[0] >= int(2) && x[0] <= int(5));
        // x ≥ 0 with x = −1 is infeasible
        let mut lp = FeasibilityProblem::new(1);
        lp.push(vec![(0, int(1))], Relation::Eq, int(-1));
        assert!(!lp.solve().is_feasible());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling example, recast as feasibility with an objective cut.
        let mut lp = FeasibilityProblem::new(4);
        lp.push(
            vec![(0, frac(1, 4)), (1, int(-60)), (2, frac(-1, 25)), (3, int(9))],
            Relation::Le,
            int(0),
        );
        lp.push(
            vec![(0, frac(1, 2)), (1, int(-90)), (2, frac(-1, 50)), (3, int(3))],
            Relation::Le,
            int(0),
        );
        lp.push(vec![(2, int(1))], Relation::Le, int(1));
        lp.push(
            vec![(0, frac(3, 4)), (1, int(-150)), (2, frac(1, 50)), (3, int(-6))],
            Relation::Ge,
            frac(1, 20),
        );
        let Feasibility::Feasible(x) = lp.solve() else { panic!() };
        assert!(lp.satisfied_by(&x));
    }

    #[test]
    fn empty_problem() {
        assert_eq!(
            FeasibilityProblem::new(2).solve(),
            Feasibility::Feasible(vec![int(0), int(0)])
        );
    }
}
