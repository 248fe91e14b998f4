//! Sparse polynomials that are multiaffine in `x_1..x_n`, optionally with an
//! extra homogenizing variable `y` that may appear with any power.
//!
//! The generating polynomial `p_f = Σ_S f(S) x^S` has no `y`; the
//! homogenization `q_f = Σ_S f(S) y^{n+1−|S|} x^S` does. Variable index 0 is
//! `y` whenever it is present, followed by `x_1..x_n`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::rational::{falling_factorial, Rational};
use crate::setfn::SetFunctionTable;
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub y: u32,
    pub x: Subset,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.y as usize + self.x.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    has_y: bool,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize, has_y: bool) -> Self {
        Polynomial {
            n,
            has_y,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `(y-power, x-set, coefficient)` triples; zero coefficients
    /// are dropped and repeated monomials summed.
    pub fn from_terms<I>(n: usize, has_y: bool, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, Subset, Rational)>,
    {
        let mut p = Polynomial::zero(n, has_y);
        for (y, x, c) in terms {
            if !x.is_subset_of(Subset::full(n)) {
                return Err(Error::InvalidSubset { subset: x, n });
            }
            if y > 0 && !has_y {
                return Err(Error::Malformed("y-power in a polynomial without y".into()));
            }
            p.add_term(Monomial { y, x }, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_y(&self) -> bool {
        self.has_y
    }

    /// Number of variables including `y` when present.
    pub fn variable_count(&self) -> usize {
        self.n + usize::from(self.has_y)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, y: u32, x: Subset) -> Rational {
        self.terms
            .get(&Monomial { y, x })
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The common total degree, or `None` for the zero polynomial or a
    /// non-homogeneous one.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    /// Variable indices (y = 0 when present) occurring in a monomial.
    pub fn monomial_variables(&self, m: &Monomial) -> Vec<usize> {
        let shift = usize::from(self.has_y);
        let mut v = Vec::with_capacity(m.x.len() + 1);
        if m.y > 0 {
            v.push(0);
        }
        v.extend(m.x.iter().map(|i| i + shift));
        v
    }

    /// Sorted indices of the variables that occur in some monomial.
    pub fn active_variables(&self) -> Vec<usize> {
        let mut seen = vec![false; self.variable_count()];
        for m in self.terms.keys() {
            for v in self.monomial_variables(m) {
                seen[v] = true;
            }
        }
        (0..seen.len()).filter(|&v| seen[v]).collect()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.n, self.has_y);
        for (m, v) in &self.terms {
            out.add_term(*m, v * c);
        }
        out
    }

    /// `∂^τ ∂_y^k p`, with the factorials from repeated `∂_y` kept exact.
    pub fn derive(&self, tau: Subset, k: u32) -> Result<Polynomial> {
        if !tau.is_subset_of(Subset::full(self.n)) {
            return Err(Error::InvalidSubset { subset: tau, n: self.n });
        }
        if k > 0 && !self.has_y {
            return Err(Error::Malformed("y-derivative of a polynomial without y".into()));
        }
        let mut out = Polynomial::zero(self.n, self.has_y);
        for (m, c) in &self.terms {
            if m.y < k || !tau.is_subset_of(m.x) {
                continue;
            }
            let factor = falling_factorial(m.y as usize, k as usize);
            out.add_term(
                Monomial {
                    y: m.y - k,
                    x: m.x.difference(tau),
                },
                c * Rational::from_integer(factor),
            );
        }
        Ok(out)
    }

    /// The constant Hessian of a 2-homogeneous polynomial, indexed by all
    /// variables (y first when present).
    pub fn quadratic_hessian(&self) -> Result<SymMatrix> {
        if self.terms.keys().any(|m| m.degree() != 2) {
            return Err(Error::NotQuadratic);
        }
        let shift = usize::from(self.has_y);
        let mut h = SymMatrix::zeros(self.variable_count());
        for (m, c) in &self.terms {
            let xs: Vec<usize> = m.x.iter().map(|i| i + shift).collect();
            match (m.y, xs.as_slice()) {
                (2, []) => h.set(0, 0, c * Rational::from_integer(2.into())),
                (1, [i]) => h.set(0, *i, c.clone()),
                (0, [i, j]) => h.set(*i, *j, c.clone()),
                _ => return Err(Error::NotQuadratic),
            }
        }
        Ok(h)
    }

    /// Exact evaluation; `point` lists `y` first when present.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.variable_count() {
            return Err(Error::DimensionMismatch {
                expected: self.variable_count(),
                got: point.len(),
            });
        }
        let shift = usize::from(self.has_y);
        Ok(self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            let mut t = c.clone();
            if m.y > 0 {
                t *= num_traits::pow(point[0].clone(), m.y as usize);
            }
            for i in m.x.iter() {
                t *= &point[i + shift];
            }
            acc + t
        }))
    }

    /// Substitutes `y = value`, producing a polynomial without `y`.
    pub fn specialize_y(&self, value: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.n, false);
        for (m, c) in &self.terms {
            let factor = num_traits::pow(value.clone(), m.y as usize);
            out.add_term(Monomial { y: 0, x: m.x }, c * factor);
        }
        out
    }
}

/// `p_f = Σ_S f(S) x^S`.
pub fn generating_poly(f: &SetFunctionTable) -> Polynomial {
    let mut p = Polynomial::zero(f.n(), false);
    for (s, v) in f.support() {
        p.add_term(Monomial { y: 0, x: s }, v.clone());
    }
    p
}

/// `q_f = Σ_{i=0}^{n} y^{n+1−i} Σ_{|S|=i} f(S) x^S`, homogeneous of degree `n+1`.
pub fn homogenize(f: &SetFunctionTable) -> Polynomial {
    let n = f.n();
    let mut q = Polynomial::zero(n, true);
    for (s, v) in f.support() {
        q.add_term(
            Monomial {
                y: (n + 1 - s.len()) as u32,
                x: s,
            },
            v.clone(),
        );
    }
    q
}

/// `y^a` as a single-term polynomial over `n` x-variables.
pub fn y_power(n: usize, a: u32) -> Polynomial {
    let mut p = Polynomial::zero(n, true);
    p.add_term(Monomial { y: a, x: Subset::EMPTY }, Rational::one());
    p
}
