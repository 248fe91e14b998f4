//! Dense symmetric matrices over exact rationals.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<Rational>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            data: vec![Rational::zero(); dim * dim],
        }
    }

    /// Builds from rows, checking squareness and exact symmetry.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        let m = SymMatrix { dim, data };
        m.check_symmetric()?;
        Ok(m)
    }

    pub fn from_fn<F: Fn(usize, usize) -> Rational>(dim: usize, f: F) -> Result<Self> {
        let rows = (0..dim).map(|i| (0..dim).map(|j| f(i, j)).collect()).collect();
        SymMatrix::from_rows(rows)
    }

    pub fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if self[(i, j)] != self[(j, i)] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[j * self.dim + i] = v.clone();
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    /// The principal submatrix on `indices` (in the given order).
    pub fn principal(&self, indices: &[usize]) -> SymMatrix {
        let dim = indices.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &i in indices {
            for &j in indices {
                data.push(self[(i, j)].clone());
            }
        }
        SymMatrix { dim, data }
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(SymMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `P A Pᵀ` for a (not necessarily square) `P` given as rows.
    #[allow(clippy::needless_range_loop)]
    pub fn congruence(&self, p: &[Vec<Rational>]) -> Result<SymMatrix> {
        if let Some(row) = p.iter().find(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: row.len(),
            });
        }
        let m = p.len();
        let pa: Vec<Vec<Rational>> = p
            .iter()
            .map(|row| {
                (0..self.dim)
                    .map(|j| {
                        row.iter()
                            .enumerate()
                            .fold(Rational::zero(), |acc, (k, v)| acc + v * &self[(k, j)])
                    })
                    .collect()
            })
            .collect();
        let mut out = SymMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = pa[i]
                    .iter()
                    .zip(&p[j])
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.dim + j]
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()))
            .finish()
    }
}
