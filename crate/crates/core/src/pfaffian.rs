//! Pfaffians of skew-symmetric matrices and the tridiagonal `ε` family.
//!
//! Indices in [`sub_pfaffian`] and [`consecutive_pair_pfaffian_sign`] are
//! 1-based, matching the index sequences `N - n + λ_n + 1` they are fed
//! with.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::scalar::Scalar;

/// Exact Pfaffians up to this dimension use expansion along the first row.
pub const EXPANSION_DIM_CAP: usize = 12;

/// Largest `M` accepted by [`dn_polynomial`].
pub const DN_DIM_CAP: usize = 20;

/// Square skew-symmetric matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SkewMatrix<T> {
    /// Validates skew-symmetry (which forces a zero diagonal).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "row {bad} has length {} in a {dim}×{dim} matrix",
                rows[bad].len()
            )));
        }
        for k in 0..dim {
            for l in k..dim {
                if rows[k][l] != -rows[l][k].clone() {
                    return Err(Error::NotSkew(k, l));
                }
            }
        }
        Ok(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the matrix from its strict upper triangle, `upper(k, l)` for
    /// `k < l` (0-based).
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = vec![T::zero(); dim * dim];
        for k in 0..dim {
            for l in k + 1..dim {
                let v = upper(k, l);
                entries[l * dim + k] = -v.clone();
                entries[k * dim + l] = v;
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at 0-based `(k, l)`.
    pub fn get(&self, k: usize, l: usize) -> &T {
        &self.entries[k * self.dim + l]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries
            .chunks(self.dim.max(1))
            .map(<[T]>::to_vec)
            .take(self.dim)
            .collect()
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| -v.clone()).collect(),
        }
    }

    /// Principal submatrix on 0-based `indices`, in the given order.
    pub fn principal(&self, indices: &[usize]) -> Self {
        let dim = indices.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for &k in indices {
            for &l in indices {
                entries.push(self.get(k, l).clone());
            }
        }
        Self { dim, entries }
    }

    /// Swaps index `a` with `b` in both rows and columns.
    pub fn swap_indices(&self, a: usize, b: usize) -> Self {
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.swap(a, b);
        self.principal(&order)
    }

    pub fn determinant(&self) -> T {
        determinant(self.rows())
    }

    /// Ordinary matrix product with a square matrix of the same size.
    pub fn matmul(&self, other: &Self) -> Vec<Vec<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(T::zero(), |acc, k| {
                            acc + self.get(i, k).clone() * other.get(k, j).clone()
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The Pfaffian; see [`pfaffian`].
    pub fn pfaffian(&self) -> T {
        pfaffian(self)
    }
}

/// Pfaffian of a skew-symmetric matrix. Odd dimensions give 0, the empty
/// matrix gives 1.
///
/// Exact scalars expand along the first row up to [`EXPANSION_DIM_CAP`] and
/// eliminate beyond it; floating scalars always eliminate, pivoting on the
/// largest entry of the current row.
pub fn pfaffian<T: Scalar>(m: &SkewMatrix<T>) -> T {
    if m.dim % 2 == 1 {
        return T::zero();
    }
    if T::EXACT && m.dim <= EXPANSION_DIM_CAP {
        let idx: Vec<usize> = (0..m.dim).collect();
        expand_first_row(m, &idx)
    } else {
        skew_elimination(m)
    }
}

fn expand_first_row<T: Scalar>(m: &SkewMatrix<T>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    let first = idx[0];
    let mut total = T::zero();
    for j in 1..idx.len() {
        let a = m.get(first, idx[j]);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos + 1 != j)
            .map(|(_, &v)| v)
            .collect();
        let term = a.clone() * expand_first_row(m, &rest);
        // sign (-1)^{j+1} with j counted from 1 in the reduced list
        total = if j % 2 == 1 {
            total + term
        } else {
            total - term
        };
    }
    total
}

/// Reduces the leading 2×2 block and recurses on its Schur complement:
/// `Pf(A) = a · Pf(A₂₂ + C B⁻¹ Cᵀ)` with `a = A[k][k+1]`, `C` the two
/// pivot columns below the block.
fn skew_elimination<T: Scalar>(m: &SkewMatrix<T>) -> T {
    let n = m.dim;
    let mut a = m.rows();
    let mut result = T::one();
    let mut k = 0;
    while k < n {
        let candidates = (k + 1..n).filter(|&j| !a[k][j].is_zero());
        let pivot = if T::EXACT {
            candidates.min()
        } else {
            candidates.max_by(|&x, &y| {
                a[k][x]
                    .magnitude()
                    .partial_cmp(&a[k][y].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        };
        let Some(p) = pivot else {
            return T::zero();
        };
        if p != k + 1 {
            a.swap(k + 1, p);
            for row in a.iter_mut() {
                row.swap(k + 1, p);
            }
            result = -result;
        }
        let piv = a[k][k + 1].clone();
        result = result * piv.clone();
        for i in k + 2..n {
            for j in i + 1..n {
                let corr = (a[i][k + 1].clone() * a[j][k].clone()
                    - a[i][k].clone() * a[j][k + 1].clone())
                    / piv.clone();
                let v = a[i][j].clone() + corr;
                a[j][i] = -v.clone();
                a[i][j] = v;
            }
        }
        k += 2;
    }
    result
}

fn require_even(m: usize) -> Result<()> {
    if m == 0 || m % 2 == 1 {
        Err(Error::OddDimension(m))
    } else {
        Ok(())
    }
}

/// `M×M` tridiagonal matrix with `ε_{k,k+1} = -1`, `ε_{k+1,k} = +1`.
pub fn build_epsilon<T: Scalar>(m: usize) -> Result<SkewMatrix<T>> {
    require_even(m)?;
    Ok(SkewMatrix::from_upper(m, |k, l| {
        if l == k + 1 {
            -T::one()
        } else {
            T::zero()
        }
    }))
}

/// The staircase inverse of [`build_epsilon`]: for 1-based `k < l`,
/// `(ε⁻¹)_{k,l} = 1` iff `k` is odd and `l` is even.
pub fn build_epsilon_inverse<T: Scalar>(m: usize) -> Result<SkewMatrix<T>> {
    require_even(m)?;
    Ok(SkewMatrix::from_upper(m, |k, l| {
        // 0-based: k even ⇔ 1-based odd
        if k % 2 == 0 && l % 2 == 1 {
            T::one()
        } else {
            T::zero()
        }
    }))
}

/// Entry `(k, l)` of `ε⁻¹` in any even dimension containing both indices
/// (1-based).
pub fn epsilon_inverse_entry(k: usize, l: usize) -> i8 {
    match k.cmp(&l) {
        std::cmp::Ordering::Less if k % 2 == 1 && l.is_multiple_of(2) => 1,
        std::cmp::Ordering::Greater if l % 2 == 1 && k.is_multiple_of(2) => -1,
        _ => 0,
    }
}

fn check_rows(rows: &[usize], dim: Option<usize>) -> Result<()> {
    if rows.len() % 2 == 1 {
        return Err(Error::IndexError(format!(
            "need an even number of indices, got {}",
            rows.len()
        )));
    }
    if rows.first() == Some(&0) {
        return Err(Error::IndexError("indices are 1-based".into()));
    }
    if rows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::IndexError(format!(
            "indices must be strictly increasing: {rows:?}"
        )));
    }
    if let (Some(d), Some(&last)) = (dim, rows.last()) {
        if last > d {
            return Err(Error::IndexError(format!(
                "index {last} exceeds dimension {d}"
            )));
        }
    }
    Ok(())
}

/// Pfaffian of the principal submatrix on strictly increasing 1-based
/// `rows`. The empty selection gives 1.
pub fn sub_pfaffian<T: Scalar>(m: &SkewMatrix<T>, rows: &[usize]) -> Result<T> {
    check_rows(rows, Some(m.dim()))?;
    let zero_based: Vec<usize> = rows.iter().map(|r| r - 1).collect();
    Ok(pfaffian(&m.principal(&zero_based)))
}

/// Predicts the Pfaffian of the principal submatrix of `ε⁻¹` on `rows`
/// without computing it.
///
/// The value is nonzero only if the complement of `rows` inside `1..=M`
/// (`M` the smallest even bound covering `rows`) splits into disjoint
/// adjacent pairs `{k, k+1}`; the surviving block then has the same
/// staircase form as `ε⁻¹` itself and Pfaffian `+1`. Moving the kept rows
/// to the top-left corner costs the sign `(-1)^{Σ (r_i - i)}`.
pub fn consecutive_pair_pfaffian_sign(rows: &[usize]) -> Result<i8> {
    check_rows(rows, None)?;
    let last = rows.last().copied().unwrap_or(0);
    let bound = last + last % 2;
    let kept: BTreeSet<usize> = rows.iter().copied().collect();
    let mut k = 1;
    while k <= bound {
        if kept.contains(&k) {
            k += 1;
        } else if k < bound && !kept.contains(&(k + 1)) {
            k += 2;
        } else {
            return Ok(0);
        }
    }
    let displacement: usize = rows.iter().enumerate().map(|(i, r)| r - (i + 1)).sum();
    Ok(if displacement.is_multiple_of(2) {
        1
    } else {
        -1
    })
}

/// A multilinear polynomial in `x₁, …, x_M` with integer coefficients,
/// stored as (sorted 1-based variable set, coefficient) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    pub vars: usize,
    pub terms: Vec<(Vec<usize>, i64)>,
}

impl MultilinearPoly {
    /// Coefficient of the monomial `∏_{k ∈ vars} x_k`.
    pub fn coefficient(&self, vars: &[usize]) -> i64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms
            .iter()
            .filter(|(m, _)| *m == key)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn evaluate<T: Scalar>(&self, x: &[T]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (mono, c)| {
            acc + mono
                .iter()
                .fold(T::from_i64(*c), |p, &k| p * x[k - 1].clone())
        })
    }
}

/// `D_M = det(diag(x) + ε⁻¹)` built by `D_M = D_{M-1} + x_M x_{M-1} D_{M-2}`
/// from `D₁ = 1`, `D₂ = 1 + x₁x₂`. Terms are listed in insertion order.
pub fn dn_polynomial(m: usize) -> Result<MultilinearPoly> {
    if m == 0 || m > DN_DIM_CAP {
        return Err(Error::InvalidArgument(format!(
            "D_M needs 1 ≤ M ≤ {DN_DIM_CAP}, got {m}"
        )));
    }
    let mut prev2: Vec<Vec<usize>> = vec![vec![]];
    let mut prev1: Vec<Vec<usize>> = vec![vec![]];
    for k in 2..=m {
        let mut next = prev1.clone();
        next.extend(prev2.iter().map(|mono| {
            let mut v = mono.clone();
            v.push(k - 1);
            v.push(k);
            v
        }));
        prev2 = std::mem::replace(&mut prev1, next);
    }
    Ok(MultilinearPoly {
        vars: m,
        terms: prev1.into_iter().map(|v| (v, 1)).collect(),
    })
}
