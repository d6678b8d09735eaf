//! Symmetric functions evaluated at a point set.
//!
//! Schur functions come in three flavours: a sum over semistandard
//! tableaux (reference, no division), Jacobi–Trudi determinants in `h` or
//! `e` (fast path), and the bialternant ratio of two determinants
//! (cross-check only, fails on coinciding points).

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::partitions::{enumerate, hooks_of, Partition};
use crate::scalar::Scalar;

/// Largest weight accepted by [`schur_tableau`].
pub const TABLEAU_WEIGHT_CAP: usize = 12;

/// A nonempty multiset of points `z₁, …, z_N` over one scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    values: Vec<T>,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every point multiplied by `c`.
    pub fn scaled(&self, c: &T) -> Self {
        Self {
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }
}

/// `e_0, …, e_N`: coefficients of `∏ (1 + z_i x)`.
pub fn elementary_all<T: Scalar>(pts: &PointSet<T>) -> Vec<T> {
    let n = pts.len();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[0] = T::one();
    for (i, z) in pts.values().iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let v = coeffs[k].clone() + z.clone() * coeffs[k - 1].clone();
            coeffs[k] = v;
        }
    }
    coeffs
}

/// `e_n(z)`; zero for `n > N`.
pub fn elementary<T: Scalar>(n: usize, pts: &PointSet<T>) -> T {
    elementary_all(pts).get(n).cloned().unwrap_or_else(T::zero)
}

/// `h_0, …, h_max`, expanding `∏ 1/(1 - z_i x)` one factor at a time.
pub fn complete_upto<T: Scalar>(max: usize, pts: &PointSet<T>) -> Vec<T> {
    let mut coeffs = vec![T::zero(); max + 1];
    coeffs[0] = T::one();
    for z in pts.values() {
        for k in 1..=max {
            let v = coeffs[k].clone() + z.clone() * coeffs[k - 1].clone();
            coeffs[k] = v;
        }
    }
    coeffs
}

/// `h_n(z)`.
pub fn complete<T: Scalar>(n: usize, pts: &PointSet<T>) -> T {
    complete_upto(n, pts).pop().expect("nonempty")
}

/// `t_n(z) = Σ z_i^n`.
pub fn power_sum<T: Scalar>(n: usize, pts: &PointSet<T>) -> T {
    pts.values().iter().fold(T::zero(), |acc, z| acc + z.pow(n))
}

/// Schur function as a sum of monomial weights over semistandard Young
/// tableaux of shape `λ` with entries in `1..=N`.
pub fn schur_tableau<T: Scalar>(lambda: &Partition, pts: &PointSet<T>) -> Result<T> {
    let weight = lambda.weight();
    if weight > TABLEAU_WEIGHT_CAP {
        return Err(Error::TableauTooLarge {
            weight,
            cap: TABLEAU_WEIGHT_CAP,
        });
    }
    if lambda.len() > pts.len() {
        return Ok(T::zero());
    }
    let cells: Vec<(usize, usize)> = lambda
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    let mut grid: Vec<Vec<usize>> = lambda.parts().iter().map(|&l| vec![0; l]).collect();
    let mut total = T::zero();
    fill_tableau(&cells, 0, &mut grid, pts.values(), T::one(), &mut total);
    Ok(total)
}

fn fill_tableau<T: Scalar>(
    cells: &[(usize, usize)],
    idx: usize,
    grid: &mut [Vec<usize>],
    z: &[T],
    weight: T,
    total: &mut T,
) {
    let Some(&(r, c)) = cells.get(idx) else {
        *total = total.clone() + weight;
        return;
    };
    let lo_row = if c > 0 { grid[r][c - 1] } else { 0 };
    let lo_col = if r > 0 { grid[r - 1][c] + 1 } else { 0 };
    // column strictness leaves room for the rows still below this cell
    let rows_below = grid[r + 1..].iter().filter(|row| row.len() > c).count();
    let hi = z.len() - rows_below;
    for v in lo_row.max(lo_col)..hi {
        grid[r][c] = v;
        fill_tableau(
            cells,
            idx + 1,
            grid,
            z,
            weight.clone() * z[v].clone(),
            total,
        );
    }
}

/// Jacobi–Trudi in complete symmetric functions:
/// `σ_λ = det(h_{λ_i - i + j})`, size `ℓ(λ)`.
pub fn schur_jacobi_trudi<T: Scalar>(lambda: &Partition, pts: &PointSet<T>) -> T {
    if lambda.len() > pts.len() {
        return T::zero();
    }
    let l = lambda.len();
    let h = complete_upto(lambda.first() + l, pts);
    jacobi_trudi_matrix(lambda, &h)
}

/// Dual Jacobi–Trudi in elementary symmetric functions:
/// `σ_λ = det(e_{λ'_i - i + j})`, size `λ₁`.
pub fn schur_jacobi_trudi_dual<T: Scalar>(lambda: &Partition, pts: &PointSet<T>) -> T {
    if lambda.len() > pts.len() {
        return T::zero();
    }
    let e = elementary_all(pts);
    jacobi_trudi_matrix(&lambda.conjugate(), &e)
}

fn jacobi_trudi_matrix<T: Scalar>(shape: &Partition, seq: &[T]) -> T {
    let l = shape.len();
    let entry = |k: isize| -> T {
        if k < 0 {
            T::zero()
        } else {
            seq.get(k as usize).cloned().unwrap_or_else(T::zero)
        }
    };
    let m: Vec<Vec<T>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| entry(shape.part(i) as isize - i as isize + j as isize))
                .collect()
        })
        .collect();
    determinant(m)
}

/// Bialternant ratio `det(z_m^{N-n+λ_n}) / det(z_m^{N-n})`.
///
/// Fails with [`Error::DegeneratePoints`] when two points are equal.
pub fn schur_vandermonde<T: Scalar>(lambda: &Partition, pts: &PointSet<T>) -> Result<T> {
    let z = pts.values();
    let n = z.len();
    for i in 0..n {
        for j in i + 1..n {
            if z[i] == z[j] {
                return Err(Error::DegeneratePoints);
            }
        }
    }
    if lambda.len() > n {
        return Ok(T::zero());
    }
    let lam = lambda.padded(n);
    let alternant = |shift: &dyn Fn(usize) -> usize| -> T {
        let m = z
            .iter()
            .map(|zm| (0..n).map(|col| zm.pow(n - 1 - col + shift(col))).collect())
            .collect();
        determinant(m)
    };
    let num = alternant(&|col| lam[col]);
    let den = alternant(&|_| 0);
    if den.is_zero() {
        return Err(Error::DegeneratePoints);
    }
    Ok(num / den)
}

/// Right side of `t_n = Σ_k (-1)^{n-k} σ_{(k,1^{n-k})}`, evaluated term by
/// term with Jacobi–Trudi.
pub fn hook_expand_power_sum<T: Scalar>(n: usize, pts: &PointSet<T>) -> T {
    hooks_of(n).fold(T::zero(), |acc, (hook, sign)| {
        let s = schur_jacobi_trudi(&hook, pts);
        if sign > 0 {
            acc + s
        } else {
            acc - s
        }
    })
}

/// `∏_j ∏_k (1 + x_j z_k)`.
pub fn dual_cauchy_lhs<T: Scalar>(xs: &PointSet<T>, zs: &PointSet<T>) -> T {
    let mut acc = T::one();
    for x in xs.values() {
        for z in zs.values() {
            acc = acc * (T::one() + x.clone() * z.clone());
        }
    }
    acc
}

/// `Σ_λ σ_{λ'}(x) σ_λ(z)` over `λ₁ ≤ |xs|`, `ℓ(λ) ≤ |zs|`,
/// `|λ| ≤ weight_cap`. Exhaustive once `weight_cap ≥ |xs|·|zs|`.
pub fn dual_cauchy_rhs<T: Scalar>(xs: &PointSet<T>, zs: &PointSet<T>, weight_cap: usize) -> T {
    enumerate(weight_cap, zs.len(), xs.len()).fold(T::zero(), |acc, lam| {
        acc + schur_jacobi_trudi(&lam.conjugate(), xs) * schur_jacobi_trudi(&lam, zs)
    })
}
