//! Closed-form quantities for the real Ginibre ensemble
//! `dμ(H) ∝ exp(-½ Σ H_ij²)`.
//!
//! Everything here is exact unless it returns `f64`/`Complex64`. The
//! `a_k = 2^{k/2} Γ(k/2)` coefficients are irrational for odd `k`; they are
//! carried as [`SqrtMonomial`]s so that the Pfaffian route can check that the
//! `√2`, `√π` factors cancel instead of relying on a floating near-cancellation.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{enumerate, Partition};
use crate::pfaffian::{build_epsilon_inverse, epsilon_inverse_entry, sub_pfaffian, SkewMatrix};
use crate::scalar::Scalar;
use crate::symfunc::{schur_jacobi_trudi, PointSet};

/// `coeff · √2^{sqrt2} · √π^{sqrt_pi}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtMonomial {
    pub coeff: BigRational,
    pub sqrt2: i32,
    pub sqrt_pi: i32,
}

impl SqrtMonomial {
    pub fn rational(coeff: BigRational) -> Self {
        Self {
            coeff,
            sqrt2: 0,
            sqrt_pi: 0,
        }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero() || (self.sqrt2 == 0 && self.sqrt_pi == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeff: &self.coeff * &other.coeff,
            sqrt2: self.sqrt2 + other.sqrt2,
            sqrt_pi: self.sqrt_pi + other.sqrt_pi,
        }
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &Self) -> Self {
        Self {
            coeff: &self.coeff / &other.coeff,
            sqrt2: self.sqrt2 - other.sqrt2,
            sqrt_pi: self.sqrt_pi - other.sqrt_pi,
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            coeff: &self.coeff * r,
            ..self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN)
            * std::f64::consts::SQRT_2.powi(self.sqrt2)
            * std::f64::consts::PI.sqrt().powi(self.sqrt_pi)
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// `a_k = 2^{k/2} Γ(k/2)` exactly: `2^j (j-1)!` for `k = 2j`, and
/// `(2j-1)!! · √(2π)` for `k = 2j + 1`.
pub fn a_coefficient_exact(k: usize) -> SqrtMonomial {
    assert!(k >= 1, "a_k is defined for k ≥ 1");
    let j = (k / 2) as u64;
    if k.is_multiple_of(2) {
        SqrtMonomial::rational(BigRational::from_integer(
            (BigInt::one() << j) * factorial(j - 1),
        ))
    } else {
        SqrtMonomial {
            coeff: BigRational::from_integer(double_factorial(2 * j as i64 - 1)),
            sqrt2: 1,
            sqrt_pi: 1,
        }
    }
}

/// `a_k` as a float.
pub fn a_coefficient(k: usize) -> f64 {
    a_coefficient_exact(k).to_f64()
}

impl fmt::Display for SqrtMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.sqrt2 != 0 {
            write!(f, "·√2^{}", self.sqrt2)?;
        }
        if self.sqrt_pi != 0 {
            write!(f, "·√π^{}", self.sqrt_pi)?;
        }
        Ok(())
    }
}

/// Dimension data for the Pfaffian construction: the matrix size `N` and
/// the even embedding size `M` from which `ε⁻¹` is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GinibreContext {
    pub dim: usize,
    pub embed_dim: usize,
}

impl GinibreContext {
    /// Smallest even `M ≥ N + λ₁ + 1`.
    pub fn for_partition(lambda: &Partition, dim: usize) -> Self {
        let lower = dim + lambda.first() + 1;
        Self {
            dim,
            embed_dim: lower + lower % 2,
        }
    }

    /// Uses an explicit embedding dimension, which must be even and at
    /// least `N + λ₁ + 1`.
    pub fn with_embedding(lambda: &Partition, dim: usize, embed_dim: usize) -> Result<Self> {
        let min = Self::for_partition(lambda, dim).embed_dim;
        if embed_dim % 2 == 1 {
            return Err(Error::OddDimension(embed_dim));
        }
        if embed_dim < min {
            return Err(Error::InvalidArgument(format!(
                "embedding dimension {embed_dim} below the minimum {min}"
            )));
        }
        Ok(Self { dim, embed_dim })
    }

    /// 1-based Pfaffian rows `N - n + λ_n + 1` in increasing order, with the
    /// extension row `M` appended when `N` is odd.
    pub fn rows(&self, lambda: &Partition) -> Vec<usize> {
        let n = self.dim;
        let lam = lambda.padded(n);
        let mut rows: Vec<usize> = (1..=n).rev().map(|i| n - i + lam[i - 1] + 1).collect();
        if n % 2 == 1 {
            rows.push(self.embed_dim);
        }
        rows
    }

    /// `∏ a_r` over the rows, with `a_M := 1` for the odd-`N` extension row.
    pub fn prefactor(&self, rows: &[usize]) -> SqrtMonomial {
        rows.iter()
            .take(self.dim)
            .fold(SqrtMonomial::one(), |acc, &r| {
                acc.mul(&a_coefficient_exact(r))
            })
    }
}

/// `⟨σ_λ(H)⟩_N` together with what it averages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentValue {
    #[serde(with = "bigint_string")]
    pub value: BigInt,
    pub partition: Partition,
    pub dim: usize,
}

/// Closed form `2^{|λ|/2} ∏_n Γ((N-n+λ_n+1)/2) / Γ((N-n+1)/2)` for even
/// `λ`, 0 otherwise.
///
/// Each Gamma ratio with its power of two is the rising product
/// `2^m Γ(x+m)/Γ(x) = ∏_{j<m} (2x + 2j)`, so the value is
/// `∏_{n: λ_n>0} ∏_{j<λ_n/2} (N - n + 1 + 2j)` and never leaves the integers.
pub fn schur_average_closed(lambda: &Partition, dim: usize) -> MomentValue {
    let zero = |p: &Partition| MomentValue {
        value: BigInt::zero(),
        partition: p.clone(),
        dim,
    };
    if lambda.len() > dim || lambda.weight() % 2 == 1 || !lambda.is_even() {
        return zero(lambda);
    }
    let mut value = BigInt::one();
    for (i, &part) in lambda.parts().iter().enumerate() {
        let base = dim - i; // N - n + 1 with n = i + 1
        for j in 0..part / 2 {
            value *= base + 2 * j;
        }
    }
    MomentValue {
        value,
        partition: lambda.clone(),
        dim,
    }
}

/// Intermediate results of the Pfaffian route for one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PfaffianRoute {
    pub context: GinibreContext,
    pub rows: Vec<usize>,
    pub prefactor: SqrtMonomial,
    pub sub_pfaffian: BigRational,
}

impl PfaffianRoute {
    pub fn compute(lambda: &Partition, context: GinibreContext) -> Result<Self> {
        if lambda.len() > context.dim {
            return Err(Error::InvalidPartition(format!(
                "{lambda} has more than {} parts",
                context.dim
            )));
        }
        let rows = context.rows(lambda);
        let eps_inv = build_epsilon_inverse::<BigRational>(context.embed_dim)?;
        let sub_pfaffian = sub_pfaffian(&eps_inv, &rows)?;
        let prefactor = context.prefactor(&rows);
        Ok(Self {
            context,
            rows,
            prefactor,
            sub_pfaffian,
        })
    }

    /// `Pf(a_r (ε⁻¹)_{rs} a_s) = (∏ a_r) · Pf(ε⁻¹_{rs})`.
    pub fn value(&self) -> SqrtMonomial {
        self.prefactor.scale(&self.sub_pfaffian)
    }
}

/// The average as a ratio of Pfaffians, normalised by the empty partition.
pub fn schur_average_pfaffian(lambda: &Partition, dim: usize) -> Result<MomentValue> {
    schur_average_pfaffian_embedded(lambda, dim, None)
}

/// [`schur_average_pfaffian`] with an optional explicit embedding dimension.
pub fn schur_average_pfaffian_embedded(
    lambda: &Partition,
    dim: usize,
    embed_dim: Option<usize>,
) -> Result<MomentValue> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let context = match embed_dim {
        Some(m) => GinibreContext::with_embedding(lambda, dim, m)?,
        None => GinibreContext::for_partition(lambda, dim),
    };
    let numer = PfaffianRoute::compute(lambda, context)?.value();
    let denom = PfaffianRoute::compute(&Partition::empty(), context)?.value();
    let ratio = numer.div(&denom);
    if !ratio.is_rational() {
        return Err(Error::InvalidArgument(format!(
            "irrational factors failed to cancel: √2^{} √π^{}",
            ratio.sqrt2, ratio.sqrt_pi
        )));
    }
    if !ratio.coeff.is_integer() {
        return Err(Error::InvalidArgument(format!(
            "Pfaffian ratio {} is not an integer",
            ratio.coeff
        )));
    }
    Ok(MomentValue {
        value: ratio.coeff.to_integer(),
        partition: lambda.clone(),
        dim,
    })
}

/// Memo table for closed-form averages keyed by `(λ, N)`. Safe to share
/// between threads.
#[derive(Debug, Default)]
pub struct MomentCache {
    table: RwLock<HashMap<(Partition, usize), BigInt>>,
}

impl MomentCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn closed(&self, lambda: &Partition, dim: usize) -> BigInt {
        let key = (lambda.clone(), dim);
        if let Some(v) = self.table.read().expect("cache poisoned").get(&key) {
            return v.clone();
        }
        let v = schur_average_closed(lambda, dim).value;
        self.table
            .write()
            .expect("cache poisoned")
            .entry(key)
            .or_insert(v)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `⟨Tr H^{2m}⟩_N = ∏_{j=1}^{m} (N + 2(m - j))`; `m = 0` gives `N`.
pub fn trace_moment(m: usize, dim: usize) -> BigInt {
    if m == 0 {
        return BigInt::from(dim);
    }
    (1..=m).fold(BigInt::one(), |acc, j| acc * (dim + 2 * (m - j)))
}

/// `⟨Tr H^n⟩_N` for any `n`: zero for odd `n`.
pub fn trace_moment_of_power(n: usize, dim: usize) -> BigInt {
    if n % 2 == 1 {
        BigInt::zero()
    } else {
        trace_moment(n / 2, dim)
    }
}

/// Coefficients `c_k = N!/(N-k)!` of
/// `⟨det(1 + x₁H) det(1 + x₂H)⟩_N = Σ_k c_k (x₁x₂)^k`.
pub fn charpoly_pair_average(dim: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(dim + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for k in 1..=dim {
        c *= dim + 1 - k;
        out.push(c.clone());
    }
    out
}

/// One term `c_λ σ_{(2λ)'}(x)` of the averaged product of `n`
/// characteristic polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharpolyTerm {
    pub lambda: Partition,
    pub coefficient: BigInt,
    pub shape: Partition,
}

/// Terms of `⟨∏_{j=1}^{n} det(1 + x_j H)⟩_N` over `λ₁ ≤ ⌊n/2⌋`,
/// `ℓ(λ) ≤ N`, with `c_λ = ⟨σ_{2λ}⟩_N`.
pub fn charpoly_product_terms(n: usize, dim: usize) -> Vec<CharpolyTerm> {
    let cap = n / 2;
    enumerate(cap * dim, dim, cap)
        .map(|lambda| {
            let doubled = lambda.scaled(2);
            CharpolyTerm {
                coefficient: schur_average_closed(&doubled, dim).value,
                shape: doubled.conjugate(),
                lambda,
            }
        })
        .collect()
}

/// `⟨∏_j det(1 + x_j H)⟩_N` evaluated at the given `x_j`.
pub fn charpoly_product_average<T: Scalar>(xs: &[T], dim: usize) -> Result<T> {
    let pts = PointSet::new(xs.to_vec())?;
    Ok(charpoly_product_terms(xs.len(), dim)
        .into_iter()
        .fold(T::zero(), |acc, term| {
            acc + T::from_bigint(&term.coefficient) * schur_jacobi_trudi(&term.shape, &pts)
        }))
}

/// `A_{lm} = a_l (ε⁻¹)_{lm} a_m`, `M×M`.
pub fn build_a(m: usize) -> Result<SkewMatrix<f64>> {
    let eps_inv = build_epsilon_inverse::<f64>(m)?;
    Ok(SkewMatrix::from_upper(m, |k, l| {
        a_coefficient(k + 1) * eps_inv.get(k, l) * a_coefficient(l + 1)
    }))
}

/// `A⁻¹_{kl} = ε_{kl} / (a_k a_l)`, `M×M`.
pub fn build_a_inverse(m: usize) -> Result<SkewMatrix<f64>> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::OddDimension(m));
    }
    Ok(SkewMatrix::from_upper(m, |k, l| {
        if l == k + 1 {
            -1.0 / (a_coefficient(k + 1) * a_coefficient(l + 1))
        } else {
            0.0
        }
    }))
}

/// `1/C_N = Pf(A)` over rows `1..=N`, extended by a row with `a_{N+1} = 1`
/// when `N` is odd. Returned symbolically.
pub fn normalization_constant(dim: usize) -> Result<SqrtMonomial> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let context = GinibreContext::for_partition(&Partition::empty(), dim);
    Ok(PfaffianRoute::compute(&Partition::empty(), context)?.value())
}

/// Floating Pfaffian of the (extended) `A` matrix; the numeric twin of
/// [`normalization_constant`].
pub fn normalization_constant_numeric(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let m = dim + dim % 2;
    let a = |k: usize| if k > dim { 1.0 } else { a_coefficient(k) };
    let mat = SkewMatrix::from_upper(m, |k, l| {
        a(k + 1) * f64::from(epsilon_inverse_entry(k + 1, l + 1)) * a(l + 1)
    });
    Ok(mat.pfaffian())
}

/// `K_N(z₁, z₂) = (z₁ - z₂)/(2√(2π)) Σ_{n=0}^{N-2} (z₁z₂)^n / n!`.
pub fn kernel_kn(dim: usize, z1: Complex64, z2: Complex64) -> Complex64 {
    let w = z1 * z2;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..dim.saturating_sub(1) {
        if n > 0 {
            term = term * w / n as f64;
        }
        sum += term;
    }
    (z1 - z2) * sum / (2.0 * (2.0 * std::f64::consts::PI).sqrt())
}

/// Coefficient matrix `K[k][l]` of `z₁^k z₂^l` in the closed kernel.
pub fn kernel_coefficients_closed(dim: usize) -> Vec<Vec<f64>> {
    let mut k = vec![vec![0.0; dim]; dim];
    let norm = 2.0 * (2.0 * std::f64::consts::PI).sqrt();
    let mut fact = 1.0;
    for n in 0..dim.saturating_sub(1) {
        if n > 0 {
            fact *= n as f64;
        }
        k[n + 1][n] += 1.0 / (norm * fact);
        k[n][n + 1] -= 1.0 / (norm * fact);
    }
    k
}

/// Coefficient matrix of `Σ_{k,l ≤ N} A⁻¹_{kl} z₁^{k-1} z₂^{l-1}`. For odd
/// `N` the padding row of `A⁻¹` never enters the sum.
pub fn kernel_coefficients_from_a(dim: usize) -> Vec<Vec<f64>> {
    let a = a_coefficient;
    (0..dim)
        .map(|k| {
            (0..dim)
                .map(|l| {
                    let eps = if l == k + 1 {
                        -1.0
                    } else if k == l + 1 {
                        1.0
                    } else {
                        0.0
                    };
                    eps / (a(k + 1) * a(l + 1))
                })
                .collect()
        })
        .collect()
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};
    use statrs::function::gamma::gamma;

    fn lam(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// The Gamma-ratio formula evaluated in floating point.
    fn closed_via_gamma(lambda: &Partition, dim: usize) -> f64 {
        if !lambda.is_even() || lambda.len() > dim {
            return 0.0;
        }
        let pad = lambda.padded(dim);
        let mut v = 2f64.powf(lambda.weight() as f64 / 2.0);
        for (i, &p) in pad.iter().enumerate() {
            let base = (dim - i) as f64;
            v *= gamma((base + p as f64) / 2.0) / gamma(base / 2.0);
        }
        v
    }

    #[test]
    fn a_coefficient_examples() {
        assert_eq!(a_coefficient_exact(2), SqrtMonomial::rational(rat(2)));
        assert_eq!(a_coefficient_exact(4), SqrtMonomial::rational(rat(4)));
        assert!((a_coefficient(1) - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((a_coefficient(1) - 2.5066).abs() < 1e-4);
        for k in 1..=20 {
            let direct = 2f64.powf(k as f64 / 2.0) * gamma(k as f64 / 2.0);
            assert!(
                (a_coefficient(k) - direct).abs() < 1e-11 * direct,
                "k = {k}"
            );
        }
    }

    #[test]
    fn duplication_formula() {
        // a_k a_{k+1} = 2√(2π) (k-1)!
        for k in 1..=15 {
            let lhs = a_coefficient_exact(k).mul(&a_coefficient_exact(k + 1));
            let rhs = SqrtMonomial {
                coeff: BigRational::from_integer(factorial(k as u64 - 1) * 2),
                sqrt2: 1,
                sqrt_pi: 1,
            };
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn closed_examples() {
        for n in 1..=9 {
            assert_eq!(schur_average_closed(&lam(&[2]), n).value, int(n as i64));
        }
        for n in 1..=5 {
            assert_eq!(schur_average_closed(&lam(&[1]), n).value, int(0));
        }
        assert_eq!(schur_average_closed(&lam(&[2, 2]), 2).value, int(2));
        assert_eq!(schur_average_closed(&lam(&[2, 2]), 3).value, int(6));
        assert_eq!(schur_average_closed(&lam(&[4]), 2).value, int(8));
        assert_eq!(schur_average_closed(&lam(&[2, 2, 2]), 2).value, int(0));
        assert_eq!(schur_average_closed(&Partition::empty(), 3).value, int(1));
    }

    #[test]
    fn closed_matches_gamma_formula() {
        for dim in 1..=8 {
            for l in enumerate(12, dim, 12) {
                let exact = schur_average_closed(&l, dim).value.to_f64().unwrap();
                let g = closed_via_gamma(&l, dim);
                assert!(
                    (exact - g).abs() <= 1e-9 * g.abs().max(1.0),
                    "{l} N={dim}: {exact} vs {g}"
                );
            }
        }
    }

    #[test]
    fn pfaffian_examples() {
        for n in 1..=6 {
            assert_eq!(
                schur_average_pfaffian(&Partition::empty(), n)
                    .unwrap()
                    .value,
                int(1)
            );
        }
        assert_eq!(schur_average_pfaffian(&lam(&[2]), 2).unwrap().value, int(2));
        assert_eq!(
            schur_average_pfaffian(&lam(&[2, 1]), 3).unwrap().value,
            int(0)
        );
        assert!(matches!(
            schur_average_pfaffian(&lam(&[2, 2, 2]), 2),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn pfaffian_rows_follow_index_sequence() {
        let ctx = GinibreContext::for_partition(&lam(&[4, 2]), 3);
        assert_eq!(ctx.embed_dim, 8);
        // 1 + 0, 2 + 2, 3 + 4, then the extension row
        assert_eq!(ctx.rows(&lam(&[4, 2])), vec![1, 4, 7, 8]);
        let even = GinibreContext::for_partition(&lam(&[2]), 4);
        assert_eq!(even.embed_dim, 8);
        assert_eq!(even.rows(&lam(&[2])), vec![1, 2, 3, 6]);
    }

    #[test]
    fn embedding_dimension_is_irrelevant() {
        for dim in 1..=5 {
            for l in enumerate(6, dim, 6) {
                let base = schur_average_pfaffian(&l, dim).unwrap();
                let min = GinibreContext::for_partition(&l, dim).embed_dim;
                for extra in [2, 4, 10] {
                    let wider =
                        schur_average_pfaffian_embedded(&l, dim, Some(min + extra)).unwrap();
                    assert_eq!(wider, base, "{l} N={dim} M={}", min + extra);
                }
            }
        }
        let l = lam(&[2]);
        assert!(schur_average_pfaffian_embedded(&l, 2, Some(4)).is_err());
        assert!(schur_average_pfaffian_embedded(&l, 2, Some(7)).is_err());
    }

    #[test]
    fn pfaffian_scaling_matches_float_matrix() {
        // Pf(D B D) = det(D) Pf(B): compare against a float Pfaffian of the
        // actual A-submatrix
        for dim in [2usize, 4, 6] {
            for l in [Partition::empty(), lam(&[2]), lam(&[2, 2]), lam(&[4, 2])] {
                if l.len() > dim {
                    continue;
                }
                let ctx = GinibreContext::for_partition(&l, dim);
                let route = PfaffianRoute::compute(&l, ctx).unwrap();
                let a = build_a(ctx.embed_dim).unwrap();
                let zero_based: Vec<usize> = route.rows.iter().map(|r| r - 1).collect();
                let direct = a.principal(&zero_based).pfaffian();
                let symbolic = route.value().to_f64();
                assert!(
                    (direct - symbolic).abs() < 1e-9 * symbolic.abs(),
                    "{l} N={dim}"
                );
            }
        }
    }

    #[test]
    fn trace_moment_examples() {
        assert_eq!(trace_moment(1, 5), int(5));
        assert_eq!(trace_moment(2, 2), int(8));
        assert_eq!(trace_moment(0, 7), int(7));
        assert_eq!(trace_moment_of_power(3, 4), int(0));
        assert_eq!(trace_moment_of_power(4, 3), int(15));
    }

    #[test]
    fn trace_moment_matches_gamma_form() {
        for m in 1..=6 {
            for n in 1..=8 {
                let g =
                    2f64.powi(m as i32) * gamma(n as f64 / 2.0 + m as f64) / gamma(n as f64 / 2.0);
                let v = trace_moment(m, n).to_f64().unwrap();
                assert!((v - g).abs() < 1e-9 * g);
            }
        }
    }

    #[test]
    fn charpoly_pair_examples() {
        assert_eq!(charpoly_pair_average(2), vec![int(1), int(2), int(2)]);
        assert_eq!(charpoly_pair_average(1), vec![int(1), int(1)]);
        for n in 1..=8 {
            assert_eq!(charpoly_pair_average(n)[0], int(1));
        }
    }

    #[test]
    fn charpoly_product_examples() {
        let (x, y) = (ratio(1, 3), ratio(-5, 2));
        let xy = &x * &y;
        let got = charpoly_product_average(&[x, y], 3).unwrap();
        let want = rat(1) + rat(3) * &xy + rat(6) * &xy * &xy + rat(6) * &xy * &xy * &xy;
        assert_eq!(got, want);
        assert_eq!(
            charpoly_product_average(&[rat(0), rat(0), rat(0)], 4).unwrap(),
            rat(1)
        );
        for n in 1..=5 {
            assert_eq!(charpoly_product_average(&[ratio(7, 3)], n).unwrap(), rat(1));
        }
    }

    #[test]
    fn a_matrix() {
        let a = build_a(2).unwrap();
        let want = 2.0 * (2.0 * std::f64::consts::PI).sqrt();
        assert!((a.get(0, 1) - want).abs() < 1e-14);
        assert!((a.get(1, 0) + want).abs() < 1e-14);
        let a4 = build_a(4).unwrap();
        for k in 0..4 {
            assert_eq!(*a4.get(k, k), 0.0);
        }
        let prod = a4.matmul(&build_a_inverse(4).unwrap());
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((v - id).abs() < 1e-12, "({i},{j}) = {v}");
            }
        }
        assert_eq!(build_a(3).unwrap_err(), Error::OddDimension(3));
    }

    #[test]
    fn kernel_examples() {
        let z = Complex64::new(0.3, -1.1);
        assert_eq!(kernel_kn(5, z, z), Complex64::new(0.0, 0.0));
        let k = kernel_kn(2, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let want = 1.0 / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((k.re - want).abs() < 1e-15 && k.im == 0.0);
        let (z1, z2) = (Complex64::new(0.4, 0.2), Complex64::new(-1.3, 0.7));
        assert!((kernel_kn(6, z1, z2) + kernel_kn(6, z2, z1)).norm() < 1e-15);
    }

    #[test]
    fn kernel_polynomial_matches_coefficients() {
        let (z1, z2) = (Complex64::new(0.4, 0.2), Complex64::new(-1.3, 0.7));
        for dim in 2..=7 {
            let c = kernel_coefficients_closed(dim);
            let mut v = Complex64::new(0.0, 0.0);
            for (k, row) in c.iter().enumerate() {
                for (l, coeff) in row.iter().enumerate() {
                    v += coeff * z1.powu(k as u32) * z2.powu(l as u32);
                }
            }
            assert!((v - kernel_kn(dim, z1, z2)).norm() < 1e-13);
        }
    }

    #[test]
    fn kernel_odd_dimension_stretch() {
        for dim in [3usize, 5, 7] {
            let a = kernel_coefficients_closed(dim);
            let b = kernel_coefficients_from_a(dim);
            for k in 0..dim {
                for l in 0..dim {
                    assert!((a[k][l] - b[k][l]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let two = normalization_constant(2).unwrap();
        assert_eq!(
            two,
            SqrtMonomial {
                coeff: rat(2),
                sqrt2: 1,
                sqrt_pi: 1
            }
        );
        let one = normalization_constant(1).unwrap();
        assert!((one.to_f64() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
        for dim in 1..=8 {
            let sym = normalization_constant(dim).unwrap().to_f64();
            let num = normalization_constant_numeric(dim).unwrap();
            assert!((sym - num).abs() < 1e-10 * sym, "N = {dim}");
            assert!(sym > 0.0);
        }
        let a = build_a(4).unwrap();
        let pf = a.pfaffian();
        assert!((pf * pf - a.determinant()).abs() < 1e-10 * a.determinant().abs());
    }

    #[test]
    fn normalization_one_dimensional_quadrature() {
        // N = 1: the density is C_1 f(x) on the real line with
        // f(x)² = e^{-x²} erfc(0) = e^{-x²}; Simpson on [-12, 12]
        let steps = 4000;
        let (lo, hi) = (-12.0f64, 12.0f64);
        let h = (hi - lo) / steps as f64;
        let f = |x: f64| (-x * x).exp().sqrt();
        let mut s = f(lo) + f(hi);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        let integral = s * h / 3.0;
        let c1 = normalization_constant(1).unwrap().to_f64();
        assert!((integral - c1).abs() < 1e-10);
    }

    #[test]
    fn cache_is_consistent() {
        let cache = MomentCache::new();
        assert!(cache.is_empty());
        let l = lam(&[4, 2]);
        let a = cache.closed(&l, 5);
        let b = cache.closed(&l, 5);
        assert_eq!(a, b);
        assert_eq!(a, schur_average_closed(&l, 5).value);
        assert_eq!(cache.len(), 1);
        std::thread::scope(|s| {
            for n in 1..=6 {
                let cache = &cache;
                s.spawn(move || {
                    for l in enumerate(6, n, 6) {
                        assert_eq!(cache.closed(&l, n), schur_average_closed(&l, n).value);
                    }
                });
            }
        });
    }

    #[test]
    fn moment_value_json() {
        let v = schur_average_closed(&lam(&[4, 4, 2]), 6);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"value\":\""));
        let back: MomentValue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
