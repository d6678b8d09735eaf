//! Dense determinants over a [`Scalar`] field.

use crate::scalar::Scalar;

/// Determinant of a square matrix given as rows.
///
/// Exact scalars use Bareiss fraction-free elimination; floating scalars use
/// Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    debug_assert!(m.iter().all(|r| r.len() == n));
    if n == 0 {
        return T::one();
    }
    if T::EXACT {
        bareiss(&mut m)
    } else {
        partial_pivot(&mut m)
    }
}

fn bareiss<T: Scalar>(m: &mut [Vec<T>]) -> T {
    let n = m.len();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone())
                    / prev.clone();
                m[i][j] = v;
            }
            m[i][k] = T::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

fn partial_pivot<T: Scalar>(m: &mut [Vec<T>]) -> T {
    let n = m.len();
    let mut det = T::one();
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, m[i][k].magnitude()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if mag == 0.0 {
            return T::zero();
        }
        if piv != k {
            m.swap(k, piv);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det = det * pivot.clone();
        for i in k + 1..n {
            let factor = m[i][k].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m[i][j].clone() - factor.clone() * m[k][j].clone();
                m[i][j] = v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn leibniz(m: &[Vec<BigRational>]) -> BigRational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        let mut total = rat(0);
        for p in perms(n) {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let mut term = if inversions % 2 == 0 { rat(1) } else { rat(-1) };
            for (i, &pi) in p.iter().enumerate() {
                term *= m[i][pi].clone();
            }
            total += term;
        }
        total
    }

    #[test]
    fn exact_matches_leibniz() {
        let vals = [3, -1, 4, 1, -5, 9, 2, 6, -5, 3, 5, 8, 9, 7, -9, 3];
        let m: Vec<Vec<BigRational>> = (0..4)
            .map(|i| (0..4).map(|j| rat(vals[4 * i + j])).collect())
            .collect();
        assert_eq!(determinant(m.clone()), leibniz(&m));
    }

    #[test]
    fn exact_needs_row_swap() {
        let m = vec![
            vec![rat(0), rat(1), rat(2)],
            vec![rat(1), rat(0), rat(3)],
            vec![rat(4), rat(-3), rat(8)],
        ];
        assert_eq!(determinant(m.clone()), leibniz(&m));
    }

    #[test]
    fn singular_is_zero() {
        let m = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert_eq!(determinant(m), rat(0));
        let f = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(determinant(f), 0.0);
    }

    #[test]
    fn float_agrees_with_exact() {
        let vals = [3, -1, 4, 1, -5, 9, 2, 6, -5];
        let m: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| vals[3 * i + j] as f64).collect())
            .collect();
        let e: Vec<Vec<BigRational>> = (0..3)
            .map(|i| (0..3).map(|j| rat(vals[3 * i + j])).collect())
            .collect();
        let exact: f64 = num_traits::ToPrimitive::to_f64(&determinant(e)).unwrap();
        assert!((determinant(m) - exact).abs() < 1e-12);
    }

    #[test]
    fn empty_is_one() {
        assert_eq!(determinant::<f64>(vec![]), 1.0);
    }
}
