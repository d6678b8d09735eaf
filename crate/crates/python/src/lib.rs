//! Python bindings.

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use schur_ginibre_core as core_lib;

use core_lib::ginibre;
use core_lib::montecarlo;
use core_lib::partitions;
use core_lib::pfaffian::{self as pf, SkewMatrix};
use core_lib::report;
use core_lib::symfunc::{self, PointSet};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An integer partition with parts in non-increasing order.
#[pyclass(module = "schur_ginibre", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Partition {
    inner: partitions::Partition,
}

#[pymethods]
impl Partition {
    /// Accepts a list of parts or text such as "4,2,2".
    #[new]
    fn py_new(value: PartitionLike) -> Self {
        Self { inner: value.0 }
    }

    #[getter]
    fn parts(&self) -> Vec<usize> {
        self.inner.parts().to_vec()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.inner.weight()
    }

    fn conjugate(&self) -> Self {
        Self {
            inner: self.inner.conjugate(),
        }
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Partition({:?})", self.inner.parts())
    }
}

/// Anything convertible to a partition: `Partition`, a sequence of ints, or text.
struct PartitionLike(partitions::Partition);

impl<'a, 'py> FromPyObject<'a, 'py> for PartitionLike {
    type Error = PyErr;

    fn extract(ob: Borrowed<'a, 'py, PyAny>) -> PyResult<Self> {
        if let Ok(p) = ob.cast::<Partition>() {
            return Ok(Self(p.get().inner.clone()));
        }
        if let Ok(s) = ob.extract::<String>() {
            return s.parse().map(Self).map_err(value_error);
        }
        let parts: Vec<usize> = ob.extract()?;
        partitions::Partition::new(parts)
            .map(Self)
            .map_err(value_error)
    }
}

/// Monte Carlo mean with its standard error.
#[pyclass(module = "schur_ginibre", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct MomentEstimate {
    statistic_id: String,
    mean: f64,
    std_error: f64,
    n_samples: u64,
    seed: u64,
    rejected: u64,
}

#[pymethods]
impl MomentEstimate {
    fn z_score(&self, target: f64) -> f64 {
        self.as_core().z_score(target)
    }

    fn __repr__(&self) -> String {
        format!(
            "MomentEstimate({}: {} ± {}, n={})",
            self.statistic_id, self.mean, self.std_error, self.n_samples
        )
    }
}

impl MomentEstimate {
    fn as_core(&self) -> montecarlo::MomentEstimate {
        montecarlo::MomentEstimate {
            statistic_id: self.statistic_id.clone(),
            mean: self.mean,
            std_error: self.std_error,
            n_samples: self.n_samples,
            seed: self.seed,
            rejected: self.rejected,
        }
    }
}

impl From<montecarlo::MomentEstimate> for MomentEstimate {
    fn from(e: montecarlo::MomentEstimate) -> Self {
        Self {
            statistic_id: e.statistic_id,
            mean: e.mean,
            std_error: e.std_error,
            n_samples: e.n_samples,
            seed: e.seed,
            rejected: e.rejected,
        }
    }
}

/// Partitions with bounded weight, length and largest part, in decreasing
/// lexicographic order.
#[pyfunction]
#[pyo3(signature = (max_weight, max_length=None, max_part=None))]
fn enumerate_partitions(
    max_weight: usize,
    max_length: Option<usize>,
    max_part: Option<usize>,
) -> Vec<Partition> {
    partitions::enumerate(
        max_weight,
        max_length.unwrap_or(max_weight),
        max_part.unwrap_or(max_weight),
    )
    .map(|inner| Partition { inner })
    .collect()
}

/// Exact average of the Schur function over `dim`×`dim` real Ginibre matrices.
#[pyfunction]
#[pyo3(signature = (partition, dim, method="closed", embed_dim=None))]
fn schur_average(
    partition: PartitionLike,
    dim: usize,
    method: &str,
    embed_dim: Option<usize>,
) -> PyResult<BigInt> {
    if dim == 0 {
        return Err(value_error("dim must be at least 1"));
    }
    let lambda = &partition.0;
    let closed = || ginibre::schur_average_closed(lambda, dim).value;
    let pfaffian = || -> PyResult<BigInt> {
        if lambda.len() > dim {
            return Ok(BigInt::default());
        }
        ginibre::schur_average_pfaffian_embedded(lambda, dim, embed_dim)
            .map(|v| v.value)
            .map_err(value_error)
    };
    match method {
        "closed" => Ok(closed()),
        "pfaffian" => pfaffian(),
        "both" => {
            let (c, p) = (closed(), pfaffian()?);
            if c != p {
                return Err(value_error(format!(
                    "routes disagree: closed {c}, pfaffian {p}"
                )));
            }
            Ok(c)
        }
        other => Err(value_error(format!("unknown method {other:?}"))),
    }
}

/// Schur function at the given points.
#[pyfunction]
#[pyo3(signature = (partition, points, method="jacobi-trudi"))]
fn schur(partition: PartitionLike, points: Vec<Complex64>, method: &str) -> PyResult<Complex64> {
    let pts = PointSet::new(points).map_err(value_error)?;
    let lambda = &partition.0;
    match method {
        "jacobi-trudi" => Ok(symfunc::schur_jacobi_trudi(lambda, &pts)),
        "dual" => Ok(symfunc::schur_jacobi_trudi_dual(lambda, &pts)),
        "tableau" => symfunc::schur_tableau(lambda, &pts).map_err(value_error),
        "vandermonde" => symfunc::schur_vandermonde(lambda, &pts).map_err(value_error),
        other => Err(value_error(format!("unknown method {other:?}"))),
    }
}

/// Average of `Tr H^power`.
#[pyfunction]
fn trace_moment(power: usize, dim: usize) -> BigInt {
    ginibre::trace_moment_of_power(power, dim)
}

/// Coefficients `c_k` of the averaged product of two characteristic polynomials in `x₁x₂`.
#[pyfunction]
fn charpoly_pair_coefficients(dim: usize) -> Vec<BigInt> {
    ginibre::charpoly_pair_average(dim)
}

/// Average of `∏_j det(1 + x_j H)`.
#[pyfunction]
fn charpoly_product_average(xs: Vec<f64>, dim: usize) -> PyResult<f64> {
    ginibre::charpoly_product_average(&xs, dim).map_err(value_error)
}

/// Pfaffian of a real skew-symmetric matrix.
#[pyfunction]
fn pfaffian(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(SkewMatrix::from_rows(matrix)
        .map_err(value_error)?
        .pfaffian())
}

/// The staircase matrix `ε⁻¹` of even size `m`.
#[pyfunction]
fn epsilon_inverse(m: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(pf::build_epsilon_inverse::<f64>(m)
        .map_err(value_error)?
        .rows())
}

/// Exact Pfaffian of `ε⁻¹` (size `m`) restricted to 1-based `rows`.
#[pyfunction]
fn epsilon_inverse_sub_pfaffian(m: usize, rows: Vec<usize>) -> PyResult<BigInt> {
    let inv = pf::build_epsilon_inverse::<core_lib::ExactScalar>(m).map_err(value_error)?;
    let v = pf::sub_pfaffian(&inv, &rows).map_err(value_error)?;
    if !v.is_integer() {
        return Err(value_error(format!("non-integer sub-Pfaffian {v}")));
    }
    Ok(v.to_integer())
}

/// Predicted value of the sub-Pfaffian from the row pattern alone.
#[pyfunction]
fn consecutive_pair_sign(rows: Vec<usize>) -> PyResult<i8> {
    pf::consecutive_pair_pfaffian_sign(&rows).map_err(value_error)
}

/// Sampled average of the Schur function: (real, imaginary) estimates.
#[pyfunction]
#[pyo3(signature = (partition, dim, n_samples, seed=42))]
fn estimate_schur_average(
    py: Python<'_>,
    partition: PartitionLike,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> PyResult<(MomentEstimate, MomentEstimate)> {
    let est = py
        .detach(|| montecarlo::estimate_schur_average(&partition.0, dim, n_samples, seed))
        .map_err(value_error)?;
    Ok((est.real.into(), est.imag.into()))
}

/// Sampled average of `Tr H^power`.
#[pyfunction]
#[pyo3(signature = (power, dim, n_samples, seed=42))]
fn estimate_trace_moment(
    py: Python<'_>,
    power: usize,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> PyResult<MomentEstimate> {
    py.detach(|| montecarlo::estimate_trace_moment(power, dim, n_samples, seed))
        .map(Into::into)
        .map_err(value_error)
}

/// Sampled eigenvalues of matrix `index` under `seed`.
#[pyfunction]
#[pyo3(signature = (dim, index, seed=42))]
fn sample_eigenvalues(dim: usize, index: u64, seed: u64) -> PyResult<Vec<Complex64>> {
    Ok(montecarlo::spectrum_sample(dim, seed, index)
        .map_err(value_error)?
        .eigenvalues)
}

/// Runs the default verification matrix; returns `(all_passed, json_report)`.
#[pyfunction]
#[pyo3(signature = (n_samples, seed=42, dims=None))]
fn verify(
    py: Python<'_>,
    n_samples: u64,
    seed: u64,
    dims: Option<Vec<usize>>,
) -> PyResult<(bool, String)> {
    let mut plan = report::VerificationPlan::default();
    if let Some(d) = dims {
        plan.dims = d;
    }
    let r = py
        .detach(|| report::run_verification(&plan, n_samples, seed))
        .map_err(value_error)?;
    Ok((
        r.all_passed,
        serde_json::to_string(&r).map_err(value_error)?,
    ))
}

/// Eigenvalue histogram against the exact density; returns `(passed, json_report)`.
#[pyfunction]
#[pyo3(signature = (dim, n_samples, seed=42))]
fn density_check(
    py: Python<'_>,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> PyResult<(bool, String)> {
    let grid = montecarlo::DensityGrid::default_for(dim);
    let r = py
        .detach(|| montecarlo::density_histogram_check(dim, n_samples, seed, &grid))
        .map_err(value_error)?;
    Ok((r.passed, serde_json::to_string(&r).map_err(value_error)?))
}

#[pymodule]
fn schur_ginibre(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Partition>()?;
    m.add_class::<MomentEstimate>()?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(schur_average, m)?)?;
    m.add_function(wrap_pyfunction!(schur, m)?)?;
    m.add_function(wrap_pyfunction!(trace_moment, m)?)?;
    m.add_function(wrap_pyfunction!(charpoly_pair_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(charpoly_product_average, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_inverse_sub_pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(consecutive_pair_sign, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_schur_average, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_trace_moment, m)?)?;
    m.add_function(wrap_pyfunction!(sample_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(density_check, m)?)?;
    Ok(())
}
