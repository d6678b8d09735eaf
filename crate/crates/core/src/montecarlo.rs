//! Monte Carlo over the real Ginibre ensemble.
//!
//! Sample `i` of a run is drawn from ChaCha stream `i` under the run seed,
//! so it depends only on `(seed, i)`. Samples are grouped in fixed blocks
//! whose accumulators are merged in block order, which makes every estimate
//! bit-identical regardless of the number of worker threads.

use log::warn;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::symfunc::{schur_jacobi_trudi, PointSet};

/// Samples per accumulator block.
pub const BLOCK_SIZE: u64 = 1024;

/// Minimum sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 100;

/// Absolute tolerance for pairing complex-conjugate eigenvalues.
pub const CONJUGATE_TOLERANCE: f64 = 1e-8;

/// Eigenvalues with `Im z` at or below this count as real in the density
/// check.
pub const REAL_AXIS_THRESHOLD: f64 = 1e-6;

const MAX_REDRAWS: usize = 64;
const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of one sampled matrix, closed under complex conjugation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub eigenvalues: Vec<Complex64>,
    pub source_seed: u64,
    pub sample_index: u64,
}

impl SpectrumSample {
    /// Every eigenvalue has its conjugate in the multiset, within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut used = vec![false; self.eigenvalues.len()];
        for (i, z) in self.eigenvalues.iter().enumerate() {
            if used[i] {
                continue;
            }
            if z.im.abs() <= tol {
                used[i] = true;
                continue;
            }
            let partner = (0..self.eigenvalues.len())
                .find(|&j| j != i && !used[j] && (self.eigenvalues[j] - z.conj()).norm() <= tol);
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }

    pub fn trace(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    /// Number of eigenvalues strictly above the real-axis threshold.
    pub fn upper_half_count(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| z.im > REAL_AXIS_THRESHOLD)
            .count()
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub statistic_id: String,
    pub mean: f64,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Draws discarded because the eigensolver failed or the spectrum was
    /// not conjugate-closed.
    pub rejected: u64,
}

impl MomentEstimate {
    /// `(mean - target) / std_error`; 0 when both the error bar and the
    /// difference vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        z_score(self.mean, target, self.std_error)
    }
}

pub(crate) fn z_score(mean: f64, target: f64, std_error: f64) -> f64 {
    let diff = mean - target;
    if std_error > 0.0 {
        diff / std_error
    } else if diff.abs() <= 1e-12 * target.abs().max(1.0) {
        0.0
    } else {
        f64::MAX.copysign(diff)
    }
}

/// Real and imaginary parts of a Schur-function estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurEstimate {
    pub real: MomentEstimate,
    pub imag: MomentEstimate,
}

impl SchurEstimate {
    /// The imaginary mean sits within five of its own standard errors of 0
    /// (plus a rounding floor).
    pub fn imaginary_part_negligible(&self) -> bool {
        self.imag.mean.abs() <= 5.0 * self.imag.std_error + 1e-9
    }
}

/// A per-sample statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Statistic {
    /// `σ_λ` at the eigenvalues, via Jacobi–Trudi.
    Schur(Partition),
    /// `Tr H^p` from explicit matrix powers.
    Trace(usize),
    /// `det(1 + x₁H) det(1 + x₂H)`.
    CharpolyPair(f64, f64),
    /// Number of eigenvalues with `Im z > 0`.
    UpperHalfCount,
}

impl Statistic {
    pub fn id(&self) -> String {
        match self {
            Statistic::Schur(l) => format!("schur:{l}"),
            Statistic::Trace(p) => format!("trace:{p}"),
            Statistic::CharpolyPair(a, b) => format!("charpoly:{a},{b}"),
            Statistic::UpperHalfCount => "upper-half-count".to_string(),
        }
    }

    fn needs_spectrum(&self) -> bool {
        matches!(self, Statistic::Schur(_) | Statistic::UpperHalfCount)
    }
}

/// Generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `N×N` matrix of independent standard normal entries.
pub fn sample_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |_, _| rng.sample(StandardNormal))
}

/// Eigenvalues of a real square matrix through its real Schur form, paired
/// into exact conjugates.
pub fn eigenvalues(h: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !h.is_square() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}×{}, expected square",
            h.nrows(),
            h.ncols()
        )));
    }
    if h.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(h.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::ConvergenceFailure("real Schur iteration did not converge".into()))?;
    let raw: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ConvergenceFailure("non-finite eigenvalue".into()));
    }
    pair_conjugates(raw)
}

/// Snaps near-real eigenvalues onto the axis and symmetrises conjugate
/// pairs. Output: reals ascending, then pairs by real part (upper member
/// first).
pub fn pair_conjugates(raw: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in raw {
        if z.im.abs() <= CONJUGATE_TOLERANCE {
            reals.push(z.re);
        } else if z.im > 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::ConvergenceFailure(format!(
            "{} eigenvalues above the axis but {} below",
            upper.len(),
            lower.len()
        )));
    }
    let mut pairs = Vec::with_capacity(upper.len());
    for u in upper {
        let (best, dist) = lower
            .iter()
            .enumerate()
            .map(|(j, l)| (j, (u - l.conj()).norm()))
            .fold(
                (0, f64::INFINITY),
                |acc, cur| if cur.1 < acc.1 { cur } else { acc },
            );
        if dist > CONJUGATE_TOLERANCE {
            return Err(Error::ConvergenceFailure(format!(
                "eigenvalue {u} has no conjugate partner (mismatch {dist:e})"
            )));
        }
        let l = lower.swap_remove(best);
        pairs.push(Complex64::new((u.re + l.re) / 2.0, (u.im - l.im) / 2.0));
    }
    reals.sort_by(f64::total_cmp);
    pairs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = reals.into_iter().map(|r| Complex64::new(r, 0.0)).collect();
    for p in pairs {
        out.push(p);
        out.push(p.conj());
    }
    Ok(out)
}

/// Draws sample `index`: the matrix and, when requested, its spectrum.
/// Failed decompositions are logged and redrawn from the same stream.
/// Returns the number of redraws alongside.
pub fn draw_sample(
    dim: usize,
    seed: u64,
    index: u64,
    with_spectrum: bool,
) -> Result<(DMatrix<f64>, Option<SpectrumSample>, u64)> {
    let mut rng = sample_rng(seed, index);
    let mut rejected = 0;
    for _ in 0..MAX_REDRAWS {
        let h = sample_matrix(dim, &mut rng);
        if !with_spectrum {
            return Ok((h, None, rejected));
        }
        match eigenvalues(&h) {
            Ok(eigenvalues) => {
                let sample = SpectrumSample {
                    eigenvalues,
                    source_seed: seed,
                    sample_index: index,
                };
                return Ok((h, Some(sample), rejected));
            }
            Err(e) => {
                warn!("seed {seed} sample {index}: {e}; redrawing");
                rejected += 1;
            }
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "seed {seed} sample {index}: {MAX_REDRAWS} consecutive failures"
    )))
}

/// Spectrum of sample `index` under `seed`.
pub fn spectrum_sample(dim: usize, seed: u64, index: u64) -> Result<SpectrumSample> {
    Ok(draw_sample(dim, seed, index, true)?
        .1
        .expect("spectrum requested"))
}

fn evaluate(stat: &Statistic, h: &DMatrix<f64>, spectrum: Option<&SpectrumSample>) -> Complex64 {
    match stat {
        Statistic::Schur(lambda) => {
            let s = spectrum.expect("spectrum drawn for Schur statistics");
            let pts = PointSet::new(s.eigenvalues.clone()).expect("dimension ≥ 1");
            schur_jacobi_trudi(lambda, &pts)
        }
        Statistic::Trace(p) => Complex64::new(trace_power(h, *p), 0.0),
        Statistic::CharpolyPair(x1, x2) => {
            let n = h.nrows();
            let id = DMatrix::<f64>::identity(n, n);
            let d1 = (&id + h * *x1).determinant();
            let d2 = (&id + h * *x2).determinant();
            Complex64::new(d1 * d2, 0.0)
        }
        Statistic::UpperHalfCount => {
            let s = spectrum.expect("spectrum drawn for counting");
            Complex64::new(s.upper_half_count() as f64, 0.0)
        }
    }
}

/// `Tr H^p` by repeated multiplication; `p = 0` gives `N`.
pub fn trace_power(h: &DMatrix<f64>, p: usize) -> f64 {
    if p == 0 {
        return h.nrows() as f64;
    }
    let mut acc = h.clone();
    for _ in 1..p {
        acc = &acc * h;
    }
    acc.trace()
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct BlockResult {
    re: Vec<Welford>,
    im: Vec<Welford>,
    rejected: u64,
}

fn run_block(
    dim: usize,
    seed: u64,
    range: std::ops::Range<u64>,
    stats: &[Statistic],
) -> Result<BlockResult> {
    let with_spectrum = stats.iter().any(Statistic::needs_spectrum);
    let mut out = BlockResult {
        re: vec![Welford::default(); stats.len()],
        im: vec![Welford::default(); stats.len()],
        rejected: 0,
    };
    for index in range {
        let (h, spectrum, rejected) = draw_sample(dim, seed, index, with_spectrum)?;
        out.rejected += rejected;
        for (k, stat) in stats.iter().enumerate() {
            let v = evaluate(stat, &h, spectrum.as_ref());
            out.re[k].push(v.re);
            out.im[k].push(v.im);
        }
    }
    Ok(out)
}

/// Estimates several statistics on one shared stream of samples. Returns
/// `(real part, imaginary part)` per statistic.
pub fn estimate_statistics(
    dim: usize,
    n_samples: u64,
    seed: u64,
    stats: &[Statistic],
) -> Result<Vec<(MomentEstimate, MomentEstimate)>> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    for stat in stats {
        if let Statistic::Schur(l) = stat {
            if l.len() > dim {
                return Err(Error::InvalidPartition(format!(
                    "{l} has more than {dim} parts"
                )));
            }
        }
    }
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let blocks: Vec<BlockResult> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK_SIZE;
            let end = (start + BLOCK_SIZE).min(n_samples);
            run_block(dim, seed, start..end, stats)
        })
        .collect::<Result<_>>()?;

    let mut re = vec![Welford::default(); stats.len()];
    let mut im = vec![Welford::default(); stats.len()];
    let mut rejected = 0;
    for block in &blocks {
        for k in 0..stats.len() {
            re[k].merge(&block.re[k]);
            im[k].merge(&block.im[k]);
        }
        rejected += block.rejected;
    }
    Ok(stats
        .iter()
        .enumerate()
        .map(|(k, stat)| {
            let make = |w: &Welford, suffix: &str| MomentEstimate {
                statistic_id: format!("{}{suffix}", stat.id()),
                mean: w.mean,
                std_error: w.std_error(),
                n_samples: w.n,
                seed,
                rejected,
            };
            (make(&re[k], ""), make(&im[k], ":imag"))
        })
        .collect())
}

fn single(
    dim: usize,
    n_samples: u64,
    seed: u64,
    stat: Statistic,
) -> Result<(MomentEstimate, MomentEstimate)> {
    Ok(estimate_statistics(dim, n_samples, seed, &[stat])?
        .pop()
        .expect("one statistic"))
}

/// `⟨σ_λ(H)⟩_N` by sampling.
pub fn estimate_schur_average(
    lambda: &Partition,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<SchurEstimate> {
    let (real, imag) = single(dim, n_samples, seed, Statistic::Schur(lambda.clone()))?;
    Ok(SchurEstimate { real, imag })
}

/// `⟨Tr H^p⟩_N` by sampling, without going through eigenvalues.
pub fn estimate_trace_moment(
    power: usize,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    if power == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    Ok(single(dim, n_samples, seed, Statistic::Trace(power))?.0)
}

/// `⟨det(1 + x₁H) det(1 + x₂H)⟩_N` by sampling.
pub fn estimate_charpoly_pair(
    x1: f64,
    x2: f64,
    dim: usize,
    n_samples: u64,
    seed: u64,
) -> Result<MomentEstimate> {
    Ok(single(dim, n_samples, seed, Statistic::CharpolyPair(x1, x2))?.0)
}

/// Density of complex eigenvalues,
/// `R₁(z) = f(z)f(z̄) (z - z̄)/(i√(2π)) Σ_{n=0}^{N-2} |z|^{2n}/n!` with
/// `f(z)² = e^{-Re z²} erfc(√2 |Im z|)`, stated for `Im z > 0` and
/// extended to the lower half plane by conjugation. Zero on the real axis.
pub fn density_r1(dim: usize, z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im.abs());
    if y == 0.0 {
        return 0.0;
    }
    let r2 = x * x + y * y;
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..dim.saturating_sub(1) {
        if n > 0 {
            term *= r2 / n as f64;
        }
        sum += term;
    }
    // f(z)f(z̄) = f(z)² since f(z̄) = f(z)
    let ff = (y * y - x * x).exp() * erfc(std::f64::consts::SQRT_2 * y);
    ff * 2.0 * y / (2.0 * std::f64::consts::PI).sqrt() * sum
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫∫ R₁` over the rectangle `[x0, x1] × [y0, y1]` by tensor
/// Gauss–Legendre, `panels` subdivisions per axis.
pub fn integrate_r1(dim: usize, x0: f64, x1: f64, y0: f64, y1: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(12);
    let (hx, hy) = ((x1 - x0) / panels as f64, (y1 - y0) / panels as f64);
    let mut total = 0.0;
    for px in 0..panels {
        let (ax, bx) = (x0 + px as f64 * hx, x0 + (px + 1) as f64 * hx);
        for py in 0..panels {
            let (ay, by) = (y0 + py as f64 * hy, y0 + (py + 1) as f64 * hy);
            for &(u, wu) in &rule {
                let x = 0.5 * (ax + bx) + 0.5 * (bx - ax) * u;
                for &(v, wv) in &rule {
                    let y = 0.5 * (ay + by) + 0.5 * (by - ay) * v;
                    total += wu * wv * density_r1(dim, Complex64::new(x, y));
                }
            }
        }
    }
    total * 0.25 * hx * hy
}

/// Expected number of eigenvalues with `Im z > 0` per matrix, by quadrature.
pub fn expected_upper_half_count(dim: usize) -> f64 {
    let r = (dim as f64).sqrt() + 7.0;
    integrate_r1(dim, -r, r, 0.0, r, 24)
}

/// Rectangular grid over the upper half plane; rows start above a band
/// around the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl DensityGrid {
    /// Covers the disc of radius `√N + 1` above a band of width 0.1.
    pub fn default_for(dim: usize) -> Self {
        let r = (dim as f64).sqrt() + 1.0;
        Self {
            x_min: -r,
            x_max: r,
            y_min: 0.1,
            y_max: r,
            nx: 10,
            ny: 5,
        }
    }

    fn bin_of(&self, z: Complex64) -> Option<(usize, usize)> {
        if z.re < self.x_min || z.re >= self.x_max || z.im < self.y_min || z.im >= self.y_max {
            return None;
        }
        let i = ((z.re - self.x_min) / (self.x_max - self.x_min) * self.nx as f64) as usize;
        let j = ((z.im - self.y_min) / (self.y_max - self.y_min) * self.ny as f64) as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    fn bounds(&self, i: usize, j: usize) -> (f64, f64, f64, f64) {
        let dx = (self.x_max - self.x_min) / self.nx as f64;
        let dy = (self.y_max - self.y_min) / self.ny as f64;
        (
            self.x_min + i as f64 * dx,
            self.x_min + (i + 1) as f64 * dx,
            self.y_min + j as f64 * dy,
            self.y_min + (j + 1) as f64 * dy,
        )
    }
}

/// Bins with fewer expected counts than this are pooled into one.
pub const MIN_EXPECTED_PER_BIN: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub expected: f64,
    pub observed: u64,
    /// `(observed - expected) / √expected`.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub dim: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub grid: DensityGrid,
    pub bins: Vec<BinReport>,
    /// Low-expectation bins merged; `None` when there were none.
    pub pooled: Option<BinReport>,
    pub upper_half_count: MomentEstimate,
    pub upper_half_count_target: f64,
    pub max_abs_z: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Histograms upper-half-plane eigenvalues over `grid` and compares each
/// bin with `n_samples · ∫_bin R₁` in Poisson standard errors.
pub fn density_histogram_check(
    dim: usize,
    n_samples: u64,
    seed: u64,
    grid: &DensityGrid,
) -> Result<DensityReport> {
    if dim < 2 {
        return Err(Error::InvalidArgument("density check needs N ≥ 2".into()));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if grid.nx == 0
        || grid.ny == 0
        || grid.y_min < 0.0
        || grid.x_min >= grid.x_max
        || grid.y_min >= grid.y_max
    {
        return Err(Error::InvalidArgument(format!("degenerate grid {grid:?}")));
    }
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let per_block: Vec<(Vec<u64>, Welford, u64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; grid.nx * grid.ny];
            let mut count_stat = Welford::default();
            let mut rejected = 0;
            let start = b * BLOCK_SIZE;
            for index in start..(start + BLOCK_SIZE).min(n_samples) {
                let (_, spectrum, r) = draw_sample(dim, seed, index, true)?;
                rejected += r;
                let s = spectrum.expect("spectrum requested");
                count_stat.push(s.upper_half_count() as f64);
                for z in &s.eigenvalues {
                    if let Some((i, j)) = grid.bin_of(*z) {
                        counts[i * grid.ny + j] += 1;
                    }
                }
            }
            Ok((counts, count_stat, rejected))
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; grid.nx * grid.ny];
    let mut count_stat = Welford::default();
    let mut rejected = 0;
    for (c, w, r) in &per_block {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        count_stat.merge(w);
        rejected += r;
    }

    let threshold = 5.0;
    let mut bins = Vec::new();
    let (mut pooled_exp, mut pooled_obs) = (0.0, 0u64);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let (x0, x1, y0, y1) = grid.bounds(i, j);
            let expected = n_samples as f64 * integrate_r1(dim, x0, x1, y0, y1, 2);
            let observed = counts[i * grid.ny + j];
            if expected < MIN_EXPECTED_PER_BIN {
                pooled_exp += expected;
                pooled_obs += observed;
                continue;
            }
            bins.push(BinReport {
                x0,
                x1,
                y0,
                y1,
                expected,
                observed,
                z: (observed as f64 - expected) / expected.sqrt(),
            });
        }
    }
    let pooled = (pooled_exp > 0.0 || pooled_obs > 0).then(|| BinReport {
        x0: grid.x_min,
        x1: grid.x_max,
        y0: grid.y_min,
        y1: grid.y_max,
        expected: pooled_exp,
        observed: pooled_obs,
        z: if pooled_exp > 0.0 {
            (pooled_obs as f64 - pooled_exp) / pooled_exp.sqrt()
        } else {
            f64::MAX
        },
    });
    let mut max_abs_z = bins.iter().map(|b| b.z.abs()).fold(0.0, f64::max);
    if let Some(p) = pooled
        .as_ref()
        .filter(|p| p.expected >= MIN_EXPECTED_PER_BIN)
    {
        max_abs_z = max_abs_z.max(p.z.abs());
    }
    let upper_half_count = MomentEstimate {
        statistic_id: Statistic::UpperHalfCount.id(),
        mean: count_stat.mean,
        std_error: count_stat.std_error(),
        n_samples: count_stat.n,
        seed,
        rejected,
    };
    let upper_half_count_target = expected_upper_half_count(dim);
    let count_z = upper_half_count.z_score(upper_half_count_target);
    Ok(DensityReport {
        dim,
        n_samples,
        seed,
        grid: *grid,
        bins,
        pooled,
        passed: max_abs_z < threshold && count_z.abs() < threshold,
        upper_half_count,
        upper_half_count_target,
        max_abs_z,
        threshold,
    })
}
