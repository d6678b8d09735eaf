use num_complex::Complex64;
use num_traits::ToPrimitive;

use schur_ginibre::ginibre::{charpoly_product_average, schur_average_closed, trace_moment};
use schur_ginibre::montecarlo::{
    density_r1, estimate_charpoly_pair, estimate_schur_average, estimate_statistics,
    estimate_trace_moment, expected_upper_half_count, integrate_r1, spectrum_sample, Statistic,
};
use schur_ginibre::partitions::{enumerate, Partition};
use schur_ginibre::report::{run_verification, VerificationPlan, VerificationReport};
use schur_ginibre::symfunc::{power_sum, schur_jacobi_trudi, schur_tableau, PointSet};

fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

#[test]
fn jacobi_trudi_matches_tableau_on_sampled_spectra() {
    for index in 0..100 {
        let dim = 2 + (index as usize % 4);
        let s = spectrum_sample(dim, 42, index).unwrap();
        let pts = PointSet::new(s.eigenvalues.clone()).unwrap();
        for lam in enumerate(8, dim, 8) {
            let jt = schur_jacobi_trudi(&lam, &pts);
            let tab = schur_tableau(&lam, &pts).unwrap();
            assert!(
                (jt - tab).norm() <= 1e-9 * tab.norm().max(1.0),
                "sample {index}, {lam}: {jt} vs {tab}"
            );
        }
    }
}

#[test]
fn spectra_are_conjugate_closed_and_match_the_trace() {
    for index in 0..200 {
        let s = spectrum_sample(5, 7, index).unwrap();
        assert!(s.is_conjugate_closed(1e-8));
        let pts = PointSet::new(s.eigenvalues.clone()).unwrap();
        let t: Complex64 = power_sum(1, &pts);
        assert!((t - s.trace()).norm() < 1e-12);
        assert!(t.im.abs() < 1e-9);
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let stats = [
        Statistic::Schur(p("2,2")),
        Statistic::Trace(4),
        Statistic::CharpolyPair(0.5, 0.5),
    ];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_statistics(4, 5000, 9, &stats).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn identical_seeds_give_identical_estimates() {
    let a = estimate_trace_moment(2, 3, 3000, 11).unwrap();
    let b = estimate_trace_moment(2, 3, 3000, 11).unwrap();
    let c = estimate_trace_moment(2, 3, 3000, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
}

#[test]
fn schur_averages_by_sampling() {
    for (lam, dim) in [("2", 2), ("2,2", 3), ("4", 2), ("1", 3), ("3,1", 4)] {
        let lam = p(lam);
        let est = estimate_schur_average(&lam, dim, 20_000, 42).unwrap();
        let target = schur_average_closed(&lam, dim).value.to_f64().unwrap();
        assert!(
            est.real.z_score(target).abs() < 5.0,
            "{lam} N={dim}: {:?}",
            est.real
        );
        assert!(
            est.imaginary_part_negligible(),
            "{lam} N={dim}: {:?}",
            est.imag
        );
    }
}

#[test]
fn low_order_moments_by_sampling() {
    let t = estimate_trace_moment(2, 3, 20_000, 5).unwrap();
    assert!(t.z_score(trace_moment(1, 3).to_f64().unwrap()).abs() < 5.0);
    let c = estimate_charpoly_pair(0.5, 0.5, 2, 20_000, 5).unwrap();
    let exact = charpoly_product_average(&[0.5, 0.5], 2).unwrap();
    assert!((exact - 1.625).abs() < 1e-15);
    assert!(c.z_score(exact).abs() < 5.0);
}

#[test]
fn upper_half_mass_from_density() {
    for dim in 2..=5 {
        let quad = integrate_r1(dim, -8.0, 8.0, 0.0, 8.0, 16);
        assert!(
            (quad - expected_upper_half_count(dim)).abs() < 1e-6,
            "N={dim}"
        );
    }
    let err = (expected_upper_half_count(2) - (1.0 - 1.0 / 2f64.sqrt())).abs();
    assert!(err < 1e-9, "{err:e}");
}

#[test]
fn density_is_symmetric_under_reflection() {
    for &(x, y) in &[(0.3, 0.4), (-1.2, 0.7), (0.0, 1.5)] {
        let z = Complex64::new(x, y);
        let a = density_r1(4, z);
        assert!((a - density_r1(4, Complex64::new(-x, y))).abs() < 1e-14);
        assert!((a - density_r1(4, z.conj())).abs() < 1e-14);
        assert!(a > 0.0);
    }
}

#[test]
fn default_matrix_passes_and_round_trips() {
    let report = run_verification(&VerificationPlan::default(), 100_000, 42).unwrap();
    for e in report.failures() {
        eprintln!("failed: {e:?}");
    }
    assert!(report.all_passed);
    let json = serde_json::to_string(&report).unwrap();
    let back: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn wrong_target_is_caught() {
    let plan = VerificationPlan {
        target_offset: 1.0,
        ..VerificationPlan::default()
    };
    let report = run_verification(&plan, 20_000, 42).unwrap();
    assert!(!report.all_passed);
}

#[test]
fn odd_number_of_characteristic_polynomials() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use schur_ginibre::montecarlo::{sample_matrix, sample_rng};

    // N = 1: ⟨∏(1 + x_j h)⟩ = 1 + e₂(x) since ⟨h⟩ = ⟨h³⟩ = 0 and ⟨h²⟩ = 1
    let x: Vec<BigRational> = [(1, 2), (-2, 3), (3, 1)]
        .iter()
        .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        .collect();
    let e2 = &x[0] * &x[1] + &x[0] * &x[2] + &x[1] * &x[2];
    assert_eq!(
        charpoly_product_average(&x, 1).unwrap(),
        BigRational::from_integer(1.into()) + e2
    );

    let xs = [0.4, -0.3, 0.5];
    let dim = 3;
    let n = 40_000u64;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for index in 0..n {
        let h = sample_matrix(dim, &mut sample_rng(17, index));
        let id = nalgebra::DMatrix::<f64>::identity(dim, dim);
        let v: f64 = xs.iter().map(|&x| (&id + &h * x).determinant()).product();
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / n as f64;
    let se = ((sum_sq / n as f64 - mean * mean) / (n - 1) as f64).sqrt();
    let exact = charpoly_product_average(&xs, dim).unwrap();
    assert!(
        ((mean - exact) / se).abs() < 5.0,
        "{mean} ± {se} vs {exact}"
    );
}
