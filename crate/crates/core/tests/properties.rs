//! Property tests for invariants that must hold for every input.

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use bergman_bands::band_solver::{
    almost_eigen_check, gap_report, read_band_csv, spectrum_components, write_band_csv, Interval,
    SpectrumOptions,
};
use bergman_bands::conformal::ConformalMap;
use bergman_bands::disc_spectrum::{moment_eigenvalue, DiscSpectrum};
use bergman_bands::floquet::{floquet_forward, floquet_inverse, CellField};
use bergman_bands::geometry::{build_disc_quadrature, CellGeometry};
use bergman_bands::linalg::CMatrix;
use bergman_bands::par::Execution;
use bergman_bands::symbols::{
    eval_periodic_symbol, synthesize_profile, MomentConvention, RadialProfile, TargetSpec,
};

fn distinct(v: &[f64], gap: f64) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).all(|w| w[1] - w[0] > gap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesis_round_trips(targets in prop::collection::vec(-1.0..1.0f64, 1..=4)) {
        let p = synthesize_profile(&targets, MomentConvention::Corrected).unwrap();
        for (i, t) in targets.iter().enumerate() {
            let got = moment_eigenvalue(&p, i + 1, MomentConvention::Corrected);
            prop_assert!((got - t).abs() < 1e-8, "mode {}: {} vs {}", i + 1, got, t);
        }
    }

    #[test]
    fn literal_convention_round_trips_too(targets in prop::collection::vec(-1.0..1.0f64, 1..=3)) {
        let c = MomentConvention::Literal;
        let p = synthesize_profile(&targets, c).unwrap();
        for (i, t) in targets.iter().enumerate() {
            prop_assert!((moment_eigenvalue(&p, i + 1, c) - t).abs() < 1e-8);
        }
    }

    #[test]
    fn disc_spectrum_is_modulus_sorted_and_bounded(coeffs in prop::collection::vec(-50.0..50.0f64, 0..=4)) {
        let p = RadialProfile::new(coeffs);
        let s = DiscSpectrum::from_profile(&p, 24, MomentConvention::Corrected);
        let v = s.eigenvalues();
        prop_assert!(v.windows(2).all(|w| w[0].abs() >= w[1].abs()));
        let bound = p.sup_norm();
        prop_assert!(v.iter().all(|l| l.abs() <= bound * (1.0 + 1e-9) + 1e-12));
    }

    #[test]
    fn components_cover_values_and_zero(
        values in prop::collection::vec(-2.0..2.0f64, 0..60),
        merge_tol in 0.0..0.1f64,
        zero_threshold in 0.0..0.05f64,
    ) {
        let opts = SpectrumOptions { merge_tol, zero_threshold };
        let comps = spectrum_components(values.iter().copied(), &opts);
        prop_assert!(comps.iter().any(|c| c.contains(0.0)));
        for v in &values {
            prop_assert!(comps.iter().any(|c| c.contains(*v)), "{} uncovered", v);
        }
        for w in comps.windows(2) {
            prop_assert!(w[0].lo <= w[0].hi);
            prop_assert!(w[1].lo - w[0].hi > merge_tol);
        }
    }

    #[test]
    fn report_verdict_is_sound(
        points in prop::collection::vec(-1.0..1.0f64, 1..30),
        targets in prop::collection::vec(-1.0..1.0f64, 0..4),
        epsilon in 0.001..0.1f64,
        delta in 0.0..0.1f64,
    ) {
        prop_assume!(distinct(&targets, 0.0));
        let opts = SpectrumOptions { merge_tol: 0.01, zero_threshold: 0.001 };
        let comps = spectrum_components(points, &opts);
        let spec = TargetSpec::new(targets, epsilon, delta).unwrap();
        let r = gap_report(&comps, &spec);
        for t in &r.targets {
            prop_assert_eq!(t.hit, t.distance < epsilon);
            let direct = comps.iter().map(|c| c.distance_to(t.target)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(t.distance, direct);
        }
        if r.verdict.passed() {
            prop_assert!(r.targets.iter().all(|t| t.hit));
            prop_assert!(r.delta_achieved.is_none_or(|d| d >= delta));
        }
        prop_assert_eq!(r.gaps.len(), comps.len() - 1);
    }

    #[test]
    fn interval_distance_is_symmetric(a in -1.0..1.0f64, b in 0.0..1.0f64, c in -1.0..1.0f64, d in 0.0..1.0f64) {
        let x = Interval { lo: a, hi: a + b };
        let y = Interval { lo: c, hi: c + d };
        prop_assert_eq!(x.distance(&y), y.distance(&x));
        let overlap = x.lo <= y.hi && y.lo <= x.hi;
        prop_assert_eq!(x.distance(&y) == 0.0, overlap);
    }

    #[test]
    fn almost_eigenvalue_bound(seed in any::<u64>(), n in 1usize..12, mu in -3.0..3.0f64) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let v = DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let r = almost_eigen_check(&a, &v, mu).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn floquet_round_trip(m_half in 0usize..6, seed in any::<u64>()) {
        use rand::SeedableRng;
        let q = build_disc_quadrature(0.3, 2, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = CellField::random(m_half, q.len(), &mut rng);
        let ff = floquet_forward(&f, Execution::Sequential);
        let n = f.norm(&q);
        prop_assert!((ff.norm(&q) - n).abs() <= 1e-12 * n);
        let back = floquet_inverse(&ff, Execution::Sequential).unwrap();
        for (a, b) in back.samples.iter().flatten().zip(f.samples.iter().flatten()) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn periodic_symbol_is_exactly_periodic(a in -31i32..=31, b in -19i32..=19, m in -50i32..=50) {
        // Dyadic points make the translation exact in floating point.
        let p = synthesize_profile(&[0.3, 0.2, 0.1], MomentConvention::Corrected).unwrap();
        let cell = CellGeometry::new(0.3, 0.05).unwrap();
        let z = Complex64::new(a as f64 / 64.0, b as f64 / 64.0);
        let shifted = z + m as f64;
        prop_assert_eq!(eval_periodic_symbol(&p, &cell, shifted), eval_periodic_symbol(&p, &cell, z));
    }

    #[test]
    fn moebius_maps_disc_to_disc(ar in -0.6..0.6f64, ai in -0.6..0.6f64, r in 0.0..0.99f64, t in 0.0..6.28f64) {
        let m = ConformalMap::moebius(Complex64::new(ar, ai)).unwrap();
        let w = Complex64::from_polar(r, t);
        let z = m.apply(w);
        prop_assert!(z.norm() < 1.0);
        prop_assert!((m.inverse().unwrap().apply(z) - w).norm() < 1e-12);
    }

    #[test]
    fn band_csv_round_trips_exactly(
        rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 1..5), 1..6),
    ) {
        let etas: Vec<f64> = (0..rows.len()).map(|j| -3.0 + j as f64 * 0.37).collect();
        let mut buf = Vec::new();
        write_band_csv(&etas, &rows, &mut buf).unwrap();
        let t = read_band_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(t.etas, etas);
        prop_assert_eq!(t.lambdas, rows);
    }

    #[test]
    fn target_spec_sorts_descending(targets in prop::collection::vec(-1.0..1.0f64, 0..6)) {
        prop_assume!(distinct(&targets, 0.0));
        let s = TargetSpec::new(targets, 0.01, 0.02).unwrap();
        prop_assert!(s.targets.windows(2).all(|w| w[0] > w[1]));
    }
}
