use nalgebra::DVector;
use proptest::prelude::*;
use qmm::linalg::weighted_squared_error;
use qmm::{gram_matrix, moment_vector, solve_coefficients, DesignSamples, FitOptions};

/// `m` basis rows of `n` samples each, entries in [-2, 2], plus ordinates.
fn system(max_m: usize, max_n: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), m),
            prop::collection::vec(-2.0..2.0f64, n),
        )
    })
}

fn weights(n: usize) -> impl Strategy<Value = Option<Vec<f64>>> {
    prop::option::of(prop::collection::vec(0.05..3.0f64, n))
}

fn options(w: Option<Vec<f64>>) -> FitOptions {
    w.map(FitOptions::with_weights).unwrap_or_default()
}

proptest! {
    #[test]
    fn gram_is_exactly_symmetric(((rows, y), w) in system(6, 20).prop_flat_map(|s| {
        let n = s.1.len();
        (Just(s), weights(n))
    })) {
        let samples = DesignSamples::from_rows(&rows, &y).unwrap();
        let g = gram_matrix(&samples, &options(w)).unwrap();
        prop_assert_eq!(&g, &g.transpose());
    }

    #[test]
    fn gram_is_positive_semidefinite((rows, y) in system(6, 20)) {
        let samples = DesignSamples::from_rows(&rows, &y).unwrap();
        let g = gram_matrix(&samples, &FitOptions::default()).unwrap();
        let trace = g.trace();
        for ev in g.symmetric_eigen().eigenvalues.iter() {
            prop_assert!(*ev >= -1e-9 * trace, "eigenvalue {ev} with trace {trace}");
        }
    }

    #[test]
    fn solution_is_least_squares_optimal(((rows, y), w) in system(4, 12).prop_flat_map(|s| {
        let n = s.1.len();
        (Just(s), weights(n))
    })) {
        let opts = options(w);
        let samples = DesignSamples::from_rows(&rows, &y).unwrap();
        let g = gram_matrix(&samples, &opts).unwrap();
        let b = moment_vector(&samples, &opts).unwrap();
        let (c, _) = solve_coefficients(&g, &b, &opts).unwrap();
        let best = weighted_squared_error(&samples, &c, &opts).unwrap();
        for m in 0..c.len() {
            for step in [-1e-3, 1e-3] {
                let mut alt = c.clone();
                alt[m] += step;
                let e = weighted_squared_error(&samples, &alt, &opts).unwrap();
                prop_assert!(e >= best - 1e-12 * best.max(1.0), "coef {m} step {step}: {e} < {best}");
            }
        }
    }

    #[test]
    fn rank_deficient_solution_has_minimum_norm(
        (rows, y) in system(3, 12),
        scale in -3.0..3.0f64,
        t in -10.0..10.0f64,
    ) {
        prop_assume!(scale.abs() > 0.1);
        // append a copy of row 0 scaled by `scale`: (scale e_0 - e_last) is null
        let mut rows = rows;
        let dup: Vec<f64> = rows[0].iter().map(|v| v * scale).collect();
        rows.push(dup);
        let m = rows.len();
        let samples = DesignSamples::from_rows(&rows, &y).unwrap();
        let opts = FitOptions::default();
        let g = gram_matrix(&samples, &opts).unwrap();
        let b = moment_vector(&samples, &opts).unwrap();
        let (c, diag) = solve_coefficients(&g, &b, &opts).unwrap();
        prop_assert!(diag.rank < m);
        let mut null = DVector::zeros(m);
        null[0] = scale;
        null[m - 1] = -1.0;
        let null = null.normalize();
        prop_assert!((&g * &null).norm() <= 1e-9 * g.norm().max(1.0));
        let alt = &c + &null * t;
        prop_assert!(alt.norm() >= c.norm() - 1e-9);
        prop_assert!(c.dot(&null).abs() <= 1e-9 * c.norm().max(1.0));
    }
}
