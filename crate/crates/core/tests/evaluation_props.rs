use proptest::prelude::*;
use qmm::evaluation::weighted_rmse;
use qmm::rmse;

fn paired(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(-1e3..1e3f64, n),
            prop::collection::vec(-1e3..1e3f64, n),
        )
    })
}

proptest! {
    #[test]
    fn rmse_is_symmetric((a, b) in paired(40)) {
        prop_assert_eq!(rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
    }

    #[test]
    fn rmse_is_scale_equivariant((a, b) in paired(40), lambda in -1e3..1e3f64) {
        let la: Vec<f64> = a.iter().map(|v| lambda * v).collect();
        let lb: Vec<f64> = b.iter().map(|v| lambda * v).collect();
        let scaled = rmse(&la, &lb).unwrap();
        let expect = lambda.abs() * rmse(&a, &b).unwrap();
        prop_assert!((scaled - expect).abs() <= 1e-12 * expect.max(1e-300), "{scaled} vs {expect}");
    }

    #[test]
    fn unit_weights_reduce_to_rmse((a, b) in paired(40)) {
        let w = vec![1.0; a.len()];
        prop_assert_eq!(weighted_rmse(&a, &b, &w).unwrap(), rmse(&a, &b).unwrap());
    }

    #[test]
    fn rmse_is_zero_only_on_equal_vectors((a, _) in paired(40)) {
        prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    }
}
