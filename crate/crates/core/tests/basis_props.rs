use proptest::prelude::*;
use qmm::basis::ANCHOR_PERCENT;
use qmm::{CalibratedModel, Family, ModelSpec, QmmError};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn coefficients(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5..1.5f64, m)
}

fn percentage() -> impl Strategy<Value = f64> {
    (-5.0..0.0f64).prop_map(|e| 10f64.powf(e))
}

fn any_spec() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (0.2..3.0f64, 0.3..1.5f64).prop_map(|(k, a)| ModelSpec::power_law(k, a).unwrap()),
        (0.2..4.0f64, -3.0..3.0f64).prop_map(|(a, b)| ModelSpec::log_linear(a, b).unwrap()),
        (1.0..50.0f64, 0.05..0.5f64, 0.3..0.9f64, 0.0..0.1f64)
            .prop_map(|(a, b1, b2, b3)| ModelSpec::itu_cdf(a, b1, b2, b3).unwrap()),
        (1.0..50.0f64, 5.0..150.0f64).prop_map(|(a, f)| ModelSpec::chinese_cdf(a, f).unwrap()),
        (1.0..50.0f64, 0.0..0.1f64).prop_map(|(a, s)| ModelSpec::yeo_cdf(a, s).unwrap()),
    ]
}

/// Explicit product form of each family's calibrated prediction.
fn closed_form(spec: &ModelSpec, c: &[f64], x: f64) -> f64 {
    let json = serde_json::to_value(spec).unwrap();
    let p = |k: &str| json["params"][k].as_f64().unwrap();
    let lr = (x / ANCHOR_PERCENT).ln();
    match spec.family() {
        Family::PowerLaw => p("k").powf(c[0]) * x.powf(p("alpha") * c[1]),
        Family::LogLinear => c[0] * p("a") * x.ln() + c[1] * p("b"),
        Family::ItuCdf => {
            p("a001").powf(c[0])
                * p("b1").powf(c[1])
                * x.powf(-(c[2] * p("b2") + c[3] * p("b3") * x.log10()))
        }
        Family::ChineseCdf => {
            let a = p("a001_eq");
            let e = -0.854 * c[1]
                + 0.026 * c[2] * x.ln_1p() / x
                + 0.022 * c[3] * a.ln()
                + 0.03 * c[4] * p("frequency_ghz").ln()
                + 0.226 * c[5] * (1.0 + x);
            a.powf(c[0]) * (lr * e).exp()
        }
        Family::YeoCdf => {
            let a = p("a001");
            let e = -1.0063 * c[1] - 0.0591 * c[2] * x.ln()
                + 0.1317 * c[3] * a.ln()
                + c[4] * p("beta_sin_theta") * (1.0 - x);
            a.powf(c[0]) * (lr * e).exp()
        }
    }
}

fn abscissa_for(spec: &ModelSpec, u: f64, pct: f64) -> f64 {
    if spec.family().is_cdf() {
        pct
    } else {
        1.0 + 149.0 * u
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn prediction_matches_closed_form(
        (spec, c) in any_spec().prop_flat_map(|s| (Just(s), coefficients(s.basis_count()))),
        u in 0.0..1.0f64,
        pct in percentage(),
    ) {
        let x = abscissa_for(&spec, u, pct);
        let model = CalibratedModel::new(spec, c.clone(), None).unwrap();
        let got = model.predict(x).unwrap();
        let want = closed_form(&spec, &c, x);
        prop_assert!(close(got, want, 1e-12) || (got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

proptest! {
    #[test]
    fn all_ones_is_the_base_model(spec in any_spec(), u in 0.0..1.0f64, pct in percentage()) {
        let x = abscissa_for(&spec, u, pct);
        let base = CalibratedModel::base(spec, None).unwrap();
        prop_assert_eq!(base.predict(x).unwrap(), spec.base_prediction(x).unwrap());
    }

    #[test]
    fn basis_length_matches_family(spec in any_spec(), u in 0.0..1.0f64, pct in percentage()) {
        let x = abscissa_for(&spec, u, pct);
        let phi = spec.basis_eval(x).unwrap();
        prop_assert_eq!(phi.len(), spec.basis_count());
        prop_assert_eq!(phi.len(), spec.family().basis_count());
        prop_assert!(phi.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn non_positive_abscissas_are_rejected(
        spec in any_spec(),
        x in prop_oneof![-1e6..=0.0f64, Just(-0.0), Just(f64::NAN), Just(f64::NEG_INFINITY), Just(f64::INFINITY)],
    ) {
        let is_domain = |e: &QmmError| matches!(e, QmmError::Domain { .. });
        prop_assert!(spec.basis_eval(x).as_ref().is_err_and(is_domain));
        prop_assert!(spec.base_prediction(x).as_ref().is_err_and(is_domain));
        let model = CalibratedModel::base(spec, None).unwrap();
        prop_assert!(model.predict(x).is_err());
    }
}
