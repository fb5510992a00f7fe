#![no_main]

use libfuzzer_sys::fuzz_target;
use qmm::cli::load_model_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(model) = load_model_json(text) {
        for x in [1e-5, 0.01, 1.0, 50.0] {
            if let Ok(y) = model.predict(x) {
                assert!(!y.is_nan());
            }
        }
        let json = serde_json::to_string(&model).expect("model serializes");
        assert_eq!(load_model_json(&json).expect("model reloads"), model);
    }
});
