#![no_main]

use libfuzzer_sys::fuzz_target;
use qmm::parse_measurement_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(series) = parse_measurement_csv(data) {
        let again =
            parse_measurement_csv(series.to_csv().as_bytes()).expect("serialized series parses");
        assert_eq!(series, again);
    }
});
