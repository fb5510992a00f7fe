#![no_main]

use libfuzzer_sys::fuzz_target;
use qmm::cli::{parse_abscissa_list, parse_grid_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_abscissa_list(text) {
        assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
    }
    if let Ok(grid) = parse_grid_spec(text) {
        if grid.points <= 4096 {
            for log in [false, true] {
                let v = grid.values(log);
                assert_eq!(v.len(), grid.points);
                assert_eq!(v[0], grid.min);
            }
        }
    }
});
