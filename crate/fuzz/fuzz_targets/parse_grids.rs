#![no_main]
//! Grid-list parsers (--rho, --q and friends) on arbitrary input: no
//! panics, no empty or non-finite results, bounded range expansion.

use libfuzzer_sys::fuzz_target;
use signtest_cli::input::{parse_f64_list, parse_usize_spec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_f64_list(text) {
        assert!(!values.is_empty());
        assert!(values.iter().all(|v| v.is_finite()));
    }
    if let Ok(grid) = parse_usize_spec(text) {
        assert!(!grid.is_empty());
        assert!(grid.len() <= 100_000);
        assert!(grid.iter().all(|&q| q >= 1));
    }
});
