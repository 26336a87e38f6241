#![no_main]
//! The observation-file parser must never panic and every value it returns
//! must be finite and traceable to an input line.

use libfuzzer_sys::fuzz_target;
use signtest_cli::input::parse_sample_text;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(parsed) = parse_sample_text(text) {
        assert!(!parsed.values.is_empty());
        assert_eq!(parsed.values.len(), parsed.lines.len());
        let line_count = text.lines().count();
        for (&value, &line) in parsed.values.iter().zip(&parsed.lines) {
            assert!(value.is_finite());
            assert!(line >= 1 && line <= line_count);
        }
    }
});
