#![no_main]

use libfuzzer_sys::fuzz_target;
use nctoric::io::{parse_rmatrix_json, rmatrix_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(c) = parse_rmatrix_json(s) else {
        return;
    };
    assert!(c.validate().pass);
    // Export and re-import must give the same exact entries.
    let again = parse_rmatrix_json(&rmatrix_json(&c).to_string()).expect("exported matrix parses");
    for i in 0..c.dim() {
        for j in 0..c.dim() {
            assert_eq!(c.exact_entry(i, j), again.exact_entry(i, j));
        }
    }
});
