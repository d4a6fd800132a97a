#![no_main]

use libfuzzer_sys::fuzz_target;
use nctoric::io::{parse_polytope_unvalidated, require_delzant};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(p) = parse_polytope_unvalidated(s) else {
        return;
    };
    // Keep vertex enumeration cheap.
    if p.dim() > 4 || p.facets().len() > 12 {
        return;
    }
    let report = p.validate_delzant();
    assert_eq!(report, p.validate_delzant());
    assert_eq!(report.pass, require_delzant(p).is_ok());
});
