#![no_main]

use libfuzzer_sys::fuzz_target;
use nctoric::number::parse_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    // Huge exponents are legal input but slow to expand.
    if s.len() > 256 {
        return;
    }
    if let Ok(q) = parse_rational(s) {
        assert_eq!(parse_rational(&q.to_string()).as_ref(), Ok(&q));
    }
});
