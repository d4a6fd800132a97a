#![no_main]

use libfuzzer_sys::fuzz_target;
use nctoric::ncring::SectionLabel;
use nctoric::polytope::Standard;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(label) = s.parse::<SectionLabel>() else {
        return;
    };
    let canonical = format!("{}:{}", label.degree, label.weight);
    assert_eq!(canonical.parse::<SectionLabel>().as_ref(), Ok(&label));
    if label.weight.dim() == 2 {
        let p = Standard::Cp2.polytope().expect("cp2");
        if let Ok(section) = label.resolve(&p) {
            assert_eq!(section.label(), canonical);
        }
    }
});
