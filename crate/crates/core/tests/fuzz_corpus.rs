//! Replays the checked-in fuzz seeds through the fuzz-target assertions.

use std::fs;
use std::path::PathBuf;

use nctoric::io::{parse_polytope_unvalidated, parse_rmatrix_json, require_delzant, rmatrix_json};
use nctoric::ncring::SectionLabel;
use nctoric::number::parse_rational;
use nctoric::polytope::Standard;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn polytope_seeds() {
    let mut parsed = 0;
    for s in seeds("polytope_json") {
        if let Ok(p) = parse_polytope_unvalidated(&s) {
            parsed += 1;
            let report = p.validate_delzant();
            assert_eq!(report.pass, require_delzant(p).is_ok());
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn rmatrix_seeds() {
    let mut parsed = 0;
    for s in seeds("rmatrix_json") {
        if let Ok(c) = parse_rmatrix_json(&s) {
            parsed += 1;
            let again = parse_rmatrix_json(&rmatrix_json(&c).to_string()).unwrap();
            for i in 0..c.dim() {
                for j in 0..c.dim() {
                    assert_eq!(c.exact_entry(i, j), again.exact_entry(i, j));
                }
            }
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn label_seeds() {
    let p = Standard::Cp2.polytope().unwrap();
    for s in seeds("basis_label") {
        if let Ok(label) = s.parse::<SectionLabel>() {
            let canonical = format!("{}:{}", label.degree, label.weight);
            assert_eq!(canonical.parse::<SectionLabel>().as_ref(), Ok(&label));
            if label.weight.dim() == 2 {
                if let Ok(section) = label.resolve(&p) {
                    assert_eq!(section.label(), canonical);
                }
            }
        }
    }
}

#[test]
fn rational_seeds() {
    for s in seeds("rational") {
        if let Ok(q) = parse_rational(&s) {
            assert_eq!(parse_rational(&q.to_string()).as_ref(), Ok(&q));
        }
    }
}
