//! Cross-module invariants as property tests.

use std::collections::BTreeSet;

use nctoric::groupoid::fuzz_verify;
use nctoric::ncring::{star, RingElement, WeightedSection};
use nctoric::polytope::{DelzantPolytope, LatticePoint, Standard};
use nctoric::quantization::{bs_fibres, hom_dimension};
use nctoric::rmatrix::RMatrix;
use nctoric::toric_flows::{
    averaged_moment, f_integral, hamiltonian_residual, torus_invariance_residual, FlowConfig, ToricKahlerChart,
};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn catalog() -> impl Strategy<Value = DelzantPolytope> {
    prop_oneof![
        Just(Standard::Cp1),
        Just(Standard::Cp2),
        Just(Standard::Cp1xCp1),
        (1i64..4).prop_map(Standard::Hirzebruch),
        (1usize..4).prop_map(Standard::Simplex),
    ]
    .prop_map(|s| s.polytope().expect("catalog polytope"))
}

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex64::new(a, b))
}

fn planar(c: Complex64) -> RMatrix {
    RMatrix::with_entry(2, 0, 1, c).unwrap()
}

fn chart_point() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.05f64..3.0, 0.0..std::f64::consts::TAU), 2)
        .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dilates_are_closed_under_addition(p in catalog(), n1 in 0u32..4, n2 in 0u32..4) {
        let sum: BTreeSet<_> = p.lattice_points(n1 + n2).unwrap().into_iter().collect();
        for a in p.lattice_points(n1).unwrap() {
            for b in p.lattice_points(n2).unwrap() {
                prop_assert!(sum.contains(&a.add(&b)));
            }
        }
    }

    #[test]
    fn enumerated_points_are_contained(p in catalog(), n in 0u32..6) {
        for m in p.lattice_points(n).unwrap() {
            prop_assert!(p.contains(f64::from(n), &m.as_f64(), 0.0).unwrap());
            prop_assert!(p.contains_lattice(n, &m).unwrap());
        }
    }

    #[test]
    fn vertices_saturate_exactly_dim_facets(p in catalog()) {
        for v in p.vertices().unwrap() {
            let tight = p
                .facets()
                .iter()
                .filter(|f| {
                    let s: BigRational = f
                        .normal
                        .iter()
                        .zip(&v)
                        .map(|(a, x)| x * BigRational::from_integer((*a).into()))
                        .sum();
                    (s + BigRational::from_integer(f.offset.into())).is_zero()
                })
                .count();
            prop_assert_eq!(tight, p.dim());
        }
    }

    #[test]
    fn fibre_weights_add_within_degree_sums(p in catalog(), n1 in 0u32..3, n2 in 0u32..3) {
        let target: BTreeSet<LatticePoint> =
            bs_fibres(&p, n1 + n2).unwrap().into_iter().map(|f| f.weight).collect();
        for a in bs_fibres(&p, n1).unwrap() {
            for b in bs_fibres(&p, n2).unwrap() {
                prop_assert!(target.contains(&a.weight.add(&b.weight)));
            }
        }
        prop_assert_eq!(hom_dimension(&p, n1).unwrap(), bs_fibres(&p, n1).unwrap().len());
    }

    #[test]
    fn unit_and_grading(c in complex(2.0), n1 in 0u32..4, n2 in 0u32..4, k in 0usize..64) {
        let p = Standard::Cp2.polytope().unwrap();
        let c = planar(c);
        let pick = |n: u32, k: usize| {
            let pts = p.lattice_points(n).unwrap();
            WeightedSection::new(&p, n, pts[k % pts.len()].clone()).unwrap()
        };
        let (a, b) = (pick(n1, k), pick(n2, k / 3));
        let unit = RingElement::basis(WeightedSection::unit(2));
        let ea = RingElement::basis(a.clone());
        prop_assert_eq!(star(&c, &p, &unit, &ea).unwrap(), ea.clone());
        prop_assert_eq!(star(&c, &p, &ea, &unit).unwrap(), ea.clone());
        let prod = star(&c, &p, &ea, &RingElement::basis(b.clone())).unwrap();
        prop_assert_eq!(prod.len(), 1);
        let (s, _) = prod.terms().iter().next().unwrap();
        prop_assert_eq!(s.degree(), n1 + n2);
        prop_assert!(p.contains_lattice(n1 + n2, s.weight()).unwrap());
    }

    #[test]
    fn hamiltonian_anchor_and_torus_invariance(z in chart_point(), which in 0usize..3) {
        let chart = [ToricKahlerChart::cp2(), ToricKahlerChart::cp1xcp1(), ToricKahlerChart::cp2_vertex()][which].clone();
        prop_assert!(hamiltonian_residual(&chart, &z).unwrap() < 1e-8);
        prop_assert!(torus_invariance_residual(&chart, &z).unwrap() < 1e-8);
    }

    #[test]
    fn real_c_average_is_n_times_the_moment(z in chart_point(), a in -2.0f64..2.0, n in 1u32..3) {
        let chart = ToricKahlerChart::cp2();
        let m = averaged_moment(&planar(Complex64::new(a, 0.0)), &chart, &z, f64::from(n), &FlowConfig::default()).unwrap();
        for (x, y) in m.value.iter().zip(chart.moment_map(&z)) {
            prop_assert!((x - f64::from(n) * y).abs() < 1e-9);
        }
    }

    #[test]
    fn small_time_f_is_bilinear(
        z in chart_point(),
        u in prop::collection::vec(-1.0f64..1.0, 4),
        u2 in prop::collection::vec(-1.0f64..1.0, 4),
        v in prop::collection::vec(-1.0f64..1.0, 4),
        s in -2.0f64..2.0,
    ) {
        let chart = ToricKahlerChart::cp2();
        let c = planar(Complex64::i());
        let cfg = FlowConfig::default();
        let f = |u: &[f64]| f_integral(&c, &chart, &z, 1e-3, u, &v, &cfg).unwrap();
        let mix: Vec<f64> = u.iter().zip(&u2).map(|(a, b)| a + s * b).collect();
        prop_assert!((f(&mix) - f(&u) - s * f(&u2)).abs() < 1e-8);
    }

    #[test]
    fn fuzz_reports_are_reproducible(seed in any::<u64>(), c in complex(1.0)) {
        let c = planar(c);
        prop_assert_eq!(fuzz_verify(&c, 20, seed, 1e-9).unwrap(), fuzz_verify(&c, 20, seed, 1e-9).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsers_never_panic(s in "\\PC{0,64}") {
        let _ = nctoric::number::parse_rational(&s);
        let _ = s.parse::<nctoric::ncring::SectionLabel>();
        let _ = nctoric::io::parse_polytope_json(&s);
        let _ = nctoric::io::parse_rmatrix_json(&s);
    }

    #[test]
    fn label_like_strings_round_trip(d in 0u32..100, w in prop::collection::vec(-50i64..50, 1..5)) {
        let text = format!("{d}:({})", w.iter().map(i64::to_string).collect::<Vec<_>>().join(", "));
        let label: nctoric::ncring::SectionLabel = text.parse().unwrap();
        prop_assert_eq!(label.degree, d);
        prop_assert_eq!(label.weight.coords(), &w[..]);
    }

    #[test]
    fn json_shaped_polytopes_never_panic(
        normals in prop::collection::vec(prop::collection::vec(-3i64..4, 2), 0..6),
        offsets in prop::collection::vec(-3i64..4, 0..6),
    ) {
        let text = serde_json::json!({"dim": 2, "normals": normals, "offsets": offsets}).to_string();
        if let Ok(p) = nctoric::io::parse_polytope_unvalidated(&text) {
            let report = p.validate_delzant();
            prop_assert_eq!(report.pass, nctoric::io::require_delzant(p).is_ok());
        }
    }
}
