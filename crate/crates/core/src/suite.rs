//! The end-to-end verification suite behind `nctoric verify-all`.
//!
//! Each criterion is deterministic given the seed. Wall-clock limits are not
//! checked here (they would make the report nondeterministic); the acceptance
//! test target times each criterion itself.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::groupoid::{fuzz_verify, FuzzReport};
use crate::ncring::{
    basis, commutation_factor, hilbert_function, star, star_monomial, structure_constants, Monomial, RingElement,
    WeightedSection,
};
use crate::number::ExactComplex;
use crate::polytope::{standard, DelzantPolytope, LatticePoint, Standard};
use crate::quantization::hom_dimension;
use crate::rmatrix::RMatrix;
use crate::toric_flows::{
    averaged_moment, flow, r_integral, verify_courant_symmetry, verify_r_additivity, verify_star_equation, FlowConfig,
    ToricKahlerChart,
};

/// Thresholds, one per criterion.
pub mod tol {
    pub const ASSOC_FLOAT: f64 = 1e-12;
    pub const GROUPOID: f64 = 1e-9;
    pub const THETA_FORMS: f64 = 1e-12;
    pub const CHART: f64 = 1e-9;
    pub const MOMENT_DRIFT: f64 = 1e-6;
    pub const R_REAL: f64 = 1e-12;
    pub const ADDITIVITY: f64 = 1e-4;
    pub const ADDITIVITY_HALVING_GAIN: f64 = 8.0;
    pub const POLYTOPE_SLACK: f64 = -1e-6;
    pub const STAR_ZERO_C: f64 = 1e-8;
    pub const STAR_IMAGINARY_C: f64 = 1e-3;
    pub const STAR_REDUCTION: f64 = 1e-8;
    pub const COURANT: f64 = 1e-5;
}

/// Sizes, one per criterion.
pub mod size {
    pub const MAX_DEGREE: u32 = 12;
    pub const ASSOC_TRIPLES: usize = 10_000;
    pub const GROUPOID_TRIALS: u64 = 10_000;
    pub const THETA_TRIALS: u64 = 10_000;
    pub const CHART_TRIALS: u64 = 1_000;
    pub const IMAGE_POINTS: usize = 100;
    pub const COURANT_POINTS: usize = 20;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// RK4 step for the flow criteria.
    pub step: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0, step: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub measured: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub step: f64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "graded dimensions"),
    (2, "noncommutative product"),
    (3, "associativity"),
    (4, "classical limit"),
    (5, "groupoid axioms"),
    (6, "cocycle-form consistency"),
    (7, "chart/abstract agreement"),
    (8, "real-C flow collapse"),
    (9, "R-additivity"),
    (10, "polytope image"),
    (11, "space-filling brane equation"),
    (12, "Courant symmetry"),
];

pub fn run_all(cfg: &SuiteConfig) -> SuiteReport {
    let criteria: Vec<_> = CRITERIA.iter().map(|(id, _)| run_criterion(*id, cfg)).collect();
    SuiteReport {
        seed: cfg.seed,
        step: cfg.step,
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

/// Runs one criterion; unknown ids and internal errors come back as failures.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown criterion", |(_, n)| n);
    let outcome = match id {
        1 => graded_dimensions(),
        2 => noncommutative_product(),
        3 => associativity(cfg.seed),
        4 => classical_limit(),
        5 => groupoid_axioms(cfg.seed),
        6 => theta_forms(cfg.seed),
        7 => chart_agreement(cfg.seed),
        8 => real_flow_collapse(cfg),
        9 => r_additivity(cfg),
        10 => polytope_image(cfg),
        11 => brane_equation(cfg),
        12 => courant(cfg.seed),
        _ => Err("no such criterion".to_string()),
    };
    let (pass, measured) = outcome.unwrap_or_else(|e| (false, json!({ "error": e })));
    CriterionResult {
        id,
        name,
        pass,
        measured,
    }
}

type Outcome = Result<(bool, Value), String>;

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn rng_for(seed: u64, criterion: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(criterion);
    rng
}

/// Lattice points of `nΔ` by scanning a box around the scaled vertices.
pub fn brute_force_count(p: &DelzantPolytope, n: u32) -> Result<usize, String> {
    let vertices = p.vertices().map_err(err)?;
    let reach = vertices
        .iter()
        .flatten()
        .map(|q| q.abs().ceil().to_integer().to_i64().unwrap_or(i64::MAX))
        .max()
        .unwrap_or(0);
    let r = reach * n as i64 + 1;
    let d = p.dim();
    let mut m = vec![-r; d];
    let mut count = 0;
    loop {
        let inside = p.facets().iter().all(|f| {
            let s: i128 = f.normal.iter().zip(&m).map(|(a, b)| *a as i128 * *b as i128).sum();
            s + f.offset as i128 * n as i128 >= 0
        });
        count += usize::from(inside);
        let mut k = 0;
        loop {
            if k == d {
                return Ok(count);
            }
            m[k] += 1;
            if m[k] <= r {
                break;
            }
            m[k] = -r;
            k += 1;
        }
    }
}

fn graded_dimensions() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for name in ["cp1", "cp2", "cp1xcp1", "hirzebruch(1)"] {
        let p = name.parse::<Standard>().map_err(err)?.polytope().map_err(err)?;
        let h = hilbert_function(&p, size::MAX_DEGREE).map_err(err)?;
        for n in 0..=size::MAX_DEGREE {
            let oracle = brute_force_count(&p, n)?;
            let hom = hom_dimension(&p, n).map_err(err)?;
            let mut ok = h[n as usize] == oracle && hom == oracle;
            if name == "cp2" {
                ok &= oracle == ((n + 1) * (n + 2) / 2) as usize;
            }
            checked += 1;
            if !ok {
                mismatches
                    .push(json!({"polytope": name, "n": n, "hilbert": h[n as usize], "hom": hom, "oracle": oracle}));
            }
        }
    }
    Ok((
        mismatches.is_empty(),
        json!({"checked": checked, "mismatches": mismatches}),
    ))
}

fn lp(c: &[i64]) -> LatticePoint {
    LatticePoint::new(c.to_vec())
}

fn noncommutative_product() -> Outcome {
    let p = standard("cp2", &[]).map_err(err)?;
    let c = RMatrix::planar_rational(1, 2);
    let x = Monomial::basis(WeightedSection::new(&p, 1, lp(&[1, 0])).map_err(err)?);
    let y = Monomial::basis(WeightedSection::new(&p, 1, lp(&[0, 1])).map_err(err)?);
    let xy = star_monomial(&c, &p, &x, &y).map_err(err)?;
    let yx = star_monomial(&c, &p, &y, &x).map_err(err)?;
    let half = ExactComplex::new(BigRational::new(1.into(), 2.into()), BigRational::zero());
    let exact_ok = xy.phase.exact.as_ref() == Some(&half)
        && yx.phase.exact.as_ref() == Some(&-&half)
        && xy.section.label() == "2:(1,1)";
    let factor = xy.coefficient();
    let comm = commutation_factor(&c, &lp(&[1, 0]), &lp(&[0, 1])).map_err(err)?;
    // exp((i/4π) C(w1, w2)) with lattice weights w = 2πm.
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = |m: [f64; 2]| [Complex64::new(two_pi * m[0], 0.0), Complex64::new(two_pi * m[1], 0.0)];
    let cw = c.pair(&w([1.0, 0.0]), &w([0.0, 1.0])).map_err(err)?;
    let bridge = (Complex64::i() / (2.0 * two_pi) * cw).exp();
    let bridge_gap = (bridge - factor).norm();
    let pass = exact_ok && factor == Complex64::i() && comm == Complex64::new(-1.0, 0.0) && bridge_gap < 1e-15;
    Ok((
        pass,
        json!({
            "target": xy.section.label(),
            "factor": [factor.re, factor.im],
            "commutation": [comm.re, comm.im],
            "pair_exact": xy.phase.exact.map(|e| e.to_string()),
            "bridge_gap": bridge_gap,
        }),
    ))
}

fn random_section(rng: &mut ChaCha8Rng, bases: &[Vec<WeightedSection>]) -> WeightedSection {
    let b = &bases[rng.random_range(0..bases.len())];
    b[rng.random_range(0..b.len())].clone()
}

fn associativity(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 3);
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let exact_cs = [ExactComplex::new(q(1, 3), q(0, 1)), ExactComplex::new(q(1, 2), q(1, 5))];
    let mut exact_failures = 0usize;
    let mut worst_float = 0.0f64;
    let mut total = 0usize;
    for name in ["cp2", "cp1xcp1"] {
        let p = standard(name, &[]).map_err(err)?;
        let bases: Vec<_> = (0..=4).map(|n| basis(&p, n)).collect::<Result<_, _>>().map_err(err)?;
        let exact: Vec<RMatrix> = exact_cs
            .iter()
            .map(|e| RMatrix::with_exact_entry(2, 0, 1, e.clone()))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let float: Vec<RMatrix> = exact_cs
            .iter()
            .map(|e| RMatrix::with_entry(2, 0, 1, e.to_complex64()))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for k in 0..size::ASSOC_TRIPLES {
            let (a, b, c3) = (
                random_section(&mut rng, &bases),
                random_section(&mut rng, &bases),
                random_section(&mut rng, &bases),
            );
            let (ce, cf) = (&exact[k % exact.len()], &float[k % float.len()]);
            let (ma, mb, mc) = (
                Monomial::basis(a.clone()),
                Monomial::basis(b.clone()),
                Monomial::basis(c3.clone()),
            );
            let left = star_monomial(ce, &p, &star_monomial(ce, &p, &ma, &mb).map_err(err)?, &mc).map_err(err)?;
            let right = star_monomial(ce, &p, &ma, &star_monomial(ce, &p, &mb, &mc).map_err(err)?).map_err(err)?;
            if left.section != right.section || left.phase.exact.is_none() || left.phase.exact != right.phase.exact {
                exact_failures += 1;
            }
            let (ea, eb, ec) = (RingElement::basis(a), RingElement::basis(b), RingElement::basis(c3));
            let lf = star(cf, &p, &star(cf, &p, &ea, &eb).map_err(err)?, &ec).map_err(err)?;
            let rf = star(cf, &p, &ea, &star(cf, &p, &eb, &ec).map_err(err)?).map_err(err)?;
            let scale = lf.terms().values().map(|c| c.norm()).fold(1.0, f64::max);
            worst_float = worst_float.max(lf.distance(&rf) / scale);
            total += 1;
        }
    }
    Ok((
        exact_failures == 0 && worst_float < tol::ASSOC_FLOAT,
        json!({"triples": total, "exact_failures": exact_failures, "float_residual": worst_float}),
    ))
}

fn classical_limit() -> Outcome {
    let mut entries = 0usize;
    let mut bad = 0usize;
    for name in ["cp1", "cp2", "cp1xcp1", "hirzebruch(1)"] {
        let p = name.parse::<Standard>().map_err(err)?.polytope().map_err(err)?;
        let zero = RMatrix::zero(p.dim());
        for n1 in 0..=3 {
            for n2 in 0..=3 {
                let table = structure_constants(&zero, &p, n1, n2).map_err(err)?;
                for e in &table.entries {
                    entries += 1;
                    let ok = e.factor() == Complex64::new(1.0, 0.0)
                        && e.phase.exact.as_ref().is_some_and(ExactComplex::is_zero)
                        && e.target.weight() == &e.left.weight().add(e.right.weight())
                        && e.target.degree() == n1 + n2;
                    bad += usize::from(!ok);
                }
            }
        }
    }
    Ok((bad == 0, json!({"entries": entries, "mismatches": bad})))
}

/// Antisymmetric `C` with strictly-upper entries uniform in the unit disc.
fn random_c(rng: &mut ChaCha8Rng, d: usize) -> Result<RMatrix, String> {
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let r: f64 = rng.random_range(0.0f64..=1.0).sqrt();
            let z = Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
            rows[i][j] = z;
            rows[j][i] = -z;
        }
    }
    RMatrix::from_rows(&rows).map_err(err)
}

fn fuzz_summary(r: &FuzzReport) -> Value {
    json!({"trials": r.trials, "residuals": r.residuals, "consistency": r.consistency})
}

fn groupoid_axioms(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 5);
    let mut pass = true;
    let mut runs = Vec::new();
    for d in [2, 3] {
        let c = random_c(&mut rng, d)?;
        let r = fuzz_verify(&c, size::GROUPOID_TRIALS, seed, tol::GROUPOID).map_err(err)?;
        pass &= r.residuals.max() < tol::GROUPOID;
        runs.push(json!({"dim": d, "report": fuzz_summary(&r)}));
    }
    Ok((pass, json!({ "runs": runs })))
}

fn theta_forms(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 6);
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let c = random_c(&mut rng, d)?;
        let r = fuzz_verify(&c, size::THETA_TRIALS, seed ^ 6, tol::GROUPOID).map_err(err)?;
        worst = worst.max(r.consistency.theta_forms);
    }
    Ok((
        worst < tol::THETA_FORMS,
        json!({"pairs_per_dim": 3 * size::THETA_TRIALS, "residual": worst}),
    ))
}

fn chart_agreement(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 7);
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let c = random_c(&mut rng, d)?;
        let r = fuzz_verify(&c, size::CHART_TRIALS, seed ^ 7, tol::GROUPOID).map_err(err)?;
        worst = worst.max(r.consistency.chart);
    }
    Ok((
        worst < tol::CHART,
        json!({"pairs_per_dim": size::CHART_TRIALS, "residual": worst}),
    ))
}

fn planar(x: Complex64) -> Result<RMatrix, String> {
    RMatrix::with_entry(2, 0, 1, x).map_err(err)
}

fn random_point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> Vec<Complex64> {
    (0..2)
        .map(|_| {
            Complex64::from_polar(
                rng.random_range(rmin..rmax),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect()
}

fn ones() -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); 2]
}

fn real_flow_collapse(cfg: &SuiteConfig) -> Outcome {
    let mut rng = rng_for(cfg.seed, 8);
    let chart = ToricKahlerChart::cp2();
    let flow_cfg = FlowConfig::with_step(cfg.step);
    let mut drift = 0.0f64;
    let mut r_max = 0.0f64;
    let mut points = vec![ones()];
    points.extend((0..4).map(|_| random_point(&mut rng, 0.1, 2.0)));
    for a in [0.7, 1.0, -2.3] {
        let c = planar(Complex64::new(a, 0.0))?;
        for z in &points {
            let t = flow(&c, &chart, z, 5.0, &flow_cfg).map_err(err)?;
            if t.escaped.is_some() {
                return Err("real-C trajectory left the chart".into());
            }
            let mu0 = chart.moment_map(z);
            for p in &t.points {
                for (x, y) in chart.moment_map(p).iter().zip(&mu0) {
                    drift = drift.max((x - y).abs());
                }
            }
            r_max = r_max.max(r_integral(&c, &chart, z, 5.0, &flow_cfg).map_err(err)?.value.norm());
        }
    }
    Ok((
        drift < tol::MOMENT_DRIFT && r_max < tol::R_REAL,
        json!({"moment_drift": drift, "r_max": r_max, "time": 5.0}),
    ))
}

fn r_additivity(cfg: &SuiteConfig) -> Outcome {
    let chart = ToricKahlerChart::cp2();
    let c = planar(Complex64::i())?;
    let coarse = verify_r_additivity(&c, &chart, &ones(), 1.0, 1.0, &FlowConfig::with_step(cfg.step)).map_err(err)?;
    let fine =
        verify_r_additivity(&c, &chart, &ones(), 1.0, 1.0, &FlowConfig::with_step(cfg.step / 2.0)).map_err(err)?;
    let gain = coarse.residual / fine.residual;
    let pass = coarse.residual < tol::ADDITIVITY && gain >= tol::ADDITIVITY_HALVING_GAIN;
    Ok((
        pass,
        json!({
            "residual": coarse.residual,
            "residual_half_step": fine.residual,
            "halving_gain": if gain.is_finite() { json!(gain) } else { Value::Null },
            "r_total": [coarse.total.re, coarse.total.im],
            "bracket": [coarse.bracket.re, coarse.bracket.im],
            "quad_error": coarse.quad_error,
        }),
    ))
}

fn polytope_image(cfg: &SuiteConfig) -> Outcome {
    let mut rng = rng_for(cfg.seed, 10);
    let chart = ToricKahlerChart::cp2();
    let p = chart.polytope();
    let flow_cfg = FlowConfig::with_step(cfg.step);
    let cs = [planar(Complex64::i())?, planar(Complex64::new(1.0, 1.0))?];
    let mut worst = f64::INFINITY;
    let mut checks = 0;
    for _ in 0..size::IMAGE_POINTS {
        let z = random_point(&mut rng, 0.05, 3.0);
        for c in &cs {
            for n in [1.0, 2.0, 3.0] {
                let m = averaged_moment(c, &chart, &z, n, &flow_cfg).map_err(err)?;
                worst = worst.min(p.worst_slack(n, &m.value).map_err(err)?);
                checks += 1;
            }
        }
    }
    Ok((
        worst >= tol::POLYTOPE_SLACK,
        json!({"checks": checks, "worst_slack": worst}),
    ))
}

fn brane_equation(cfg: &SuiteConfig) -> Outcome {
    let chart = ToricKahlerChart::cp2();
    let flow_cfg = FlowConfig::with_step(cfg.step);
    let zero = RMatrix::zero(2);
    let mut zero_worst = 0.0f64;
    let mut reduction = 0.0f64;
    let other = vec![Complex64::new(0.4, -0.8), Complex64::new(-1.2, 0.3)];
    for z in [ones(), other] {
        for t in [0.25, 0.5, 1.0] {
            let r = verify_star_equation(&zero, &chart, &z, t, &flow_cfg).map_err(err)?;
            zero_worst = zero_worst.max(r.residual);
            reduction = reduction.max(r.reduction);
        }
    }
    let ri = verify_star_equation(&planar(Complex64::i())?, &chart, &ones(), 1.0, &flow_cfg).map_err(err)?;
    reduction = reduction.max(ri.reduction);
    Ok((
        zero_worst < tol::STAR_ZERO_C && ri.residual < tol::STAR_IMAGINARY_C && reduction < tol::STAR_REDUCTION,
        json!({"zero_c_residual": zero_worst, "imaginary_c_residual": ri.residual, "reduction": reduction}),
    ))
}

fn courant(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 12);
    let chart = ToricKahlerChart::cp2();
    let cs = [planar(Complex64::new(1.0, 0.0))?, planar(Complex64::i())?];
    let mut worst = 0.0f64;
    let mut points = vec![ones()];
    points.extend((1..size::COURANT_POINTS).map(|_| random_point(&mut rng, 0.1, 2.0)));
    for z in &points {
        for c in &cs {
            worst = worst.max(verify_courant_symmetry(c, &chart, z).map_err(err)?);
        }
    }
    Ok((worst < tol::COURANT, json!({"points": points.len(), "residual": worst})))
}
