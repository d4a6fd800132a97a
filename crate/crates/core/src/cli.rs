//! Command-line front end.
//!
//! Every subcommand prints one JSON report whose `inputs` header echoes what
//! was asked for. Exit codes: 0 when everything checked passes, 1 when a
//! residual exceeds its tolerance (or a flow leaves the chart), 2 on bad input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::groupoid::{fuzz_verify_with, FuzzOptions};
use crate::io::{
    character_json, check_compatible, complex_json, fuzz_report_json, parse_polytope_file, parse_rmatrix_file,
    points_json, rmatrix_json, structure_constants_json,
};
use crate::ncring::{basis, hilbert_function, star_monomial, structure_constants, Monomial, SectionLabel};
use crate::polytope::DelzantPolytope;
use crate::quantization::{bs_fibres, character, hom_dimension};
use crate::rmatrix::RMatrix;
use crate::suite::{run_all, SuiteConfig};
use crate::toric_flows::{
    averaged_moment, flow, r_integral, verify_courant_symmetry, verify_r_additivity, verify_star_equation, FlowConfig,
    FlowError, ToricKahlerChart, REDUCTION_TOL,
};

pub const ALGEBRA_TOL: f64 = 1e-9;
pub const FLOW_TOL: f64 = 1e-4;
pub const DEFAULT_STEP: f64 = 1e-3;

/// Largest number of trajectory samples written to a `flow` report.
const MAX_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "nctoric",
    version,
    about = "Noncommutative toric coordinate rings and their flow identities"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graded dimensions, a degree-n basis and torus characters.
    Ring {
        /// Polytope JSON file or catalog name (cp1, cp2, cp1xcp1, hirzebruch(a), simplex(d)).
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Product of two basis elements given as `degree:(m1,...)`.
    Multiply {
        #[arg(long)]
        polytope: PathBuf,
        /// R-matrix JSON file; zero when omitted.
        #[arg(long)]
        rmatrix: Option<PathBuf>,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Structure-constant table between two degrees.
    Constants {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        rmatrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n1: u32,
        #[arg(long, default_value_t = 1)]
        n2: u32,
    },
    /// Bohr–Sommerfeld fibres and the dimension of the quantum space.
    Quantize {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: u32,
    },
    /// Randomized check of the symplectic groupoid axioms.
    GroupoidVerify {
        #[arg(long)]
        rmatrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ALGEBRA_TOL, allow_hyphen_values = true)]
        tol: f64,
        /// Perturb every product by this relative amount (self-test of the checker).
        #[arg(long, default_value_t = 0.0, hide = true, allow_hyphen_values = true)]
        fault: f64,
    },
    /// Integrate the Poisson flow and the moment integrals along it.
    Flow {
        #[command(flatten)]
        args: FlowArgs,
    },
    /// Additivity, polytope image, brane equation and Courant symmetry at one point.
    FlowVerify {
        #[command(flatten)]
        args: FlowArgs,
        /// Split point `i` of the additivity identity.
        #[arg(long, default_value_t = 1.0)]
        i: f64,
        /// Split point `j` of the additivity identity.
        #[arg(long, default_value_t = 1.0)]
        j: f64,
    },
    /// The full verification suite.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STEP, allow_hyphen_values = true)]
        step: f64,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub rmatrix: Option<PathBuf>,
    /// cp1, cp2, cp1xcp1 or cp2-vertex.
    #[arg(long, default_value = "cp2")]
    pub chart: String,
    /// Complex coordinates, comma separated (`1,1` or `0.5+1i,2`).
    #[arg(long, value_delimiter = ',', default_value = "1,1", allow_hyphen_values = true)]
    pub point: Vec<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub time: f64,
    /// Upper limit `n` of the moment integrals.
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    #[arg(long, default_value_t = DEFAULT_STEP, allow_hyphen_values = true)]
    pub step: f64,
    #[arg(long, default_value_t = FLOW_TOL, allow_hyphen_values = true)]
    pub tol: f64,
    /// Stop once some |z_j| exceeds this (the trajectory has left the chart).
    #[arg(long, default_value_t = FlowConfig::default().escape_radius)]
    pub escape_radius: f64,
}

/// What `run` produced: an exit code, the report, and lines for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub diagnostics: Vec<String>,
}

struct InputFailure {
    field: Option<&'static str>,
    message: String,
}

fn bad<E: ToString>(field: &'static str) -> impl Fn(E) -> InputFailure {
    move |e| InputFailure {
        field: Some(field),
        message: e.to_string(),
    }
}

type Step<T> = Result<T, InputFailure>;

pub fn run(cfg: &RunConfig) -> Outcome {
    let inputs = inputs_header(&cfg.command);
    let mut diagnostics = Vec::new();
    let result = match &cfg.command {
        Command::Ring { polytope, degree } => ring(polytope, *degree),
        Command::Multiply {
            polytope,
            rmatrix,
            a,
            b,
        } => multiply(polytope, rmatrix.as_deref(), a, b),
        Command::Constants {
            polytope,
            rmatrix,
            n1,
            n2,
        } => constants(polytope, rmatrix.as_deref(), *n1, *n2),
        Command::Quantize { polytope, degree } => quantize(polytope, *degree),
        Command::GroupoidVerify {
            rmatrix,
            trials,
            seed,
            tol,
            fault,
        } => groupoid_verify(rmatrix, *trials, *seed, *tol, *fault),
        Command::Flow { args } => flow_report(args, &mut diagnostics),
        Command::FlowVerify { args, i, j } => flow_verify(args, *i, *j, &mut diagnostics),
        Command::VerifyAll { seed, step } => verify_all(*seed, *step, &mut diagnostics),
    };
    match result {
        Ok((pass, body)) => {
            let mut report = json!({ "inputs": inputs });
            if let (Value::Object(dst), Value::Object(src)) = (&mut report, body) {
                dst.extend(src);
            }
            report["pass"] = json!(pass);
            if !pass {
                diagnostics.push("verification failed: a residual exceeded its tolerance".into());
            }
            Outcome {
                code: if pass { 0 } else { 1 },
                report,
                diagnostics,
            }
        }
        Err(e) => {
            diagnostics.push(format!("input error: {}", e.message));
            let mut error = json!({ "kind": "input", "message": e.message });
            if let Some(f) = e.field {
                error["argument"] = json!(f);
            }
            Outcome {
                code: 2,
                report: json!({ "inputs": inputs, "error": error, "pass": false }),
                diagnostics,
            }
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// An input error that happened before `run` (bad flags, unwritable output).
pub fn usage_error(message: &str) -> Outcome {
    Outcome {
        code: 2,
        report: json!({ "error": { "kind": "usage", "message": message }, "pass": false }),
        diagnostics: vec![message.to_string()],
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn inputs_header(cmd: &Command) -> Value {
    let opt = |p: &Option<PathBuf>| p.as_deref().map(path_str);
    match cmd {
        Command::Ring { polytope, degree } => {
            json!({"command": "ring", "polytope": path_str(polytope), "degree": degree})
        }
        Command::Multiply {
            polytope,
            rmatrix,
            a,
            b,
        } => json!({
            "command": "multiply", "polytope": path_str(polytope), "rmatrix": opt(rmatrix), "a": a, "b": b,
        }),
        Command::Constants {
            polytope,
            rmatrix,
            n1,
            n2,
        } => json!({
            "command": "constants", "polytope": path_str(polytope), "rmatrix": opt(rmatrix), "n1": n1, "n2": n2,
        }),
        Command::Quantize { polytope, degree } => {
            json!({"command": "quantize", "polytope": path_str(polytope), "degree": degree})
        }
        Command::GroupoidVerify {
            rmatrix,
            trials,
            seed,
            tol,
            fault,
        } => {
            let mut v = json!({
                "command": "groupoid-verify", "rmatrix": path_str(rmatrix), "trials": trials, "seed": seed, "tol": tol,
            });
            if *fault != 0.0 {
                v["fault"] = json!(fault);
            }
            v
        }
        Command::Flow { args } => flow_header("flow", args),
        Command::FlowVerify { args, i, j } => {
            let mut v = flow_header("flow-verify", args);
            v["i"] = json!(i);
            v["j"] = json!(j);
            v
        }
        Command::VerifyAll { seed, step } => json!({"command": "verify-all", "seed": seed, "step": step}),
    }
}

fn flow_header(name: &str, a: &FlowArgs) -> Value {
    json!({
        "command": name,
        "rmatrix": a.rmatrix.as_deref().map(path_str),
        "chart": a.chart,
        "point": a.point,
        "time": a.time,
        "degree": a.degree,
        "step": a.step,
        "tol": a.tol,
        "escape_radius": a.escape_radius,
    })
}

fn polytope_json(p: &DelzantPolytope) -> Value {
    json!({
        "name": p.name(),
        "dim": p.dim(),
        "normals": p.facets().iter().map(|f| f.normal.clone()).collect::<Vec<_>>(),
        "offsets": p.facets().iter().map(|f| f.offset).collect::<Vec<_>>(),
    })
}

fn load_polytope(path: &Path) -> Step<DelzantPolytope> {
    parse_polytope_file(path).map_err(bad("polytope"))
}

fn load_rmatrix(path: Option<&Path>, dim: usize) -> Step<RMatrix> {
    match path {
        Some(p) => parse_rmatrix_file(p).map_err(bad("rmatrix")),
        None => Ok(RMatrix::zero(dim)),
    }
}

fn load_pair(polytope: &Path, rmatrix: Option<&Path>) -> Step<(DelzantPolytope, RMatrix)> {
    let p = load_polytope(polytope)?;
    let c = load_rmatrix(rmatrix, p.dim())?;
    check_compatible(&p, &c).map_err(bad("rmatrix"))?;
    Ok((p, c))
}

type Body = Step<(bool, Value)>;

fn ring(polytope: &Path, degree: u32) -> Body {
    let p = load_polytope(polytope)?;
    let dims = hilbert_function(&p, degree).map_err(bad("degree"))?;
    let labels: Vec<String> = basis(&p, degree)
        .map_err(bad("degree"))?
        .iter()
        .map(|s| s.label())
        .collect();
    let characters = (0..=degree)
        .map(|n| character(&p, n).map(|ch| character_json(&ch)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad("degree"))?;
    Ok((
        true,
        json!({"polytope": polytope_json(&p), "dims": dims, "basis": labels, "characters": characters}),
    ))
}

fn multiply(polytope: &Path, rmatrix: Option<&Path>, a: &str, b: &str) -> Body {
    let (p, c) = load_pair(polytope, rmatrix)?;
    let section = |text: &str, name: &'static str| -> Step<Monomial> {
        let label: SectionLabel = text.parse().map_err(bad(name))?;
        Ok(Monomial::basis(label.resolve(&p).map_err(bad(name))?))
    };
    let (x, y) = (section(a, "a")?, section(b, "b")?);
    let product = star_monomial(&c, &p, &x, &y).map_err(bad("b"))?;
    let mut body = json!({
        "polytope": polytope_json(&p),
        "rmatrix": rmatrix_json(&c),
        "target": product.section.label(),
        "factor": complex_json(product.coefficient()),
        "exponent": complex_json(product.phase.exponent()),
    });
    if let Some(e) = &product.phase.exact {
        body["pair_exact"] = json!(e.to_string());
    }
    Ok((true, body))
}

fn constants(polytope: &Path, rmatrix: Option<&Path>, n1: u32, n2: u32) -> Body {
    let (p, c) = load_pair(polytope, rmatrix)?;
    let table = structure_constants(&c, &p, n1, n2).map_err(bad("n1"))?;
    Ok((
        true,
        json!({
            "polytope": polytope_json(&p),
            "rmatrix": rmatrix_json(&c),
            "entries": structure_constants_json(&table),
        }),
    ))
}

fn quantize(polytope: &Path, degree: u32) -> Body {
    let p = load_polytope(polytope)?;
    let fibres = bs_fibres(&p, degree).map_err(bad("degree"))?;
    let dim = hom_dimension(&p, degree).map_err(bad("degree"))?;
    let ch = character(&p, degree).map_err(bad("degree"))?;
    let fibres: Vec<Value> = fibres
        .iter()
        .map(|f| json!({"degree": f.degree, "weight": f.weight}))
        .collect();
    Ok((
        true,
        json!({
            "polytope": polytope_json(&p),
            "hom_dimension": dim,
            "fibres": fibres,
            "character": character_json(&ch),
        }),
    ))
}

fn check_tol(tol: f64) -> Step<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(bad("tol")("tolerance must be positive and finite"))
    }
}

fn groupoid_verify(rmatrix: &Path, trials: u64, seed: u64, tol: f64, fault: f64) -> Body {
    check_tol(tol)?;
    if !fault.is_finite() {
        return Err(bad("fault")("must be finite"));
    }
    let c = parse_rmatrix_file(rmatrix).map_err(bad("rmatrix"))?;
    let r = fuzz_verify_with(&c, trials, seed, tol, FuzzOptions { fault }).map_err(bad("trials"))?;
    let body = json!({"rmatrix": rmatrix_json(&c), "report": fuzz_report_json(&r)});
    Ok((r.pass, body))
}

struct FlowSetup {
    c: RMatrix,
    chart: ToricKahlerChart,
    z0: Vec<Complex64>,
    cfg: FlowConfig,
}

fn flow_setup(a: &FlowArgs) -> Step<FlowSetup> {
    check_tol(a.tol)?;
    let chart = ToricKahlerChart::by_name(&a.chart).map_err(bad("chart"))?;
    let c = load_rmatrix(a.rmatrix.as_deref(), chart.dim())?;
    if c.dim() != chart.dim() {
        return Err(bad("rmatrix")(format!(
            "R-matrix has dimension {} but chart {} has dimension {}",
            c.dim(),
            chart.name(),
            chart.dim()
        )));
    }
    let z0 = a
        .point
        .iter()
        .map(|s| {
            s.trim()
                .parse::<Complex64>()
                .map_err(|_| format!("cannot parse {s:?} as a complex number"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad("point"))?;
    chart.check_point(&z0).map_err(bad("point"))?;
    if !a.time.is_finite() {
        return Err(bad("time")("must be finite"));
    }
    let cfg = FlowConfig {
        escape_radius: a.escape_radius,
        ..FlowConfig::with_step(a.step)
    };
    cfg.validate().map_err(bad("step"))?;
    Ok(FlowSetup { c, chart, z0, cfg })
}

/// Chart escape is a verification failure; every other flow error is an input problem.
fn flow_value<T>(r: Result<T, FlowError>, field: &'static str) -> Step<Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ FlowError::Escaped { .. }) => Ok(Err(e.to_string())),
        Err(e) => Err(bad(field)(e)),
    }
}

fn flow_report(a: &FlowArgs, diagnostics: &mut Vec<String>) -> Body {
    let s = flow_setup(a)?;
    let traj = flow(&s.c, &s.chart, &s.z0, a.time, &s.cfg).map_err(bad("point"))?;
    let stride = (traj.points.len() - 1).div_ceil(MAX_SAMPLES).max(1);
    let mut idx: Vec<usize> = (0..traj.points.len()).step_by(stride).collect();
    if idx.last() != Some(&(traj.points.len() - 1)) {
        idx.push(traj.points.len() - 1);
    }
    let samples: Vec<Value> = idx
        .iter()
        .map(|&k| {
            json!({
                "t": traj.times[k],
                "z": points_json(&traj.points[k]),
                "mu": s.chart.moment_map(&traj.points[k]),
            })
        })
        .collect();
    let mut pass = traj.escaped.is_none();
    if let Some(t) = traj.escaped {
        diagnostics.push(format!("trajectory left the chart at t = {t}"));
    }
    let convergence = traj.convergence;
    if let Some(err) = convergence {
        pass &= err <= a.tol;
    }
    let n = f64::from(a.degree);
    let mut integrals = json!({ "n": a.degree });
    match flow_value(averaged_moment(&s.c, &s.chart, &s.z0, n, &s.cfg), "degree")? {
        Ok(m) => {
            pass &= m.error <= a.tol;
            integrals["averaged_moment"] = json!({"value": m.value, "error": m.error});
        }
        Err(e) => {
            pass = false;
            integrals["averaged_moment"] = json!({ "error_message": e });
        }
    }
    match flow_value(r_integral(&s.c, &s.chart, &s.z0, n, &s.cfg), "degree")? {
        Ok(r) => {
            pass &= r.error <= a.tol;
            integrals["r"] = json!({"value": complex_json(r.value), "error": r.error});
        }
        Err(e) => {
            pass = false;
            integrals["r"] = json!({ "error_message": e });
        }
    }
    Ok((
        pass,
        json!({
            "trajectory": {
                "steps": traj.points.len() - 1,
                "step": traj.step(),
                "escaped": traj.escaped,
                "convergence": convergence,
                "endpoint": points_json(traj.endpoint()),
                "samples": samples,
            },
            "integrals": integrals,
        }),
    ))
}

fn check(name: &str, outcome: Result<(bool, Value), String>, diagnostics: &mut Vec<String>) -> (bool, Value) {
    match outcome {
        Ok((pass, mut v)) => {
            v["name"] = json!(name);
            v["pass"] = json!(pass);
            (pass, v)
        }
        Err(e) => {
            diagnostics.push(format!("{name}: {e}"));
            (false, json!({"name": name, "pass": false, "error": e}))
        }
    }
}

fn flow_verify(a: &FlowArgs, i: f64, j: f64, diagnostics: &mut Vec<String>) -> Body {
    let s = flow_setup(a)?;
    let tol = a.tol;
    let mut checks = Vec::new();

    let add = flow_value(verify_r_additivity(&s.c, &s.chart, &s.z0, i, j, &s.cfg), "i")?.map(|r| {
        (
            r.residual < tol,
            json!({"residual": r.residual, "quad_error": r.quad_error, "total": complex_json(r.total)}),
        )
    });
    checks.push(check("r_additivity", add, diagnostics));

    let polytope = s.chart.polytope();
    let n = f64::from(a.degree);
    let image = flow_value(averaged_moment(&s.c, &s.chart, &s.z0, n, &s.cfg), "degree")?;
    let image = match image {
        Ok(m) => {
            let slack = polytope.worst_slack(n, &m.value).map_err(bad("chart"))?;
            Ok((slack >= -tol, json!({"slack": slack, "averaged_moment": m.value})))
        }
        Err(e) => Err(e),
    };
    checks.push(check("polytope_image", image, diagnostics));

    let star = flow_value(verify_star_equation(&s.c, &s.chart, &s.z0, a.time, &s.cfg), "time")?.map(|r| {
        diagnostics.extend(r.warnings.iter().cloned());
        (
            r.residual < tol && r.reduction < REDUCTION_TOL,
            json!({
                "residual": r.residual,
                "reduction": r.reduction,
                "f_error": r.f_error,
                "max_jacobian_norm": r.max_jacobian_norm,
            }),
        )
    });
    checks.push(check("star_equation", star, diagnostics));

    let courant = verify_courant_symmetry(&s.c, &s.chart, &s.z0).map_err(bad("point"))?;
    checks.push(check(
        "courant_symmetry",
        Ok((courant < tol, json!({ "residual": courant }))),
        diagnostics,
    ));

    let pass = checks.iter().all(|(p, _)| *p);
    let checks: Vec<Value> = checks.into_iter().map(|(_, v)| v).collect();
    Ok((pass, json!({ "checks": checks })))
}

fn verify_all(seed: u64, step: f64, diagnostics: &mut Vec<String>) -> Body {
    FlowConfig::with_step(step).validate().map_err(bad("step"))?;
    let report = run_all(&SuiteConfig { seed, step });
    for c in &report.criteria {
        diagnostics.push(format!(
            "criterion {:>2} {:<30} {}",
            c.id,
            c.name,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    Ok((report.pass, json!({ "criteria": report.criteria })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let cfg = RunConfig::try_parse_from(std::iter::once("nctoric").chain(args.iter().copied())).unwrap();
        run(&cfg)
    }

    #[test]
    fn ring_by_catalog_name() {
        let o = run_args(&["ring", "--polytope", "cp2", "--degree", "3"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.report["dims"], json!([1, 3, 6, 10]));
        assert_eq!(o.report["inputs"]["degree"], json!(3));
    }

    #[test]
    fn default_multiply_is_commutative() {
        let o = run_args(&["multiply", "--polytope", "cp2", "--a", "1:(1,0)", "--b", "1:(0,1)"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.report["target"], json!("2:(1,1)"));
        assert_eq!(o.report["factor"], json!({"re": 1.0, "im": 0.0}));
    }

    #[test]
    fn bad_label_is_an_input_error() {
        let o = run_args(&["multiply", "--polytope", "cp2", "--a", "1:(5,0)", "--b", "1:(0,1)"]);
        assert_eq!(o.code, 2);
        assert_eq!(o.report["error"]["argument"], json!("a"));
        let o = run_args(&["multiply", "--polytope", "cp2", "--a", "1-(1,0)", "--b", "1:(0,1)"]);
        assert_eq!(o.code, 2);
    }

    #[test]
    fn flow_rejects_malformed_points() {
        let o = run_args(&["flow", "--point", "1,1,1"]);
        assert_eq!(o.code, 2);
        let o = run_args(&["flow", "--point", "1,x"]);
        assert_eq!(o.code, 2);
        let o = run_args(&["flow", "--step", "-1"]);
        assert_eq!(o.code, 2);
        let o = run_args(&["flow", "--point", "-1,0.5-2i", "--time", "-0.25"]);
        assert_eq!(o.code, 0, "{}", render(&o.report));
    }

    #[test]
    fn undeformed_flow_is_stationary() {
        let o = run_args(&["flow", "--time", "0.5"]);
        assert_eq!(o.code, 0, "{}", render(&o.report));
        assert_eq!(o.report["trajectory"]["endpoint"], json!([[1.0, 0.0], [1.0, 0.0]]));
    }

    #[test]
    fn undeformed_flow_verify_passes() {
        let o = run_args(&["flow-verify", "--time", "0.5"]);
        assert_eq!(o.code, 0, "{}", render(&o.report));
        assert_eq!(o.report["checks"].as_array().unwrap().len(), 4);
    }
}
