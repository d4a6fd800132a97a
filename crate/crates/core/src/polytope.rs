//! Integral Delzant polytopes in half-space form.
//!
//! A polytope is stored as facets `(v_i, a_i)` cutting out
//! `Δ = { x : <v_i, x> + a_i >= 0 for all i }` with integer normals and offsets.
//! The character lattice is `Z^d` itself, so every `2π` normalization that
//! appears in the geometry is absorbed here: the lattice points of the dilate
//! `nΔ` are exactly the integer vectors `m` with `<v_i, m> + n·a_i >= 0`.
//!
//! Everything combinatorial (vertices, boundedness, unimodularity) is computed
//! with exact rational arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Upper bound on the number of facet subsets examined by vertex enumeration.
pub const MAX_FACET_SUBSETS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("polytope has no facets")]
    NoFacets,
    #[error("facet {facet}: normal has length {len}, expected {dim}")]
    NormalLength { facet: usize, len: usize, dim: usize },
    #[error("facet {facet}: normal is the zero vector")]
    ZeroNormal { facet: usize },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is empty")]
    Empty,
    #[error("vertex {vertex} lies on {count} facets {facets:?}; a simple polytope needs exactly {dim}")]
    NonSimple {
        vertex: String,
        facets: Vec<usize>,
        count: usize,
        dim: usize,
    },
    #[error("too many facet subsets to enumerate ({0})")]
    TooLarge(u64),
    #[error("unknown standard polytope {0:?}")]
    UnknownName(String),
    #[error("invalid parameter for {name}: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("point has dimension {got}, polytope has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A point of the character lattice `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    /// Coordinatewise sum. Panics on dimension mismatch.
    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        assert_eq!(self.dim(), other.dim(), "lattice point dimension mismatch");
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: i64) -> Self {
        Self { normal, offset }
    }

    /// `<v, m> + n·a` in 128-bit arithmetic.
    fn eval_int(&self, m: &[i64], n: i64) -> i128 {
        let dot: i128 = self.normal.iter().zip(m).map(|(&v, &x)| v as i128 * x as i128).sum();
        dot + n as i128 * self.offset as i128
    }

    fn eval_f64(&self, x: &[f64], n: f64) -> f64 {
        let dot: f64 = self.normal.iter().zip(x).map(|(&v, &x)| v as f64 * x).sum();
        dot + n * self.offset as f64
    }

    fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::from_integer(self.offset.into());
        for (&v, xi) in self.normal.iter().zip(x) {
            acc += BigRational::from_integer(v.into()) * xi;
        }
        acc
    }
}

type RationalPoint = Vec<BigRational>;

#[derive(Debug, Clone)]
struct Bounds {
    lower: Vec<BigRational>,
    upper: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Facet>,
    name: Option<String>,
    bounds: OnceLock<Result<Bounds, PolytopeError>>,
}

impl PartialEq for DelzantPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.facets == other.facets && self.name == other.name
    }
}

impl Eq for DelzantPolytope {}

impl DelzantPolytope {
    /// Builds a polytope from its facets. Only the shape of the data is checked here;
    /// boundedness, integrality and smoothness are the job of [`validate_delzant`].
    ///
    /// [`validate_delzant`]: DelzantPolytope::validate_delzant
    pub fn new(dim: usize, facets: Vec<Facet>, name: Option<String>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        if facets.is_empty() {
            return Err(PolytopeError::NoFacets);
        }
        for (k, f) in facets.iter().enumerate() {
            if f.normal.len() != dim {
                return Err(PolytopeError::NormalLength {
                    facet: k,
                    len: f.normal.len(),
                    dim,
                });
            }
            if f.normal.iter().all(|&c| c == 0) {
                return Err(PolytopeError::ZeroNormal { facet: k });
            }
        }
        Ok(Self {
            dim,
            facets,
            name,
            bounds: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// True iff `<v_i, x> + n·a_i >= -slack` for every facet.
    pub fn contains(&self, n: f64, x: &[f64], slack: f64) -> Result<bool, PolytopeError> {
        Ok(self.worst_slack(n, x)? >= -slack)
    }

    /// `min_i (<v_i, x> + n·a_i)`; nonnegative exactly when `x ∈ nΔ`.
    pub fn worst_slack(&self, n: f64, x: &[f64]) -> Result<f64, PolytopeError> {
        self.check_dim(x.len())?;
        Ok(self
            .facets
            .iter()
            .map(|f| f.eval_f64(x, n))
            .fold(f64::INFINITY, f64::min))
    }

    /// Exact membership of an integer point in the dilate `nΔ`.
    pub fn contains_lattice(&self, n: u32, m: &LatticePoint) -> Result<bool, PolytopeError> {
        self.check_dim(m.dim())?;
        Ok(self.facets.iter().all(|f| f.eval_int(&m.0, n as i64) >= 0))
    }

    fn check_dim(&self, got: usize) -> Result<(), PolytopeError> {
        if got != self.dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    /// All vertices, each the unique solution of `d` facet equalities, in
    /// lexicographic order. Fails on unbounded, empty or non-simple input.
    pub fn vertices(&self) -> Result<Vec<RationalPoint>, PolytopeError> {
        if !self.is_bounded()? {
            return Err(PolytopeError::Unbounded);
        }
        let candidates = self.vertex_candidates()?;
        if candidates.is_empty() {
            return Err(PolytopeError::Empty);
        }
        for (point, tight) in &candidates {
            if tight.len() != self.dim {
                return Err(PolytopeError::NonSimple {
                    vertex: format_point(point),
                    facets: tight.iter().copied().collect(),
                    count: tight.len(),
                    dim: self.dim,
                });
            }
        }
        Ok(candidates.into_keys().collect())
    }

    /// Vertices with the full set of facets each one saturates.
    fn vertex_candidates(&self) -> Result<BTreeMap<RationalPoint, BTreeSet<usize>>, PolytopeError> {
        let m = self.facets.len();
        let count = binomial(m as u64, self.dim as u64);
        if count > MAX_FACET_SUBSETS {
            return Err(PolytopeError::TooLarge(count));
        }
        let mut found = BTreeMap::new();
        for subset in Combinations::new(m, self.dim) {
            let rows: Vec<Vec<BigRational>> = subset
                .iter()
                .map(|&k| self.facets[k].normal.iter().map(|&c| int(c)).collect())
                .collect();
            let rhs: Vec<BigRational> = subset.iter().map(|&k| int(-self.facets[k].offset)).collect();
            let Some(x) = solve(rows, rhs) else { continue };
            if found.contains_key(&x) {
                continue;
            }
            let mut tight = BTreeSet::new();
            let mut feasible = true;
            for (k, f) in self.facets.iter().enumerate() {
                let value = f.eval_rational(&x);
                if value.is_negative() {
                    feasible = false;
                    break;
                }
                if value.is_zero() {
                    tight.insert(k);
                }
            }
            if feasible {
                found.insert(x, tight);
            }
        }
        Ok(found)
    }

    /// Bounded iff the normals have full rank and the recession cone
    /// `{ r : <v_i, r> >= 0 }` has no extreme ray.
    fn is_bounded(&self) -> Result<bool, PolytopeError> {
        let d = self.dim;
        let all: Vec<Vec<BigRational>> = self
            .facets
            .iter()
            .map(|f| f.normal.iter().map(|&c| int(c)).collect())
            .collect();
        if rank(all) < d {
            return Ok(false);
        }
        let m = self.facets.len();
        let count = binomial(m as u64, d as u64 - 1);
        if count > MAX_FACET_SUBSETS {
            return Err(PolytopeError::TooLarge(count));
        }
        for subset in Combinations::new(m, d - 1) {
            let rows: Vec<Vec<BigInt>> = subset
                .iter()
                .map(|&k| self.facets[k].normal.iter().map(|&c| BigInt::from(c)).collect())
                .collect();
            let ray = kernel_vector(&rows, d);
            if ray.iter().all(Zero::is_zero) {
                continue;
            }
            for sign in [1i64, -1] {
                let ok = self.facets.iter().all(|f| {
                    let dot: BigInt = f
                        .normal
                        .iter()
                        .zip(&ray)
                        .map(|(&v, r)| BigInt::from(v * sign) * r)
                        .sum();
                    !dot.is_negative()
                });
                if ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Checks boundedness, nonempty interior, integrality of every vertex and
    /// unimodularity of every vertex cone. Problems are collected, not thrown.
    pub fn validate_delzant(&self) -> DelzantReport {
        let mut report = DelzantReport {
            pass: false,
            bounded: false,
            full_dimensional: false,
            vertices: Vec::new(),
            problems: Vec::new(),
        };
        match self.is_bounded() {
            Ok(true) => report.bounded = true,
            Ok(false) => {
                report.problems.push("polytope is unbounded".to_string());
                return report;
            }
            Err(e) => {
                report.problems.push(e.to_string());
                return report;
            }
        }
        let candidates = match self.vertex_candidates() {
            Ok(c) => c,
            Err(e) => {
                report.problems.push(e.to_string());
                return report;
            }
        };
        if candidates.is_empty() {
            report.problems.push("polytope is empty".to_string());
            return report;
        }
        let points: Vec<&RationalPoint> = candidates.keys().collect();
        report.full_dimensional = affine_rank(&points) == self.dim;
        if !report.full_dimensional {
            report.problems.push("polytope has empty interior".to_string());
        }
        for (point, tight) in &candidates {
            let integral = point.iter().all(BigRational::is_integer);
            let simple = tight.len() == self.dim;
            let cone_det = simple.then(|| {
                let rows: Vec<Vec<BigRational>> = tight
                    .iter()
                    .map(|&k| self.facets[k].normal.iter().map(|&c| int(c)).collect())
                    .collect();
                determinant(rows).to_integer()
            });
            let unimodular = cone_det.as_ref().is_some_and(|det| det.abs().is_one());
            let label = format_point(point);
            if !integral {
                report.problems.push(format!("vertex {label} is not integral"));
            }
            if !simple {
                report.problems.push(format!(
                    "vertex {label} lies on {} facets {:?}, expected {}",
                    tight.len(),
                    tight,
                    self.dim
                ));
            } else if !unimodular {
                report.problems.push(format!(
                    "vertex {label}: cone determinant {} is not ±1",
                    cone_det.as_ref().map(ToString::to_string).unwrap_or_default()
                ));
            }
            report.vertices.push(VertexDiagnostic {
                point: point.clone(),
                tight_facets: tight.iter().copied().collect(),
                integral,
                simple,
                cone_det: cone_det.and_then(|d| d.to_i64()),
                ok: integral && simple && unimodular,
            });
        }
        report.pass = report.problems.is_empty();
        report
    }

    fn bounds(&self) -> Result<&Bounds, PolytopeError> {
        self.bounds
            .get_or_init(|| {
                let verts = self.vertices()?;
                let mut lower = verts[0].clone();
                let mut upper = verts[0].clone();
                for v in &verts[1..] {
                    for k in 0..self.dim {
                        if v[k] < lower[k] {
                            lower[k] = v[k].clone();
                        }
                        if v[k] > upper[k] {
                            upper[k] = v[k].clone();
                        }
                    }
                }
                Ok(Bounds { lower, upper })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The integer points of `nΔ`, lexicographically ordered.
    ///
    /// The scan covers the bounding box of the dilated vertices and keeps the
    /// points passing every facet inequality (exact integer arithmetic).
    pub fn lattice_points(&self, n: u32) -> Result<Vec<LatticePoint>, PolytopeError> {
        let bounds = self.bounds()?;
        let scale = BigRational::from_integer(n.into());
        let lo: Vec<i64> = bounds
            .lower
            .iter()
            .map(|b| (b * &scale).ceil().to_integer().to_i64().unwrap_or(i64::MIN))
            .collect();
        let hi: Vec<i64> = bounds
            .upper
            .iter()
            .map(|b| (b * &scale).floor().to_integer().to_i64().unwrap_or(i64::MAX))
            .collect();
        let mut out = Vec::new();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(out);
        }
        let mut current = lo.clone();
        loop {
            if self.facets.iter().all(|f| f.eval_int(&current, n as i64) >= 0) {
                out.push(LatticePoint(current.clone()));
            }
            // Odometer with the last coordinate fastest gives lexicographic order.
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                if current[k] < hi[k] {
                    current[k] += 1;
                    current[k + 1..].copy_from_slice(&lo[k + 1..]);
                    break;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexDiagnostic {
    #[serde(serialize_with = "serialize_rational_point")]
    pub point: RationalPoint,
    pub tight_facets: Vec<usize>,
    pub integral: bool,
    pub simple: bool,
    pub cone_det: Option<i64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelzantReport {
    pub pass: bool,
    pub bounded: bool,
    pub full_dimensional: bool,
    pub vertices: Vec<VertexDiagnostic>,
    pub problems: Vec<String>,
}

fn serialize_rational_point<S: Serializer>(p: &RationalPoint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(p.iter().map(ToString::to_string))
}

pub fn format_point(p: &[BigRational]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Named entries of the toric catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standard {
    /// Standard simplex of dimension `d` (projective space `CP^d`).
    Simplex(usize),
    Cp1,
    Cp2,
    Cp1xCp1,
    /// Hirzebruch surface `F_a`, `a >= 1`.
    Hirzebruch(i64),
}

impl Standard {
    pub fn polytope(self) -> Result<DelzantPolytope, PolytopeError> {
        let (dim, facets, name) = match self {
            Standard::Simplex(d) => {
                if d == 0 {
                    return Err(PolytopeError::InvalidParameter {
                        name: "simplex".into(),
                        reason: "dimension must be positive".into(),
                    });
                }
                (d, simplex_facets(d), format!("simplex({d})"))
            }
            Standard::Cp1 => (1, simplex_facets(1), "cp1".to_string()),
            Standard::Cp2 => (2, simplex_facets(2), "cp2".to_string()),
            Standard::Cp1xCp1 => (
                2,
                vec![
                    Facet::new(vec![1, 0], 0),
                    Facet::new(vec![0, 1], 0),
                    Facet::new(vec![-1, 0], 1),
                    Facet::new(vec![0, -1], 1),
                ],
                "cp1xcp1".to_string(),
            ),
            Standard::Hirzebruch(a) => {
                if a < 1 {
                    return Err(PolytopeError::InvalidParameter {
                        name: "hirzebruch".into(),
                        reason: format!("a must be >= 1, got {a}"),
                    });
                }
                (
                    2,
                    vec![
                        Facet::new(vec![1, 0], 0),
                        Facet::new(vec![0, 1], 0),
                        Facet::new(vec![0, -1], 1),
                        Facet::new(vec![-1, -a], a + 1),
                    ],
                    format!("hirzebruch({a})"),
                )
            }
        };
        DelzantPolytope::new(dim, facets, Some(name))
    }
}

fn simplex_facets(d: usize) -> Vec<Facet> {
    let mut facets: Vec<Facet> = (0..d)
        .map(|k| {
            let mut v = vec![0; d];
            v[k] = 1;
            Facet::new(v, 0)
        })
        .collect();
    facets.push(Facet::new(vec![-1; d], 1));
    facets
}

impl FromStr for Standard {
    type Err = PolytopeError;

    /// Accepts `cp1`, `cp2`, `cp1xcp1`, `simplex(d)` and `hirzebruch(a)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let (name, params) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| PolytopeError::UnknownName(s.clone()))?;
                let params = inner
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| {
                        p.trim().parse::<i64>().map_err(|_| PolytopeError::InvalidParameter {
                            name: name.to_string(),
                            reason: format!("{p:?} is not an integer"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                (name.to_string(), params)
            }
            None => (s.clone(), Vec::new()),
        };
        standard_from_parts(&name, &params)
    }
}

fn standard_from_parts(name: &str, params: &[i64]) -> Result<Standard, PolytopeError> {
    let bad = |reason: &str| PolytopeError::InvalidParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    match (name, params) {
        ("cp1", []) => Ok(Standard::Cp1),
        ("cp2", []) => Ok(Standard::Cp2),
        ("cp1xcp1", []) => Ok(Standard::Cp1xCp1),
        ("simplex", [d]) if *d >= 1 => Ok(Standard::Simplex(*d as usize)),
        ("simplex", [_]) => Err(bad("dimension must be positive")),
        ("hirzebruch", [a]) if *a >= 1 => Ok(Standard::Hirzebruch(*a)),
        ("hirzebruch", [_]) => Err(bad("a must be >= 1")),
        ("cp1" | "cp2" | "cp1xcp1", _) => Err(bad("takes no parameters")),
        ("simplex" | "hirzebruch", _) => Err(bad("takes exactly one integer parameter")),
        _ => Err(PolytopeError::UnknownName(name.to_string())),
    }
}

/// Catalog lookup by name and integer parameters.
pub fn standard(name: &str, params: &[i64]) -> Result<DelzantPolytope, PolytopeError> {
    standard_from_parts(&name.trim().to_ascii_lowercase(), params)?.polytope()
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// k-subsets of 0..n in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Row-reduces in place; returns the rank and the determinant sign/scale product.
fn eliminate(rows: &mut [Vec<BigRational>]) -> (usize, BigRational) {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut det = BigRational::one();
    let mut r = 0;
    for c in 0..n_cols {
        let Some(pivot) = (r..n_rows).find(|&i| !rows[i][c].is_zero()) else {
            det = BigRational::zero();
            continue;
        };
        if pivot != r {
            rows.swap(pivot, r);
            det = -det;
        }
        let p = rows[r][c].clone();
        det *= &p;
        for i in 0..n_rows {
            if i != r && !rows[i][c].is_zero() {
                let factor = &rows[i][c] / &p;
                for j in c..n_cols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        r += 1;
        if r == n_rows {
            break;
        }
    }
    (r, det)
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    eliminate(&mut rows).0
}

fn determinant(mut rows: Vec<Vec<BigRational>>) -> BigRational {
    let n = rows.len();
    let (r, det) = eliminate(&mut rows);
    if r < n {
        BigRational::zero()
    } else {
        det
    }
}

/// Solves the square system `A x = b`; `None` when singular.
fn solve(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, bi)| {
            row.push(bi);
            row
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(pivot, c);
        let p = aug[c][c].clone();
        for j in c..=n {
            aug[c][j] = &aug[c][j] / &p;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for j in c..=n {
                    let delta = &factor * &aug[c][j];
                    aug[i][j] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Generalized cross product: a vector orthogonal to the `d-1` given rows
/// (zero when they are dependent).
fn kernel_vector(rows: &[Vec<BigInt>], d: usize) -> Vec<BigInt> {
    (0..d)
        .map(|skip| {
            let minor: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != skip)
                        .map(|(_, v)| BigRational::from_integer(v.clone()))
                        .collect()
                })
                .collect();
            let det = if minor.is_empty() {
                BigInt::one()
            } else {
                determinant(minor).to_integer()
            };
            if skip.is_odd() {
                -det
            } else {
                det
            }
        })
        .collect()
}

fn affine_rank(points: &[&RationalPoint]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    if rest.is_empty() {
        return 0;
    }
    let rows = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a - b).collect())
        .collect();
    rank(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        int(n)
    }

    fn weighted_projective() -> DelzantPolytope {
        DelzantPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], 0),
                Facet::new(vec![0, 1], 0),
                Facet::new(vec![-1, -2], 2),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn catalog_cp2_has_expected_facets() {
        let p = standard("cp2", &[]).unwrap();
        assert_eq!(
            p.facets(),
            &[
                Facet::new(vec![1, 0], 0),
                Facet::new(vec![0, 1], 0),
                Facet::new(vec![-1, -1], 1)
            ]
        );
        assert_eq!(standard("cp1xcp1", &[]).unwrap().facets().len(), 4);
    }

    #[test]
    fn catalog_rejects_bad_names_and_params() {
        assert!(matches!(standard("cp3", &[]), Err(PolytopeError::UnknownName(_))));
        assert!(matches!(
            standard("hirzebruch", &[0]),
            Err(PolytopeError::InvalidParameter { .. })
        ));
        assert!(matches!(
            standard("cp2", &[1]),
            Err(PolytopeError::InvalidParameter { .. })
        ));
        assert!("hirzebruch(x)".parse::<Standard>().is_err());
        assert_eq!("Hirzebruch(2)".parse::<Standard>().unwrap(), Standard::Hirzebruch(2));
        assert_eq!("simplex(3)".parse::<Standard>().unwrap(), Standard::Simplex(3));
    }

    #[test]
    fn vertices_of_catalog_entries() {
        let cp2 = standard("cp2", &[]).unwrap().vertices().unwrap();
        assert_eq!(cp2, vec![vec![q(0), q(0)], vec![q(0), q(1)], vec![q(1), q(0)]]);
        let h1 = standard("hirzebruch", &[1]).unwrap().vertices().unwrap();
        assert_eq!(
            h1,
            vec![vec![q(0), q(0)], vec![q(0), q(1)], vec![q(1), q(1)], vec![q(2), q(0)]]
        );
        assert_eq!(standard("cp1xcp1", &[]).unwrap().vertices().unwrap().len(), 4);
    }

    #[test]
    fn delzant_validation() {
        for name in ["cp1", "cp2", "cp1xcp1", "hirzebruch(1)", "hirzebruch(3)", "simplex(3)"] {
            let p = name.parse::<Standard>().unwrap().polytope().unwrap();
            let report = p.validate_delzant();
            assert!(report.pass, "{name}: {:?}", report.problems);
            assert!(report.vertices.iter().all(|v| v.cone_det.unwrap().abs() == 1));
        }
        let report = weighted_projective().validate_delzant();
        assert!(!report.pass);
        let bad: Vec<_> = report.vertices.iter().filter(|v| !v.ok).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].point, vec![q(0), q(1)]);
        assert_eq!(bad[0].cone_det.unwrap().abs(), 2);
    }

    #[test]
    fn unbounded_and_nonintegral_and_nonsimple_are_flagged() {
        let quadrant =
            DelzantPolytope::new(2, vec![Facet::new(vec![1, 0], 0), Facet::new(vec![0, 1], 0)], None).unwrap();
        let r = quadrant.validate_delzant();
        assert!(!r.pass && !r.bounded);
        assert_eq!(quadrant.vertices(), Err(PolytopeError::Unbounded));
        assert_eq!(quadrant.lattice_points(1), Err(PolytopeError::Unbounded));

        // Strip: bounded in x only, normals of rank 1.
        let strip = DelzantPolytope::new(2, vec![Facet::new(vec![1, 0], 0), Facet::new(vec![-1, 0], 1)], None).unwrap();
        assert!(!strip.validate_delzant().bounded);

        // 2x + 2y <= 1 has vertices (1/2, 0), (0, 1/2).
        let half = DelzantPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], 0),
                Facet::new(vec![0, 1], 0),
                Facet::new(vec![-2, -2], 1),
            ],
            None,
        )
        .unwrap();
        let r = half.validate_delzant();
        assert!(!r.pass);
        assert!(r.vertices.iter().any(|v| !v.integral));

        // Square pyramid apex lies on four facets.
        let pyramid = DelzantPolytope::new(
            3,
            vec![
                Facet::new(vec![0, 0, 1], 0),
                Facet::new(vec![1, 0, -1], 1),
                Facet::new(vec![-1, 0, -1], 1),
                Facet::new(vec![0, 1, -1], 1),
                Facet::new(vec![0, -1, -1], 1),
            ],
            None,
        )
        .unwrap();
        assert!(matches!(
            pyramid.vertices(),
            Err(PolytopeError::NonSimple { count: 4, .. })
        ));
        assert!(!pyramid.validate_delzant().pass);

        // Empty: x >= 0 and x <= -1.
        let empty = DelzantPolytope::new(1, vec![Facet::new(vec![1], 0), Facet::new(vec![-1], -1)], None).unwrap();
        assert!(!empty.validate_delzant().pass);
        assert_eq!(empty.vertices(), Err(PolytopeError::Empty));

        // Segment in the plane: x >= 0, x <= 1, y >= 0, y <= 0.
        let flat = DelzantPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], 0),
                Facet::new(vec![-1, 0], 1),
                Facet::new(vec![0, 1], 0),
                Facet::new(vec![0, -1], 0),
            ],
            None,
        )
        .unwrap();
        let r = flat.validate_delzant();
        assert!(!r.pass && !r.full_dimensional);
    }

    #[test]
    fn construction_shape_errors() {
        assert_eq!(DelzantPolytope::new(0, vec![], None), Err(PolytopeError::ZeroDimension));
        assert_eq!(DelzantPolytope::new(2, vec![], None), Err(PolytopeError::NoFacets));
        assert!(matches!(
            DelzantPolytope::new(2, vec![Facet::new(vec![1], 0)], None),
            Err(PolytopeError::NormalLength {
                facet: 0,
                len: 1,
                dim: 2
            })
        ));
        assert!(matches!(
            DelzantPolytope::new(1, vec![Facet::new(vec![0], 0)], None),
            Err(PolytopeError::ZeroNormal { facet: 0 })
        ));
    }

    #[test]
    fn lattice_points_small_cases() {
        let cp2 = standard("cp2", &[]).unwrap();
        assert_eq!(cp2.lattice_points(0).unwrap(), vec![LatticePoint::origin(2)]);
        let pts: Vec<Vec<i64>> = cp2.lattice_points(2).unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(
            pts,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        let square = standard("cp1xcp1", &[]).unwrap();
        assert_eq!(square.lattice_points(3).unwrap().len(), 16);
        let h1 = standard("hirzebruch", &[1]).unwrap();
        assert_eq!(h1.lattice_points(1).unwrap().len(), 5);
    }

    #[test]
    fn containment() {
        let cp2 = standard("cp2", &[]).unwrap();
        assert!(cp2.contains(1.0, &[0.3, 0.4], 0.0).unwrap());
        assert!(!cp2.contains(1.0, &[0.7, 0.7], 0.0).unwrap());
        assert!(cp2.contains(2.0, &[1.0, 1.0], 1e-9).unwrap());
        assert!(cp2.contains(1.0, &[0.3], 0.0).is_err());
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(binomial(10, 3), 120);
    }
}
