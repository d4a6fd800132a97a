//! The deformed homogeneous coordinate ring on its weight basis.
//!
//! Degree-`n` basis vectors `e_{n,m}` are labelled by the lattice points `m` of
//! `nΔ`. The product is
//!
//! ```text
//! e_{n1,m1} * e_{n2,m2} = exp(iπ C(m1, m2)) e_{n1+n2, m1+m2}
//! ```
//!
//! which is `exp((i/4π) C(w1, w2))` for lattice weights `w = 2πm`. Phases are
//! carried as the exponent `C(m1, m2)` (exactly, when `C` is rational) and only
//! exponentiated on output, so associativity can be checked without rounding.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::number::ExactComplex;
use crate::polytope::{DelzantPolytope, LatticePoint, PolytopeError};
use crate::rmatrix::{RMatrix, RMatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcRingError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error("weight {weight} is not a lattice point of {degree}Δ")]
    NotInDilate { degree: u32, weight: String },
    #[error("internal error: product weight {weight} escaped {degree}Δ")]
    ProductOutsideDilate { degree: u32, weight: String },
    #[error("degree overflow")]
    DegreeOverflow,
    #[error(transparent)]
    Label(#[from] LabelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad basis label {text:?}: {reason} (expected degree:(m1,m2,...))")]
pub struct LabelError {
    pub text: String,
    pub reason: &'static str,
}

/// Basis label `e_{n,m}`: a degree and a lattice point of `nΔ`.
///
/// Ordered by `(degree, weight)` lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightedSection {
    degree: u32,
    weight: LatticePoint,
}

impl WeightedSection {
    pub fn new(polytope: &DelzantPolytope, degree: u32, weight: LatticePoint) -> Result<Self, NcRingError> {
        if !polytope.contains_lattice(degree, &weight)? {
            return Err(NcRingError::NotInDilate {
                degree,
                weight: weight.to_string(),
            });
        }
        Ok(Self { degree, weight })
    }

    /// `e_{0,0}`, the unit.
    pub fn unit(dim: usize) -> Self {
        Self {
            degree: 0,
            weight: LatticePoint::origin(dim),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn weight(&self) -> &LatticePoint {
        &self.weight
    }

    /// The `degree:(m1,...)` label.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for WeightedSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.degree, self.weight)
    }
}

/// A parsed but not yet polytope-checked `degree:(m1,...)` label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionLabel {
    pub degree: u32,
    pub weight: LatticePoint,
}

impl SectionLabel {
    pub fn resolve(self, polytope: &DelzantPolytope) -> Result<WeightedSection, NcRingError> {
        WeightedSection::new(polytope, self.degree, self.weight)
    }
}

impl FromStr for SectionLabel {
    type Err = LabelError;

    fn from_str(text: &str) -> Result<Self, LabelError> {
        let err = |reason| LabelError {
            text: text.to_string(),
            reason,
        };
        let (degree, weight) = text.trim().split_once(':').ok_or_else(|| err("missing ':'"))?;
        let degree = degree
            .trim()
            .parse::<u32>()
            .map_err(|_| err("degree is not a nonnegative integer"))?;
        let inner = weight
            .trim()
            .strip_prefix('(')
            .and_then(|w| w.strip_suffix(')'))
            .ok_or_else(|| err("weight must be parenthesized"))?;
        if inner.trim().is_empty() {
            return Err(err("empty weight"));
        }
        let coords = inner
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err("weight coordinate is not an integer"))?;
        Ok(SectionLabel {
            degree,
            weight: LatticePoint::new(coords),
        })
    }
}

/// Phase exponent `C(m1, m2)`; the structure constant is `exp(iπ · value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseExponent {
    pub value: Complex64,
    pub exact: Option<ExactComplex>,
}

impl PhaseExponent {
    pub fn zero() -> Self {
        Self {
            value: Complex64::zero(),
            exact: Some(ExactComplex::zero()),
        }
    }

    /// The exponent in `factor = exp(exponent)`, i.e. `iπ · C(m1, m2)`.
    pub fn exponent(&self) -> Complex64 {
        Complex64::i() * PI * self.value
    }

    /// `exp(iπ · value)`. Exact half-integer real exponents give exact `±1`, `±i`.
    pub fn factor(&self) -> Complex64 {
        if let Some(e) = &self.exact {
            if e.im.is_zero() {
                let twice = &e.re * num_rational::BigRational::from_integer(2.into());
                if twice.is_integer() {
                    if let Some(k) = twice.to_integer().mod_floor(&4.into()).to_i64() {
                        return [
                            Complex64::new(1.0, 0.0),
                            Complex64::new(0.0, 1.0),
                            Complex64::new(-1.0, 0.0),
                            Complex64::new(0.0, -1.0),
                        ][k as usize];
                    }
                }
            }
        }
        self.exponent().exp()
    }
}

impl Add for &PhaseExponent {
    type Output = PhaseExponent;
    fn add(self, rhs: Self) -> PhaseExponent {
        PhaseExponent {
            value: self.value + rhs.value,
            exact: match (&self.exact, &rhs.exact) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }
}

pub fn phase_exponent(c: &RMatrix, m1: &LatticePoint, m2: &LatticePoint) -> Result<PhaseExponent, NcRingError> {
    let value = c.pair_real(&m1.as_f64(), &m2.as_f64())?;
    let exact = c.pair_exact(m1.coords(), m2.coords())?;
    Ok(PhaseExponent { value, exact })
}

/// `exp(iπ C(m1, m2))`.
pub fn phase(c: &RMatrix, m1: &LatticePoint, m2: &LatticePoint) -> Result<Complex64, NcRingError> {
    Ok(phase_exponent(c, m1, m2)?.factor())
}

/// `exp(2πi C(m1, m2))`: `e1 * e2 = factor · (e2 * e1)`.
pub fn commutation_factor(c: &RMatrix, m1: &LatticePoint, m2: &LatticePoint) -> Result<Complex64, NcRingError> {
    let e = phase_exponent(c, m1, m2)?;
    Ok((&e + &e).factor())
}

/// A basis vector times an exactly tracked phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub section: WeightedSection,
    pub phase: PhaseExponent,
}

impl Monomial {
    pub fn basis(section: WeightedSection) -> Self {
        Self {
            section,
            phase: PhaseExponent::zero(),
        }
    }

    pub fn coefficient(&self) -> Complex64 {
        self.phase.factor()
    }
}

fn product_section(
    polytope: &DelzantPolytope,
    a: &WeightedSection,
    b: &WeightedSection,
) -> Result<WeightedSection, NcRingError> {
    let degree = a.degree.checked_add(b.degree).ok_or(NcRingError::DegreeOverflow)?;
    let weight = a.weight.add(&b.weight);
    if !polytope.contains_lattice(degree, &weight)? {
        return Err(NcRingError::ProductOutsideDilate {
            degree,
            weight: weight.to_string(),
        });
    }
    Ok(WeightedSection { degree, weight })
}

/// Product of two monomials, phases added in exponent form.
pub fn star_monomial(
    c: &RMatrix,
    polytope: &DelzantPolytope,
    a: &Monomial,
    b: &Monomial,
) -> Result<Monomial, NcRingError> {
    let section = product_section(polytope, &a.section, &b.section)?;
    let e = phase_exponent(c, &a.section.weight, &b.section.weight)?;
    Ok(Monomial {
        section,
        phase: &(&a.phase + &b.phase) + &e,
    })
}

/// Finite linear combination of basis vectors; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RingElement {
    terms: BTreeMap<WeightedSection, Complex64>,
}

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(section: WeightedSection) -> Self {
        Self::term(section, Complex64::new(1.0, 0.0))
    }

    pub fn term(section: WeightedSection, coeff: Complex64) -> Self {
        let mut e = Self::zero();
        e.add_term(section, coeff);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (WeightedSection, Complex64)>) -> Self {
        let mut e = Self::zero();
        for (s, c) in terms {
            e.add_term(s, c);
        }
        e
    }

    pub fn add_term(&mut self, section: WeightedSection, coeff: Complex64) {
        let entry = self.terms.entry(section).or_insert(Complex64::zero());
        *entry += coeff;
        if *entry == Complex64::zero() {
            self.terms.retain(|_, c| *c != Complex64::zero());
        }
    }

    pub fn terms(&self) -> &BTreeMap<WeightedSection, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, section: &WeightedSection) -> Complex64 {
        self.terms.get(section).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, c)| (s.clone(), c * k)))
    }

    /// Largest coefficient difference over the union of supports.
    pub fn distance(&self, other: &Self) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|s| (self.coefficient(s) - other.coefficient(s)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> RingElement {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), *c);
        }
        out
    }
}

impl Mul<Complex64> for &RingElement {
    type Output = RingElement;
    fn mul(self, k: Complex64) -> RingElement {
        self.scale(k)
    }
}

/// Bilinear extension of the basis product.
pub fn star(
    c: &RMatrix,
    polytope: &DelzantPolytope,
    a: &RingElement,
    b: &RingElement,
) -> Result<RingElement, NcRingError> {
    let mut out = RingElement::zero();
    for (sa, ca) in &a.terms {
        for (sb, cb) in &b.terms {
            let section = product_section(polytope, sa, sb)?;
            let f = phase(c, &sa.weight, &sb.weight)?;
            out.add_term(section, ca * cb * f);
        }
    }
    Ok(out)
}

/// Degree-`n` basis labels, lexicographic in the weight.
pub fn basis(polytope: &DelzantPolytope, n: u32) -> Result<Vec<WeightedSection>, NcRingError> {
    Ok(polytope
        .lattice_points(n)?
        .into_iter()
        .map(|weight| WeightedSection { degree: n, weight })
        .collect())
}

/// `[dim A_0, ..., dim A_nmax]`; independent of `C`.
pub fn hilbert_function(polytope: &DelzantPolytope, nmax: u32) -> Result<Vec<usize>, NcRingError> {
    (0..=nmax).map(|n| Ok(polytope.lattice_points(n)?.len())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstant {
    pub left: WeightedSection,
    pub right: WeightedSection,
    pub target: WeightedSection,
    pub phase: PhaseExponent,
}

impl StructureConstant {
    pub fn factor(&self) -> Complex64 {
        self.phase.factor()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstantTable {
    pub n1: u32,
    pub n2: u32,
    pub entries: Vec<StructureConstant>,
}

impl StructureConstantTable {
    pub fn get(&self, m1: &LatticePoint, m2: &LatticePoint) -> Option<&StructureConstant> {
        self.entries
            .iter()
            .find(|e| &e.left.weight == m1 && &e.right.weight == m2)
    }
}

/// `phase(C, m1, m2)` over `basis(n1) × basis(n2)`, row-major in that order.
pub fn structure_constants(
    c: &RMatrix,
    polytope: &DelzantPolytope,
    n1: u32,
    n2: u32,
) -> Result<StructureConstantTable, NcRingError> {
    let left = basis(polytope, n1)?;
    let right = basis(polytope, n2)?;
    let mut entries = Vec::with_capacity(left.len() * right.len());
    for a in &left {
        for b in &right {
            entries.push(StructureConstant {
                left: a.clone(),
                right: b.clone(),
                target: product_section(polytope, a, b)?,
                phase: phase_exponent(c, &a.weight, &b.weight)?,
            });
        }
    }
    Ok(StructureConstantTable { n1, n2, entries })
}
