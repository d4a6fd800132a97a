//! Triangular R-matrices `C ∈ ∧²t_C` and their bilinear operations.
//!
//! `C` is held as an antisymmetric complex `d×d` matrix. When every entry was
//! given as an exact rational (real and imaginary parts), an exact copy is kept
//! alongside the float view so the ring module can do exact phase arithmetic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::number::ExactComplex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RMatrixError {
    #[error("R-matrix dimension must be positive")]
    ZeroDimension,
    #[error("row {row} has length {len}, expected {dim}")]
    RowLength { row: usize, len: usize, dim: usize },
    #[error("expected {expected} rows, got {got}")]
    RowCount { expected: usize, got: usize },
    #[error("R-matrix is not antisymmetric at ({row},{col})")]
    NotAntisymmetric { row: usize, col: usize },
    #[error("dimension mismatch: R-matrix has dimension {expected}, argument has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index ({0},{1}) out of range or on the diagonal")]
    BadIndex(usize, usize),
}

/// Result of [`RMatrix::validate`]. Offending indices are 1-based and point at
/// the lower-triangular entry that disagrees with its mirror.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RMatrixReport {
    pub pass: bool,
    pub offending: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    dim: usize,
    entries: DMatrix<Complex64>,
    exact: Option<Vec<ExactComplex>>,
}

/// `C = A + iB` with `A`, `B` real antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImagParts {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl RMatrix {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: DMatrix::zeros(dim, dim),
            exact: Some(vec![ExactComplex::zero(); dim * dim]),
        }
    }

    /// Float-only matrix from row-major complex rows. Only the shape is checked.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, RMatrixError> {
        let dim = check_shape(rows.len(), rows.iter().map(Vec::len))?;
        let entries = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        Ok(Self {
            dim,
            entries,
            exact: None,
        })
    }

    /// Matrix with exact rational entries; the float view is derived from them.
    pub fn from_exact_rows(rows: &[Vec<ExactComplex>]) -> Result<Self, RMatrixError> {
        let dim = check_shape(rows.len(), rows.iter().map(Vec::len))?;
        let entries = DMatrix::from_fn(dim, dim, |i, j| rows[i][j].to_complex64());
        let exact = rows.iter().flatten().cloned().collect();
        Ok(Self {
            dim,
            entries,
            exact: Some(exact),
        })
    }

    /// The matrix with `C_ij = c`, `C_ji = -c` (0-based `i != j`) and zeros elsewhere.
    pub fn with_entry(dim: usize, i: usize, j: usize, c: Complex64) -> Result<Self, RMatrixError> {
        if i >= dim || j >= dim || i == j {
            return Err(RMatrixError::BadIndex(i, j));
        }
        let mut entries = DMatrix::zeros(dim, dim);
        entries[(i, j)] = c;
        entries[(j, i)] = -c;
        Ok(Self {
            dim,
            entries,
            exact: None,
        })
    }

    /// Exact variant of [`RMatrix::with_entry`].
    pub fn with_exact_entry(dim: usize, i: usize, j: usize, c: ExactComplex) -> Result<Self, RMatrixError> {
        if i >= dim || j >= dim || i == j {
            return Err(RMatrixError::BadIndex(i, j));
        }
        let mut rows = vec![vec![ExactComplex::zero(); dim]; dim];
        rows[j][i] = -&c;
        rows[i][j] = c;
        Self::from_exact_rows(&rows)
    }

    /// Real rational entry `C_12 = num/den` in dimension 2; convenient in tests.
    pub fn planar_rational(num: i64, den: i64) -> Self {
        let c = ExactComplex::new(BigRational::new(num.into(), den.into()), BigRational::zero());
        Self::with_exact_entry(2, 0, 1, c).expect("valid index")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn exact_entry(&self, i: usize, j: usize) -> Option<&ExactComplex> {
        self.exact.as_ref().map(|e| &e[i * self.dim + j])
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| *c == Complex64::zero())
    }

    /// Scaled copy `tC`; the exact view is dropped.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.map(|c| c * t),
            exact: None,
        }
    }

    /// Exact antisymmetry check: `C_ij = -C_ji` and a zero diagonal.
    pub fn validate(&self) -> RMatrixReport {
        for i in 0..self.dim {
            for j in 0..=i {
                let ok = match &self.exact {
                    Some(_) => {
                        let a = self.exact_entry(i, j).unwrap();
                        let b = self.exact_entry(j, i).unwrap();
                        if i == j {
                            a.is_zero()
                        } else {
                            *a == -b
                        }
                    }
                    None => {
                        if i == j {
                            self.entries[(i, i)] == Complex64::zero()
                        } else {
                            self.entries[(i, j)] == -self.entries[(j, i)]
                        }
                    }
                };
                if !ok {
                    return RMatrixReport {
                        pass: false,
                        offending: Some((i + 1, j + 1)),
                    };
                }
            }
        }
        RMatrixReport {
            pass: true,
            offending: None,
        }
    }

    fn check_len(&self, len: usize) -> Result<(), RMatrixError> {
        if len != self.dim {
            return Err(RMatrixError::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    /// The bilinear form `C(u, v) = Σ_ij C_ij u_i v_j`.
    pub fn pair(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64, RMatrixError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let mut acc = Complex64::zero();
        for i in 0..self.dim {
            if u[i] == Complex64::zero() {
                continue;
            }
            let mut row = Complex64::zero();
            for j in 0..self.dim {
                row += self.entries[(i, j)] * v[j];
            }
            acc += u[i] * row;
        }
        Ok(acc)
    }

    /// [`RMatrix::pair`] on real vectors.
    pub fn pair_real(&self, u: &[f64], v: &[f64]) -> Result<Complex64, RMatrixError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let mut acc = Complex64::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += self.entries[(i, j)] * (u[i] * v[j]);
            }
        }
        Ok(acc)
    }

    /// Exact `C(m1, m2)` on integer vectors, when the matrix is exact.
    pub fn pair_exact(&self, u: &[i64], v: &[i64]) -> Result<Option<ExactComplex>, RMatrixError> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let Some(_) = &self.exact else {
            return Ok(None);
        };
        let mut acc = ExactComplex::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let k = u[i] * v[j];
                if k != 0 {
                    acc = &acc + &self.exact_entry(i, j).unwrap().scale_int(k);
                }
            }
        }
        Ok(Some(acc))
    }

    /// `(Cα)_i = Σ_j C_ij α_j`, so that `<u, Cα> = C(u, α)`.
    pub fn contract(&self, alpha: &[Complex64]) -> Result<Vec<Complex64>, RMatrixError> {
        self.check_len(alpha.len())?;
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entries[(i, j)] * alpha[j]).sum())
            .collect())
    }

    /// Interior product `ι_α C`, i.e. `(ι_α C)_j = Σ_i α_i C_ij = C(α, e_j)`.
    /// Equal to `-contract(α)` by antisymmetry.
    pub fn interior(&self, alpha: &[Complex64]) -> Result<Vec<Complex64>, RMatrixError> {
        self.check_len(alpha.len())?;
        Ok((0..self.dim)
            .map(|j| (0..self.dim).map(|i| alpha[i] * self.entries[(i, j)]).sum())
            .collect())
    }

    pub fn decompose(&self) -> RealImagParts {
        RealImagParts {
            a: self.entries.map(|c| c.re),
            b: self.entries.map(|c| c.im),
        }
    }
}

impl RealImagParts {
    pub fn reassemble(&self) -> DMatrix<Complex64> {
        self.a.zip_map(&self.b, Complex64::new)
    }
}

fn check_shape(rows: usize, lens: impl Iterator<Item = usize>) -> Result<usize, RMatrixError> {
    if rows == 0 {
        return Err(RMatrixError::ZeroDimension);
    }
    for (row, len) in lens.enumerate() {
        if len != rows {
            return Err(RMatrixError::RowLength { row, len, dim: rows });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation_examples() {
        assert!(RMatrix::zero(3).validate().pass);
        assert!(RMatrix::with_entry(2, 0, 1, c(0.7, -1.0)).unwrap().validate().pass);
        let sym = RMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(
            sym.validate(),
            RMatrixReport {
                pass: false,
                offending: Some((2, 1))
            }
        );
        let diag = RMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(diag.validate().offending, Some((1, 1)));
    }

    #[test]
    fn shape_errors() {
        assert_eq!(RMatrix::from_rows(&[]), Err(RMatrixError::ZeroDimension));
        assert!(matches!(
            RMatrix::from_rows(&[vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]]),
            Err(RMatrixError::RowLength { row: 0, .. })
        ));
        assert_eq!(
            RMatrix::with_entry(2, 1, 1, c(1.0, 0.0)),
            Err(RMatrixError::BadIndex(1, 1))
        );
    }

    #[test]
    fn pair_examples() {
        let m = RMatrix::with_entry(2, 0, 1, c(0.3, 0.2)).unwrap();
        let e1 = [c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(m.pair(&e1, &e2).unwrap(), c(0.3, 0.2));
        let u = [c(0.4, -2.0), c(1.5, 0.1)];
        assert!(m.pair(&u, &u).unwrap().norm() < 1e-15);

        let m = RMatrix::with_entry(2, 0, 1, c(2.0, 1.0)).unwrap();
        let got = m
            .pair(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(-1.0, 0.0)])
            .unwrap();
        assert_eq!(got, c(-4.0, -2.0));
        assert!(m.pair(&e1, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn contract_examples() {
        let m = RMatrix::with_entry(2, 0, 1, c(0.5, 0.0)).unwrap();
        let got = m.contract(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(got, vec![c(1.5, 0.0), c(-1.0, 0.0)]);
        assert_eq!(m.contract(&[c(0.0, 0.0); 2]).unwrap(), vec![c(0.0, 0.0); 2]);
        let zero = RMatrix::zero(2);
        assert_eq!(
            zero.contract(&[c(1.0, 2.0), c(3.0, 4.0)]).unwrap(),
            vec![c(0.0, 0.0); 2]
        );
        assert_eq!(
            m.interior(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap(),
            vec![c(-1.5, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn decompose_examples() {
        for (entry, a12, b12) in [
            (c(3.0, 0.0), 3.0, 0.0),
            (c(0.0, 1.0), 0.0, 1.0),
            (c(1.0, -2.0), 1.0, -2.0),
        ] {
            let m = RMatrix::with_entry(2, 0, 1, entry).unwrap();
            let parts = m.decompose();
            assert_eq!(parts.a[(0, 1)], a12);
            assert_eq!(parts.b[(0, 1)], b12);
            assert_eq!(parts.a[(1, 0)], -a12);
            assert_eq!(parts.b[(1, 0)], -b12);
            assert_eq!(&parts.reassemble(), m.matrix());
        }
    }

    #[test]
    fn exact_pairing_matches_float() {
        let m = RMatrix::planar_rational(1, 3);
        let e = m.pair_exact(&[2, 1], &[1, 4]).unwrap().unwrap();
        // (1/3)(2*4 - 1*1) = 7/3
        assert_eq!(
            e,
            ExactComplex::new(BigRational::new(7.into(), 3.into()), BigRational::zero())
        );
        let f = m.pair_real(&[2.0, 1.0], &[1.0, 4.0]).unwrap();
        assert!((f - e.to_complex64()).norm() < 1e-15);
        assert_eq!(
            RMatrix::with_entry(2, 0, 1, c(1.0, 0.0))
                .unwrap()
                .pair_exact(&[1, 0], &[0, 1])
                .unwrap(),
            None
        );
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_rmatrix(d: usize) -> impl Strategy<Value = RMatrix> {
        prop::collection::vec(arb_complex(), d * d).prop_map(move |vals| {
            let mut rows = vec![vec![c(0.0, 0.0); d]; d];
            for i in 0..d {
                for j in i + 1..d {
                    rows[i][j] = vals[i * d + j];
                    rows[j][i] = -vals[i * d + j];
                }
            }
            RMatrix::from_rows(&rows).unwrap()
        })
    }

    fn arb_vec(d: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec(arb_complex(), d)
    }

    proptest! {
        #[test]
        fn pair_is_bilinear(
            m in arb_rmatrix(3), a in arb_complex(), b in arb_complex(),
            u in arb_vec(3), u2 in arb_vec(3), v in arb_vec(3)
        ) {
            let comb: Vec<_> = u.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect();
            let lhs = m.pair(&comb, &v).unwrap();
            let rhs = a * m.pair(&u, &v).unwrap() + b * m.pair(&u2, &v).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((m.pair(&u, &v).unwrap() + m.pair(&v, &u).unwrap()).norm() < 1e-12);
        }

        #[test]
        fn cocycle_enabling_identity(m in arb_rmatrix(3), u in arb_vec(3), v in arb_vec(3), w in arb_vec(3)) {
            let add = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
                x.iter().zip(y).map(|(a, b)| a + b).collect()
            };
            let lhs = m.pair(&u, &v).unwrap() + m.pair(&add(&u, &v), &w).unwrap();
            let rhs = m.pair(&v, &w).unwrap() + m.pair(&u, &add(&v, &w)).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn contraction_adjunction(m in arb_rmatrix(3), u in arb_vec(3), alpha in arb_vec(3)) {
            let ca = m.contract(&alpha).unwrap();
            let lhs: Complex64 = u.iter().zip(&ca).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - m.pair(&u, &alpha).unwrap()).norm() < 1e-12);
            let ia = m.interior(&alpha).unwrap();
            let lhs: Complex64 = u.iter().zip(&ia).map(|(a, b)| a * b).sum();
            prop_assert!((lhs - m.pair(&alpha, &u).unwrap()).norm() < 1e-12);
        }
    }
}
