//! Linearized toric Kähler charts with block Fubini–Study potentials.
//!
//! Real tangent coordinates are ordered `(x_1, y_1, x_2, y_2, ...)` with
//! `z_j = x_j + i y_j`, and the complex structure sends `∂_x ↦ ∂_y`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::FlowError;
use crate::polytope::{DelzantPolytope, Standard};

/// A chart centred at a torus-fixed point `p`.
///
/// The potential is `K = Σ_b log(1 + Σ_{j∈b} |z_j|²)` over a partition of the
/// coordinates into blocks, and the moment map is
/// `μ = μ(p) + Σ_j |z_j|²/(1 + S_{b(j)}) · λ^{(j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricKahlerChart {
    name: String,
    blocks: Vec<Vec<usize>>,
    /// `weights[j] = λ^{(j)}`, the torus weight of `z_j`.
    weights: Vec<Vec<i64>>,
    offset: Vec<f64>,
    variety: Standard,
}

impl ToricKahlerChart {
    fn standard(name: &str, blocks: Vec<Vec<usize>>, variety: Standard) -> Self {
        let d = blocks.iter().map(Vec::len).sum();
        Self {
            name: name.to_string(),
            blocks,
            weights: (0..d).map(|j| (0..d).map(|i| i64::from(i == j)).collect()).collect(),
            offset: vec![0.0; d],
            variety,
        }
    }

    pub fn cp1() -> Self {
        Self::standard("cp1", vec![vec![0]], Standard::Cp1)
    }

    /// Affine chart `[1 : z_1 : z_2]` at the vertex `μ = (0, 0)`.
    pub fn cp2() -> Self {
        Self::standard("cp2", vec![vec![0, 1]], Standard::Cp2)
    }

    pub fn cp1xcp1() -> Self {
        Self::standard("cp1xcp1", vec![vec![0], vec![1]], Standard::Cp1xCp1)
    }

    /// Affine chart `[w_1 : 1 : w_2]` of `CP²` at the vertex `μ = (1, 0)`.
    pub fn cp2_vertex() -> Self {
        Self {
            name: "cp2-vertex".to_string(),
            blocks: vec![vec![0, 1]],
            weights: vec![vec![-1, 0], vec![-1, 1]],
            offset: vec![1.0, 0.0],
            variety: Standard::Cp2,
        }
    }

    pub fn by_name(name: &str) -> Result<Self, FlowError> {
        match name {
            "cp1" => Ok(Self::cp1()),
            "cp2" => Ok(Self::cp2()),
            "cp1xcp1" => Ok(Self::cp1xcp1()),
            "cp2-vertex" => Ok(Self::cp2_vertex()),
            other => Err(FlowError::UnknownChart(other.to_string())),
        }
    }

    pub const NAMES: [&'static str; 4] = ["cp1", "cp2", "cp1xcp1", "cp2-vertex"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Columns `λ^{(j)}`.
    pub fn weight_matrix(&self) -> DMatrix<i64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| self.weights[j][i])
    }

    pub fn weight(&self, j: usize) -> &[i64] {
        &self.weights[j]
    }

    /// `μ(p)`.
    pub fn moment_offset(&self) -> &[f64] {
        &self.offset
    }

    /// The moment polytope of the compact variety this chart sits in.
    pub fn polytope(&self) -> DelzantPolytope {
        self.variety.polytope().expect("catalog polytopes are valid")
    }

    pub fn check_point(&self, z: &[Complex64]) -> Result<(), FlowError> {
        if z.len() != self.dim() {
            return Err(FlowError::DimensionMismatch {
                what: "point",
                got: z.len(),
                expected: self.dim(),
            });
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::NotInChart);
        }
        Ok(())
    }

    /// `1 + S_{b(j)}` for every coordinate `j`.
    fn block_denominators(&self, z: &[Complex64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for block in &self.blocks {
            let s = 1.0 + block.iter().map(|&j| z[j].norm_sqr()).sum::<f64>();
            for &j in block {
                out[j] = s;
            }
        }
        out
    }

    pub fn kahler_potential(&self, z: &[Complex64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| (1.0 + b.iter().map(|&j| z[j].norm_sqr()).sum::<f64>()).ln())
            .sum()
    }

    /// `∂K/∂z_j`.
    pub fn dk_dz(&self, z: &[Complex64]) -> Vec<Complex64> {
        let den = self.block_denominators(z);
        z.iter().zip(&den).map(|(zj, s)| zj.conj() / s).collect()
    }

    pub fn moment_map(&self, z: &[Complex64]) -> Vec<f64> {
        let den = self.block_denominators(z);
        let mut mu = self.offset.clone();
        for (j, lambda) in self.weights.iter().enumerate() {
            let rho = z[j].norm_sqr() / den[j];
            for (m, &l) in mu.iter_mut().zip(lambda) {
                *m += rho * l as f64;
            }
        }
        mu
    }

    /// `∂μ_i/∂(x_l, y_l)` as a `d × 2d` matrix.
    pub fn moment_gradient(&self, z: &[Complex64]) -> DMatrix<f64> {
        let d = self.dim();
        let den = self.block_denominators(z);
        // drho[j][a] = ∂ρ_j/∂q_a with ρ_j = |z_j|²/(1+S).
        let mut drho = DMatrix::<f64>::zeros(d, 2 * d);
        for block in &self.blocks {
            for &j in block {
                let s = den[j];
                let r = z[j].norm_sqr();
                for &l in block {
                    let (x, y) = (z[l].re, z[l].im);
                    let own = if j == l { 1.0 / s } else { 0.0 };
                    drho[(j, 2 * l)] = 2.0 * x * (own - r / (s * s));
                    drho[(j, 2 * l + 1)] = 2.0 * y * (own - r / (s * s));
                }
            }
        }
        DMatrix::from_fn(d, 2 * d, |i, a| {
            (0..d).map(|j| self.weights[j][i] as f64 * drho[(j, a)]).sum()
        })
    }

    /// `H_jk = ∂²K/∂z_j∂z̄_k`.
    pub fn hessian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let d = self.dim();
        let den = self.block_denominators(z);
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for block in &self.blocks {
            for &j in block {
                let s = den[j];
                for &k in block {
                    let delta = if j == k { 1.0 / s } else { 0.0 };
                    h[(j, k)] = Complex64::new(delta, 0.0) - z[j].conj() * z[k] / (s * s);
                }
            }
        }
        h
    }

    /// `ω = i∂∂̄K` on the real basis: `ω(a, b) = -2 Im(aᵀ H b̄)`.
    pub fn omega(&self, z: &[Complex64]) -> DMatrix<f64> {
        let d = self.dim();
        let h = self.hessian(z);
        let mut om = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for j in 0..d {
            for k in 0..d {
                let hjk = h[(j, k)];
                om[(2 * j, 2 * k)] = -2.0 * hjk.im;
                om[(2 * j, 2 * k + 1)] = 2.0 * hjk.re;
                om[(2 * j + 1, 2 * k)] = -2.0 * hjk.re;
                om[(2 * j + 1, 2 * k + 1)] = -2.0 * hjk.im;
            }
        }
        om
    }

    /// Matrix of `I` acting on tangent vectors.
    pub fn complex_structure(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut i = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for j in 0..d {
            i[(2 * j + 1, 2 * j)] = 1.0;
            i[(2 * j, 2 * j + 1)] = -1.0;
        }
        i
    }

    /// `|μ - μ(p) - Σ_j Re(z_j ∂K/∂z_j) λ^{(j)}|_∞`.
    pub fn mommappot_residual(&self, z: &[Complex64]) -> f64 {
        let mu = self.moment_map(z);
        let dk = self.dk_dz(z);
        let mut rhs = self.offset.clone();
        for (j, lambda) in self.weights.iter().enumerate() {
            let c = (z[j] * dk[j]).re;
            for (r, &l) in rhs.iter_mut().zip(lambda) {
                *r += c * l as f64;
            }
        }
        mu.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn to_real(z: &[Complex64]) -> DVector<f64> {
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|c| [c.re, c.im]))
}

pub fn from_real(q: &[f64]) -> Vec<Complex64> {
    q.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}
