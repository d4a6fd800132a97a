//! The Poisson vector field `W = 2 Im(V_{C(μ)})` on a toric chart, its flow, and
//! the brane curvature integrals built from that flow.

pub mod chart;
pub mod integrate;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use chart::{from_real, to_real, ToricKahlerChart};
use integrate::{rk4_step, unit_panels, GaussLegendre};

use crate::polytope::{DelzantPolytope, PolytopeError};
use crate::rmatrix::{RMatrix, RMatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("dimension mismatch: {what} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("point is not finite")]
    NotInChart,
    #[error("unknown chart {0:?} (known: cp1, cp2, cp1xcp1, cp2-vertex)")]
    UnknownChart(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("trajectory left the chart (|z| > {radius}) at t = {time}")]
    Escaped { time: f64, radius: f64 },
    #[error("internal convention check failed: {what} (residual {residual:e})")]
    ConventionMismatch { what: &'static str, residual: f64 },
}

type Result<T> = std::result::Result<T, FlowError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    /// Largest RK4 step; the actual step divides the time span evenly.
    pub step: f64,
    /// Gauss–Legendre nodes per unit of time.
    pub quad_points: usize,
    pub escape_radius: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            quad_points: 12,
            escape_radius: 1e3,
        }
    }
}

impl FlowConfig {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(FlowError::InvalidArgument("step must be positive and finite"));
        }
        if !(1..=256).contains(&self.quad_points) {
            return Err(FlowError::InvalidArgument("quad_points must be in 1..=256"));
        }
        if !(self.escape_radius > 0.0) {
            return Err(FlowError::InvalidArgument("escape_radius must be positive"));
        }
        Ok(())
    }
}

/// Holomorphic and real descriptions of the torus vector fields at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// `V_i` on the real basis: components `(c_j/2, -i c_j/2)` for `V_i = Σ c_j ∂_{z_j}`.
    pub v: Vec<DVector<Complex64>>,
    /// `X_i = -2 Im V_i`.
    pub x: Vec<DVector<f64>>,
    /// `IX_i = -2 Re V_i`.
    pub ix: Vec<DVector<f64>>,
}

pub fn frame(chart: &ToricKahlerChart, z: &[Complex64]) -> Result<Frame> {
    chart.check_point(z)?;
    let d = chart.dim();
    let half_i = Complex64::new(0.0, 0.5);
    let v: Vec<DVector<Complex64>> = (0..d)
        .map(|i| {
            DVector::from_iterator(
                2 * d,
                (0..d).flat_map(|j| {
                    let c = z[j] * chart.weight(j)[i] as f64;
                    [c * 0.5, -half_i * c]
                }),
            )
        })
        .collect();
    let x = v.iter().map(|vi| vi.map(|c| -2.0 * c.im)).collect();
    let ix = v.iter().map(|vi| vi.map(|c| -2.0 * c.re)).collect();
    Ok(Frame { v, x, ix })
}

fn check_dims(c: &RMatrix, chart: &ToricKahlerChart) -> Result<()> {
    if c.dim() != chart.dim() {
        return Err(FlowError::DimensionMismatch {
            what: "R-matrix",
            got: c.dim(),
            expected: chart.dim(),
        });
    }
    Ok(())
}

fn rel_gap(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / a.amax().max(1.0)
}

/// `W = 2 Im(Σ_j u_j V_j)` with `u = ι_μ C`, i.e. `u_j = Σ_i μ_i C_ij`.
///
/// Also evaluates `-Σ_ij μ_i (B_ij IX_j + A_ij X_j)` from `C = A + iB` and fails if
/// the two disagree.
pub fn w_field(c: &RMatrix, chart: &ToricKahlerChart, z: &[Complex64]) -> Result<DVector<f64>> {
    check_dims(c, chart)?;
    let f = frame(chart, z)?;
    let d = chart.dim();
    let mu = chart.moment_map(z);
    let mu_c: Vec<Complex64> = mu.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    let u = c.interior(&mu_c)?;
    let vu = (0..d).fold(DVector::<Complex64>::zeros(2 * d), |acc, j| acc + &f.v[j] * u[j]);
    let w = vu.map(|x| 2.0 * x.im);

    let parts = c.decompose();
    let mut expansion = DVector::<f64>::zeros(2 * d);
    for i in 0..d {
        for j in 0..d {
            expansion -= (&f.ix[j] * parts.b[(i, j)] + &f.x[j] * parts.a[(i, j)]) * mu[i];
        }
    }
    let gap = rel_gap(&w, &expansion);
    if gap > 1e-12 {
        return Err(FlowError::ConventionMismatch {
            what: "W from V and from the A/B expansion",
            residual: gap,
        });
    }
    Ok(w)
}

/// `W` in the form `ż_k = -i z_k Σ_i μ_i D_ik`, `D_ik = Σ_j C_ij λ_j^{(k)}`, with its Jacobian.
#[derive(Debug, Clone)]
struct Field {
    chart: ToricKahlerChart,
    d: DMatrix<Complex64>,
}

impl Field {
    fn new(c: &RMatrix, chart: &ToricKahlerChart) -> Result<Self> {
        check_dims(c, chart)?;
        let n = chart.dim();
        let d = DMatrix::from_fn(n, n, |i, k| {
            (0..n).map(|j| c.entry(i, j) * chart.weight(k)[j] as f64).sum()
        });
        Ok(Self {
            chart: chart.clone(),
            d,
        })
    }

    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn g(&self, mu: &[f64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|i| self.d[(i, k)] * mu[i]).sum()).collect()
    }

    fn rhs(&self, q: &[f64]) -> DVector<f64> {
        let z = from_real(q);
        let g = self.g(&self.chart.moment_map(&z));
        let minus_i = Complex64::new(0.0, -1.0);
        to_real(&z.iter().zip(&g).map(|(zk, gk)| minus_i * zk * gk).collect::<Vec<_>>())
    }

    fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let z = from_real(q);
        let g = self.g(&self.chart.moment_map(&z));
        let grad = self.chart.moment_gradient(&z);
        let i = Complex64::i();
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..n {
            for l in 0..n {
                let dmu = |a: usize| -> Complex64 { (0..n).map(|m| self.d[(m, k)] * grad[(m, a)]).sum() };
                let own = if k == l { g[k] } else { Complex64::new(0.0, 0.0) };
                let dx = -i * own - i * z[k] * dmu(2 * l);
                let dy = own - i * z[k] * dmu(2 * l + 1);
                jac[(2 * k, 2 * l)] = dx.re;
                jac[(2 * k + 1, 2 * l)] = dx.im;
                jac[(2 * k, 2 * l + 1)] = dy.re;
                jac[(2 * k + 1, 2 * l + 1)] = dy.im;
            }
        }
        jac
    }

    /// Right-hand side for `(q, Y)` with `Ẏ = DW(q) Y`, `Y` stored column-major after `q`.
    fn rhs_variational(&self, s: &DVector<f64>) -> DVector<f64> {
        let m = 2 * self.dim();
        let q = &s.as_slice()[..m];
        let y = DMatrix::from_column_slice(m, m, &s.as_slice()[m..]);
        let dy = self.jacobian(q) * y;
        let mut out = DVector::<f64>::zeros(m + m * m);
        out.rows_mut(0, m).copy_from(&self.rhs(q));
        out.rows_mut(m, m * m).copy_from_slice(dy.as_slice());
        out
    }

    fn eval(&self, variational: bool, s: &DVector<f64>) -> DVector<f64> {
        if variational {
            self.rhs_variational(s)
        } else {
            self.rhs(s.as_slice())
        }
    }
}

/// A sampled solution of `ż = W(z)` on a uniform grid, with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<Complex64>>,
    /// Time of the first step that left `|z| < escape_radius` (or became non-finite).
    pub escaped: Option<f64>,
    /// Endpoint difference against a run at half the step.
    pub convergence: Option<f64>,
    pub escape_radius: f64,
    step: f64,
    states: Vec<DVector<f64>>,
    field: Field,
    variational: bool,
}

impl Trajectory {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has its initial point")
    }

    pub fn endpoint(&self) -> &[Complex64] {
        self.points.last().expect("trajectory has its initial point")
    }

    fn require_complete(&self) -> Result<()> {
        match self.escaped {
            Some(time) => Err(FlowError::Escaped {
                time,
                radius: self.escape_radius,
            }),
            None => Ok(()),
        }
    }

    fn state_at(&self, tau: f64) -> Result<DVector<f64>> {
        let end = self.end_time();
        let inside = if self.step >= 0.0 {
            tau >= 0.0 && tau <= end + 1e-12
        } else {
            tau <= 0.0 && tau >= end - 1e-12
        };
        if !inside || !tau.is_finite() {
            return Err(FlowError::InvalidArgument("time outside the computed trajectory"));
        }
        if self.step == 0.0 {
            return Ok(self.states[0].clone());
        }
        let k = ((tau / self.step).floor() as usize).min(self.states.len() - 1);
        let rest = tau - self.times[k];
        if rest == 0.0 {
            return Ok(self.states[k].clone());
        }
        let f = |s: &DVector<f64>| self.field.eval(self.variational, s);
        Ok(rk4_step(&f, &self.states[k], rest))
    }

    /// `φ_τ(z0)` for any `τ` in the computed span.
    pub fn point_at(&self, tau: f64) -> Result<Vec<Complex64>> {
        let m = 2 * self.field.dim();
        Ok(from_real(&self.state_at(tau)?.as_slice()[..m]))
    }

    pub fn moment_at(&self, tau: f64) -> Result<Vec<f64>> {
        Ok(self.field.chart.moment_map(&self.point_at(tau)?))
    }

    /// `(φ_τ(z0), Dφ_τ(z0))`; only for trajectories integrated with their linearization.
    pub fn jacobian_at(&self, tau: f64) -> Result<(Vec<Complex64>, DMatrix<f64>)> {
        if !self.variational {
            return Err(FlowError::InvalidArgument("trajectory has no linearization"));
        }
        let m = 2 * self.field.dim();
        let s = self.state_at(tau)?;
        Ok((
            from_real(&s.as_slice()[..m]),
            DMatrix::from_column_slice(m, m, &s.as_slice()[m..]),
        ))
    }

    /// Largest `|z|` sup-norm along the grid.
    pub fn max_radius(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| p.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }
}

fn integrate(field: &Field, z0: &[Complex64], t: f64, cfg: &FlowConfig, variational: bool) -> Trajectory {
    let m = 2 * field.dim();
    let mut s0 = to_real(z0);
    if variational {
        let mut full = DVector::<f64>::zeros(m + m * m);
        full.rows_mut(0, m).copy_from(&s0);
        full.rows_mut(m, m * m)
            .copy_from_slice(DMatrix::<f64>::identity(m, m).as_slice());
        s0 = full;
    }
    let n = (t.abs() / cfg.step).ceil() as usize;
    let h = if n == 0 { 0.0 } else { t / n as f64 };
    let f = |s: &DVector<f64>| field.eval(variational, s);
    let mut traj = Trajectory {
        times: vec![0.0],
        points: vec![z0.to_vec()],
        escaped: None,
        convergence: None,
        escape_radius: cfg.escape_radius,
        step: h,
        states: vec![s0],
        field: field.clone(),
        variational,
    };
    for k in 1..=n {
        let next = rk4_step(&f, traj.states.last().unwrap(), h);
        let z = from_real(&next.as_slice()[..m]);
        let time = k as f64 * h;
        let bad = next.iter().any(|x| !x.is_finite()) || z.iter().any(|x| x.norm() > cfg.escape_radius);
        if bad {
            traj.escaped = Some(time);
            break;
        }
        traj.times.push(time);
        traj.points.push(z);
        traj.states.push(next);
    }
    traj
}

fn prepare(c: &RMatrix, chart: &ToricKahlerChart, z0: &[Complex64], cfg: &FlowConfig) -> Result<Field> {
    cfg.validate()?;
    chart.check_point(z0)?;
    Field::new(c, chart)
}

fn check_span(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(FlowError::InvalidArgument(
            "integration time must be finite and nonnegative",
        ));
    }
    Ok(())
}

/// RK4 solution of `ż = W(z)` from `z0` up to time `t` (either sign).
///
/// Leaving the chart stops the integration and is reported through
/// [`Trajectory::escaped`]; nothing past that point is extrapolated.
pub fn flow(c: &RMatrix, chart: &ToricKahlerChart, z0: &[Complex64], t: f64, cfg: &FlowConfig) -> Result<Trajectory> {
    let field = prepare(c, chart, z0, cfg)?;
    if !t.is_finite() {
        return Err(FlowError::InvalidArgument("flow time must be finite"));
    }
    let mut traj = integrate(&field, z0, t, cfg, false);
    if traj.escaped.is_none() {
        let half = FlowConfig {
            step: cfg.step / 2.0,
            ..*cfg
        };
        let fine = integrate(&field, z0, t, &half, false);
        if fine.escaped.is_none() {
            let gap = traj
                .endpoint()
                .iter()
                .zip(fine.endpoint())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            traj.convergence = Some(gap);
        }
    }
    Ok(traj)
}

fn moment_integral_on(traj: &Trajectory, n: f64, gl: &GaussLegendre) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; traj.field.dim()];
    for (a, b) in unit_panels(n) {
        for (t, w) in gl.on(a, b) {
            for (x, m) in acc.iter_mut().zip(traj.moment_at(t)?) {
                *x += w * m;
            }
        }
    }
    Ok(acc)
}

fn r_value_on(traj: &Trajectory, c: &RMatrix, n: f64, gl: &GaussLegendre) -> Result<Complex64> {
    let d = traj.field.dim();
    let mut prefix = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in unit_panels(n) {
        for (t, w) in gl.on(a, b) {
            let mut inner = prefix.clone();
            for (s, ws) in gl.on(a, t) {
                for (x, m) in inner.iter_mut().zip(traj.moment_at(s)?) {
                    *x += ws * m;
                }
            }
            acc += c.pair_real(&traj.moment_at(t)?, &inner)? * w;
        }
        for (s, ws) in gl.on(a, b) {
            for (x, m) in prefix.iter_mut().zip(traj.moment_at(s)?) {
                *x += ws * m;
            }
        }
    }
    Ok(Complex64::i() * std::f64::consts::PI * acc)
}

/// `∫₀^n μ(φ_t z0) dt` with its node-doubling error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIntegral {
    pub value: Vec<f64>,
    pub error: f64,
}

pub fn averaged_moment(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    n: f64,
    cfg: &FlowConfig,
) -> Result<MomentIntegral> {
    let field = prepare(c, chart, z0, cfg)?;
    check_span(n)?;
    let traj = integrate(&field, z0, n, cfg, false);
    traj.require_complete()?;
    moment_integral(&traj, n, cfg.quad_points)
}

fn moment_integral(traj: &Trajectory, n: f64, q: usize) -> Result<MomentIntegral> {
    let value = moment_integral_on(traj, n, &GaussLegendre::new(q))?;
    let fine = moment_integral_on(traj, n, &GaussLegendre::new(2 * q))?;
    let error = value.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(MomentIntegral { value, error })
}

/// `R_n = iπ ∫₀^n ∫₀^t C(μ(φ_t z0), μ(φ_s z0)) ds dt` with its node-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RIntegral {
    pub value: Complex64,
    pub error: f64,
}

pub fn r_integral(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    n: f64,
    cfg: &FlowConfig,
) -> Result<RIntegral> {
    let field = prepare(c, chart, z0, cfg)?;
    check_span(n)?;
    let traj = integrate(&field, z0, n, cfg, false);
    traj.require_complete()?;
    r_on(&traj, c, n, cfg.quad_points)
}

fn r_on(traj: &Trajectory, c: &RMatrix, n: f64, q: usize) -> Result<RIntegral> {
    let value = r_value_on(traj, c, n, &GaussLegendre::new(q))?;
    let fine = r_value_on(traj, c, n, &GaussLegendre::new(2 * q))?;
    Ok(RIntegral {
        value,
        error: (value - fine).norm(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    /// `|R_{i+j}(x) - R_i(φ_j x) - R_j(x) - iπ C(A, B)|`.
    pub residual: f64,
    pub total: Complex64,
    pub shifted: Complex64,
    pub head: Complex64,
    /// `iπ C(A, B)` with `A = ∫₀^i μ(φ_{t+j} x) dt`, `B = ∫₀^j μ(φ_s x) ds`.
    pub bracket: Complex64,
    pub quad_error: f64,
}

pub fn verify_r_additivity(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    i: f64,
    j: f64,
    cfg: &FlowConfig,
) -> Result<AdditivityReport> {
    let field = prepare(c, chart, z0, cfg)?;
    check_span(i)?;
    check_span(j)?;
    let q = cfg.quad_points;
    let whole = integrate(&field, z0, i + j, cfg, false);
    whole.require_complete()?;
    let total = r_on(&whole, c, i + j, q)?;
    let head = r_on(&whole, c, j, q)?;
    let zj = whole.point_at(j)?;
    let tail = integrate(&field, &zj, i, cfg, false);
    tail.require_complete()?;
    let shifted = r_on(&tail, c, i, q)?;
    let a = moment_integral(&tail, i, q)?;
    let b = moment_integral(&whole, j, q)?;
    let bracket = Complex64::i() * std::f64::consts::PI * c.pair_real(&a.value, &b.value)?;
    Ok(AdditivityReport {
        residual: (total.value - shifted.value - head.value - bracket).norm(),
        total: total.value,
        shifted: shifted.value,
        head: head.value,
        bracket,
        quad_error: total.error.max(shifted.error).max(head.error),
    })
}

/// Worst facet slack of `∫₀^n μ(φ_t z0) dt` against `nΔ`; nonnegative when contained.
pub fn verify_polytope_image(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    n: f64,
    cfg: &FlowConfig,
    polytope: &DelzantPolytope,
) -> Result<f64> {
    if polytope.dim() != chart.dim() {
        return Err(FlowError::DimensionMismatch {
            what: "polytope",
            got: polytope.dim(),
            expected: chart.dim(),
        });
    }
    if !(n > 0.0) {
        return Err(FlowError::InvalidArgument("degree must be positive"));
    }
    let m = averaged_moment(c, chart, z0, n, cfg)?;
    Ok(polytope.worst_slack(n, &m.value)?)
}

/// `F_t = ∫₀^t φ_s^* ω ds` on the real tangent basis at `z0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    pub f: DMatrix<f64>,
    /// Node-doubling estimate, max entry.
    pub error: f64,
    /// Largest operator norm of `Dφ_s` seen on the quadrature nodes.
    pub max_jacobian_norm: f64,
    pub warnings: Vec<String>,
}

/// `‖Dφ_s‖` above which [`FMatrix`] carries a conditioning warning.
pub const JACOBIAN_WARNING: f64 = 1e6;

fn f_on(traj: &Trajectory, t: f64, gl: &GaussLegendre) -> Result<(DMatrix<f64>, f64)> {
    let m = 2 * traj.field.dim();
    let mut f = DMatrix::<f64>::zeros(m, m);
    let mut worst = 0.0f64;
    for (a, b) in unit_panels(t) {
        for (s, w) in gl.on(a, b) {
            let (z, y) = traj.jacobian_at(s)?;
            worst = worst.max(op_norm(&y));
            f += y.transpose() * traj.field.chart.omega(&z) * &y * w;
        }
    }
    Ok((f, worst))
}

pub fn f_matrix(c: &RMatrix, chart: &ToricKahlerChart, z0: &[Complex64], t: f64, cfg: &FlowConfig) -> Result<FMatrix> {
    let field = prepare(c, chart, z0, cfg)?;
    check_span(t)?;
    let traj = integrate(&field, z0, t, cfg, true);
    traj.require_complete()?;
    let (f, worst) = f_on(&traj, t, &GaussLegendre::new(cfg.quad_points))?;
    let (fine, _) = f_on(&traj, t, &GaussLegendre::new(2 * cfg.quad_points))?;
    let mut warnings = Vec::new();
    if worst > JACOBIAN_WARNING {
        warnings.push(format!(
            "flow Jacobian norm reached {worst:e}; F may be ill-conditioned"
        ));
    }
    Ok(FMatrix {
        error: (&f - fine).amax(),
        f,
        max_jacobian_norm: worst,
        warnings,
    })
}

/// `F_t(u, v)`.
pub fn f_integral(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    t: f64,
    u: &[f64],
    v: &[f64],
    cfg: &FlowConfig,
) -> Result<f64> {
    let m = 2 * chart.dim();
    for (what, x) in [("u", u), ("v", v)] {
        if x.len() != m {
            return Err(FlowError::DimensionMismatch {
                what,
                got: x.len(),
                expected: m,
            });
        }
    }
    let f = f_matrix(c, chart, z0, t, cfg)?.f;
    Ok((DVector::from_column_slice(u).transpose() * f * DVector::from_column_slice(v))[(0, 0)])
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn wedge<T: nalgebra::Scalar + num_traits::Zero + std::ops::Sub<Output = T> + std::ops::Mul<Output = T> + Copy>(
    u: &DVector<T>,
    v: &DVector<T>,
) -> DMatrix<T> {
    DMatrix::from_fn(u.len(), u.len(), |a, b| u[a] * v[b] - v[a] * u[b])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTensors {
    /// `σ_C = ½ Σ C_ij V_i ∧ V_j` on the real basis.
    pub sigma: DMatrix<Complex64>,
    /// `Q = ½ Σ (B_ij X_i∧X_j - 2A_ij IX_i∧X_j - B_ij IX_i∧IX_j)`.
    pub q: DMatrix<f64>,
}

/// Both bivectors, checked against `Q = -4 Im σ`.
pub fn poisson_tensors(c: &RMatrix, chart: &ToricKahlerChart, z: &[Complex64]) -> Result<PoissonTensors> {
    check_dims(c, chart)?;
    let f = frame(chart, z)?;
    let d = chart.dim();
    let parts = c.decompose();
    let mut sigma = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
    let mut q = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            sigma += wedge(&f.v[i], &f.v[j]) * (c.entry(i, j) * 0.5);
            let (a, b) = (parts.a[(i, j)], parts.b[(i, j)]);
            q += (wedge(&f.x[i], &f.x[j]) * b - wedge(&f.ix[i], &f.x[j]) * (2.0 * a) - wedge(&f.ix[i], &f.ix[j]) * b)
                * 0.5;
        }
    }
    let gap = (&q + sigma.map(|s| 4.0 * s.im)).amax() / q.amax().max(1.0);
    if gap > 1e-12 {
        return Err(FlowError::ConventionMismatch {
            what: "Q = -4 Im(sigma)",
            residual: gap,
        });
    }
    Ok(PoissonTensors { sigma, q })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarReport {
    /// `‖F I + Iᵀ F + F Q F‖` with `Q` at `z0`.
    pub residual: f64,
    /// `‖ω I + Iᵀ ω‖` at `z0`, the `t → 0` limit of the equation divided by `t`.
    pub reduction: f64,
    pub f_error: f64,
    pub max_jacobian_norm: f64,
    pub warnings: Vec<String>,
}

/// Tolerance of the built-in Kähler-type check `ω I + Iᵀ ω = 0`.
pub const REDUCTION_TOL: f64 = 1e-8;

pub fn verify_star_equation(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    t: f64,
    cfg: &FlowConfig,
) -> Result<StarReport> {
    let i = chart.complex_structure();
    let om = chart.omega(z0);
    let reduction = op_norm(&(&om * &i + i.transpose() * &om));
    if reduction > REDUCTION_TOL {
        return Err(FlowError::ConventionMismatch {
            what: "omega I + I^T omega = 0",
            residual: reduction,
        });
    }
    let fm = f_matrix(c, chart, z0, t, cfg)?;
    let q = poisson_tensors(c, chart, z0)?.q;
    let f = &fm.f;
    let lhs = f * &i + i.transpose() * f + f * q * f;
    Ok(StarReport {
        residual: op_norm(&lhs),
        reduction,
        f_error: fm.error,
        max_jacobian_norm: fm.max_jacobian_norm,
        warnings: fm.warnings,
    })
}

/// Central-difference Jacobian of [`w_field`] with step `h`.
fn w_jacobian_fd(c: &RMatrix, chart: &ToricKahlerChart, z: &[Complex64], h: f64) -> Result<DMatrix<f64>> {
    let m = 2 * chart.dim();
    let q = to_real(z);
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for b in 0..m {
        let (mut qp, mut qm) = (q.clone(), q.clone());
        qp[b] += h;
        qm[b] -= h;
        let col =
            (w_field(c, chart, &from_real(qp.as_slice()))? - w_field(c, chart, &from_real(qm.as_slice()))?) / (2.0 * h);
        jac.set_column(b, &col);
    }
    Ok(jac)
}

/// `‖L_W I - Q ω‖` with `L_W I = I·DW - DW·I` from central differences at `h = 1e-5`.
pub fn verify_courant_symmetry(c: &RMatrix, chart: &ToricKahlerChart, z0: &[Complex64]) -> Result<f64> {
    let dw = w_jacobian_fd(c, chart, z0, 1e-5)?;
    let i = chart.complex_structure();
    let lie = &i * &dw - &dw * &i;
    let q = poisson_tensors(c, chart, z0)?.q;
    Ok(op_norm(&(lie - q * chart.omega(z0))))
}

/// `‖Dφ_t Q(z0) Dφ_tᵀ - Q(φ_t z0)‖`: the flow of `W` preserves `Q`.
pub fn verify_q_poisson(
    c: &RMatrix,
    chart: &ToricKahlerChart,
    z0: &[Complex64],
    t: f64,
    cfg: &FlowConfig,
) -> Result<f64> {
    let field = prepare(c, chart, z0, cfg)?;
    check_span(t)?;
    let traj = integrate(&field, z0, t, cfg, true);
    traj.require_complete()?;
    let (zt, y) = traj.jacobian_at(t)?;
    let q0 = poisson_tensors(c, chart, z0)?.q;
    let qt = poisson_tensors(c, chart, &zt)?.q;
    Ok(op_norm(&(&y * q0 * y.transpose() - qt)))
}

/// `max_a ‖ι_{X_a} ω + dμ_a‖` with `dμ` from central differences; zero for a Hamiltonian action.
pub fn hamiltonian_residual(chart: &ToricKahlerChart, z: &[Complex64]) -> Result<f64> {
    let f = frame(chart, z)?;
    let om = chart.omega(z);
    let dmu = moment_differential_fd(chart, z, 1e-6);
    Ok((0..chart.dim())
        .map(|a| (om.transpose() * &f.x[a] + dmu.row(a).transpose()).amax())
        .fold(0.0, f64::max))
}

/// `max_{j,k} |X_j(μ_k)|` by central differences along `X_j`.
pub fn torus_invariance_residual(chart: &ToricKahlerChart, z: &[Complex64]) -> Result<f64> {
    let f = frame(chart, z)?;
    let h = 1e-6;
    let q = to_real(z);
    let mut worst = 0.0f64;
    for x in &f.x {
        let plus = chart.moment_map(&from_real((&q + x * h).as_slice()));
        let minus = chart.moment_map(&from_real((&q - x * h).as_slice()));
        for (p, m) in plus.iter().zip(&minus) {
            worst = worst.max(((p - m) / (2.0 * h)).abs());
        }
    }
    Ok(worst)
}

fn moment_differential_fd(chart: &ToricKahlerChart, z: &[Complex64], h: f64) -> DMatrix<f64> {
    let d = chart.dim();
    let q = to_real(z);
    let mut out = DMatrix::<f64>::zeros(d, 2 * d);
    for b in 0..2 * d {
        let (mut qp, mut qm) = (q.clone(), q.clone());
        qp[b] += h;
        qm[b] -= h;
        let (mp, mm) = (
            chart.moment_map(&from_real(qp.as_slice())),
            chart.moment_map(&from_real(qm.as_slice())),
        );
        for a in 0..d {
            out[(a, b)] = (mp[a] - mm[a]) / (2.0 * h);
        }
    }
    out
}
