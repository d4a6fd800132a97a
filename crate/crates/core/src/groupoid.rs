//! The Weinstein–Xu groupoid of the complex torus with its `C`-deformed
//! structure maps, in the trivialization `T*T_ℂ ≅ t*_ℂ × T_ℂ`.
//!
//! An arrow is `(α, w)` with target `e^{(i/2)C(α)} w` and source
//! `e^{-(i/2)C(α)} w`, where `C(α)` is [`RMatrix::contract`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rmatrix::{RMatrix, RMatrixError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupoidError {
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("torus coordinate {index} is zero or not finite")]
    NotInTorus { index: usize },
    #[error("pair is not composable: source and target differ by {deviation:e}")]
    NotComposable { deviation: f64 },
    #[error("trials must be positive")]
    NoTrials,
}

type Result<T> = std::result::Result<T, GroupoidError>;

#[derive(Debug, Clone, PartialEq)]
pub struct WXElement {
    alpha: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl WXElement {
    pub fn new(alpha: Vec<Complex64>, w: Vec<Complex64>) -> Result<Self> {
        if alpha.len() != w.len() {
            return Err(GroupoidError::DimensionMismatch {
                what: "alpha",
                got: alpha.len(),
                expected: w.len(),
            });
        }
        check_torus(&w)?;
        Ok(Self { alpha, w })
    }

    /// The arrow with covector `alpha` whose source is `source`.
    pub fn from_source(c: &RMatrix, alpha: Vec<Complex64>, source: &[Complex64]) -> Result<Self> {
        let w = rotate(&c.contract(&alpha)?, 0.5, source);
        Self::new(alpha, w)
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
}

fn check_torus(w: &[Complex64]) -> Result<()> {
    match w.iter().position(|x| *x == Complex64::new(0.0, 0.0) || !x.is_finite()) {
        Some(index) => Err(GroupoidError::NotInTorus { index }),
        None => Ok(()),
    }
}

fn check_dim(c: &RMatrix, what: &'static str, got: usize) -> Result<()> {
    if got != c.dim() {
        return Err(GroupoidError::DimensionMismatch {
            what,
            got,
            expected: c.dim(),
        });
    }
    Ok(())
}

/// `exp(i·k·v_j) · w_j`.
fn rotate(v: &[Complex64], k: f64, w: &[Complex64]) -> Vec<Complex64> {
    v.iter()
        .zip(w)
        .map(|(vj, wj)| (Complex64::i() * k * vj).exp() * wj)
        .collect()
}

/// Largest entrywise `|a - b| / max(1, |a|)`.
pub fn deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(1.0))
        .fold(0.0, f64::max)
}

/// `(target, source)`.
pub fn source_target(c: &RMatrix, g: &WXElement) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_dim(c, "element", g.dim())?;
    let ca = c.contract(&g.alpha)?;
    Ok((rotate(&ca, 0.5, &g.w), rotate(&ca, -0.5, &g.w)))
}

pub fn target(c: &RMatrix, g: &WXElement) -> Result<Vec<Complex64>> {
    Ok(source_target(c, g)?.0)
}

pub fn source(c: &RMatrix, g: &WXElement) -> Result<Vec<Complex64>> {
    Ok(source_target(c, g)?.1)
}

/// `g · h`, defined when `source(g) = target(h)` to within `tol`.
pub fn multiply(c: &RMatrix, g: &WXElement, h: &WXElement, tol: f64) -> Result<WXElement> {
    multiply_faulty(c, g, h, tol, 0.0)
}

/// [`multiply`] with the product covector scaled by `1 + fault`, for testing the verifier.
fn multiply_faulty(c: &RMatrix, g: &WXElement, h: &WXElement, tol: f64, fault: f64) -> Result<WXElement> {
    check_dim(c, "left factor", g.dim())?;
    check_dim(c, "right factor", h.dim())?;
    let base = target(c, h)?;
    let dev = deviation(&source(c, g)?, &base);
    if !(dev <= tol) {
        return Err(GroupoidError::NotComposable { deviation: dev });
    }
    let diff: Vec<Complex64> = g.alpha.iter().zip(&h.alpha).map(|(b, a)| b - a).collect();
    let w = rotate(&c.contract(&diff)?, 0.5, &base);
    let alpha = g
        .alpha
        .iter()
        .zip(&h.alpha)
        .map(|(b, a)| (b + a) * (1.0 + fault))
        .collect();
    WXElement::new(alpha, w)
}

pub fn identity(w: &[Complex64]) -> Result<WXElement> {
    WXElement::new(vec![Complex64::new(0.0, 0.0); w.len()], w.to_vec())
}

pub fn inverse(g: &WXElement) -> WXElement {
    WXElement {
        alpha: g.alpha.iter().map(|a| -a).collect(),
        w: g.w.clone(),
    }
}

/// `J₀(α, w) = iα`.
pub fn moment(g: &WXElement) -> Vec<Complex64> {
    g.alpha.iter().map(|a| Complex64::i() * a).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleForm {
    Theta0,
    ThetaC,
}

/// `θ₀ = exp(-iπ C(α_g, α_h))`, or `θ_C = exp(iπ C(J₀g, J₀h))`. The two coincide.
pub fn cocycle(c: &RMatrix, g: &WXElement, h: &WXElement, form: CocycleForm, tol: f64) -> Result<Complex64> {
    let dev = deviation(&source(c, g)?, &target(c, h)?);
    if !(dev <= tol) {
        return Err(GroupoidError::NotComposable { deviation: dev });
    }
    cocycle_unchecked(c, g, h, form)
}

fn cocycle_unchecked(c: &RMatrix, g: &WXElement, h: &WXElement, form: CocycleForm) -> Result<Complex64> {
    let i = Complex64::i();
    Ok(match form {
        CocycleForm::Theta0 => (-i * std::f64::consts::PI * c.pair(&g.alpha, &h.alpha)?).exp(),
        CocycleForm::ThetaC => (i * std::f64::consts::PI * c.pair(&moment(g), &moment(h))?).exp(),
    })
}

/// Point `(z, p)` of `T*ℂ^d` in a linearized toric chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartCotangentPoint {
    pub z: Vec<Complex64>,
    pub p: Vec<Complex64>,
}

impl ChartCotangentPoint {
    pub fn new(z: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        if z.len() != p.len() {
            return Err(GroupoidError::DimensionMismatch {
                what: "p",
                got: p.len(),
                expected: z.len(),
            });
        }
        Ok(Self { z, p })
    }

    /// The chart point over `w` whose moment is `J₀(α, w) = iα`, i.e. `z = w`, `z_j p_j = α_j`.
    pub fn from_wx(g: &WXElement) -> Self {
        Self {
            z: g.w.clone(),
            p: g.alpha.iter().zip(&g.w).map(|(a, w)| a / w).collect(),
        }
    }

    /// Inverse of [`from_wx`](Self::from_wx); needs every `z_j ≠ 0`.
    pub fn to_wx(&self) -> Result<WXElement> {
        check_torus(&self.z)?;
        WXElement::new(self.z.iter().zip(&self.p).map(|(z, p)| z * p).collect(), self.z.clone())
    }

    /// `(u·z, u⁻¹·p)`.
    fn act(&self, u: &[Complex64]) -> Self {
        Self {
            z: self.z.iter().zip(u).map(|(z, u)| z * u).collect(),
            p: self.p.iter().zip(u).map(|(p, u)| p / u).collect(),
        }
    }
}

/// `(i z_j p_j)_j`.
pub fn chart_moment(x: &ChartCotangentPoint) -> Vec<Complex64> {
    x.z.iter().zip(&x.p).map(|(z, p)| Complex64::i() * z * p).collect()
}

fn torus_exp(v: &[Complex64], k: f64) -> Vec<Complex64> {
    v.iter().map(|x| (k * x).exp()).collect()
}

/// `(target, source)` of a chart point: `e^{±(1/2)C J₀(x)} z`.
pub fn chart_source_target(c: &RMatrix, x: &ChartCotangentPoint) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_dim(c, "chart point", x.z.len())?;
    let cj = c.contract(&chart_moment(x))?;
    let t = x.act(&torus_exp(&cj, 0.5)).z;
    let s = x.act(&torus_exp(&cj, -0.5)).z;
    Ok((t, s))
}

/// `e^{-(1/2)CJ₀(y)} x + e^{(1/2)CJ₀(x)} y`, added in the common fibre.
pub fn chart_multiply(
    c: &RMatrix,
    x: &ChartCotangentPoint,
    y: &ChartCotangentPoint,
    tol: f64,
) -> Result<ChartCotangentPoint> {
    let (_, sx) = chart_source_target(c, x)?;
    let (ty, _) = chart_source_target(c, y)?;
    let dev = deviation(&sx, &ty);
    if !(dev <= tol) {
        return Err(GroupoidError::NotComposable { deviation: dev });
    }
    let xs = x.act(&torus_exp(&c.contract(&chart_moment(y))?, -0.5));
    let ys = y.act(&torus_exp(&c.contract(&chart_moment(x))?, 0.5));
    Ok(ChartCotangentPoint {
        p: xs.p.iter().zip(&ys.p).map(|(a, b)| a + b).collect(),
        z: ys.z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Residuals {
    pub assoc: f64,
    pub st_compat: f64,
    pub unit: f64,
    pub inverse: f64,
    pub moment: f64,
    pub cocycle: f64,
}

impl Residuals {
    fn max_with(&mut self, o: &Residuals) {
        self.assoc = self.assoc.max(o.assoc);
        self.st_compat = self.st_compat.max(o.st_compat);
        self.unit = self.unit.max(o.unit);
        self.inverse = self.inverse.max(o.inverse);
        self.moment = self.moment.max(o.moment);
        self.cocycle = self.cocycle.max(o.cocycle);
    }

    pub fn max(&self) -> f64 {
        [
            self.assoc,
            self.st_compat,
            self.unit,
            self.inverse,
            self.moment,
            self.cocycle,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Cross-checks beyond the groupoid axioms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Consistency {
    /// `|θ₀ - θ_C|` on composable pairs.
    pub theta_forms: f64,
    /// [`chart_multiply`] against [`multiply`] through [`ChartCotangentPoint::from_wx`].
    pub chart: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub trials: u64,
    pub seed: u64,
    pub residuals: Residuals,
    pub consistency: Consistency,
    pub pass: bool,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FuzzOptions {
    /// Relative perturbation of every product covector; zero for the honest product.
    pub fault: f64,
}

pub fn fuzz_verify(c: &RMatrix, trials: u64, seed: u64, tol: f64) -> Result<FuzzReport> {
    fuzz_verify_with(c, trials, seed, tol, FuzzOptions::default())
}

pub fn fuzz_verify_with(c: &RMatrix, trials: u64, seed: u64, tol: f64, opts: FuzzOptions) -> Result<FuzzReport> {
    if trials == 0 {
        return Err(GroupoidError::NoTrials);
    }
    let mut residuals = Residuals::default();
    let mut consistency = Consistency::default();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let (r, k) = fuzz_trial(c, &mut rng, opts.fault)?;
        residuals.max_with(&r);
        consistency.theta_forms = consistency.theta_forms.max(k.theta_forms);
        consistency.chart = consistency.chart.max(k.chart);
    }
    let pass = residuals.max() <= tol && consistency.theta_forms <= tol && consistency.chart <= tol;
    Ok(FuzzReport {
        trials,
        seed,
        residuals,
        consistency,
        pass,
        tol,
    })
}

fn sample_alpha(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect()
}

fn sample_torus(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|_| {
            let r: f64 = rng.random_range(0.5..=2.0);
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

fn fuzz_trial(c: &RMatrix, rng: &mut ChaCha8Rng, fault: f64) -> Result<(Residuals, Consistency)> {
    let d = c.dim();
    let loose = f64::INFINITY;
    let mul = |g: &WXElement, h: &WXElement| multiply_faulty(c, g, h, loose, fault);
    let el_dev = |a: &WXElement, b: &WXElement| deviation(&a.alpha, &b.alpha).max(deviation(&a.w, &b.w));

    // Composable chain g ← h ← k, built from the rightmost source.
    let s0 = sample_torus(rng, d);
    let k = WXElement::from_source(c, sample_alpha(rng, d), &s0)?;
    let h = WXElement::from_source(c, sample_alpha(rng, d), &target(c, &k)?)?;
    let g = WXElement::from_source(c, sample_alpha(rng, d), &target(c, &h)?)?;

    let gh = mul(&g, &h)?;
    let hk = mul(&h, &k)?;
    let (tg, sg) = source_target(c, &g)?;
    let (th, sh) = source_target(c, &h)?;
    let (tgh, sgh) = source_target(c, &gh)?;

    let mut r = Residuals {
        st_compat: deviation(&tgh, &tg).max(deviation(&sgh, &sh)).max(deviation(&sg, &th)),
        ..Residuals::default()
    };

    r.assoc = el_dev(&mul(&gh, &k)?, &mul(&g, &hk)?);

    r.unit = el_dev(&mul(&identity(&tg)?, &g)?, &g).max(el_dev(&mul(&g, &identity(&sg)?)?, &g));

    let gi = inverse(&g);
    let (tgi, sgi) = source_target(c, &gi)?;
    r.inverse = el_dev(&mul(&g, &gi)?, &identity(&tg)?)
        .max(el_dev(&mul(&gi, &g)?, &identity(&sg)?))
        .max(deviation(&sgi, &tg))
        .max(deviation(&tgi, &sg));

    let sum: Vec<Complex64> = moment(&g).iter().zip(moment(&h)).map(|(a, b)| a + b).collect();
    r.moment = deviation(&moment(&gh), &sum);

    let mut consistency = Consistency::default();
    for form in [CocycleForm::Theta0, CocycleForm::ThetaC] {
        let th = |a: &WXElement, b: &WXElement| cocycle_unchecked(c, a, b, form);
        let lhs = th(&g, &h)? * th(&gh, &k)?;
        let rhs = th(&h, &k)? * th(&g, &hk)?;
        r.cocycle = r.cocycle.max(deviation(&[lhs], &[rhs]));
    }
    for (a, b) in [(&g, &h), (&h, &k), (&gh, &k)] {
        let t0 = cocycle_unchecked(c, a, b, CocycleForm::Theta0)?;
        let tc = cocycle_unchecked(c, a, b, CocycleForm::ThetaC)?;
        consistency.theta_forms = consistency.theta_forms.max(deviation(&[t0], &[tc]));
    }

    let via_chart = chart_multiply(
        c,
        &ChartCotangentPoint::from_wx(&g),
        &ChartCotangentPoint::from_wx(&h),
        loose,
    )?;
    consistency.chart = el_dev(&via_chart.to_wx()?, &mul(&g, &h)?);

    Ok((r, consistency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn v(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| c(x, 0.0)).collect()
    }

    fn half() -> RMatrix {
        RMatrix::planar_rational(1, 2)
    }

    #[test]
    fn source_target_examples() {
        let g = WXElement::new(vec![c(0.3, -0.2), c(1.0, 0.5)], vec![c(1.0, 1.0), c(-2.0, 0.1)]).unwrap();
        let (t, s) = source_target(&RMatrix::zero(2), &g).unwrap();
        assert_eq!((t.as_slice(), s.as_slice()), (g.w(), g.w()));
        let id = identity(g.w()).unwrap();
        let (t, s) = source_target(&half(), &id).unwrap();
        assert_eq!((t.as_slice(), s.as_slice()), (g.w(), g.w()));

        let g = WXElement::new(v(&[1.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let (t, s) = source_target(&half(), &g).unwrap();
        assert!(deviation(&t, &[c(1.0, 0.0), (c(0.0, -0.25)).exp()]) < 1e-15);
        assert!(deviation(&s, &[c(1.0, 0.0), (c(0.0, 0.25)).exp()]) < 1e-15);
    }

    #[test]
    fn multiply_examples() {
        let zero = RMatrix::zero(2);
        let w = vec![c(0.7, 0.2), c(-1.1, 0.9)];
        let g = WXElement::new(v(&[0.5, -1.0]), w.clone()).unwrap();
        let h = WXElement::new(vec![c(0.0, 1.0), c(0.25, 0.0)], w.clone()).unwrap();
        let gh = multiply(&zero, &g, &h, 1e-12).unwrap();
        assert_eq!(gh.alpha(), &[c(0.5, 1.0), c(-0.75, 0.0)]);
        assert_eq!(gh.w(), w.as_slice());

        let cm = half();
        let h = WXElement::from_source(&cm, vec![c(0.2, 0.4), c(-0.6, 0.1)], &w).unwrap();
        let left = multiply(&cm, &identity(&target(&cm, &h).unwrap()).unwrap(), &h, 1e-12).unwrap();
        assert!(deviation(left.alpha(), h.alpha()) < 1e-15 && deviation(left.w(), h.w()) < 1e-15);

        let prod = multiply(&cm, &h, &inverse(&h), 1e-12).unwrap();
        let id = identity(&target(&cm, &h).unwrap()).unwrap();
        assert!(deviation(prod.alpha(), id.alpha()) < 1e-15 && deviation(prod.w(), id.w()) < 1e-14);
        let prod = multiply(&cm, &inverse(&h), &h, 1e-12).unwrap();
        assert!(deviation(prod.w(), &source(&cm, &h).unwrap()) < 1e-14);
    }

    #[test]
    fn non_composable_pairs_are_rejected() {
        let cm = half();
        let g = WXElement::new(v(&[1.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let h = WXElement::new(v(&[0.0, 1.0]), v(&[1.0, 1.0])).unwrap();
        match multiply(&cm, &g, &h, 1e-9) {
            Err(GroupoidError::NotComposable { deviation }) => assert!(deviation > 0.1),
            other => panic!("{other:?}"),
        }
        assert!(cocycle(&cm, &g, &h, CocycleForm::Theta0, 1e-9).is_err());
        assert!(WXElement::new(v(&[1.0]), v(&[0.0])).is_err());
        assert!(WXElement::new(v(&[1.0, 2.0]), v(&[1.0])).is_err());
        assert!(source_target(&cm, &WXElement::new(v(&[1.0]), v(&[1.0])).unwrap()).is_err());
    }

    #[test]
    fn inverse_and_moment_examples() {
        let w = v(&[1.5, -0.5]);
        let id = identity(&w).unwrap();
        assert_eq!(inverse(&id).alpha(), id.alpha());
        assert!(moment(&id).iter().all(|x| x.norm() == 0.0));
        let g = WXElement::new(vec![c(0.3, 0.1), c(-0.2, 0.9)], w).unwrap();
        let (t, s) = source_target(&half(), &g).unwrap();
        let (ti, si) = source_target(&half(), &inverse(&g)).unwrap();
        assert!(deviation(&si, &t) < 1e-15 && deviation(&ti, &s) < 1e-15);
        let neg: Vec<_> = moment(&g).iter().map(|x| -x).collect();
        assert_eq!(moment(&inverse(&g)), neg);
    }

    #[test]
    fn cocycle_examples() {
        let cm = half();
        let h = WXElement::from_source(&cm, v(&[0.0, 1.0]), &v(&[1.0, 1.0])).unwrap();
        let g = WXElement::from_source(&cm, v(&[1.0, 0.0]), &target(&cm, &h).unwrap()).unwrap();
        for form in [CocycleForm::Theta0, CocycleForm::ThetaC] {
            let th = cocycle(&cm, &g, &h, form, 1e-12).unwrap();
            assert!((th - c(0.0, -1.0)).norm() < 1e-15, "{form:?} {th}");
            let id = identity(&target(&cm, &h).unwrap()).unwrap();
            let g0 = WXElement::new(v(&[0.0, 0.0]), id.w().to_vec()).unwrap();
            assert_eq!(cocycle(&RMatrix::zero(2), &g0, &id, form, 1e-12).unwrap(), c(1.0, 0.0));
        }
        let h = WXElement::from_source(&cm, v(&[0.4, 0.7]), &v(&[1.0, 1.0])).unwrap();
        let g = WXElement::from_source(&cm, v(&[0.4, 0.7]), &target(&cm, &h).unwrap()).unwrap();
        assert!((cocycle(&cm, &g, &h, CocycleForm::Theta0, 1e-12).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn chart_examples() {
        let x = ChartCotangentPoint::new(v(&[1.0, 1.0]), v(&[2.0, 0.0])).unwrap();
        assert_eq!(chart_moment(&x), vec![c(0.0, 2.0), c(0.0, 0.0)]);
        let zero_p = ChartCotangentPoint::new(v(&[0.3, -2.0]), v(&[0.0, 0.0])).unwrap();
        assert!(chart_moment(&zero_p).iter().all(|m| m.norm() == 0.0));
        let u = [c(0.5, 1.0), c(-2.0, 0.3)];
        let moved = x.act(&u);
        assert!(deviation(&chart_moment(&moved), &chart_moment(&x)) < 1e-15);

        let zero = RMatrix::zero(2);
        let y = ChartCotangentPoint::new(v(&[1.0, 1.0]), v(&[-1.0, 3.0])).unwrap();
        let xy = chart_multiply(&zero, &x, &y, 1e-12).unwrap();
        assert_eq!(xy.p, v(&[1.0, 3.0]));
        assert_eq!(xy.z, x.z);

        let cm = RMatrix::with_entry(2, 0, 1, c(0.5, 0.3)).unwrap();
        let x = ChartCotangentPoint::new(vec![c(0.7, 0.1), c(1.2, -0.4)], vec![c(0.3, 0.2), c(-0.5, 0.6)]).unwrap();
        let (_, sx) = chart_source_target(&cm, &x).unwrap();
        let unit = ChartCotangentPoint::new(sx, v(&[0.0, 0.0])).unwrap();
        let back = chart_multiply(&cm, &x, &unit, 1e-12).unwrap();
        assert!(deviation(&back.z, &x.z) < 1e-14 && deviation(&back.p, &x.p) < 1e-14);
    }

    #[test]
    fn fuzz_examples() {
        let r = fuzz_verify(&RMatrix::zero(2), 200, 7, 1e-14).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.residuals.max() < 1e-14);
        let r = fuzz_verify(&half(), 2000, 11, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        let bad = fuzz_verify_with(&half(), 50, 11, 1e-9, FuzzOptions { fault: 1e-3 }).unwrap();
        assert!(!bad.pass);
        assert!(bad.residuals.assoc > 1e-9);
        assert!(fuzz_verify(&half(), 0, 1, 1e-9).is_err());
    }

    #[test]
    fn fuzz_is_deterministic() {
        let cm = RMatrix::with_entry(3, 0, 2, c(0.4, -0.3)).unwrap();
        assert_eq!(
            fuzz_verify(&cm, 100, 5, 1e-9).unwrap(),
            fuzz_verify(&cm, 100, 5, 1e-9).unwrap()
        );
    }

    proptest! {
        #[test]
        fn structure_maps_hold_for_complex_c(
            re in -1.0f64..1.0, im in -0.5f64..0.5,
            a in prop::collection::vec(-1.0f64..1.0, 4),
            b in prop::collection::vec(-1.0f64..1.0, 4),
        ) {
            let cm = RMatrix::with_entry(2, 0, 1, c(re, im)).unwrap();
            let h = WXElement::from_source(&cm, vec![c(a[0], a[1]), c(a[2], a[3])], &[c(0.8, 0.3), c(-1.0, 1.0)]).unwrap();
            let g = WXElement::from_source(&cm, vec![c(b[0], b[1]), c(b[2], b[3])], &target(&cm, &h).unwrap()).unwrap();
            let gh = multiply(&cm, &g, &h, 1e-12).unwrap();
            prop_assert!(deviation(&target(&cm, &gh).unwrap(), &target(&cm, &g).unwrap()) < 1e-12);
            prop_assert!(deviation(&source(&cm, &gh).unwrap(), &source(&cm, &h).unwrap()) < 1e-12);
            let t0 = cocycle(&cm, &g, &h, CocycleForm::Theta0, 1e-12).unwrap();
            let tc = cocycle(&cm, &g, &h, CocycleForm::ThetaC, 1e-12).unwrap();
            prop_assert!((t0 - tc).norm() < 1e-13);
        }
    }
}
