//! Closed-form conformal maps of the half-planes onto the domains above and
//! below a line or a wedge, the fields `V = log Φ'`, `D = e^{iV}`, and
//! numerical checks of the distortion inequalities and of the Koebe bound on
//! the boundary modulus of normalized univalent functions.
//!
//! For the wedge `a(u) = m|u|` with `θ₀ = arctan m`:
//!
//! * `Φ₊(z) = i(−iz)^α`, `α = 1 − 2θ₀/π`, maps `ℂ₊` onto the sector above;
//! * `Φ₋(z) = −i(iz)^β`, `β = 1 + 2θ₀/π`, maps `ℂ₋` onto the sector below.
//!
//! Powers use the principal branch; `−iz` (resp. `iz`) stays in the right
//! half-plane, so neither map meets its cut.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{golden_min, CPoint, CurveKind, CurveSpec, Side};
use crate::quadrature::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
enum MapKind {
    Identity,
    /// `i(−iz)^α` on `ℂ₊`.
    SectorAbove { alpha: f64 },
    /// `−i(iz)^β` on `ℂ₋`.
    SectorBelow { beta: f64 },
}

/// `Φ±` from `ℂ±` onto `Ω±` with derivatives and inverse `Ψ±`.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    kind: MapKind,
    pub curve: CurveSpec,
    pub side: Side,
}

/// Builds `Φ±` for a line or a wedge with `m ≥ 0`.
pub fn map_for_curve(c: &CurveSpec, side: Side) -> Result<ConformalMap> {
    let kind = match c.kind() {
        CurveKind::Line => MapKind::Identity,
        CurveKind::Wedge { m } if *m == 0.0 => MapKind::Identity,
        CurveKind::Wedge { m } if *m > 0.0 => {
            let t = c.theta0() * 2.0 / PI;
            match side {
                Side::Plus => MapKind::SectorAbove { alpha: 1.0 - t },
                Side::Minus => MapKind::SectorBelow { beta: 1.0 + t },
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "closed-form conformal maps exist only for `line` and `wedge` with m ≥ 0, not `{}`",
                c.label()
            )))
        }
    };
    Ok(ConformalMap {
        kind,
        curve: c.clone(),
        side,
    })
}

impl ConformalMap {
    /// Whether `z` lies in the half-plane the map is defined on.
    pub fn in_domain(&self, z: CPoint) -> bool {
        self.side.sign() * z.im > 0.0
    }

    fn check(&self, z: CPoint) -> Result<()> {
        ensure_finite(z, "z")?;
        if !self.in_domain(z) {
            return Err(Error::PreconditionViolated(format!("{z} is not in the open {} half-plane", self.side.as_str())));
        }
        Ok(())
    }

    pub(crate) fn phi_raw(&self, z: CPoint) -> CPoint {
        let i = Complex64::i();
        match self.kind {
            MapKind::Identity => z,
            MapKind::SectorAbove { alpha } => i * (-i * z).powf(alpha),
            MapKind::SectorBelow { beta } => -i * (i * z).powf(beta),
        }
    }

    pub(crate) fn phi_prime_raw(&self, z: CPoint) -> CPoint {
        let i = Complex64::i();
        match self.kind {
            MapKind::Identity => Complex64::new(1.0, 0.0),
            MapKind::SectorAbove { alpha } => alpha * (-i * z).powf(alpha - 1.0),
            MapKind::SectorBelow { beta } => beta * (i * z).powf(beta - 1.0),
        }
    }

    pub(crate) fn phi_second_raw(&self, z: CPoint) -> CPoint {
        let i = Complex64::i();
        match self.kind {
            MapKind::Identity => Complex64::new(0.0, 0.0),
            MapKind::SectorAbove { alpha } => -i * alpha * (alpha - 1.0) * (-i * z).powf(alpha - 2.0),
            MapKind::SectorBelow { beta } => i * beta * (beta - 1.0) * (i * z).powf(beta - 2.0),
        }
    }

    pub fn phi(&self, z: CPoint) -> Result<CPoint> {
        self.check(z)?;
        Ok(self.phi_raw(z))
    }

    pub fn phi_prime(&self, z: CPoint) -> Result<CPoint> {
        self.check(z)?;
        Ok(self.phi_prime_raw(z))
    }

    pub fn phi_second(&self, z: CPoint) -> Result<CPoint> {
        self.check(z)?;
        Ok(self.phi_second_raw(z))
    }

    /// Boundary values `Φ(x)` for real `x`.
    pub fn phi_boundary(&self, x: f64) -> CPoint {
        self.phi_raw(Complex64::new(x, 0.0))
    }

    /// Inverse map `Ψ` on the image domain.
    pub fn psi(&self, w: CPoint) -> Result<CPoint> {
        ensure_finite(w, "w")?;
        if self.curve.region_of(w) != self.side.region() {
            return Err(Error::PreconditionViolated(format!("{w} is not in the {} domain of the curve", self.side.as_str())));
        }
        let i = Complex64::i();
        Ok(match self.kind {
            MapKind::Identity => w,
            MapKind::SectorAbove { alpha } => i * (-i * w).powf(1.0 / alpha),
            MapKind::SectorBelow { beta } => -i * (i * w).powf(1.0 / beta),
        })
    }

    pub fn theta0(&self) -> f64 {
        self.curve.theta0()
    }
}

/// `V = log Φ'`, `D = e^{iV}` and `D' = iD·Φ''/Φ'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdFields {
    pub v: Complex64,
    pub d: Complex64,
    pub d_prime: Complex64,
}

pub fn vd_fields(m: &ConformalMap, z: CPoint) -> Result<VdFields> {
    let p1 = m.phi_prime(z)?;
    let p2 = m.phi_second_raw(z);
    let v = p1.ln();
    let d = (Complex64::i() * v).exp();
    Ok(VdFields {
        v,
        d,
        d_prime: Complex64::i() * d * p2 / p1,
    })
}

/// Largest observed value of each distortion ratio; every entry must stay
/// at or below one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistortionSummary {
    pub samples: usize,
    /// `|yΦ'| / 2d(Φ)`.
    pub lower: f64,
    /// `2d(Φ) / 4|yΦ'|`.
    pub upper: f64,
    /// `|yΦ''| / 3|Φ'|`.
    pub second: f64,
    /// `|y²Φ''| / 6d(Φ)`.
    pub second_dist: f64,
    /// `|2iyΦ''/Φ' + 2| / 4`.
    pub bieberbach: f64,
    /// `max |arg Φ'|`, to compare with `θ₀`.
    pub max_arg: f64,
    /// `max |Im Φ'| / (M·Re Φ')` for `M > 0`.
    pub slope: f64,
    /// Smallest `Re Φ'`.
    pub min_re_prime: f64,
    /// Range of `|D|`.
    pub d_min: f64,
    pub d_max: f64,
    /// Samples where a ratio exceeded `1 + tol`.
    pub violations: usize,
}

/// Relative slack allowed on each distortion inequality.
pub const DISTORTION_TOL: f64 = 1e-8;

/// Evaluates the distortion inequalities at every sample with `|y| ≥ 1e-6`
/// (others are skipped and not counted).
pub fn distortion_check(m: &ConformalMap, samples: &[CPoint], cfg: &QuadConfig) -> Result<DistortionSummary> {
    let mut s = DistortionSummary {
        min_re_prime: f64::INFINITY,
        d_min: f64::INFINITY,
        ..Default::default()
    };
    let lip = m.curve.lip();
    for &z in samples {
        if !m.in_domain(z) || z.im.abs() < 1e-6 {
            continue;
        }
        let y = z.im.abs();
        let w = m.phi(z)?;
        let p1 = m.phi_prime_raw(z);
        let p2 = m.phi_second_raw(z);
        let d = m.curve.distance(w, cfg.dist_tol)?;
        let r = [
            y * p1.norm() / (2.0 * d),
            2.0 * d / (4.0 * y * p1.norm()),
            y * p2.norm() / (3.0 * p1.norm()),
            y * y * p2.norm() / (6.0 * d),
            (Complex64::new(0.0, 2.0 * z.im) * p2 / p1 + 2.0).norm() / 4.0,
        ];
        s.lower = s.lower.max(r[0]);
        s.upper = s.upper.max(r[1]);
        s.second = s.second.max(r[2]);
        s.second_dist = s.second_dist.max(r[3]);
        s.bieberbach = s.bieberbach.max(r[4]);
        s.max_arg = s.max_arg.max(p1.arg().abs());
        if lip > 0.0 {
            s.slope = s.slope.max(p1.im.abs() / (lip * p1.re));
        }
        s.min_re_prime = s.min_re_prime.min(p1.re);
        let dm = vd_fields(m, z)?.d.norm();
        s.d_min = s.d_min.min(dm);
        s.d_max = s.d_max.max(dm);
        if r.iter().any(|&x| x > 1.0 + DISTORTION_TOL) {
            s.violations += 1;
        }
        s.samples += 1;
    }
    Ok(s)
}

/// A normalized function `f(0) = 0`, `f'(0) = 1` on the closed unit disk.
#[derive(Clone)]
pub struct UnivalentTest {
    f: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    /// Family parameter, if any.
    pub r: f64,
}

impl std::fmt::Debug for UnivalentTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnivalentTest").field("r", &self.r).finish()
    }
}

impl UnivalentTest {
    pub fn new<F: Fn(Complex64) -> Complex64 + Send + Sync + 'static>(f: F) -> Self {
        UnivalentTest { f: Arc::new(f), r: f64::NAN }
    }

    /// `f_r(z) = z/(1 − rz)²`, `0 ≤ r < 1`; the Koebe function is the limit `r → 1`.
    pub fn koebe_family(r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::PreconditionViolated(format!("r = {r} must lie in [0, 1)")));
        }
        let f = move |z: Complex64| z / ((1.0 - r * z) * (1.0 - r * z));
        Ok(UnivalentTest { f: Arc::new(f), r })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    /// `max(|f(0)|, |f'(0) − 1|)` with `f'(0)` from a central difference.
    pub fn normalization_residual(&self) -> f64 {
        let h = 1e-5;
        let d = (self.eval(Complex64::new(h, 0.0)) - self.eval(Complex64::new(-h, 0.0))) / (2.0 * h);
        self.eval(Complex64::new(0.0, 0.0)).norm().max((d - 1.0).norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoebeCheck {
    pub inf_modulus: f64,
    /// Angle of the minimizer.
    pub theta: f64,
    pub pass: bool,
}

/// Tolerance of the `[1/4, 1]` range check.
pub const KOEBE_TOL: f64 = 1e-6;

/// `inf |f(e^{iθ})|` from a grid of `n` angles refined by golden-section
/// search around the best grid point.
pub fn koebe_inf_check(t: &UnivalentTest, n: usize) -> KoebeCheck {
    let n = n.max(8);
    let modulus = |theta: f64| t.eval(Complex64::from_polar(1.0, theta)).norm();
    let step = 2.0 * PI / n as f64;
    let (mut best_theta, mut best) = (0.0, f64::INFINITY);
    for k in 0..n {
        let theta = -PI + k as f64 * step;
        let v = modulus(theta);
        if v < best {
            best = v;
            best_theta = theta;
        }
    }
    let refined = golden_min(&modulus, best_theta - step, best_theta + step, 1e-14);
    let v = modulus(refined);
    if v < best {
        best = v;
        best_theta = refined;
    }
    KoebeCheck {
        inf_modulus: best,
        theta: best_theta,
        pass: best >= 0.25 - KOEBE_TOL && best <= 1.0 + KOEBE_TOL,
    }
}
