//! The Cauchy transform `G(w) = (1/2πi)∫_Γ g(ζ)dζ/(ζ − w)` of boundary data,
//! its derivative, norms on shifted curves, boundary limits from both sides,
//! and the area operator `T`.
//!
//! Near the curve the Cauchy integrand is nearly singular at the foot point
//! `ζ(u*)` of `w`. There the constant `g(ζ(u*))` is subtracted on a window
//! around `u*` and its contribution is added back exactly through the
//! logarithm `log(ζ(b) − w) − log(ζ(a) − w)`, taken on a branch whose cut
//! (a vertical ray from `w` away from the curve) the graph never meets.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{split_spec, CPoint, ConeSpec, CurveSpec, Region, Side};
use crate::kernels::t_kernel;
use crate::quadrature::{curve_line_options, try_integrate_disk, try_integrate_line, DiskRule, IntegralResult, LineOptions, QuadConfig};

type BoundaryFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// Boundary data `g(ζ(u))` given as a function of the curve parameter.
#[derive(Clone)]
pub struct BoundaryFunction {
    g: Arc<BoundaryFn>,
    /// `|g(ζ(u))| ≤ A|u|^{-p}` for large `|u|`.
    pub decay_exponent: f64,
    /// `g` vanishes outside this parameter interval.
    pub support: Option<(f64, f64)>,
    /// Parameters where `g` has a kink or jump.
    pub breakpoints: Vec<f64>,
    /// Whether `g` is continuous everywhere.
    pub continuous: bool,
    pub label: String,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("label", &self.label)
            .field("decay_exponent", &self.decay_exponent)
            .field("support", &self.support)
            .finish()
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl BoundaryFunction {
    pub fn new<G>(label: &str, g: G, decay_exponent: f64) -> Self
    where
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        BoundaryFunction {
            g: Arc::new(g),
            decay_exponent,
            support: None,
            breakpoints: vec![],
            continuous: true,
            label: label.to_string(),
        }
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn with_breakpoints(mut self, pts: Vec<f64>, continuous: bool) -> Self {
        self.breakpoints = pts;
        self.continuous = continuous;
        self
    }

    /// `1/(1 + (u/c)²)`.
    pub fn rational(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::PreconditionViolated(format!("rational: c = {c} must be positive")));
        }
        Ok(Self::new(&format!("rational:c={c}"), move |u| real(1.0 / (1.0 + (u / c) * (u / c))), 2.0))
    }

    /// `exp(1 − 1/(1 − s²))` with `s = (u − center)/width`, zero for `|s| ≥ 1`.
    pub fn bump(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::PreconditionViolated(format!("bump: width = {width} must be positive")));
        }
        let g = move |u: f64| {
            let s = (u - center) / width;
            if s.abs() >= 1.0 {
                real(0.0)
            } else {
                real((1.0 - 1.0 / (1.0 - s * s)).exp())
            }
        };
        Ok(Self::new(&format!("bump:center={center},width={width}"), g, 2.0).with_support(center - width, center + width))
    }

    /// Indicator of `[a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::PreconditionViolated(format!("indicator: need a < b, got [{a}, {b}]")));
        }
        let g = move |u: f64| if u >= a && u <= b { real(1.0) } else { real(0.0) };
        Ok(Self::new(&format!("indicator:a={a},b={b}"), g, 2.0)
            .with_support(a, b)
            .with_breakpoints(vec![a, b], false))
    }

    /// `exp(−u²/(2σ²))`.
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::PreconditionViolated(format!("gaussian: sigma = {sigma} must be positive")));
        }
        Ok(Self::new(&format!("gaussian:sigma={sigma}"), move |u| real((-u * u / (2.0 * sigma * sigma)).exp()), 6.0))
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| real(0.0), 2.0).with_support(0.0, 0.0)
    }

    /// Parses `rational:c=1`, `bump:center=0,width=1` (or `bump:0,1`),
    /// `indicator:a=-1,b=1`, `gaussian:sigma=1`, or `zero`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, params) = split_spec(text)?;
        match name {
            "rational" => {
                let p = params.with_positional(&["c"])?;
                p.expect_keys(name, &["c"])?;
                Self::rational(p.get("c", 1.0)?)
            }
            "bump" => {
                let p = params.with_positional(&["center", "width"])?;
                p.expect_keys(name, &["center", "width"])?;
                Self::bump(p.get("center", 0.0)?, p.get("width", 1.0)?)
            }
            "indicator" => {
                let p = params.with_positional(&["a", "b"])?;
                p.expect_keys(name, &["a", "b"])?;
                Self::indicator(p.get("a", -1.0)?, p.get("b", 1.0)?)
            }
            "gaussian" => {
                let p = params.with_positional(&["sigma"])?;
                p.expect_keys(name, &["sigma"])?;
                Self::gaussian(p.get("sigma", 1.0)?)
            }
            "zero" => {
                params.expect_keys(name, &[])?;
                Ok(Self::zero())
            }
            other => Err(Error::Parse(format!("unknown function `{other}`"))),
        }
    }

    /// Sampled data: CSV rows `u,re,im` sorted by `u`, `#` comments allowed.
    /// Linear interpolation between samples, zero outside the sampled range.
    pub fn from_csv_str(text: &str, label: &str) -> Result<Self> {
        let mut us: Vec<f64> = Vec::new();
        let mut vs: Vec<Complex64> = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite())).collect();
            let vals = match parsed {
                Some(v) if v.len() == 3 => v,
                // a header row is tolerated before any data
                _ if us.is_empty() && !header_seen && fields.iter().all(|f| f.parse::<f64>().is_err()) => {
                    header_seen = true;
                    continue;
                }
                _ => {
                    return Err(Error::Parse(format!("line {}: expected `u,re,im` with finite numbers, got `{line}`", lineno + 1)));
                }
            };
            if let Some(&last) = us.last() {
                if vals[0] <= last {
                    return Err(Error::Parse(format!("line {}: u values must be strictly increasing", lineno + 1)));
                }
            }
            us.push(vals[0]);
            vs.push(Complex64::new(vals[1], vals[2]));
        }
        if us.len() < 2 {
            return Err(Error::Parse("need at least two samples".into()));
        }
        let (lo, hi) = (us[0], us[us.len() - 1]);
        let knots = us.clone();
        let g = move |u: f64| {
            if u < lo || u > hi {
                return real(0.0);
            }
            let j = us.partition_point(|&x| x <= u).clamp(1, us.len() - 1);
            let (x0, x1) = (us[j - 1], us[j]);
            let s = (u - x0) / (x1 - x0);
            vs[j - 1] * (1.0 - s) + vs[j] * s
        };
        Ok(Self::new(label, g, 2.0).with_support(lo, hi).with_breakpoints(knots, false))
    }

    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        (self.g)(u)
    }

    fn line_options(&self) -> LineOptions {
        LineOptions {
            support: self.support,
            breakpoints: self.breakpoints.clone(),
            ..Default::default()
        }
    }

    /// `‖g‖_{L²(Γ, |dζ|)}`.
    pub fn l2_norm(&self, c: &CurveSpec, cfg: &QuadConfig) -> Result<f64> {
        let opts = LineOptions {
            decay: Some(2.0 * self.decay_exponent),
            ..curve_line_options(c, &self.line_options())
        };
        let r = try_integrate_line(|u| Ok(real(self.eval(u).norm_sqr() * c.tangent_ae(u).norm())), cfg, &opts)?;
        Ok(r.value.re.max(0.0).sqrt())
    }
}

/// Foot points closer than this trigger singularity subtraction.
const SUBTRACT_DISTANCE: f64 = 0.5;
/// Half-width of the subtraction window in the curve parameter.
const SUBTRACT_WINDOW: f64 = 1.0;

/// `∫_a^b ζ'(u) du/(ζ(u) − w)` for `w` off the curve, on the branch cut
/// along the vertical ray from `w` away from the curve.
fn log_increment(za: CPoint, zb: CPoint, w: CPoint, region: Region) -> Complex64 {
    let rot = if region == Region::Above { Complex64::i() } else { -Complex64::i() };
    let arg = |z: CPoint| (rot * (z - w)).arg();
    Complex64::new((zb - w).norm().ln() - (za - w).norm().ln(), arg(zb) - arg(za))
}

fn kernel_integral(g: &BoundaryFunction, c: &CurveSpec, w: CPoint, order: i32, cfg: &QuadConfig) -> Result<IntegralResult> {
    ensure_finite(w, "w")?;
    let region = c.region_of(w);
    if region == Region::OnCurve {
        return Err(Error::OnCurve { w });
    }
    let near = c.nearest(w, cfg.dist_tol)?;
    let us = near.u;
    let subtract = near.distance < SUBTRACT_DISTANCE;
    let (a, b) = (us - SUBTRACT_WINDOW, us + SUBTRACT_WINDOW);
    let gs = if subtract { g.eval(us) } else { real(0.0) };
    let subtract = subtract && gs != real(0.0);

    let mut breakpoints = g.breakpoints.clone();
    breakpoints.push(us);
    let mut support = g.support;
    if subtract {
        breakpoints.extend([a, b]);
        support = support.map(|(lo, hi)| (lo.min(a), hi.max(b)));
    }
    let opts = curve_line_options(
        c,
        &LineOptions {
            center: us,
            support,
            breakpoints,
            decay: Some(g.decay_exponent + order as f64),
            ..Default::default()
        },
    );
    let res = try_integrate_line(
        |u| {
            let mut gv = g.eval(u);
            if subtract && u >= a && u <= b {
                gv -= gs;
            }
            if gv == real(0.0) {
                return Ok(gv);
            }
            let diff = c.eval(u) - w;
            let k = if order == 1 { 1.0 / diff } else { 1.0 / (diff * diff) };
            Ok(gv * c.tangent_ae(u) * k)
        },
        cfg,
        &opts,
    )?;
    let exact = if subtract {
        let (za, zb) = (c.eval(a), c.eval(b));
        if order == 1 {
            gs * log_increment(za, zb, w, region)
        } else {
            gs * (1.0 / (za - w) - 1.0 / (zb - w))
        }
    } else {
        real(0.0)
    };
    let scale = 1.0 / (2.0 * PI);
    let to_g = Complex64::new(0.0, -scale);
    Ok(IntegralResult {
        value: (res.value + exact) * to_g,
        error_estimate: res.error_estimate * scale,
        tail_bound: res.tail_bound * scale,
        evaluations: res.evaluations,
    })
}

/// `G(w) = (1/2πi)∫_Γ g(ζ)dζ/(ζ − w)` for `w` off the curve.
pub fn cauchy_transform(g: &BoundaryFunction, c: &CurveSpec, w: CPoint, cfg: &QuadConfig) -> Result<Complex64> {
    kernel_integral(g, c, w, 1, cfg).map(|r| r.value)
}

/// As [`cauchy_transform`], with the quadrature error estimate.
pub fn cauchy_transform_detailed(g: &BoundaryFunction, c: &CurveSpec, w: CPoint, cfg: &QuadConfig) -> Result<IntegralResult> {
    kernel_integral(g, c, w, 1, cfg)
}

/// `G'(w) = (1/2πi)∫_Γ g(ζ)dζ/(ζ − w)²`.
pub fn cauchy_transform_deriv(g: &BoundaryFunction, c: &CurveSpec, w: CPoint, cfg: &QuadConfig) -> Result<Complex64> {
    kernel_integral(g, c, w, 2, cfg).map(|r| r.value)
}

/// The two halves `G₁ = Cg|Ω₊` and `G₂ = Cg|Ω₋` of the transform, whose
/// boundary values satisfy `g = G₁ − G₂`.
#[derive(Debug, Clone)]
pub struct HardyPair {
    pub g: BoundaryFunction,
    pub curve: CurveSpec,
    pub cfg: QuadConfig,
}

impl HardyPair {
    pub fn new(g: BoundaryFunction, curve: CurveSpec, cfg: QuadConfig) -> Self {
        HardyPair { g, curve, cfg }
    }

    fn eval_on(&self, w: CPoint, region: Region) -> Result<Complex64> {
        match self.curve.region_of(w) {
            r if r == region => cauchy_transform(&self.g, &self.curve, w, &self.cfg),
            Region::OnCurve => Err(Error::OnCurve { w }),
            _ => Err(Error::PreconditionViolated(format!("{w} is on the wrong side of the curve"))),
        }
    }

    pub fn g1(&self, w: CPoint) -> Result<Complex64> {
        self.eval_on(w, Region::Above)
    }

    pub fn g2(&self, w: CPoint) -> Result<Complex64> {
        self.eval_on(w, Region::Below)
    }
}

/// `|∂_y F − i·∂_x F|` at `w` from 5-point central differences of step `h`;
/// zero for analytic `F` up to discretization and evaluation noise.
pub fn cauchy_riemann_residual<F>(f: F, w: CPoint, h: f64) -> Result<f64>
where
    F: Fn(CPoint) -> Result<Complex64>,
{
    let stencil = |dir: Complex64| -> Result<Complex64> {
        let p1 = f(w + dir * h)?;
        let m1 = f(w - dir * h)?;
        let p2 = f(w + dir * (2.0 * h))?;
        let m2 = f(w - dir * (2.0 * h))?;
        Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h))
    };
    let fx = stencil(real(1.0))?;
    let fy = stencil(Complex64::i())?;
    Ok((fy - Complex64::i() * fx).norm())
}

/// Multipole series of `G` about the middle of a compactly supported `g`,
/// used far from the support where it is exact to rounding.
struct Multipole {
    center: CPoint,
    radius: f64,
    moments: Vec<Complex64>,
}

impl Multipole {
    const TERMS: usize = 28;
    /// The series is used when `radius/|w − center|` is at most this.
    const RATIO: f64 = 0.25;

    fn new(g: &BoundaryFunction, c: &CurveSpec, cfg: &QuadConfig) -> Result<Option<Self>> {
        let Some((lo, hi)) = g.support else {
            return Ok(None);
        };
        if !(hi > lo) {
            return Ok(None);
        }
        let mid = 0.5 * (lo + hi);
        let center = c.eval(mid);
        let radius = (1.0 + c.lip() * c.lip()).sqrt() * 0.5 * (hi - lo);
        let opts = curve_line_options(
            c,
            &LineOptions {
                center: mid,
                support: Some((lo, hi)),
                breakpoints: g.breakpoints.clone(),
                ..Default::default()
            },
        );
        let tight = QuadConfig {
            rel_tol: 1e-13,
            ..cfg.clone()
        };
        let mut moments = Vec::with_capacity(Self::TERMS);
        for k in 0..Self::TERMS {
            let kcfg = QuadConfig {
                abs_tol: 1e-15 * radius.powi(k as i32),
                ..tight.clone()
            };
            let m = try_integrate_line(|u| Ok(g.eval(u) * (c.eval(u) - center).powi(k as i32) * c.tangent_ae(u)), &kcfg, &opts)?;
            moments.push(m.value);
        }
        Ok(Some(Multipole { center, radius, moments }))
    }

    fn eval(&self, w: CPoint) -> Option<Complex64> {
        let z = w - self.center;
        if self.radius > Self::RATIO * z.norm() {
            return None;
        }
        let inv = 1.0 / z;
        let mut pow = inv;
        let mut sum = real(0.0);
        for m in &self.moments {
            sum += m * pow;
            pow *= inv;
        }
        Some(sum * Complex64::new(0.0, 1.0 / (2.0 * PI)))
    }
}

/// `(∫_Γ |G(ζ ± iτ)|² |dζ|)^{1/2}`.
pub fn shifted_l2_norm(g: &BoundaryFunction, c: &CurveSpec, tau: f64, side: Side, cfg: &QuadConfig) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::PreconditionViolated(format!("tau = {tau} must be positive")));
    }
    let shift = Complex64::new(0.0, side.sign() * tau);
    let inner = cfg.scaled_tolerances(0.1);
    let mut breakpoints = g.breakpoints.clone();
    if let Some((lo, hi)) = g.support {
        breakpoints.extend([lo, hi]);
    }
    let opts = curve_line_options(
        c,
        &LineOptions {
            breakpoints,
            decay: Some(2.0),
            ..Default::default()
        },
    );
    let far = Multipole::new(g, c, &inner)?;
    let res = try_integrate_line(
        |u| {
            let w = c.eval(u) + shift;
            let v = match far.as_ref().and_then(|m| m.eval(w)) {
                Some(v) => v,
                None => cauchy_transform(g, c, w, &inner)?,
            };
            Ok(real(v.norm_sqr() * c.tangent_ae(u).norm()))
        },
        cfg,
        &opts,
    )?;
    Ok(res.value.re.max(0.0).sqrt())
}

/// Outcome of one row of a norm scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    NonConvergent,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::NonConvergent => "nonconvergent",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormScanRow {
    pub tau: f64,
    pub side: Side,
    /// `NaN` when the row did not converge.
    pub norm: f64,
    pub ratio: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormScan {
    pub rows: Vec<NormScanRow>,
    pub g_norm: f64,
    /// Largest ratio over the grid; a lower bound for the supremum over `τ > 0`.
    pub max_ratio: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Operator-norm bound for `g ↦ G(· ± iτ)`: 4 on a line, `196e^{4θ₀}(1 + M²)` otherwise.
pub fn norm_bound(c: &CurveSpec) -> f64 {
    if c.is_flat() {
        4.0
    } else {
        196.0 * (4.0 * c.theta0()).exp() * (1.0 + c.lip() * c.lip())
    }
}

/// `n` log-spaced values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && n >= 1 && hi.is_finite()) {
        return Err(Error::PreconditionViolated(format!("bad grid [{lo}, {hi}] x {n}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect())
}

/// Ratios `‖G(· ± iτ)‖/‖g‖` on a `τ` grid, both sides, against [`norm_bound`].
/// Rows that fail to converge are flagged and the scan continues.
pub fn norm_scan(g: &BoundaryFunction, c: &CurveSpec, taus: &[f64], cfg: &QuadConfig) -> Result<NormScan> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::PreconditionViolated("tau grid must be nonempty and positive".into()));
    }
    let g_norm = g.l2_norm(c, cfg)?;
    if !(g_norm > 0.0) {
        return Err(Error::PreconditionViolated(format!("‖g‖ = {g_norm} must be positive")));
    }
    let jobs: Vec<(f64, Side)> = taus.iter().flat_map(|&t| [(t, Side::Plus), (t, Side::Minus)]).collect();
    let rows: Vec<NormScanRow> = jobs
        .par_iter()
        .map(|&(tau, side)| match shifted_l2_norm(g, c, tau, side, cfg) {
            Ok(norm) => NormScanRow {
                tau,
                side,
                norm,
                ratio: norm / g_norm,
                status: RowStatus::Ok,
            },
            Err(_) => NormScanRow {
                tau,
                side,
                norm: f64::NAN,
                ratio: f64::NAN,
                status: RowStatus::NonConvergent,
            },
        })
        .collect();
    let max_ratio = rows.iter().filter(|r| r.status == RowStatus::Ok).map(|r| r.ratio).fold(0.0, f64::max);
    let bound = norm_bound(c);
    Ok(NormScan {
        violated: max_ratio > bound * (1.0 + 1e-6),
        rows,
        g_norm,
        max_ratio,
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlemeljOptions {
    /// First radius `r₀`; radii are `r₀·2^{-k}`.
    pub r0: f64,
    pub max_levels: usize,
    /// Agreement required between three successive extrapolated values.
    pub tol: f64,
}

impl Default for PlemeljOptions {
    fn default() -> Self {
        PlemeljOptions {
            r0: 0.25,
            max_levels: 30,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlemeljResult {
    pub g1_limit: Complex64,
    pub g2_limit: Complex64,
    pub jump: Complex64,
    pub converged: bool,
    /// Number of radii evaluated.
    pub levels: usize,
    /// Last change between successive extrapolated values.
    pub spread: f64,
}

/// Boundary values `G₁(ζ₀)`, `G₂(ζ₀)` approached along the cone bisector at
/// `ζ₀ = ζ(u₀)`, with one Richardson step `2v(r/2) − v(r)` on each radius pair.
/// `converged` is false when three successive extrapolations never agreed to
/// `opts.tol`; see [`plemelj_require`] for the erroring variant.
pub fn plemelj_decompose(g: &BoundaryFunction, c: &CurveSpec, u0: f64, cone: &ConeSpec, opts: &PlemeljOptions, cfg: &QuadConfig) -> Result<PlemeljResult> {
    c.tangent(u0)?;
    if !(opts.r0 > 0.0 && opts.tol > 0.0) {
        return Err(Error::PreconditionViolated("r0 and tol must be positive".into()));
    }
    let zeta0 = c.eval(u0);
    let dir = cone.bisector();
    let mut values: Vec<(Complex64, Complex64)> = Vec::new();
    let mut extrap: Vec<(Complex64, Complex64)> = Vec::new();
    let mut spread = f64::INFINITY;
    let mut levels = 0;
    for k in 0..=opts.max_levels {
        let z = dir * (opts.r0 * f64::powi(0.5, k as i32));
        let (up, down) = (zeta0 + z, zeta0 - z);
        if c.region_of(up) != Region::Above || c.region_of(down) != Region::Below {
            values.clear();
            extrap.clear();
            continue;
        }
        levels += 1;
        let v1 = cauchy_transform(g, c, up, cfg)?;
        let v2 = cauchy_transform(g, c, down, cfg)?;
        if let Some(&(p1, p2)) = values.last() {
            extrap.push((2.0 * v1 - p1, 2.0 * v2 - p2));
        }
        values.push((v1, v2));
        let n = extrap.len();
        if n >= 3 {
            let diff = |i: usize, j: usize| (extrap[i].0 - extrap[j].0).norm().max((extrap[i].1 - extrap[j].1).norm());
            let (d1, d2) = (diff(n - 1, n - 2), diff(n - 2, n - 3));
            spread = d1.max(d2);
            if spread < opts.tol {
                let (g1, g2) = extrap[n - 1];
                return Ok(PlemeljResult {
                    g1_limit: g1,
                    g2_limit: g2,
                    jump: g1 - g2,
                    converged: true,
                    levels,
                    spread,
                });
            }
        }
    }
    let (g1, g2) = extrap.last().copied().or(values.last().copied()).unwrap_or((Complex64::new(f64::NAN, f64::NAN), Complex64::new(f64::NAN, f64::NAN)));
    Ok(PlemeljResult {
        g1_limit: g1,
        g2_limit: g2,
        jump: g1 - g2,
        converged: false,
        levels,
        spread,
    })
}

/// [`plemelj_decompose`] that fails with `NotConverged` instead of flagging.
pub fn plemelj_require(g: &BoundaryFunction, c: &CurveSpec, u0: f64, cone: &ConeSpec, opts: &PlemeljOptions, cfg: &QuadConfig) -> Result<PlemeljResult> {
    let r = plemelj_decompose(g, c, u0, cone, opts, cfg)?;
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NotConverged {
            levels: r.levels,
            spread: r.spread,
        })
    }
}

/// Shapes of compactly supported area data for the operator `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaShape {
    /// Indicator of the disk.
    Disk,
    /// `(1 − (ρ/r)²)²` on the disk.
    Bump,
    /// `((w − c)/r)^k` on the disk.
    Moment(u32),
}

/// A function supported on a disk strictly inside `Ω₊` or `Ω₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaFunction {
    pub shape: AreaShape,
    pub center: CPoint,
    pub radius: f64,
}

impl AreaFunction {
    pub fn new(shape: AreaShape, center: CPoint, radius: f64) -> Result<Self> {
        ensure_finite(center, "center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::PreconditionViolated(format!("radius {radius} must be positive")));
        }
        Ok(AreaFunction { shape, center, radius })
    }

    pub fn eval(&self, w: CPoint) -> Complex64 {
        let rel = (w - self.center) / self.radius;
        let r2 = rel.norm_sqr();
        if r2 > 1.0 {
            return real(0.0);
        }
        match self.shape {
            AreaShape::Disk => real(1.0),
            AreaShape::Bump => real((1.0 - r2) * (1.0 - r2)),
            AreaShape::Moment(k) => rel.powu(k),
        }
    }

    /// Radius of a disk about the origin containing the support.
    pub fn support_radius(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// Checks that the support keeps a positive distance from the curve on `side`.
    pub fn check_clearance(&self, c: &CurveSpec, side: Side, cfg: &QuadConfig) -> Result<f64> {
        if c.region_of(self.center) != side.region() {
            return Err(Error::PreconditionViolated(format!("center {} is not in the {} domain", self.center, side.as_str())));
        }
        let d = c.distance(self.center, cfg.dist_tol)?;
        if d <= self.radius {
            return Err(Error::PreconditionViolated(format!("disk of radius {} at {} meets the curve (distance {d})", self.radius, self.center)));
        }
        Ok(d - self.radius)
    }

    /// `(∬ |f|²·weight dλ)^{1/2}` with `weight = |y|` or `d(w)`.
    pub fn weighted_norm(&self, weight: impl Fn(CPoint) -> Result<f64>, cfg: &QuadConfig) -> Result<f64> {
        let r = try_integrate_disk(|w| Ok(real(self.eval(w).norm_sqr() * weight(w)?)), self.center, self.radius, cfg)?;
        Ok(r.value.re.max(0.0).sqrt())
    }
}

/// `Tf(w₂) = ∬_{Ω₊} f(w₁)d(w₁)/(w₁ − w₂)² dλ(w₁)` by adaptive quadrature over
/// the support disk.
pub fn t_transform(f: &AreaFunction, c: &CurveSpec, w2: CPoint, cfg: &QuadConfig) -> Result<Complex64> {
    ensure_finite(w2, "w2")?;
    f.check_clearance(c, Side::Plus, cfg)?;
    if c.region_of(w2) == Region::Above {
        return Err(Error::PreconditionViolated(format!("w₂ = {w2} must lie on or below the curve")));
    }
    let r = try_integrate_disk(
        |w1| {
            let d1 = c.distance(w1, cfg.dist_tol)?;
            Ok(f.eval(w1) * t_kernel(w1, w2, d1)?)
        },
        f.center,
        f.radius,
        cfg,
    )?;
    Ok(r.value)
}

/// `T` with `f·d` and the quadrature weights precomputed on a fixed disk rule,
/// for evaluating `Tf` at many points.
#[derive(Debug, Clone)]
pub struct TOperator {
    nodes: Vec<CPoint>,
    coef: Vec<Complex64>,
}

impl TOperator {
    pub fn new(f: &AreaFunction, c: &CurveSpec, cfg: &QuadConfig) -> Result<Self> {
        f.check_clearance(c, Side::Plus, cfg)?;
        let rule = DiskRule::new(f.center, f.radius, cfg.area_grid_levels);
        let mut coef = Vec::with_capacity(rule.nodes.len());
        for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
            coef.push(f.eval(w) * c.distance(w, cfg.dist_tol)? * wt);
        }
        Ok(TOperator { nodes: rule.nodes, coef })
    }

    pub fn eval(&self, w2: CPoint) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w1, &cf) in self.nodes.iter().zip(&self.coef) {
            let diff = w1 - w2;
            if diff.norm() == 0.0 {
                return Err(Error::PoleHit { distance: 0.0 });
            }
            acc += cf / (diff * diff);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TNormCheck {
    /// `‖Tf‖_{L²(Γ)}`.
    pub lhs: f64,
    pub rhs_bound: f64,
    /// `‖f‖_{L²(dμ)}` on a line, `‖f‖_{L²(dν)}` otherwise.
    pub f_norm: f64,
    pub pass: bool,
}

/// `‖Tf‖_{L²(Γ)}` against `4π‖f‖_{dμ}` (line) or `56πe^{2θ₀}√(1+M²)‖f‖_{dν}`.
pub fn t_norm_check(f: &AreaFunction, c: &CurveSpec, cfg: &QuadConfig) -> Result<TNormCheck> {
    let op = TOperator::new(f, c, cfg)?;
    let opts = curve_line_options(
        c,
        &LineOptions {
            center: f.center.re,
            decay: Some(4.0),
            ..Default::default()
        },
    );
    let lhs = try_integrate_line(|u| Ok(real(op.eval(c.eval(u))?.norm_sqr() * c.tangent_ae(u).norm())), cfg, &opts)?
        .value
        .re
        .max(0.0)
        .sqrt();
    let (f_norm, rhs_bound) = if c.is_flat() {
        let n = f.weighted_norm(|w| Ok(w.im.abs()), cfg)?;
        (n, 4.0 * PI * n)
    } else {
        let n = f.weighted_norm(|w| c.distance(w, cfg.dist_tol), cfg)?;
        (n, 56.0 * PI * (2.0 * c.theta0()).exp() * (1.0 + c.lip() * c.lip()).sqrt() * n)
    };
    Ok(TNormCheck {
        lhs,
        rhs_bound,
        f_norm,
        pass: lhs <= rhs_bound * (1.0 + 1e-6),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TDecayCheck {
    pub w2: CPoint,
    pub value: f64,
    /// `2A/|w₂|` with `A = ‖f‖_{dν}(∬_E d^{-1} dλ)^{1/2}`.
    pub bound: f64,
    pub pass: bool,
}

/// Far-field decay `|Tf(w₂)| ≤ 2A/|w₂|` for `|w₂|` beyond twice the support radius.
pub fn t_decay_check(f: &AreaFunction, c: &CurveSpec, w2: CPoint, cfg: &QuadConfig) -> Result<TDecayCheck> {
    if w2.norm() <= 2.0 * f.support_radius() {
        return Err(Error::PreconditionViolated(format!("|w₂| = {} must exceed twice the support radius {}", w2.norm(), f.support_radius())));
    }
    let value = t_transform(f, c, w2, cfg)?.norm();
    let f_nu = f.weighted_norm(|w| c.distance(w, cfg.dist_tol), cfg)?;
    let inv_d = try_integrate_disk(|w| Ok(real(1.0 / c.distance(w, cfg.dist_tol)?)), f.center, f.radius, cfg)?.value.re;
    let bound = 2.0 * f_nu * inv_d.sqrt() / w2.norm();
    Ok(TDecayCheck {
        w2,
        value,
        bound,
        pass: value <= bound * (1.0 + 1e-6),
    })
}
