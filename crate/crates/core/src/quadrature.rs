//! Adaptive integration over the real line, graph curves, the domains above
//! and below a curve, and disks.
//!
//! The basic rule is the 7-point Gauss / 15-point Kronrod pair; the error of
//! a panel is `|K15 − G7|`. Panels from all pieces of a domain sit in one
//! global queue and the worst panel is bisected until the summed error meets
//! `max(abs_tol, rel_tol·|value|)`.
//!
//! Infinite ranges are split at `truncation_r` around a center. The far field
//! `|x − c| > R` is integrated in the inverted variable `x = c ± R·s^{-q}`
//! with `q = max(1, 1/(p − 1))` for the asserted decay `|f| ≤ A|x|^{-p}`,
//! which keeps the mapped integrand bounded at `s → 0`. Integration stops at
//! a finite outer radius and the remainder is covered by the analytic bound
//! `2A·R_far^{1−p}/(p − 1)`, with `A` estimated from samples at `R·2^k`.
//!
//! Points declared singular get a graded piece `x = x₀ ± δ·s⁴`, which turns
//! algebraic endpoint singularities such as `|x|^{-1/2}` into smooth
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CPoint, CurveSpec, Side};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const GRADE_POWER: f64 = 4.0;
const MIN_FAR_S: f64 = 1e-100;

/// Tolerances, truncation and subdivision limits shared by all integrators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Near-field half-width `R`.
    pub truncation_r: f64,
    /// Asserted decay exponent `p` of the integrand, `|f| ≤ A|t|^{-p}`.
    pub tail_exponent: f64,
    pub max_subdivisions: usize,
    /// Geometric refinement levels toward the boundary for area integrals,
    /// and radial panel count of cached disk rules.
    pub area_grid_levels: usize,
    /// Relative accuracy of distance evaluations.
    pub dist_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            truncation_r: 200.0,
            tail_exponent: 2.0,
            max_subdivisions: 200_000,
            area_grid_levels: 12,
            dist_tol: 1e-12,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::PreconditionViolated(msg));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!("tolerances must be positive (rel {}, abs {})", self.rel_tol, self.abs_tol));
        }
        if !(self.truncation_r > 0.0 && self.truncation_r.is_finite()) {
            return bad(format!("truncation_r = {} must be positive", self.truncation_r));
        }
        if !(self.tail_exponent > 1.0) {
            return bad(format!("tail_exponent = {} must exceed 1", self.tail_exponent));
        }
        if self.max_subdivisions < 1 {
            return bad("max_subdivisions must be at least 1".into());
        }
        if self.area_grid_levels < 1 {
            return bad("area_grid_levels must be at least 1".into());
        }
        if !(self.dist_tol > 0.0) {
            return bad("dist_tol must be positive".into());
        }
        Ok(())
    }

    pub fn with_tail_exponent(&self, p: f64) -> Self {
        QuadConfig {
            tail_exponent: p,
            ..self.clone()
        }
    }

    /// Tolerances multiplied by `factor` (below one tightens).
    pub fn scaled_tolerances(&self, factor: f64) -> Self {
        QuadConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }

    /// Applies one `key=value` override.
    pub fn apply_kv(&mut self, item: &str) -> Result<()> {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
        let (k, v) = (k.trim(), v.trim());
        let num = || -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("`{k}`: `{v}` is not a finite number")))
        };
        let int = || -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{k}`: `{v}` is not a nonnegative integer")))
        };
        match k {
            "rel_tol" => self.rel_tol = num()?,
            "abs_tol" => self.abs_tol = num()?,
            "truncation_r" => self.truncation_r = num()?,
            "tail_exponent" => self.tail_exponent = num()?,
            "max_subdivisions" => self.max_subdivisions = int()?,
            "area_grid_levels" => self.area_grid_levels = int()?,
            "dist_tol" => self.dist_tol = num()?,
            _ => return Err(Error::Parse(format!("unknown config key `{k}`"))),
        }
        Ok(())
    }
}

impl fmt::Display for QuadConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rel_tol={:e}\nabs_tol={:e}\ntruncation_r={}\ntail_exponent={}\nmax_subdivisions={}\narea_grid_levels={}\ndist_tol={:e}",
            self.rel_tol,
            self.abs_tol,
            self.truncation_r,
            self.tail_exponent,
            self.max_subdivisions,
            self.area_grid_levels,
            self.dist_tol
        )
    }
}

impl FromStr for QuadConfig {
    type Err = Error;

    /// Parses `key=value` lines (or comma-separated items) over the defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = QuadConfig::default();
        for item in s.split(['\n', ',']) {
            let item = item.trim();
            if item.is_empty() || item.starts_with('#') {
                continue;
            }
            cfg.apply_kv(item)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: Complex64,
    /// Quadrature error estimate plus `tail_bound`.
    pub error_estimate: f64,
    pub tail_bound: f64,
    pub evaluations: usize,
}

/// Shape of a one-dimensional integration domain and hints for refinement.
#[derive(Debug, Clone, Default)]
pub struct LineOptions {
    /// Center of the near field `[c − R, c + R]`.
    pub center: f64,
    /// Overrides `cfg.truncation_r` for this integral.
    pub half_width: Option<f64>,
    /// Integrand vanishes outside this interval; no far field is used.
    pub support: Option<(f64, f64)>,
    /// Integrate over `[lower, ∞)` instead of the whole line.
    pub lower: Option<f64>,
    /// Forced panel boundaries (kinks, jumps, peaks).
    pub breakpoints: Vec<f64>,
    /// Points with an algebraic singularity; refined by a graded map.
    pub singular_points: Vec<f64>,
    /// Overrides `cfg.tail_exponent`.
    pub decay: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Plain,
    /// `x = origin + dir·delta·s^q`, `s ∈ [0, 1]`.
    Graded { origin: f64, delta: f64, dir: f64 },
    /// `x = origin + dir·r·s^{-q}`, `s ∈ [s_min, 1]`.
    Far { origin: f64, r: f64, dir: f64, q: f64 },
}

impl Piece {
    #[inline]
    fn map(&self, s: f64) -> (f64, f64) {
        match *self {
            Piece::Plain => (s, 1.0),
            Piece::Graded { origin, delta, dir } => {
                let s3 = s * s * s;
                (origin + dir * delta * s3 * s, delta * GRADE_POWER * s3)
            }
            Piece::Far { origin, r, dir, q } => {
                let sq = s.powf(-q);
                (origin + dir * r * sq, r * q * sq / s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

#[derive(PartialEq)]
struct Queued {
    err: f64,
    idx: usize,
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

fn gauss_kronrod<F>(f: &mut F, piece: &Piece, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut eval = |s: f64| -> Result<Complex64> {
        let (x, jac) = piece.map(s);
        if jac == 0.0 || !x.is_finite() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = f(x)? * jac;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!("integrand at x = {x} is {v}")));
        }
        Ok(v)
    };
    let fc = eval(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = eval(c - dx)? + eval(c + dx)?;
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    Ok((kron, (kron - gauss).norm()))
}

struct Outcome {
    value: Complex64,
    err: f64,
    evaluations: usize,
}

fn adaptive<F>(f: &mut F, pieces: &[(Piece, f64, f64)], cfg: &QuadConfig, tail: f64) -> Result<Outcome>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut panels: Vec<Panel> = Vec::with_capacity(pieces.len() * 8);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for (idx, (piece, a, b)) in pieces.iter().enumerate() {
        if b <= a {
            continue;
        }
        let (value, err) = gauss_kronrod(f, piece, *a, *b)?;
        evaluations += 15;
        heap.push(Queued {
            err,
            idx: panels.len(),
        });
        panels.push(Panel {
            piece: idx,
            a: *a,
            b: *b,
            value,
            err,
        });
    }

    let totals = |panels: &[Panel]| {
        panels
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.err))
    };
    let (mut total, mut total_err) = totals(&panels);
    let mut frozen_err = 0.0;
    let mut subdivisions = 0usize;
    loop {
        if subdivisions % 256 == 0 {
            let t = totals(&panels);
            total = t.0;
            total_err = t.1;
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err + tail <= target {
            break;
        }
        let give_up = |total: Complex64, total_err: f64| Error::NonConvergent {
            value: total,
            error_estimate: total_err + tail,
            subdivisions,
        };
        if subdivisions >= cfg.max_subdivisions {
            let t = totals(&panels);
            return Err(give_up(t.0, t.1));
        }
        let Some(Queued { idx, .. }) = heap.pop() else {
            if total_err - frozen_err <= target * 1e-3 {
                // only unsplittable panels remain; their error is roundoff
                break;
            }
            let t = totals(&panels);
            return Err(give_up(t.0, t.1));
        };
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            frozen_err += p.err;
            continue;
        }
        let piece = pieces[p.piece].0;
        let (lv, le) = gauss_kronrod(f, &piece, p.a, mid)?;
        let (rv, re) = gauss_kronrod(f, &piece, mid, p.b)?;
        evaluations += 30;
        subdivisions += 1;
        total += lv + rv - p.value;
        total_err += le + re - p.err;
        panels[idx] = Panel {
            piece: p.piece,
            a: p.a,
            b: mid,
            value: lv,
            err: le,
        };
        heap.push(Queued { err: le, idx });
        heap.push(Queued {
            err: re,
            idx: panels.len(),
        });
        panels.push(Panel {
            piece: p.piece,
            a: mid,
            b: p.b,
            value: rv,
            err: re,
        });
    }

    // deterministic final summation, ordered along each piece
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| {
        panels[i]
            .piece
            .cmp(&panels[j].piece)
            .then(panels[i].a.total_cmp(&panels[j].a))
    });
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in order {
        value += panels[i].value;
        err += panels[i].err;
    }
    Ok(Outcome {
        value,
        err,
        evaluations,
    })
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| x.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    v
}

/// Integrates a fallible integrand over the domain described by `opts`.
pub fn try_integrate_line<F>(mut f: F, cfg: &QuadConfig, opts: &LineOptions) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    let p = opts.decay.unwrap_or(cfg.tail_exponent);
    if !(p > 1.0) {
        return Err(Error::PreconditionViolated(format!("decay exponent {p} must exceed 1")));
    }
    let r = opts.half_width.unwrap_or(cfg.truncation_r);
    let c = opts.center;
    let (lo, hi, tails): (f64, f64, Vec<(f64, f64)>) = match (opts.support, opts.lower) {
        (Some((a, b)), _) => {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::PreconditionViolated(format!("bad support [{a}, {b}]")));
            }
            (a, b, vec![])
        }
        (None, Some(a)) => (a, a + r, vec![(a, 1.0)]),
        (None, None) => (c - r, c + r, vec![(c, 1.0), (c, -1.0)]),
    };
    let singular = sorted_unique(opts.singular_points.clone());
    let mut cuts = vec![lo, hi];
    cuts.extend(opts.breakpoints.iter().copied().filter(|&x| x > lo && x < hi));
    cuts.extend(singular.iter().copied().filter(|&x| x >= lo && x <= hi));
    let cuts = sorted_unique(cuts);
    let is_singular = |x: f64| singular.iter().any(|&s| (s - x).abs() <= 1e-14 * (1.0 + x.abs()));

    let mut pieces: Vec<(Piece, f64, f64)> = Vec::new();
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= a {
            continue;
        }
        match (is_singular(a), is_singular(b)) {
            (false, false) => pieces.push((Piece::Plain, a, b)),
            (true, false) => pieces.push((
                Piece::Graded {
                    origin: a,
                    delta: b - a,
                    dir: 1.0,
                },
                0.0,
                1.0,
            )),
            (false, true) => pieces.push((
                Piece::Graded {
                    origin: b,
                    delta: b - a,
                    dir: -1.0,
                },
                0.0,
                1.0,
            )),
            (true, true) => {
                let h = 0.5 * (b - a);
                pieces.push((
                    Piece::Graded {
                        origin: a,
                        delta: h,
                        dir: 1.0,
                    },
                    0.0,
                    1.0,
                ));
                pieces.push((
                    Piece::Graded {
                        origin: b,
                        delta: h,
                        dir: -1.0,
                    },
                    0.0,
                    1.0,
                ));
            }
        }
    }

    let mut tail_bound = 0.0;
    let mut extra_evals = 0;
    if !tails.is_empty() {
        // decay constant A relative to the tail origin, from samples
        let mut a_est: f64 = 0.0;
        for &(origin, dir) in &tails {
            for k in 0..4 {
                let dist = r * f64::powi(2.0, k);
                let v = f(origin + dir * dist)?;
                extra_evals += 1;
                a_est = a_est.max(v.norm() * dist.powf(p));
            }
        }
        let a_est = 2.0 * a_est;
        let n_tails = tails.len() as f64;
        let q = (1.0 / (p - 1.0)).max(1.0);
        let target = 0.01 * cfg.abs_tol;
        let r_needed = if a_est > 0.0 {
            (n_tails * a_est / ((p - 1.0) * target)).powf(1.0 / (p - 1.0))
        } else {
            r * 1e6
        };
        let s_min = (r / r_needed.max(4.0 * r)).powf(1.0 / q).max(MIN_FAR_S);
        let r_far = r * s_min.powf(-q);
        tail_bound = n_tails * a_est * r_far.powf(1.0 - p) / (p - 1.0);
        for &(origin, dir) in &tails {
            pieces.push((Piece::Far { origin, r, dir, q }, s_min, 1.0));
        }
    }

    let out = adaptive(&mut f, &pieces, cfg, tail_bound)?;
    Ok(IntegralResult {
        value: out.value,
        error_estimate: out.err + tail_bound,
        tail_bound,
        evaluations: out.evaluations + extra_evals,
    })
}

/// `∫_ℝ f` with default options.
pub fn integrate_line<F: Fn(f64) -> Complex64>(f: F, cfg: &QuadConfig) -> Result<IntegralResult> {
    try_integrate_line(|t| Ok(f(t)), cfg, &LineOptions::default())
}

pub fn integrate_line_with<F: Fn(f64) -> Complex64>(f: F, cfg: &QuadConfig, opts: &LineOptions) -> Result<IntegralResult> {
    try_integrate_line(|t| Ok(f(t)), cfg, opts)
}

/// `∫_0^∞ f(t) dt`, graded at `t = 0` so endpoint singularities `t^{-β}`,
/// `β < 1`, are handled.
pub fn integrate_half_line<F: Fn(f64) -> Complex64>(f: F, cfg: &QuadConfig) -> Result<IntegralResult> {
    let opts = LineOptions {
        lower: Some(0.0),
        singular_points: vec![0.0],
        breakpoints: (1..=cfg.area_grid_levels).map(|k| cfg.truncation_r * f64::powi(0.5, k as i32)).collect(),
        ..Default::default()
    };
    try_integrate_line(|t| Ok(f(t)), cfg, &opts)
}

/// Measure used on a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMeasure {
    /// `dζ = (1 + i·a'(u)) du`.
    ComplexDz,
    /// `|dζ| = |1 + i·a'(u)| du`.
    ArcLength,
}

pub(crate) fn curve_line_options(c: &CurveSpec, opts: &LineOptions) -> LineOptions {
    let mut o = opts.clone();
    o.breakpoints.extend_from_slice(c.corners());
    o
}

/// Integrates a fallible integrand over the curve parametrized by `u`.
pub fn try_integrate_curve<F>(mut f: F, c: &CurveSpec, cfg: &QuadConfig, mode: CurveMeasure, opts: &LineOptions) -> Result<IntegralResult>
where
    F: FnMut(CPoint) -> Result<Complex64>,
{
    let opts = curve_line_options(c, opts);
    try_integrate_line(
        |u| {
            let z = c.eval(u);
            let t = c.tangent_ae(u);
            let jac = match mode {
                CurveMeasure::ComplexDz => t,
                CurveMeasure::ArcLength => Complex64::new(t.norm(), 0.0),
            };
            Ok(f(z)? * jac)
        },
        cfg,
        &opts,
    )
}

pub fn integrate_curve<F: Fn(CPoint) -> Complex64>(f: F, c: &CurveSpec, cfg: &QuadConfig, mode: CurveMeasure) -> Result<IntegralResult> {
    try_integrate_curve(|z| Ok(f(z)), c, cfg, mode, &LineOptions::default())
}

/// Weight multiplying an area integrand.
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a> {
    None,
    /// `|Im w|`, the measure `dμ`.
    AbsY,
    /// `d(w)` for the given curve, the measure `dν`.
    DistToCurve(&'a CurveSpec),
}

impl Weight<'_> {
    pub(crate) fn eval(&self, w: CPoint, cfg: &QuadConfig) -> Result<f64> {
        match self {
            Weight::None => Ok(1.0),
            Weight::AbsY => Ok(w.im.abs()),
            Weight::DistToCurve(c) => c.distance(w, cfg.dist_tol),
        }
    }
}

/// Upper or lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

/// Refinement hints for area integrals over `Ω±`.
#[derive(Debug, Clone, Default)]
pub struct AreaOptions {
    /// Curve parameters where the integrand peaks (projections of nearby poles).
    pub anchors: Vec<f64>,
    /// Curve parameters with an algebraic singularity of the integrand.
    pub singular_u: Vec<f64>,
}

/// Integrates `f(w)·weight(w)` over `Ω₊` or `Ω₋` of `c`, parametrized as
/// `w = ζ(u) ± i·t`, `t > 0`, with unit Jacobian.
///
/// The inner integral runs over `u`, the outer over `t`. `cfg.tail_exponent`
/// is the asserted radial decay of `f·weight` and must exceed 2.
pub fn try_integrate_domain<F>(f: F, c: &CurveSpec, side: Side, weight: Weight<'_>, cfg: &QuadConfig, opts: &AreaOptions) -> Result<IntegralResult>
where
    F: Fn(CPoint) -> Result<Complex64>,
{
    cfg.validate()?;
    let p = cfg.tail_exponent;
    if !(p > 2.0) {
        return Err(Error::PreconditionViolated(format!("area decay exponent {p} must exceed 2")));
    }
    let sigma = side.sign();
    let mut inner_cfg = cfg.scaled_tolerances(0.1);
    let outer_cfg = cfg.with_tail_exponent(p - 1.0);
    let center = opts.anchors.first().copied().unwrap_or(0.0);
    let mut inner_breaks: Vec<f64> = opts.anchors.clone();
    inner_breaks.extend_from_slice(c.corners());
    inner_breaks.extend_from_slice(&opts.singular_u);
    let mut inner_evals = 0usize;

    let outer = |t: f64| -> Result<Complex64> {
        inner_cfg.abs_tol = 0.1 * cfg.abs_tol / ((1.0 + t) * (1.0 + t));
        let inner_opts = LineOptions {
            center,
            half_width: Some(cfg.truncation_r.max(8.0 * t)),
            breakpoints: inner_breaks.clone(),
            singular_points: if t < 1e-3 { opts.singular_u.clone() } else { vec![] },
            decay: Some(p),
            ..Default::default()
        };
        let res = try_integrate_line(
            |u| {
                let w = c.eval(u) + Complex64::new(0.0, sigma * t);
                let wt = weight.eval(w, cfg)?;
                if wt == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(f(w)? * wt)
            },
            &inner_cfg,
            &inner_opts,
        )?;
        inner_evals += res.evaluations;
        Ok(res.value)
    };
    let levels = cfg.area_grid_levels as i32;
    let outer_opts = LineOptions {
        lower: Some(0.0),
        singular_points: vec![0.0],
        breakpoints: (1..=levels).map(|k| cfg.truncation_r * f64::powi(0.5, k)).collect(),
        ..Default::default()
    };
    let res = try_integrate_line(outer, &outer_cfg, &outer_opts)?;
    Ok(IntegralResult {
        error_estimate: res.error_estimate + 0.1 * (cfg.rel_tol * res.value.norm() + cfg.abs_tol),
        evaluations: res.evaluations + inner_evals,
        ..res
    })
}

pub fn integrate_domain<F: Fn(CPoint) -> Complex64>(f: F, c: &CurveSpec, side: Side, weight: Weight<'_>, cfg: &QuadConfig) -> Result<IntegralResult> {
    try_integrate_domain(|w| Ok(f(w)), c, side, weight, cfg, &AreaOptions::default())
}

/// Integral of `f·weight` over the upper or lower half-plane.
pub fn integrate_halfplane<F: Fn(CPoint) -> Complex64>(f: F, region: HalfPlane, weight: Weight<'_>, cfg: &QuadConfig) -> Result<IntegralResult> {
    let side = match region {
        HalfPlane::Upper => Side::Plus,
        HalfPlane::Lower => Side::Minus,
    };
    try_integrate_domain(|w| Ok(f(w)), &CurveSpec::line(), side, weight, cfg, &AreaOptions::default())
}

/// `∬_{D(center, radius)} f dλ` in polar coordinates about the center.
pub fn try_integrate_disk<F>(f: F, center: CPoint, radius: f64, cfg: &QuadConfig) -> Result<IntegralResult>
where
    F: Fn(CPoint) -> Result<Complex64>,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::PreconditionViolated(format!("disk radius {radius} must be positive")));
    }
    let inner_cfg = cfg.scaled_tolerances(0.1);
    let mut inner_evals = 0usize;
    let angular = LineOptions {
        support: Some((0.0, 2.0 * PI)),
        breakpoints: vec![0.5 * PI, PI, 1.5 * PI],
        ..Default::default()
    };
    let radial = LineOptions {
        support: Some((0.0, radius)),
        ..Default::default()
    };
    let res = try_integrate_line(
        |rho| {
            if rho == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let inner = try_integrate_line(|alpha| f(center + Complex64::from_polar(rho, alpha)), &inner_cfg, &angular)?;
            inner_evals += inner.evaluations;
            Ok(inner.value * rho)
        },
        cfg,
        &radial,
    )?;
    Ok(IntegralResult {
        error_estimate: res.error_estimate + 0.1 * (cfg.rel_tol * res.value.norm() + cfg.abs_tol) * radius,
        evaluations: res.evaluations + inner_evals,
        ..res
    })
}

/// A fixed product rule on a disk: composite 15-point Kronrod in the radius,
/// periodic trapezoid in the angle. Reusable across many integrands that
/// share the same disk.
#[derive(Debug, Clone)]
pub struct DiskRule {
    pub nodes: Vec<CPoint>,
    pub weights: Vec<f64>,
}

impl DiskRule {
    pub fn new(center: CPoint, radius: f64, levels: usize) -> Self {
        let levels = levels.max(1);
        let n_angle = 16 * levels;
        let mut nodes = Vec::with_capacity(levels * 15 * n_angle);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let h = radius / levels as f64;
        for panel in 0..levels {
            let c = (panel as f64 + 0.5) * h;
            let half = 0.5 * h;
            for j in 0..15 {
                let (x, w) = if j < 8 { (-XGK[j], WGK[j]) } else { (XGK[14 - j], WGK[14 - j]) };
                let rho = c + half * x;
                let wr = w * half * rho * 2.0 * PI / n_angle as f64;
                for k in 0..n_angle {
                    let alpha = 2.0 * PI * (k as f64 + 0.5) / n_angle as f64;
                    nodes.push(center + Complex64::from_polar(rho, alpha));
                    weights.push(wr);
                }
            }
        }
        DiskRule { nodes, weights }
    }
}

/// Domain for [`l2_norm`].
#[derive(Debug, Clone, Copy)]
pub enum NormDomain<'a> {
    Line,
    /// Curve with arc-length measure.
    Curve(&'a CurveSpec),
    /// Half-plane with a weight.
    HalfPlane(HalfPlane, Weight<'a>),
    /// `Ω±` of a curve with a weight.
    Domain(&'a CurveSpec, Side, Weight<'a>),
}

/// `(∫ |f|² dm)^{1/2}`. The decay exponent in `cfg` refers to `|f|²`.
pub fn l2_norm<F: Fn(CPoint) -> Complex64>(f: F, domain: NormDomain<'_>, cfg: &QuadConfig) -> Result<f64> {
    let sq = |w: CPoint| Complex64::new(f(w).norm_sqr(), 0.0);
    let res = match domain {
        NormDomain::Line => integrate_line(|t| sq(Complex64::new(t, 0.0)), cfg)?,
        NormDomain::Curve(c) => integrate_curve(sq, c, cfg, CurveMeasure::ArcLength)?,
        NormDomain::HalfPlane(h, wt) => integrate_halfplane(sq, h, wt, cfg)?,
        NormDomain::Domain(c, side, wt) => integrate_domain(sq, c, side, wt, cfg)?,
    };
    Ok(res.value.re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn line_examples_against_antiderivatives() {
        let cfg = QuadConfig::default();
        // ∫ dt/(1+t²) = [arctan]_{-∞}^{∞}
        let oracle = 2.0 * f64::atan(f64::INFINITY);
        let r = integrate_line(|t| c(1.0 / (1.0 + t * t)), &cfg).unwrap();
        assert_abs_diff_eq!(r.value.re, oracle, epsilon = 1e-8 * PI);
        assert!(r.error_estimate <= 1e-8 * PI + 1e-10);
        assert!(r.tail_bound >= 0.0);

        // ∫ dt/(1+t²)² = [t/(2(1+t²)) + arctan(t)/2] = π/2
        let anti = |t: f64| t / (2.0 * (1.0 + t * t)) + 0.5 * t.atan();
        let oracle = anti(1e300) - anti(-1e300);
        let r = integrate_line(|t| c(1.0 / (1.0 + t * t).powi(2)), &cfg).unwrap();
        assert_abs_diff_eq!(r.value.re, oracle, epsilon = 1e-9);

        let z = integrate_line(|_| c(0.0), &cfg).unwrap();
        assert_eq!(z.value, c(0.0));
    }

    #[test]
    fn half_line_beta_integrals() {
        let cfg = QuadConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-13,
            ..QuadConfig::default()
        };
        let r = integrate_half_line(|t| c(t.sqrt() / (t + 1.0).powi(2)), &cfg.with_tail_exponent(1.5)).unwrap();
        assert_abs_diff_eq!(r.value.re, PI / 2.0, epsilon = 1e-10);
        let r = integrate_half_line(|t| c(1.0 / (t.sqrt() * (t + 1.0).powf(1.5))), &cfg).unwrap();
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn curve_examples() {
        let cfg = QuadConfig::default();
        let wedge = CurveSpec::wedge(1.0).unwrap();
        let r = try_integrate_curve(
            |_| Ok(c(1.0)),
            &wedge,
            &cfg,
            CurveMeasure::ArcLength,
            &LineOptions {
                support: Some((-1.0, 1.0)),
                ..Default::default()
            },
        )
        .unwrap();
        assert_abs_diff_eq!(r.value.re, 2.0 * 2.0_f64.sqrt(), epsilon = 1e-12);

        let line = CurveSpec::line();
        let r = integrate_curve(|z| 1.0 / ((z - Complex64::i()) * (z - Complex64::i())), &line, &cfg, CurveMeasure::ComplexDz).unwrap();
        assert!(r.value.norm() < 1e-8, "{}", r.value);

        let r = integrate_curve(|_| c(0.0), &wedge, &cfg, CurveMeasure::ComplexDz).unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn dz_and_arclength_agree_on_flat_curves() {
        let cfg = QuadConfig::default();
        let line = CurveSpec::line();
        let f = |z: CPoint| c((-z.re * z.re).exp());
        let a = integrate_curve(f, &line, &cfg, CurveMeasure::ComplexDz).unwrap();
        let b = integrate_curve(f, &line, &cfg, CurveMeasure::ArcLength).unwrap();
        assert_abs_diff_eq!(a.value.re, b.value.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.value.re, PI.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn halfplane_examples() {
        let cfg = QuadConfig::default().with_tail_exponent(3.0);
        // iterated oracle: ∫₀^∞ y·π/(2(y+1)³) dy = π/4
        let r = integrate_halfplane(
            |z| c((z + Complex64::i()).norm().powi(-4)),
            HalfPlane::Upper,
            Weight::AbsY,
            &cfg,
        )
        .unwrap();
        assert_abs_diff_eq!(r.value.re, PI / 4.0, epsilon = 1e-7);
        let z = integrate_halfplane(|_| c(0.0), HalfPlane::Upper, Weight::AbsY, &cfg).unwrap();
        assert_eq!(z.value, c(0.0));
    }

    #[test]
    fn l2_norm_examples() {
        let cfg = QuadConfig::default();
        let n = l2_norm(|z| 1.0 / (1.0 + z * z), NormDomain::Line, &cfg.with_tail_exponent(4.0)).unwrap();
        assert_abs_diff_eq!(n, (PI / 2.0).sqrt(), epsilon = 1e-8);
        let n = l2_norm(
            |z| -1.0 / ((z + Complex64::i()) * (z + Complex64::i())),
            NormDomain::HalfPlane(HalfPlane::Upper, Weight::AbsY),
            &cfg.with_tail_exponent(3.0),
        )
        .unwrap();
        assert_abs_diff_eq!(n * n, PI / 4.0, epsilon = 1e-7);
        assert_eq!(l2_norm(|_| c(0.0), NormDomain::Line, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn disk_routes_agree() {
        let cfg = QuadConfig::default();
        let center = Complex64::new(0.3, 2.0);
        let f = |w: CPoint| 1.0 / ((w + Complex64::i()) * (w + Complex64::i()));
        let adaptive = try_integrate_disk(|w| Ok(f(w)), center, 0.5, &cfg).unwrap().value;
        let rule = DiskRule::new(center, 0.5, 12);
        let fixed: Complex64 = rule.nodes.iter().zip(&rule.weights).map(|(&w, &wt)| f(w) * wt).sum();
        assert!((adaptive - fixed).norm() < 1e-10, "{adaptive} vs {fixed}");
        // area of the disk
        let area: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(area, PI * 0.25, epsilon = 1e-12);
    }

    #[test]
    fn nonconvergence_is_signalled() {
        let cfg = QuadConfig {
            max_subdivisions: 3,
            ..QuadConfig::default()
        };
        let r = integrate_line(|t| c((1.0 / (t.abs() + 1e-9)).sin() / (1.0 + t * t)), &cfg);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn config_key_values() {
        let cfg: QuadConfig = "rel_tol=1e-6, truncation_r=50".parse().unwrap();
        assert_eq!(cfg.rel_tol, 1e-6);
        assert_eq!(cfg.truncation_r, 50.0);
        let round: QuadConfig = cfg.to_string().parse().unwrap();
        assert_eq!(round, cfg);
        assert!("bogus=1".parse::<QuadConfig>().is_err());
        assert!("tail_exponent=0.5".parse::<QuadConfig>().is_err());
    }
}
