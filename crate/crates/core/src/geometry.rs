//! Lipschitz graph curves `ζ(u) = u + i·a(u)`, the two domains above and
//! below them, the distance function `d(w)` and non-tangential cones.
//!
//! Curves come from a small registry (`line`, `wedge`, `sine`, `ramp`) or
//! from user callables via [`CurveSpec::custom`], which checks the Lipschitz
//! bound on a dense grid before accepting the curve.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// A point of the complex plane. Operations reject non-finite components.
pub type CPoint = Complex64;

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Height function and derivative supplied by the caller.
pub struct CustomCurve {
    a: Box<RealFn>,
    a_prime: Box<RealFn>,
    corners: Vec<f64>,
    feature_scale: f64,
}

#[derive(Clone)]
pub enum CurveKind {
    /// `a ≡ 0`.
    Line,
    /// `a(u) = m|u|`, corner at `u = 0`.
    Wedge { m: f64 },
    /// `a(u) = amp·sin(freq·u)`.
    Sine { amp: f64, freq: f64 },
    /// `a(u) = m·width·tanh(u/width)`, a smooth ramp with `sup |a'| = m`.
    Ramp { m: f64, width: f64 },
    Custom(Arc<CustomCurve>),
}

/// A Lipschitz graph curve with its constant `M = ‖a'‖∞` and `θ₀ = arctan M`.
#[derive(Clone)]
pub struct CurveSpec {
    kind: CurveKind,
    lip: f64,
    theta0: f64,
    label: String,
}

impl fmt::Debug for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveSpec")
            .field("label", &self.label)
            .field("lip", &self.lip)
            .field("theta0", &self.theta0)
            .finish()
    }
}

/// Which side of the curve a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Above,
    Below,
    OnCurve,
}

/// The two domains `Ω₊` (above the curve) and `Ω₋` (below).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` above, `-1` below.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn region(self) -> Region {
        match self {
            Side::Plus => Region::Above,
            Side::Minus => Region::Below,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

/// Closest point of the curve to some `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub distance: f64,
    /// Parameter of the foot point `ζ(u)`.
    pub u: f64,
}

impl CurveSpec {
    pub fn line() -> Self {
        CurveSpec {
            kind: CurveKind::Line,
            lip: 0.0,
            theta0: 0.0,
            label: "line".into(),
        }
    }

    pub fn wedge(m: f64) -> Result<Self> {
        check_param("wedge", "m", m)?;
        Ok(Self::from_kind(CurveKind::Wedge { m }, m.abs(), format!("wedge:m={m}")))
    }

    pub fn sine(amp: f64, freq: f64) -> Result<Self> {
        check_param("sine", "amp", amp)?;
        check_param("sine", "freq", freq)?;
        if freq == 0.0 {
            return Err(Error::Parse("sine: freq must be nonzero".into()));
        }
        Ok(Self::from_kind(
            CurveKind::Sine { amp, freq },
            (amp * freq).abs(),
            format!("sine:amp={amp},freq={freq}"),
        ))
    }

    pub fn ramp(m: f64, width: f64) -> Result<Self> {
        check_param("ramp", "m", m)?;
        check_param("ramp", "width", width)?;
        if width <= 0.0 {
            return Err(Error::Parse("ramp: width must be positive".into()));
        }
        Ok(Self::from_kind(
            CurveKind::Ramp { m, width },
            m.abs(),
            format!("ramp:m={m},width={width}"),
        ))
    }

    /// Builds a curve from caller-supplied `a` and `a'`.
    ///
    /// `corners` lists parameters where `a'` does not exist. The Lipschitz
    /// bound `lip` is checked on a dense grid over `[-100, 100]`.
    pub fn custom<A, AP>(label: &str, a: A, a_prime: AP, lip: f64, corners: Vec<f64>) -> Result<Self>
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        AP: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lip.is_finite() && lip >= 0.0) {
            return Err(Error::PreconditionViolated(format!("lip constant {lip} must be finite and nonnegative")));
        }
        let slack = 1e-12;
        let n = 20_000;
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=n {
            let u = -100.0 + 200.0 * k as f64 / n as f64;
            let au = a(u);
            if !au.is_finite() {
                return Err(Error::NonFinite(format!("a({u}) = {au}")));
            }
            if !corners.iter().any(|&c| (c - u).abs() < 1e-9) {
                let d = a_prime(u);
                if d.abs() > lip * (1.0 + slack) + slack {
                    return Err(Error::PreconditionViolated(format!(
                        "|a'({u})| = {} exceeds M = {lip}",
                        d.abs()
                    )));
                }
            }
            if let Some((pu, pa)) = prev {
                if (au - pa).abs() > lip * (u - pu).abs() + slack {
                    return Err(Error::PreconditionViolated(format!(
                        "Lipschitz bound fails between u = {pu} and u = {u}"
                    )));
                }
            }
            prev = Some((u, au));
        }
        let custom = CustomCurve {
            a: Box::new(a),
            a_prime: Box::new(a_prime),
            corners,
            feature_scale: 1.0,
        };
        Ok(Self::from_kind(CurveKind::Custom(Arc::new(custom)), lip, label.to_string()))
    }

    fn from_kind(kind: CurveKind, lip: f64, label: String) -> Self {
        CurveSpec {
            kind,
            lip,
            theta0: lip.atan(),
            label,
        }
    }

    /// Parses a registry entry such as `wedge:m=0.5` or `sine:amp=0.5,freq=2`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, params) = split_spec(text)?;
        match name {
            "line" => {
                params.expect_keys("line", &[])?;
                Ok(Self::line())
            }
            "wedge" => {
                params.expect_keys("wedge", &["m"])?;
                Self::wedge(params.get("m", 1.0)?)
            }
            "sine" => {
                params.expect_keys("sine", &["amp", "freq"])?;
                Self::sine(params.get("amp", 0.5)?, params.get("freq", 1.0)?)
            }
            "ramp" => {
                params.expect_keys("ramp", &["m", "width"])?;
                Self::ramp(params.get("m", 1.0)?, params.get("width", 1.0)?)
            }
            other => Err(Error::Parse(format!("unknown curve `{other}`"))),
        }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Lipschitz constant `M`.
    pub fn lip(&self) -> f64 {
        self.lip
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn is_flat(&self) -> bool {
        self.lip == 0.0
    }

    pub fn a(&self, u: f64) -> f64 {
        match &self.kind {
            CurveKind::Line => 0.0,
            CurveKind::Wedge { m } => m * u.abs(),
            CurveKind::Sine { amp, freq } => amp * (freq * u).sin(),
            CurveKind::Ramp { m, width } => m * width * (u / width).tanh(),
            CurveKind::Custom(c) => (c.a)(u),
        }
    }

    /// `a'(u)`, or `None` at a corner.
    pub fn a_prime(&self, u: f64) -> Option<f64> {
        if self.corners().contains(&u) {
            return None;
        }
        Some(self.a_prime_ae(u))
    }

    /// `a'(u)` away from corners; at a corner returns the right derivative.
    /// Only meant for integrands, where corners have measure zero.
    pub(crate) fn a_prime_ae(&self, u: f64) -> f64 {
        match &self.kind {
            CurveKind::Line => 0.0,
            CurveKind::Wedge { m } => {
                if u < 0.0 {
                    -m
                } else {
                    *m
                }
            }
            CurveKind::Sine { amp, freq } => amp * freq * (freq * u).cos(),
            CurveKind::Ramp { m, width } => {
                let s = 1.0 / (u / width).cosh();
                m * s * s
            }
            CurveKind::Custom(c) => (c.a_prime)(u),
        }
    }

    /// Parameters where `a'` does not exist.
    pub fn corners(&self) -> &[f64] {
        match &self.kind {
            CurveKind::Wedge { .. } => &[0.0],
            CurveKind::Custom(c) => &c.corners,
            _ => &[],
        }
    }

    fn feature_scale(&self) -> f64 {
        match &self.kind {
            CurveKind::Sine { freq, .. } => 1.0 / freq.abs(),
            CurveKind::Ramp { width, .. } => *width,
            CurveKind::Custom(c) => c.feature_scale,
            _ => 1.0,
        }
    }

    /// `ζ(u) = u + i·a(u)`.
    pub fn eval(&self, u: f64) -> CPoint {
        Complex64::new(u, self.a(u))
    }

    /// `ζ'(u) = 1 + i·a'(u)`; fails at corners.
    pub fn tangent(&self, u: f64) -> Result<CPoint> {
        self.a_prime(u)
            .map(|d| Complex64::new(1.0, d))
            .ok_or(Error::TangentUndefined { u })
    }

    pub(crate) fn tangent_ae(&self, u: f64) -> CPoint {
        Complex64::new(1.0, self.a_prime_ae(u))
    }

    pub fn region_of(&self, w: CPoint) -> Region {
        let diff = w.im - self.a(w.re);
        let tol = 1e-12 * (1.0 + w.norm());
        if diff.abs() <= tol {
            Region::OnCurve
        } else if diff > 0.0 {
            Region::Above
        } else {
            Region::Below
        }
    }

    /// `d(w) = inf |w − ζ|` to relative accuracy `dist_tol`.
    pub fn distance(&self, w: CPoint, dist_tol: f64) -> Result<f64> {
        Ok(self.nearest(w, dist_tol)?.distance)
    }

    /// Distance to the curve together with the foot-point parameter.
    ///
    /// Line and wedge use the exact point-to-ray formula. Other curves scan
    /// the window `|u − Re w| ≤ 2|Im w − a(Re w)| + 1` (no closer point can
    /// lie outside it) and refine candidate minima by golden section.
    pub fn nearest(&self, w: CPoint, dist_tol: f64) -> Result<Nearest> {
        ensure_finite(w, "w")?;
        match &self.kind {
            CurveKind::Line => Ok(Nearest {
                distance: w.im.abs(),
                u: w.re,
            }),
            CurveKind::Wedge { m } => Ok(wedge_nearest(*m, w)),
            _ => Ok(self.scan_nearest(w, dist_tol)),
        }
    }

    /// Global `(inf a, sup a)` when it is finite and known in closed form.
    fn height_range(&self) -> Option<(f64, f64)> {
        match &self.kind {
            CurveKind::Line => Some((0.0, 0.0)),
            CurveKind::Sine { amp, .. } => Some((-amp.abs(), amp.abs())),
            CurveKind::Ramp { m, width } => Some((-(m * width).abs(), (m * width).abs())),
            _ => None,
        }
    }

    fn scan_nearest(&self, w: CPoint, dist_tol: f64) -> Nearest {
        let x = w.re;
        let h = (w.im - self.a(x)).abs();
        if h == 0.0 {
            return Nearest { distance: 0.0, u: x };
        }
        // |u* − x| ≤ d ≤ h, and with a ∈ [lo, hi] the vertical gap of any
        // candidate is at least the gap to that band
        let mut half = h;
        if let Some((lo, hi)) = self.height_range() {
            let gap = (w.im - hi).max(lo - w.im).max(0.0);
            half = (h * h - gap * gap).max(0.0).sqrt();
        }
        half = half * (1.0 + 1e-12) + 1e-12;
        let step_target = self.feature_scale() / 5.0;
        let n = ((2.0 * half / step_target).ceil() as usize).clamp(64, 65_536);
        let step = 2.0 * half / n as f64;
        let rho2 = |u: f64| {
            let d = w - self.eval(u);
            d.norm_sqr()
        };

        let vals: Vec<f64> = (0..=n).map(|k| rho2(x - half + step * k as f64).sqrt()).collect();
        let best_grid = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let lip = (1.0 + self.lip * self.lip).sqrt();
        let slack = lip * step;

        let mut best = Nearest {
            distance: h,
            u: x,
        };
        let consider = |u: f64, best: &mut Nearest| {
            let d = rho2(u).sqrt();
            if d < best.distance {
                *best = Nearest { distance: d, u };
            }
        };
        for k in 0..=n {
            let local_min = (k == 0 || vals[k] <= vals[k - 1]) && (k == n || vals[k] <= vals[k + 1]);
            if !local_min || vals[k] > best_grid + slack {
                continue;
            }
            let lo = x - half + step * (k.saturating_sub(1)) as f64;
            let hi = x - half + step * ((k + 1).min(n)) as f64;
            let u = golden_min(&rho2, lo, hi, dist_tol);
            consider(u, &mut best);
            consider(x - half + step * k as f64, &mut best);
        }
        for &c in self.corners() {
            if (c - x).abs() <= half {
                consider(c, &mut best);
            }
        }
        best
    }

    /// The curve reflected in the real axis, `a ↦ −a`; swaps `Ω₊` and `Ω₋`.
    pub fn mirrored(&self) -> CurveSpec {
        let me = self.clone();
        let me2 = self.clone();
        let corners = self.corners().to_vec();
        let custom = CustomCurve {
            a: Box::new(move |u| -me.a(u)),
            a_prime: Box::new(move |u| -me2.a_prime_ae(u)),
            corners,
            feature_scale: self.feature_scale(),
        };
        Self::from_kind(
            CurveKind::Custom(Arc::new(custom)),
            self.lip,
            format!("mirror({})", self.label),
        )
    }
}

fn check_param(curve: &str, key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parse(format!("{curve}: {key} must be finite")))
    }
}

fn wedge_nearest(m: f64, w: CPoint) -> Nearest {
    // Rays from the origin along (±1, m); parameter along a ray is |u|.
    let norm = (1.0 + m * m).sqrt();
    let mut best = Nearest {
        distance: w.norm(),
        u: 0.0,
    };
    for dir in [1.0_f64, -1.0] {
        let s = (w.re * dir + w.im * m) / norm;
        if s > 0.0 {
            let u = dir * s / norm;
            let d = (w - Complex64::new(u, m * u.abs())).norm();
            if d < best.distance {
                best = Nearest { distance: d, u };
            }
        }
    }
    best
}

pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let xtol = tol.max(1e-15);
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol * (1.0 + c.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

/// The non-tangential cone `{ζ₀ + r·e^{iθ}: r > 0, θ − φ₀ ∈ (φ, π − φ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub vertex: CPoint,
    pub phi: f64,
    /// Argument of the tangent `ζ'(u₀)`.
    pub phi0: f64,
}

impl ConeSpec {
    pub fn new(vertex: CPoint, phi: f64, phi0: f64) -> Result<Self> {
        ensure_finite(vertex, "cone vertex")?;
        if !(phi > 0.0 && phi < PI / 2.0) {
            return Err(Error::PreconditionViolated(format!("cone aperture {phi} not in (0, π/2)")));
        }
        if !phi0.is_finite() {
            return Err(Error::NonFinite(format!("phi0 = {phi0}")));
        }
        Ok(ConeSpec { vertex, phi, phi0 })
    }

    /// The cone at `ζ(u₀)`; refuses corner points, where no tangent exists.
    pub fn at_curve(c: &CurveSpec, u0: f64, phi: f64) -> Result<Self> {
        let t = c.tangent(u0)?;
        Self::new(c.eval(u0), phi, t.arg())
    }

    /// Unit vector along the cone bisector, `e^{i(φ₀ + π/2)}`.
    pub fn bisector(&self) -> CPoint {
        Complex64::from_polar(1.0, self.phi0 + PI / 2.0)
    }

    pub fn contains(&self, w: CPoint) -> Result<bool> {
        ensure_finite(w, "w")?;
        let rel = w - self.vertex;
        if rel.norm() == 0.0 {
            return Err(Error::PreconditionViolated("point coincides with the cone vertex".into()));
        }
        let theta = (rel * Complex64::from_polar(1.0, -self.phi0)).arg();
        Ok(theta > self.phi && theta < PI - self.phi)
    }
}

/// `name:key=value,...` parameters of a registry entry.
pub(crate) struct Params(Vec<(String, String)>);

impl Params {
    pub(crate) fn get(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.iter().find(|(k, _)| k == key) {
            None => Ok(default),
            Some((_, v)) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("`{key}={v}` is not a finite number"))),
        }
    }

    pub(crate) fn expect_keys(&self, name: &str, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.0 {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("{name}: unknown parameter `{k}`")));
            }
        }
        Ok(())
    }
}

/// Splits `name:k=v,k=v`. Positional values (`bump:0,1`) are assigned to the
/// keys in `positional` order by the caller through [`Params::with_positional`].
pub(crate) fn split_spec(text: &str) -> Result<(&str, Params)> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty registry entry".into()));
    }
    let (name, rest) = match text.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (text, ""),
    };
    let mut pairs = Vec::new();
    if !rest.is_empty() {
        for (idx, item) in rest.split(',').enumerate() {
            let item = item.trim();
            match item.split_once('=') {
                Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
                None => pairs.push((format!("#{idx}"), item.to_string())),
            }
        }
    }
    Ok((name, Params(pairs)))
}

impl Params {
    /// Renames positional entries `#0, #1, …` to the given keys.
    pub(crate) fn with_positional(mut self, keys: &[&str]) -> Result<Self> {
        for (k, _) in self.0.iter_mut() {
            if let Some(idx) = k.strip_prefix('#') {
                let idx: usize = idx.parse().unwrap_or(usize::MAX);
                let key = keys
                    .get(idx)
                    .ok_or_else(|| Error::Parse(format!("too many positional parameters ({})", idx + 1)))?;
                *k = key.to_string();
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn brute_distance(c: &CurveSpec, w: CPoint) -> f64 {
        let scan = |lo: f64, hi: f64, n: usize| {
            let mut best = (f64::INFINITY, lo);
            for k in 0..=n {
                let u = lo + (hi - lo) * k as f64 / n as f64;
                let d = (w - c.eval(u)).norm();
                if d < best.0 {
                    best = (d, u);
                }
            }
            best
        };
        let (_, u) = scan(-20.0, 20.0, 400_000);
        scan(u - 2e-4, u + 2e-4, 400_000).0
    }

    #[test]
    fn eval_examples() {
        assert_eq!(CurveSpec::line().eval(3.0), Complex64::new(3.0, 0.0));
        let wedge = CurveSpec::wedge(1.0).unwrap();
        assert_eq!(wedge.eval(-2.0), Complex64::new(-2.0, 2.0));
        let sine = CurveSpec::sine(0.5, 1.0).unwrap();
        let z = sine.eval(PI / 2.0);
        assert_abs_diff_eq!(z.re, PI / 2.0);
        assert_abs_diff_eq!(z.im, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn tangent_examples() {
        assert_eq!(CurveSpec::line().tangent(0.0).unwrap(), Complex64::new(1.0, 0.0));
        let wedge = CurveSpec::wedge(1.0).unwrap();
        let t = wedge.tangent(1.0).unwrap();
        assert_eq!(t, Complex64::new(1.0, 1.0));
        assert_abs_diff_eq!(t.arg(), wedge.theta0(), epsilon = 1e-15);
        assert_eq!(wedge.tangent(0.0), Err(Error::TangentUndefined { u: 0.0 }));
    }

    #[test]
    fn distance_examples() {
        let line = CurveSpec::line();
        assert_eq!(line.distance(Complex64::new(1.7, -2.5), 1e-12).unwrap(), 2.5);
        let wedge = CurveSpec::wedge(1.0).unwrap();
        // brute force: minimum of |i − (u + i|u|)| at u = 1/2
        let oracle = brute_distance(&wedge, Complex64::i());
        assert_abs_diff_eq!(oracle, 0.5_f64.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(wedge.distance(Complex64::i(), 1e-12).unwrap(), oracle, epsilon = 1e-9);
        let sine = CurveSpec::sine(0.5, 1.0).unwrap();
        assert_eq!(sine.distance(sine.eval(0.0), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn scan_matches_closed_form_wedge() {
        let m = 0.7;
        let custom = CurveSpec::custom("w", move |u: f64| m * u.abs(), move |u: f64| m * u.signum(), m, vec![0.0]).unwrap();
        let wedge = CurveSpec::wedge(m).unwrap();
        for &(x, y) in &[(0.3, 2.0), (-1.5, 0.2), (4.0, -3.0), (0.0, -1.0), (-0.2, 0.05)] {
            let w = Complex64::new(x, y);
            let a = wedge.distance(w, 1e-12).unwrap();
            let b = custom.distance(w, 1e-12).unwrap();
            assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{w}: {a} vs {b}");
        }
    }

    #[test]
    fn sine_distance_against_brute_force() {
        let sine = CurveSpec::sine(0.5, 1.0).unwrap();
        for &(x, y) in &[(0.0, 1.0), (1.0, -0.8), (2.5, 0.3), (-3.0, 2.0)] {
            let w = Complex64::new(x, y);
            let d = sine.distance(w, 1e-12).unwrap();
            let b = brute_distance(&sine, w);
            assert!(d <= b + 1e-12, "{w}: {d} > brute {b}");
            assert!((d - b).abs() <= 1e-7, "{w}: {d} vs brute {b}");
        }
    }

    #[test]
    fn region_examples() {
        let line = CurveSpec::line();
        assert_eq!(line.region_of(Complex64::new(1.0, 2.0)), Region::Above);
        let wedge = CurveSpec::wedge(1.0).unwrap();
        assert_eq!(wedge.region_of(Complex64::new(2.0, 1.0)), Region::Below);
        let sine = CurveSpec::sine(0.5, 1.0).unwrap();
        assert_eq!(sine.region_of(sine.eval(5.0)), Region::OnCurve);
    }

    #[test]
    fn cone_examples() {
        let cone = ConeSpec::new(Complex64::new(0.0, 0.0), PI / 4.0, 0.0).unwrap();
        assert!(cone.contains(Complex64::i()).unwrap());
        assert!(!cone.contains(Complex64::new(1.0, 0.0)).unwrap());
        let tilted = ConeSpec::new(Complex64::new(0.0, 0.0), PI / 3.0, PI / 4.0).unwrap();
        assert!(tilted.contains(Complex64::from_polar(1.0, 3.0 * PI / 4.0)).unwrap());
        assert!(cone.contains(Complex64::new(0.0, 0.0)).is_err());
        assert!(ConeSpec::new(Complex64::new(0.0, 0.0), PI / 2.0, 0.0).is_err());
    }

    #[test]
    fn cone_refused_at_corner() {
        let wedge = CurveSpec::wedge(1.0).unwrap();
        assert!(matches!(ConeSpec::at_curve(&wedge, 0.0, 0.5), Err(Error::TangentUndefined { .. })));
        assert!(ConeSpec::at_curve(&wedge, 0.5, 0.5).is_ok());
    }

    #[test]
    fn registry_parsing() {
        assert_eq!(CurveSpec::parse("line").unwrap().lip(), 0.0);
        let w = CurveSpec::parse("wedge:m=0.5").unwrap();
        assert_eq!(w.lip(), 0.5);
        assert_eq!(w.theta0(), 0.5_f64.atan());
        let s = CurveSpec::parse("sine:amp=0.5,freq=2").unwrap();
        assert_eq!(s.lip(), 1.0);
        let r = CurveSpec::parse("ramp:m=0.3,width=2").unwrap();
        assert_abs_diff_eq!(r.a_prime(0.0).unwrap(), 0.3);
        assert!(CurveSpec::parse("bogus").is_err());
        assert!(CurveSpec::parse("wedge:q=1").is_err());
        assert!(CurveSpec::parse("wedge:m=abc").is_err());
        assert!(CurveSpec::parse("ramp:m=1,width=0").is_err());
    }

    #[test]
    fn custom_rejects_wrong_lipschitz_constant() {
        let bad = CurveSpec::custom("bad", |u: f64| u.sin(), |u: f64| u.cos(), 0.5, vec![]);
        assert!(matches!(bad, Err(Error::PreconditionViolated(_))));
        assert!(CurveSpec::custom("ok", |u: f64| u.sin(), |u: f64| u.cos(), 1.0, vec![]).is_ok());
    }

    #[test]
    fn mirrored_swaps_sides() {
        let w = CurveSpec::wedge(1.0).unwrap();
        let m = w.mirrored();
        let p = Complex64::new(0.3, 2.0);
        assert_eq!(w.region_of(p), Region::Above);
        assert_eq!(m.region_of(p.conj()), Region::Below);
        assert_abs_diff_eq!(
            w.distance(p, 1e-12).unwrap(),
            m.distance(p.conj(), 1e-12).unwrap(),
            epsilon = 1e-10
        );
    }
}
