//! Closed-form kernels, their curve and area integrals, and Gamma / Beta.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::geometry::{CPoint, CurveSpec, Region, Side};
use crate::quadrature::{try_integrate_curve, try_integrate_domain, AreaOptions, CurveMeasure, IntegralResult, LineOptions, QuadConfig, Weight};

/// A kernel value together with the distance from the evaluation point to
/// the nearest pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub value: Complex64,
    pub pole_distance: f64,
}

/// `1/(2πi(ζ − w))`.
pub fn cauchy_kernel(zeta: CPoint, w: CPoint) -> Result<Complex64> {
    ensure_finite(zeta, "zeta")?;
    ensure_finite(w, "w")?;
    let diff = zeta - w;
    if diff.norm() == 0.0 {
        return Err(Error::PoleHit { distance: 0.0 });
    }
    Ok(1.0 / (Complex64::new(0.0, 2.0 * PI) * diff))
}

/// `(1/πi)·z/((ζ − ζ₀)² − z²)`, the difference of the Cauchy kernels at
/// `ζ₀ + z` and `ζ₀ − z`.
pub fn kz_kernel(zeta: CPoint, zeta0: CPoint, z: CPoint) -> Result<KernelEval> {
    ensure_finite(zeta, "zeta")?;
    ensure_finite(zeta0, "zeta0")?;
    ensure_finite(z, "z")?;
    let s = zeta - zeta0;
    let pole_distance = (s - z).norm().min((s + z).norm());
    let den = s * s - z * z;
    if pole_distance == 0.0 || den.norm() == 0.0 {
        return Err(Error::PoleHit { distance: pole_distance });
    }
    Ok(KernelEval {
        value: z / (Complex64::new(0.0, PI) * den),
        pole_distance,
    })
}

/// `∫_Γ K_z(ζ, ζ₀) dζ`, which equals one whenever `ζ₀ + z` lies above the
/// curve and `ζ₀ − z` below it.
///
/// The arc over `|u − Re ζ₀| ≤ R` is integrated numerically. The two arcs
/// beyond it use the primitive `(1/2πi)·Log((ζ − ζ₀ − z)/(ζ − ζ₀ + z))`,
/// which is single-valued there because `|ζ − ζ₀| > 2|z|`; on an
/// oscillating curve the 1/ζ² tail would otherwise need millions of panels.
pub fn kz_normalization(c: &CurveSpec, zeta0: CPoint, z: CPoint, cfg: &QuadConfig) -> Result<IntegralResult> {
    ensure_finite(zeta0, "zeta0")?;
    ensure_finite(z, "z")?;
    let (up, down) = (zeta0 + z, zeta0 - z);
    if c.region_of(up) != Region::Above || c.region_of(down) != Region::Below {
        return Err(Error::PreconditionViolated(format!(
            "ζ₀ + z = {up} must lie above and ζ₀ − z = {down} below the curve"
        )));
    }
    let fu = c.nearest(up, cfg.dist_tol)?.u;
    let fd = c.nearest(down, cfg.dist_tol)?.u;
    let r = cfg.truncation_r.max(4.0 * z.norm() + 1.0);
    let (lo, hi) = (zeta0.re - r, zeta0.re + r);
    let opts = LineOptions {
        center: zeta0.re,
        support: Some((lo, hi)),
        breakpoints: vec![fu, fd, zeta0.re],
        ..Default::default()
    };
    let near = try_integrate_curve(|zeta| kz_kernel(zeta, zeta0, z).map(|k| k.value), c, cfg, CurveMeasure::ComplexDz, &opts)?;
    let primitive = |zeta: CPoint| ((zeta - up) / (zeta - down)).ln() / Complex64::new(0.0, 2.0 * PI);
    Ok(IntegralResult {
        value: near.value + primitive(c.eval(lo)) - primitive(c.eval(hi)),
        ..near
    })
}

/// `d(w₁)^{1/2}·d(w₂)^{1/2}·|w₁ − w₂|^{-3}`.
pub fn schur_kernel(w1: CPoint, w2: CPoint, c: &CurveSpec, cfg: &QuadConfig) -> Result<f64> {
    ensure_finite(w1, "w1")?;
    ensure_finite(w2, "w2")?;
    let r = (w1 - w2).norm();
    if r == 0.0 {
        return Err(Error::PoleHit { distance: 0.0 });
    }
    let d1 = c.distance(w1, cfg.dist_tol)?;
    let d2 = c.distance(w2, cfg.dist_tol)?;
    Ok((d1 * d2).sqrt() / (r * r * r))
}

/// `∬ K(w₁, w) dλ(w₁)` over the domain on the other side of the curve from
/// the fixed point `w`. A point below the curve gives the row integral over
/// `Ω₊`; a point above gives the column integral over `Ω₋`.
pub fn schur_row_integral(w: CPoint, c: &CurveSpec, cfg: &QuadConfig) -> Result<IntegralResult> {
    ensure_finite(w, "w")?;
    let side = match c.region_of(w) {
        Region::Below => Side::Plus,
        Region::Above => Side::Minus,
        Region::OnCurve => return Err(Error::OnCurve { w }),
    };
    let dw = c.distance(w, cfg.dist_tol)?;
    let foot = c.nearest(w, cfg.dist_tol)?.u;
    // integrand ~ |w₁|^{-5/2}
    let area_cfg = cfg.with_tail_exponent(2.5);
    let opts = AreaOptions {
        anchors: vec![foot],
        singular_u: vec![],
    };
    try_integrate_domain(
        |w1| {
            let r = (w1 - w).norm();
            let d1 = c.distance(w1, cfg.dist_tol)?;
            Ok(Complex64::new((d1 * dw).sqrt() / (r * r * r), 0.0))
        },
        c,
        side,
        Weight::None,
        &area_cfg,
        &opts,
    )
}

/// Kernel of the area operator `T`: `d(w₁)/(w₁ − w₂)²`.
pub fn t_kernel(w1: CPoint, w2: CPoint, d1: f64) -> Result<Complex64> {
    let diff = w1 - w2;
    if diff.norm() == 0.0 {
        return Err(Error::PoleHit { distance: 0.0 });
    }
    Ok(d1 / (diff * diff))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler's Gamma function for positive real arguments (Lanczos, g = 7).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("x = {x}")));
    }
    if x <= 0.0 {
        return Err(Error::Domain(format!("Gamma requires x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π/sin(πx)
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        a += coef / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a + b)`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    let ga = gamma_fn(a)?;
    let gb = gamma_fn(b)?;
    let gab = gamma_fn(a + b)?;
    // product in a fixed order so that B(a, b) and B(b, a) agree bitwise
    let (lo, hi) = if ga <= gb { (ga, gb) } else { (gb, ga) };
    Ok(lo * hi / gab)
}
