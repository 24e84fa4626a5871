//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the console; exits nonzero on any FAIL.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use cauchy_lipschitz::conformal::{distortion_check, koebe_inf_check, map_for_curve, UnivalentTest, DISTORTION_TOL};
use cauchy_lipschitz::identities::{green_sides, littlewood_paley_norms, TestFunctionT};
use cauchy_lipschitz::kernels::{beta_fn, kz_normalization, schur_row_integral};
use cauchy_lipschitz::quadrature::integrate_half_line;
use cauchy_lipschitz::transform::{
    cauchy_riemann_residual, cauchy_transform, log_grid, norm_bound, norm_scan, plemelj_decompose, t_decay_check, t_norm_check, AreaFunction, AreaShape, BoundaryFunction, PlemeljOptions,
};
use cauchy_lipschitz::{ConeSpec, CurveSpec, QuadConfig, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn wedge(m: f64) -> CurveSpec {
    CurveSpec::wedge(m).unwrap()
}

fn kernel_normalization(cfg: &QuadConfig) -> Outcome {
    let configs = [(0.0, c(0.0, 1.0)), (1.0, c(0.0, 0.3)), (-2.0, c(0.0, 2.0)), (0.5, c(0.1, 0.5)), (3.0, c(-0.2, 1.5))];
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for curve in [CurveSpec::line(), wedge(0.5), CurveSpec::sine(0.5, 1.0).unwrap()] {
        for &(u0, z) in &configs {
            match kz_normalization(&curve, curve.eval(u0), z, cfg) {
                Ok(r) => worst = worst.max((r.value - 1.0).norm()),
                Err(e) => errors.push(format!("{} u0={u0}: {e}", curve.label())),
            }
        }
    }
    let mut detail = format!("15 configurations, worst |I - 1| = {worst:.2e} (tol 1e-6)");
    if !errors.is_empty() {
        detail.push_str(&format!(", errors: {errors:?}"));
    }
    outcome(errors.is_empty() && worst <= 1e-6, detail)
}

fn plemelj(cfg: &QuadConfig) -> Outcome {
    let opts = PlemeljOptions::default();
    let line = CurveSpec::line();
    let g = BoundaryFunction::rational(1.0).unwrap();
    let mut points: Vec<f64> = (0..19).map(|k| -4.5 + 0.5 * k as f64).collect();
    points.push(0.25);
    let mut worst_line: f64 = 0.0;
    let mut ok = true;
    let mut closed = (f64::NAN, f64::NAN);
    for &u in &points {
        let cone = ConeSpec::at_curve(&line, u, PI / 4.0).unwrap();
        match plemelj_decompose(&g, &line, u, &cone, &opts, cfg) {
            Ok(r) => {
                ok &= r.converged;
                worst_line = worst_line.max((r.jump - g.eval(u)).norm());
                if u == 0.0 {
                    closed = ((r.g1_limit - 0.5).norm(), (r.g2_limit + 0.5).norm());
                }
            }
            Err(_) => ok = false,
        }
    }
    let w = wedge(0.5);
    let mut worst_wedge: f64 = 0.0;
    for g in [BoundaryFunction::bump(0.0, 2.0).unwrap(), BoundaryFunction::bump(1.0, 1.0).unwrap()] {
        for k in 0..20 {
            let u = -1.9 + 0.2 * k as f64;
            let cone = ConeSpec::at_curve(&w, u, PI / 4.0).unwrap();
            match plemelj_decompose(&g, &w, u, &cone, &opts, cfg) {
                Ok(r) => {
                    ok &= r.converged;
                    worst_wedge = worst_wedge.max((r.jump - g.eval(u)).norm());
                }
                Err(_) => ok = false,
            }
        }
    }
    let pass = ok && worst_line <= 1e-4 && closed.0 <= 1e-4 && closed.1 <= 1e-4 && worst_wedge <= 1e-3;
    outcome(
        pass,
        format!(
            "line: 20 points, worst |jump - g| = {worst_line:.2e} (tol 1e-4), |G1(0) - 1/2| = {:.2e}, |G2(0) + 1/2| = {:.2e}; wedge m=0.5 bumps: worst {worst_wedge:.2e} (tol 1e-3)",
            closed.0, closed.1
        ),
    )
}

fn green_littlewood_paley(cfg: &QuadConfig) -> Outcome {
    let p = |cs: &[f64]| TestFunctionT::poles(cs).unwrap();
    let bank = [p(&[1.0]), p(&[2.0]), p(&[5.0]), p(&[1.0, 2.0]), p(&[1.0, 5.0]), p(&[2.0, 5.0])];
    let mut worst_green: f64 = 0.0;
    for i in 0..bank.len() {
        for j in i..bank.len() {
            let s = green_sides(&bank[i], &bank[j], cfg).unwrap();
            worst_green = worst_green.max((s.lhs - s.rhs).norm() / s.lhs.norm());
        }
    }
    let mut worst_lp: f64 = 0.0;
    for f in &bank {
        let (l, r) = littlewood_paley_norms(f, cfg).unwrap();
        worst_lp = worst_lp.max((l - 2.0 * r).abs() / l);
    }
    let (l, r) = littlewood_paley_norms(&bank[0], cfg).unwrap();
    let anchor = ((l - PI.sqrt()).abs() / PI.sqrt()).max((2.0 * r - PI.sqrt()).abs() / PI.sqrt());
    outcome(
        worst_green <= 1e-4 && worst_lp <= 1e-4 && anchor <= 1e-4,
        format!("Green worst rel {worst_green:.2e}, ||F|| = 2||F'|| worst rel {worst_lp:.2e}, sqrt(pi) anchor rel {anchor:.2e} (tol 1e-4)"),
    )
}

fn schur_constants(cfg: &QuadConfig) -> Outcome {
    let line = CurveSpec::line();
    let mut worst_line: f64 = 0.0;
    for w in [c(0.0, -1.0), c(-5.0, -3.0), c(2.0, 0.7)] {
        worst_line = worst_line.max((schur_row_integral(w, &line, cfg).unwrap().value.re - PI).abs());
    }
    let beta = (beta_fn(1.5, 0.5).unwrap() - PI / 2.0).abs();
    let tight = QuadConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-13,
        ..cfg.clone()
    };
    let integral = integrate_half_line(|t| c(1.0 / (t.sqrt() * (t + 1.0).powf(1.5)), 0.0), &tight).unwrap().value.re;
    let w1 = wedge(1.0);
    let mut worst_wedge: f64 = 0.0;
    for w in [c(0.0, -1.0), c(1.0, -2.0), c(-3.0, 0.5), c(0.0, 2.0)] {
        worst_wedge = worst_wedge.max(schur_row_integral(w, &w1, cfg).unwrap().value.re);
    }
    outcome(
        worst_line <= 1e-4 && beta <= 1e-10 && (integral - 2.0).abs() <= 1e-10 && worst_wedge <= 4.0 * PI,
        format!(
            "line |I - pi| = {worst_line:.2e} (tol 1e-4); |B(3/2,1/2) - pi/2| = {beta:.2e}, |int - 2| = {:.2e} (tol 1e-10); wedge m=1 max {worst_wedge:.4} <= 4 pi",
            (integral - 2.0).abs()
        ),
    )
}

fn norm_bounds(cfg: &QuadConfig) -> Outcome {
    let taus = log_grid(1e-3, 1e3, 24).unwrap();
    let line = CurveSpec::line();
    let mut ok = true;
    let mut parts = Vec::new();
    for g in [BoundaryFunction::rational(1.0), BoundaryFunction::indicator(-1.0, 1.0), BoundaryFunction::gaussian(1.0), BoundaryFunction::bump(0.0, 1.0)] {
        let g = g.unwrap();
        let scan = norm_scan(&g, &line, &taus, cfg).unwrap();
        let flagged = scan.rows.iter().filter(|r| r.status.as_str() != "ok").count();
        ok &= flagged == 0 && scan.max_ratio <= 4.0;
        if g.label == "rational:c=1" {
            ok &= (scan.max_ratio - 0.5f64.sqrt()).abs() <= 1e-3;
        }
        parts.push(format!("{} {:.5}", g.label, scan.max_ratio));
    }
    let w = wedge(0.5);
    let bound = norm_bound(&w);
    for g in [BoundaryFunction::bump(0.0, 1.0).unwrap(), BoundaryFunction::rational(1.0).unwrap()] {
        let scan = norm_scan(&g, &w, &taus, cfg).unwrap();
        ok &= scan.rows.iter().all(|r| r.status.as_str() == "ok") && scan.max_ratio <= bound;
        parts.push(format!("wedge {} {:.5}", g.label, scan.max_ratio));
    }
    outcome(ok, format!("max ratios: {} (line bound 4, exact 1/sqrt2 = 0.70711 +- 1e-3; wedge bound {bound:.1})", parts.join(", ")))
}

fn t_operator(cfg: &QuadConfig) -> Outcome {
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_decay: f64 = 0.0;
    for (curve, center) in [(CurveSpec::line(), c(0.0, 2.0)), (wedge(0.5), c(0.0, 3.0)), (wedge(1.0), c(0.0, 3.0))] {
        for shape in [AreaShape::Disk, AreaShape::Bump, AreaShape::Moment(2)] {
            let f = AreaFunction::new(shape, center, 0.5).unwrap();
            let n = t_norm_check(&f, &curve, cfg).unwrap();
            ok &= n.pass;
            worst_ratio = worst_ratio.max(n.lhs / n.rhs_bound);
            for k in [10.0, 100.0] {
                let d = t_decay_check(&f, &curve, c(0.0, -k * f.support_radius()), cfg).unwrap();
                ok &= d.pass;
                worst_decay = worst_decay.max(d.value / d.bound);
            }
        }
    }
    outcome(ok, format!("line and wedges m=0.5, 1 x 3 shapes: worst ||Tf||/bound = {worst_ratio:.2e}, worst |Tf(w2)|/(2A/|w2|) = {worst_decay:.3}"))
}

fn samples(n: usize, side: Side, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let rho = 10f64.powf(rng.gen_range(-3.0..3.0));
        let z = Complex64::from_polar(rho, side.sign() * rng.gen_range(0.0..PI));
        // the distortion check skips points this close to the axis
        if z.im.abs() >= 1e-6 {
            out.push(z);
        }
    }
    out
}

fn distortion(cfg: &QuadConfig) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for curve in [CurveSpec::line(), wedge(0.5), wedge(1.0)] {
        for side in [Side::Plus, Side::Minus] {
            let m = map_for_curve(&curve, side).unwrap();
            let s = distortion_check(&m, &samples(10_000, side, 11), cfg).unwrap();
            let t0 = curve.theta0();
            let d_ok = s.d_min >= (-t0).exp() * (1.0 - 1e-12) && s.d_max <= t0.exp() * (1.0 + 1e-12);
            let ratios = [s.lower, s.upper, s.second, s.second_dist].iter().all(|&r| r <= 1.0 + DISTORTION_TOL);
            ok &= s.violations == 0 && s.samples == 10_000 && ratios && s.max_arg <= t0 + 1e-10 && d_ok;
            parts.push(format!("{} {}: {} samples, {} violations", curve.label(), side.as_str(), s.samples, s.violations));
        }
    }
    outcome(ok, format!("10^4 samples each; {}", parts.join(", ")))
}

fn koebe() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.25, 0.5, 0.75, 0.95] {
        let k = koebe_inf_check(&UnivalentTest::koebe_family(r).unwrap(), 4096);
        ok &= k.inf_modulus >= 0.25 - 1e-6 && k.inf_modulus <= 1.0 + 1e-6;
        worst = worst.max((k.inf_modulus - 1.0 / ((1.0 + r) * (1.0 + r))).abs());
    }
    outcome(ok && worst <= 1e-6, format!("r in {{0, .25, .5, .75, .95}}: all in [1/4, 1], worst |inf - 1/(1+r)^2| = {worst:.2e} (tol 1e-6)"))
}

fn analyticity(cfg: &QuadConfig) -> Outcome {
    let tight = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-13,
        ..cfg.clone()
    };
    let g = BoundaryFunction::bump(0.0, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for curve in [CurveSpec::line(), wedge(0.5), wedge(1.0), CurveSpec::sine(0.5, 1.0).unwrap()] {
        for side in [Side::Plus, Side::Minus] {
            for _ in 0..100 {
                let w = curve.eval(rng.gen_range(-3.0..3.0)) + c(0.0, side.sign() * rng.gen_range(0.2..3.0));
                let r = cauchy_riemann_residual(|z| cauchy_transform(&g, &curve, z, &tight), w, 1e-4).unwrap_or(f64::INFINITY);
                worst = worst.max(r);
            }
        }
    }
    outcome(worst <= 1e-6, format!("100 points per region on 4 curves, worst residual {worst:.2e} (tol 1e-6)"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cauchy-lip");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("run{k}.json"));
        let status = Command::new(bin).args(["verify", "--output", path.to_str().unwrap()]).status().unwrap();
        codes.push(status.code());
        outputs.push(std::fs::read(&path).unwrap_or_default());
    }
    let same = !outputs[0].is_empty() && outputs[0] == outputs[1];
    outcome(
        same && codes.iter().all(|&c| c == Some(0)),
        format!("two default `verify` runs: {} bytes each, identical = {same}, exit codes {codes:?}", outputs[0].len()),
    )
}

fn main() {
    let cfg = QuadConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("kernel normalization", Box::new(|| kernel_normalization(&cfg))),
        ("Plemelj decomposition", Box::new(|| plemelj(&cfg))),
        ("Green and Littlewood-Paley identities", Box::new(|| green_littlewood_paley(&cfg))),
        ("Schur constants", Box::new(|| schur_constants(&cfg))),
        ("norm bounds", Box::new(|| norm_bounds(&cfg))),
        ("T operator", Box::new(|| t_operator(&cfg))),
        ("distortion inequalities", Box::new(|| distortion(&cfg))),
        ("Koebe infimum", Box::new(koebe)),
        ("analyticity", Box::new(|| analyticity(&cfg))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {:>2} {name}: {} [{:.1}s]", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
