//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line; the target
//! exits non-zero when any criterion fails. Oracles live in this file and do
//! not call the quantities they check.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalevar::asymptotics::{default_threshold, dominant_part, fit_on_ladder, EpsilonLadder, DEFAULT_BASIS};
use scalevar::curves::{
    lattice_nodes, make_variation, make_variation_with, random_walk_curve, weierstrass, weierstrass_terms_for,
    Carrier, Curve, CurveDomain, Envelope,
};
use scalevar::qcalc::{chain_rule_expansion, leibniz_check, scale_derivative, scale_integral, PolyField};
use scalevar::schrodinger::{
    a_eps_coefficient, least_action_pipeline, linear_report, nls_report, reduction_check, GridSpec, PhysicalParams,
    WaveFunction,
};
use scalevar::curves::SmoothFn;
use scalevar::variational::{
    decompose_derivative, euler_lagrange_residual, extremality_test, gateaux_check, scaling_study, variation_battery,
    ExtremalityOptions, LagrangianSpec,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Least-squares slope and r^2 of `ln y` against `ln x`.
fn loglog(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

/// Half-normalized scale derivative from its definition.
fn oracle_box(f: impl Fn(f64) -> Complex64, t: f64, e: f64) -> Complex64 {
    let p = (f(t + e) - f(t)) / e;
    let m = (f(t) - f(t - e)) / e;
    0.5 * ((p + m) - I * (p - m))
}

fn oracle_weierstrass(alpha: f64, terms: usize) -> impl Fn(f64) -> f64 + Clone {
    move |t| (0..=terms).map(|k| 2f64.powf(-(k as f64) * alpha) * (2f64.powi(k as i32) * t).cos()).sum()
}

fn c1_smooth_limit() -> Outcome {
    let fns: [(&str, fn(f64) -> f64, fn(f64) -> f64); 3] =
        [("t^2", |t| t * t, |t| 2.0 * t), ("sin", f64::sin, f64::cos), ("exp", f64::exp, f64::exp)];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ts: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let (mut slope, mut r2) = (f64::INFINITY, f64::INFINITY);
    for (_, f, df) in fns {
        let curve = Curve::smooth(f);
        for &t in &ts {
            let pts: Vec<(f64, f64)> = (0..=8)
                .map(|k| {
                    let e = 1e-2 * 0.5f64.powi(k);
                    (e, (scale_derivative(&curve, t, e).unwrap().value - c(df(t))).norm())
                })
                .collect();
            let (s, r) = loglog(&pts);
            slope = slope.min(s);
            r2 = r2.min(r);
        }
    }
    outcome(slope >= 0.99 && r2 >= 0.999, format!("min slope {slope:.4}, min r2 {r2:.6}"))
}

fn c2_leibniz() -> Outcome {
    let d = CurveDomain::new(0.0, 1.0, 0.25).unwrap();
    let mut curves: Vec<(Curve, Box<dyn Fn(f64) -> f64>)> = Vec::new();
    curves.push((Curve::smooth(|t| 0.3 - t + 0.5 * t * t + 0.2 * t * t * t), Box::new(|t| 0.3 - t + 0.5 * t * t + 0.2 * t * t * t)));
    curves.push((Curve::smooth(|t| 1.0 - 2.0 * t * t), Box::new(|t| 1.0 - 2.0 * t * t)));
    for alpha in [0.3, 0.5, 0.7] {
        let n = weierstrass_terms_for(alpha, 2, 1e-4);
        curves.push((weierstrass(alpha, 2, n).unwrap(), Box::new(oracle_weierstrass(alpha, n))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut oracle_gap) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (i, j) = (rng.gen_range(0..curves.len()), rng.gen_range(0..curves.len()));
        for _ in 0..100 {
            let t = rng.gen_range(d.a..d.b);
            let e = 10f64.powf(rng.gen_range(-4.0..-1.0));
            let r = leibniz_check(&curves[i].0, &curves[j].0, t, e).unwrap();
            worst = worst.max(r.defect / r.lhs.norm().max(1.0));
            let (f, g) = (&curves[i].1, &curves[j].1);
            let lhs = oracle_box(|s| c(f(s) * g(s)), t, e);
            oracle_gap = oracle_gap.max((lhs - r.lhs).norm() / lhs.norm().max(1.0));
        }
    }
    outcome(worst <= 1e-10 && oracle_gap <= 1e-10, format!("max relative defect {worst:.3e}, oracle gap {oracle_gap:.3e}"))
}

fn c3_integral() -> Outcome {
    // (f, antiderivative)
    let cases: [(fn(f64) -> f64, fn(f64) -> f64); 5] = [
        (|t| (6.0 * t).sin(), |t| -(6.0 * t).cos() / 6.0),
        (|t| (5.0 * t + 0.3).cos(), |t| (5.0 * t + 0.3).sin() / 5.0),
        (|t| (2.0 * t).exp(), |t| (2.0 * t).exp() / 2.0),
        (|t| (-3.0 * t).exp(), |t| -(-3.0 * t).exp() / 3.0),
        (|t| (4.0 * t + 1.0).sin(), |t| -(4.0 * t + 1.0).cos() / 4.0),
    ];
    let e = 0.01;
    let (mut worst, mut worst_oracle, mut monotone) = (0.0f64, 0.0f64, true);
    for (f, big_f) in cases {
        let curve = Curve::smooth(f);
        for (a, b) in [(0.0, 1.0), (0.25, 0.75)] {
            // exact value of both sides from the antiderivative
            let mean = |t: f64| ((big_f(t + e) - big_f(t)) / e, (big_f(t) - big_f(t - e)) / e);
            let side = |t: f64| {
                let (p, m) = mean(t);
                0.5 * (c(p + m) - I * (p - m))
            };
            let exact = side(b) - side(a);
            let errs: Vec<f64> = [256, 1024, 4096]
                .iter()
                .map(|&n| {
                    let r = scale_integral(&curve, a, b, e, n).unwrap();
                    if n == 1024 {
                        worst = worst.max((r.lhs - r.rhs).norm());
                        worst_oracle = worst_oracle.max((r.lhs - exact).norm().max((r.rhs - exact).norm()));
                    }
                    (r.lhs - r.rhs).norm()
                })
                .collect();
            let fmax = (0..=64).map(|k| f(a - e + (b - a + 2.0 * e) * k as f64 / 64.0).abs()).fold(1.0, f64::max);
            let floor = 16.0 * f64::EPSILON * fmax * (b - a) / e;
            monotone &= errs.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
        }
    }
    outcome(
        worst <= 1e-9 && worst_oracle <= 1e-9 && monotone,
        format!("max |lhs - rhs| {worst:.3e}, max distance from closed form {worst_oracle:.3e}, monotone {monotone}"),
    )
}

fn c4_chain() -> Outcome {
    let d = CurveDomain::new(0.0, 1.0, 0.25).unwrap();
    let eps: Vec<f64> = (0..8).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let n_terms = weierstrass_terms_for(0.5, 2, eps[7]);
    let x = weierstrass(0.5, 2, n_terms).unwrap().restricted_to(d);
    let xo = oracle_weierstrass(0.5, n_terms);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ts: Vec<f64> = (0..200).map(|_| rng.gen_range(d.a..d.b)).collect();
    // (field, F as closure, F_x, F_xx, F_t)
    type F = fn(f64, f64) -> f64;
    let fields: [(PolyField, F, F, F, F); 2] = [
        (PolyField::power(2), |x, _| x * x, |x, _| 2.0 * x, |_, _| 2.0, |_, _| 0.0),
        (
            PolyField::new(vec![vec![0.0], vec![0.0, 1.0], vec![0.0], vec![1.0]]),
            |x, t| x * x * x + t * x,
            |x, t| 3.0 * x * x + t,
            |x, _| 6.0 * x,
            |x, _| x,
        ),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (fi, (field, f, fx, fxx, ft)) in fields.iter().enumerate() {
        let mut pts = Vec::new();
        let mut at_floor = true;
        let mut oracle_gap = 0.0f64;
        for &e in &eps {
            let (mut defect, mut floor) = (0.0f64, 0.0f64);
            for &t in &ts {
                let ex = chain_rule_expansion(field, &x, t, e, 2).unwrap();
                defect = defect.max(ex.defect());
                // independent expansion from the definition
                let x0 = xo(t);
                let (p, m) = ((xo(t + e) - x0) / e, (x0 - xo(t - e)) / e);
                let a1 = 0.5 * (c(p + m) - I * (p - m));
                let a2 = 0.5 * (c(p * p - m * m) - I * (p * p + m * m));
                let expansion = c(ft(x0, t)) + a1 * fx(x0, t) + a2 * (fxx(x0, t) / 2.0 * e);
                let lhs = oracle_box(|s| c(f(xo(s), s)), t, e);
                oracle_gap = oracle_gap.max(((lhs - expansion).norm() - ex.defect()).abs());
                let size = f(x0, t).abs() + x0.abs() * fx(x0, t).abs() + x0 * x0 * fxx(x0, t).abs();
                let terms = ex.scale_derivative.norm() + ex.x_terms.iter().map(|z| z.norm()).sum::<f64>();
                floor = floor.max(64.0 * f64::EPSILON * (size / e + terms));
            }
            at_floor &= defect <= floor;
            pts.push((e, defect));
        }
        let (slope, r2) = loglog(&pts);
        let pass = (slope >= 0.45 || at_floor) && oracle_gap <= 1e-9;
        ok &= pass;
        parts.push(format!(
            "field {fi}: slope {slope:.3} (r2 {r2:.3}){}, oracle gap {oracle_gap:.1e}",
            if at_floor { " at rounding floor" } else { "" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c5_dominant() -> Outcome {
    let ladder = EpsilonLadder::geometric(0.1, 0.5, 10).unwrap();
    let fit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| c(e.powf(-0.5) + 2.0 * e + 2.0)).unwrap();
    let dom = dominant_part(&fit, default_threshold(&fit));
    let worked = dom.kept_exponents == [-0.5, 0.0]
        && (dom.coefficient(-0.5) - c(1.0)).norm() <= 1e-8
        && (dom.coefficient(0.0) - c(2.0)).norm() <= 1e-8;

    let alpha = 1.7;
    let fit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| c(alpha * e.powf(-0.5) + e + 2.0)).unwrap();
    let dom = dominant_part(&fit, default_threshold(&fit));
    let remark = dom.kept_exponents == [-0.5, 0.0]
        && (dom.coefficient(-0.5) - c(alpha)).norm() <= 1e-8
        && (dom.coefficient(0.0) - c(2.0)).norm() <= 1e-8;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut idem, mut lin) = (0.0f64, 0.0f64);
    let eval = |cs: &[Complex64], e: f64| -> Complex64 { DEFAULT_BASIS.iter().zip(cs).map(|(p, z)| z * e.powf(*p)).sum() };
    for _ in 0..50 {
        let mut draw = || -> Vec<Complex64> { (0..5).map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect() };
        let (ca, cb) = (draw(), draw());
        let fa = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&ca, e)).unwrap();
        let fb = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&cb, e)).unwrap();
        let fs = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| eval(&ca, e) + 2.5 * eval(&cb, e)).unwrap();
        let scale = fs.coefficients.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for k in 0..5 {
            lin = lin.max((fs.coefficients[k] - fa.coefficients[k] - 2.5 * fb.coefficients[k]).norm() / scale);
        }
        let d1 = dominant_part(&fa, default_threshold(&fa));
        let refit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| d1.eval(e)).unwrap();
        let d2 = dominant_part(&refit, default_threshold(&refit));
        if d1.kept_exponents != d2.kept_exponents {
            idem = f64::INFINITY;
        }
        for p in &d1.kept_exponents {
            idem = idem.max((d1.coefficient(*p) - d2.coefficient(*p)).norm() / d1.magnitude().max(1.0));
        }
    }
    outcome(
        worked && remark && idem <= 1e-10 && lin <= 1e-10,
        format!("worked example {worked}, uniqueness case {remark}, idempotence {idem:.2e}, linearity {lin:.2e}"),
    )
}

fn c6_decomposition() -> Outcome {
    let d = CurveDomain::new(0.0, 1.0, 0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mus: Vec<f64> = (0..8).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let (mut worst_ratio, mut min_slope) = (0.0f64, f64::INFINITY);
    for _ in 0..10 {
        let m = rng.gen_range(0.5..2.0);
        let l = match rng.gen_range(0..4) {
            0 => LagrangianSpec::kinetic(m),
            1 => LagrangianSpec::harmonic(m, rng.gen_range(0.5..3.0)),
            2 => LagrangianSpec::cubic(m, rng.gen_range(-0.3..0.3)),
            _ => LagrangianSpec::constant_force(m, rng.gen_range(-2.0..2.0)),
        };
        let e = 0.125 * 0.5f64.powi(rng.gen_range(0..6));
        let gamma = if rng.gen_bool(0.5) {
            weierstrass(0.5, 2, weierstrass_terms_for(0.5, 2, e)).unwrap().restricted_to(d)
        } else {
            let w = rng.gen_range(1.0..4.0);
            Curve::smooth(move |t| (w * t).sin()).restricted_to(d)
        };
        let beta = if gamma.exponent().value() < 1.0 { 0.5 } else { 1.0 };
        let seed = rng.gen();
        let h = if rng.gen_bool(0.5) {
            make_variation(beta, d, seed).unwrap()
        } else {
            let carrier =
                if beta < 1.0 { Carrier::Weierstrass { base: 2, terms: weierstrass_terms_for(beta, 2, e) } } else { Carrier::Linear };
            make_variation_with(beta, d, seed, carrier, Envelope::Polynomial { order: 2 }).unwrap()
        };
        match decompose_derivative(&l, &gamma, &h, e, 4096) {
            Ok(r) => worst_ratio = worst_ratio.max(r.recombination_defect / r.tolerance()),
            Err(_) => worst_ratio = f64::INFINITY,
        }
        let g = gateaux_check(&l, &gamma, &h, e, &mus, 4096).unwrap();
        min_slope = min_slope.min(g.defect_slope.unwrap_or(f64::INFINITY));
    }
    outcome(
        worst_ratio <= 1.0 && min_slope >= 1.9,
        format!("worst defect / tolerance {worst_ratio:.3e}, min Gateaux slope {min_slope:.4}"),
    )
}

fn c7_scaling_study() -> Outcome {
    let d = CurveDomain::new(0.0, 1.0, 0.25).unwrap();
    let ladder = EpsilonLadder::geometric(0.125, 0.5, 8).unwrap();
    let terms = weierstrass_terms_for(0.5, 2, ladder.smallest());
    let gamma = weierstrass(0.5, 2, terms).unwrap().restricted_to(d);
    let h = make_variation_with(0.5, d, 7, Carrier::Weierstrass { base: 2, terms }, Envelope::Polynomial { order: 1 }).unwrap();
    let s = scaling_study(&LagrangianSpec::kinetic(1.0), &gamma, &h, &ladder, 4096).unwrap();
    let b = (s.boundary_fit.slope, s.boundary_fit.r_squared);
    let r = (s.remainder_fit.slope, s.remainder_fit.r_squared);
    outcome(
        b.0 >= -0.05 && b.1 >= 0.8 && r.0 >= 0.9 && r.1 >= 0.8,
        format!("boundary slope {:.3} (r2 {:.3}), weighted-remainder slope {:.3} (r2 {:.3})", b.0, b.1, r.0, r.1),
    )
}

fn c8_euler_lagrange() -> Outcome {
    let d = CurveDomain::new(0.0, 1.0, 0.25).unwrap();
    let m = 2.0;
    let l = LagrangianSpec::constant_force(m, 1.0);
    let x = Curve::smooth(move |t| t * t / (2.0 * m)).restricted_to(d);
    let ladder = EpsilonLadder::geometric(0.125, 0.5, 8).unwrap();
    let mut worst = 0.0f64;
    for k in 0..=16 {
        for &e in ladder.values() {
            worst = worst.max(euler_lagrange_residual(&l, &x, e, k as f64 / 16.0).unwrap().norm());
        }
    }
    let opts = ExtremalityOptions::default();
    let battery = variation_battery(&x, 5, 8).unwrap();
    let ext = extremality_test(&l, &x, &battery, &ladder, 1e-6, &opts).unwrap();

    // non-extremal x = t under L = v^2/2 + x; the Euler-Lagrange residual is 1
    let l1 = LagrangianSpec::constant_force(1.0, 1.0);
    let line = Curve::smooth(|t| t).restricted_to(d);
    let battery = variation_battery(&line, 5, 8).unwrap();
    let non = extremality_test(&l1, &line, &battery, &ladder, 1e-6, &opts).unwrap();
    let mut worst_rel = 0.0f64;
    for (v, o) in battery.iter().zip(&non.per_variation) {
        // trapezoid with Richardson step on a fine grid, independent of the library rule
        let n = 1 << 14;
        let trap = |n: usize| {
            let h = 1.0 / n as f64;
            (0..=n).map(|k| v.curve.eval_re(k as f64 * h) * if k == 0 || k == n { 0.5 } else { 1.0 }).sum::<f64>() * h
        };
        let int_h = (4.0 * trap(n) - trap(n / 2)) / 3.0;
        let got = o.dominant.as_ref().map_or(c(f64::NAN), |d| d.coefficient(0.0));
        worst_rel = worst_rel.max((got - c(int_h)).norm() / int_h.abs());
    }
    outcome(
        worst <= 1e-12 && ext.verdict && !non.verdict && worst_rel <= 0.05,
        format!(
            "max residual {worst:.2e}, extremal verdict {}, non-extremal verdict {}, dominant vs int h relative gap {worst_rel:.2e}",
            ext.verdict, non.verdict
        ),
    )
}

/// Free Gaussian packet written out independently of the library.
fn oracle_packet(x0: f64, k0: f64, w: f64, hbar: f64, m: f64) -> impl Fn(f64, f64) -> Complex64 {
    move |x, t| {
        let s = Complex64::new(w * w, hbar * t / m);
        let norm = (c(w * w) / s).sqrt();
        let y = c(x - x0) - I * (k0 * w * w);
        norm * (-(y * y) / (2.0 * s) - 0.5 * k0 * k0 * w * w).exp()
    }
}

fn c9_schrodinger() -> Outcome {
    let params = PhysicalParams::linear(1.0, 1.0).unwrap();
    let grid = GridSpec { x_min: -3.0, x_max: 3.0, nx: 50, t_min: 0.0, t_max: 1.0, nt: 50 };
    let zero = SmoothFn::Polynomial { coeffs: vec![0.0] };
    let omega = 1.5;
    let harmonic_u = SmoothFn::Polynomial { coeffs: vec![0.0, 0.0, 0.5 * omega * omega] };
    let cases: Vec<(WaveFunction, SmoothFn, bool)> = vec![
        (WaveFunction::gaussian_packet(0.0, 1.0, 0.8, params).unwrap(), zero.clone(), true),
        (WaveFunction::harmonic_ground(1.0, omega, 1.0), harmonic_u, true),
        (WaveFunction::plane_wave(1.2, 2.0), zero.clone(), false),
    ];
    let a = params.linear_a_eps();
    let (mut lin, mut nls, mut red, mut pipe) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (wf, u, solves) in &cases {
        let r = reduction_check(wf, u, &params, &grid).unwrap();
        red = red.max(r.max_discrepancy / r.rel_scale);
        if *solves {
            lin = lin.max(linear_report(wf, u, &params, &grid).unwrap().relative());
            nls = nls.max(nls_report(wf, u, &zero, &params, a, &grid).unwrap().relative());
            let xs: Vec<f64> = (0..50).map(|k| -3.0 + 6.0 * k as f64 / 49.0).collect();
            pipe = pipe.max(least_action_pipeline(wf, u, &zero, &params, a, &xs, 0.5).unwrap().relative());
        }
    }
    // oracle: the packet solves the free equation by finite differences, and
    // the library's psi matches it
    let psi = oracle_packet(0.0, 1.0, 0.8, 1.0, 1.0);
    let lib = &cases[0].0;
    let h = 1e-3;
    let (mut fd, mut same) = (0.0f64, 0.0f64);
    for (x, t) in grid.points().into_iter().step_by(37) {
        let p = psi(x, t);
        let dt = (psi(x, t - 2.0 * h) - 8.0 * psi(x, t - h) + 8.0 * psi(x, t + h) - psi(x, t + 2.0 * h)) / (12.0 * h);
        let dxx = (-psi(x - 2.0 * h, t) + 16.0 * psi(x - h, t) - 30.0 * p + 16.0 * psi(x + h, t) - psi(x + 2.0 * h, t))
            / (12.0 * h * h);
        fd = fd.max((I * dt + 0.5 * dxx).norm() / (dt.norm() + 0.5 * dxx.norm()).max(p.norm()));
        same = same.max((lib.psi(x, t) - p).norm());
    }
    outcome(
        lin <= 1e-9 && nls <= 1e-9 && red <= 1e-9 && pipe <= 1e-8 && fd <= 1e-6 && same <= 1e-13,
        format!(
            "linear {lin:.2e}, nls {nls:.2e}, reduction {red:.2e}, pipeline {pipe:.2e} (relative); packet oracle fd {fd:.1e}, psi gap {same:.1e}"
        ),
    )
}

fn c10_regcond() -> Outcome {
    let (hbar, m) = (1.0, 1.0);
    let c_walk = hbar / m;
    let step = 1.0 / 1024.0;
    let d = CurveDomain::new(0.0, 1.0, 0.01).unwrap();
    let walk = random_walk_curve(step, c_walk, 10, d).unwrap();
    let mut worst = 0.0f64;
    let mut oracle = 0.0f64;
    for t in lattice_nodes(&d, step).into_iter().filter(|t| d.contains(*t)) {
        let z = a_eps_coefficient(&walk, t, step).unwrap().normalized;
        worst = worst.max((z - Complex64::new(0.0, -hbar / m)).norm());
        let (p, q) = ((walk.eval_re(t + step) - walk.eval_re(t)) / step, (walk.eval_re(t) - walk.eval_re(t - step)) / step);
        let direct = step * 0.5 * (c(p * p - q * q) - I * (p * p + q * q));
        oracle = oracle.max((direct - Complex64::new(0.0, -hbar / m)).norm());
    }
    outcome(worst <= 1e-12 && oracle <= 1e-12, format!("max |a_eps + i hbar/m| {worst:.2e}, direct {oracle:.2e}"))
}

fn run_suite(dir: &Path) -> (Vec<u8>, std::process::ExitStatus) {
    let status = Command::new(env!("CARGO_BIN_EXE_scalevar"))
        .args(["suite", "--seed", "11", "--out", "out"])
        .current_dir(dir)
        .output()
        .expect("run scalevar");
    let report = std::fs::read(dir.join("out/report.json")).expect("report written");
    (report, status.status)
}

fn c11_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ra, sa) = run_suite(a.path());
    let (rb, sb) = run_suite(b.path());
    let mut same_files = true;
    for entry in std::fs::read_dir(a.path().join("out")).unwrap() {
        let p = entry.unwrap().path();
        if p.is_file() {
            let other = b.path().join("out").join(p.file_name().unwrap());
            same_files &= std::fs::read(&p).ok() == std::fs::read(&other).ok();
        }
    }
    let identical = ra == rb && same_files;
    outcome(
        identical && sa.code() == sb.code(),
        format!("reports identical {identical} ({} bytes), exit statuses {:?}/{:?}", ra.len(), sa.code(), sb.code()),
    )
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "smooth-limit convergence", Duration::from_secs(1), c1_smooth_limit),
        (2, "corrected product rule", Duration::from_secs(2), c2_leibniz),
        (3, "integral formula", Duration::from_secs(2), c3_integral),
        (4, "chain-rule expansion", Duration::from_secs(2), c4_chain),
        (5, "dominant-part operator", Duration::from_secs(1), c5_dominant),
        (6, "functional-derivative decomposition", Duration::from_secs(5), c6_decomposition),
        (7, "boundary and remainder scaling", Duration::from_secs(5), c7_scaling_study),
        (8, "Euler-Lagrange exactness", Duration::from_secs(10), c8_euler_lagrange),
        (9, "Schrodinger reduction", Duration::from_secs(5), c9_schrodinger),
        (10, "random-walk coefficient", Duration::from_secs(1), c10_regcond),
        (11, "CLI determinism", Duration::from_secs(30), c11_determinism),
    ];
    let mut failed = Vec::new();
    for (n, name, budget, f) in criteria {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let in_time = took <= budget;
        let pass = o.passed && in_time;
        println!(
            "criterion {n:>2} {}: {name}: {} [{:.2} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
