//! Oscillation-based exponent estimates for the curve constructors.
use scalevar::curves::{estimate_holder, geometric_ladder, make_variation, random_walk_curve, weierstrass, CurveDomain};

fn main() -> scalevar::Result<()> {
    let d = CurveDomain::new(0.0, 1.0, 0.25)?;
    let deltas = geometric_ladder(1e-1, 0.5, 10);
    let probes: Vec<f64> = (0..200).map(|k| 0.3 + 0.4 * k as f64 / 200.0).collect();
    let curves = vec![
        ("W(0.3)", weierstrass(0.3, 2, 80)?),
        ("W(0.7)", weierstrass(0.7, 2, 60)?),
        ("walk", random_walk_curve(1.0 / 65536.0, 1.0, 1, d)?),
        ("variation(0.6)", make_variation(0.6, d, 2)?),
    ];
    for (name, c) in curves {
        let est = estimate_holder(&c, &deltas, &probes)?;
        println!("{name:>15}: declared {:.2}, estimated {:.3}", c.exponent().value(), est.exponent_hat);
    }
    Ok(())
}
