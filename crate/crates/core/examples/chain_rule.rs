//! Chain-rule expansion of x^3 + t x along a Weierstrass curve of exponent 1/2.
use scalevar::asymptotics::scaling_exponent;
use scalevar::curves::{weierstrass, CurveDomain};
use scalevar::qcalc::{chain_rule_expansion, PolyField};

fn main() -> scalevar::Result<()> {
    let d = CurveDomain::new(0.0, 1.0, 0.25)?;
    let x = weierstrass(0.5, 2, 80)?.restricted_to(d);
    // coefficient [j][k] multiplies x^j t^k
    let field = PolyField::new(vec![vec![0.0], vec![0.0, 1.0], vec![0.0], vec![1.0]]);
    let ts: Vec<f64> = (0..200).map(|k| (k as f64 + 0.5) / 200.0).collect();
    let mut samples = Vec::new();
    for k in 0..8 {
        let e = 1e-2 * 0.5f64.powi(k);
        let mut worst = 0.0f64;
        for &t in &ts {
            worst = worst.max(chain_rule_expansion(&field, &x, t, e, 2)?.defect());
        }
        println!("eps {e:.3e}: max defect {worst:.4e}");
        samples.push((e, worst));
    }
    let fit = scaling_exponent(&samples)?;
    println!("defect ~ eps^{:.3} (r2 {:.3})", fit.slope, fit.r_squared);
    Ok(())
}
