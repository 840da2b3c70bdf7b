//! The product rule with its correction term, on a pair of rough curves.
use scalevar::curves::weierstrass;
use scalevar::qcalc::{leibniz_remainder, scale_of, QuantumPair};

fn main() -> scalevar::Result<()> {
    let f = weierstrass(0.3, 2, 60)?;
    let g = weierstrass(0.7, 2, 40)?;
    let t = 0.4;
    for e in [1e-1, 1e-2, 1e-3, 1e-4] {
        let pf = QuantumPair::of(|s| f.eval(s), t, e);
        let pg = QuantumPair::of(|s| g.eval(s), t, e);
        let lhs = scale_of(|s| f.eval(s) * g.eval(s), t, e);
        let naive = pf.scale() * g.eval(t) + f.eval(t) * pg.scale();
        let corr = leibniz_remainder(&pf, &pg, e);
        println!(
            "eps {e:.0e}: |naive defect| {:.3e}  |corrected defect| {:.3e}",
            (lhs - naive).norm(),
            (lhs - naive - corr).norm()
        );
    }
    Ok(())
}
