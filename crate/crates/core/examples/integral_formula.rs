//! Integral of the scale derivative against its mean-function boundary form,
//! under quadrature refinement.
use scalevar::curves::Curve;
use scalevar::qcalc::scale_integral;

fn main() -> scalevar::Result<()> {
    let f = Curve::smooth(|t| (6.0 * t).sin());
    for n in [64, 256, 1024, 4096] {
        let r = scale_integral(&f, 0.0, 1.0, 0.01, n)?;
        println!("points {n:>5}: |lhs - rhs| = {:.3e}, distance from f(b) - f(a) = {:.3e}", (r.lhs - r.rhs).norm(), r.limit_gap);
    }
    Ok(())
}
