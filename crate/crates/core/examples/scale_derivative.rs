//! Scale derivative of a smooth curve and of a Weierstrass curve across a
//! ladder of step sizes.
use scalevar::curves::{weierstrass, Curve};
use scalevar::qcalc::{quantum_derivative, scale_derivative, Direction};

fn main() -> scalevar::Result<()> {
    let sine = Curve::smooth(f64::sin);
    let rough = weierstrass(0.5, 2, 60)?;
    let t = 0.7;
    println!("{:>10} {:>24} {:>24}", "eps", "box sin - cos", "box W(0.5)");
    for k in 0..8 {
        let e = 1e-1 * 0.5f64.powi(k);
        let s = scale_derivative(&sine, t, e)?.value - t.cos();
        let w = scale_derivative(&rough, t, e)?.value;
        println!("{e:>10.3e} {:>11.3e} {:>+11.3e}i {:>11.3e} {:>+11.3e}i", s.re, s.im, w.re, w.im);
    }
    let plus = quantum_derivative(&rough, t, 1e-3, Direction::Plus)?;
    let minus = quantum_derivative(&rough, t, 1e-3, Direction::Minus)?;
    println!("right and left quotients of W(0.5) at eps = 1e-3: {:.4} {:.4}", plus.re, minus.re);
    Ok(())
}
