//! Fitting an expansion in powers of eps and keeping its dominant part.
use num_complex::Complex64;
use scalevar::asymptotics::{default_threshold, dominant_part, fit_on_ladder, EpsilonLadder, DEFAULT_BASIS};

fn main() -> scalevar::Result<()> {
    let ladder = EpsilonLadder::geometric(0.1, 0.5, 10)?;
    let fit = fit_on_ladder(&ladder, &DEFAULT_BASIS, |e| Complex64::new(e.powf(-0.5) + 2.0 * e + 2.0, 0.0))?;
    for (p, c) in fit.basis_exponents.iter().zip(&fit.coefficients) {
        println!("eps^{p:+.1}: {:+.10}", c.re);
    }
    let dom = dominant_part(&fit, default_threshold(&fit));
    println!("kept exponents {:?}, magnitude {:.6}", dom.kept_exponents, dom.magnitude());
    println!("{}", serde_json::to_string_pretty(&dom).expect("serializable"));
    Ok(())
}
