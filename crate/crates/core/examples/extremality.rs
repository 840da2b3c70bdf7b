//! Extremality test for a constant-force trajectory and for a straight line
//! that is not extremal.
use scalevar::asymptotics::EpsilonLadder;
use scalevar::curves::{Curve, CurveDomain};
use scalevar::variational::{extremality_test, variation_battery, ExtremalityOptions, LagrangianSpec};

fn main() -> scalevar::Result<()> {
    let d = CurveDomain::new(0.0, 1.0, 0.25)?;
    let m = 2.0;
    let l = LagrangianSpec::constant_force(m, 1.0);
    let ladder = EpsilonLadder::geometric(0.125, 0.5, 8)?;
    let opts = ExtremalityOptions::default();
    let candidates = [
        ("t^2 / 2m", Curve::smooth(move |t| t * t / (2.0 * m)).restricted_to(d)),
        ("t", Curve::smooth(|t| t).restricted_to(d)),
    ];
    for (name, gamma) in candidates {
        let battery = variation_battery(&gamma, 5, 0)?;
        let report = extremality_test(&l, &gamma, &battery, &ladder, 1e-6, &opts)?;
        println!("{name}: extremal = {}", report.verdict);
        for o in &report.per_variation {
            let mag = o.dominant.as_ref().map_or(f64::NAN, |d| d.magnitude());
            println!("  {}: dominant magnitude {mag:.3e}", o.id);
        }
    }
    Ok(())
}
