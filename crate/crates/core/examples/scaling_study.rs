//! How the boundary and remainder pieces of the functional derivative scale
//! with eps for a rough trajectory and a rough variation.
use scalevar::asymptotics::EpsilonLadder;
use scalevar::curves::{make_variation_with, weierstrass, Carrier, CurveDomain, Envelope};
use scalevar::variational::{scaling_study, LagrangianSpec};

fn main() -> scalevar::Result<()> {
    let d = CurveDomain::new(0.0, 1.0, 0.25)?;
    let ladder = EpsilonLadder::geometric(0.125, 0.5, 8)?;
    let gamma = weierstrass(0.5, 2, 80)?.restricted_to(d);
    let h = make_variation_with(0.5, d, 1, Carrier::Weierstrass { base: 2, terms: 80 }, Envelope::Polynomial { order: 1 })?;
    let s = scaling_study(&LagrangianSpec::kinetic(1.0), &gamma, &h, &ladder, 4096)?;
    for k in 0..s.epsilons.len() {
        println!("eps {:.4e}: |boundary| {:.4e}  |remainder| {:.4e}", s.epsilons[k], s.boundary[k], s.remainder[k]);
    }
    println!("boundary slope {:.3}, remainder slope {:.3}", s.boundary_fit.slope, s.remainder_fit.slope);
    Ok(())
}
