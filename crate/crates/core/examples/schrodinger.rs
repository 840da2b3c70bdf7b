//! Residuals of catalog wavefunctions and the random-walk coefficient.
use num_complex::Complex64;
use scalevar::curves::{lattice_nodes, random_walk_curve, CurveDomain, SmoothFn};
use scalevar::schrodinger::{a_eps_coefficient, linear_report, nls_report, GridSpec, PhysicalParams, WaveFunction};

fn main() -> scalevar::Result<()> {
    let params = PhysicalParams::linear(1.0, 1.0)?;
    let grid = GridSpec { x_min: -3.0, x_max: 3.0, nx: 50, t_min: 0.0, t_max: 1.0, nt: 50 };
    let zero = SmoothFn::Polynomial { coeffs: vec![0.0] };
    let packet = WaveFunction::gaussian_packet(0.0, 1.0, 0.8, params)?;
    let wrong = WaveFunction::plane_wave(1.2, 2.0);
    for wf in [&packet, &wrong] {
        let lin = linear_report(wf, &zero, &params, &grid)?;
        let nls = nls_report(wf, &zero, &zero, &params, params.linear_a_eps(), &grid)?;
        println!("{}: linear {:.3e}, nonlinear {:.3e} (relative)", wf.name, lin.relative(), nls.relative());
    }
    let d = CurveDomain::new(0.0, 1.0, 0.01)?;
    let step = 1.0 / 1024.0;
    let walk = random_walk_curve(step, params.hbar / params.mass, 3, d)?;
    let worst = lattice_nodes(&d, step)
        .into_iter()
        .filter(|t| d.contains(*t))
        .map(|t| a_eps_coefficient(&walk, t, step).map(|a| (a.normalized - Complex64::new(0.0, -1.0)).norm()))
        .collect::<scalevar::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("random walk: max |eps a_eps + i hbar/m| = {worst:.2e}");
    Ok(())
}
