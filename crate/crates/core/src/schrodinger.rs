//! Wavefunctions, the complex velocity field `-2 i gamma_d d ln psi / dx`,
//! and residuals of the nonlinear and linear Schrödinger equations.
//!
//! Every residual here is reported per unit `psi`. With `g = psi_x / psi`
//! the nonlinear residual is
//!
//! ```text
//! 2 i gamma_d m [ -g^2 (i gamma_d + a/2) + psi_t/psi + (a/2) psi_xx/psi ] - (U + gauge)
//! ```
//!
//! and under `gamma_d = hbar / 2m`, `a = -i hbar / m` the factor
//! `i gamma_d + a/2` vanishes, leaving the linear residual divided by `psi`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{Curve, SmoothFn};
use crate::error::{Error, Result};
use crate::qcalc::{quantum_derivative, Direction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Constant relating the nonlinear residual to the per-unit linear residual.
pub const REDUCTION_FACTOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub mass: f64,
    pub gamma_d: f64,
    pub hbar: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, gamma_d: f64, hbar: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !gamma_d.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma_d must be finite, got {gamma_d}")));
        }
        Ok(Self { mass, gamma_d, hbar })
    }

    /// `gamma_d = hbar / 2m`.
    pub fn linear(mass: f64, hbar: f64) -> Result<Self> {
        Self::new(mass, hbar / (2.0 * mass), hbar)
    }

    pub fn is_linear(&self) -> bool {
        (self.gamma_d * 2.0 * self.mass - self.hbar).abs() <= 1e-12 * self.hbar
    }

    pub fn require_linear(&self) -> Result<()> {
        if self.is_linear() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "linear mode needs gamma_d * 2m = hbar, got {} vs {}",
                self.gamma_d * 2.0 * self.mass,
                self.hbar
            )))
        }
    }

    /// `-i hbar / m`, the coefficient of the linear reduction.
    pub fn linear_a_eps(&self) -> Complex64 {
        Complex64::new(0.0, -self.hbar / self.mass)
    }
}

type PsiFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// An analytic wavefunction with its partial derivatives.
#[derive(Clone)]
pub struct WaveFunction {
    pub name: String,
    psi: PsiFn,
    dx: PsiFn,
    dxx: PsiFn,
    dt: PsiFn,
    dxxx: Option<PsiFn>,
    dxt: Option<PsiFn>,
    pub zero_tolerance: f64,
}

impl fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunction")
            .field("name", &self.name)
            .field("third_order", &self.dxxx.is_some())
            .field("zero_tolerance", &self.zero_tolerance)
            .finish()
    }
}

/// Values of `psi` and its partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiJet {
    pub psi: Complex64,
    pub dx: Complex64,
    pub dxx: Complex64,
    pub dt: Complex64,
}

pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-200;

impl WaveFunction {
    pub fn new<P, X, XX, T>(name: impl Into<String>, psi: P, dx: X, dxx: XX, dt: T) -> Self
    where
        P: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        X: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        XX: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        T: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            psi: Arc::new(psi),
            dx: Arc::new(dx),
            dxx: Arc::new(dxx),
            dt: Arc::new(dt),
            dxxx: None,
            dxt: None,
            zero_tolerance: DEFAULT_ZERO_TOLERANCE,
        }
    }

    /// Adds `psi_xxx` and `psi_xt`, needed by the least-action pipeline.
    pub fn with_third_order<XXX, XT>(mut self, dxxx: XXX, dxt: XT) -> Self
    where
        XXX: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        XT: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        self.dxxx = Some(Arc::new(dxxx));
        self.dxt = Some(Arc::new(dxt));
        self
    }

    pub fn with_zero_tolerance(mut self, tol: f64) -> Self {
        self.zero_tolerance = tol;
        self
    }

    pub fn psi(&self, x: f64, t: f64) -> Complex64 {
        (self.psi)(x, t)
    }

    pub fn jet(&self, x: f64, t: f64) -> PsiJet {
        PsiJet { psi: (self.psi)(x, t), dx: (self.dx)(x, t), dxx: (self.dxx)(x, t), dt: (self.dt)(x, t) }
    }

    fn checked_psi(&self, x: f64, t: f64) -> Result<Complex64> {
        let p = self.psi(x, t);
        if p.norm() <= self.zero_tolerance {
            return Err(Error::Node { x, t, modulus: p.norm() });
        }
        Ok(p)
    }

    /// `psi_0 = exp(-(x - x0)^2 / 2 sigma^2 + i k0 (x - x0))` evolved freely.
    pub fn gaussian_packet(x0: f64, k0: f64, width: f64, params: PhysicalParams) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!("packet width must be positive, got {width}")));
        }
        let sig2 = width * width;
        let c = params.hbar / params.mass;
        let s = move |t: f64| Complex64::new(sig2, c * t);
        let y = move |x: f64| Complex64::new(x - x0, -k0 * sig2);
        let psi = move |x: f64, t: f64| {
            let (s, y) = (s(t), y(x));
            (Complex64::new(sig2, 0.0) / s).sqrt() * (-(y * y) / (2.0 * s) - 0.5 * k0 * k0 * sig2).exp()
        };
        let half_ic = I * (0.5 * c);
        let dxx = move |x: f64, t: f64| {
            let (s, y) = (s(t), y(x));
            (y * y / (s * s) - 1.0 / s) * psi(x, t)
        };
        let dxxx = move |x: f64, t: f64| {
            let (s, y) = (s(t), y(x));
            (3.0 * y / (s * s) - y * y * y / (s * s * s)) * psi(x, t)
        };
        Ok(Self::new(
            "gaussian-packet",
            psi,
            move |x, t| -(y(x) / s(t)) * psi(x, t),
            dxx,
            move |x, t| half_ic * dxx(x, t),
        )
        .with_third_order(dxxx, move |x, t| half_ic * dxxx(x, t)))
    }

    /// `exp(-m omega x^2 / 2 hbar - i omega t / 2)`.
    pub fn harmonic_ground(mass: f64, omega: f64, hbar: f64) -> Self {
        let b = mass * omega / hbar;
        let psi = move |x: f64, t: f64| Complex64::new(-0.5 * b * x * x, -0.5 * omega * t).exp();
        let w = Complex64::new(0.0, -0.5 * omega);
        Self::new(
            "harmonic-ground",
            psi,
            move |x, t| -b * x * psi(x, t),
            move |x, t| (b * b * x * x - b) * psi(x, t),
            move |x, t| w * psi(x, t),
        )
        .with_third_order(
            move |x, t| (3.0 * b * b * x - b * b * b * x * x * x) * psi(x, t),
            move |x, t| w * (-b * x) * psi(x, t),
        )
    }

    /// `exp(i (k x - omega t))`.
    pub fn plane_wave(k: f64, omega: f64) -> Self {
        let psi = move |x: f64, t: f64| Complex64::new(0.0, k * x - omega * t).exp();
        Self::new(
            "plane-wave",
            psi,
            move |x, t| I * k * psi(x, t),
            move |x, t| -k * k * psi(x, t),
            move |x, t| -I * omega * psi(x, t),
        )
        .with_third_order(move |x, t| -I * k * k * k * psi(x, t), move |x, t| k * omega * psi(x, t))
    }

    pub fn constant(c: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new("constant", move |_, _| c, move |_, _| z, move |_, _| z, move |_, _| z)
            .with_third_order(move |_, _| z, move |_, _| z)
    }

    /// Largest relative disagreement between the supplied partials and
    /// central differences at `probes` random points of `[x_lo, x_hi] x [t_lo, t_hi]`;
    /// an error above `1e-6`.
    pub fn check_partials(&self, seed: u64, probes: usize, x_range: (f64, f64), t_range: (f64, f64)) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let rel = |num: Complex64, exact: Complex64, scale: f64| (num - exact).norm() / scale.max(1e-300);
        for _ in 0..probes {
            let x: f64 = rng.gen_range(x_range.0..=x_range.1);
            let t: f64 = rng.gen_range(t_range.0..=t_range.1);
            let h = 1e-4;
            let p = |dx: f64, dt: f64| self.psi(x + dx, t + dt);
            let j = self.jet(x, t);
            let scale = j.psi.norm().max(j.dx.norm()).max(j.dxx.norm()).max(j.dt.norm());
            let mut errs = vec![
                rel((p(h, 0.0) - p(-h, 0.0)) / (2.0 * h), j.dx, scale),
                rel((p(h, 0.0) - 2.0 * j.psi + p(-h, 0.0)) / (h * h), j.dxx, scale),
                rel((p(0.0, h) - p(0.0, -h)) / (2.0 * h), j.dt, scale),
            ];
            if let (Some(f3), Some(fxt)) = (&self.dxxx, &self.dxt) {
                let dxx = |dx: f64, dt: f64| (self.dxx)(x + dx, t + dt);
                let dx = |dt: f64| (self.dx)(x, t + dt);
                let s3 = f3(x, t).norm().max(scale);
                errs.push(rel((dxx(h, 0.0) - dxx(-h, 0.0)) / (2.0 * h), f3(x, t), s3));
                errs.push(rel((dx(h) - dx(-h)) / (2.0 * h), fxt(x, t), s3.max(fxt(x, t).norm())));
            }
            worst = errs.into_iter().fold(worst, f64::max);
        }
        if worst > 1e-6 {
            return Err(Error::Consistency(format!(
                "partials of wavefunction '{}' disagree with central differences (relative {worst:.3e})",
                self.name
            )));
        }
        Ok(worst)
    }
}

/// Catalog wavefunctions as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "wavefunction", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WaveFunctionConfig {
    GaussianPacket { x0: f64, k0: f64, width: f64 },
    HarmonicGround { mass: f64, omega: f64 },
    PlaneWave { k: f64, omega: f64 },
}

impl WaveFunctionConfig {
    pub fn build(&self, params: PhysicalParams) -> Result<WaveFunction> {
        match *self {
            WaveFunctionConfig::GaussianPacket { x0, k0, width } => WaveFunction::gaussian_packet(x0, k0, width, params),
            WaveFunctionConfig::HarmonicGround { mass, omega } => {
                if (mass - params.mass).abs() > 1e-12 * params.mass {
                    return Err(Error::InvalidParameter(format!(
                        "harmonic-ground mass {mass} differs from the physical mass {}",
                        params.mass
                    )));
                }
                Ok(WaveFunction::harmonic_ground(mass, omega, params.hbar))
            }
            WaveFunctionConfig::PlaneWave { k, omega } => Ok(WaveFunction::plane_wave(k, omega)),
        }
    }

    /// Potential the catalog state is meant to solve: `1/2 m omega^2 x^2`
    /// for the oscillator, zero otherwise.
    pub fn natural_potential(&self) -> SmoothFn {
        match *self {
            WaveFunctionConfig::HarmonicGround { mass, omega } => {
                SmoothFn::Polynomial { coeffs: vec![0.0, 0.0, 0.5 * mass * omega * omega] }
            }
            _ => SmoothFn::Polynomial { coeffs: vec![0.0] },
        }
    }
}

/// `-2 i gamma_d psi_x / psi`.
pub fn velocity_field(wf: &WaveFunction, params: &PhysicalParams, x: f64, t: f64) -> Result<Complex64> {
    let p = wf.checked_psi(x, t)?;
    Ok(-2.0 * I * params.gamma_d * (wf.dx)(x, t) / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AEps {
    pub raw: Complex64,
    /// `eps * raw`
    pub normalized: Complex64,
}

/// `raw = 1/2 [ ((D+ x)^2 - (D- x)^2) - i ((D+ x)^2 + (D- x)^2) ]`.
pub fn a_eps_coefficient(x: &Curve, t: f64, eps: f64) -> Result<AEps> {
    let p = quantum_derivative(x, t, eps, Direction::Plus)?.re;
    let m = quantum_derivative(x, t, eps, Direction::Minus)?.re;
    let raw = Complex64::new(0.5 * (p * p - m * m), -0.5 * (p * p + m * m));
    Ok(AEps { raw, normalized: raw * eps })
}

/// Per-unit nonlinear residual at one point, with the magnitude of its
/// largest term.
fn nls_terms(
    wf: &WaveFunction,
    u: &SmoothFn,
    gauge: &SmoothFn,
    params: &PhysicalParams,
    a_eps: Complex64,
    x: f64,
    t: f64,
) -> Result<(Complex64, f64)> {
    let p = wf.checked_psi(x, t)?;
    let j = wf.jet(x, t);
    let g = j.dx / p;
    let pref = 2.0 * I * params.gamma_d * params.mass;
    let terms = [
        pref * (-(g * g) * (I * params.gamma_d + 0.5 * a_eps)),
        pref * (j.dt / p),
        pref * (0.5 * a_eps * j.dxx / p),
        Complex64::new(-u.eval(x), 0.0),
        Complex64::new(-gauge.eval(x), 0.0),
    ];
    let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((terms.iter().sum(), scale))
}

pub fn nls_residual(
    wf: &WaveFunction,
    u: &SmoothFn,
    gauge: &SmoothFn,
    params: &PhysicalParams,
    a_eps: Complex64,
    x: f64,
    t: f64,
) -> Result<Complex64> {
    Ok(nls_terms(wf, u, gauge, params, a_eps, x, t)?.0)
}

/// `i hbar psi_t + (hbar^2 / 2m) psi_xx - U psi`, not divided by `psi`.
pub fn linear_residual(wf: &WaveFunction, u: &SmoothFn, params: &PhysicalParams, x: f64, t: f64) -> Complex64 {
    let j = wf.jet(x, t);
    I * params.hbar * j.dt + params.hbar * params.hbar / (2.0 * params.mass) * j.dxx - u.eval(x) * j.psi
}

fn linear_terms(wf: &WaveFunction, u: &SmoothFn, params: &PhysicalParams, x: f64, t: f64) -> Result<(Complex64, f64)> {
    let p = wf.checked_psi(x, t)?;
    let j = wf.jet(x, t);
    let terms = [
        I * params.hbar * j.dt / p,
        params.hbar * params.hbar / (2.0 * params.mass) * j.dxx / p,
        Complex64::new(-u.eval(x), 0.0),
    ];
    let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((terms.iter().sum(), scale))
}

/// Uniform `nx x nt` grid, `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let lin = |lo: f64, hi: f64, n: usize, k: usize| if n <= 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
        (0..self.nt)
            .flat_map(|j| (0..self.nx).map(move |i| (lin(self.x_min, self.x_max, self.nx, i), lin(self.t_min, self.t_max, self.nt, j))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeResidualReport {
    pub grid: Vec<(f64, f64)>,
    pub residuals: Vec<Complex64>,
    pub max_abs: f64,
    /// Largest per-unit term magnitude over the grid, including `|U|`.
    pub rel_scale: f64,
}

impl PdeResidualReport {
    fn collect(grid: Vec<(f64, f64)>, rows: Vec<Result<(Complex64, f64)>>) -> Result<Self> {
        let rows: Vec<(Complex64, f64)> = rows.into_iter().collect::<Result<_>>()?;
        let max_abs = rows.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
        let rel_scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        Ok(Self { grid, residuals: rows.into_iter().map(|r| r.0).collect(), max_abs, rel_scale })
    }

    /// `max_abs / rel_scale`, zero when both vanish.
    pub fn relative(&self) -> f64 {
        if self.max_abs == 0.0 {
            0.0
        } else {
            self.max_abs / self.rel_scale
        }
    }
}

pub fn nls_report(
    wf: &WaveFunction,
    u: &SmoothFn,
    gauge: &SmoothFn,
    params: &PhysicalParams,
    a_eps: Complex64,
    grid: &GridSpec,
) -> Result<PdeResidualReport> {
    let pts = grid.points();
    let rows = pts.par_iter().map(|&(x, t)| nls_terms(wf, u, gauge, params, a_eps, x, t)).collect();
    PdeResidualReport::collect(pts, rows)
}

/// Per-unit linear residuals over a grid.
pub fn linear_report(wf: &WaveFunction, u: &SmoothFn, params: &PhysicalParams, grid: &GridSpec) -> Result<PdeResidualReport> {
    let pts = grid.points();
    let rows = pts.par_iter().map(|&(x, t)| linear_terms(wf, u, params, x, t)).collect();
    PdeResidualReport::collect(pts, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub max_discrepancy: f64,
    pub rel_scale: f64,
    pub factor: f64,
}

/// `max |nls_residual(a = -i hbar/m, gauge = 0) - REDUCTION_FACTOR * linear_residual / psi|`.
pub fn reduction_check(wf: &WaveFunction, u: &SmoothFn, params: &PhysicalParams, grid: &GridSpec) -> Result<ReductionCheck> {
    params.require_linear()?;
    let zero = SmoothFn::Polynomial { coeffs: vec![0.0] };
    let a = params.linear_a_eps();
    let rows: Vec<Result<(f64, f64)>> = grid
        .points()
        .par_iter()
        .map(|&(x, t)| {
            let (n, s1) = nls_terms(wf, u, &zero, params, a, x, t)?;
            let (_, s2) = linear_terms(wf, u, params, x, t)?;
            let l = linear_residual(wf, u, params, x, t) / wf.psi(x, t);
            Ok(((n - REDUCTION_FACTOR * l).norm(), s1.max(s2)))
        })
        .collect();
    let rows: Vec<(f64, f64)> = rows.into_iter().collect::<Result<_>>()?;
    Ok(ReductionCheck {
        max_discrepancy: rows.iter().map(|r| r.0).fold(0.0, f64::max),
        rel_scale: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        factor: REDUCTION_FACTOR,
    })
}

/// Pushes the Euler-Lagrange equation through the order-2 chain rule: with
/// `g = psi_x / psi`, the image of `box g` is
/// `g_t - 2 i gamma_d g g_x + (a/2) g_xx`, and `2 i gamma_d m` times it must
/// equal `U' + gauge'` at every `x`.
pub fn least_action_pipeline(
    wf: &WaveFunction,
    u: &SmoothFn,
    gauge: &SmoothFn,
    params: &PhysicalParams,
    a_eps: Complex64,
    x_grid: &[f64],
    t: f64,
) -> Result<PdeResidualReport> {
    let f3 = wf.dxxx.as_ref().ok_or(Error::MissingPartial(3))?;
    let fxt = wf.dxt.as_ref().ok_or(Error::MissingPartial(3))?;
    let rows = x_grid
        .par_iter()
        .map(|&x| {
            let p = wf.checked_psi(x, t)?;
            let j = wf.jet(x, t);
            let g = j.dx / p;
            let r2 = j.dxx / p;
            let gx = r2 - g * g;
            let gxx = f3(x, t) / p - 3.0 * g * r2 + 2.0 * g * g * g;
            let gt = fxt(x, t) / p - g * j.dt / p;
            let pref = 2.0 * I * params.gamma_d * params.mass;
            let terms = [
                pref * gt,
                pref * (-2.0 * I * params.gamma_d * g * gx),
                pref * (0.5 * a_eps * gxx),
                Complex64::new(-u.derivative(x), 0.0),
                Complex64::new(-gauge.derivative(x), 0.0),
            ];
            Ok((terms.iter().sum(), terms.iter().map(|z| z.norm()).fold(0.0, f64::max)))
        })
        .collect();
    PdeResidualReport::collect(x_grid.iter().map(|&x| (x, t)).collect(), rows)
}
