//! Functionals `Phi_eps(gamma) = int_a^b L(x, box x, t) dt` over Hölder
//! curves, their derivatives, and the extremality test.
//!
//! Curves passed here must be real and restricted to a padded domain; the
//! integration interval is the curve's domain `[a, b]`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    dominant_part, fit_asymptotics, scaling_exponent, AsymptoticFit, DominantPart, EpsilonLadder, ScalingFit,
    DEFAULT_RELATIVE_THRESHOLD,
};
use crate::curves::{make_variation, Curve, CurveDomain, CurveKind, Support};
use crate::error::{Error, Result};
use crate::qcalc::QuantumPair;
use crate::quadrature::SimpsonRule;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Weight of the four-product remainder in
/// `total = el + boundary + i * REMAINDER_WEIGHT * remainder`.
pub const REMAINDER_WEIGHT: f64 = -0.5;

type LFn = Arc<dyn Fn(f64, Complex64, f64) -> Complex64 + Send + Sync>;

/// A Lagrangian `L(x, v, t)`, holomorphic in `v`, with its partials.
#[derive(Clone)]
pub struct LagrangianSpec {
    pub name: String,
    l: LFn,
    dl_dx: LFn,
    dl_dv: LFn,
    /// Bound on the differential of `dL/dv`.
    pub lipschitz_cert: f64,
}

impl fmt::Debug for LagrangianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianSpec")
            .field("name", &self.name)
            .field("lipschitz_cert", &self.lipschitz_cert)
            .finish()
    }
}

impl LagrangianSpec {
    pub fn new<L, X, V>(name: impl Into<String>, l: L, dl_dx: X, dl_dv: V, lipschitz_cert: f64) -> Result<Self>
    where
        L: Fn(f64, Complex64, f64) -> Complex64 + Send + Sync + 'static,
        X: Fn(f64, Complex64, f64) -> Complex64 + Send + Sync + 'static,
        V: Fn(f64, Complex64, f64) -> Complex64 + Send + Sync + 'static,
    {
        if !lipschitz_cert.is_finite() || lipschitz_cert < 0.0 {
            return Err(Error::InvalidParameter(format!("lipschitz_cert must be finite and >= 0, got {lipschitz_cert}")));
        }
        Ok(Self { name: name.into(), l: Arc::new(l), dl_dx: Arc::new(dl_dx), dl_dv: Arc::new(dl_dv), lipschitz_cert })
    }

    #[inline]
    pub fn l(&self, x: f64, v: Complex64, t: f64) -> Complex64 {
        (self.l)(x, v, t)
    }

    #[inline]
    pub fn dl_dx(&self, x: f64, v: Complex64, t: f64) -> Complex64 {
        (self.dl_dx)(x, v, t)
    }

    #[inline]
    pub fn dl_dv(&self, x: f64, v: Complex64, t: f64) -> Complex64 {
        (self.dl_dv)(x, v, t)
    }

    /// `1/2 m v^2`
    pub fn kinetic(mass: f64) -> Self {
        Self::quadratic("kinetic", mass, 0.0, 0.0, 0.0)
    }

    /// `1/2 m v^2 + force * x`
    pub fn constant_force(mass: f64, force: f64) -> Self {
        Self::quadratic("constant-force", mass, force, 0.0, 0.0)
    }

    /// `1/2 m v^2 - 1/2 k x^2`
    pub fn harmonic(mass: f64, stiffness: f64) -> Self {
        Self::quadratic("harmonic", mass, 0.0, stiffness, 0.0)
    }

    /// `1/2 m v^2 + c v^3`; not globally Lipschitz in `v`, so the certificate
    /// covers `|v| <= 1e3` only.
    pub fn cubic(mass: f64, cubic: f64) -> Self {
        Self::quadratic("cubic", mass, 0.0, 0.0, cubic)
    }

    fn quadratic(name: &str, m: f64, force: f64, k: f64, c3: f64) -> Self {
        let cert = m.abs() + 6.0 * c3.abs() * 1e3;
        Self {
            name: name.into(),
            l: Arc::new(move |x, v, _| 0.5 * m * v * v + c3 * v * v * v + force * x - 0.5 * k * x * x),
            dl_dx: Arc::new(move |x, _, _| Complex64::new(force - k * x, 0.0)),
            dl_dv: Arc::new(move |_, v, _| m * v + 3.0 * c3 * v * v),
            lipschitz_cert: cert,
        }
    }

    /// Largest relative disagreement between the supplied partials and
    /// central differences of `L` at `points` random points; an error above
    /// `1e-6`.
    pub fn check_partials(&self, seed: u64, points: usize) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let x: f64 = rng.gen_range(-2.0..2.0);
            let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let t: f64 = rng.gen_range(0.0..1.0);
            let h = 1e-5;
            let fx = (self.l(x + h, v, t) - self.l(x - h, v, t)) / (2.0 * h);
            let fv = (self.l(x, v + h, t) - self.l(x, v - h, t)) / (2.0 * h);
            let scale = |a: Complex64| a.norm().max(1.0);
            let ex = self.dl_dx(x, v, t);
            let ev = self.dl_dv(x, v, t);
            worst = worst.max((fx - ex).norm() / scale(ex)).max((fv - ev).norm() / scale(ev));
        }
        if worst > 1e-6 {
            return Err(Error::Consistency(format!(
                "partials of Lagrangian '{}' disagree with central differences (relative {worst:.3e})",
                self.name
            )));
        }
        Ok(worst)
    }

    /// Largest sampled ratio `|dL/dv(p) - dL/dv(q)| / (|x_p - x_q| + |v_p - v_q|)`
    /// on `|x|, |v| <= 2`. Exceeding the certificate is a warning, not an error.
    pub fn lipschitz_spot_check(&self, seed: u64, samples: usize) -> LipschitzCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut observed: f64 = 0.0;
        for _ in 0..samples {
            let t: f64 = rng.gen_range(0.0..1.0);
            let mut draw = || (rng.gen_range(-2.0..2.0f64), Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let (x1, v1) = draw();
            let (x2, v2) = draw();
            let d = (x1 - x2).abs() + (v1 - v2).norm();
            if d > 0.0 {
                observed = observed.max((self.dl_dv(x1, v1, t) - self.dl_dv(x2, v2, t)).norm() / d);
            }
        }
        LipschitzCheck { observed, certificate: self.lipschitz_cert, warning: observed > self.lipschitz_cert * (1.0 + 1e-9) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub observed: f64,
    pub certificate: f64,
    pub warning: bool,
}

/// Catalog Lagrangians as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lagrangian", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LagrangianConfig {
    Kinetic { mass: f64 },
    ConstantForce { mass: f64, force: f64 },
    Harmonic { mass: f64, stiffness: f64 },
    Cubic { mass: f64, cubic: f64 },
}

impl LagrangianConfig {
    pub fn build(&self) -> LagrangianSpec {
        match *self {
            LagrangianConfig::Kinetic { mass } => LagrangianSpec::kinetic(mass),
            LagrangianConfig::ConstantForce { mass, force } => LagrangianSpec::constant_force(mass, force),
            LagrangianConfig::Harmonic { mass, stiffness } => LagrangianSpec::harmonic(mass, stiffness),
            LagrangianConfig::Cubic { mass, cubic } => LagrangianSpec::cubic(mass, cubic),
        }
    }
}

fn domain_of(c: &Curve, what: &str) -> Result<CurveDomain> {
    if !c.is_real() {
        return Err(Error::InvalidParameter(format!("{what} must be real-valued")));
    }
    match c.support() {
        Support::Padded(d) => Ok(d),
        Support::Line => Err(Error::InvalidParameter(format!("{what} needs a padded domain; restrict it first"))),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive and finite, got {eps}")))
    }
}

/// Integration rule on `[a, b]` whose integrand needs the curve within
/// `reach` of every node.
fn rule_for(c: &Curve, reach: f64, quadrature_points: usize) -> Result<(CurveDomain, SimpsonRule)> {
    let d = domain_of(c, "curve")?;
    c.support().check_window(d.a, reach)?;
    c.support().check_window(d.b, reach)?;
    Ok((d, SimpsonRule::new(d.a, d.b, quadrature_points)?))
}

/// Required variation exponent for a curve of exponent `alpha`.
pub fn required_beta(alpha: f64) -> f64 {
    if alpha >= 0.5 {
        alpha
    } else {
        1.0 - alpha
    }
}

/// Checks that `h` is a variation on `gamma`'s interval with an admissible
/// declared exponent.
pub fn check_admissible(gamma: &Curve, h: &Curve) -> Result<()> {
    if h.kind() != CurveKind::Variation {
        return Err(Error::NotAVariation);
    }
    let d = domain_of(gamma, "curve")?;
    domain_of(h, "variation")?;
    if h.eval(d.a).norm() > 1e-12 || h.eval(d.b).norm() > 1e-12 {
        return Err(Error::NotAVariation);
    }
    let alpha = gamma.exponent().value();
    let beta = h.exponent().value();
    let required = required_beta(alpha);
    if beta + 1e-12 < required {
        return Err(Error::Inadmissible { beta, required, alpha });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: Complex64,
    pub epsilon: f64,
    pub quadrature_points: usize,
    pub quadrature_error_estimate: f64,
}

#[inline]
fn box_at(x: &Curve, t: f64, eps: f64) -> Complex64 {
    QuantumPair::of(|s| x.eval(s), t, eps).scale()
}

pub fn evaluate_functional(l: &LagrangianSpec, gamma: &Curve, eps: f64, quadrature_points: usize) -> Result<FunctionalValue> {
    check_eps(eps)?;
    let (_, rule) = rule_for(gamma, eps, quadrature_points)?;
    let values: Vec<Complex64> = rule
        .nodes()
        .par_iter()
        .map(|&t| l.l(gamma.eval_re(t), box_at(gamma, t, eps), t))
        .collect();
    Ok(FunctionalValue {
        value: rule.apply(&values),
        epsilon: eps,
        quadrature_points,
        quadrature_error_estimate: rule.error_estimate(&values),
    })
}

/// All node quantities of the derivative at one `t`.
struct NodeTerms {
    lx: Complex64,
    f: Complex64,
    h: f64,
    pf: QuantumPair,
    ph: QuantumPair,
    pfh: QuantumPair,
}

fn node_terms(l: &LagrangianSpec, gamma: &Curve, h: &Curve, t: f64, eps: f64) -> NodeTerms {
    let x: [f64; 5] = std::array::from_fn(|k| gamma.eval_re(t + (k as f64 - 2.0) * eps));
    let hv: [f64; 3] = std::array::from_fn(|k| h.eval_re(t + (k as f64 - 1.0) * eps));
    let v = |j: usize| {
        QuantumPair { plus: Complex64::new((x[j + 1] - x[j]) / eps, 0.0), minus: Complex64::new((x[j] - x[j - 1]) / eps, 0.0) }
            .scale()
    };
    let f: [Complex64; 3] = std::array::from_fn(|k| l.dl_dv(x[k + 1], v(k + 1), t + (k as f64 - 1.0) * eps));
    let pair = |a: [Complex64; 3]| QuantumPair { plus: (a[2] - a[1]) / eps, minus: (a[1] - a[0]) / eps };
    let fh: [Complex64; 3] = std::array::from_fn(|k| f[k] * hv[k]);
    NodeTerms {
        lx: l.dl_dx(x[2], v(2), t),
        f: f[1],
        h: hv[1],
        pf: pair(f),
        ph: pair(hv.map(|s| Complex64::new(s, 0.0))),
        pfh: pair(fh),
    }
}

/// `F_eps^gamma(h) = int [dL/dx h + dL/dv box h] dt`.
pub fn functional_derivative(l: &LagrangianSpec, gamma: &Curve, h: &Curve, eps: f64, quadrature_points: usize) -> Result<Complex64> {
    check_eps(eps)?;
    check_admissible(gamma, h)?;
    let (_, rule) = rule_for(gamma, eps, quadrature_points)?;
    let values: Vec<Complex64> = rule
        .nodes()
        .par_iter()
        .map(|&t| {
            let x0 = gamma.eval_re(t);
            let v = box_at(gamma, t, eps);
            l.dl_dx(x0, v, t) * h.eval_re(t) + l.dl_dv(x0, v, t) * box_at(h, t, eps)
        })
        .collect();
    Ok(rule.apply(&values))
}

/// `total = el_term + boundary_term + i * remainder_weight * remainder`, with
/// every piece integrated on the same nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeDecomposition {
    pub total: Complex64,
    /// `int (dL/dx - box f) h`
    pub el_term: Complex64,
    /// `int box(f h)`
    pub boundary_term: Complex64,
    /// `eps int [box f box h - boxm f boxm h - box f boxm h - boxm f box h]`
    pub remainder: Complex64,
    pub remainder_weight: f64,
    pub epsilon: f64,
    /// Sum of the Richardson estimates of the four integrals.
    pub quadrature_error_estimate: f64,
    /// Bound on accumulated rounding in the recombination.
    pub rounding_floor: f64,
    pub recombination_defect: f64,
}

impl DerivativeDecomposition {
    pub fn recombined(&self) -> Complex64 {
        self.el_term + self.boundary_term + I * self.remainder_weight * self.remainder
    }

    pub fn tolerance(&self) -> f64 {
        10.0 * self.quadrature_error_estimate + self.rounding_floor
    }
}

pub fn decompose_derivative(
    l: &LagrangianSpec,
    gamma: &Curve,
    h: &Curve,
    eps: f64,
    quadrature_points: usize,
) -> Result<DerivativeDecomposition> {
    check_eps(eps)?;
    check_admissible(gamma, h)?;
    let (_, rule) = rule_for(gamma, 2.0 * eps, quadrature_points)?;
    let rows: Vec<[Complex64; 5]> = rule
        .nodes()
        .par_iter()
        .map(|&t| {
            let n = node_terms(l, gamma, h, t, eps);
            let (bf, cf) = (n.pf.scale(), n.pf.conj_scale());
            let (bh, ch) = (n.ph.scale(), n.ph.conj_scale());
            let total = n.lx * n.h + n.f * bh;
            let el = (n.lx - bf) * n.h;
            let boundary = n.pfh.scale();
            let rem = eps * (bf * bh - cf * ch - bf * ch - cf * bh);
            // rounding magnitude of the node identity
            let mag = (n.lx * n.h).norm()
                + n.f.norm() * bh.norm()
                + bf.norm() * n.h.abs()
                + boundary.norm()
                + 0.5 * rem.norm()
                + 4.0 * (n.f * n.h).norm() / eps;
            [total, el, boundary, rem, Complex64::new(mag, 0.0)]
        })
        .collect();
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let cols: Vec<Vec<Complex64>> = (0..5).map(column).collect();
    let quad_est: f64 = cols[..4].iter().map(|c| rule.error_estimate(c)).sum();
    let mag = rule.weights().iter().zip(&cols[4]).map(|(w, m)| w.abs() * m.re).sum::<f64>();
    let mut d = DerivativeDecomposition {
        total: rule.apply(&cols[0]),
        el_term: rule.apply(&cols[1]),
        boundary_term: rule.apply(&cols[2]),
        remainder: rule.apply(&cols[3]),
        remainder_weight: REMAINDER_WEIGHT,
        epsilon: eps,
        quadrature_error_estimate: quad_est,
        rounding_floor: 64.0 * f64::EPSILON * mag,
        recombination_defect: 0.0,
    };
    d.recombination_defect = (d.total - d.recombined()).norm();
    if !(d.recombination_defect <= d.tolerance()) {
        return Err(Error::Consistency(format!(
            "derivative decomposition does not recombine: defect {:.3e} > tolerance {:.3e}",
            d.recombination_defect,
            d.tolerance()
        )));
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxCheck {
    pub mu: Vec<f64>,
    pub defects: Vec<f64>,
    /// `None` when every defect is exactly zero.
    pub defect_slope: Option<f64>,
    pub r_squared: Option<f64>,
}

impl GateauxCheck {
    pub fn passes(&self, min_slope: f64) -> bool {
        self.defect_slope.map_or(true, |s| s >= min_slope)
    }
}

/// `|Phi(gamma + mu h) - Phi(gamma) - mu F(h)|` over a `mu` ladder, integrated
/// node by node on one rule.
pub fn gateaux_check(
    l: &LagrangianSpec,
    gamma: &Curve,
    h: &Curve,
    eps: f64,
    mu_ladder: &[f64],
    quadrature_points: usize,
) -> Result<GateauxCheck> {
    check_eps(eps)?;
    check_admissible(gamma, h)?;
    if mu_ladder.iter().any(|m| !(*m > 0.0 && *m <= 1.0)) {
        return Err(Error::InvalidParameter("mu values must lie in (0, 1]".into()));
    }
    if mu_ladder.len() >= 2 {
        let r = mu_ladder[1] / mu_ladder[0];
        if mu_ladder.windows(2).any(|w| ((w[1] / w[0]) / r - 1.0).abs() > 1e-9) {
            return Err(Error::InvalidParameter("mu ladder must be geometric".into()));
        }
    }
    let (_, rule) = rule_for(gamma, eps, quadrature_points)?;
    let base: Vec<(f64, Complex64, f64, Complex64)> = rule
        .nodes()
        .par_iter()
        .map(|&t| (gamma.eval_re(t), box_at(gamma, t, eps), h.eval_re(t), box_at(h, t, eps)))
        .collect();
    let mut defects = Vec::with_capacity(mu_ladder.len());
    for &mu in mu_ladder {
        let values: Vec<Complex64> = rule
            .nodes()
            .iter()
            .zip(&base)
            .map(|(&t, &(x, v, hh, bh))| {
                let lin = l.dl_dx(x, v, t) * hh + l.dl_dv(x, v, t) * bh;
                l.l(x + mu * hh, v + mu * bh, t) - l.l(x, v, t) - mu * lin
            })
            .collect();
        let d = rule.apply(&values).norm();
        if !d.is_finite() {
            return Err(Error::NonFinite(format!("Gateaux defect at mu = {mu}")));
        }
        defects.push(d);
    }
    let (defect_slope, r_squared) = if defects.iter().all(|d| *d == 0.0) {
        (None, None)
    } else {
        let fit = scaling_exponent(&mu_ladder.iter().cloned().zip(defects.iter().cloned()).collect::<Vec<_>>())?;
        (Some(fit.slope), Some(fit.r_squared))
    };
    Ok(GateauxCheck { mu: mu_ladder.to_vec(), defects, defect_slope, r_squared })
}

/// `dL/dx(x, box x, t) - box[s -> dL/dv(x(s), box x(s), s)](t)`.
pub fn euler_lagrange_residual(l: &LagrangianSpec, gamma: &Curve, eps: f64, t: f64) -> Result<Complex64> {
    check_eps(eps)?;
    let d = domain_of(gamma, "curve")?;
    if !d.contains(t) {
        return Err(Error::InvalidParameter(format!("t = {t} lies outside [{}, {}]", d.a, d.b)));
    }
    gamma.support().check_window(t, 2.0 * eps)?;
    let f = |s: f64| l.dl_dv(gamma.eval_re(s), box_at(gamma, s, eps), s);
    let bf = QuantumPair::of(f, t, eps).scale();
    Ok(l.dl_dx(gamma.eval_re(t), box_at(gamma, t, eps), t) - bf)
}

/// A variation with the identity used in reports.
#[derive(Debug, Clone)]
pub struct NamedVariation {
    pub id: String,
    pub curve: Curve,
}

/// `size` variations at the admissibility boundary for `gamma`, seeded
/// `seed, seed + 1, ...`.
pub fn variation_battery(gamma: &Curve, size: usize, seed: u64) -> Result<Vec<NamedVariation>> {
    let d = domain_of(gamma, "curve")?;
    let beta = required_beta(gamma.exponent().value());
    (0..size as u64)
        .map(|k| {
            Ok(NamedVariation {
                id: format!("h{k}-beta{beta}-seed{}", seed + k),
                curve: make_variation(beta, d, seed + k)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationOutcome {
    pub id: String,
    pub epsilons: Vec<f64>,
    pub values: Vec<Complex64>,
    pub fit: Option<AsymptoticFit>,
    pub dominant: Option<DominantPart>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub per_variation: Vec<VariationOutcome>,
    pub verdict: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalityOptions {
    pub basis: Vec<f64>,
    /// Significance threshold relative to the largest fitted coefficient.
    pub relative_threshold: f64,
    pub quadrature_points: usize,
}

impl Default for ExtremalityOptions {
    fn default() -> Self {
        Self {
            basis: crate::asymptotics::DEFAULT_BASIS.to_vec(),
            relative_threshold: DEFAULT_RELATIVE_THRESHOLD,
            quadrature_points: 4096,
        }
    }
}

/// Fits `F_eps^gamma(h)` over the ladder for every variation and extracts
/// its dominant part. Failures are reported per variation.
pub fn extremality_test(
    l: &LagrangianSpec,
    gamma: &Curve,
    battery: &[NamedVariation],
    ladder: &EpsilonLadder,
    tolerance: f64,
    options: &ExtremalityOptions,
) -> Result<ExtremalityReport> {
    if battery.is_empty() {
        return Err(Error::InvalidParameter("variation battery is empty".into()));
    }
    for v in battery {
        check_admissible(gamma, &v.curve)?;
    }
    let jobs: Vec<(usize, f64)> =
        (0..battery.len()).flat_map(|i| ladder.values().iter().map(move |&e| (i, e))).collect();
    let results: Vec<Result<Complex64>> = jobs
        .par_iter()
        .map(|&(i, e)| functional_derivative(l, gamma, &battery[i].curve, e, options.quadrature_points))
        .collect();

    let rungs = ladder.len();
    let per_variation: Vec<VariationOutcome> = battery
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let chunk = &results[i * rungs..(i + 1) * rungs];
            let mut outcome = VariationOutcome {
                id: v.id.clone(),
                epsilons: ladder.values().to_vec(),
                values: Vec::new(),
                fit: None,
                dominant: None,
                error: None,
                passed: false,
            };
            let values: Result<Vec<Complex64>> = chunk.iter().cloned().collect();
            let fitted = values.and_then(|vals| {
                outcome.values = vals.clone();
                let samples: Vec<(f64, Complex64)> = ladder.values().iter().cloned().zip(vals).collect();
                fit_asymptotics(&samples, &options.basis)
            });
            match fitted {
                Ok(fit) => {
                    let threshold =
                        options.relative_threshold * fit.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    let dom = dominant_part(&fit, threshold);
                    outcome.passed = dom.magnitude() <= tolerance;
                    outcome.fit = Some(fit);
                    outcome.dominant = Some(dom);
                }
                Err(e) => outcome.error = Some(e.to_string()),
            }
            outcome
        })
        .collect();
    let verdict = per_variation.iter().all(|o| o.passed);
    Ok(ExtremalityReport { per_variation, verdict, tolerance })
}

/// Boundary and weighted-remainder magnitudes over a ladder with their
/// log-log fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub epsilons: Vec<f64>,
    pub boundary: Vec<f64>,
    pub remainder: Vec<f64>,
    pub boundary_fit: ScalingFit,
    pub remainder_fit: ScalingFit,
}

pub fn scaling_study(
    l: &LagrangianSpec,
    gamma: &Curve,
    h: &Curve,
    ladder: &EpsilonLadder,
    quadrature_points: usize,
) -> Result<ScalingStudy> {
    let parts: Vec<Result<DerivativeDecomposition>> = ladder
        .values()
        .par_iter()
        .map(|&e| decompose_derivative(l, gamma, h, e, quadrature_points))
        .collect();
    let parts: Vec<DerivativeDecomposition> = parts.into_iter().collect::<Result<_>>()?;
    let eps = ladder.values().to_vec();
    let boundary: Vec<f64> = parts.iter().map(|d| d.boundary_term.norm()).collect();
    let remainder: Vec<f64> = parts.iter().map(|d| d.remainder.norm()).collect();
    let zip = |v: &[f64]| eps.iter().cloned().zip(v.iter().cloned()).collect::<Vec<_>>();
    Ok(ScalingStudy {
        boundary_fit: scaling_exponent(&zip(&boundary))?,
        remainder_fit: scaling_exponent(&zip(&remainder))?,
        epsilons: eps,
        boundary,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_variation_with, weierstrass, Carrier, Envelope};
    use crate::quadrature::simpson;

    fn unit() -> CurveDomain {
        CurveDomain::new(0.0, 1.0, 0.25).unwrap()
    }

    fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Curve {
        Curve::smooth(f).restricted_to(unit())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn catalog_partials_are_consistent() {
        for l in [
            LagrangianSpec::kinetic(2.0),
            LagrangianSpec::constant_force(0.5, 1.0),
            LagrangianSpec::harmonic(1.0, 3.0),
            LagrangianSpec::cubic(1.0, 0.2),
        ] {
            assert!(l.check_partials(7, 50).unwrap() < 1e-6, "{}", l.name);
            assert!(!l.lipschitz_spot_check(3, 200).warning, "{}", l.name);
        }
        let bad = LagrangianSpec::new("bad", |_, v, _| v * v, |_, _, _| c(0.0, 0.0), |_, v, _| v, 0.5).unwrap();
        assert!(bad.check_partials(1, 10).is_err());
        assert!(bad.lipschitz_spot_check(1, 100).warning);
    }

    #[test]
    fn functional_examples() {
        let id = smooth(|t| t);
        let v = evaluate_functional(&LagrangianSpec::kinetic(2.0), &id, 0.01, 256).unwrap();
        assert!((v.value - c(1.0, 0.0)).norm() < 1e-13);
        let sq = smooth(|t| t * t);
        for e in [0.125, 0.01] {
            let v = evaluate_functional(&LagrangianSpec::kinetic(1.0), &sq, e, 256).unwrap();
            // int_0^1 1/2 (2t - i e)^2 dt
            let exact = c(2.0 / 3.0 - e * e / 2.0, -e);
            assert!((v.value - exact).norm() < 1e-12, "{:?}", v.value);
        }
        let w = weierstrass(0.5, 2, 30).unwrap().restricted_to(unit());
        let pot = LagrangianSpec::harmonic(0.0, -2.0);
        let a = evaluate_functional(&pot, &w, 0.1, 512).unwrap().value;
        let b = evaluate_functional(&pot, &w, 0.001, 512).unwrap().value;
        assert!((a - b).norm() < 1e-12);
        assert!(evaluate_functional(&pot, &w, 0.3, 512).is_err());
    }

    #[test]
    fn admissibility() {
        let d = unit();
        let w = weierstrass(0.5, 2, 30).unwrap().restricted_to(d);
        let low = make_variation(0.4, d, 1).unwrap();
        assert_eq!(
            check_admissible(&w, &low).unwrap_err(),
            Error::Inadmissible { beta: 0.4, required: 0.5, alpha: 0.5 }
        );
        let ok = make_variation(0.5, d, 1).unwrap();
        assert!(check_admissible(&w, &ok).is_ok());
        let rough = weierstrass(0.3, 2, 30).unwrap().restricted_to(d);
        assert!(matches!(check_admissible(&rough, &ok), Err(Error::Inadmissible { .. })));
        assert!(check_admissible(&rough, &make_variation(0.7, d, 1).unwrap()).is_ok());
        let not_var = smooth(|t| t);
        assert_eq!(check_admissible(&w, &not_var).unwrap_err(), Error::NotAVariation);
        let smooth_gamma = smooth(|t| t * t);
        assert!(check_admissible(&smooth_gamma, &ok).is_err());
        assert!(check_admissible(&smooth_gamma, &make_variation(1.0, d, 1).unwrap()).is_ok());
    }

    #[test]
    fn derivative_of_free_motion_is_the_integral_formula() {
        let id = smooth(|t| t);
        let h = make_variation(1.0, unit(), 4).unwrap();
        let e = 0.0625;
        let f = functional_derivative(&LagrangianSpec::kinetic(1.0), &id, &h, e, 1024).unwrap();
        let direct = simpson(|t| box_at(&h, t, e), 0.0, 1.0, 1024).unwrap();
        assert!((f - direct).norm() < 1e-14);
    }

    #[test]
    fn derivative_is_linear_in_the_variation() {
        let d = unit();
        let w = weierstrass(0.5, 2, 30).unwrap().restricted_to(d);
        let l = LagrangianSpec::cubic(1.0, 0.1);
        let (h1, h2) = (make_variation(0.5, d, 1).unwrap(), make_variation(0.5, d, 2).unwrap());
        let sum = Curve::combination(&[(1.0, h1.clone()), (-2.5, h2.clone())]).unwrap();
        let e = 1.0 / 64.0;
        let f1 = functional_derivative(&l, &w, &h1, e, 512).unwrap();
        let f2 = functional_derivative(&l, &w, &h2, e, 512).unwrap();
        let fs = functional_derivative(&l, &w, &sum, e, 512).unwrap();
        assert!((fs - (f1 - 2.5 * f2)).norm() <= 1e-11 * (f1.norm() + f2.norm()));
        let zero = Curve::combination(&[(0.0, h1)]).unwrap();
        assert_eq!(functional_derivative(&l, &w, &zero, e, 512).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn decomposition_recombines() {
        let d = unit();
        let w = weierstrass(0.5, 2, 30).unwrap().restricted_to(d);
        let h = make_variation(0.5, d, 9).unwrap();
        for l in [LagrangianSpec::kinetic(1.0), LagrangianSpec::cubic(1.0, 0.3), LagrangianSpec::harmonic(2.0, 1.0)] {
            let dec = decompose_derivative(&l, &w, &h, 1.0 / 32.0, 1024).unwrap();
            let total = functional_derivative(&l, &w, &h, 1.0 / 32.0, 1024).unwrap();
            assert!((dec.total - total).norm() <= 1e-12 * total.norm().max(1.0));
            assert!(dec.recombination_defect <= dec.tolerance());
        }
    }

    #[test]
    fn free_motion_el_term_vanishes() {
        let l = LagrangianSpec::kinetic(1.0);
        let id = smooth(|t| 0.3 + 2.0 * t);
        let h = make_variation(1.0, unit(), 2).unwrap();
        let dec = decompose_derivative(&l, &id, &h, 1.0 / 16.0, 1024).unwrap();
        assert!(dec.el_term.norm() < 1e-12);
    }

    #[test]
    fn gateaux_quadratic_is_exact() {
        let d = unit();
        let w = weierstrass(0.5, 2, 30).unwrap().restricted_to(d);
        let h = make_variation(0.5, d, 3).unwrap();
        let (m, e) = (3.0, 1.0 / 32.0);
        let mus: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
        let g = gateaux_check(&LagrangianSpec::kinetic(m), &w, &h, e, &mus, 512).unwrap();
        assert!((g.defect_slope.unwrap() - 2.0).abs() < 0.01);
        let q = simpson(|t| box_at(&h, t, e).powu(2), 0.0, 1.0, 512).unwrap() * (0.5 * m);
        for (mu, def) in mus.iter().zip(&g.defects) {
            assert!((def - mu * mu * q.norm()).abs() <= 1e-9 * def);
        }
        let cubic = gateaux_check(&LagrangianSpec::cubic(1.0, 0.5), &w, &h, e, &mus, 512).unwrap();
        assert!(cubic.defect_slope.unwrap() >= 1.9);
        let zero = Curve::combination(&[(0.0, h)]).unwrap();
        let z = gateaux_check(&LagrangianSpec::cubic(1.0, 0.5), &w, &zero, e, &mus, 512).unwrap();
        assert!(z.defects.iter().all(|d| *d == 0.0) && z.passes(1.9));
    }

    #[test]
    fn euler_lagrange_examples() {
        let m = 2.0;
        let x = smooth(move |t| t * t / (2.0 * m));
        let l = LagrangianSpec::constant_force(m, 1.0);
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for e in [0.125, 0.0625, 1.0 / 1024.0] {
                assert_eq!(euler_lagrange_residual(&l, &x, e, t).unwrap(), c(0.0, 0.0));
            }
        }
        let id = smooth(|t| t);
        assert_eq!(euler_lagrange_residual(&LagrangianSpec::kinetic(1.0), &id, 0.1, 0.5).unwrap(), c(0.0, 0.0));
        let r = euler_lagrange_residual(&LagrangianSpec::constant_force(1.0, 1.0), &id, 0.0625, 0.5).unwrap();
        assert_eq!(r, c(1.0, 0.0));
        assert!(matches!(euler_lagrange_residual(&l, &x, 0.2, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn euler_lagrange_has_the_classical_limit() {
        // L = 1/2 v^2 - 1/2 x^2, x = exp(t): classical residual -x - x'' = -2 e^t
        let l = LagrangianSpec::harmonic(1.0, 1.0);
        let x = smooth(f64::exp);
        let t = 0.4;
        let samples: Vec<(f64, f64)> = (0..8)
            .map(|k| {
                let e = 1e-2 * 0.5f64.powi(k);
                (e, (euler_lagrange_residual(&l, &x, e, t).unwrap() - c(-2.0 * t.exp(), 0.0)).norm())
            })
            .collect();
        let fit = scaling_exponent(&samples).unwrap();
        assert!(fit.slope >= 0.99, "{fit:?}");
    }

    #[test]
    fn extremality_of_free_motion() {
        let id = smooth(|t| t);
        let battery = variation_battery(&id, 5, 11).unwrap();
        let ladder = EpsilonLadder::geometric(0.125, 0.5, 8).unwrap();
        let r = extremality_test(&LagrangianSpec::kinetic(1.0), &id, &battery, &ladder, 1e-6, &ExtremalityOptions::default())
            .unwrap();
        assert!(r.verdict, "{:#?}", r.per_variation[0]);
        assert_eq!(r.per_variation.len(), 5);
    }

    #[test]
    fn non_extremal_fails_with_the_integral_of_the_variation() {
        let id = smooth(|t| t);
        let h = make_variation_with(1.0, unit(), 5, Carrier::Linear, Envelope::default()).unwrap();
        let battery = vec![NamedVariation { id: "h".into(), curve: h.clone() }];
        let ladder = EpsilonLadder::geometric(0.125, 0.5, 8).unwrap();
        let r = extremality_test(
            &LagrangianSpec::constant_force(1.0, 1.0),
            &id,
            &battery,
            &ladder,
            1e-6,
            &ExtremalityOptions::default(),
        )
        .unwrap();
        assert!(!r.verdict);
        let dom = r.per_variation[0].dominant.as_ref().unwrap();
        let ih = simpson(|t| h.eval(t), 0.0, 1.0, 4096).unwrap();
        assert!((dom.coefficient(0.0) - ih).norm() <= 0.05 * ih.norm(), "{dom:?} vs {ih}");
    }
}
