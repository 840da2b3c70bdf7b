//! Hölderian test curves and the variations used to perturb them.
//!
//! Every [`Curve`] is an immutable, thread-safe map `t -> value` built once
//! and then evaluated many times. Random constructions (lattice walks,
//! variation phases) draw from a seeded ChaCha stream at construction time,
//! so a curve is a pure function of its parameters and seed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::linear_fit;
use crate::error::{Error, Result};

/// Interval `[a, b]` together with the padding `pad` on both sides on which
/// a curve must be defined so that difference quotients at the endpoints
/// make sense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDomain {
    pub a: f64,
    pub b: f64,
    pub pad: f64,
}

impl CurveDomain {
    pub fn new(a: f64, b: f64, pad: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!("domain needs a < b, got [{a}, {b}]")));
        }
        if !(pad > 0.0 && pad.is_finite()) {
            return Err(Error::InvalidParameter(format!("domain padding must be positive, got {pad}")));
        }
        Ok(Self { a, b, pad })
    }

    pub fn lo(&self) -> f64 {
        self.a - self.pad
    }

    pub fn hi(&self) -> f64 {
        self.b + self.pad
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains_padded(&self, t: f64) -> bool {
        t >= self.lo() && t <= self.hi()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }
}

/// Where a curve may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Line,
    Padded(CurveDomain),
}

impl Support {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Support::Line => (f64::NEG_INFINITY, f64::INFINITY),
            Support::Padded(d) => (d.lo(), d.hi()),
        }
    }

    /// Checks that `[t - reach, t + reach]` is inside the support.
    pub fn check_window(&self, t: f64, reach: f64) -> Result<()> {
        let (lo, hi) = self.bounds();
        if t - reach < lo {
            return Err(Error::Domain { t: t - reach, lo, hi });
        }
        if t + reach > hi {
            return Err(Error::Domain { t: t + reach, lo, hi });
        }
        Ok(())
    }
}

/// Declared regularity of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exponent {
    Holder(f64),
    Smooth,
}

impl Exponent {
    /// Numeric exponent; smooth curves count as Lipschitz.
    pub fn value(&self) -> f64 {
        match self {
            Exponent::Holder(a) => *a,
            Exponent::Smooth => 1.0,
        }
    }

    fn min(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Smooth, e) | (e, Exponent::Smooth) => e,
            (Exponent::Holder(a), Exponent::Holder(b)) => Exponent::Holder(a.min(b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Weierstrass,
    RandomWalk,
    Smooth,
    Variation,
    Composite,
}

type EvalFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A real- or complex-valued function of time with a declared support and
/// Hölder exponent.
#[derive(Clone)]
pub struct Curve {
    eval: Arc<EvalFn>,
    support: Support,
    exponent: Exponent,
    kind: CurveKind,
    real: bool,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.kind)
            .field("exponent", &self.exponent)
            .field("support", &self.support)
            .field("real", &self.real)
            .finish()
    }
}

impl Curve {
    pub fn from_real<F>(kind: CurveKind, exponent: Exponent, support: Support, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(move |t| Complex64::new(f(t), 0.0)),
            support,
            exponent,
            kind,
            real: true,
        }
    }

    pub fn from_complex<F>(kind: CurveKind, exponent: Exponent, support: Support, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            support,
            exponent,
            kind,
            real: false,
        }
    }

    /// Smooth real curve defined on the whole line.
    pub fn smooth<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_real(CurveKind::Smooth, Exponent::Smooth, Support::Line, f)
    }

    pub fn constant(c: f64) -> Self {
        Self::smooth(move |_| c)
    }

    pub fn identity() -> Self {
        Self::smooth(|t| t)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        (self.eval)(t)
    }

    /// Real part of the value; the whole value for real curves.
    #[inline]
    pub fn eval_re(&self, t: f64) -> f64 {
        (self.eval)(t).re
    }

    pub fn eval_checked(&self, t: f64) -> Result<Complex64> {
        self.support.check_window(t, 0.0)?;
        Ok(self.eval(t))
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn restricted_to(self, domain: CurveDomain) -> Self {
        self.with_support(Support::Padded(domain))
    }

    pub fn with_exponent(mut self, exponent: Exponent) -> Self {
        self.exponent = exponent;
        self
    }

    pub fn with_kind(mut self, kind: CurveKind) -> Self {
        self.kind = kind;
        self
    }

    /// Linear combination `sum w_k c_k`; the result is a variation when every
    /// part is one.
    pub fn combination(parts: &[(f64, Curve)]) -> Result<Curve> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let mut acc = first.1.scaled(first.0);
        for (w, c) in rest {
            acc = acc.perturbed(c, *w);
        }
        if parts.iter().all(|(_, c)| c.kind == CurveKind::Variation) {
            acc.kind = CurveKind::Variation;
        }
        Ok(acc)
    }

    pub fn scaled(&self, w: f64) -> Curve {
        let f = self.eval.clone();
        Curve { eval: Arc::new(move |t| f(t) * w), ..self.clone() }
    }

    /// `self + mu * other`, the perturbed curve `gamma + mu h`.
    pub fn perturbed(&self, other: &Curve, mu: f64) -> Curve {
        let f = self.eval.clone();
        let g = other.eval.clone();
        let support = narrower(self.support, other.support);
        Curve {
            eval: Arc::new(move |t| f(t) + g(t) * mu),
            support,
            exponent: self.exponent.min(other.exponent),
            kind: CurveKind::Composite,
            real: self.real && other.real,
        }
    }

    /// Pointwise product of two curves.
    pub fn product(&self, other: &Curve) -> Curve {
        let f = self.eval.clone();
        let g = other.eval.clone();
        Curve {
            eval: Arc::new(move |t| f(t) * g(t)),
            support: narrower(self.support, other.support),
            exponent: self.exponent.min(other.exponent),
            kind: CurveKind::Composite,
            real: self.real && other.real,
        }
    }
}

fn narrower(a: Support, b: Support) -> Support {
    match (a, b) {
        (Support::Line, s) | (s, Support::Line) => s,
        (Support::Padded(x), Support::Padded(y)) => {
            let lo = x.lo().max(y.lo());
            let hi = x.hi().min(y.hi());
            let a = x.a.max(y.a);
            let b = x.b.min(y.b);
            Support::Padded(CurveDomain { a, b, pad: (a - lo).min(hi - b) })
        }
    }
}

/// Truncated Weierstrass series `sum_{k=0}^{terms} base^{-k alpha} cos(base^k t + phase_k)`.
#[derive(Debug, Clone)]
pub struct WeierstrassSeries {
    amplitudes: Vec<f64>,
    frequencies: Vec<f64>,
    phases: Vec<f64>,
}

impl WeierstrassSeries {
    pub fn new(alpha: f64, base: u32, terms: usize) -> Result<Self> {
        validate_weierstrass(alpha, base, terms)?;
        let b = base as f64;
        let amplitudes = (0..=terms).map(|k| b.powf(-(k as f64) * alpha)).collect();
        let frequencies = (0..=terms).map(|k| b.powi(k as i32)).collect();
        Ok(Self { amplitudes, frequencies, phases: vec![0.0; terms + 1] })
    }

    /// Same series with phases drawn uniformly from `[0, 2 pi)`.
    pub fn with_random_phases(alpha: f64, base: u32, terms: usize, seed: u64) -> Result<Self> {
        let mut s = Self::new(alpha, base, terms)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in s.phases.iter_mut() {
            *p = rng.gen_range(0.0..2.0 * PI);
        }
        Ok(s)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.frequencies)
            .zip(&self.phases)
            .map(|((a, w), p)| a * (w * t + p).cos())
            .sum()
    }

    pub fn terms(&self) -> usize {
        self.amplitudes.len() - 1
    }
}

fn validate_weierstrass(alpha: f64, base: u32, terms: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("Weierstrass exponent must lie in (0, 1), got {alpha}")));
    }
    if base < 2 {
        return Err(Error::InvalidParameter(format!("Weierstrass base must be >= 2, got {base}")));
    }
    if terms < 8 {
        return Err(Error::InvalidParameter(format!("Weierstrass series needs >= 8 terms, got {terms}")));
    }
    Ok(())
}

/// Smallest number of terms whose neglected tail is below `1e-12 * eps_min^alpha`,
/// the oscillation scale of the series at the finest probe.
pub fn weierstrass_terms_for(alpha: f64, base: u32, eps_min: f64) -> usize {
    let b = base as f64;
    let target = 1e-12 * eps_min.powf(alpha) * (1.0 - b.powf(-alpha));
    // tail after K terms is b^{-(K+1) alpha} / (1 - b^{-alpha})
    let k = (-target.ln() / (alpha * b.ln())).ceil() as usize;
    k.max(8)
}

/// Weierstrass curve `t -> sum_k base^{-k alpha} cos(base^k t)`, defined on the whole line.
pub fn weierstrass(alpha: f64, base: u32, terms: usize) -> Result<Curve> {
    let series = WeierstrassSeries::new(alpha, base, terms)?;
    Ok(Curve::from_real(
        CurveKind::Weierstrass,
        Exponent::Holder(alpha),
        Support::Line,
        move |t| series.eval(t),
    ))
}

/// Piecewise-linear interpolant of a seeded lattice walk with spacing `step`
/// and increments `+- sqrt(step * scale)`.
///
/// At every interior node and probe `eps = step` both squared quantum
/// derivatives equal `scale / step`.
pub fn random_walk_curve(step: f64, scale: f64, seed: u64, domain: CurveDomain) -> Result<Curve> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("walk step must be positive, got {step}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("walk scale must be positive, got {scale}")));
    }
    let span = domain.hi() - domain.lo();
    let intervals = (span / step - 1e-9).ceil() as usize;
    if intervals < 16 {
        return Err(Error::InvalidParameter(format!(
            "walk step {step} gives {intervals} lattice intervals on the padded domain; need >= 16"
        )));
    }
    let increment = (step * scale).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = Vec::with_capacity(intervals + 1);
    let mut x = 0.0;
    nodes.push(x);
    for _ in 0..intervals {
        x += if rng.gen::<bool>() { increment } else { -increment };
        nodes.push(x);
    }
    let walk = LatticeWalk { origin: domain.lo(), step, nodes };
    Ok(Curve::from_real(
        CurveKind::RandomWalk,
        Exponent::Holder(0.5),
        Support::Padded(domain),
        move |t| walk.eval(t),
    ))
}

#[derive(Debug, Clone)]
struct LatticeWalk {
    origin: f64,
    step: f64,
    nodes: Vec<f64>,
}

impl LatticeWalk {
    fn eval(&self, t: f64) -> f64 {
        let u = (t - self.origin) / self.step;
        let last = self.nodes.len() - 1;
        let nearest = u.round();
        // snap to a node when the probe lands on the lattice up to rounding
        if (u - nearest).abs() < 1e-9 && nearest >= 0.0 && (nearest as usize) <= last {
            return self.nodes[nearest as usize];
        }
        let i = (u.floor().max(0.0) as usize).min(last - 1);
        let frac = u - i as f64;
        self.nodes[i] + frac * (self.nodes[i + 1] - self.nodes[i])
    }
}

/// Lattice node times of a walk built on `domain` with spacing `step`.
pub fn lattice_nodes(domain: &CurveDomain, step: f64) -> Vec<f64> {
    let span = domain.hi() - domain.lo();
    let intervals = (span / step - 1e-9).ceil() as usize;
    (0..=intervals).map(|k| domain.lo() + k as f64 * step).collect()
}

/// Window multiplied into a carrier so that a variation vanishes at `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "envelope", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Envelope {
    /// `exp(1 - 1/(4u(1-u)))` on the inner interval obtained by trimming
    /// `margin * (b - a)` from each end, `u` its unit coordinate; identically
    /// zero on the trimmed ends.
    Bump { margin: f64 },
    /// `(4 (t-a)(b-t) / (b-a)^2)^order`, positive on all of `(a, b)`.
    Polynomial { order: i32 },
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Bump { margin: 0.125 }
    }
}

impl Envelope {
    fn validate(&self) -> Result<()> {
        match *self {
            Envelope::Bump { margin } if !(0.0..0.5).contains(&margin) => {
                Err(Error::InvalidParameter(format!("bump margin must lie in [0, 0.5), got {margin}")))
            }
            Envelope::Polynomial { order } if order < 1 => {
                Err(Error::InvalidParameter(format!("envelope order must be >= 1, got {order}")))
            }
            _ => Ok(()),
        }
    }

    /// Zero outside `(a, b)` and at both endpoints.
    pub fn eval(&self, domain: &CurveDomain, t: f64) -> f64 {
        if t <= domain.a || t >= domain.b {
            return 0.0;
        }
        let l = domain.len();
        match *self {
            Envelope::Bump { margin } => {
                let lo = domain.a + margin * l;
                let u = (t - lo) / (l * (1.0 - 2.0 * margin));
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (4.0 * u * (1.0 - u))).exp()
                }
            }
            Envelope::Polynomial { order } => (4.0 * (t - domain.a) * (domain.b - t) / (l * l)).powi(order),
        }
    }
}

/// Carrier multiplied by the envelope to build a variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "carrier", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Carrier {
    /// Weierstrass series with seeded phases.
    Weierstrass { base: u32, terms: usize },
    /// Lipschitz carrier `t -> t + offset` with a seeded offset in `[0, 1)`.
    Linear,
}

/// Default finest scale the variation carriers are resolved to.
pub const DEFAULT_RESOLUTION: f64 = 1e-5;

/// Variation `h = envelope * W_beta` with `h(a) = h(b) = 0` and the default
/// bump envelope.
///
/// `beta < 1` uses a Weierstrass carrier with seeded phases; `beta = 1` uses
/// the Lipschitz linear carrier.
pub fn make_variation(beta: f64, domain: CurveDomain, seed: u64) -> Result<Curve> {
    let carrier = if beta < 1.0 {
        Carrier::Weierstrass { base: 2, terms: weierstrass_terms_for(beta, 2, DEFAULT_RESOLUTION) }
    } else {
        Carrier::Linear
    };
    make_variation_with(beta, domain, seed, carrier, Envelope::default())
}

pub fn make_variation_with(beta: f64, domain: CurveDomain, seed: u64, carrier: Carrier, envelope: Envelope) -> Result<Curve> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("variation exponent must lie in (0, 1], got {beta}")));
    }
    envelope.validate()?;
    let d = domain;
    let curve = match carrier {
        Carrier::Weierstrass { base, terms } => {
            if beta >= 1.0 {
                return Err(Error::InvalidParameter(
                    "a Weierstrass carrier needs beta < 1; use the linear carrier for beta = 1".into(),
                ));
            }
            let series = WeierstrassSeries::with_random_phases(beta, base, terms, seed)?;
            Curve::from_real(CurveKind::Variation, Exponent::Holder(beta), Support::Padded(d), move |t| {
                envelope.eval(&d, t) * series.eval(t)
            })
        }
        Carrier::Linear => {
            let offset: f64 = ChaCha8Rng::seed_from_u64(seed).gen_range(0.0..1.0);
            Curve::from_real(CurveKind::Variation, Exponent::Holder(beta), Support::Padded(d), move |t| {
                envelope.eval(&d, t) * (t + offset)
            })
        }
    };
    Ok(curve)
}

/// Result of an oscillation log-log regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub exponent_hat: f64,
    pub constant_hat: f64,
    pub regression_residual: f64,
    pub delta_ladder: Vec<f64>,
    /// Maximal oscillation per rung; zero rungs are excluded from the fit.
    pub oscillations: Vec<f64>,
}

/// Geometric ladder `first * ratio^k`, `k = 0..rungs`.
pub fn geometric_ladder(first: f64, ratio: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|k| first * ratio.powi(k as i32)).collect()
}

/// Estimates the Hölder exponent as the slope of `log max_p osc(p, delta)`
/// against `log delta`, where `osc(p, delta)` is the larger one-sided
/// increment at probe `p`.
pub fn estimate_holder(curve: &Curve, delta_ladder: &[f64], probes: &[f64]) -> Result<HolderEstimate> {
    if delta_ladder.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "Hölder regression needs >= 4 ladder rungs, got {}",
            delta_ladder.len()
        )));
    }
    check_geometric(delta_ladder)?;
    if probes.is_empty() {
        return Err(Error::InvalidParameter("no probe points".into()));
    }
    if let Support::Padded(d) = curve.support() {
        if let Some(p) = probes.iter().find(|p| !d.contains(**p)) {
            return Err(Error::InvalidParameter(format!("probe {p} lies outside [{}, {}]", d.a, d.b)));
        }
    }
    let reach = delta_ladder.iter().cloned().fold(0.0, f64::max);
    for &p in probes {
        curve.support().check_window(p, reach)?;
    }

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut oscillations = Vec::with_capacity(delta_ladder.len());
    for &delta in delta_ladder {
        let osc = probes
            .iter()
            .map(|&p| {
                let f0 = curve.eval(p);
                (curve.eval(p + delta) - f0).norm().max((f0 - curve.eval(p - delta)).norm())
            })
            .fold(0.0, f64::max);
        oscillations.push(osc);
        if osc > 0.0 {
            xs.push(delta.ln());
            ys.push(osc.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::FlatCurve);
    }
    let fit = linear_fit(&xs, &ys);
    if !(fit.slope > 0.0) {
        return Err(Error::Consistency(format!("oscillation regression gave non-positive slope {}", fit.slope)));
    }
    Ok(HolderEstimate {
        exponent_hat: fit.slope,
        constant_hat: fit.intercept.exp(),
        regression_residual: fit.rms_residual,
        delta_ladder: delta_ladder.to_vec(),
        oscillations,
    })
}

fn check_geometric(ladder: &[f64]) -> Result<()> {
    if ladder.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParameter("ladder values must be positive".into()));
    }
    let ratio = ladder[1] / ladder[0];
    for w in ladder.windows(2) {
        if ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("ladder is not geometric".into()));
        }
    }
    Ok(())
}

/// Named smooth functions available from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SmoothFn {
    /// `sum_k coeffs[k] t^k`
    Polynomial { coeffs: Vec<f64> },
    Sin { omega: f64, phase: f64 },
    Cos { omega: f64, phase: f64 },
    Exp { rate: f64 },
}

impl SmoothFn {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SmoothFn::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            SmoothFn::Sin { omega, phase } => (omega * t + phase).sin(),
            SmoothFn::Cos { omega, phase } => (omega * t + phase).cos(),
            SmoothFn::Exp { rate } => (rate * t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            SmoothFn::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c),
            SmoothFn::Sin { omega, phase } => omega * (omega * t + phase).cos(),
            SmoothFn::Cos { omega, phase } => -omega * (omega * t + phase).sin(),
            SmoothFn::Exp { rate } => rate * (rate * t).exp(),
        }
    }

    pub fn curve(&self) -> Curve {
        let f = self.clone();
        Curve::smooth(move |t| f.eval(t))
    }
}

/// Plain-text description of a curve, enough to rebuild it bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Weierstrass { alpha: f64, base: u32, terms: Option<usize> },
    RandomWalk { step: f64, scale: f64, seed: u64 },
    Smooth { function: SmoothFn },
    Variation {
        beta: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        envelope: Option<Envelope>,
    },
    Composite { parts: Vec<WeightedCurve> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedCurve {
    pub weight: f64,
    pub curve: CurveSpec,
}

impl CurveSpec {
    /// Builds the curve; `resolution` is the finest scale Weierstrass terms
    /// are chosen for when `terms` is not given.
    pub fn build(&self, domain: CurveDomain, resolution: f64) -> Result<Curve> {
        match self {
            CurveSpec::Weierstrass { alpha, base, terms } => {
                let n = terms.unwrap_or_else(|| weierstrass_terms_for(*alpha, *base, resolution));
                Ok(weierstrass(*alpha, *base, n)?.restricted_to(domain))
            }
            CurveSpec::RandomWalk { step, scale, seed } => random_walk_curve(*step, *scale, *seed, domain),
            CurveSpec::Smooth { function } => Ok(function.curve().restricted_to(domain)),
            CurveSpec::Variation { beta, seed, envelope } => match envelope {
                None => make_variation(*beta, domain, *seed),
                Some(e) => {
                    let carrier = if *beta < 1.0 {
                        Carrier::Weierstrass { base: 2, terms: weierstrass_terms_for(*beta, 2, resolution) }
                    } else {
                        Carrier::Linear
                    };
                    make_variation_with(*beta, domain, *seed, carrier, *e)
                }
            },
            CurveSpec::Composite { parts } => {
                let mut acc: Option<Curve> = None;
                for part in parts {
                    let c = part.curve.build(domain, resolution)?;
                    acc = Some(match acc {
                        None => Curve::constant(0.0).restricted_to(domain).perturbed(&c, part.weight),
                        Some(prev) => prev.perturbed(&c, part.weight),
                    });
                }
                acc.ok_or_else(|| Error::InvalidParameter("composite curve needs at least one part".into()))
            }
        }
    }
}
