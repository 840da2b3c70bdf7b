//! Quantum (finite-scale) derivatives and the complex scale derivative.
//!
//! All operators use the half normalization
//!
//! ```text
//! box_eps f   = 1/2 [ (D+ f + D- f) - i (D+ f - D- f) ]
//! boxm_eps f  = 1/2 [ (D+ f + D- f) + i (D+ f - D- f) ]
//! ```
//!
//! where `D+ f(t) = (f(t+eps) - f(t)) / eps` and `D- f(t) = (f(t) - f(t-eps)) / eps`.
//! For complex `f` both formulas act on real and imaginary parts separately,
//! which is the same linear expression applied to complex increments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::quadrature::SimpsonRule;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

/// Right and left quantum derivatives of a function at one `(t, eps)` probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumPair {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl QuantumPair {
    pub fn of<F: Fn(f64) -> Complex64>(f: F, t: f64, eps: f64) -> Self {
        let f0 = f(t);
        Self {
            plus: (f(t + eps) - f0) / eps,
            minus: (f0 - f(t - eps)) / eps,
        }
    }

    pub fn get(&self, dir: Direction) -> Complex64 {
        match dir {
            Direction::Plus => self.plus,
            Direction::Minus => self.minus,
        }
    }

    pub fn scale(&self) -> Complex64 {
        0.5 * ((self.plus + self.minus) - I * (self.plus - self.minus))
    }

    pub fn conj_scale(&self) -> Complex64 {
        0.5 * ((self.plus + self.minus) + I * (self.plus - self.minus))
    }

    /// Chain-rule coefficient
    /// `a_j = 1/2 [ (p^j - (-1)^j m^j) - i (p^j + (-1)^j m^j) ]`.
    pub fn chain_coefficient(&self, j: u32) -> Complex64 {
        let p = self.plus.powu(j);
        let m = self.minus.powu(j);
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        0.5 * ((p - m * s) - I * (p + m * s))
    }
}

/// Scale derivative of an arbitrary function, unchecked.
#[inline]
pub fn scale_of<F: Fn(f64) -> Complex64>(f: F, t: f64, eps: f64) -> Complex64 {
    QuantumPair::of(f, t, eps).scale()
}

/// Conjugate scale derivative of an arbitrary function, unchecked.
#[inline]
pub fn conj_scale_of<F: Fn(f64) -> Complex64>(f: F, t: f64, eps: f64) -> Complex64 {
    QuantumPair::of(f, t, eps).conj_scale()
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive and finite, got {eps}")))
    }
}

fn checked_pair(f: &Curve, t: f64, eps: f64) -> Result<QuantumPair> {
    check_eps(eps)?;
    f.support().check_window(t, eps)?;
    Ok(QuantumPair::of(|s| f.eval(s), t, eps))
}

/// `sigma (f(t + sigma eps) - f(t)) / eps`
pub fn quantum_derivative(f: &Curve, t: f64, eps: f64, dir: Direction) -> Result<Complex64> {
    Ok(checked_pair(f, t, eps)?.get(dir))
}

/// Mean of `f` over `[t, t + sigma eps]` by composite Simpson quadrature with
/// `quadrature_points` intervals (rounded up to even).
pub fn mean_function(f: &Curve, t: f64, eps: f64, dir: Direction, quadrature_points: usize) -> Result<Complex64> {
    check_eps(eps)?;
    if quadrature_points < 16 {
        return Err(Error::InvalidParameter(format!("mean function needs >= 16 quadrature points, got {quadrature_points}")));
    }
    f.support().check_window(t, eps)?;
    let sigma = dir.sign();
    let n = quadrature_points + quadrature_points % 2;
    let rule = SimpsonRule::new(t, t + sigma * eps, n)?;
    Ok(rule.integrate(|s| f.eval(s)) * (sigma / eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleDerivativeValue {
    pub value: Complex64,
    pub t: f64,
    pub epsilon: f64,
    pub normalization: Normalization,
}

fn finite(v: Complex64, what: &str, t: f64, eps: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} at t = {t}, eps = {eps}")))
    }
}

pub fn scale_derivative(f: &Curve, t: f64, eps: f64) -> Result<ScaleDerivativeValue> {
    let value = finite(checked_pair(f, t, eps)?.scale(), "scale derivative", t, eps)?;
    Ok(ScaleDerivativeValue { value, t, epsilon: eps, normalization: Normalization::Half })
}

pub fn conjugate_scale_derivative(f: &Curve, t: f64, eps: f64) -> Result<ScaleDerivativeValue> {
    let value = finite(checked_pair(f, t, eps)?.conj_scale(), "conjugate scale derivative", t, eps)?;
    Ok(ScaleDerivativeValue { value, t, epsilon: eps, normalization: Normalization::Half })
}

/// Both sides of the product rule for scale derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeibnizCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub defect: f64,
}

/// Product-rule remainder
/// `(i eps / 2) [ box f box g - boxm f boxm g - box f boxm g - boxm f box g ]`.
pub fn leibniz_remainder(f: &QuantumPair, g: &QuantumPair, eps: f64) -> Complex64 {
    let (bf, cf) = (f.scale(), f.conj_scale());
    let (bg, cg) = (g.scale(), g.conj_scale());
    I * (eps / 2.0) * (bf * bg - cf * cg - bf * cg - cf * bg)
}

/// Compares `box(fg)` with `box f * g + f * box g + remainder`.
pub fn leibniz_check(f: &Curve, g: &Curve, t: f64, eps: f64) -> Result<LeibnizCheck> {
    if !f.is_real() || !g.is_real() {
        return Err(Error::InvalidParameter("the product-rule check takes real-valued curves".into()));
    }
    let pf = checked_pair(f, t, eps)?;
    let pg = checked_pair(g, t, eps)?;
    let lhs = scale_of(|s| f.eval(s) * g.eval(s), t, eps);
    let rhs = pf.scale() * g.eval(t) + f.eval(t) * pg.scale() + leibniz_remainder(&pf, &pg, eps);
    Ok(LeibnizCheck { lhs, rhs, defect: (lhs - rhs).norm() })
}

/// Two routes to `int_a^b box f dt`, plus the distance of the boundary
/// expression from the classical `f(b) - f(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleIntegral {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub limit_gap: f64,
}

/// `lhs` integrates the scale derivative by quadrature; `rhs` evaluates
/// `1/2 [ (f+ + f-) - i (f+ - f-) ]` between `a` and `b` from the mean functions.
pub fn scale_integral(f: &Curve, a: f64, b: f64, eps: f64, quadrature_points: usize) -> Result<ScaleIntegral> {
    check_eps(eps)?;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    f.support().check_window(a, eps)?;
    f.support().check_window(b, eps)?;
    let n = quadrature_points.max(2) + quadrature_points % 2;
    let rule = SimpsonRule::new(a, b, n)?;
    let lhs = rule.integrate(|t| scale_of(|s| f.eval(s), t, eps));
    let boundary = |t: f64| -> Result<Complex64> {
        let fp = mean_function(f, t, eps, Direction::Plus, n.max(16))?;
        let fm = mean_function(f, t, eps, Direction::Minus, n.max(16))?;
        Ok(0.5 * ((fp + fm) - I * (fp - fm)))
    };
    let rhs = boundary(b)? - boundary(a)?;
    let limit_gap = (rhs - (f.eval(b) - f.eval(a))).norm();
    Ok(ScaleIntegral { lhs, rhs, limit_gap })
}

/// A scalar field `F(x, t)` with caller-supplied partial derivatives.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: f64, t: f64) -> f64;
    fn d_dt(&self, x: f64, t: f64) -> f64;
    /// `order`-th partial in `x`; `None` when not supplied.
    fn d_dx(&self, order: usize, x: f64, t: f64) -> Option<f64>;
}

/// `F(x, t) = sum_{j,k} coeffs[j][k] x^j t^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyField {
    pub coeffs: Vec<Vec<f64>>,
}

impl PolyField {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        Self { coeffs }
    }

    /// `x^p`
    pub fn power(p: usize) -> Self {
        let mut coeffs = vec![vec![0.0]; p + 1];
        coeffs[p] = vec![1.0];
        Self { coeffs }
    }

    fn t_poly(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, v| acc * t + v)
    }

    fn t_poly_dt(c: &[f64], t: f64) -> f64 {
        c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, v)| acc * t + k as f64 * v)
    }
}

fn falling(j: usize, r: usize) -> f64 {
    (0..r).map(|i| (j - i) as f64).product()
}

impl ScalarField for PolyField {
    fn value(&self, x: f64, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + Self::t_poly(c, t))
    }

    fn d_dt(&self, x: f64, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + Self::t_poly_dt(c, t))
    }

    fn d_dx(&self, order: usize, x: f64, t: f64) -> Option<f64> {
        Some(
            self.coeffs
                .iter()
                .enumerate()
                .skip(order)
                .map(|(j, c)| falling(j, order) * Self::t_poly(c, t) * x.powi((j - order) as i32))
                .sum(),
        )
    }
}

/// Itemized chain-rule expansion of `box F(x(.), .)` at one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleExpansion {
    pub order_n: usize,
    pub t: f64,
    pub epsilon: f64,
    /// `dF/dt (x(t), t)`
    pub dt_term: Complex64,
    /// `(1/j!) d^jF/dx^j eps^{j-1} a_{eps,j}` for `j = 1..=n`
    pub x_terms: Vec<Complex64>,
    /// raw `a_{eps,j}`
    pub coefficients: Vec<Complex64>,
    /// `box F(x(.), .)` computed directly from the composed curve
    pub scale_derivative: Complex64,
    /// The curve's declared exponent is at least `1/n`, so the defect is
    /// `o(eps^{1/n})`. Outside the contract the terms are still exact
    /// definitions but the defect carries no rate.
    pub within_contract: bool,
}

impl ChainRuleExpansion {
    pub fn expansion(&self) -> Complex64 {
        self.dt_term + self.x_terms.iter().sum::<Complex64>()
    }

    pub fn defect(&self) -> f64 {
        (self.scale_derivative - self.expansion()).norm()
    }
}

pub fn chain_rule_expansion<F: ScalarField + ?Sized>(
    field: &F,
    x: &Curve,
    t: f64,
    eps: f64,
    n: usize,
) -> Result<ChainRuleExpansion> {
    if n < 1 {
        return Err(Error::InvalidParameter("chain-rule order must be >= 1".into()));
    }
    let within_contract = x.exponent().value() + 1e-12 >= 1.0 / n as f64;
    let pair = checked_pair(x, t, eps)?;
    let x0 = x.eval_re(t);
    let mut x_terms = Vec::with_capacity(n);
    let mut coefficients = Vec::with_capacity(n);
    let mut factorial = 1.0;
    for j in 1..=n {
        factorial *= j as f64;
        let dj = field.d_dx(j, x0, t).ok_or(Error::MissingPartial(j))?;
        let a = pair.chain_coefficient(j as u32);
        coefficients.push(a);
        x_terms.push(a * (dj / factorial * eps.powi(j as i32 - 1)));
    }
    let dt_term = Complex64::new(field.d_dt(x0, t), 0.0);
    let scale = scale_of(|s| Complex64::new(field.value(x.eval_re(s), s), 0.0), t, eps);
    Ok(ChainRuleExpansion { order_n: n, t, epsilon: eps, dt_term, x_terms, coefficients, scale_derivative: scale, within_contract })
}
