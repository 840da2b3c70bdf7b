//! The ε-dominant part as least-squares projection onto a power basis, and
//! log-log scaling fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default basis `{-1, -1/2, 0, 1/2, 1}`.
pub const DEFAULT_BASIS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Largest admissible condition number of the (column-scaled) design.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Default relative significance threshold for [`dominant_part`].
pub const DEFAULT_RELATIVE_THRESHOLD: f64 = 1e-6;

const LADDER_RATIO_TOL: f64 = 1e-12;

/// Ordinary least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// 1 when the data are exactly constant.
    pub r_squared: f64,
}

/// Fits `y = slope * x + intercept`. Needs at least two distinct `x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit { slope, intercept, rms_residual: (ss_res / n).sqrt(), r_squared }
}

/// Strictly decreasing geometric sequence of scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LadderRepr", into = "LadderRepr")]
pub struct EpsilonLadder {
    values: Vec<f64>,
    ratio: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderRepr {
    values: Vec<f64>,
    ratio: f64,
}

impl TryFrom<LadderRepr> for EpsilonLadder {
    type Error = Error;
    fn try_from(r: LadderRepr) -> Result<Self> {
        let l = EpsilonLadder::from_values(r.values)?;
        if (l.ratio - r.ratio).abs() > LADDER_RATIO_TOL * r.ratio.abs() {
            return Err(Error::InvalidParameter(format!("declared ratio {} does not match values", r.ratio)));
        }
        Ok(l)
    }
}

impl From<EpsilonLadder> for LadderRepr {
    fn from(l: EpsilonLadder) -> Self {
        LadderRepr { values: l.values, ratio: l.ratio }
    }
}

impl EpsilonLadder {
    pub const MIN_RUNGS: usize = 6;

    /// `eps_max * ratio^k`, `k = 0..rungs`.
    pub fn geometric(eps_max: f64, ratio: f64, rungs: usize) -> Result<Self> {
        if !(eps_max > 0.0 && eps_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("ladder eps_max must be positive, got {eps_max}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("ladder ratio must lie in (0, 1), got {ratio}")));
        }
        if rungs < Self::MIN_RUNGS {
            return Err(Error::InvalidParameter(format!(
                "ladder needs >= {} rungs, got {rungs}",
                Self::MIN_RUNGS
            )));
        }
        let values = (0..rungs).map(|k| eps_max * ratio.powi(k as i32)).collect();
        Ok(Self { values, ratio })
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < Self::MIN_RUNGS {
            return Err(Error::InvalidParameter(format!(
                "ladder needs >= {} rungs, got {}",
                Self::MIN_RUNGS,
                values.len()
            )));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("ladder values must be positive and finite".into()));
        }
        let ratio = values[1] / values[0];
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter("ladder must be strictly decreasing".into()));
        }
        for w in values.windows(2) {
            if ((w[1] / w[0]) / ratio - 1.0).abs() > LADDER_RATIO_TOL {
                return Err(Error::InvalidParameter("ladder is not geometric".into()));
            }
        }
        Ok(Self { values, ratio })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// `(eps_max, ratio, rungs)` as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub eps_max: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl LadderSpec {
    pub fn build(&self) -> Result<EpsilonLadder> {
        EpsilonLadder::geometric(self.eps_max, self.ratio, self.rungs)
    }
}

impl std::str::FromStr for LadderSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected eps_max,ratio,rungs, got '{s}'"));
        }
        let eps_max = parts[0].parse().map_err(|e| format!("eps_max: {e}"))?;
        let ratio = parts[1].parse().map_err(|e| format!("ratio: {e}"))?;
        let rungs = parts[2].parse().map_err(|e| format!("rungs: {e}"))?;
        Ok(Self { eps_max, ratio, rungs })
    }
}

/// Least-squares expansion `value(eps) ~ sum_p c_p eps^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub basis_exponents: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    pub fit_residual: f64,
    pub condition_estimate: f64,
    pub epsilons: Vec<f64>,
}

impl AsymptoticFit {
    pub fn eval(&self, eps: f64) -> Complex64 {
        self.basis_exponents.iter().zip(&self.coefficients).map(|(p, c)| c * eps.powf(*p)).sum()
    }

    pub fn coefficient(&self, exponent: f64) -> Option<Complex64> {
        self.basis_exponents.iter().position(|p| *p == exponent).map(|k| self.coefficients[k])
    }
}

/// Solves the least-squares problem on the column-scaled design with an SVD.
/// The reported condition number is that of the scaled design.
pub fn fit_asymptotics(samples: &[(f64, Complex64)], basis: &[f64]) -> Result<AsymptoticFit> {
    if basis.is_empty() {
        return Err(Error::InvalidParameter("empty exponent basis".into()));
    }
    for (i, p) in basis.iter().enumerate() {
        if !p.is_finite() || basis[..i].contains(p) {
            return Err(Error::InvalidParameter(format!("basis exponents must be finite and distinct, got {basis:?}")));
        }
    }
    if samples.len() <= basis.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} samples cannot fit a {}-term basis; need more than {}",
            samples.len(),
            basis.len(),
            basis.len() + 1
        )));
    }
    if samples.iter().any(|(e, v)| !(*e > 0.0 && e.is_finite()) || !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("asymptotic samples need positive finite eps and finite values".into()));
    }

    let (m, n) = (samples.len(), basis.len());
    let mut design = DMatrix::from_fn(m, n, |i, j| samples[i].0.powf(basis[j]));
    let scales: Vec<f64> = (0..n).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition, limit: CONDITION_LIMIT });
    }

    let re = DVector::from_iterator(m, samples.iter().map(|s| s.1.re));
    let im = DVector::from_iterator(m, samples.iter().map(|s| s.1.im));
    let solve = |rhs: &DVector<f64>| -> Result<DVector<f64>> {
        svd.solve(rhs, 0.0).map_err(|e| Error::Consistency(format!("SVD solve failed: {e}")))
    };
    let (xr, xi) = (solve(&re)?, solve(&im)?);
    let coefficients: Vec<Complex64> = (0..n).map(|j| Complex64::new(xr[j], xi[j]) / scales[j]).collect();

    let rr = &design * &xr - &re;
    let ri = &design * &xi - &im;
    let fit_residual = ((rr.norm_squared() + ri.norm_squared()) / m as f64).sqrt();

    Ok(AsymptoticFit {
        basis_exponents: basis.to_vec(),
        coefficients,
        fit_residual,
        condition_estimate: condition,
        epsilons: samples.iter().map(|s| s.0).collect(),
    })
}

/// Fits a quantity evaluated on every rung of a ladder.
pub fn fit_on_ladder<F: Fn(f64) -> Complex64>(ladder: &EpsilonLadder, basis: &[f64], f: F) -> Result<AsymptoticFit> {
    let samples: Vec<(f64, Complex64)> = ladder.values().iter().map(|&e| (e, f(e))).collect();
    fit_asymptotics(&samples, basis)
}

/// Divergent-plus-constant part of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominantPart {
    pub kept_exponents: Vec<f64>,
    pub kept_coefficients: Vec<Complex64>,
    /// `|sum of discarded terms|` at the largest ladder scale.
    pub vanishing_norm: f64,
    pub threshold: f64,
    /// Some coefficient lies within a factor 10 of the threshold.
    pub borderline: bool,
    pub fit_residual: f64,
}

impl DominantPart {
    pub fn is_zero(&self) -> bool {
        self.kept_exponents.is_empty()
    }

    /// Sum of the magnitudes of the kept coefficients.
    pub fn magnitude(&self) -> f64 {
        self.kept_coefficients.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, eps: f64) -> Complex64 {
        self.kept_exponents.iter().zip(&self.kept_coefficients).map(|(p, c)| c * eps.powf(*p)).sum()
    }

    pub fn coefficient(&self, exponent: f64) -> Complex64 {
        self.kept_exponents
            .iter()
            .position(|p| *p == exponent)
            .map_or(Complex64::new(0.0, 0.0), |k| self.kept_coefficients[k])
    }
}

/// `threshold` default: [`DEFAULT_RELATIVE_THRESHOLD`] times the largest coefficient magnitude.
pub fn default_threshold(fit: &AsymptoticFit) -> f64 {
    DEFAULT_RELATIVE_THRESHOLD * fit.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Keeps the terms with exponent `<= 0` and `|coefficient| > threshold`.
pub fn dominant_part(fit: &AsymptoticFit, threshold: f64) -> DominantPart {
    let eps_max = fit.epsilons.iter().cloned().fold(0.0, f64::max);
    let mut kept_exponents = Vec::new();
    let mut kept_coefficients = Vec::new();
    let mut discarded = Complex64::new(0.0, 0.0);
    let mut borderline = false;
    for (p, c) in fit.basis_exponents.iter().zip(&fit.coefficients) {
        let mag = c.norm();
        if *p <= 0.0 {
            if mag > 0.1 * threshold && mag < 10.0 * threshold {
                borderline = true;
            }
            if mag > threshold {
                kept_exponents.push(*p);
                kept_coefficients.push(*c);
                continue;
            }
        }
        discarded += c * eps_max.powf(*p);
    }
    DominantPart {
        kept_exponents,
        kept_coefficients,
        vanishing_norm: discarded.norm(),
        threshold,
        borderline,
        fit_residual: fit.fit_residual,
    }
}

/// Log-log slope of a magnitude against the scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Samples dropped for non-positive or non-finite magnitude.
    pub excluded: usize,
}

pub const MIN_SCALING_RUNGS: usize = 5;

pub fn scaling_exponent(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    let mut excluded = 0;
    for &(e, v) in samples {
        if !(e > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {e}")));
        }
        if v > 0.0 && v.is_finite() {
            xs.push(e.ln());
            ys.push(v.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < MIN_SCALING_RUNGS {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs >= {MIN_SCALING_RUNGS} positive samples, got {} ({excluded} excluded)",
            xs.len()
        )));
    }
    let fit = linear_fit(&xs, &ys);
    Ok(ScalingFit { slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, excluded })
}
