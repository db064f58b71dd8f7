//! Hypergeometric functions `ₚFq(a; b; X)` of a symmetric matrix argument.
//!
//! The raw entry points ([`hyperg_matrix`], [`hyperg_eigen`], [`hyperg_scalar`]) sum the
//! zonal series as it stands. [`evaluate`] additionally applies Kummer and Pfaff
//! transformations, closed forms and (for 1 × 1 arguments) connection formulas and
//! asymptotic expansions, and fails unless the result converged.

mod scalar;
mod series;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixops::sym_eigenvalues;
use crate::specialfun::LogValue;

pub(crate) use series::terminating_order;
pub use series::{wynn_epsilon, Compensated};

/// Truncation and acceptance settings for series evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Largest zonal degree `K` summed for matrix arguments. Also the surrogate for
    /// "all partitions" in parameter bounds of the form `b > (m-1)/2 + k_1`.
    pub max_degree: u32,
    /// A degree is negligible when its contribution is below `tolerance * |sum|`.
    pub tolerance: f64,
    /// Largest allowed ratio of the biggest degree contribution to the final sum.
    pub max_growth: f64,
    /// Apply Wynn's epsilon algorithm when `max_degree` is reached unconverged.
    pub accelerate: bool,
    /// Relative error estimate below which accelerated and asymptotic sums are accepted.
    pub accel_tolerance: f64,
    /// Term cap for scalar (1 × 1) evaluation inside [`evaluate`].
    pub scalar_max_terms: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            max_degree: 30,
            tolerance: 1e-10,
            max_growth: 1e7,
            accelerate: true,
            accel_tolerance: 1e-8,
            scalar_max_terms: 5000,
        }
    }
}

impl TruncationPolicy {
    pub fn with_max_degree(mut self, k: u32) -> Self {
        self.max_degree = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::domain("truncation", format!("tolerance {} not in (0,1)", self.tolerance)));
        }
        if !(self.max_growth >= 1.0) || !(self.accel_tolerance > 0.0) {
            return Err(Error::domain("truncation", "max_growth must be >= 1 and accel_tolerance > 0"));
        }
        if self.max_degree > crate::zonal::MAX_DEGREE_CEILING {
            return Err(Error::Resource {
                detail: format!("max_degree {} exceeds ceiling {}", self.max_degree, crate::zonal::MAX_DEGREE_CEILING),
            });
        }
        Ok(())
    }
}

/// Parameters of `ₚFq(a_1..a_p; b_1..b_q; ·)` with a truncation policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergeomSpec {
    #[serde(default)]
    pub upper: Vec<f64>,
    #[serde(default)]
    pub lower: Vec<f64>,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

impl HypergeomSpec {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>) -> Self {
        HypergeomSpec { upper, lower, truncation: TruncationPolicy::default() }
    }

    pub fn with_policy(mut self, policy: TruncationPolicy) -> Self {
        self.truncation = policy;
        self
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// `ₚ₊₁F_q(a, extra; b)`.
    pub fn with_upper(&self, extra: f64) -> Self {
        let mut s = self.clone();
        s.upper.push(extra);
        s
    }

    /// `ₚF_{q+1}(a; b, extra)`.
    pub fn with_lower(&self, extra: f64) -> Self {
        let mut s = self.clone();
        s.lower.push(extra);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.upper.iter().chain(&self.lower).any(|v| !v.is_finite()) {
            return Err(Error::domain("hypergeometric parameters", "must be finite"));
        }
        self.truncation.validate()
    }
}

/// How a series evaluation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Three consecutive negligible degrees.
    Converged,
    /// A non-positive integer upper parameter made the series a polynomial.
    Terminating,
    /// Summed to `max_degree` and extrapolated with Wynn's epsilon algorithm.
    Accelerated,
    /// Divergent series truncated at its smallest term.
    Asymptotic,
    /// Summed to `max_degree` without convergence.
    Truncated,
    /// Evaluated from an elementary closed form.
    ClosedForm,
}

/// Transformation applied before summation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    None,
    Kummer,
    Pfaff,
    Connection,
    Asymptotic,
    ClosedForm,
}

/// Diagnostics from a series evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub degrees_used: u32,
    pub terms: u64,
    pub last_contribution: f64,
    pub max_contribution: f64,
    pub estimated_error: f64,
    pub termination: Termination,
    pub transform: Transform,
    pub converged: bool,
}

impl SeriesReport {
    fn closed_form() -> Self {
        SeriesReport {
            degrees_used: 0,
            terms: 0,
            last_contribution: 0.0,
            max_contribution: 0.0,
            estimated_error: 0.0,
            termination: Termination::ClosedForm,
            transform: Transform::ClosedForm,
            converged: true,
        }
    }
}

/// Result of a raw series evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergeomValue {
    pub value: f64,
    pub report: SeriesReport,
}

/// Result of [`evaluate`], kept in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluated {
    pub value: LogValue,
    pub report: SeriesReport,
}

impl Evaluated {
    pub fn ln(&self, what: &str) -> Result<f64> {
        self.value.ln(what)
    }
}

/// Raw zonal series at a symmetric matrix argument.
pub fn hyperg_matrix(spec: &HypergeomSpec, x: &DMatrix<f64>) -> Result<HypergeomValue> {
    hyperg_eigen(spec, &sym_eigenvalues(x)?)
}

/// Raw zonal series from the eigenvalues of the argument.
pub fn hyperg_eigen(spec: &HypergeomSpec, eigenvalues: &[f64]) -> Result<HypergeomValue> {
    spec.validate()?;
    let (value, report) = series::matrix_series(&spec.upper, &spec.lower, eigenvalues, &spec.truncation)?;
    Ok(HypergeomValue { value, report })
}

/// Raw scalar series, truncated at `max_degree` terms exactly like a 1 × 1 matrix argument.
pub fn hyperg_scalar(spec: &HypergeomSpec, z: f64) -> Result<HypergeomValue> {
    spec.validate()?;
    let (value, report) =
        series::scalar_series(&spec.upper, &spec.lower, z, &spec.truncation, spec.truncation.max_degree)?;
    Ok(HypergeomValue { value, report })
}

fn require_converged(v: HypergeomValue, transform: Transform) -> Result<Evaluated> {
    if !v.report.converged {
        return Err(Error::Divergence {
            detail: format!(
                "series not converged after {} degrees (last contribution {:e}, estimated error {:e})",
                v.report.degrees_used, v.report.last_contribution, v.report.estimated_error
            ),
        });
    }
    let mut report = v.report;
    report.transform = transform;
    Ok(Evaluated { value: LogValue::from_f64(v.value), report })
}

/// Transformation-aware evaluation from eigenvalues. Errors unless the result converged.
pub fn evaluate(spec: &HypergeomSpec, eigenvalues: &[f64]) -> Result<Evaluated> {
    spec.validate()?;
    if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("hypergeometric argument", "eigenvalues must be finite and non-empty"));
    }
    let policy = &spec.truncation;
    let trace: f64 = eigenvalues.iter().sum();
    let radius = eigenvalues.iter().fold(0.0f64, |r, v| r.max(v.abs()));
    let terminating = spec.upper.iter().any(|&a| terminating_order(a).is_some());
    match (spec.upper.as_slice(), spec.lower.as_slice()) {
        ([], []) => {
            return Ok(Evaluated { value: LogValue::positive(trace), report: SeriesReport::closed_form() });
        }
        ([a], []) if !terminating && radius < 1.0 => {
            let ln: f64 = eigenvalues.iter().map(|v| -a * (-v).ln_1p()).sum();
            return Ok(Evaluated { value: LogValue::positive(ln), report: SeriesReport::closed_form() });
        }
        _ => {}
    }
    if eigenvalues.len() == 1 {
        let z = eigenvalues[0];
        return match (spec.upper.as_slice(), spec.lower.as_slice()) {
            ([b], [c]) => scalar::hyp1f1(*b, *c, z, policy),
            ([a, b], [c]) => scalar::hyp2f1(*a, *b, *c, z, policy),
            _ => {
                let (v, r) = series::scalar_series(&spec.upper, &spec.lower, z, policy, policy.scalar_max_terms)?;
                require_converged(HypergeomValue { value: v, report: r }, Transform::None)
            }
        };
    }
    if terminating {
        return require_converged(hyperg_eigen(spec, eigenvalues)?, Transform::None);
    }
    match (spec.upper.as_slice(), spec.lower.as_slice()) {
        ([b], [c]) => {
            let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if reaches_without_pole(c - b, *c, eigenvalues.len()) || (min < 0.0 && -min > max) {
                let flipped: Vec<f64> = eigenvalues.iter().map(|v| -v).collect();
                let inner = HypergeomSpec { upper: vec![c - b], lower: vec![*c], truncation: policy.clone() };
                let mut e = require_converged(hyperg_eigen(&inner, &flipped)?, Transform::Kummer)?;
                e.value = LogValue::positive(trace) * e.value;
                return Ok(e);
            }
        }
        ([a, b], [c])
            if eigenvalues.iter().all(|&v| v < 1.0) => {
                let w: Vec<f64> = eigenvalues.iter().map(|v| v / (v - 1.0)).collect();
                let w_radius = w.iter().fold(0.0f64, |r, v| r.max(v.abs()));
                let pick = if reaches_without_pole(c - b, *c, eigenvalues.len()) {
                    Some((*a, *b))
                } else if reaches_without_pole(c - a, *c, eigenvalues.len()) {
                    Some((*b, *a))
                } else if w_radius < radius {
                    Some((*a, *b))
                } else {
                    None
                };
                if let Some((x, y)) = pick {
                    let inner = HypergeomSpec { upper: vec![x, c - y], lower: vec![*c], truncation: policy.clone() };
                    let mut e = require_converged(hyperg_eigen(&inner, &w)?, Transform::Pfaff)?;
                    let ln_det: f64 = eigenvalues.iter().map(|v| (-v).ln_1p()).sum();
                    e.value = LogValue::positive(-x * ln_det) * e.value;
                    return Ok(e);
                }
            }
        _ => {}
    }
    require_converged(hyperg_eigen(spec, eigenvalues)?, Transform::None)
}

/// True when `upper` terminates and the lower parameter `c` has no zero factor up to
/// the terminating degree.
fn reaches_without_pole(upper: f64, c: f64, m: usize) -> bool {
    let Some(j) = terminating_order(upper) else { return false };
    let degree = j as usize * m;
    (1..=m.min(degree)).all(|i| match terminating_order(c - (i - 1) as f64 / 2.0) {
        Some(t) => t as usize + 1 > degree / i,
        None => true,
    })
}

/// [`evaluate`] at a symmetric matrix.
pub fn evaluate_matrix(spec: &HypergeomSpec, x: &DMatrix<f64>) -> Result<Evaluated> {
    evaluate(spec, &sym_eigenvalues(x)?)
}

/// Both sides of a transformation identity evaluated with raw series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
}

impl IdentityResidual {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityResidual { lhs, rhs, relative_error: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE) }
    }
}

/// Kummer: `₁F₁(b; c; X) = etr(X) ₁F₁(c-b; c; -X)`, both sides by raw series.
pub fn kummer_residual(b: f64, c: f64, eigenvalues: &[f64], policy: &TruncationPolicy) -> Result<IdentityResidual> {
    let lhs = hyperg_eigen(&HypergeomSpec::new(vec![b], vec![c]).with_policy(policy.clone()), eigenvalues)?;
    let flipped: Vec<f64> = eigenvalues.iter().map(|v| -v).collect();
    let inner = hyperg_eigen(&HypergeomSpec::new(vec![c - b], vec![c]).with_policy(policy.clone()), &flipped)?;
    let trace: f64 = eigenvalues.iter().sum();
    Ok(IdentityResidual::new(lhs.value, trace.exp() * inner.value))
}

/// Euler: `₂F₁(a, b; c; X) = |I-X|^{c-a-b} ₂F₁(c-a, c-b; c; X)`, both sides by raw series.
pub fn euler_residual(
    a: f64,
    b: f64,
    c: f64,
    eigenvalues: &[f64],
    policy: &TruncationPolicy,
) -> Result<IdentityResidual> {
    let lhs = hyperg_eigen(&HypergeomSpec::new(vec![a, b], vec![c]).with_policy(policy.clone()), eigenvalues)?;
    let rhs = hyperg_eigen(&HypergeomSpec::new(vec![c - a, c - b], vec![c]).with_policy(policy.clone()), eigenvalues)?;
    let ln_det: f64 = eigenvalues.iter().map(|v| (-v).ln_1p()).sum();
    Ok(IdentityResidual::new(lhs.value, ((c - a - b) * ln_det).exp() * rhs.value))
}
