//! Identity checks: beta-type integrals, Mellin transforms, normalisation and the compound
//! constructions.

use std::time::Duration;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::cone::{importance_mean, McEstimate, Proposal};
use super::quadrature::{integrate, integrate_half_line, integrate_real_line, integrate_upper, Integral, QuadOptions};
use crate::densities::{
    CompoundThm4, Density, DistributionSpec, GenHgForm, HgBeta2, HgGamma, MatricvariateT, MatrixNormal, ParamsSpec,
    Support,
};
use crate::error::{Error, Result};
use crate::hypergeom::{evaluate, HypergeomSpec};
use crate::matrixops::{sym_eigenvalues, symmetrize, EllipticalParams, SpdMatrix};
use crate::partitions::Partition;
use crate::samplers::Sampler;
use crate::specialfun::{gen_pochhammer, ln_mv_beta, ln_mv_gamma};
use crate::zonal::zonal_eval;

/// Outcome of one check. `pass` holds exactly when `relative_error <= tolerance`, where the
/// error is absolute when `rhs == 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, evaluations: u64) -> Self {
        let relative_error = if rhs == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / rhs.abs() };
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            relative_error,
            tolerance,
            pass: relative_error <= tolerance,
            evaluations,
            std_error: None,
            note: None,
            wall_time: Duration::ZERO,
        }
    }

    /// Monte-Carlo estimate against `rhs`, passing within three standard errors.
    pub fn monte_carlo(name: impl Into<String>, est: &McEstimate, rhs: f64) -> Self {
        let se = est.std_error;
        let tolerance = if rhs == 0.0 { 3.0 * se } else { 3.0 * se / rhs.abs() };
        CheckReport { std_error: Some(se), ..Self::new(name, est.mean, rhs, tolerance, est.draws as u64) }
    }

    /// A check whose oracle or closed side raised an error.
    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        CheckReport {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            relative_error: f64::NAN,
            tolerance: 0.0,
            pass: false,
            evaluations: 0,
            std_error: None,
            note: Some(err.to_string()),
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Shared knobs for the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    pub draws: usize,
    pub quad: QuadOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 7, draws: 200_000, quad: QuadOptions::default() }
    }
}

impl CheckOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        CheckOptions { seed, ..self }
    }
}

fn half_m1(m: usize) -> f64 {
    (m as f64 - 1.0) / 2.0
}

fn need(cond: bool, what: &str, detail: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(what, detail))
    }
}

fn square_symmetric(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if r.nrows() != r.ncols() || r.nrows() == 0 {
        return Err(Error::dimension("square R", crate::matrixops::shape(r)));
    }
    symmetrize(r)
}

fn one(x: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, x)
}

fn value_at(spec: &HypergeomSpec, eigs: &[f64]) -> Result<f64> {
    if eigs.iter().all(|&v| v == 0.0) {
        Ok(1.0)
    } else {
        Ok(evaluate(spec, eigs)?.value.to_f64())
    }
}

/// `∫ |Y|^{a-(m+1)/2} |I+Y|^{-(a+b)} g(Y) dY` by quadrature (`m = 1`) or by importance
/// sampling from the beta type II law with the same exponents (`m = 2`).
fn beta_weighted_integral<G>(a: f64, b: f64, m: usize, g: G, opts: &CheckOptions) -> Result<Estimate>
where
    G: Fn(&SpdMatrix) -> Result<f64> + Sync,
{
    match m {
        1 => {
            let r = integrate_half_line(
                |y| {
                    let w = ((a - 1.0) * y.ln() - (a + b) * y.ln_1p()).exp();
                    if w == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(w * g(&SpdMatrix::new(one(y))?)?)
                },
                opts.quad,
            )?;
            Ok(Estimate::Quadrature(r))
        }
        2 => {
            let q = Proposal::Beta2 { a, b, m };
            let est = importance_mean(
                &q,
                |y, ln_q| {
                    let s = SpdMatrix::new(y.clone())?;
                    let ln_f = (a - 1.5) * s.ln_det() - (a + b) * s.ln_det_i_plus();
                    Ok((ln_f - ln_q).exp() * g(&s)?)
                },
                opts.draws,
                opts.seed,
            )?;
            Ok(Estimate::MonteCarlo(est))
        }
        _ => Err(Error::Unsupported { detail: format!("cone oracles cover m <= 2, got m = {m}") }),
    }
}

enum Estimate {
    Quadrature(Integral),
    MonteCarlo(McEstimate),
}

impl Estimate {
    fn report(&self, name: String, rhs: f64, quad_tol: f64) -> CheckReport {
        match self {
            Estimate::Quadrature(r) => CheckReport::new(name, r.value, rhs, quad_tol, r.evaluations),
            Estimate::MonteCarlo(e) => CheckReport::monte_carlo(name, e, rhs),
        }
    }
}

/// `∫|Y|^{a-(m+1)/2}|I+Y|^{-(a+b)} C_κ(YR) dY = (a)_κ β_m(a,b) / (-b+(m+1)/2)_κ · C_κ(-R)`.
pub fn check_lemma1(a: f64, b: f64, r: &DMatrix<f64>, kappa: &Partition, opts: &CheckOptions) -> Result<CheckReport> {
    let r = square_symmetric(r)?;
    let m = r.nrows();
    let mf = m as f64;
    need(a > half_m1(m), "lemma1", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
    let k1 = f64::from(kappa.first());
    need(b > half_m1(m) + k1, "lemma1", format!("b = {b} must exceed (m-1)/2 + k1"))?;
    let neg = sym_eigenvalues(&(-&r))?;
    let rhs = gen_pochhammer(a, kappa) / gen_pochhammer(-b + (mf + 1.0) / 2.0, kappa)
        * ln_mv_beta(m, a, b)?.exp()
        * zonal_eval(kappa, &neg)?;
    let est = if m == 1 {
        // Scalar zonal polynomials are plain powers.
        let (k, r0) = (kappa.weight() as i32, r[(0, 0)]);
        let single = kappa.len() <= 1;
        beta_weighted_integral(a, b, m, |y| Ok(if single { (y.matrix()[(0, 0)] * r0).powi(k) } else { 0.0 }), opts)?
    } else {
        beta_weighted_integral(a, b, m, |y| zonal_eval(kappa, &y.product_eigenvalues(&r)?), opts)?
    };
    Ok(est.report(format!("lemma1 m={m} kappa={kappa} a={a} b={b}"), rhs, 1e-8))
}

/// `∫|Y|^{a-(m+1)/2}|I+Y|^{-(a+b)} ₚFq(YR) dY = β_m(a,b) ₚ₊₁Fq₊₁(…, a; …, -b+(m+1)/2; -R)`.
pub fn check_corollary1(
    a: f64,
    b: f64,
    r: &DMatrix<f64>,
    spec: &HypergeomSpec,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    let r = square_symmetric(r)?;
    let m = r.nrows();
    let mf = m as f64;
    spec.validate()?;
    need(a > half_m1(m), "corollary1", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
    let bound = half_m1(m) + f64::from(spec.truncation.max_degree);
    need(b > bound, "corollary1", format!("b = {b} must exceed (m-1)/2 + K = {bound}"))?;
    let closed = spec.with_upper(a).with_lower(-b + (mf + 1.0) / 2.0);
    let rhs = ln_mv_beta(m, a, b)?.exp() * value_at(&closed, &sym_eigenvalues(&(-&r))?)?;
    let est = beta_weighted_integral(a, b, m, |y| value_at(spec, &y.product_eigenvalues(&r)?), opts)?;
    Ok(est.report(format!("corollary1 m={m} {}F{} a={a} b={b}", spec.p(), spec.q()), rhs, 1e-8))
}

/// Log of the ₂F₁ Mellin transform. The corrected reading is
/// `β_m[α,b-α] β_m[a-α,c-a] / β_m[a,c-a]`, which reduces to
/// `Γ_m[α]Γ_m[b-α]Γ_m[a-α]Γ_m[c] / (Γ_m[b]Γ_m[a]Γ_m[c-α])`; the printed reading has
/// `β_m[a-α,c-α]` in place of `β_m[a-α,c-a]`.
pub fn ln_mellin_2f1(alpha: f64, a: f64, b: f64, c: f64, m: usize, printed: bool) -> Result<f64> {
    if printed {
        return Ok(ln_mv_beta(m, alpha, b - alpha)? + ln_mv_beta(m, a - alpha, c - alpha)? - ln_mv_beta(m, a, c - a)?);
    }
    Ok(ln_mv_gamma(m, alpha)? + ln_mv_gamma(m, b - alpha)? + ln_mv_gamma(m, a - alpha)? + ln_mv_gamma(m, c)?
        - ln_mv_gamma(m, b)?
        - ln_mv_gamma(m, a)?
        - ln_mv_gamma(m, c - alpha)?)
}

/// Log of the ₁F₁ Mellin transform `Γ_m[α]Γ_m[c]Γ_m[b-α] / (Γ_m[b]Γ_m[c-α])`.
pub fn ln_mellin_1f1(alpha: f64, b: f64, c: f64, m: usize) -> Result<f64> {
    Ok(ln_mv_gamma(m, alpha)? + ln_mv_gamma(m, c)? + ln_mv_gamma(m, b - alpha)?
        - ln_mv_gamma(m, b)?
        - ln_mv_gamma(m, c - alpha)?)
}

/// `∫ |Y|^{α-(m+1)/2} F(-Y) dY` with a beta type II proposal decaying like `|Y|^{-decay}`.
fn mellin_integral(alpha: f64, decay: f64, m: usize, spec: &HypergeomSpec, opts: &CheckOptions) -> Result<Estimate> {
    match m {
        1 => Ok(Estimate::Quadrature(integrate_half_line(
            |y| Ok(y.powf(alpha - 1.0) * evaluate(spec, &[-y])?.value.to_f64()),
            opts.quad,
        )?)),
        2 => {
            let q = Proposal::Beta2 { a: alpha, b: decay - alpha, m };
            let est = importance_mean(
                &q,
                |y, ln_q| {
                    let s = SpdMatrix::new(y.clone())?;
                    let neg: Vec<f64> = s.eigenvalues().iter().map(|v| -v).collect();
                    Ok(((alpha - 1.5) * s.ln_det() - ln_q).exp() * evaluate(spec, &neg)?.value.to_f64())
                },
                opts.draws,
                opts.seed,
            )?;
            Ok(Estimate::MonteCarlo(est))
        }
        _ => Err(Error::Unsupported { detail: format!("cone oracles cover m <= 2, got m = {m}") }),
    }
}

/// Mellin transform of `₂F₁(a,b;c;-Y)`. The report pins the corrected reading and notes
/// how far the printed one is from the integral.
pub fn check_mellin_2f1(alpha: f64, a: f64, b: f64, c: f64, m: usize, opts: &CheckOptions) -> Result<CheckReport> {
    let h = half_m1(m);
    need(alpha > h, "mellin 2F1", format!("alpha = {alpha} must exceed (m-1)/2 = {}", half_m1(m)))?;
    need(
        a - alpha > h && b - alpha > h,
        "mellin 2F1",
        format!("a - alpha and b - alpha must exceed (m-1)/2 (a = {a}, b = {b})"),
    )?;
    need(c > h && c - alpha > h, "mellin 2F1", format!("c and c - alpha must exceed (m-1)/2 (c = {c})"))?;
    let spec = HypergeomSpec::new(vec![a, b], vec![c]);
    let est = mellin_integral(alpha, a.min(b), m, &spec, opts)?;
    let rhs = ln_mellin_2f1(alpha, a, b, c, m, false)?.exp();
    let report = est.report(format!("lemma4 mellin 2F1 m={m} alpha={alpha} a={a} b={b} c={c}"), rhs, 1e-8);
    let note = match ln_mellin_2f1(alpha, a, b, c, m, true) {
        Ok(p) => {
            format!("printed reading {:e}, relative error {:.3e}", p.exp(), (report.lhs - p.exp()).abs() / p.exp())
        }
        Err(e) => format!("printed reading undefined: {e}"),
    };
    Ok(report.with_note(note))
}

/// Mellin transform of `₁F₁(b;c;-Y)`.
pub fn check_mellin_1f1(alpha: f64, b: f64, c: f64, m: usize, opts: &CheckOptions) -> Result<CheckReport> {
    let h = half_m1(m);
    need(
        alpha > h && b - alpha > h,
        "mellin 1F1",
        format!("alpha = {alpha} and b - alpha must exceed (m-1)/2 (b = {b})"),
    )?;
    need(c > h && c - alpha > h, "mellin 1F1", format!("c and c - alpha must exceed (m-1)/2 (c = {c})"))?;
    let spec = HypergeomSpec::new(vec![b], vec![c]);
    let est = mellin_integral(alpha, b, m, &spec, opts)?;
    let rhs = ln_mellin_1f1(alpha, b, c, m)?.exp();
    Ok(est.report(format!("lemma5 mellin 1F1 m={m} alpha={alpha} b={b} c={c}"), rhs, 1e-8))
}

/// Large-`a` limit: `∫|Y|^{α-(m+1)/2} ₂F₁(a,b;c;-Y/a) dY = a^{mα} · (₂F₁ Mellin)` tends to
/// the ₁F₁ Mellin value. One report per consecutive pair of `a_values`, passing when the
/// distance to the limit does not grow.
pub fn check_lemma4_limit(alpha: f64, b: f64, c: f64, m: usize, a_values: &[f64]) -> Result<Vec<CheckReport>> {
    let target = ln_mellin_1f1(alpha, b, c, m)?.exp();
    let mf = m as f64;
    let seq = a_values
        .iter()
        .map(|&a| Ok(((mf * alpha) * a.ln() + ln_mellin_2f1(alpha, a, b, c, m, false)?).exp()))
        .collect::<Result<Vec<f64>>>()?;
    let printed: Vec<String> = a_values
        .iter()
        .map(|&a| match ln_mellin_2f1(alpha, a, b, c, m, true) {
            Ok(v) => format!("{:.3e}", ((mf * alpha) * a.ln() + v).exp() / target - 1.0),
            Err(_) => "undefined".into(),
        })
        .collect();
    let dist: Vec<f64> = seq.iter().map(|v| (v - target).abs() / target.abs()).collect();
    Ok((1..seq.len())
        .map(|i| {
            CheckReport::new(
                format!("lemma4 limit m={m} a={} vs a={}", a_values[i], a_values[i - 1]),
                seq[i],
                target,
                dist[i - 1],
                0,
            )
            .with_note(format!("printed reading relative offsets: [{}]", printed.join(", ")))
        })
        .collect())
}

/// Oracle used by [`check_normalization`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// 1-D adaptive quadrature, `1 × 1` supports.
    Quadrature,
    /// Importance sampling over the SPD cone or over `n × m` matrices.
    SpdMc,
}

fn params_of(spec: &DistributionSpec) -> Option<&ParamsSpec> {
    use DistributionSpec as D;
    match spec {
        D::MatrixNormal(s) => Some(&s.params),
        D::MatricvariateT(s) => Some(&s.params),
        D::CompoundThm1(s) => Some(&s.params),
        D::CompoundThm2(s) => Some(&s.params),
        D::CompoundThm3(s) => Some(&s.params),
        D::CompoundThm4(s) => Some(&s.params),
        D::ScaleMixThm5(s) => Some(&s.params),
        _ => None,
    }
}

fn cone_proposal(spec: &DistributionSpec) -> Result<Proposal> {
    use DistributionSpec as D;
    Ok(match spec {
        D::HgGamma(s) | D::HgGammaInv(s) => {
            let xi = SpdMatrix::new(s.xi.to_matrix()?)?;
            Proposal::Wishart { df: 2.0 * s.a, scale: xi.inverse(), inverted: matches!(spec, D::HgGammaInv(_)) }
        }
        D::HgBeta2(s) => Proposal::Beta2 { a: s.a, b: s.b, m: s.xi.to_matrix()?.nrows() },
        D::HgBeta2Inv(s) => Proposal::Beta2 { a: s.b, b: s.a, m: s.xi.to_matrix()?.nrows() },
        D::GenHg(s) | D::GenHgInv(s) => {
            let decay = match s.form {
                GenHgForm::Confluent => s.b,
                GenHgForm::Gauss => s.b.min(s.a.unwrap_or(f64::INFINITY)),
            };
            let m = s.xi.to_matrix()?.nrows();
            if matches!(spec, D::GenHg(_)) {
                Proposal::Beta2 { a: s.alpha, b: decay - s.alpha, m }
            } else {
                Proposal::Beta2 { a: decay - s.alpha, b: s.alpha, m }
            }
        }
        _ => return Err(Error::Unsupported { detail: "no cone proposal for this family".into() }),
    })
}

/// `∫ f = 1` for the density described by `spec`; tolerance `1e-6` for quadrature and
/// three standard errors for Monte Carlo.
pub fn check_normalization(
    name: &str,
    spec: &DistributionSpec,
    method: NormMethod,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    let d = spec.build()?;
    let name = format!("normalization {name}");
    match (method, d.support()) {
        (NormMethod::Quadrature, Support::Matrix { rows: 1, cols: 1 }) => {
            let center = match params_of(spec) {
                Some(p) => p.mu.to_matrix()?[(0, 0)],
                None => 0.0,
            };
            let r = integrate_real_line(|x| Ok(d.ln_pdf(&one(x))?.exp()), center, opts.quad)?;
            Ok(CheckReport::new(name, r.value, 1.0, 1e-6, r.evaluations))
        }
        (NormMethod::Quadrature, Support::Spd { dim: 1 }) => {
            let r = integrate_half_line(|y| Ok(d.ln_pdf(&one(y))?.exp()), opts.quad)?;
            Ok(CheckReport::new(name, r.value, 1.0, 1e-6, r.evaluations))
        }
        (NormMethod::Quadrature, s) => {
            Err(Error::Unsupported { detail: format!("quadrature needs a 1x1 support, got {s:?}") })
        }
        (NormMethod::SpdMc, Support::Spd { .. }) => {
            let q = cone_proposal(spec)?;
            let est = importance_mean(&q, |y, ln_q| Ok((d.ln_pdf(y)? - ln_q).exp()), opts.draws, opts.seed)?;
            Ok(CheckReport::monte_carlo(name, &est, 1.0))
        }
        (NormMethod::SpdMc, Support::Matrix { .. }) => {
            let p = params_of(spec).expect("matrix-valued families carry params").build()?;
            let scale = SpdMatrix::new(p.theta.matrix().kronecker(p.sigma.matrix()))?;
            let q = Proposal::StudentT { nu: 1.0, center: p.mu.clone(), scale };
            let est = importance_mean(&q, |x, ln_q| Ok((d.ln_pdf(x)? - ln_q).exp()), opts.draws, opts.seed)?;
            Ok(CheckReport::monte_carlo(name, &est, 1.0))
        }
    }
}

/// A compound family split into its mixing law over a scalar `s` and its conditional law
/// with `Σ` replaced by `sΣ`.
struct Mixture {
    mixing: Box<dyn Density>,
    nu: Option<f64>,
    params: EllipticalParams,
}

impl Mixture {
    fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        use DistributionSpec as D;
        let scalar_only = |p: &EllipticalParams| -> Result<()> {
            if p.m() == 1 {
                Ok(())
            } else {
                Err(Error::Unsupported { detail: "the 1-D mixture integral needs m = 1".into() })
            }
        };
        let (mixing, nu, params): (Box<dyn Density>, _, _) = match spec {
            D::CompoundThm1(s) => {
                let p = s.params.build()?;
                scalar_only(&p)?;
                let mix = HgGamma::new(
                    s.a,
                    SpdMatrix::new(s.xi.to_matrix()?)?,
                    s.upsilon.to_matrix()?,
                    s.hypergeom.clone(),
                    true,
                )?;
                (Box::new(mix), None, p)
            }
            D::CompoundThm2(s) => {
                let p = s.params.build()?;
                scalar_only(&p)?;
                (Box::new(HgBeta2::new(s.a, s.b, s.xi.to_matrix()?, s.hypergeom.clone(), true)?), None, p)
            }
            D::CompoundThm4(s) => {
                let p = s.params.build()?;
                scalar_only(&p)?;
                let spec0 = HypergeomSpec::new(vec![], vec![]).with_policy(s.truncation.clone());
                (Box::new(HgBeta2::new(s.a, s.b, DMatrix::zeros(1, 1), spec0, true)?), Some(s.nu), p)
            }
            D::ScaleMixThm5(s) => {
                let mix = HgGamma::new(s.a, SpdMatrix::new(one(s.xi))?, one(s.upsilon), s.hypergeom.clone(), true)?;
                (Box::new(mix), None, s.params.build()?)
            }
            _ => return Err(Error::Unsupported { detail: "not a compound family".into() }),
        };
        Ok(Mixture { mixing, nu, params })
    }

    fn scaled(&self, s: f64) -> Result<EllipticalParams> {
        EllipticalParams::new(
            self.params.mu.clone(),
            SpdMatrix::new(self.params.sigma.matrix() * s)?,
            self.params.theta.clone(),
        )
    }

    fn ln_mixing(&self, s: f64) -> Result<f64> {
        self.mixing.ln_pdf(&one(s))
    }

    fn density(&self, x: &DMatrix<f64>, quad: QuadOptions) -> Result<Integral> {
        integrate_half_line(
            |s| {
                let p = self.scaled(s)?;
                let cond = match self.nu {
                    None => MatrixNormal::new(p).ln_pdf(x)?,
                    Some(nu) => MatricvariateT::new(nu, p)?.ln_pdf(x)?,
                };
                Ok((cond + self.ln_mixing(s)?).exp())
            },
            quad,
        )
    }

    /// `P(X <= x)` for `m = n = 1`.
    fn cdf(&self, x: f64, quad: QuadOptions) -> Result<Integral> {
        let mu = self.params.mu[(0, 0)];
        let v = self.params.sigma.matrix()[(0, 0)] * self.params.theta.matrix()[(0, 0)];
        integrate_half_line(
            |s| {
                let z = (x - mu) / (s * v).sqrt();
                let g = match self.nu {
                    None => 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2),
                    Some(nu) => {
                        let t = z * nu.sqrt();
                        let tail = 0.5 * beta_reg(nu / 2.0, 0.5, nu / (nu + t * t));
                        if t > 0.0 {
                            1.0 - tail
                        } else {
                            tail
                        }
                    }
                };
                Ok(if g == 0.0 { 0.0 } else { g * self.ln_mixing(s)?.exp() })
            },
            quad,
        )
    }
}

/// The 1-D mixture integral `∫ f(X | sΣ) g(s) ds` of a compound family.
pub fn mixture_density(spec: &DistributionSpec, x: &DMatrix<f64>, quad: QuadOptions) -> Result<Integral> {
    Mixture::from_spec(spec)?.density(x, quad)
}

fn worst_of(name: String, pairs: &[(f64, f64)], tolerance: f64, evaluations: u64) -> CheckReport {
    let rel = |(l, r): &(f64, f64)| if *r == 0.0 { l.abs() } else { (l - r).abs() / r.abs() };
    let worst = pairs.iter().max_by(|x, y| rel(x).total_cmp(&rel(y))).copied().unwrap_or((f64::NAN, f64::NAN));
    CheckReport::new(name, worst.0, worst.1, tolerance, evaluations)
        .with_note(format!("worst of {} points", pairs.len()))
}

/// Closed-form compound density against its mixture integral at each point.
pub fn check_mixture_pointwise(
    name: &str,
    spec: &DistributionSpec,
    points: &[DMatrix<f64>],
    tolerance: f64,
    quad: QuadOptions,
) -> Result<CheckReport> {
    let closed = spec.build()?;
    let mix = Mixture::from_spec(spec)?;
    let mut evals = 0;
    let mut pairs = Vec::with_capacity(points.len());
    for x in points {
        let r = mix.density(x, quad)?;
        evals += r.evaluations;
        pairs.push((closed.ln_pdf(x)?.exp(), r.value));
    }
    Ok(worst_of(format!("mixture {name}"), &pairs, tolerance, evals))
}

/// Two densities compared pointwise.
pub fn check_densities_agree(
    name: &str,
    lhs: &dyn Density,
    rhs: &dyn Density,
    points: &[DMatrix<f64>],
    tolerance: f64,
) -> Result<CheckReport> {
    let pairs = points.iter().map(|x| Ok((lhs.ln_pdf(x)?.exp(), rhs.ln_pdf(x)?.exp()))).collect::<Result<Vec<_>>>()?;
    Ok(worst_of(name.to_string(), &pairs, tolerance, 2 * points.len() as u64))
}

/// Direct against Euler-transformed form of the compound T density.
pub fn check_thm4_euler(name: &str, d: &CompoundThm4, points: &[DMatrix<f64>], tolerance: f64) -> Result<CheckReport> {
    let pairs =
        points.iter().map(|x| Ok((d.ln_pdf(x)?.exp(), d.ln_pdf_euler(x)?.exp()))).collect::<Result<Vec<_>>>()?;
    Ok(worst_of(name.to_string(), &pairs, tolerance, 2 * points.len() as u64))
}

/// How the reference CDF of a Kolmogorov–Smirnov check is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfRoute {
    /// Cumulative quadrature of the closed-form density between consecutive order statistics.
    ClosedForm,
    /// `∫ G(x | s) g(s) ds` with the conditional CDF `G` and the mixing density `g`.
    Mixture,
}

/// Kolmogorov–Smirnov statistic of `n` sampler draws (scalar support) against the
/// reference CDF, passing below `1.63/√n` (α ≈ 0.01). With `stride > 1` the CDF is
/// evaluated at every `stride`-th order statistic and the statistic is bounded from above.
pub fn check_sampler_ks(
    name: &str,
    spec: &DistributionSpec,
    route: CdfRoute,
    n: usize,
    seed: u64,
    stride: usize,
) -> Result<CheckReport> {
    let draws = Sampler::from_spec(spec)?.draw_many(n, seed)?;
    let mut xs = draws
        .iter()
        .map(|x| {
            if x.len() == 1 {
                Ok(x[(0, 0)])
            } else {
                Err(Error::dimension("scalar draws", crate::matrixops::shape(x)))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    xs.sort_by(f64::total_cmp);
    let stride = stride.max(1);
    let mut ranks: Vec<usize> = (stride..=n).step_by(stride).collect();
    if ranks.last() != Some(&n) {
        ranks.push(n);
    }
    let grid: Vec<f64> = ranks.iter().map(|r| xs[r - 1]).collect();
    let quad = QuadOptions { rel_tol: 1e-9, abs_tol: 1e-14, max_intervals: 2000 };
    let (cdf, evals) = match route {
        CdfRoute::ClosedForm => {
            let d = spec.build()?;
            let f = |x: f64| Ok(d.ln_pdf(&one(x))?.exp());
            let first = match d.support() {
                Support::Spd { .. } => integrate(f, 0.0, grid[0], quad)?,
                _ => integrate_upper(|y| f(2.0 * grid[0] - y), grid[0], quad)?,
            };
            let pieces = grid.par_windows(2).map(|w| integrate(f, w[0], w[1], quad)).collect::<Result<Vec<_>>>()?;
            let mut acc = first.value;
            let mut cdf = vec![acc];
            for p in &pieces {
                acc += p.value;
                cdf.push(acc);
            }
            (cdf, first.evaluations + pieces.iter().map(|p| p.evaluations).sum::<u64>())
        }
        CdfRoute::Mixture => {
            let mix = Mixture::from_spec(spec)?;
            let vals = grid.par_iter().map(|&x| mix.cdf(x, quad)).collect::<Result<Vec<_>>>()?;
            (vals.iter().map(|v| v.value).collect(), vals.iter().map(|v| v.evaluations).sum())
        }
    };
    let nf = n as f64;
    let d = ks_bound(n, &ranks, &cdf);
    let critical = 1.63 / nf.sqrt();
    let route_name = match route {
        CdfRoute::ClosedForm => "closed form",
        CdfRoute::Mixture => "mixture",
    };
    Ok(CheckReport::new(format!("ks {name}"), d, 0.0, critical, evals)
        .with_note(format!("n = {n}, stride = {stride}, reference CDF by {route_name}")))
}

/// Upper bound on `sup |F_n - F|` from `F` at the order statistics with 1-based `ranks`
/// (increasing, ending at `n`); exact when every rank is present.
fn ks_bound(n: usize, ranks: &[usize], cdf: &[f64]) -> f64 {
    let nf = n as f64;
    let mut d = ((ranks[0] - 1) as f64 / nf).max(cdf[0]);
    for j in 0..ranks.len() - 1 {
        d = d.max((ranks[j + 1] - 1) as f64 / nf - cdf[j]).max(cdf[j + 1] - ranks[j] as f64 / nf);
    }
    d.max(1.0 - cdf[cdf.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn quick() -> CheckOptions {
        CheckOptions { draws: 40_000, ..CheckOptions::default() }
    }

    #[test]
    fn lemma1_scalar_reference() {
        let r = check_lemma1(2.0, 4.0, &one(1.0), &Partition::new(vec![1]).unwrap(), &quick()).unwrap();
        let want = -(2.0 * (1.0 / 20.0) / -3.0);
        assert!((r.rhs - want).abs() < 1e-15);
        assert!(r.pass, "{r:?}");
        let empty = check_lemma1(2.0, 4.0, &one(0.7), &Partition::empty(), &quick()).unwrap();
        assert!(empty.relative_error < 1e-10);
    }

    #[test]
    fn lemma1_cone() {
        let r = check_lemma1(3.0, 3.0, &DMatrix::identity(2, 2), &Partition::new(vec![1]).unwrap(), &quick()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn mellin_readings() {
        let r = check_mellin_1f1(1.0, 3.0, 4.0, 1, &quick()).unwrap();
        assert!((r.rhs - 1.5).abs() < 1e-13 && r.pass, "{r:?}");
        let r = check_mellin_2f1(1.0, 3.0, 3.0, 5.0, 1, &quick()).unwrap();
        assert!(r.pass, "{r:?}");
        let printed = ln_mellin_2f1(1.0, 3.0, 3.0, 5.0, 1, true).unwrap().exp();
        assert!((printed - 0.3).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn limit_is_monotone() {
        let reports = check_lemma4_limit(1.2, 3.5, 4.1, 2, &[10.0, 50.0, 250.0]).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| r.pass), "{reports:?}");
    }

    #[test]
    fn normal_normalizes() {
        let spec = DistributionSpec::from_json(
            r#"{"family": "matrix_normal", "params": {"mu": [[0.3]], "sigma": [[2.0]], "theta": [[0.7]]}}"#,
        )
        .unwrap();
        let r = check_normalization("normal", &spec, NormMethod::Quadrature, &quick()).unwrap();
        assert!(r.relative_error < 1e-10, "{r:?}");
    }

    #[test]
    fn failed_report_serialises() {
        let r = CheckReport::failed("x", &Error::Divergence { detail: "d".into() });
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"lhs\":null") && !text.contains("wall_time"));
        assert!(!r.pass);
    }

    #[test]
    fn ks_bound_exact_and_strided() {
        let n = 1000;
        let xs: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let all: Vec<usize> = (1..=n).collect();
        let exact = ks_bound(n, &all, &xs);
        assert!((exact - 0.5 / n as f64).abs() < 1e-12);
        let ranks: Vec<usize> = (10..=n).step_by(10).collect();
        let cdf: Vec<f64> = ranks.iter().map(|r| xs[r - 1]).collect();
        assert!(ks_bound(n, &ranks, &cdf) >= exact);
        let shifted: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(ks_bound(n, &all, &shifted) > 0.2);
    }

    #[test]
    fn ks_sampler_against_closed_form() {
        let t = DistributionSpec::from_json(
            r#"{"family": "matricvariate_t", "nu": 3.0, "params": {"mu": [[0.5]], "sigma": [[1.5]], "theta": [[1.0]]}}"#,
        )
        .unwrap();
        let r = check_sampler_ks("t", &t, CdfRoute::ClosedForm, 20_000, 1, 1).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn mixture_matches_closed_t() {
        let spec = DistributionSpec::from_json(
            r#"{"family": "compound_thm1", "a": 1.5, "xi": [[0.5]], "upsilon": [[0.0]],
                "hypergeom": {"upper": [], "lower": []},
                "params": {"mu": [[0.0]], "sigma": [[1.0]], "theta": [[1.0]]}}"#,
        )
        .unwrap();
        let pts: Vec<DMatrix<f64>> = [-3.0, 0.0, 0.4, 5.0].iter().map(|&x| dmatrix![x]).collect();
        let r = check_mixture_pointwise("thm1", &spec, &pts, 1e-8, QuadOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
