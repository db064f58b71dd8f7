//! Log densities of the matrix-variate families: the elliptical laws, the SPD mixing
//! laws (hypergeometric gamma, beta type II and generalised hypergeometric, direct and
//! inverted) and the compound and scale-mixture laws built from them.
//!
//! Every family validates its parameters once at construction and precomputes its log
//! normalising constant. Points are `n × m` matrices for the elliptical and compound
//! families and `m × m` SPD matrices for the mixing families.

mod elliptical;
mod mixing;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergeom::{evaluate, HypergeomSpec, TruncationPolicy};
use crate::matrixops::{symmetrize, EllipticalParams, MatrixRows, SpdMatrix};

pub use elliptical::{
    CompoundThm1, CompoundThm2, CompoundThm3, CompoundThm4, MatricvariateT, MatrixNormal, ScaleMixThm5,
};
pub use mixing::{GenHg, HgBeta2, HgGamma};

/// Support of a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// Real `n × m` matrices.
    Matrix { rows: usize, cols: usize },
    /// Symmetric positive-definite `m × m` matrices.
    Spd { dim: usize },
}

/// A validated density with a precomputed normalising constant.
pub trait Density: Send + Sync {
    fn support(&self) -> Support;
    /// Natural log of the density at `x`.
    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64>;
}

/// Which of the two hypergeometric factors a generalised hypergeometric law carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenHgForm {
    /// ₂F₁(a, b; c; ·)
    Gauss,
    /// ₁F₁(b; c; ·)
    Confluent,
}

/// Location and scales in JSON form: `mu` is `n × m`, `sigma` `m × m`, `theta` `n × n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub mu: MatrixRows,
    pub sigma: MatrixRows,
    pub theta: MatrixRows,
}

impl ParamsSpec {
    pub fn build(&self) -> Result<EllipticalParams> {
        EllipticalParams::new(
            self.mu.to_matrix()?,
            SpdMatrix::new(self.sigma.to_matrix()?)?,
            SpdMatrix::new(self.theta.to_matrix()?)?,
        )
    }

    pub fn from_params(p: &EllipticalParams) -> Self {
        ParamsSpec {
            mu: MatrixRows::from_matrix(&p.mu),
            sigma: MatrixRows::from_matrix(p.sigma.matrix()),
            theta: MatrixRows::from_matrix(p.theta.matrix()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixNormalSpec {
    pub params: ParamsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatricvariateTSpec {
    pub nu: f64,
    pub params: ParamsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HgGammaSpec {
    pub a: f64,
    pub xi: MatrixRows,
    pub upsilon: MatrixRows,
    pub hypergeom: HypergeomSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HgBeta2Spec {
    pub a: f64,
    pub b: f64,
    pub xi: MatrixRows,
    pub hypergeom: HypergeomSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenHgSpec {
    pub form: GenHgForm,
    pub alpha: f64,
    /// Only used by the gauss form.
    #[serde(default)]
    pub a: Option<f64>,
    pub b: f64,
    pub c: f64,
    pub xi: MatrixRows,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundThm1Spec {
    pub a: f64,
    pub xi: MatrixRows,
    pub upsilon: MatrixRows,
    pub hypergeom: HypergeomSpec,
    pub params: ParamsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundThm2Spec {
    pub a: f64,
    pub b: f64,
    pub xi: MatrixRows,
    pub hypergeom: HypergeomSpec,
    pub params: ParamsSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundThm3Spec {
    pub form: GenHgForm,
    pub alpha: f64,
    #[serde(default)]
    pub a: Option<f64>,
    pub b: f64,
    pub c: f64,
    pub xi: MatrixRows,
    pub params: ParamsSpec,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundThm4Spec {
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub params: ParamsSpec,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleMixThm5Spec {
    pub a: f64,
    pub xi: f64,
    pub upsilon: f64,
    pub hypergeom: HypergeomSpec,
    pub params: ParamsSpec,
}

/// JSON description of any supported family, tagged by `"family"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    MatrixNormal(MatrixNormalSpec),
    MatricvariateT(MatricvariateTSpec),
    HgGamma(HgGammaSpec),
    HgGammaInv(HgGammaSpec),
    HgBeta2(HgBeta2Spec),
    HgBeta2Inv(HgBeta2Spec),
    GenHg(GenHgSpec),
    GenHgInv(GenHgSpec),
    CompoundThm1(CompoundThm1Spec),
    CompoundThm2(CompoundThm2Spec),
    CompoundThm3(CompoundThm3Spec),
    CompoundThm4(CompoundThm4Spec),
    ScaleMixThm5(ScaleMixThm5Spec),
}

impl DistributionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The truncation policy this family's series use, if it has any.
    pub fn truncation_mut(&mut self) -> Option<&mut TruncationPolicy> {
        use DistributionSpec as D;
        match self {
            D::MatrixNormal(_) | D::MatricvariateT(_) => None,
            D::HgGamma(s) | D::HgGammaInv(s) => Some(&mut s.hypergeom.truncation),
            D::HgBeta2(s) | D::HgBeta2Inv(s) => Some(&mut s.hypergeom.truncation),
            D::GenHg(s) | D::GenHgInv(s) => Some(&mut s.truncation),
            D::CompoundThm1(s) => Some(&mut s.hypergeom.truncation),
            D::CompoundThm2(s) => Some(&mut s.hypergeom.truncation),
            D::CompoundThm3(s) => Some(&mut s.truncation),
            D::CompoundThm4(s) => Some(&mut s.truncation),
            D::ScaleMixThm5(s) => Some(&mut s.hypergeom.truncation),
        }
    }

    /// Validates the parameters and returns the density.
    pub fn build(&self) -> Result<Box<dyn Density>> {
        use DistributionSpec as D;
        Ok(match self {
            D::MatrixNormal(s) => Box::new(MatrixNormal::new(s.params.build()?)),
            D::MatricvariateT(s) => Box::new(MatricvariateT::new(s.nu, s.params.build()?)?),
            D::HgGamma(s) | D::HgGammaInv(s) => Box::new(HgGamma::new(
                s.a,
                SpdMatrix::new(s.xi.to_matrix()?)?,
                s.upsilon.to_matrix()?,
                s.hypergeom.clone(),
                matches!(self, D::HgGammaInv(_)),
            )?),
            D::HgBeta2(s) | D::HgBeta2Inv(s) => Box::new(HgBeta2::new(
                s.a,
                s.b,
                s.xi.to_matrix()?,
                s.hypergeom.clone(),
                matches!(self, D::HgBeta2Inv(_)),
            )?),
            D::GenHg(s) | D::GenHgInv(s) => Box::new(GenHg::new(
                s.form,
                s.alpha,
                s.a,
                s.b,
                s.c,
                SpdMatrix::new(s.xi.to_matrix()?)?,
                s.truncation.clone(),
                matches!(self, D::GenHgInv(_)),
            )?),
            D::CompoundThm1(s) => Box::new(CompoundThm1::new(
                s.a,
                SpdMatrix::new(s.xi.to_matrix()?)?,
                s.upsilon.to_matrix()?,
                s.hypergeom.clone(),
                s.params.build()?,
            )?),
            D::CompoundThm2(s) => {
                Box::new(CompoundThm2::new(s.a, s.b, s.xi.to_matrix()?, s.hypergeom.clone(), s.params.build()?)?)
            }
            D::CompoundThm3(s) => Box::new(CompoundThm3::new(
                s.form,
                s.alpha,
                s.a,
                s.b,
                s.c,
                SpdMatrix::new(s.xi.to_matrix()?)?,
                s.params.build()?,
                s.truncation.clone(),
            )?),
            D::CompoundThm4(s) => Box::new(CompoundThm4::new(s.nu, s.a, s.b, s.params.build()?, s.truncation.clone())?),
            D::ScaleMixThm5(s) => {
                Box::new(ScaleMixThm5::new(s.a, s.xi, s.upsilon, s.hypergeom.clone(), s.params.build()?)?)
            }
        })
    }
}

pub(crate) fn half_m1(m: usize) -> f64 {
    (m as f64 - 1.0) / 2.0
}

pub(crate) fn require(cond: bool, what: &str, detail: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(what, detail))
    }
}

pub(crate) fn require_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::domain(*name, format!("{name} = {v} must be finite")));
        }
    }
    Ok(())
}

/// Symmetric `m × m` matrix check.
pub(crate) fn symmetric(a: &DMatrix<f64>, m: usize, what: &str) -> Result<DMatrix<f64>> {
    if a.nrows() != m || a.ncols() != m {
        return Err(Error::dimension(format!("{what} {m}x{m}"), crate::matrixops::shape(a)));
    }
    symmetrize(a)
}

/// `ln ₚFq` at the given eigenvalues; exactly zero for a zero argument.
pub(crate) fn ln_hyperg(spec: &HypergeomSpec, eigenvalues: &[f64], what: &str) -> Result<f64> {
    if eigenvalues.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    evaluate(spec, eigenvalues)?.ln(what)
}

pub(crate) fn spd_point(x: &DMatrix<f64>, m: usize) -> Result<SpdMatrix> {
    if x.nrows() != m || x.ncols() != m {
        return Err(Error::dimension(format!("{m}x{m} SPD point"), crate::matrixops::shape(x)));
    }
    SpdMatrix::new(x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_roundtrip_and_unknown_keys() {
        let text = r#"{"family": "hg_beta2", "a": 2, "b": 3, "xi": [[0]], "hypergeom": {"upper": [], "lower": []}}"#;
        let spec = DistributionSpec::from_json(text).unwrap();
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(DistributionSpec::from_json(&back).unwrap(), spec);
        let d = spec.build().unwrap();
        let v = d.ln_pdf(&DMatrix::from_element(1, 1, 1.0)).unwrap();
        assert!((v - 0.375f64.ln()).abs() < 1e-12);

        let bad = r#"{"family": "hg_beta2", "a": 2, "b": 3, "xi": [[0]], "hypergeom": {"upper": [], "lower": []}, "zeta": 1}"#;
        assert!(DistributionSpec::from_json(bad).is_err());
        let bad = r#"{"family": "hg_beta3", "a": 2}"#;
        assert!(DistributionSpec::from_json(bad).is_err());
    }
}
