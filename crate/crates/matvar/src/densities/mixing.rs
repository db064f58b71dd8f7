//! Mixing laws on the SPD cone.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hypergeom::{evaluate, HypergeomSpec, TruncationPolicy};
use crate::matrixops::SpdMatrix;
use crate::specialfun::{ln_mv_beta, ln_mv_gamma};

use super::{half_m1, ln_hyperg, require, require_finite, spd_point, symmetric, Density, GenHgForm, Support};

/// Hypergeometric gamma law. Over `P` (inverted form):
/// `etr(-ΞP⁻¹) |P|^{-a-(m+1)/2} ₚFq(ΥP⁻¹) |Ξ|^a / (Γ_m(a) ₚ₊₁Fq(…, a; …; ΥΞ⁻¹))`;
/// the direct form is the law of `Y = P⁻¹`.
#[derive(Debug, Clone)]
pub struct HgGamma {
    a: f64,
    xi: SpdMatrix,
    upsilon: DMatrix<f64>,
    spec: HypergeomSpec,
    inverted: bool,
    ln_const: f64,
}

impl HgGamma {
    pub fn new(a: f64, xi: SpdMatrix, upsilon: DMatrix<f64>, spec: HypergeomSpec, inverted: bool) -> Result<Self> {
        let m = xi.dim();
        require_finite(&[("a", a)])?;
        require(a > half_m1(m), "hg_gamma", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
        spec.validate()?;
        let upsilon = symmetric(&upsilon, m, "upsilon")?;
        let norm_eigs = xi.inverse().product_eigenvalues(&upsilon)?;
        let ln_norm = ln_hyperg(&spec.with_upper(a), &norm_eigs, "hg_gamma normalising series")?;
        let ln_const = a * xi.ln_det() - ln_mv_gamma(m, a)? - ln_norm;
        Ok(HgGamma { a, xi, upsilon, spec, inverted, ln_const })
    }

    pub fn ln_const(&self) -> f64 {
        self.ln_const
    }
}

impl Density for HgGamma {
    fn support(&self) -> Support {
        Support::Spd { dim: self.xi.dim() }
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let m = self.xi.dim();
        let mf = m as f64;
        let point = spd_point(x, m)?;
        // y = P⁻¹ in the inverted form, Y itself in the direct form.
        let y = if self.inverted { point.inverse() } else { point.clone() };
        let tr = (y.matrix() * self.xi.matrix()).trace();
        let ln_f = ln_hyperg(&self.spec, &y.product_eigenvalues(&self.upsilon)?, "hg_gamma series")?;
        let ln_det_term = if self.inverted {
            -(self.a + (mf + 1.0) / 2.0) * point.ln_det()
        } else {
            (self.a - (mf + 1.0) / 2.0) * point.ln_det()
        };
        Ok(self.ln_const - tr + ln_det_term + ln_f)
    }
}

/// Hypergeometric beta type II law. Over `Y` (direct form):
/// `|Y|^{a-(m+1)/2} |I+Y|^{-(a+b)} ₚFq(ΞY) / (β_m(a,b) ₚ₊₁Fq₊₁(…, a; …, -b+(m+1)/2; -Ξ))`;
/// the inverted form is the law of `P = Y⁻¹`.
#[derive(Debug, Clone)]
pub struct HgBeta2 {
    a: f64,
    b: f64,
    xi: DMatrix<f64>,
    spec: HypergeomSpec,
    inverted: bool,
    ln_const: f64,
}

impl HgBeta2 {
    pub fn new(a: f64, b: f64, xi: DMatrix<f64>, spec: HypergeomSpec, inverted: bool) -> Result<Self> {
        let m = xi.nrows();
        require_finite(&[("a", a), ("b", b)])?;
        let xi = symmetric(&xi, m, "xi")?;
        spec.validate()?;
        require(a > half_m1(m), "hg_beta2", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
        let zero_xi = xi.iter().all(|&v| v == 0.0);
        let bound = if zero_xi { half_m1(m) } else { half_m1(m) + f64::from(spec.truncation.max_degree) };
        require(b > bound, "hg_beta2", format!("b = {b} must exceed {bound} (series surrogate for (m-1)/2 + k1)"))?;
        let mf = m as f64;
        let norm_spec = spec.with_upper(a).with_lower(-b + (mf + 1.0) / 2.0);
        let neg: Vec<f64> = crate::matrixops::sym_eigenvalues(&xi)?.iter().map(|v| -v).collect();
        let ln_norm = ln_hyperg(&norm_spec, &neg, "hg_beta2 normalising series")?;
        let ln_const = -ln_mv_beta(m, a, b)? - ln_norm;
        Ok(HgBeta2 { a, b, xi, spec, inverted, ln_const })
    }
}

impl Density for HgBeta2 {
    fn support(&self) -> Support {
        Support::Spd { dim: self.xi.nrows() }
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let m = self.xi.nrows();
        let half = (m as f64 + 1.0) / 2.0;
        let point = spd_point(x, m)?;
        let power = if self.inverted { self.b - half } else { self.a - half };
        let arg = if self.inverted { point.inverse() } else { point.clone() };
        let ln_f = ln_hyperg(&self.spec, &arg.product_eigenvalues(&self.xi)?, "hg_beta2 series")?;
        Ok(self.ln_const + power * point.ln_det() - (self.a + self.b) * point.ln_det_i_plus() + ln_f)
    }
}

/// Log of the generalised hypergeometric mixing constant without the `|Ξ|^α` factor,
/// i.e. minus the log of the Mellin transform of the hypergeometric factor.
pub(crate) fn gen_hg_ln_const(form: GenHgForm, m: usize, alpha: f64, a: Option<f64>, b: f64, c: f64) -> Result<f64> {
    let h = half_m1(m);
    require(alpha > h, "gen_hg", format!("alpha = {alpha} must exceed (m-1)/2 = {}", half_m1(m)))?;
    require(b - alpha > h, "gen_hg", format!("b - alpha = {} must exceed (m-1)/2 = {h}", b - alpha))?;
    require(c - alpha > h, "gen_hg", format!("c - alpha = {} must exceed (m-1)/2 = {h}", c - alpha))?;
    match form {
        GenHgForm::Gauss => {
            let a = a.ok_or_else(|| Error::domain("gen_hg", "gauss form needs parameter a"))?;
            require(a - alpha > h, "gen_hg", format!("a - alpha = {} must exceed (m-1)/2 = {h}", a - alpha))?;
            require(c - a > h, "gen_hg", format!("c - a = {} must exceed (m-1)/2 = {h}", c - a))?;
            Ok(ln_mv_beta(m, a, c - a)? - ln_mv_beta(m, alpha, b - alpha)? - ln_mv_beta(m, a - alpha, c - a)?)
        }
        GenHgForm::Confluent => Ok(ln_mv_gamma(m, b)? + ln_mv_gamma(m, c - alpha)?
            - ln_mv_gamma(m, alpha)?
            - ln_mv_gamma(m, c)?
            - ln_mv_gamma(m, b - alpha)?),
    }
}

/// Generalised hypergeometric law. Over `Y` (direct form):
/// `C |Ξ|^α |Y|^{α-(m+1)/2} F(-ΞY)` with `F = ₂F₁(a, b; c)` or `₁F₁(b; c)`;
/// the inverted form is the law of `P = Y⁻¹`.
#[derive(Debug, Clone)]
pub struct GenHg {
    alpha: f64,
    xi: SpdMatrix,
    spec: HypergeomSpec,
    inverted: bool,
    ln_const: f64,
}

impl GenHg {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        form: GenHgForm,
        alpha: f64,
        a: Option<f64>,
        b: f64,
        c: f64,
        xi: SpdMatrix,
        truncation: TruncationPolicy,
        inverted: bool,
    ) -> Result<Self> {
        require_finite(&[("alpha", alpha), ("b", b), ("c", c), ("a", a.unwrap_or(0.0))])?;
        let m = xi.dim();
        let ln_const = alpha * xi.ln_det() + gen_hg_ln_const(form, m, alpha, a, b, c)?;
        let upper = match form {
            GenHgForm::Gauss => vec![a.unwrap_or_default(), b],
            GenHgForm::Confluent => vec![b],
        };
        let spec = HypergeomSpec::new(upper, vec![c]).with_policy(truncation);
        spec.validate()?;
        Ok(GenHg { alpha, xi, spec, inverted, ln_const })
    }
}

impl Density for GenHg {
    fn support(&self) -> Support {
        Support::Spd { dim: self.xi.dim() }
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let m = self.xi.dim();
        let half = (m as f64 + 1.0) / 2.0;
        let point = spd_point(x, m)?;
        let (power, arg) =
            if self.inverted { (-self.alpha - half, point.inverse()) } else { (self.alpha - half, point.clone()) };
        let eigs: Vec<f64> = arg.product_eigenvalues(self.xi.matrix())?.iter().map(|v| -v).collect();
        let ln_f = evaluate(&self.spec, &eigs)?.ln("gen_hg series")?;
        Ok(self.ln_const + power * point.ln_det() + ln_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn one(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn inverse_gamma_scalar() {
        let d = HgGamma::new(1.0, SpdMatrix::identity(1), one(0.0), HypergeomSpec::new(vec![], vec![]), true).unwrap();
        assert!((d.ln_pdf(&one(1.0)).unwrap() + 1.0).abs() < 1e-14);
        assert!(HgGamma::new(
            0.4,
            SpdMatrix::identity(2),
            DMatrix::zeros(2, 2),
            HypergeomSpec::new(vec![], vec![]),
            true
        )
        .is_err());
    }

    #[test]
    fn beta2_pair_under_inversion() {
        let xi = dmatrix![-0.3, 0.1; 0.1, -0.2];
        let spec = HypergeomSpec::new(vec![], vec![]).with_policy(TruncationPolicy::default().with_max_degree(12));
        let direct = HgBeta2::new(2.5, 14.0, xi.clone(), spec.clone(), false).unwrap();
        let inv = HgBeta2::new(2.5, 14.0, xi, spec, true).unwrap();
        let y = dmatrix![0.3, 0.05; 0.05, 0.2];
        let p = SpdMatrix::new(y.clone()).unwrap().inverse();
        // f_P(P) = f_Y(P⁻¹) |P|^{-(m+1)}
        let lhs = inv.ln_pdf(p.matrix()).unwrap();
        let rhs = direct.ln_pdf(&y).unwrap() - 3.0 * p.ln_det();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} {rhs}");
    }

    #[test]
    fn beta2_surrogate_bound() {
        let spec = HypergeomSpec::new(vec![], vec![]);
        assert!(HgBeta2::new(2.0, 2.0, one(0.5), spec.clone(), false).is_err());
        assert!(HgBeta2::new(2.0, 2.0, one(0.0), spec, false).is_ok());
    }

    #[test]
    fn gen_hg_pair_under_inversion() {
        for form in [GenHgForm::Gauss, GenHgForm::Confluent] {
            let xi = SpdMatrix::new(dmatrix![1.2, 0.3; 0.3, 0.8]).unwrap();
            let direct =
                GenHg::new(form, 1.6, Some(3.1), 3.4, 5.2, xi.clone(), TruncationPolicy::default(), false).unwrap();
            let inv = GenHg::new(form, 1.6, Some(3.1), 3.4, 5.2, xi, TruncationPolicy::default(), true).unwrap();
            let y = dmatrix![0.4, -0.1; -0.1, 0.3];
            let p = SpdMatrix::new(y.clone()).unwrap().inverse();
            let lhs = inv.ln_pdf(p.matrix()).unwrap();
            let rhs = direct.ln_pdf(&y).unwrap() - 3.0 * p.ln_det();
            assert!((lhs - rhs).abs() < 1e-9, "{form:?}: {lhs} {rhs}");
        }
    }

    #[test]
    fn gen_hg_bounds() {
        let xi = SpdMatrix::identity(1);
        assert!(
            GenHg::new(GenHgForm::Gauss, 1.0, None, 3.0, 5.0, xi.clone(), TruncationPolicy::default(), false).is_err()
        );
        assert!(GenHg::new(GenHgForm::Confluent, 1.0, None, 0.9, 5.0, xi, TruncationPolicy::default(), false).is_err());
    }
}
