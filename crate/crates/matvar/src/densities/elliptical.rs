//! Elliptical, compound and scale-mixture laws on `n × m` matrices. All depend on `X`
//! only through `Δ = Σ^{-1/2}(X-μ)'Θ^{-1}(X-μ)Σ^{-1/2}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hypergeom::{evaluate, HypergeomSpec, TruncationPolicy};
use crate::matrixops::{sym_eigenvalues, EllipticalParams, SpdMatrix};
use crate::specialfun::{ln_gamma_pos, ln_mv_beta, ln_mv_gamma};

use super::mixing::gen_hg_ln_const;
use super::{half_m1, ln_hyperg, require, require_finite, symmetric, Density, GenHgForm, Support};

fn support(p: &EllipticalParams) -> Support {
    Support::Matrix { rows: p.n(), cols: p.m() }
}

fn mn(p: &EllipticalParams) -> f64 {
    (p.m() * p.n()) as f64
}

/// Matrix normal `N(μ, Σ, Θ)`: `Cov(vec X) = Θ ⊗ Σ` with rows of `X` stacked.
#[derive(Debug, Clone)]
pub struct MatrixNormal {
    params: EllipticalParams,
    ln_const: f64,
}

impl MatrixNormal {
    pub fn new(params: EllipticalParams) -> Self {
        let ln_const = -mn(&params) / 2.0 * (2.0 * PI).ln() + params.ln_scale_factor();
        MatrixNormal { params, ln_const }
    }
}

impl Density for MatrixNormal {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        Ok(self.ln_const - 0.5 * self.params.quad_form(x)?.trace())
    }
}

/// Matricvariate T with `ν` degrees of freedom: kernel `|I + Δ|^{-(n+ν)/2}`.
#[derive(Debug, Clone)]
pub struct MatricvariateT {
    nu: f64,
    params: EllipticalParams,
    ln_const: f64,
}

impl MatricvariateT {
    pub fn new(nu: f64, params: EllipticalParams) -> Result<Self> {
        let m = params.m();
        let n = params.n() as f64;
        require_finite(&[("nu", nu)])?;
        require(nu > m as f64 - 1.0, "matricvariate_t", format!("nu = {nu} must exceed m - 1"))?;
        let ln_const = ln_mv_gamma(m, (n + nu) / 2.0)? - mn(&params) / 2.0 * PI.ln() - ln_mv_gamma(m, nu / 2.0)?
            + params.ln_scale_factor();
        Ok(MatricvariateT { nu, params, ln_const })
    }
}

impl Density for MatricvariateT {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let n = self.params.n() as f64;
        let ln_det: f64 = self.params.quad_form_eigenvalues(x)?.iter().map(|d| d.ln_1p()).sum();
        Ok(self.ln_const - (n + self.nu) / 2.0 * ln_det)
    }
}

/// Normal mixed over `Σ^{1/2} P Σ^{1/2}` with `P` inverted hypergeometric gamma:
/// kernel `|Ξ + Δ/2|^{-(a+n/2)} ₚ₊₁Fq(…, a+n/2; …; Υ(Ξ + Δ/2)⁻¹)`.
#[derive(Debug, Clone)]
pub struct CompoundThm1 {
    a: f64,
    xi: SpdMatrix,
    upsilon: DMatrix<f64>,
    kernel_spec: HypergeomSpec,
    params: EllipticalParams,
    ln_const: f64,
}

impl CompoundThm1 {
    pub fn new(
        a: f64,
        xi: SpdMatrix,
        upsilon: DMatrix<f64>,
        spec: HypergeomSpec,
        params: EllipticalParams,
    ) -> Result<Self> {
        let m = params.m();
        let n = params.n() as f64;
        require_finite(&[("a", a)])?;
        require(a > half_m1(m), "compound_thm1", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
        if xi.dim() != m {
            return Err(Error::dimension(format!("xi {m}x{m}"), format!("{0}x{0}", xi.dim())));
        }
        spec.validate()?;
        let upsilon = symmetric(&upsilon, m, "upsilon")?;
        let norm_eigs = xi.inverse().product_eigenvalues(&upsilon)?;
        let ln_norm = ln_hyperg(&spec.with_upper(a), &norm_eigs, "compound_thm1 normalising series")?;
        let ln_const =
            ln_mv_gamma(m, a + n / 2.0)? + a * xi.ln_det() - mn(&params) / 2.0 * (2.0 * PI).ln() - ln_mv_gamma(m, a)?
                + params.ln_scale_factor()
                - ln_norm;
        Ok(CompoundThm1 { a, xi, upsilon, kernel_spec: spec.with_upper(a + n / 2.0), params, ln_const })
    }
}

impl Density for CompoundThm1 {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let n = self.params.n() as f64;
        let inner = SpdMatrix::new(self.xi.matrix() + self.params.quad_form(x)? * 0.5)?;
        let eigs = inner.inverse().product_eigenvalues(&self.upsilon)?;
        let ln_f = ln_hyperg(&self.kernel_spec, &eigs, "compound_thm1 series")?;
        Ok(self.ln_const - (self.a + n / 2.0) * inner.ln_det() + ln_f)
    }
}

/// Normal mixed over `Σ^{1/2} P Σ^{1/2}` with `P` inverted hypergeometric beta type II:
/// kernel `₁F₁(a+n/2; -b+(m+n+1)/2; -Ξ + Δ/2)`, normalised by
/// `β_m(a,b) ₁F₁(a; -b+(m+1)/2; -Ξ)`. Only ₀F₀ mixing or `Ξ = 0` has this closed form.
#[derive(Debug, Clone)]
pub struct CompoundThm2 {
    xi: DMatrix<f64>,
    kernel_spec: HypergeomSpec,
    params: EllipticalParams,
    ln_const: f64,
}

impl CompoundThm2 {
    pub fn new(a: f64, b: f64, xi: DMatrix<f64>, spec: HypergeomSpec, params: EllipticalParams) -> Result<Self> {
        let m = params.m();
        let mf = m as f64;
        let n = params.n() as f64;
        require_finite(&[("a", a), ("b", b)])?;
        spec.validate()?;
        let xi = symmetric(&xi, m, "xi")?;
        let zero_xi = xi.iter().all(|&v| v == 0.0);
        if !zero_xi && (spec.p() > 0 || spec.q() > 0) {
            return Err(Error::Unsupported {
                detail: "compound_thm2 has a closed form only for 0F0 mixing or xi = 0".into(),
            });
        }
        require(a > half_m1(m), "compound_thm2", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
        let bound = (mf + n - 1.0) / 2.0 + f64::from(spec.truncation.max_degree);
        require(b > bound, "compound_thm2", format!("b = {b} must exceed (m+n-1)/2 + K = {bound}"))?;
        let policy = spec.truncation.clone();
        let norm_spec = HypergeomSpec::new(vec![a], vec![-b + (mf + 1.0) / 2.0]).with_policy(policy.clone());
        let neg: Vec<f64> = sym_eigenvalues(&xi)?.iter().map(|v| -v).collect();
        let ln_norm = ln_hyperg(&norm_spec, &neg, "compound_thm2 normalising series")?;
        let ln_const =
            -mn(&params) / 2.0 * (2.0 * PI).ln() + params.ln_scale_factor() + ln_mv_beta(m, a + n / 2.0, b - n / 2.0)?
                - ln_mv_beta(m, a, b)?
                - ln_norm;
        let kernel_spec = HypergeomSpec::new(vec![a + n / 2.0], vec![-b + (mf + n + 1.0) / 2.0]).with_policy(policy);
        Ok(CompoundThm2 { xi, kernel_spec, params, ln_const })
    }
}

impl Density for CompoundThm2 {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let arg = self.params.quad_form(x)? * 0.5 - &self.xi;
        let ln_f = ln_hyperg(&self.kernel_spec, &sym_eigenvalues(&arg)?, "compound_thm2 series")?;
        Ok(self.ln_const + ln_f)
    }
}

/// Normal mixed over `Σ^{1/2} P Σ^{1/2}` with `P` inverted generalised hypergeometric:
/// kernel `|Δ|^{-(α+n/2)} F(-2ΞΔ⁻¹)` with `F = ₃F₁(a, b, α+n/2; c)` (gauss) or
/// `₂F₁(b, α+n/2; c)` (confluent). Requires `n >= m` so that `Δ` can be nonsingular.
#[derive(Debug, Clone)]
pub struct CompoundThm3 {
    alpha: f64,
    xi: SpdMatrix,
    kernel_spec: HypergeomSpec,
    params: EllipticalParams,
    ln_const: f64,
}

impl CompoundThm3 {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        form: GenHgForm,
        alpha: f64,
        a: Option<f64>,
        b: f64,
        c: f64,
        xi: SpdMatrix,
        params: EllipticalParams,
        truncation: TruncationPolicy,
    ) -> Result<Self> {
        let m = params.m();
        let mf = m as f64;
        let n = params.n() as f64;
        require_finite(&[("alpha", alpha), ("b", b), ("c", c), ("a", a.unwrap_or(0.0))])?;
        if params.n() < m {
            return Err(Error::domain("compound_thm3", format!("needs n >= m, got n = {n}, m = {m}")));
        }
        if xi.dim() != m {
            return Err(Error::dimension(format!("xi {m}x{m}"), format!("{0}x{0}", xi.dim())));
        }
        let ln_const = mf * alpha * 2f64.ln() + alpha * xi.ln_det() + ln_mv_gamma(m, alpha + n / 2.0)?
            - mn(&params) / 2.0 * PI.ln()
            + params.ln_scale_factor()
            + gen_hg_ln_const(form, m, alpha, a, b, c)?;
        let upper = match form {
            GenHgForm::Gauss => vec![a.unwrap_or_default(), b, alpha + n / 2.0],
            GenHgForm::Confluent => vec![b, alpha + n / 2.0],
        };
        let kernel_spec = HypergeomSpec::new(upper, vec![c]).with_policy(truncation);
        kernel_spec.validate()?;
        Ok(CompoundThm3 { alpha, xi, kernel_spec, params, ln_const })
    }
}

impl Density for CompoundThm3 {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let n = self.params.n() as f64;
        let delta = SpdMatrix::new(self.params.quad_form(x)?)
            .map_err(|_| Error::Singular { detail: "compound_thm3 needs X - mu of full column rank".into() })?;
        let eigs: Vec<f64> = delta.inverse().product_eigenvalues(self.xi.matrix())?.iter().map(|v| -2.0 * v).collect();
        let ln_f = evaluate(&self.kernel_spec, &eigs)?.ln("compound_thm3 series")?;
        Ok(self.ln_const - (self.alpha + n / 2.0) * delta.ln_det() + ln_f)
    }
}

/// Matricvariate T mixed over `Σ^{1/2} P Σ^{1/2}` with `P` inverted beta type II:
/// kernel `₂F₁((n+ν)/2, a+n/2; -b+(m+n+1)/2; Δ)`.
#[derive(Debug, Clone)]
pub struct CompoundThm4 {
    nu: f64,
    a: f64,
    b: f64,
    params: EllipticalParams,
    spec: HypergeomSpec,
    ln_const: f64,
}

impl CompoundThm4 {
    pub fn new(nu: f64, a: f64, b: f64, params: EllipticalParams, truncation: TruncationPolicy) -> Result<Self> {
        let m = params.m();
        let mf = m as f64;
        let n = params.n() as f64;
        require_finite(&[("nu", nu), ("a", a), ("b", b)])?;
        require(nu > mf - 1.0, "compound_thm4", format!("nu = {nu} must exceed m - 1"))?;
        require(a > half_m1(m), "compound_thm4", format!("a = {a} must exceed (m-1)/2 = {}", half_m1(m)))?;
        let bound = (mf + n - 1.0) / 2.0 + f64::from(truncation.max_degree);
        require(b > bound, "compound_thm4", format!("b = {b} must exceed (m+n-1)/2 + K = {bound}"))?;
        truncation.validate()?;
        let ln_const = ln_mv_gamma(m, (n + nu) / 2.0)? + ln_mv_beta(m, a + n / 2.0, b - n / 2.0)?
            - mn(&params) / 2.0 * PI.ln()
            - ln_mv_gamma(m, nu / 2.0)?
            - ln_mv_beta(m, a, b)?
            + params.ln_scale_factor();
        let spec = HypergeomSpec::new(vec![(n + nu) / 2.0, a + n / 2.0], vec![-b + (mf + n + 1.0) / 2.0])
            .with_policy(truncation);
        Ok(CompoundThm4 { nu, a, b, params, spec, ln_const })
    }

    /// The same density through Euler's relation:
    /// `|I-Δ|^{-(a+b+(n+ν)/2-(m+1)/2)} ₂F₁(-b-ν/2+(m+1)/2, -a-b+(m+1)/2; -b+(m+n+1)/2; Δ)`.
    pub fn ln_pdf_euler(&self, x: &DMatrix<f64>) -> Result<f64> {
        let mf = self.params.m() as f64;
        let n = self.params.n() as f64;
        let eigs = self.params.quad_form_eigenvalues(x)?;
        if eigs.iter().any(|&d| d >= 1.0) {
            return Err(Error::Divergence { detail: "Euler form needs every eigenvalue of Delta below 1".into() });
        }
        let h = (mf + 1.0) / 2.0;
        let spec = HypergeomSpec::new(vec![-self.b - self.nu / 2.0 + h, -self.a - self.b + h], self.spec.lower.clone())
            .with_policy(self.spec.truncation.clone());
        let ln_f = ln_hyperg(&spec, &eigs, "compound_thm4 Euler series")?;
        let ln_det: f64 = eigs.iter().map(|d| (-d).ln_1p()).sum();
        Ok(self.ln_const - (self.a + self.b + (n + self.nu) / 2.0 - h) * ln_det + ln_f)
    }
}

impl Density for CompoundThm4 {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let eigs = self.params.quad_form_eigenvalues(x)?;
        Ok(self.ln_const + ln_hyperg(&self.spec, &eigs, "compound_thm4 series")?)
    }
}

/// Normal mixed over `s Σ` with scalar `s` inverted hypergeometric gamma:
/// kernel `(ξ + tr Δ/2)^{-(a+mn/2)} ₚ₊₁Fq(…, a+mn/2; …; υ/(ξ + tr Δ/2))`.
#[derive(Debug, Clone)]
pub struct ScaleMixThm5 {
    a: f64,
    xi: f64,
    upsilon: f64,
    kernel_spec: HypergeomSpec,
    params: EllipticalParams,
    ln_const: f64,
}

impl ScaleMixThm5 {
    pub fn new(a: f64, xi: f64, upsilon: f64, spec: HypergeomSpec, params: EllipticalParams) -> Result<Self> {
        require_finite(&[("a", a), ("xi", xi), ("upsilon", upsilon)])?;
        require(a > 0.0, "scale_mix_thm5", format!("a = {a} must be positive"))?;
        require(xi > 0.0, "scale_mix_thm5", format!("xi = {xi} must be positive"))?;
        require(upsilon >= 0.0, "scale_mix_thm5", format!("upsilon = {upsilon} must be non-negative"))?;
        spec.validate()?;
        let k = mn(&params) / 2.0;
        let ln_norm = ln_hyperg(&spec.with_upper(a), &[upsilon / xi], "scale_mix_thm5 normalising series")?;
        let ln_const = ln_gamma_pos(a + k)? + a * xi.ln() - k * (2.0 * PI).ln() - ln_gamma_pos(a)?
            + params.ln_scale_factor()
            - ln_norm;
        Ok(ScaleMixThm5 { a, xi, upsilon, kernel_spec: spec.with_upper(a + k), params, ln_const })
    }
}

impl Density for ScaleMixThm5 {
    fn support(&self) -> Support {
        support(&self.params)
    }

    fn ln_pdf(&self, x: &DMatrix<f64>) -> Result<f64> {
        let k = mn(&self.params) / 2.0;
        let s = self.xi + 0.5 * self.params.quad_form(x)?.trace().max(0.0);
        let ln_f = ln_hyperg(&self.kernel_spec, &[self.upsilon / s], "scale_mix_thm5 series")?;
        Ok(self.ln_const - (self.a + k) * s.ln() + ln_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn one(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    fn params(mu: DMatrix<f64>, sigma: DMatrix<f64>, theta: DMatrix<f64>) -> EllipticalParams {
        EllipticalParams::new(mu, SpdMatrix::new(sigma).unwrap(), SpdMatrix::new(theta).unwrap()).unwrap()
    }

    fn p0() -> HypergeomSpec {
        HypergeomSpec::new(vec![], vec![])
    }

    #[test]
    fn scalar_reference_values() {
        let std = EllipticalParams::standard(1, 1);
        let normal = MatrixNormal::new(std.clone());
        assert!((normal.ln_pdf(&one(0.0)).unwrap() + 0.918_938_533_204_672_7).abs() < 1e-14);
        let cauchy = MatricvariateT::new(1.0, std.clone()).unwrap();
        assert!((cauchy.ln_pdf(&one(0.0)).unwrap() + PI.ln()).abs() < 1e-13);
        let thm1 = CompoundThm1::new(0.5, SpdMatrix::new(one(0.5)).unwrap(), one(0.0), p0(), std).unwrap();
        assert!((thm1.ln_pdf(&one(0.0)).unwrap() + PI.ln()).abs() < 1e-13);
    }

    #[test]
    fn matrix_normal_matches_kronecker_oracle() {
        // m = 2, n = 1: vec(X) ~ N(mu, theta * Sigma)
        let sigma = dmatrix![2.0, 0.6; 0.6, 1.0];
        let p = params(dmatrix![0.5, -1.0], sigma.clone(), one(1.7));
        let x = dmatrix![1.2, 0.3];
        let cov = &sigma * 1.7;
        let d = (x.clone() - p.mu.clone()).transpose();
        let quad = (d.transpose() * cov.clone().try_inverse().unwrap() * &d)[(0, 0)];
        let want = -(2.0 * PI).ln() - 0.5 * cov.determinant().ln() - 0.5 * quad;
        let got = MatrixNormal::new(p).ln_pdf(&x).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn thm1_without_upsilon_is_matricvariate_t() {
        let sigma = dmatrix![1.5, 0.2; 0.2, 0.7];
        let xi = dmatrix![0.8, -0.1; -0.1, 0.6];
        let a = 2.3;
        let p = params(dmatrix![0.1, 0.4], sigma.clone(), one(1.3));
        let thm1 =
            CompoundThm1::new(a, SpdMatrix::new(xi.clone()).unwrap(), DMatrix::zeros(2, 2), p0(), p.clone()).unwrap();
        let s = SpdMatrix::new(sigma).unwrap().sqrt();
        let scale = &s * (xi * 2.0) * &s;
        let t = MatricvariateT::new(
            2.0 * a,
            EllipticalParams::new(p.mu.clone(), SpdMatrix::new(scale).unwrap(), p.theta.clone()).unwrap(),
        )
        .unwrap();
        for x in [dmatrix![0.0, 0.0], dmatrix![2.0, -1.0], dmatrix![-3.0, 5.0]] {
            let (u, v) = (thm1.ln_pdf(&x).unwrap(), t.ln_pdf(&x).unwrap());
            assert!((u - v).abs() < 1e-12, "{u} {v}");
        }
    }

    #[test]
    fn thm2_restrictions() {
        let p = EllipticalParams::standard(1, 1);
        let f11 = HypergeomSpec::new(vec![1.0], vec![2.0]);
        assert!(matches!(
            CompoundThm2::new(2.0, 40.0, one(-0.5), f11.clone(), p.clone()),
            Err(Error::Unsupported { .. })
        ));
        assert!(CompoundThm2::new(2.0, 40.0, one(0.0), f11, p.clone()).is_ok());
        assert!(CompoundThm2::new(2.0, 20.0, one(0.0), p0(), p).is_err());
    }

    #[test]
    fn thm3_rejects_singular_kernel() {
        let p = EllipticalParams::standard(1, 2);
        let r = CompoundThm3::new(
            GenHgForm::Confluent,
            1.0,
            None,
            3.0,
            4.0,
            SpdMatrix::identity(2),
            p,
            TruncationPolicy::default(),
        );
        assert!(r.is_err());
        let p = EllipticalParams::standard(1, 1);
        let d = CompoundThm3::new(
            GenHgForm::Confluent,
            1.0,
            None,
            3.0,
            4.0,
            SpdMatrix::identity(1),
            p,
            TruncationPolicy::default(),
        )
        .unwrap();
        assert!(matches!(d.ln_pdf(&one(0.0)), Err(Error::Singular { .. })));
        assert!(d.ln_pdf(&one(0.7)).unwrap().is_finite());
    }

    #[test]
    fn thm4_direct_and_euler_agree() {
        let p = params(dmatrix![0.0, 0.0], dmatrix![1.0, 0.2; 0.2, 0.8], one(1.0));
        let d = CompoundThm4::new(3.0, 1.7, 35.3, p, TruncationPolicy::default()).unwrap();
        let x = dmatrix![0.05, -0.03];
        let (u, v) = (d.ln_pdf(&x).unwrap(), d.ln_pdf_euler(&x).unwrap());
        assert!((u - v).abs() < 1e-9, "{u} {v}");
    }

    #[test]
    fn thm5_equals_thm1_at_m1() {
        let p = params(one(0.3), one(1.4), one(0.6));
        let spec = HypergeomSpec::new(vec![], vec![1.8]);
        let t5 = ScaleMixThm5::new(1.7, 0.9, 0.4, spec.clone(), p.clone()).unwrap();
        let t1 = CompoundThm1::new(1.7, SpdMatrix::new(one(0.9)).unwrap(), one(0.4), spec, p).unwrap();
        for x in [-2.0, 0.3, 1.0, 7.5] {
            assert!((t5.ln_pdf(&one(x)).unwrap() - t1.ln_pdf(&one(x)).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn thm5_vector_t() {
        // υ = 0, a = ξ = ν/2, m = 2, n = 1 gives the bivariate Student t.
        let nu = 4.5;
        let sigma = dmatrix![1.3, 0.4; 0.4, 0.9];
        let p = params(dmatrix![0.0, 0.0], sigma.clone(), one(1.0));
        let d = ScaleMixThm5::new(nu / 2.0, nu / 2.0, 0.0, p0(), p).unwrap();
        let x = dmatrix![0.7, -1.1];
        let q = (&x * sigma.clone().try_inverse().unwrap() * x.transpose())[(0, 0)];
        let want = libm::lgamma((nu + 2.0) / 2.0)
            - libm::lgamma(nu / 2.0)
            - (nu * PI).ln()
            - 0.5 * sigma.determinant().ln()
            - (nu + 2.0) / 2.0 * (1.0 + q / nu).ln();
        assert!((d.ln_pdf(&x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn scale_and_location_invariance() {
        let sigma = dmatrix![1.2, 0.3; 0.3, 0.9];
        let theta = dmatrix![1.0, 0.1; 0.1, 2.0];
        let mu = dmatrix![0.1, 0.2; -0.3, 0.4];
        let x = dmatrix![2.5, -3.1; 4.1, 1.2];
        let shift = dmatrix![2.0, -1.0; 0.5, 0.25];
        let build = |c: f64, mu: &DMatrix<f64>| params(mu.clone(), &sigma * c, &theta / c);
        let fams = |p: EllipticalParams| -> Vec<Box<dyn Density>> {
            vec![
                Box::new(MatrixNormal::new(p.clone())),
                Box::new(MatricvariateT::new(3.0, p.clone()).unwrap()),
                Box::new(
                    CompoundThm1::new(
                        2.0,
                        SpdMatrix::identity(2),
                        dmatrix![0.2, 0.0; 0.0, 0.1],
                        HypergeomSpec::new(vec![], vec![2.5]),
                        p.clone(),
                    )
                    .unwrap(),
                ),
                Box::new(
                    CompoundThm3::new(
                        GenHgForm::Confluent,
                        1.5,
                        None,
                        4.0,
                        5.0,
                        SpdMatrix::identity(2),
                        p.clone(),
                        TruncationPolicy::default(),
                    )
                    .unwrap(),
                ),
                Box::new(ScaleMixThm5::new(2.0, 1.0, 0.0, p0(), p).unwrap()),
            ]
        };
        let base: Vec<f64> = fams(build(1.0, &mu)).iter().map(|d| d.ln_pdf(&x).unwrap()).collect();
        for c in [0.1, 7.0] {
            let scaled: Vec<f64> = fams(build(c, &mu)).iter().map(|d| d.ln_pdf(&x).unwrap()).collect();
            for (i, (u, v)) in base.iter().zip(&scaled).enumerate() {
                assert!((u - v).abs() < 1e-9, "family {i}, c={c}: {u} {v}");
            }
        }
        let moved: Vec<f64> =
            fams(build(1.0, &(&mu + &shift))).iter().map(|d| d.ln_pdf(&(&x + &shift)).unwrap()).collect();
        for (u, v) in base.iter().zip(&moved) {
            assert!((u - v).abs() < 1e-10);
        }
    }
}
