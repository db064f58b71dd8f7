//! Importance-sampling integration over the SPD cone and over `n × m` matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrixops::SpdMatrix;
use crate::samplers::{draw_parallel, sample_inv_hg_beta2_special, sample_wishart, RngStream};
use crate::specialfun::{ln_gamma_pos, ln_mv_beta, ln_mv_gamma};

/// Proposal law with a closed-form density.
#[derive(Debug, Clone)]
pub enum Proposal {
    /// `W_m(df, S)`; with `inverted`, the law of its inverse.
    Wishart { df: f64, scale: SpdMatrix, inverted: bool },
    /// Density `∝ |Y|^{a-(m+1)/2} |I+Y|^{-(a+b)}` on the `m × m` cone.
    Beta2 { a: f64, b: f64, m: usize },
    /// Multivariate t on `n × m` matrices with `vec` (row-major) scale `S` of size `nm`.
    StudentT { nu: f64, center: DMatrix<f64>, scale: SpdMatrix },
}

impl Proposal {
    pub fn draw(&self, rng: &mut RngStream) -> Result<DMatrix<f64>> {
        match self {
            Proposal::Wishart { df, scale, inverted } => {
                let w = sample_wishart(*df, scale, rng)?;
                Ok(if *inverted { w.inverse().matrix().clone() } else { w.matrix().clone() })
            }
            Proposal::Beta2 { a, b, m } => Ok(sample_inv_hg_beta2_special(*b, *a, *m, rng)?.matrix().clone()),
            Proposal::StudentT { nu, center, scale } => {
                let d = scale.dim();
                let z = DMatrix::from_fn(d, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
                let chi = ChiSquared::new(*nu).map_err(|e| Error::domain("proposal nu", e.to_string()))?;
                let w = (chi.sample(rng) / nu).sqrt();
                let v = scale.cholesky_l() * z / w;
                let (n, m) = center.shape();
                Ok(center + DMatrix::from_row_slice(n, m, v.as_slice()))
            }
        }
    }

    pub fn ln_density(&self, x: &DMatrix<f64>) -> Result<f64> {
        match self {
            Proposal::Wishart { df, scale, inverted } => {
                let m = scale.dim();
                let mf = m as f64;
                let p = SpdMatrix::new(x.clone())?;
                let (y, jac) = if *inverted { (p.inverse(), -(mf + 1.0) * p.ln_det()) } else { (p, 0.0) };
                let tr = scale.solve(y.matrix()).trace();
                Ok((df - mf - 1.0) / 2.0 * y.ln_det()
                    - 0.5 * tr
                    - df * mf / 2.0 * 2f64.ln()
                    - df / 2.0 * scale.ln_det()
                    - ln_mv_gamma(m, df / 2.0)?
                    + jac)
            }
            Proposal::Beta2 { a, b, m } => {
                let y = SpdMatrix::new(x.clone())?;
                Ok((a - (*m as f64 + 1.0) / 2.0) * y.ln_det() - (a + b) * y.ln_det_i_plus() - ln_mv_beta(*m, *a, *b)?)
            }
            Proposal::StudentT { nu, center, scale } => {
                let d = scale.dim() as f64;
                let diff = x - center;
                let v = DMatrix::from_row_slice(scale.dim(), 1, diff.transpose().as_slice());
                let q = (v.transpose() * scale.solve(&v))[(0, 0)];
                Ok(ln_gamma_pos((nu + d) / 2.0)?
                    - ln_gamma_pos(nu / 2.0)?
                    - d / 2.0 * (nu * PI).ln()
                    - 0.5 * scale.ln_det()
                    - (nu + d) / 2.0 * (q / nu).ln_1p())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

/// Estimate of `E_q[w]` where `weight(x, ln q(x))` returns `f(x)/q(x)`, so the mean
/// estimates `∫ f`.
pub fn importance_mean<W>(proposal: &Proposal, weight: W, draws: usize, seed: u64) -> Result<McEstimate>
where
    W: Fn(&DMatrix<f64>, f64) -> Result<f64> + Sync,
{
    if draws < 2 {
        return Err(Error::domain("draws", "at least two draws are needed"));
    }
    let w = draw_parallel(draws, seed, |rng| {
        let x = proposal.draw(rng)?;
        let ln_q = proposal.ln_density(&x)?;
        weight(&x, ln_q)
    })?;
    if let Some(bad) = w.iter().find(|v| !v.is_finite()) {
        return Err(Error::Quadrature { detail: format!("importance weight {bad}") });
    }
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), draws })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfun::ln_mv_gamma;

    #[test]
    fn proposals_integrate_to_one() {
        let proposals = [
            Proposal::Wishart { df: 5.0, scale: SpdMatrix::identity(2), inverted: false },
            Proposal::Wishart { df: 5.0, scale: SpdMatrix::identity(2), inverted: true },
            Proposal::Beta2 { a: 2.0, b: 3.0, m: 2 },
        ];
        // Integrate each against the Wishart(6, I/2) density: ∫ f = 1.
        let target = Proposal::Wishart {
            df: 6.0,
            scale: SpdMatrix::new(DMatrix::identity(2, 2) * 0.5).unwrap(),
            inverted: false,
        };
        for q in &proposals {
            let est = importance_mean(q, |y, ln_q| Ok((target.ln_density(y)? - ln_q).exp()), 200_000, 1).unwrap();
            assert!((est.mean - 1.0).abs() < 4.0 * est.std_error, "{q:?}: {est:?}");
        }
    }

    #[test]
    fn gamma_integral_over_cone() {
        // ∫ |Y|^{a-3/2} etr(-Y) dY = Γ_2(a)
        let a = 2.5;
        let q = Proposal::Wishart {
            df: 2.0 * a,
            scale: SpdMatrix::new(DMatrix::identity(2, 2) * 0.5).unwrap(),
            inverted: false,
        };
        let est = importance_mean(
            &q,
            |y, ln_q| {
                let s = SpdMatrix::new(y.clone())?;
                Ok(((a - 1.5) * s.ln_det() - s.trace() - ln_q).exp())
            },
            10_000,
            2,
        )
        .unwrap();
        let want = ln_mv_gamma(2, a).unwrap().exp();
        assert!((est.mean - want).abs() < 1e-10 * want);
    }

    #[test]
    fn student_t_proposal_density() {
        let scale = SpdMatrix::new(nalgebra::dmatrix![1.0, 0.3; 0.3, 2.0]).unwrap();
        let q = Proposal::StudentT { nu: 1.0, center: nalgebra::dmatrix![0.5, -1.0], scale };
        let target =
            Proposal::StudentT { nu: 3.0, center: nalgebra::dmatrix![0.0, 0.0], scale: SpdMatrix::identity(2) };
        let est = importance_mean(&q, |x, ln_q| Ok((target.ln_density(x)? - ln_q).exp()), 200_000, 3).unwrap();
        assert!((est.mean - 1.0).abs() < 4.0 * est.std_error, "{est:?}");
    }
}
