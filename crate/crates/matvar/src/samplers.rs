//! Random generation for the tractable special cases: matrix normal, matricvariate T,
//! Wishart-type mixing laws with `Υ = 0` or `Ξ = 0`, and the compound laws built on them.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::densities::DistributionSpec;
use crate::error::{Error, Result};
use crate::matrixops::{EllipticalParams, SpdMatrix};

/// Draws per parallel chunk; chunk `c` uses stream id `c`.
pub const CHUNK: usize = 4096;

/// ChaCha20 stream keyed by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `n` draws of `f`, generated in chunks of [`CHUNK`] on separate streams and
/// concatenated in chunk order, so the result does not depend on the thread count.
pub fn draw_parallel<T, F>(n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let chunks: Vec<Vec<T>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn positive(what: &str, v: f64, bound: f64) -> Result<()> {
    if v.is_finite() && v > bound {
        Ok(())
    } else {
        Err(Error::domain(what, format!("{what} = {v} must exceed {bound}")))
    }
}

fn standard_normal(rows: usize, cols: usize, rng: &mut RngStream) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Bartlett factor `A` with `A Aᵀ ~ W_m(df, I)`.
fn bartlett(m: usize, df: f64, rng: &mut RngStream) -> Result<DMatrix<f64>> {
    positive("wishart df", df, m as f64 - 1.0)?;
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        let chi = ChiSquared::new(df - i as f64).map_err(|e| Error::domain("wishart df", e.to_string()))?;
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample(StandardNormal);
        }
    }
    Ok(a)
}

/// Wishart `W_m(df, S)` by the Bartlett decomposition; needs `df > m - 1`.
pub fn sample_wishart(df: f64, scale: &SpdMatrix, rng: &mut RngStream) -> Result<SpdMatrix> {
    let l = scale.cholesky_l() * bartlett(scale.dim(), df, rng)?;
    SpdMatrix::new(&l * l.transpose())
}

/// `μ + L_Θ Z Fᵀ` with `Z` standard normal `n × m`; row covariance `Θ`, column covariance `F Fᵀ`.
fn normal_with_factor(
    params: &EllipticalParams,
    theta_l: &DMatrix<f64>,
    factor: &DMatrix<f64>,
    rng: &mut RngStream,
) -> DMatrix<f64> {
    let z = standard_normal(params.n(), params.m(), rng);
    &params.mu + theta_l * z * factor.transpose()
}

/// One matrix-normal draw `N(μ, Σ, Θ)`.
pub fn sample_matrix_normal(params: &EllipticalParams, rng: &mut RngStream) -> DMatrix<f64> {
    normal_with_factor(params, &params.theta.cholesky_l(), &params.sigma.sqrt(), rng)
}

/// `P` with density `∝ |P|^{-a-(m+1)/2} etr(-ΞP⁻¹)`, as the inverse of `W_m(2a, (2Ξ)⁻¹)`.
pub fn sample_inv_hg_gamma_special(a: f64, xi: &SpdMatrix, rng: &mut RngStream) -> Result<SpdMatrix> {
    positive("a", a, (xi.dim() as f64 - 1.0) / 2.0)?;
    let scale = SpdMatrix::new(xi.inverse().matrix() * 0.5)?;
    Ok(sample_wishart(2.0 * a, &scale, rng)?.inverse())
}

/// `P` with density `∝ |P|^{b-(m+1)/2} |I+P|^{-(a+b)}`, as `B^{-1/2} A B^{-1/2}` with
/// `A ~ W_m(2b, I)` and `B ~ W_m(2a, I)`.
pub fn sample_inv_hg_beta2_special(a: f64, b: f64, m: usize, rng: &mut RngStream) -> Result<SpdMatrix> {
    let bound = (m as f64 - 1.0) / 2.0;
    positive("a", a, bound)?;
    positive("b", b, bound)?;
    let eye = SpdMatrix::identity(m);
    let num = sample_wishart(2.0 * b, &eye, rng)?;
    let den = sample_wishart(2.0 * a, &eye, rng)?;
    SpdMatrix::new(den.inverse().congruence(num.matrix())?)
}

/// Law of the mixing matrix `P`.
#[derive(Debug, Clone)]
pub enum Mixing {
    PointMass(SpdMatrix),
    /// Inverted hypergeometric gamma with `Υ = 0`.
    InvHgGamma {
        a: f64,
        xi: SpdMatrix,
    },
    /// Inverted hypergeometric beta type II with `Ξ = 0`.
    InvHgBeta2 {
        a: f64,
        b: f64,
        m: usize,
    },
    /// Scalar `s` with `1/s ~ Gamma(a, rate ξ)`, acting as `s I`.
    ScalarInvGamma {
        a: f64,
        xi: f64,
    },
}

impl Mixing {
    /// Lower factor `L` with `L Lᵀ = P` for an `m × m` mixing matrix.
    fn factor(&self, m: usize, rng: &mut RngStream) -> Result<DMatrix<f64>> {
        let p = match self {
            Mixing::PointMass(p) => p.clone(),
            Mixing::InvHgGamma { a, xi } => sample_inv_hg_gamma_special(*a, xi, rng)?,
            Mixing::InvHgBeta2 { a, b, m } => sample_inv_hg_beta2_special(*a, *b, *m, rng)?,
            Mixing::ScalarInvGamma { a, xi } => {
                positive("a", *a, 0.0)?;
                positive("xi", *xi, 0.0)?;
                let g = Gamma::new(*a, 1.0 / xi).map_err(|e| Error::domain("scalar mixing", e.to_string()))?;
                return Ok(DMatrix::identity(m, m) * (1.0 / g.sample(rng)).sqrt());
            }
        };
        if p.dim() != m {
            return Err(Error::dimension(format!("{m}x{m} mixing matrix"), format!("{0}x{0}", p.dim())));
        }
        Ok(p.cholesky_l())
    }
}

/// Conditional law of `X` given the scale `Σ^{1/2} P Σ^{1/2}`.
#[derive(Debug, Clone)]
pub enum Conditional {
    Normal(EllipticalParams),
    T { nu: f64, params: EllipticalParams },
}

impl Conditional {
    fn params(&self) -> &EllipticalParams {
        match self {
            Conditional::Normal(p) | Conditional::T { params: p, .. } => p,
        }
    }
}

/// Draw `P` from `mixing`, then `X | P` from `conditional` with `Σ` replaced by `Σ^{1/2} P Σ^{1/2}`.
pub fn sample_compound(mixing: &Mixing, conditional: &Conditional, rng: &mut RngStream) -> Result<DMatrix<f64>> {
    let params = conditional.params();
    compound_draw(mixing, conditional, &params.theta.cholesky_l(), &params.sigma.sqrt(), rng)
}

fn compound_draw(
    mixing: &Mixing,
    conditional: &Conditional,
    theta_l: &DMatrix<f64>,
    sigma_sqrt: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Result<DMatrix<f64>> {
    let params = conditional.params();
    let m = params.m();
    let mut factor = sigma_sqrt * mixing.factor(m, rng)?;
    if let Conditional::T { nu, .. } = conditional {
        let w = sample_inv_hg_gamma_special(nu / 2.0, &SpdMatrix::new(DMatrix::identity(m, m) * 0.5)?, rng)?;
        factor *= w.cholesky_l();
    }
    Ok(normal_with_factor(params, theta_l, &factor, rng))
}

/// Sampler for the families with an exact scheme.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// SPD-valued mixing law; `invert` returns `P⁻¹` instead of `P`.
    Spd {
        mixing: Mixing,
        m: usize,
        invert: bool,
    },
    Compound {
        mixing: Mixing,
        conditional: Conditional,
        theta_l: DMatrix<f64>,
        sigma_sqrt: DMatrix<f64>,
    },
}

fn is_zero(a: &DMatrix<f64>) -> bool {
    a.iter().all(|&v| v == 0.0)
}

fn unsupported(what: &str) -> Error {
    Error::Unsupported { detail: format!("no exact sampler for {what}") }
}

impl Sampler {
    pub fn new_compound(mixing: Mixing, conditional: Conditional) -> Self {
        let p = conditional.params();
        let (theta_l, sigma_sqrt) = (p.theta.cholesky_l(), p.sigma.sqrt());
        Sampler::Compound { mixing, conditional, theta_l, sigma_sqrt }
    }

    /// Validates the spec through its density, then picks the matching scheme.
    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        use DistributionSpec as D;
        spec.build()?;
        Ok(match spec {
            D::MatrixNormal(s) => {
                let p = s.params.build()?;
                let eye = SpdMatrix::identity(p.m());
                Sampler::new_compound(Mixing::PointMass(eye), Conditional::Normal(p))
            }
            D::MatricvariateT(s) => {
                let p = s.params.build()?;
                let eye = SpdMatrix::identity(p.m());
                Sampler::new_compound(Mixing::PointMass(eye), Conditional::T { nu: s.nu, params: p })
            }
            D::HgGamma(s) | D::HgGammaInv(s) => {
                if !is_zero(&s.upsilon.to_matrix()?) {
                    return Err(unsupported("hg_gamma with upsilon != 0"));
                }
                let xi = SpdMatrix::new(s.xi.to_matrix()?)?;
                let m = xi.dim();
                Sampler::Spd { mixing: Mixing::InvHgGamma { a: s.a, xi }, m, invert: matches!(spec, D::HgGamma(_)) }
            }
            D::HgBeta2(s) | D::HgBeta2Inv(s) => {
                let xi = s.xi.to_matrix()?;
                if !is_zero(&xi) {
                    return Err(unsupported("hg_beta2 with xi != 0"));
                }
                let m = xi.nrows();
                Sampler::Spd {
                    mixing: Mixing::InvHgBeta2 { a: s.a, b: s.b, m },
                    m,
                    invert: matches!(spec, D::HgBeta2(_)),
                }
            }
            D::CompoundThm1(s) => {
                if !is_zero(&s.upsilon.to_matrix()?) {
                    return Err(unsupported("compound_thm1 with upsilon != 0"));
                }
                let xi = SpdMatrix::new(s.xi.to_matrix()?)?;
                Sampler::new_compound(Mixing::InvHgGamma { a: s.a, xi }, Conditional::Normal(s.params.build()?))
            }
            D::CompoundThm2(s) => {
                if !is_zero(&s.xi.to_matrix()?) {
                    return Err(unsupported("compound_thm2 with xi != 0"));
                }
                let p = s.params.build()?;
                Sampler::new_compound(Mixing::InvHgBeta2 { a: s.a, b: s.b, m: p.m() }, Conditional::Normal(p))
            }
            D::CompoundThm4(s) => {
                let p = s.params.build()?;
                Sampler::new_compound(
                    Mixing::InvHgBeta2 { a: s.a, b: s.b, m: p.m() },
                    Conditional::T { nu: s.nu, params: p },
                )
            }
            D::ScaleMixThm5(s) => {
                if s.upsilon != 0.0 {
                    return Err(unsupported("scale_mix_thm5 with upsilon != 0"));
                }
                Sampler::new_compound(
                    Mixing::ScalarInvGamma { a: s.a, xi: s.xi },
                    Conditional::Normal(s.params.build()?),
                )
            }
            D::GenHg(_) | D::GenHgInv(_) => return Err(unsupported("gen_hg")),
            D::CompoundThm3(_) => return Err(unsupported("compound_thm3")),
        })
    }

    pub fn draw(&self, rng: &mut RngStream) -> Result<DMatrix<f64>> {
        match self {
            Sampler::Spd { mixing, m, invert } => {
                let l = mixing.factor(*m, rng)?;
                let p = SpdMatrix::new(&l * l.transpose())?;
                Ok(if *invert { p.inverse().matrix().clone() } else { p.matrix().clone() })
            }
            Sampler::Compound { mixing, conditional, theta_l, sigma_sqrt } => {
                compound_draw(mixing, conditional, theta_l, sigma_sqrt, rng)
            }
        }
    }

    /// `n` draws via [`draw_parallel`].
    pub fn draw_many(&self, n: usize, seed: u64) -> Result<Vec<DMatrix<f64>>> {
        draw_parallel(n, seed, |rng| self.draw(rng))
    }
}
