//! Fixed check suites behind `verify --suite`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{dmatrix, DMatrix};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::*;
use super::quadrature::{integrate_half_line, QuadOptions};
use crate::densities::{CompoundThm1, CompoundThm4, DistributionSpec, MatricvariateT, ScaleMixThm5};
use crate::error::{Error, Result};
use crate::hypergeom::{euler_residual, hyperg_eigen, kummer_residual, HypergeomSpec, TruncationPolicy};
use crate::matrixops::{sym_eigenvalues, EllipticalParams, SpdMatrix};
use crate::partitions::Partition;
use crate::samplers::{sample_wishart, RngStream};
use crate::specialfun::{gen_pochhammer, ln_mv_gamma, pochhammer};
use crate::zonal::zonal_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Specialfun,
    Zonal,
    Hypergeom,
    Lemmas,
    Densities,
    Compound,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 6] =
        [Suite::Specialfun, Suite::Zonal, Suite::Hypergeom, Suite::Lemmas, Suite::Densities, Suite::Compound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specialfun => "specialfun",
            Suite::Zonal => "zonal",
            Suite::Hypergeom => "hypergeom",
            Suite::Lemmas => "lemmas",
            Suite::Densities => "densities",
            Suite::Compound => "compound",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse { detail: format!("unknown suite {s:?}") })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

type JobFn = Box<dyn Fn(u64) -> Result<Vec<CheckReport>> + Send + Sync>;

struct Job {
    name: String,
    run: JobFn,
}

fn job(name: impl Into<String>, run: impl Fn(u64) -> Result<Vec<CheckReport>> + Send + Sync + 'static) -> Job {
    Job { name: name.into(), run: Box::new(run) }
}

fn single(name: impl Into<String>, run: impl Fn(u64) -> Result<CheckReport> + Send + Sync + 'static) -> Job {
    job(name, move |s| run(s).map(|r| vec![r]))
}

/// Runs every check of `suite`; each job gets its own seed derived from `seed`, its suite
/// and its position, and results keep the job order.
pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    let jobs: Vec<(u64, Job)> = parts
        .iter()
        .flat_map(|&s| {
            let tag = Suite::PARTS.iter().position(|&p| p == s).unwrap_or(0) as u64;
            jobs_for(s).into_iter().enumerate().map(move |(i, j)| {
                let derived = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag << 32 | i as u64);
                (derived, j)
            })
        })
        .collect();
    let checks: Vec<CheckReport> = jobs
        .par_iter()
        .map(|(job_seed, j)| {
            let start = Instant::now();
            let mut out = (j.run)(*job_seed).unwrap_or_else(|e| vec![CheckReport::failed(j.name.clone(), &e)]);
            let elapsed = start.elapsed();
            for r in &mut out {
                r.wall_time = elapsed;
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    SuiteReport { suite, seed, passed, failed: checks.len() - passed, checks }
}

fn jobs_for(suite: Suite) -> Vec<Job> {
    match suite {
        Suite::Specialfun => specialfun_jobs(),
        Suite::Zonal => zonal_jobs(),
        Suite::Hypergeom => hypergeom_jobs(),
        Suite::Lemmas => lemma_jobs(),
        Suite::Densities => density_jobs(),
        Suite::Compound => compound_jobs(),
        Suite::All => Suite::PARTS.iter().flat_map(|&s| jobs_for(s)).collect(),
    }
}

fn one(x: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, x)
}

fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

fn specialfun_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    for (a, b) in [(0.3, 2.5), (2.0, 4.0), (5.5, 1.2)] {
        jobs.push(single(format!("quadrature beta({a},{b})"), move |_| {
            let r =
                integrate_half_line(|y| Ok(((a - 1.0) * y.ln() - (a + b) * y.ln_1p()).exp()), QuadOptions::default())?;
            Ok(CheckReport::new(
                format!("quadrature beta({a},{b})"),
                r.value,
                tgamma(a) * tgamma(b) / tgamma(a + b),
                1e-10,
                r.evaluations,
            ))
        }));
    }
    for a in [0.5, 3.7] {
        jobs.push(single(format!("quadrature gamma({a})"), move |_| {
            let r = integrate_half_line(|y| Ok(((a - 1.0) * y.ln() - y).exp()), QuadOptions::default())?;
            Ok(CheckReport::new(format!("quadrature gamma({a})"), r.value, tgamma(a), 1e-10, r.evaluations))
        }));
    }
    for a in [1.3, 4.2] {
        jobs.push(single(format!("multivariate gamma m=2 a={a}"), move |_| {
            let want = std::f64::consts::PI.sqrt() * tgamma(a) * tgamma(a - 0.5);
            Ok(CheckReport::new(format!("multivariate gamma m=2 a={a}"), ln_mv_gamma(2, a)?.exp(), want, 1e-12, 1))
        }));
    }
    jobs.push(single("multivariate gamma m=3 a=2.7", |_| {
        let a = 2.7;
        let want = std::f64::consts::PI.powf(1.5) * tgamma(a) * tgamma(a - 0.5) * tgamma(a - 1.0);
        Ok(CheckReport::new("multivariate gamma m=3 a=2.7", ln_mv_gamma(3, a)?.exp(), want, 1e-12, 1))
    }));
    jobs.push(single("pochhammer (2.5)_7", |_| {
        Ok(CheckReport::new("pochhammer (2.5)_7", pochhammer(2.5, 7), tgamma(9.5) / tgamma(2.5), 1e-13, 1))
    }));
    jobs.push(single("generalized pochhammer (1.7)_(3,1)", |_| {
        let kappa = Partition::new(vec![3, 1])?;
        let want = 1.7 * 2.7 * 3.7 * 1.2;
        Ok(CheckReport::new("generalized pochhammer (1.7)_(3,1)", gen_pochhammer(1.7, &kappa), want, 1e-14, 1))
    }));
    jobs
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `C_κ(I_m) = 2^{2k} k! (m/2)_κ Π_{i<j}(2k_i - 2k_j - i + j) / Π_i (2k_i + p - i)!`.
fn zonal_at_identity(kappa: &Partition, m: usize) -> f64 {
    let k = kappa.weight();
    let p = kappa.len();
    let parts: Vec<f64> = kappa.parts().iter().map(|&x| f64::from(x)).collect();
    let mut num = 4f64.powi(k as i32) * fact(k) * gen_pochhammer(m as f64 / 2.0, kappa);
    for i in 0..p {
        for j in i + 1..p {
            num *= 2.0 * parts[i] - 2.0 * parts[j] - i as f64 + j as f64;
        }
    }
    let den: f64 = (0..p).map(|i| fact(2 * kappa.parts()[i] + (p - i - 1) as u32)).product();
    num / den
}

/// Eigenvalues of `count` random SPD matrices `W_m(m+2, I/m)`.
pub fn random_spd_eigenvalues(m: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = RngStream::new(seed, 0);
    let scale = SpdMatrix::new(DMatrix::identity(m, m) / m as f64)?;
    (0..count).map(|_| Ok(sample_wishart(m as f64 + 2.0, &scale, &mut rng)?.eigenvalues().to_vec())).collect()
}

/// Worst relative error of `Σ_{κ⊢k} C_κ(Y) = (tr Y)^k` over the given eigenvalue sets.
pub fn zonal_sum_identity(m: usize, k: u32, samples: &[Vec<f64>]) -> Result<CheckReport> {
    let table = zonal_table(k, m)?;
    let mut worst = (0.0, 1.0, -1.0);
    for eigs in samples {
        let total: f64 = table.eval_degree(k, eigs)?.iter().sum();
        let want = eigs.iter().sum::<f64>().powi(k as i32);
        let rel = (total - want).abs() / want.abs();
        if rel > worst.2 {
            worst = (total, want, rel);
        }
    }
    Ok(CheckReport::new(format!("zonal sum identity m={m} k={k}"), worst.0, worst.1, 1e-9, samples.len() as u64)
        .with_note(format!("worst of {} random SPD arguments", samples.len())))
}

fn zonal_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    for m in [2, 3, 4] {
        for k in [6, 12] {
            jobs.push(single(format!("zonal sum identity m={m} k={k}"), move |seed| {
                zonal_sum_identity(m, k, &random_spd_eigenvalues(m, 20, seed)?)
            }));
        }
    }
    for (m, kappa) in [(2, "(4,2)"), (3, "(3,2,1)"), (4, "(5,3,1,1)"), (3, "(6)")] {
        jobs.push(single(format!("zonal at identity m={m} kappa={kappa}"), move |_| {
            let kappa: Partition = kappa.parse()?;
            let got = zonal_table(kappa.weight(), m)?.eval(&kappa, &vec![1.0; m])?;
            Ok(CheckReport::new(
                format!("zonal at identity m={m} kappa={kappa}"),
                got,
                zonal_at_identity(&kappa, m),
                1e-11,
                1,
            ))
        }));
    }
    jobs
}

fn random_symmetric(m: usize, radius: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    a = (&a + a.transpose()) * 0.5;
    let e = sym_eigenvalues(&a)?;
    let r = e.iter().fold(0.0f64, |r, v| r.max(v.abs()));
    Ok(e.iter().map(|v| v * radius / r).collect())
}

/// Independent scalar series `Σ Π(a_i)_n / Π(b_j)_n z^n / n!`, summed until terms are negligible.
pub fn scalar_reference(upper: &[f64], lower: &[f64], z: f64) -> f64 {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for n in 0..100_000 {
        let nf = n as f64;
        let num: f64 = upper.iter().map(|a| a + nf).product();
        let den: f64 = lower.iter().map(|b| b + nf).product();
        term *= num / den * z / (nf + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() && n > 5 {
            break;
        }
    }
    sum
}

fn hypergeom_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    for m in [2, 3] {
        jobs.push(job(format!("0F0 = etr m={m}"), move |seed| {
            let mut rng = RngStream::new(seed, 0);
            (0..5)
                .map(|i| {
                    let e = random_symmetric(m, 2.0, &mut rng)?;
                    let v = hyperg_eigen(&HypergeomSpec::new(vec![], vec![]), &e)?;
                    Ok(CheckReport::new(
                        format!("0F0 = etr m={m} #{i}"),
                        v.value,
                        e.iter().sum::<f64>().exp(),
                        1e-8,
                        v.report.terms,
                    ))
                })
                .collect()
        }));
        jobs.push(job(format!("1F0 = det m={m}"), move |seed| {
            let mut rng = RngStream::new(seed, 0);
            (0..5)
                .map(|i| {
                    let a = rng.random_range(0.1..=3.0);
                    let e = random_symmetric(m, 0.8, &mut rng)?;
                    let v = hyperg_eigen(&HypergeomSpec::new(vec![a], vec![]), &e)?;
                    let want: f64 = e.iter().map(|x| (1.0 - x).powf(-a)).product();
                    Ok(CheckReport::new(format!("1F0 = det m={m} a={a:.4} #{i}"), v.value, want, 1e-8, v.report.terms))
                })
                .collect()
        }));
    }
    jobs.push(job("m=1 reductions", |seed| {
        let mut rng = RngStream::new(seed, 0);
        let tight = TruncationPolicy { max_degree: 40, tolerance: 1e-17, ..TruncationPolicy::default() };
        (0..6)
            .map(|i| {
                let (upper, lower, z) = if i % 2 == 0 {
                    (vec![rng.random_range(0.2..4.0)], vec![rng.random_range(0.5..4.0)], rng.random_range(-3.0..3.0))
                } else {
                    (
                        vec![rng.random_range(0.2..3.0), rng.random_range(0.2..3.0)],
                        vec![rng.random_range(0.5..4.0)],
                        rng.random_range(-0.4..0.4),
                    )
                };
                let spec = HypergeomSpec::new(upper.clone(), lower.clone()).with_policy(tight.clone());
                let v = hyperg_eigen(&spec, &[z])?;
                let name = format!("m=1 reduction {}F1 #{i}", upper.len());
                Ok(CheckReport::new(name, v.value, scalar_reference(&upper, &lower, z), 1e-12, v.report.terms))
            })
            .collect()
    }));
    for m in [2, 3] {
        jobs.push(job(format!("kummer m={m}"), move |seed| {
            let mut rng = RngStream::new(seed, 0);
            (0..4)
                .map(|i| {
                    let (b, c) = (rng.random_range(0.5..4.0), rng.random_range(0.8..4.0));
                    let e = random_symmetric(m, 1.5, &mut rng)?;
                    let r = kummer_residual(b, c, &e, &TruncationPolicy::default())?;
                    Ok(CheckReport::new(format!("kummer m={m} b={b:.3} c={c:.3} #{i}"), r.lhs, r.rhs, 1e-8, 2))
                })
                .collect()
        }));
        jobs.push(job(format!("euler m={m}"), move |seed| {
            let mut rng = RngStream::new(seed, 0);
            (0..4)
                .map(|i| {
                    let (a, b, c) =
                        (rng.random_range(0.3..2.0), rng.random_range(0.3..2.0), rng.random_range(0.8..3.0));
                    let e = random_symmetric(m, 0.5, &mut rng)?;
                    let r = euler_residual(a, b, c, &e, &TruncationPolicy::default())?;
                    Ok(CheckReport::new(format!("euler m={m} a={a:.3} b={b:.3} c={c:.3} #{i}"), r.lhs, r.rhs, 1e-8, 2))
                })
                .collect()
        }));
    }
    jobs
}

fn opts(seed: u64) -> CheckOptions {
    CheckOptions::default().with_seed(seed)
}

fn lemma_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    for (a, b, r, kappa) in [(2.0, 4.0, 1.0, "(1)"), (1.5, 5.2, -0.7, "(2)"), (0.7, 3.3, 0.4, "()")] {
        jobs.push(single(format!("lemma1 m=1 {kappa}"), move |s| {
            check_lemma1(a, b, &one(r), &kappa.parse()?, &opts(s))
        }));
    }
    jobs.push(single("lemma1 m=2", |s| check_lemma1(3.0, 3.0, &DMatrix::identity(2, 2), &"(1)".parse()?, &opts(s))));
    let k20 = TruncationPolicy::default().with_max_degree(20);
    for (a, b, r, upper, lower) in [(1.3, 24.5, -0.3, vec![], vec![]), (2.1, 22.7, -0.8, vec![1.5], vec![2.5])] {
        let spec = HypergeomSpec::new(upper, lower).with_policy(k20.clone());
        jobs.push(single(format!("corollary1 m=1 a={a}"), move |s| check_corollary1(a, b, &one(r), &spec, &opts(s))));
    }
    let spec = HypergeomSpec::new(vec![], vec![]).with_policy(k20);
    jobs.push(single("corollary1 m=2", move |s| {
        check_corollary1(2.0, 22.0, &(DMatrix::identity(2, 2) * -0.2), &spec, &opts(s))
    }));
    for (alpha, a, b, c) in [(1.0, 3.0, 3.0, 5.0), (0.8, 2.3, 3.65, 4.1)] {
        jobs.push(single(format!("lemma4 m=1 alpha={alpha}"), move |s| check_mellin_2f1(alpha, a, b, c, 1, &opts(s))));
    }
    for (alpha, b, c) in [(1.0, 3.0, 4.0), (1.7, 3.2, 2.5)] {
        jobs.push(single(format!("lemma5 m=1 alpha={alpha}"), move |s| check_mellin_1f1(alpha, b, c, 1, &opts(s))));
    }
    jobs.push(single("lemma4 m=2", |s| check_mellin_2f1(1.2, 2.9, 5.0, 4.0, 2, &opts(s))));
    jobs.push(single("lemma5 m=2", |s| check_mellin_1f1(1.1, 3.6, 2.6, 2, &opts(s))));
    for m in [1, 2] {
        jobs.push(job(format!("lemma4 limit m={m}"), move |_| {
            check_lemma4_limit(1.2, 3.5, 4.1, m, &[10.0, 50.0, 250.0])
        }));
    }
    jobs
}

fn spec(text: &str) -> Result<DistributionSpec> {
    DistributionSpec::from_json(text)
}

const STD11: &str = r#""params": {"mu": [[0.3]], "sigma": [[1.4]], "theta": [[0.8]]}"#;
const STD12: &str = r#""params": {"mu": [[0.2, -0.1]], "sigma": [[1.0, 0.3], [0.3, 0.8]], "theta": [[1.0]]}"#;

/// Well-posed normalisation cases: `(name, spec json, method)`.
pub fn normalization_cases() -> Vec<(&'static str, String, NormMethod)> {
    use NormMethod::*;
    let p0 = r#""hypergeom": {"upper": [], "lower": []}"#;
    vec![
        ("matrix_normal m=1", format!(r#"{{"family": "matrix_normal", {STD11}}}"#), Quadrature),
        ("matricvariate_t m=1", format!(r#"{{"family": "matricvariate_t", "nu": 2.5, {STD11}}}"#), Quadrature),
        ("hg_gamma m=1", r#"{"family": "hg_gamma", "a": 1.7, "xi": [[0.8]], "upsilon": [[0.3]], "hypergeom": {"upper": [1.2], "lower": [2.4]}}"#.into(), Quadrature),
        ("hg_gamma_inv m=1", r#"{"family": "hg_gamma_inv", "a": 1.7, "xi": [[0.8]], "upsilon": [[0.3]], "hypergeom": {"upper": [1.2], "lower": [2.4]}}"#.into(), Quadrature),
        ("hg_beta2 m=1", format!(r#"{{"family": "hg_beta2", "a": 2.0, "b": 31.5, "xi": [[-0.5]], {p0}}}"#), Quadrature),
        ("hg_beta2_inv m=1", format!(r#"{{"family": "hg_beta2_inv", "a": 2.0, "b": 31.5, "xi": [[-0.5]], {p0}}}"#), Quadrature),
        ("gen_hg gauss m=1", r#"{"family": "gen_hg", "form": "gauss", "alpha": 1.6, "a": 3.1, "b": 3.4, "c": 5.2, "xi": [[1.2]]}"#.into(), Quadrature),
        ("gen_hg confluent m=1", r#"{"family": "gen_hg", "form": "confluent", "alpha": 1.0, "b": 3.0, "c": 4.0, "xi": [[1.0]]}"#.into(), Quadrature),
        ("gen_hg_inv confluent m=1", r#"{"family": "gen_hg_inv", "form": "confluent", "alpha": 1.3, "b": 2.8, "c": 4.5, "xi": [[0.7]]}"#.into(), Quadrature),
        ("compound_thm1 m=1", format!(r#"{{"family": "compound_thm1", "a": 1.5, "xi": [[0.7]], "upsilon": [[0.4]], "hypergeom": {{"upper": [], "lower": [1.8]}}, {STD11}}}"#), Quadrature),
        ("compound_thm3 confluent m=1", format!(r#"{{"family": "compound_thm3", "form": "confluent", "alpha": 1.5, "b": 4.0, "c": 5.0, "xi": [[1.0]], {STD11}}}"#), Quadrature),
        ("scale_mix_thm5 m=1", format!(r#"{{"family": "scale_mix_thm5", "a": 1.2, "xi": 0.9, "upsilon": 0.3, "hypergeom": {{"upper": [], "lower": [2.0]}}, {STD11}}}"#), Quadrature),
        ("hg_gamma m=2", format!(r#"{{"family": "hg_gamma", "a": 2.2, "xi": [[1.0, 0.2], [0.2, 0.7]], "upsilon": [[0.0, 0.0], [0.0, 0.0]], {p0}}}"#), SpdMc),
        ("hg_gamma_inv m=2", r#"{"family": "hg_gamma_inv", "a": 2.2, "xi": [[1.0, 0.2], [0.2, 0.7]], "upsilon": [[0.3, 0.0], [0.0, 0.1]], "hypergeom": {"upper": [], "lower": [2.5]}}"#.into(), SpdMc),
        ("hg_beta2 m=2", format!(r#"{{"family": "hg_beta2", "a": 2.0, "b": 2.5, "xi": [[0.0, 0.0], [0.0, 0.0]], {p0}}}"#), SpdMc),
        ("hg_beta2_inv m=2", format!(r#"{{"family": "hg_beta2_inv", "a": 2.0, "b": 2.5, "xi": [[0.0, 0.0], [0.0, 0.0]], {p0}}}"#), SpdMc),
        ("compound_thm1 m=2 n=1", format!(r#"{{"family": "compound_thm1", "a": 2.0, "xi": [[1.0, 0.0], [0.0, 0.8]], "upsilon": [[0.2, 0.0], [0.0, 0.1]], "hypergeom": {{"upper": [], "lower": [2.5]}}, {STD12}}}"#), SpdMc),
    ]
}

fn density_jobs() -> Vec<Job> {
    normalization_cases()
        .into_iter()
        .map(|(name, text, method)| {
            single(format!("normalization {name}"), move |s| check_normalization(name, &spec(&text)?, method, &opts(s)))
        })
        .collect()
}

fn points_1d(lo: f64, hi: f64, n: usize) -> Vec<DMatrix<f64>> {
    (0..n).map(|i| one(lo + (hi - lo) * (i as f64 + 0.37) / n as f64)).collect()
}

fn points_row(n: usize, radius: f64) -> Vec<DMatrix<f64>> {
    (0..n)
        .map(|i| {
            let t = i as f64 * 2.399_963;
            let r = radius * (i as f64 + 0.5) / n as f64;
            dmatrix![r * t.cos(), r * t.sin()]
        })
        .collect()
}

fn params(mu: DMatrix<f64>, sigma: DMatrix<f64>, theta: DMatrix<f64>) -> Result<EllipticalParams> {
    EllipticalParams::new(mu, SpdMatrix::new(sigma)?, SpdMatrix::new(theta)?)
}

/// `Υ = 0` compound density against the matricvariate T with `ν = 2a` and scale `Σ^{1/2}(2Ξ)Σ^{1/2}`.
pub fn thm1_vs_t(a: f64, xi: &SpdMatrix, p: &EllipticalParams, points: &[DMatrix<f64>]) -> Result<CheckReport> {
    let m = p.m();
    let d1 = CompoundThm1::new(a, xi.clone(), DMatrix::zeros(m, m), HypergeomSpec::new(vec![], vec![]), p.clone())?;
    let s = p.sigma.sqrt();
    let t_params =
        EllipticalParams::new(p.mu.clone(), SpdMatrix::new(&s * (xi.matrix() * 2.0) * &s)?, p.theta.clone())?;
    let t = MatricvariateT::new(2.0 * a, t_params)?;
    check_densities_agree(&format!("thm1 upsilon=0 vs matricvariate t m={m} n={}", p.n()), &d1, &t, points, 1e-9)
}

fn compound_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    jobs.push(single("thm1 vs t m=1", |_| {
        let p = params(one(0.3), one(1.4), one(0.8))?;
        thm1_vs_t(1.7, &SpdMatrix::new(one(0.6))?, &p, &points_1d(-6.0, 6.0, 20))
    }));
    jobs.push(single("thm1 vs t m=2", |_| {
        let p = params(dmatrix![0.2, -0.1], dmatrix![1.0, 0.3; 0.3, 0.8], one(1.2))?;
        thm1_vs_t(2.3, &SpdMatrix::new(dmatrix![0.9, -0.2; -0.2, 0.6])?, &p, &points_row(20, 5.0))
    }));
    for n in [1usize, 2] {
        jobs.push(single(format!("thm5 = thm1 m=1 n={n}"), move |_| {
            let mu = DMatrix::from_fn(n, 1, |i, _| 0.1 * i as f64);
            let theta = DMatrix::identity(n, n) * 0.9;
            let p = params(mu, one(1.3), theta)?;
            let spec = HypergeomSpec::new(vec![], vec![1.8]);
            let t5 = ScaleMixThm5::new(1.7, 0.9, 0.4, spec.clone(), p.clone())?;
            let t1 = CompoundThm1::new(1.7, SpdMatrix::new(one(0.9))?, one(0.4), spec, p)?;
            let pts: Vec<DMatrix<f64>> =
                (0..20).map(|i| DMatrix::from_fn(n, 1, |r, _| (i as f64 - 9.5) * 0.4 + r as f64 * 0.3)).collect();
            check_densities_agree(&format!("thm5 = thm1 m=1 n={n}"), &t5, &t1, &pts, 1e-13)
        }));
    }
    for (name, text, pts) in mixture_cases() {
        jobs.push(single(format!("mixture {name}"), move |_| {
            check_mixture_pointwise(name, &spec(&text)?, &pts, 1e-5, QuadOptions::default())
        }));
    }
    jobs.push(single("thm4 direct vs euler m=2", |_| {
        let p = params(dmatrix![0.0, 0.1], dmatrix![1.0, 0.2; 0.2, 0.8], one(1.0))?;
        let d = CompoundThm4::new(3.0, 1.7, 35.3, p, TruncationPolicy::default())?;
        check_thm4_euler("thm4 direct vs euler m=2", &d, &points_row(10, 0.08), 1e-7)
    }));
    jobs.push(single("thm4 direct vs euler m=1", |_| {
        let p = params(one(0.0), one(1.0), one(1.0))?;
        let d = CompoundThm4::new(2.5, 1.3, 33.7, p, TruncationPolicy::default())?;
        check_thm4_euler("thm4 direct vs euler m=1", &d, &points_1d(-0.12, 0.12, 10), 1e-7)
    }));
    for (name, text, route, stride) in ks_cases() {
        jobs.push(single(format!("ks {name}"), move |s| {
            check_sampler_ks(name, &spec(&text)?, route, 100_000, s, stride)
        }));
    }
    jobs
}

/// Pointwise mixture cases at `m = 1`, with points in the region where the closed forms hold.
pub fn mixture_cases() -> Vec<(&'static str, String, Vec<DMatrix<f64>>)> {
    vec![
        (
            "thm1 m=1",
            format!(r#"{{"family": "compound_thm1", "a": 1.5, "xi": [[0.7]], "upsilon": [[0.4]], "hypergeom": {{"upper": [], "lower": [1.8]}}, {STD11}}}"#),
            points_1d(-5.0, 5.0, 20),
        ),
        (
            "thm2 m=1",
            r#"{"family": "compound_thm2", "a": 2.0, "b": 30.7, "xi": [[-0.3]], "hypergeom": {"upper": [], "lower": []}, "params": {"mu": [[0.0]], "sigma": [[1.0]], "theta": [[1.0]]}}"#.into(),
            points_1d(-2.0, 2.0, 20),
        ),
        (
            "thm4 m=1",
            r#"{"family": "compound_thm4", "nu": 3.0, "a": 1.7, "b": 31.3, "params": {"mu": [[0.0]], "sigma": [[1.0]], "theta": [[1.0]]}}"#.into(),
            points_1d(-0.5, 0.5, 20),
        ),
        (
            "thm5 m=2 n=1",
            format!(r#"{{"family": "scale_mix_thm5", "a": 1.2, "xi": 0.9, "upsilon": 0.3, "hypergeom": {{"upper": [], "lower": [2.0]}}, {STD12}}}"#),
            points_row(10, 4.0),
        ),
    ]
}

/// Sampler cases for the KS checks: `(name, spec json, CDF route, stride)`.
pub fn ks_cases() -> Vec<(&'static str, String, CdfRoute, usize)> {
    let std = r#""params": {"mu": [[0.5]], "sigma": [[1.3]], "theta": [[0.9]]}"#;
    vec![
        (
            "thm1 upsilon=0",
            format!(
                r#"{{"family": "compound_thm1", "a": 1.5, "xi": [[0.7]], "upsilon": [[0.0]], "hypergeom": {{"upper": [], "lower": []}}, {std}}}"#
            ),
            CdfRoute::ClosedForm,
            1,
        ),
        (
            "thm2 xi=0",
            format!(
                r#"{{"family": "compound_thm2", "a": 2.0, "b": 30.7, "xi": [[0.0]], "hypergeom": {{"upper": [], "lower": []}}, {std}}}"#
            ),
            CdfRoute::Mixture,
            10,
        ),
        (
            "thm4",
            format!(r#"{{"family": "compound_thm4", "nu": 3.0, "a": 1.7, "b": 31.3, {std}}}"#),
            CdfRoute::Mixture,
            10,
        ),
        (
            "thm5 upsilon=0",
            format!(
                r#"{{"family": "scale_mix_thm5", "a": 1.2, "xi": 0.9, "upsilon": 0.0, "hypergeom": {{"upper": [], "lower": []}}, {std}}}"#
            ),
            CdfRoute::ClosedForm,
            1,
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::PARTS.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn scalar_reference_series() {
        assert!((scalar_reference(&[], &[], 1.0) - std::f64::consts::E).abs() < 1e-15);
        assert!((scalar_reference(&[1.0, 1.0], &[2.0], -0.5) - 1.5f64.ln() / 0.5).abs() < 1e-15);
    }

    #[test]
    fn cheap_suites_pass() {
        for s in [Suite::Specialfun, Suite::Zonal, Suite::Hypergeom] {
            let r = run_suite(s, 7);
            let bad: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
            assert!(bad.is_empty(), "{s}: {bad:#?}");
        }
    }
}
