//! Raw truncated series: degree-by-degree zonal sums for matrix arguments and the
//! classical term recurrence for scalar arguments.

use crate::error::{Error, Result};
use crate::partitions::Partition;
use crate::zonal::{zonal_table, MAX_DEGREE_CEILING};

use super::{SeriesReport, Termination, TruncationPolicy};

/// Distance to the half-integer grid below which a parameter is treated as exact.
const GRID_EPS: f64 = 1e-9;
/// Consecutive negligible degrees required before a series counts as converged.
const QUIET_DEGREES: u32 = 3;

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums. Returns the even-column
/// estimate whose successive difference is smallest, with that difference.
pub fn wynn_epsilon(partial: &[f64]) -> Option<(f64, f64)> {
    let n = partial.len();
    if n < 3 {
        return None;
    }
    let mut best = partial[n - 1];
    let mut best_err = (partial[n - 1] - partial[n - 2]).abs();
    let mut prev = vec![0.0; n + 1];
    let mut cur = partial.to_vec();
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len().saturating_sub(1));
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            let scale = cur[j + 1].abs().max(cur[j].abs());
            if d == 0.0 || d.abs() <= 1e-15 * scale {
                return Some((best, best_err));
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        if next.len() < 2 {
            break;
        }
        if col % 2 == 0 {
            let err = (next[next.len() - 1] - next[next.len() - 2]).abs();
            if err < best_err {
                best = next[next.len() - 1];
                best_err = err;
            }
        }
        prev = cur;
        cur = next;
    }
    Some((best, best_err))
}

/// Upper parameter snapped to an exact non-positive integer when within tolerance.
pub(crate) fn terminating_order(a: f64) -> Option<u32> {
    let r = a.round();
    if r <= 0.0 && (a - r).abs() < GRID_EPS {
        Some((-r) as u32)
    } else {
        None
    }
}

fn snap(a: f64) -> f64 {
    match terminating_order(a) {
        Some(j) => -(j as f64),
        None => a,
    }
}

fn check_params(upper: &[f64], lower: &[f64]) -> Result<()> {
    if upper.iter().chain(lower).any(|v| !v.is_finite()) {
        return Err(Error::domain("hypergeometric parameters", "must be finite"));
    }
    Ok(())
}

enum Mode {
    Normal,
    Asymptotic,
    Terminating(u32),
}

struct Accumulator {
    sum: Compensated,
    partial: Vec<f64>,
    quiet: u32,
    max_contribution: f64,
    last: f64,
    min_abs: f64,
    degrees: u32,
    terms: u64,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            sum: Compensated::default(),
            partial: Vec::new(),
            quiet: 0,
            max_contribution: 0.0,
            last: 0.0,
            min_abs: f64::INFINITY,
            degrees: 0,
            terms: 0,
        }
    }

    fn push(&mut self, d: f64, tol: f64) {
        self.sum.add(d);
        self.partial.push(self.sum.value());
        self.max_contribution = self.max_contribution.max(d.abs());
        self.last = d;
        self.min_abs = self.min_abs.min(d.abs());
        self.degrees += 1;
        if d.abs() <= tol * self.sum.value().abs() {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
    }

    fn finish(
        self,
        mode: &Mode,
        converged: bool,
        policy: &TruncationPolicy,
        p: usize,
        q: usize,
    ) -> Result<(f64, SeriesReport)> {
        let mut value = self.sum.value();
        let mut estimated_error = self.last.abs();
        let termination = match mode {
            Mode::Terminating(_) => Termination::Terminating,
            Mode::Asymptotic => Termination::Asymptotic,
            Mode::Normal if converged => Termination::Converged,
            Mode::Normal => {
                let mut t = Termination::Truncated;
                if policy.accelerate && p <= q + 1 {
                    if let Some((v, err)) = wynn_epsilon(&self.partial) {
                        if v.is_finite() && err < estimated_error {
                            value = v;
                            estimated_error = err;
                            t = Termination::Accelerated;
                        }
                    }
                }
                t
            }
        };
        if !matches!(mode, Mode::Terminating(_)) && self.max_contribution > policy.max_growth * value.abs() {
            return Err(Error::Divergence {
                detail: format!(
                    "cancellation: largest degree contribution {:e} against sum {:e}",
                    self.max_contribution, value
                ),
            });
        }
        let mut report = SeriesReport {
            degrees_used: self.degrees,
            terms: self.terms,
            last_contribution: self.last,
            max_contribution: self.max_contribution,
            estimated_error,
            termination,
            transform: super::Transform::None,
            converged: false,
        };
        report.converged = match termination {
            Termination::Converged | Termination::Terminating | Termination::Asymptotic => true,
            Termination::Accelerated => estimated_error <= policy.accel_tolerance * value.abs(),
            Termination::Truncated | Termination::ClosedForm => false,
        };
        Ok((value, report))
    }
}

/// `Π_u (a_u - i/2 + j) / Π_l (b_l - i/2 + j)` over the boxes of κ, divided by `k!`.
/// `Ok(None)` when the numerator vanishes.
fn coefficient(upper: &[f64], lower: &[f64], kappa: &Partition) -> Result<Option<f64>> {
    let mut c = 1.0;
    let mut n = 0u32;
    for (i, &k) in kappa.parts().iter().enumerate() {
        let shift = i as f64 / 2.0;
        for j in 0..k {
            n += 1;
            let mut num = 1.0;
            for &a in upper {
                num *= a - shift + j as f64;
            }
            if num == 0.0 {
                return Ok(None);
            }
            let mut den = 1.0;
            for &b in lower {
                let f = b - shift + j as f64;
                if f.abs() < GRID_EPS {
                    return Err(Error::Pole { parameter: b, partition: kappa.to_string() });
                }
                den *= f;
            }
            c *= num / (den * n as f64);
        }
    }
    Ok(Some(c))
}

fn mode_for(upper: &[f64], lower: &[f64], spectral_radius: f64, m: usize) -> Result<Mode> {
    let (p, q) = (upper.len(), lower.len());
    if let Some(j) = upper.iter().filter_map(|&a| terminating_order(a)).min() {
        return Ok(Mode::Terminating(j * m as u32));
    }
    if spectral_radius == 0.0 {
        return Ok(Mode::Normal);
    }
    if p > q + 1 {
        return Ok(Mode::Asymptotic);
    }
    if p == q + 1 && spectral_radius >= 1.0 {
        return Err(Error::Divergence {
            detail: format!("{p}F{q} requires spectral radius < 1, got {spectral_radius}"),
        });
    }
    Ok(Mode::Normal)
}

/// Truncated zonal series `Σ_k Σ_{κ ⊢ k} [Π(a)_κ / Π(b)_κ] C_κ(X) / k!` from the
/// eigenvalues of `X`.
pub(crate) fn matrix_series(
    upper: &[f64],
    lower: &[f64],
    eigenvalues: &[f64],
    policy: &TruncationPolicy,
) -> Result<(f64, SeriesReport)> {
    check_params(upper, lower)?;
    if eigenvalues.is_empty() {
        return Err(Error::domain("hypergeometric argument", "matrix must be non-empty"));
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("hypergeometric argument", "eigenvalues must be finite"));
    }
    let upper: Vec<f64> = upper.iter().map(|&a| snap(a)).collect();
    let m = eigenvalues.len();
    let radius = eigenvalues.iter().fold(0.0f64, |r, v| r.max(v.abs()));
    let mode = mode_for(&upper, lower, radius, m)?;
    let max_k = match mode {
        Mode::Terminating(deg) => {
            if deg > MAX_DEGREE_CEILING {
                return Err(Error::Resource {
                    detail: format!("terminating degree {deg} exceeds zonal ceiling {MAX_DEGREE_CEILING}"),
                });
            }
            deg
        }
        _ => policy.max_degree,
    };
    if max_k > MAX_DEGREE_CEILING {
        return Err(Error::Resource { detail: format!("degree {max_k} exceeds zonal ceiling {MAX_DEGREE_CEILING}") });
    }
    let table = zonal_table(max_k, m)?;
    let mut acc = Accumulator::new();
    let mut converged = false;
    let mut prev_abs = f64::INFINITY;
    for k in 0..=max_k {
        let zon = table.eval_degree(k, eigenvalues)?;
        let mut d = Compensated::default();
        for (kappa, z) in table.partitions(k)?.iter().zip(zon) {
            if let Some(c) = coefficient(&upper, lower, kappa)? {
                acc.terms += 1;
                d.add(c * z);
            }
        }
        let d = d.value();
        if let Mode::Asymptotic = mode {
            if k >= 2 && d.abs() > prev_abs {
                break;
            }
            prev_abs = d.abs();
        }
        acc.push(d, policy.tolerance);
        if radius == 0.0 {
            converged = true;
            break;
        }
        match mode {
            Mode::Normal if acc.quiet >= QUIET_DEGREES => {
                converged = true;
                break;
            }
            Mode::Asymptotic if acc.quiet >= 1 => {
                converged = true;
                break;
            }
            _ => {}
        }
    }
    if let Mode::Asymptotic = mode {
        check_asymptotic(&acc, converged, policy)?;
    }
    acc.finish(&mode, converged, policy, upper.len(), lower.len())
}

fn check_asymptotic(acc: &Accumulator, converged: bool, policy: &TruncationPolicy) -> Result<()> {
    let s = acc.sum.value().abs();
    if converged || acc.min_abs <= policy.accel_tolerance * s {
        return Ok(());
    }
    Err(Error::Divergence {
        detail: format!("asymptotic series: smallest contribution {:e} is not negligible against {:e}", acc.min_abs, s),
    })
}

/// Scalar series by term recurrence, capped at `max_terms` terms.
pub(crate) fn scalar_series(
    upper: &[f64],
    lower: &[f64],
    z: f64,
    policy: &TruncationPolicy,
    max_terms: u32,
) -> Result<(f64, SeriesReport)> {
    check_params(upper, lower)?;
    if !z.is_finite() {
        return Err(Error::domain("hypergeometric argument", "must be finite"));
    }
    let upper: Vec<f64> = upper.iter().map(|&a| snap(a)).collect();
    let mode = mode_for(&upper, lower, z.abs(), 1)?;
    let max_k = match mode {
        Mode::Terminating(deg) => deg,
        _ => max_terms,
    };
    let mut acc = Accumulator::new();
    let mut converged = false;
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..=max_k {
        if k > 0 {
            let j = (k - 1) as f64;
            let mut num = z / k as f64;
            for &a in &upper {
                num *= a + j;
            }
            for &b in lower {
                let f = b + j;
                if f.abs() < GRID_EPS {
                    if num == 0.0 {
                        break;
                    }
                    return Err(Error::Pole { parameter: b, partition: format!("({k})") });
                }
                num /= f;
            }
            term *= num;
        }
        if term == 0.0 && k > 0 {
            break;
        }
        if let Mode::Asymptotic = mode {
            if k >= 2 && term.abs() > prev_abs {
                break;
            }
            prev_abs = term.abs();
        }
        acc.terms += 1;
        acc.push(term, policy.tolerance);
        if z == 0.0 {
            converged = true;
            break;
        }
        match mode {
            Mode::Normal if acc.quiet >= QUIET_DEGREES => {
                converged = true;
                break;
            }
            Mode::Asymptotic if acc.quiet >= 1 => {
                converged = true;
                break;
            }
            _ => {}
        }
    }
    if let Mode::Asymptotic = mode {
        check_asymptotic(&acc, converged, policy)?;
    }
    acc.finish(&mode, converged, policy, upper.len(), lower.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let mut c = Compensated::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            c.add(x);
        }
        assert_eq!(c.value(), 2.0);
    }

    #[test]
    fn wynn_accelerates_log2() {
        let mut s = 0.0;
        let partial: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (v, err) = wynn_epsilon(&partial).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12, "{v}");
        assert!(err < 1e-10);
    }

    #[test]
    fn wynn_on_converged_sequence_is_finite() {
        let partial = vec![1.0; 12];
        let (v, _) = wynn_epsilon(&partial).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn snapping() {
        assert_eq!(terminating_order(-3.0 + 1e-12), Some(3));
        assert_eq!(terminating_order(-2.5), None);
        assert_eq!(terminating_order(0.0), Some(0));
        assert_eq!(terminating_order(1.0), None);
    }
}
