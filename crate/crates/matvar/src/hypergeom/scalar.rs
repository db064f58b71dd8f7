//! Scalar ₁F₁ and ₂F₁ over the whole real line, using Kummer and Pfaff transformations,
//! the `1/z` connection formula and the large-argument asymptotic expansion where the
//! plain series is slow or unstable.

use crate::error::{Error, Result};
use crate::specialfun::{ln_gamma, LogValue};

use super::series::{scalar_series, terminating_order};
use super::{Evaluated, SeriesReport, Transform, TruncationPolicy};

/// Smallest |z| for which the large-argument ₁F₁ expansion is tried.
const ASYMPTOTIC_FROM: f64 = 20.0;
/// Log of the relative size below which the recessive asymptotic term is dropped.
const NEGLIGIBLE_LN: f64 = -37.0;
/// Largest ₁F₁ argument magnitude summed as a plain series (e^700 is near f64 overflow).
const MAX_SERIES_ARGUMENT: f64 = 700.0;
/// ₂F₁ arguments below this use the `1/z` connection formula.
const CONNECTION_BELOW: f64 = -3.0;
/// Parameter differences closer than this to an integer make the connection formula
/// ill-conditioned.
const INTEGER_GAP: f64 = 1e-4;

fn series(upper: &[f64], lower: &[f64], z: f64, policy: &TruncationPolicy) -> Result<(f64, SeriesReport)> {
    scalar_series(upper, lower, z, policy, policy.scalar_max_terms)
}

fn accept(value: f64, report: SeriesReport, what: &str) -> Result<(f64, SeriesReport)> {
    if !report.converged {
        return Err(Error::Divergence {
            detail: format!(
                "{what} did not converge after {} terms (estimated error {:e})",
                report.degrees_used, report.estimated_error
            ),
        });
    }
    Ok((value, report))
}

fn tagged(value: LogValue, mut report: SeriesReport, transform: Transform) -> Evaluated {
    report.transform = transform;
    Evaluated { value, report }
}

/// Reciprocal gamma as a signed log value; zero at the poles of `Γ`.
fn rgamma(x: f64) -> LogValue {
    if terminating_order(x).is_some() {
        return LogValue::ZERO;
    }
    match ln_gamma(x) {
        Ok(g) => LogValue { sign: g.sign, ln_abs: -g.ln_abs },
        Err(_) => LogValue::ZERO,
    }
}

fn gamma(x: f64) -> Result<LogValue> {
    ln_gamma(x)
}

fn add(a: LogValue, b: LogValue) -> LogValue {
    if a.sign == 0 {
        return b;
    }
    if b.sign == 0 {
        return a;
    }
    let hi = a.ln_abs.max(b.ln_abs);
    let v = f64::from(a.sign) * (a.ln_abs - hi).exp() + f64::from(b.sign) * (b.ln_abs - hi).exp();
    let mut r = LogValue::from_f64(v);
    if r.sign != 0 {
        r.ln_abs += hi;
    }
    r
}

/// ₁F₁(b; c; z) for real `z`.
pub(crate) fn hyp1f1(b: f64, c: f64, z: f64, policy: &TruncationPolicy) -> Result<Evaluated> {
    if terminating_order(b).is_some() || z == 0.0 {
        let (v, r) = accept_series(&[b], &[c], z, policy, "1F1")?;
        return Ok(tagged(LogValue::from_f64(v), r, Transform::None));
    }
    let kummer = || -> Result<Evaluated> {
        let (v, r) = accept_series(&[c - b], &[c], -z, policy, "1F1 (Kummer)")?;
        Ok(tagged(LogValue::positive(z) * LogValue::from_f64(v), r, Transform::Kummer))
    };
    if z < 0.0 {
        let x = -z;
        if terminating_order(c - b).is_some() {
            return kummer();
        }
        // Γ(c)/Γ(c-b) x^{-b} ₂F₀(b, b-c+1;; 1/x); the omitted term is smaller by
        // |Γ(c-b)/Γ(b)| e^{-x} x^{2b-c}.
        let omitted = -x + (2.0 * b - c) * x.ln() - rgamma(c - b).ln_abs + rgamma(b).ln_abs;
        if x >= ASYMPTOTIC_FROM && omitted < NEGLIGIBLE_LN {
            if let Ok((v, r)) = series(&[b, b - c + 1.0], &[], -1.0 / z, policy) {
                if r.converged {
                    let pre = gamma(c)? * rgamma(c - b) * LogValue::positive(-b * x.ln());
                    return Ok(tagged(pre * LogValue::from_f64(v), r, Transform::Asymptotic));
                }
            }
        }
        if x <= MAX_SERIES_ARGUMENT {
            return kummer();
        }
        return Err(Error::Divergence { detail: format!("1F1({b}; {c}; {z}) is out of reach") });
    }
    if z > MAX_SERIES_ARGUMENT {
        // Γ(c)/Γ(b) e^z z^{b-c} ₂F₀(c-b, 1-b;; 1/z)
        let (v, r) = accept_series(&[c - b, 1.0 - b], &[], 1.0 / z, policy, "1F1 asymptotic")?;
        let pre = gamma(c)? * rgamma(b) * LogValue::positive(z + (b - c) * z.ln());
        return Ok(tagged(pre * LogValue::from_f64(v), r, Transform::Asymptotic));
    }
    let (v, r) = accept_series(&[b], &[c], z, policy, "1F1")?;
    Ok(tagged(LogValue::from_f64(v), r, Transform::None))
}

fn accept_series(
    upper: &[f64],
    lower: &[f64],
    z: f64,
    policy: &TruncationPolicy,
    what: &str,
) -> Result<(f64, SeriesReport)> {
    let (v, r) = series(upper, lower, z, policy)?;
    accept(v, r, what)
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < INTEGER_GAP
}

/// ₂F₁(a, b; c; z) for real `z < 1`.
pub(crate) fn hyp2f1(a: f64, b: f64, c: f64, z: f64, policy: &TruncationPolicy) -> Result<Evaluated> {
    let terminating = terminating_order(a).is_some() || terminating_order(b).is_some();
    if terminating || z.abs() <= 0.5 {
        let (v, r) = accept_series(&[a, b], &[c], z, policy, "2F1")?;
        return Ok(tagged(LogValue::from_f64(v), r, Transform::None));
    }
    if z >= 1.0 {
        return Err(Error::Divergence { detail: format!("2F1 requires z < 1, got {z}") });
    }
    if z > 0.0 {
        let (v, r) = accept_series(&[a, b], &[c], z, policy, "2F1")?;
        return Ok(tagged(LogValue::from_f64(v), r, Transform::None));
    }
    let w = z / (z - 1.0);
    let one_minus = 1.0 - z;
    // Pfaff, choosing the version that terminates when one does.
    let pfaff = |x: f64, y: f64| -> Result<Evaluated> {
        let (v, r) = accept_series(&[x, c - y], &[c], w, policy, "2F1 (Pfaff)")?;
        let pre = LogValue::positive(-x * one_minus.ln());
        Ok(tagged(pre * LogValue::from_f64(v), r, Transform::Pfaff))
    };
    if terminating_order(c - b).is_some() {
        return pfaff(a, b);
    }
    if terminating_order(c - a).is_some() {
        return pfaff(b, a);
    }
    if z < CONNECTION_BELOW {
        let result = if near_integer(a - b) {
            connection_degenerate(a, b, c, z, policy)
        } else {
            connection(a, b, c, z, policy)
        };
        if let Ok(e) = result {
            return Ok(e);
        }
    }
    pfaff(a, b)
}

/// `1/z` connection formula for `z < -1`.
fn connection(a: f64, b: f64, c: f64, z: f64, policy: &TruncationPolicy) -> Result<Evaluated> {
    let u = 1.0 / z;
    // |u| < 1/3, so full precision is cheap and protects against cancellation below.
    let policy = &TruncationPolicy { tolerance: 1e-17, ..policy.clone() };
    let (f1, r1) = accept_series(&[a, a - c + 1.0], &[a - b + 1.0], u, policy, "2F1 connection")?;
    let (f2, r2) = accept_series(&[b, b - c + 1.0], &[b - a + 1.0], u, policy, "2F1 connection")?;
    let gc = gamma(c)?;
    let t1 =
        gc * gamma(b - a)? * rgamma(b) * rgamma(c - a) * LogValue::positive(-a * (-z).ln()) * LogValue::from_f64(f1);
    let t2 =
        gc * gamma(a - b)? * rgamma(a) * rgamma(c - b) * LogValue::positive(-b * (-z).ln()) * LogValue::from_f64(f2);
    let err = r1.estimated_error.abs().max(r2.estimated_error.abs());
    let mut report = if r1.degrees_used >= r2.degrees_used { r1 } else { r2 };
    report.estimated_error = err;
    Ok(tagged(add(t1, t2), report, Transform::Connection))
}

/// Connection formula when `a - b` is (nearly) an integer: symmetric fourth-order
/// Richardson extrapolation in `a` over perturbations of size `PERTURBATION`.
fn connection_degenerate(a: f64, b: f64, c: f64, z: f64, policy: &TruncationPolicy) -> Result<Evaluated> {
    const PERTURBATION: f64 = 2e-4;
    let at = |da: f64| -> Result<(f64, SeriesReport)> {
        let e = connection(a + da, b, c, z, policy)?;
        Ok((e.value.to_f64(), e.report))
    };
    let (p1, report) = at(PERTURBATION)?;
    let (m1, _) = at(-PERTURBATION)?;
    let (p2, _) = at(2.0 * PERTURBATION)?;
    let (m2, _) = at(-2.0 * PERTURBATION)?;
    let h1 = 0.5 * (p1 + m1);
    let h2 = 0.5 * (p2 + m2);
    let value = (4.0 * h1 - h2) / 3.0;
    let mut report = report;
    report.estimated_error = (h1 - h2).abs() / 15.0;
    Ok(tagged(LogValue::from_f64(value), report, Transform::Connection))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn kummer_matches_elementary() {
        // ₁F₁(1; 2; z) = (e^z - 1)/z
        for z in [-200.0, -45.0, -3.0, 0.7, 12.0, 700.0] {
            let got = hyp1f1(1.0, 2.0, z, &policy()).unwrap().value;
            let want = LogValue::from_f64(if z > 0.0 { (z.exp() - 1.0) / z } else { -(z.exp_m1()) / -z });
            assert!((got.ln_abs - want.ln_abs).abs() < 1e-9, "z={z}: {got:?} {want:?}");
        }
    }

    #[test]
    fn gauss_matches_elementary() {
        // ₂F₁(1, 1; 2; z) = -ln(1-z)/z
        for z in [-1e6, -300.0, -4.0, -0.9, 0.3, 0.9] {
            let got = hyp2f1(1.0, 1.0, 2.0, z, &policy()).unwrap().value.to_f64();
            let want = -(-z).ln_1p() / z;
            assert!(rel(got, want) < 1e-9, "z={z}: {got} vs {want}");
        }
        // ₂F₁(a, b; b; z) = (1-z)^{-a}
        for z in [-50.0, -5.5, -0.7] {
            let got = hyp2f1(0.7, 2.3, 2.3, z, &policy()).unwrap().value.to_f64();
            assert!(rel(got, (1.0 - z).powf(-0.7)) < 1e-10, "z={z}");
        }
        // connection formula with non-integer a - b
        let got = hyp2f1(0.5, 1.3, 2.1, -20.0, &policy()).unwrap();
        let pf = hyp2f1(0.5, 1.3, 2.1, -2.9, &policy()).unwrap();
        assert_eq!(got.report.transform, Transform::Connection);
        assert_eq!(pf.report.transform, Transform::Pfaff);
    }

    #[test]
    fn connection_agrees_with_pfaff_series() {
        let p = TruncationPolicy { tolerance: 1e-16, ..policy() };
        let (a, b, c) = (0.8, 1.9, 2.6);
        let z = -9.0;
        let conn = connection(a, b, c, z, &p).unwrap().value.to_f64();
        let w = z / (z - 1.0);
        let (s, r) = scalar_series(&[a, c - b], &[c], w, &p, 20000).unwrap();
        assert!(r.converged);
        let pf = (1.0 - z).powf(-a) * s;
        assert!(rel(conn, pf) < 1e-11, "{conn} vs {pf}");
    }

    #[test]
    fn rejects_outside_unit_interval() {
        assert!(matches!(hyp2f1(0.5, 0.5, 2.0, 1.5, &policy()), Err(Error::Divergence { .. })));
    }
}
