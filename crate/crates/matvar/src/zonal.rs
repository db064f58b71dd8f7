//! Zonal polynomials `C_κ`, normalised so that `Σ_{κ ⊢ k} C_κ(Y) = (tr Y)^k`.
//!
//! Coefficients in the monomial symmetric basis are generated exactly (rational
//! arithmetic) from James' eigen-recurrence and cached per `(max_degree, max_parts)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrixops::sym_eigenvalues;
use crate::partitions::{enumerate_partitions, Partition};

/// Largest degree a table may be built for.
pub const MAX_DEGREE_CEILING: u32 = 40;

/// Coefficients of every `C_κ` with `|κ| = k` over the monomials of degree `k`.
#[derive(Debug)]
struct DegreeBlock {
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `exact[i]` lists `(j, c)` with `C_{κ_i} = Σ c M_{κ_j}`; `j >= i`.
    exact: Vec<Vec<(usize, BigRational)>>,
    coeffs: Vec<Vec<(usize, f64)>>,
}

/// Exact zonal-polynomial coefficients for all partitions of weight `<= max_degree`
/// with at most `max_parts` parts.
#[derive(Debug)]
pub struct ZonalTable {
    max_degree: u32,
    max_parts: usize,
    blocks: Vec<DegreeBlock>,
}

fn rho(p: &Partition) -> i64 {
    p.parts().iter().enumerate().map(|(i, &k)| k as i64 * (k as i64 - i as i64 - 1)).sum()
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn multinomial(p: &Partition) -> BigInt {
    let denom = p.parts().iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    factorial(p.weight()) / denom
}

fn build_block(k: u32, max_parts: usize) -> DegreeBlock {
    let partitions = enumerate_partitions(k, max_parts);
    let index: HashMap<Partition, usize> = partitions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = partitions.len();

    // Raising operators: for each λ, the partitions μ reached by moving t boxes from
    // row q up to row p, with the summed weight (l_p + t) - (l_q - t).
    let raises: Vec<Vec<(usize, i64)>> = partitions
        .iter()
        .map(|lambda| {
            let l = lambda.parts();
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for p in 0..l.len() {
                for q in p + 1..l.len() {
                    for t in 1..=l[q] {
                        let mut mu = l.to_vec();
                        mu[p] += t;
                        mu[q] -= t;
                        let jm = index[&Partition::from_unsorted(mu)];
                        let w = (l[p] + t) as i64 - (l[q] as i64 - t as i64);
                        match acc.iter_mut().find(|(j, _)| *j == jm) {
                            Some(e) => e.1 += w,
                            None => acc.push((jm, w)),
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let rhos: Vec<i64> = partitions.iter().map(rho).collect();

    // Unnormalised coefficients with c_{κ,κ} = 1.
    let mut raw: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for (i, kappa) in partitions.iter().enumerate() {
        let mut c = vec![BigRational::zero(); n];
        c[i] = BigRational::one();
        for j in i + 1..n {
            if !partitions[j].dominated_by(kappa) {
                continue;
            }
            let mut acc = BigRational::zero();
            for &(jm, w) in &raises[j] {
                if !c[jm].is_zero() {
                    acc += &c[jm] * BigRational::from_integer(BigInt::from(w));
                }
            }
            c[j] = acc / BigRational::from_integer(BigInt::from(rhos[i] - rhos[j]));
        }
        raw.push(c);
    }

    // Scale so that Σ_κ C_κ reproduces the multinomial expansion of (tr Y)^k.
    let mut scale = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut target = BigRational::from_integer(multinomial(&partitions[j]));
        for i in 0..j {
            if !raw[i][j].is_zero() {
                target -= &scale[i] * &raw[i][j];
            }
        }
        scale[j] = target;
    }

    let mut exact = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    for (i, row) in raw.into_iter().enumerate() {
        let entries: Vec<(usize, BigRational)> =
            row.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c * &scale[i])).collect();
        coeffs.push(entries.iter().map(|(j, c)| (*j, c.to_f64().unwrap_or(f64::NAN))).collect());
        exact.push(entries);
    }
    DegreeBlock { partitions, index, exact, coeffs }
}

/// Monomial symmetric function `M_λ(x)`: the sum of `Π x_i^{v_i}` over distinct
/// rearrangements `v` of `λ` padded with zeros to `x.len()` entries.
pub fn monomial_symmetric(lambda: &Partition, x: &[f64]) -> f64 {
    if lambda.len() > x.len() {
        return 0.0;
    }
    let mut values: Vec<(u32, usize)> = Vec::new();
    for &p in lambda.parts() {
        match values.last_mut() {
            Some((v, c)) if *v == p => *c += 1,
            _ => values.push((p, 1)),
        }
    }
    let zeros = x.len() - lambda.len();
    if zeros > 0 {
        values.push((0, zeros));
    }
    let mut total = 0.0;
    place(x, 0, &mut values, 1.0, &mut total);
    total
}

fn place(x: &[f64], pos: usize, values: &mut [(u32, usize)], prod: f64, total: &mut f64) {
    if pos == x.len() {
        *total += prod;
        return;
    }
    for v in 0..values.len() {
        if values[v].1 == 0 {
            continue;
        }
        values[v].1 -= 1;
        let factor = x[pos].powi(values[v].0 as i32);
        place(x, pos + 1, values, prod * factor, total);
        values[v].1 += 1;
    }
}

impl ZonalTable {
    /// Builds the table for every partition of weight `<= max_degree` with at most
    /// `max_parts` parts.
    pub fn build(max_degree: u32, max_parts: usize) -> Result<Self> {
        if max_degree > MAX_DEGREE_CEILING {
            return Err(Error::Resource {
                detail: format!("zonal degree {max_degree} exceeds ceiling {MAX_DEGREE_CEILING}"),
            });
        }
        if max_parts == 0 {
            return Err(Error::domain("ZonalTable::build", "max_parts must be positive"));
        }
        let blocks = (0..=max_degree).map(|k| build_block(k, max_parts)).collect();
        Ok(ZonalTable { max_degree, max_parts, blocks })
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn max_parts(&self) -> usize {
        self.max_parts
    }

    /// Partitions of weight `k` in reverse lexicographic order.
    pub fn partitions(&self, k: u32) -> Result<&[Partition]> {
        Ok(&self.block(k)?.partitions)
    }

    fn block(&self, k: u32) -> Result<&DegreeBlock> {
        self.blocks
            .get(k as usize)
            .ok_or_else(|| Error::domain("zonal table", format!("degree {k} exceeds table degree {}", self.max_degree)))
    }

    fn locate(&self, kappa: &Partition) -> Result<(&DegreeBlock, usize)> {
        let block = self.block(kappa.weight())?;
        let i =
            block.index.get(kappa).copied().ok_or_else(|| {
                Error::domain("zonal table", format!("{kappa} has more than {} parts", self.max_parts))
            })?;
        Ok((block, i))
    }

    /// Exact monomial-basis coefficients of `C_κ`.
    pub fn exact_coefficients(&self, kappa: &Partition) -> Result<Vec<(Partition, BigRational)>> {
        let (block, i) = self.locate(kappa)?;
        Ok(block.exact[i].iter().map(|(j, c)| (block.partitions[*j].clone(), c.clone())).collect())
    }

    /// `C_κ` evaluated at a matrix with the given eigenvalues.
    pub fn eval(&self, kappa: &Partition, eigenvalues: &[f64]) -> Result<f64> {
        if kappa.len() > eigenvalues.len() {
            return Ok(0.0);
        }
        let (block, i) = self.locate(kappa)?;
        let mut sum = crate::hypergeom::Compensated::default();
        for &(j, c) in &block.coeffs[i] {
            sum.add(c * monomial_symmetric(&block.partitions[j], eigenvalues));
        }
        Ok(sum.value())
    }

    /// All `C_κ` with `|κ| = k`, aligned with [`ZonalTable::partitions`].
    pub fn eval_degree(&self, k: u32, eigenvalues: &[f64]) -> Result<Vec<f64>> {
        let block = self.block(k)?;
        if eigenvalues.len() > self.max_parts {
            return Err(Error::domain(
                "zonal table",
                format!("{} eigenvalues but table supports {} parts", eigenvalues.len(), self.max_parts),
            ));
        }
        let monomials: Vec<f64> = block.partitions.iter().map(|p| monomial_symmetric(p, eigenvalues)).collect();
        Ok(block
            .coeffs
            .iter()
            .map(|row| {
                let mut sum = crate::hypergeom::Compensated::default();
                for &(j, c) in row {
                    sum.add(c * monomials[j]);
                }
                sum.value()
            })
            .collect())
    }

    /// Plain-text dump: one line per `κ` listing `λ=coefficient` pairs.
    pub fn dump(&self) -> String {
        let mut out = format!("# zonal max_degree={} max_parts={}\n", self.max_degree, self.max_parts);
        for block in &self.blocks {
            for (i, kappa) in block.partitions.iter().enumerate() {
                let _ = write!(out, "{kappa}");
                for (j, c) in &block.exact[i] {
                    let _ = write!(out, " {}={}", block.partitions[*j], c);
                }
                out.push('\n');
            }
        }
        out
    }

    /// Reads a table produced by [`ZonalTable::dump`].
    pub fn load(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse { detail };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty zonal dump".into()))?;
        let mut max_degree = None;
        let mut max_parts = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = field.strip_prefix("max_degree=") {
                max_degree = v.parse::<u32>().ok();
            } else if let Some(v) = field.strip_prefix("max_parts=") {
                max_parts = v.parse::<usize>().ok();
            }
        }
        let (Some(max_degree), Some(max_parts)) = (max_degree, max_parts) else {
            return Err(bad(format!("bad zonal header {header:?}")));
        };
        if max_degree > MAX_DEGREE_CEILING || max_parts == 0 {
            return Err(bad(format!("unsupported zonal header {header:?}")));
        }
        let mut rows: HashMap<Partition, Vec<(Partition, BigRational)>> = HashMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut fields = line.split_whitespace();
            let kappa: Partition = fields.next().unwrap_or_default().parse()?;
            let mut entries = Vec::new();
            for f in fields {
                let (lam, c) = f.split_once('=').ok_or_else(|| bad(format!("bad entry {f:?}")))?;
                let c: BigRational = c.parse().map_err(|e| bad(format!("coefficient {c:?}: {e}")))?;
                entries.push((lam.parse::<Partition>()?, c));
            }
            rows.insert(kappa, entries);
        }
        let mut blocks = Vec::new();
        for k in 0..=max_degree {
            let partitions = enumerate_partitions(k, max_parts);
            let index: HashMap<Partition, usize> =
                partitions.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
            let mut exact = Vec::new();
            for kappa in &partitions {
                let row = rows.remove(kappa).ok_or_else(|| bad(format!("zonal dump is missing {kappa}")))?;
                let mut entries = Vec::new();
                for (lam, c) in row {
                    let j = *index.get(&lam).ok_or_else(|| bad(format!("monomial {lam} is not a partition of {k}")))?;
                    entries.push((j, c));
                }
                entries.sort_by_key(|(j, _)| *j);
                exact.push(entries);
            }
            let coeffs = exact
                .iter()
                .map(|row| row.iter().map(|(j, c)| (*j, c.to_f64().unwrap_or(f64::NAN))).collect())
                .collect();
            blocks.push(DegreeBlock { partitions, index, exact, coeffs });
        }
        if let Some(extra) = rows.keys().next() {
            return Err(bad(format!("unexpected partition {extra} in zonal dump")));
        }
        Ok(ZonalTable { max_degree, max_parts, blocks })
    }
}

type Cache = Mutex<HashMap<usize, Arc<ZonalTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared table covering at least `max_degree` and exactly `max_parts` parts.
/// Tables are built once per process and reused.
pub fn zonal_table(max_degree: u32, max_parts: usize) -> Result<Arc<ZonalTable>> {
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = guard.get(&max_parts) {
        if t.max_degree >= max_degree {
            return Ok(Arc::clone(t));
        }
    }
    let table = Arc::new(ZonalTable::build(max_degree, max_parts)?);
    guard.insert(max_parts, Arc::clone(&table));
    Ok(table)
}

/// Seeds the shared cache with a prebuilt table, e.g. one read back by [`ZonalTable::load`].
/// A cached table of higher degree for the same part count is kept instead.
pub fn install_zonal_table(table: ZonalTable) -> Arc<ZonalTable> {
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    match guard.get(&table.max_parts) {
        Some(t) if t.max_degree >= table.max_degree => Arc::clone(t),
        _ => {
            let table = Arc::new(table);
            guard.insert(table.max_parts, Arc::clone(&table));
            table
        }
    }
}

/// `C_κ(Y)` from the eigenvalues of `Y`.
pub fn zonal_eval(kappa: &Partition, eigenvalues: &[f64]) -> Result<f64> {
    if kappa.len() > eigenvalues.len() {
        return Ok(0.0);
    }
    zonal_table(kappa.weight(), eigenvalues.len())?.eval(kappa, eigenvalues)
}

/// `C_κ(Y)` for a symmetric matrix `Y`.
pub fn zonal_eval_matrix(kappa: &Partition, y: &DMatrix<f64>) -> Result<f64> {
    zonal_eval(kappa, &sym_eigenvalues(y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn fact(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Closed form for `C_κ(I_m)` in terms of the parts of κ.
    fn zonal_at_identity(kappa: &Partition, m: usize) -> f64 {
        let k = kappa.weight();
        let p = kappa.len();
        let parts: Vec<f64> = kappa.parts().iter().map(|&x| x as f64).collect();
        let mut num = 4f64.powi(k as i32) * fact(k) * crate::specialfun::gen_pochhammer(m as f64 / 2.0, kappa);
        for i in 0..p {
            for j in i + 1..p {
                num *= 2.0 * parts[i] - 2.0 * parts[j] - i as f64 + j as f64;
            }
        }
        let den: f64 = (0..p).map(|i| fact(2 * kappa.parts()[i] + (p - i - 1) as u32)).product();
        num / den
    }

    fn power_sums(x: &[f64]) -> (f64, f64, f64) {
        (x.iter().sum(), x.iter().map(|v| v * v).sum(), x.iter().map(|v| v * v * v).sum())
    }

    #[test]
    fn low_degree_closed_forms() {
        let x = [0.7, -1.3, 2.1];
        let (p1, p2, p3) = power_sums(&x);
        let cases = [
            ("(1)", p1),
            ("(2)", (p1 * p1 + 2.0 * p2) / 3.0),
            ("(1,1)", 2.0 * (p1 * p1 - p2) / 3.0),
            ("(3)", (p1.powi(3) + 6.0 * p1 * p2 + 8.0 * p3) / 15.0),
            ("(2,1)", 3.0 * (p1.powi(3) + p1 * p2 - 2.0 * p3) / 5.0),
            ("(1,1,1)", (p1.powi(3) - 3.0 * p1 * p2 + 2.0 * p3) / 3.0),
        ];
        for (k, expected) in cases {
            let got = zonal_eval(&part(k), &x).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected.abs().max(1.0), "{k}: {got} vs {expected}");
        }
    }

    #[test]
    fn exact_degree_two() {
        let table = ZonalTable::build(2, 2).unwrap();
        let c = table.exact_coefficients(&part("(2)")).unwrap();
        assert_eq!(c[0].1, BigRational::one());
        assert_eq!(c[1].1, BigRational::new(2.into(), 3.into()));
        let c = table.exact_coefficients(&part("(1,1)")).unwrap();
        assert_eq!(c, vec![(part("(1,1)"), BigRational::new(4.into(), 3.into()))]);
    }

    #[test]
    fn identity_values_match_closed_form() {
        for m in 1..=4 {
            let table = zonal_table(12, m).unwrap();
            let ones = vec![1.0; m];
            for k in 0..=12 {
                for kappa in table.partitions(k).unwrap() {
                    let got = table.eval(kappa, &ones).unwrap();
                    let want = zonal_at_identity(kappa, m);
                    assert!((got - want).abs() <= 1e-11 * want.abs(), "m={m} {kappa}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn fewer_eigenvalues_than_parts_vanish() {
        assert_eq!(zonal_eval(&part("(1,1,1)"), &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(monomial_symmetric(&part("(1,1)"), &[3.0]), 0.0);
    }

    #[test]
    fn dump_load_roundtrip() {
        let table = ZonalTable::build(6, 3).unwrap();
        let text = table.dump();
        let back = ZonalTable::load(&text).unwrap();
        assert_eq!(back.dump(), text);
        assert!(ZonalTable::load("# zonal max_degree=2 max_parts=2\n(2) (2)=1\n").is_err());
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(ZonalTable::build(41, 2), Err(Error::Resource { .. })));
    }

    proptest! {
        #[test]
        fn degree_sum_is_trace_power(x in prop::collection::vec(-2.0f64..2.0, 1..5), k in 0u32..10) {
            let table = zonal_table(10, x.len()).unwrap();
            let total: f64 = table.eval_degree(k, &x).unwrap().iter().sum();
            let tr: f64 = x.iter().sum();
            let scale: f64 = x.iter().map(|v| v.abs()).sum::<f64>().powi(k as i32).max(1.0);
            prop_assert!((total - tr.powi(k as i32)).abs() <= 1e-12 * scale);
        }

        #[test]
        fn homogeneous_of_degree_k(x in prop::collection::vec(-2.0f64..2.0, 1..4), c in -2.0f64..2.0, k in 1u32..8) {
            let table = zonal_table(10, x.len()).unwrap();
            let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
            let base = table.eval_degree(k, &x).unwrap();
            let lifted = table.eval_degree(k, &scaled).unwrap();
            let mag: f64 = x.iter().map(|v| v.abs()).sum::<f64>().powi(k as i32).max(1e-300) * c.abs().powi(k as i32).max(1.0);
            for (b, l) in base.iter().zip(&lifted) {
                prop_assert!((l - c.powi(k as i32) * b).abs() <= 1e-11 * mag.max(1.0));
            }
        }

        #[test]
        fn symmetric_in_eigenvalues(mut x in prop::collection::vec(-2.0f64..2.0, 2..5), k in 1u32..7) {
            let table = zonal_table(10, x.len()).unwrap();
            let a = table.eval_degree(k, &x).unwrap();
            x.reverse();
            x.rotate_left(1);
            let b = table.eval_degree(k, &x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0) * 10f64.powi(k as i32 / 2));
            }
        }
    }
}
