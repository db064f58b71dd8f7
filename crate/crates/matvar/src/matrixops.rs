//! Symmetric positive-definite matrices, the elliptical quadratic form and matrix I/O.
//!
//! Shapes: `X` and `μ` are `n × m`, `Σ` is `m × m` and `Θ` is `n × n`, so the kernel
//! `Δ = Σ^{-1/2}(X-μ)'Θ^{-1}(X-μ)Σ^{-1/2}` is `m × m`.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated before a matrix is rejected as non-symmetric.
const SYMMETRY_TOL: f64 = 1e-10;

fn check_square(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::dimension(format!("non-empty square {what}"), shape(a)));
    }
    Ok(())
}

pub(crate) fn shape(a: &DMatrix<f64>) -> String {
    format!("{}x{}", a.nrows(), a.ncols())
}

/// Returns `(A + A')/2`, rejecting matrices that are not symmetric up to rounding.
pub fn symmetrize(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a, "matrix")?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix", "entries must be finite"));
    }
    let scale = a.amax().max(1e-300);
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::domain("matrix", format!("not symmetric (max |A - A'| = {asym:e})")));
    }
    Ok((a + a.transpose()) * 0.5)
}

/// Eigenvalues of a symmetric matrix in decreasing order.
pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let s = symmetrize(a)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Applies `f` to the eigenvalues of a symmetric matrix.
pub fn sym_function(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let s = symmetrize(a)?;
    let eig = SymmetricEigen::new(s);
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    let r = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    Ok((&r + r.transpose()) * 0.5)
}

/// A validated symmetric positive-definite matrix with its factorisations.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    mat: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    ln_det: f64,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl SpdMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        let mat = symmetrize(&a)?;
        let eig = SymmetricEigen::new(mat.clone());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(min > 0.0) || min <= max * 1e-15 {
            return Err(Error::NotSpd { min_eigenvalue: min });
        }
        let chol = Cholesky::new(mat.clone()).ok_or(Error::NotSpd { min_eigenvalue: min })?;
        let ln_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let mut order: Vec<usize> = (0..mat.nrows()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(mat.nrows(), mat.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(SpdMatrix { mat, chol, eigenvalues, eigenvectors, ln_det })
    }

    pub fn identity(m: usize) -> Self {
        SpdMatrix::new(DMatrix::identity(m, m)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Lower Cholesky factor `L` with `A = L L'`.
    pub fn cholesky_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `A^{-1} B`.
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    fn spectral(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&v| f(v)),
        ));
        let r = &self.eigenvectors * d * self.eigenvectors.transpose();
        (&r + r.transpose()) * 0.5
    }

    pub fn inverse(&self) -> SpdMatrix {
        SpdMatrix::new(self.spectral(|v| 1.0 / v)).expect("inverse of SPD is SPD")
    }

    /// Symmetric square root.
    pub fn sqrt(&self) -> DMatrix<f64> {
        self.spectral(f64::sqrt)
    }

    /// Symmetric inverse square root.
    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        self.spectral(|v| 1.0 / v.sqrt())
    }

    /// `A^{1/2} B A^{1/2}` for symmetric `B`, whose eigenvalues are those of `BA`.
    pub fn congruence(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.dim() || b.ncols() != self.dim() {
            return Err(Error::dimension(format!("{0}x{0}", self.dim()), shape(b)));
        }
        let s = self.sqrt();
        let r = &s * b * &s;
        Ok((&r + r.transpose()) * 0.5)
    }

    /// Eigenvalues of `B A` (equivalently `A B`) for symmetric `B`.
    pub fn product_eigenvalues(&self, b: &DMatrix<f64>) -> Result<Vec<f64>> {
        sym_eigenvalues(&self.congruence(b)?)
    }

    /// `ln |I + A|`.
    pub fn ln_det_i_plus(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.ln_1p()).sum()
    }
}

/// Location and the two scale matrices of a matrix-variate elliptical law.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticalParams {
    pub mu: DMatrix<f64>,
    pub sigma: SpdMatrix,
    pub theta: SpdMatrix,
}

impl EllipticalParams {
    /// `mu` is `n × m`, `sigma` is `m × m`, `theta` is `n × n`.
    pub fn new(mu: DMatrix<f64>, sigma: SpdMatrix, theta: SpdMatrix) -> Result<Self> {
        if mu.nrows() != theta.dim() || mu.ncols() != sigma.dim() {
            return Err(Error::dimension(format!("mu {}x{}", theta.dim(), sigma.dim()), shape(&mu)));
        }
        Ok(EllipticalParams { mu, sigma, theta })
    }

    /// Standard parameters: zero location and identity scales.
    pub fn standard(n: usize, m: usize) -> Self {
        EllipticalParams { mu: DMatrix::zeros(n, m), sigma: SpdMatrix::identity(m), theta: SpdMatrix::identity(n) }
    }

    pub fn m(&self) -> usize {
        self.sigma.dim()
    }

    pub fn n(&self) -> usize {
        self.theta.dim()
    }

    fn check_point(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != self.n() || x.ncols() != self.m() {
            return Err(Error::dimension(format!("X {}x{}", self.n(), self.m()), shape(x)));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("X", "entries must be finite"));
        }
        Ok(())
    }

    /// `Δ = Σ^{-1/2}(X-μ)'Θ^{-1}(X-μ)Σ^{-1/2}`, symmetric positive semi-definite `m × m`.
    pub fn quad_form(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let d = x - &self.mu;
        let inner = d.transpose() * self.theta.solve(&d);
        let s = self.sigma.inv_sqrt();
        let delta = &s * inner * &s;
        Ok((&delta + delta.transpose()) * 0.5)
    }

    /// Eigenvalues of `Δ`, clipped at zero, in decreasing order.
    pub fn quad_form_eigenvalues(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        Ok(sym_eigenvalues(&self.quad_form(x)?)?.into_iter().map(|v| v.max(0.0)).collect())
    }

    /// `-(n/2) ln|Σ| - (m/2) ln|Θ|`.
    pub fn ln_scale_factor(&self) -> f64 {
        -(self.n() as f64) / 2.0 * self.sigma.ln_det() - (self.m() as f64) / 2.0 * self.theta.ln_det()
    }
}

/// Row-major nested-vector form of a matrix, used by JSON inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixRows(pub Vec<Vec<f64>>);

impl MatrixRows {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        rows_to_matrix(&self.0)
    }

    pub fn from_matrix(a: &DMatrix<f64>) -> Self {
        MatrixRows((0..a.nrows()).map(|r| a.row(r).iter().copied().collect()).collect())
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse { detail: "matrix rows must be non-empty and of equal length".into() });
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Parses a matrix from whitespace/comma separated text (one row per line) or from a
/// JSON array of rows.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let t = text.trim();
    if t.starts_with('[') {
        let rows: Vec<Vec<f64>> = serde_json::from_str(t)?;
        return rows_to_matrix(&rows);
    }
    let rows = t
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse { detail: format!("{s:?}: {e}") }))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    rows_to_matrix(&rows)
}

/// Formats a matrix as whitespace-separated rows with full round-trip precision.
pub fn format_matrix(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..a.nrows() {
        let row: Vec<String> = a.row(r).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn random_spd(m: usize, seed: &[f64]) -> DMatrix<f64> {
        let a = DMatrix::from_fn(m, m, |r, c| seed[(r * m + c) % seed.len()] + 0.1 * (r as f64 - c as f64));
        &a * a.transpose() + DMatrix::identity(m, m) * 0.5
    }

    #[test]
    fn rejects_non_spd() {
        let err = SpdMatrix::new(dmatrix![1.0, 2.0; 2.0, 1.0]).unwrap_err();
        match err {
            Error::NotSpd { min_eigenvalue } => assert!((min_eigenvalue + 1.0).abs() < 1e-12),
            e => panic!("unexpected {e}"),
        }
        assert!(SpdMatrix::new(dmatrix![1.0, 0.5; 0.0, 1.0]).is_err());
        assert!(SpdMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn quad_form_scalar_case() {
        let p = EllipticalParams::new(
            dmatrix![1.0],
            SpdMatrix::new(dmatrix![4.0]).unwrap(),
            SpdMatrix::new(dmatrix![2.0]).unwrap(),
        )
        .unwrap();
        let d = p.quad_form(&dmatrix![3.0]).unwrap();
        assert!((d[(0, 0)] - 0.5).abs() < 1e-15);
        assert!(p.quad_form(&dmatrix![1.0, 2.0]).is_err());
    }

    #[test]
    fn matrix_text_roundtrip() {
        let a = dmatrix![1.5, -2.0; 0.125, 1e-20];
        assert_eq!(parse_matrix(&format_matrix(&a)).unwrap(), a);
        assert_eq!(parse_matrix("[[1, 2], [3, 4]]").unwrap(), dmatrix![1.0, 2.0; 3.0, 4.0]);
        assert!(parse_matrix("1 2\n3").is_err());
    }

    proptest! {
        #[test]
        fn spd_factorisations(vals in prop::collection::vec(-1.0f64..1.0, 9), m in 1usize..4) {
            let a = random_spd(m, &vals);
            let s = SpdMatrix::new(a.clone()).unwrap();
            let inv = s.inverse();
            prop_assert!((s.matrix() * inv.matrix() - DMatrix::identity(m, m)).amax() < 1e-10);
            let r = s.sqrt();
            prop_assert!((&r * &r - &a).amax() < 1e-10 * a.amax());
            let det: f64 = s.eigenvalues().iter().product();
            prop_assert!((s.ln_det() - det.ln()).abs() < 1e-10);
            prop_assert!((a.determinant().ln() - s.ln_det()).abs() < 1e-9);
        }

        #[test]
        fn quad_form_is_psd_and_matches_trace(vals in prop::collection::vec(-1.0f64..1.0, 9), x in prop::collection::vec(-3.0f64..3.0, 6)) {
            let sigma = SpdMatrix::new(random_spd(3, &vals)).unwrap();
            let theta = SpdMatrix::new(random_spd(2, &vals[3..])).unwrap();
            let p = EllipticalParams::new(DMatrix::zeros(2, 3), sigma.clone(), theta.clone()).unwrap();
            let xm = DMatrix::from_row_slice(2, 3, &x);
            let ev = p.quad_form_eigenvalues(&xm).unwrap();
            prop_assert!(ev.iter().all(|v| *v >= 0.0));
            // tr Δ = tr(Σ^{-1} X' Θ^{-1} X)
            let direct = (sigma.solve(&xm.transpose()) * theta.solve(&xm)).trace();
            prop_assert!((ev.iter().sum::<f64>() - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }
}
