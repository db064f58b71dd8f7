use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use matvar::matrixops::parse_matrix;
use matvar::zonal::{install_zonal_table, ZonalTable};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::Failure;

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Output file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// One-line JSON block that records everything needed to re-run a command.
#[derive(Serialize)]
pub struct Header<'a, C: Serialize> {
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config: &'a C,
}

impl<'a, C: Serialize> Header<'a, C> {
    pub fn new(seed: Option<u64>, config: &'a C) -> Self {
        Header { version: env!("CARGO_PKG_VERSION"), seed, config }
    }

    pub fn comment_line(&self) -> String {
        format!("# {}\n", serde_json::to_string(self).unwrap_or_default())
    }
}

/// Round-trip float formatting used in every CSV column.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Points for a density on `rows × cols` matrices.
///
/// JSON input is an array of matrices, each an array of rows. Text input holds blocks
/// separated by blank lines; a block with `k * rows` lines is read as `k` consecutive points,
/// so a one-number-per-line file lists scalar points.
pub fn parse_points(text: &str, rows: usize, cols: usize) -> Result<Vec<DMatrix<f64>>, Failure> {
    let bad = |detail: String| Failure::Usage(format!("points: {detail}"));
    let t = text.trim();
    let points = if t.starts_with('[') {
        let raw: Vec<Vec<Vec<f64>>> = serde_json::from_str(t).map_err(|e| bad(e.to_string()))?;
        raw.iter()
            .map(|m| parse_matrix(&serde_json::to_string(m).unwrap_or_default()).map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let mut out = Vec::new();
        let lines: Vec<(usize, &str)> =
            t.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.starts_with('#')).collect();
        for block in lines.split(|(_, l)| l.is_empty()).filter(|b| !b.is_empty()) {
            if block.len() % rows != 0 {
                return Err(bad(format!(
                    "block at line {} has {} rows, not a multiple of {rows}",
                    block[0].0,
                    block.len()
                )));
            }
            for chunk in block.chunks(rows) {
                let body: Vec<&str> = chunk.iter().map(|(_, l)| *l).collect();
                out.push(parse_matrix(&body.join("\n")).map_err(|e| bad(format!("line {}: {e}", chunk[0].0)))?);
            }
        }
        out
    };
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.shape() != (rows, cols)) {
        return Err(bad(format!("point {i} is {}x{}, expected {rows}x{cols}", p.nrows(), p.ncols())));
    }
    Ok(points)
}

/// Comma list or matrix file into eigenvalues.
pub fn parse_argument(eigenvalues: &[f64], matrix: Option<&Path>) -> Result<Vec<f64>, Failure> {
    match matrix {
        Some(p) => {
            let m = parse_matrix(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            matvar::matrixops::sym_eigenvalues(&m).map_err(Failure::from)
        }
        None if !eigenvalues.is_empty() => Ok(eigenvalues.to_vec()),
        None => Err(Failure::Usage("give --eigenvalues or --matrix".into())),
    }
}

pub fn table_path(dir: &Path, max_parts: usize) -> PathBuf {
    dir.join(format!("zonal_m{max_parts}.txt"))
}

/// Loads every `zonal_m*.txt` table in `dir` into the shared cache.
pub fn preload_tables(dir: &Path) -> Result<usize, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Usage(format!("table directory {}: {e}", dir.display())))?;
    let mut names: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("zonal_m") && n.ends_with(".txt"))
        })
        .collect();
    names.sort();
    for p in &names {
        let table = ZonalTable::load(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        install_zonal_table(table);
    }
    Ok(names.len())
}
