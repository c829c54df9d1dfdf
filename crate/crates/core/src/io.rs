//! CSV interchange for distance matrices and point sets.
//!
//! Matrix files hold `N` rows of comma-separated decimals; row `i` gives
//! `d[i][0..N]`. Lower-triangle cells may be blank (or missing at the end of
//! a row), in which case they are mirrored from the upper triangle. Lines
//! starting with `#` are ignored. Point files hold `N` rows of `x,y,z`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, Vector3};

use crate::distmat::{DistanceKind, DistanceMatrix, PointSet};
use crate::error::{Error, Result};

fn records(text: &str) -> Result<Vec<(usize, Vec<Option<f64>>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let cells = rec
            .iter()
            .map(|cell| {
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|e| Error::Parse {
                        line,
                        message: format!("bad number {cell:?}: {e}"),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, cells));
    }
    Ok(rows)
}

/// Parses a full or upper-triangular matrix.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows = records(text)?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::validation("empty matrix file"));
    }
    let mut cells = vec![vec![None; n]; n];
    for (i, (line, row)) in rows.iter().enumerate() {
        if row.len() > n {
            return Err(Error::Parse {
                line: *line,
                message: format!("row has {} cells, matrix is {n}x{n}", row.len()),
            });
        }
        // An upper-triangular row may omit its leading blanks entirely.
        let offset = if row.len() < n && row.len() == n - i {
            i
        } else {
            0
        };
        for (k, v) in row.iter().enumerate() {
            cells[i][k + offset] = *v;
        }
    }

    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = match (cells[i][j], cells[j][i]) {
                (Some(v), _) => v,
                (None, Some(v)) => v,
                (None, None) if i == j => 0.0,
                (None, None) => {
                    return Err(Error::validation(format!(
                        "entry ({i},{j}) missing in both triangles"
                    )))
                }
            };
        }
    }
    Ok(m)
}

pub fn parse_distance_matrix(text: &str, kind: DistanceKind) -> Result<DistanceMatrix> {
    DistanceMatrix::new(parse_matrix(text)?, kind)
}

pub fn read_distance_matrix(path: impl AsRef<Path>, kind: DistanceKind) -> Result<DistanceMatrix> {
    parse_distance_matrix(&fs::read_to_string(path)?, kind)
}

/// Full-matrix CSV with round-trip float formatting.
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    records(text)?
        .into_iter()
        .map(|(line, row)| match row.as_slice() {
            [Some(x), Some(y), Some(z)] => Ok(Vector3::new(*x, *y, *z)),
            _ => Err(Error::Parse {
                line,
                message: "expected three numbers x,y,z".into(),
            }),
        })
        .collect()
}

pub fn read_points(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn format_points(points: &PointSet) -> String {
    points
        .iter()
        .map(|p| format!("{},{},{}\n", p.x, p.y, p.z))
        .collect()
}

pub fn write_points(path: impl AsRef<Path>, points: &PointSet) -> Result<()> {
    fs::write(path, format_points(points))?;
    Ok(())
}
