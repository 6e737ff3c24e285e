//! File formats: Matrix Market (coordinate, real, general), header-less dense
//! CSV, and the plot-ready field/mask exports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{BinaryMask, RealMatrix, SigmaField};

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Serializes `a` in Matrix Market coordinate format (1-based, nonzeros only).
pub fn to_matrix_market(a: &RealMatrix) -> String {
    let n = a.n();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, a.get(i, j)))
        .filter(|(_, _, v)| *v != 0.0)
        .collect();
    let mut out = String::new();
    writeln!(out, "{MM_HEADER}").unwrap();
    writeln!(out, "{n} {n} {}", entries.len()).unwrap();
    for (i, j, v) in entries {
        writeln!(out, "{} {} {v:?}", i + 1, j + 1).unwrap();
    }
    out
}

/// Parses a Matrix Market coordinate file. Supports `real`/`integer` values and
/// `general`/`symmetric`/`skew-symmetric` storage.
pub fn parse_matrix_market(text: &str) -> Result<RealMatrix> {
    let bad = |reason: String| Error::load("Matrix Market data", reason);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(bad(format!("unrecognized header `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(bad(format!("only coordinate format is supported, got `{}`", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(bad(format!("only real matrices are supported, got `{}`", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => 0,
        "symmetric" => 1,
        "skew-symmetric" => -1,
        other => return Err(bad(format!("unsupported symmetry `{other}`"))),
    };
    let mut body = lines.filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let size = body.next().ok_or_else(|| bad("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| bad(format!("bad size line `{size}`: {e}"))))
        .collect::<Result<_>>()?;
    if dims.len() != 3 || dims[0] != dims[1] {
        return Err(bad(format!("expected a square `rows cols nnz` line, got `{size}`")));
    }
    let (n, nnz) = (dims[0], dims[2]);
    let mut data = vec![0.0; n * n];
    let mut seen = 0;
    for line in body {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(bad(format!("bad entry line `{line}`")));
        }
        let i: usize = parts[0].parse().map_err(|e| bad(format!("bad row index in `{line}`: {e}")))?;
        let j: usize = parts[1].parse().map_err(|e| bad(format!("bad column index in `{line}`: {e}")))?;
        let v: f64 = parts[2].parse().map_err(|e| bad(format!("bad value in `{line}`: {e}")))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(bad(format!("entry ({i}, {j}) out of range for n = {n}")));
        }
        data[(i - 1) * n + (j - 1)] = v;
        if symmetry != 0 && i != j {
            data[(j - 1) * n + (i - 1)] = symmetry as f64 * v;
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(bad(format!("header declares {nnz} entries, found {seen}")));
    }
    RealMatrix::new(n, data)
}

/// Dense CSV: `n` rows of `n` comma-separated values, no header.
pub fn to_dense_csv(a: &RealMatrix) -> String {
    let n = a.n();
    let mut out = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:?}", a.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_dense_csv(text: &str) -> Result<RealMatrix> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(r, l)| {
            l.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::load("dense CSV matrix", format!("row {}: {e}", r + 1)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(Error::load(
            "dense CSV matrix",
            format!("row {} has {} values, expected {n}", r + 1, row.len()),
        ));
    }
    RealMatrix::new(n, rows.into_iter().flatten().collect())
}

/// Reads a matrix, choosing the format from the extension (`.mtx` or `.csv`).
pub fn read_matrix(path: &Path) -> Result<RealMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => parse_dense_csv(&text),
        _ => parse_matrix_market(&text),
    }
    .map_err(|e| match e {
        Error::Load { what, reason } => Error::Load { what: format!("{what} from {}", path.display()), reason },
        other => other,
    })
}

pub fn write_matrix(path: &Path, a: &RealMatrix) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => to_dense_csv(a),
        _ => to_matrix_market(a),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `x,y,log10_smin` rows in row-major grid order; unevaluated points are `nan`.
pub fn field_to_csv(field: &SigmaField) -> String {
    let g = field.grid();
    let mut out = String::from("x,y,log10_smin\n");
    for i in 0..g.ny {
        for j in 0..g.nx {
            let z = g.point(i, j);
            match field.get(i, j) {
                Some(s) => writeln!(out, "{:?},{:?},{:?}", z.re, z.im, s.log10()).unwrap(),
                None => writeln!(out, "{:?},{:?},nan", z.re, z.im).unwrap(),
            }
        }
    }
    out
}

/// `x,y,flag` rows in row-major grid order.
pub fn mask_to_csv(mask: &BinaryMask, grid: &crate::linalg::ComplexGrid) -> String {
    let mut out = String::from("x,y,flag\n");
    for i in 0..grid.ny {
        for j in 0..grid.nx {
            let z = grid.point(i, j);
            writeln!(out, "{:?},{:?},{}", z.re, z.im, u8::from(mask.get(i, j))).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexGrid;

    #[test]
    fn matrix_market_roundtrip() {
        let a = RealMatrix::from_fn(4, |i, j| if i.abs_diff(j) <= 1 { (i as f64) - (j as f64) * 0.5 } else { 0.0 })
            .unwrap();
        let text = to_matrix_market(&a);
        assert!(text.starts_with(MM_HEADER));
        assert_eq!(parse_matrix_market(&text).unwrap(), a);
    }

    #[test]
    fn matrix_market_symmetric_storage() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 3\n2 1 -1\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.as_slice(), &[3.0, -1.0, -1.0, 0.0]);
    }

    #[test]
    fn matrix_market_errors() {
        assert!(parse_matrix_market("").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n").is_err());
        assert!(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").is_err());
    }

    #[test]
    fn dense_csv_roundtrip_and_errors() {
        let a = RealMatrix::from_fn(3, |i, j| (i * 3 + j) as f64 - 4.0).unwrap();
        assert_eq!(parse_dense_csv(&to_dense_csv(&a)).unwrap(), a);
        assert!(parse_dense_csv("1,2\n3\n").is_err());
        assert!(parse_dense_csv("1,x\n3,4\n").is_err());
    }

    #[test]
    fn field_export_layout() {
        let g = ComplexGrid::new(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        let f = SigmaField::new(g, vec![Some(1.0), None, Some(0.01), Some(10.0)]).unwrap();
        let text = field_to_csv(&f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,log10_smin");
        assert_eq!(lines[1], "0.0,0.0,0.0");
        assert_eq!(lines[2], "1.0,0.0,nan");
        assert_eq!(lines[3], "0.0,1.0,-2.0");
        assert_eq!(lines.len(), 5);

        let mut m = BinaryMask::for_grid(&g);
        m.set(1, 0, true);
        let text = mask_to_csv(&m, &g);
        assert_eq!(text, "x,y,flag\n0.0,0.0,0\n1.0,0.0,0\n0.0,1.0,1\n1.0,1.0,0\n");
    }
}
