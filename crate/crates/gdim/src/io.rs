//! Readers and writers for the two on-disk graph formats.
//!
//! Edge lists are whitespace-separated `i j [w]` lines with 0-based indices,
//! an optional weight defaulting to 1, and full-line `#` comments. A
//! symmetric read mirrors single-sided entries, so files that list each
//! undirected edge once and files that list both orientations are equally
//! valid.
//!
//! Matrix Market support covers the coordinate syntax with `pattern`,
//! `integer`, or `real` fields and `general` or `symmetric` storage. Indices
//! are 1-based on disk and converted on the way in and out.

use std::fmt::Write as _;
use std::path::Path;

use crate::graph::SparseGraph;
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses edge-list text. `symmetric` selects the mirrored interpretation.
pub fn read_edge_list_str(text: &str, symmetric: bool) -> Result<SparseGraph> {
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_node: Option<usize> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let i: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|_| parse_err(lineno + 1, "bad source index"))?;
        let j: usize = fields
            .next()
            .ok_or_else(|| parse_err(lineno + 1, "missing target index"))?
            .parse()
            .map_err(|_| parse_err(lineno + 1, "bad target index"))?;
        let w: f64 = match fields.next() {
            None => 1.0,
            Some(s) => s
                .parse()
                .map_err(|_| parse_err(lineno + 1, "bad edge weight"))?,
        };
        if fields.next().is_some() {
            return Err(parse_err(lineno + 1, "expected at most 3 fields"));
        }
        max_node = Some(max_node.unwrap_or(0).max(i).max(j));
        triples.push((i, j, w));
    }
    let n = max_node.map_or(0, |m| m + 1);
    SparseGraph::from_edge_list(n, n, &triples, symmetric)
}

pub fn read_edge_list(path: &Path, symmetric: bool) -> Result<SparseGraph> {
    read_edge_list_str(&std::fs::read_to_string(path)?, symmetric)
}

/// Renders a graph as edge-list text. Symmetric graphs emit each undirected
/// edge once (upper triangle); others emit every stored entry.
pub fn write_edge_list_str(g: &SparseGraph) -> String {
    let mut out = String::new();
    for (i, j, w) in g.entries() {
        if g.is_symmetric() && j < i {
            continue;
        }
        if w == w.trunc() && w.abs() < 1e15 {
            writeln!(out, "{} {} {}", i, j, w as i64).unwrap();
        } else {
            writeln!(out, "{} {} {}", i, j, w).unwrap();
        }
    }
    out
}

pub fn write_edge_list(path: &Path, g: &SparseGraph) -> Result<()> {
    std::fs::write(path, write_edge_list_str(g))?;
    Ok(())
}

/// Parses Matrix Market coordinate text.
pub fn read_matrix_market_str(text: &str) -> Result<SparseGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty Matrix Market file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix ...' header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, "only the coordinate format is supported"));
    }
    let field = tokens[3].as_str();
    if !matches!(field, "pattern" | "integer" | "real") {
        return Err(parse_err(
            1,
            format!("unsupported field type '{field}'"),
        ));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(1, format!("unsupported symmetry '{other}'")));
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if size.is_none() {
            if fields.len() != 3 {
                return Err(parse_err(lineno + 1, "expected 'rows cols nnz'"));
            }
            let r = fields[0]
                .parse()
                .map_err(|_| parse_err(lineno + 1, "bad row count"))?;
            let c = fields[1]
                .parse()
                .map_err(|_| parse_err(lineno + 1, "bad column count"))?;
            let nnz = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno + 1, "bad entry count"))?;
            size = Some((r, c, nnz));
            continue;
        }
        let expected = if field == "pattern" { 2 } else { 3 };
        if fields.len() != expected {
            return Err(parse_err(
                lineno + 1,
                format!("expected {expected} fields per entry"),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno + 1, "bad row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno + 1, "bad column index"))?;
        if i == 0 || j == 0 {
            return Err(parse_err(lineno + 1, "Matrix Market indices are 1-based"));
        }
        let w: f64 = if field == "pattern" {
            1.0
        } else {
            fields[2]
                .parse()
                .map_err(|_| parse_err(lineno + 1, "bad entry value"))?
        };
        triples.push((i - 1, j - 1, w));
    }
    let (r, c, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if triples.len() != nnz {
        return Err(parse_err(
            1,
            format!("size line promises {} entries, found {}", nnz, triples.len()),
        ));
    }
    SparseGraph::from_edge_list(r, c, &triples, symmetric)
}

pub fn read_matrix_market(path: &Path) -> Result<SparseGraph> {
    read_matrix_market_str(&std::fs::read_to_string(path)?)
}

/// Renders a graph in Matrix Market coordinate format. Symmetric graphs use
/// symmetric storage of the lower triangle; the field type is `integer` when
/// every weight is integral and `real` otherwise.
pub fn write_matrix_market_str(g: &SparseGraph) -> String {
    let integral = g
        .entries()
        .all(|(_, _, w)| w == w.trunc() && w.abs() < 1e15);
    let field = if integral { "integer" } else { "real" };
    let symmetry = if g.is_symmetric() { "symmetric" } else { "general" };
    let kept: Vec<(usize, usize, f64)> = g
        .entries()
        .filter(|&(i, j, _)| !g.is_symmetric() || j <= i)
        .collect();
    let mut out = String::new();
    writeln!(out, "%%MatrixMarket matrix coordinate {field} {symmetry}").unwrap();
    writeln!(out, "{} {} {}", g.n_rows(), g.n_cols(), kept.len()).unwrap();
    for (i, j, w) in kept {
        if integral {
            writeln!(out, "{} {} {}", i + 1, j + 1, w as i64).unwrap();
        } else {
            writeln!(out, "{} {} {}", i + 1, j + 1, w).unwrap();
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, g: &SparseGraph) -> Result<()> {
    std::fs::write(path, write_matrix_market_str(g))?;
    Ok(())
}
