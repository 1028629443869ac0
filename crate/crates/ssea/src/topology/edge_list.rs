//! Edge-list file format: UTF-8 text, a `# nodes=<n>` header line, then one
//! `<u> <v>` line per edge with u < v. A weighted variant appends a third
//! decimal column.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_err(line: usize, message: impl Into<String>) -> EdgeListError {
    EdgeListError::Parse {
        line,
        message: message.into(),
    }
}

pub fn write_edge_list<W: Write>(g: &Graph, out: &mut W) -> Result<(), EdgeListError> {
    writeln!(out, "# nodes={}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Weighted variant; `weights` must align with the order of `g.edges()`.
pub fn write_edge_list_weighted<W: Write>(
    g: &Graph,
    weights: &[f64],
    out: &mut W,
) -> Result<(), EdgeListError> {
    assert_eq!(weights.len() as u64, g.n_links(), "one weight per edge");
    writeln!(out, "# nodes={}", g.n())?;
    for ((u, v), w) in g.edges().zip(weights) {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}

pub fn save_edge_list<P: AsRef<Path>>(g: &Graph, path: P) -> Result<(), EdgeListError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edge_list(g, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn save_edge_list_weighted<P: AsRef<Path>>(
    g: &Graph,
    weights: &[f64],
    path: P,
) -> Result<(), EdgeListError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edge_list_weighted(g, weights, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Parse an edge list, returning the graph and the per-edge weights when the
/// weighted variant is present (all lines must agree on the column count).
pub fn read_edge_list<R: BufRead>(input: R) -> Result<(Graph, Option<Vec<f64>>), EdgeListError> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected `# nodes=<n>` header"))?;
    let header = header?;
    let n: usize = header
        .strip_prefix("# nodes=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| parse_err(1, format!("bad header {header:?}, expected `# nodes=<n>`")))?;
    if n < 2 {
        return Err(parse_err(1, format!("node count must be at least 2, got {n}")));
    }

    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    let mut weighted: Option<bool> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected `<u> <v>` or `<u> <v> <w>`, got {line:?}"),
            ));
        }
        let has_weight = fields.len() == 3;
        match weighted {
            None => weighted = Some(has_weight),
            Some(w) if w != has_weight => {
                return Err(parse_err(line_no, "mixed weighted and unweighted lines"))
            }
            _ => {}
        }
        let u: u32 = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad node index {:?}", fields[0])))?;
        let v: u32 = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad node index {:?}", fields[1])))?;
        if u == v {
            return Err(parse_err(line_no, format!("self-loop at node {u}")));
        }
        if u > v {
            return Err(parse_err(line_no, format!("endpoints must satisfy u < v, got {u} {v}")));
        }
        if v as usize >= n {
            return Err(parse_err(
                line_no,
                format!("node index {v} out of range for {n} nodes"),
            ));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(line_no, format!("duplicate edge ({u}, {v})")));
        }
        if has_weight {
            let w: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad weight {:?}", fields[2])))?;
            if !w.is_finite() {
                return Err(parse_err(line_no, format!("weight must be finite, got {w}")));
            }
            weights.push(w);
        }
        edges.push((u, v));
    }
    let g = Graph::from_edges(n, &edges)?;
    Ok((g, weighted.unwrap_or(false).then_some(weights)))
}

pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<Graph, EdgeListError> {
    let (g, _) = read_edge_list(BufReader::new(File::open(path)?))?;
    Ok(g)
}

pub fn load_edge_list_weighted<P: AsRef<Path>>(
    path: P,
) -> Result<(Graph, Option<Vec<f64>>), EdgeListError> {
    read_edge_list(BufReader::new(File::open(path)?))
}
