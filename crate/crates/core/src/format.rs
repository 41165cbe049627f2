//! Plain-text graph files and field CSVs.
//!
//! Graph files are line based:
//!
//! ```text
//! format 1
//! vertices 4
//! edge 0 1
//! boundary 0
//! f 1 0.5
//! g 0 0
//! root 0
//! label 1 a
//! ```
//!
//! `#` starts a comment. Interior vertices are all vertices not listed as boundary or root.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::graph::{BoundaryPartition, Graph};

pub const FORMAT_VERSION: u32 = 1;

/// `x` with 12 significant digits, shortest form.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.into() }
    } else {
        s.into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub graph: Graph,
    pub boundary: Vec<usize>,
    pub roots: Vec<usize>,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl GraphFile {
    /// Boundary = listed boundary and root vertices; interior = everything else.
    pub fn partition(&self) -> Result<BoundaryPartition> {
        let mut boundary = self.boundary.clone();
        boundary.extend(&self.roots);
        boundary.sort_unstable();
        boundary.dedup();
        let n = self.graph.vertex_count();
        let interior: Vec<usize> = (0..n).filter(|v| boundary.binary_search(v).is_err()).collect();
        BoundaryPartition::new(&self.graph, &interior, &boundary)
    }

    /// `f` on the interior, missing entries read as zero.
    pub fn f_or_zero(&self, p: &BoundaryPartition) -> Result<ScalarField> {
        let mut f = self.f.clone();
        for &x in p.interior() {
            if !f.is_defined(x) {
                f.set(x, 0.0)?;
            }
        }
        Ok(f)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut boundary = Vec::new();
    let mut roots = Vec::new();
    let mut fvals = Vec::new();
    let mut gvals = Vec::new();
    let mut labels: Vec<(usize, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| parse_err(line_no, "missing vertex id"))?
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad integer `{}`", parts[i])))
        };
        let real = |i: usize| -> Result<f64> {
            let s = parts.get(i).ok_or_else(|| parse_err(line_no, "missing value"))?;
            let v: f64 = s.parse().map_err(|_| parse_err(line_no, format!("bad number `{s}`")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value `{s}`")));
            }
            Ok(v)
        };
        let arity = |want: usize| -> Result<()> {
            if parts.len() != want {
                return Err(parse_err(line_no, format!("`{}` takes {} fields", parts[0], want - 1)));
            }
            Ok(())
        };
        match parts[0] {
            "format" => {
                arity(2)?;
                if int(1)? as u32 != FORMAT_VERSION {
                    return Err(parse_err(line_no, format!("unsupported format `{}`", parts[1])));
                }
            }
            "vertices" => {
                arity(2)?;
                if n.is_some() {
                    return Err(parse_err(line_no, "duplicate `vertices` line"));
                }
                n = Some(int(1)?);
            }
            "edge" => {
                arity(3)?;
                edges.push((int(1)?, int(2)?, line_no));
            }
            "boundary" => {
                arity(2)?;
                boundary.push((int(1)?, line_no));
            }
            "root" => {
                arity(2)?;
                roots.push((int(1)?, line_no));
            }
            "f" => {
                arity(3)?;
                fvals.push((int(1)?, real(2)?, line_no));
            }
            "g" => {
                arity(3)?;
                gvals.push((int(1)?, real(2)?, line_no));
            }
            "label" => {
                arity(3)?;
                labels.push((int(1)?, parts[2].to_string()));
            }
            other => return Err(parse_err(line_no, format!("unknown directive `{other}`"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing `vertices N` header"))?;
    let check = |v: usize, line: usize| -> Result<usize> {
        if v >= n {
            Err(parse_err(line, format!("vertex {v} out of range for {n} vertices")))
        } else {
            Ok(v)
        }
    };
    let mut edge_list = Vec::with_capacity(edges.len());
    for (a, b, line) in edges {
        if a == b {
            return Err(parse_err(line, format!("self-loop at {a}")));
        }
        edge_list.push((check(a, line)?, check(b, line)?));
    }
    let mut graph = Graph::from_edges(n, edge_list)?;
    if !labels.is_empty() {
        let mut names: Vec<String> = (0..n).map(|v| v.to_string()).collect();
        for (v, name) in labels {
            names[check(v, 0)?] = name;
        }
        graph = graph.with_labels(names)?;
    }
    let boundary = boundary
        .into_iter()
        .map(|(v, l)| check(v, l))
        .collect::<Result<Vec<_>>>()?;
    let roots = roots.into_iter().map(|(v, l)| check(v, l)).collect::<Result<Vec<_>>>()?;
    let mut f = ScalarField::undefined(n);
    for (v, x, l) in fvals {
        f.set(check(v, l)?, x)?;
    }
    let mut g = ScalarField::undefined(n);
    for (v, x, l) in gvals {
        g.set(check(v, l)?, x)?;
    }
    Ok(GraphFile {
        graph,
        boundary,
        roots,
        f,
        g,
    })
}

/// Writes the problem restricted to `U ∪ δU`, renumbered densely in id order.
pub fn write_graph(
    graph: &Graph,
    p: &BoundaryPartition,
    f: Option<&ScalarField>,
    g: Option<&ScalarField>,
    roots: Option<&[usize]>,
) -> String {
    let universe = p.universe();
    let mut local = vec![usize::MAX; graph.vertex_count()];
    for (i, &v) in universe.iter().enumerate() {
        local[v] = i;
    }
    let mut out = String::new();
    let _ = writeln!(out, "format {FORMAT_VERSION}");
    let _ = writeln!(out, "vertices {}", universe.len());
    for (a, b) in graph.edges() {
        if local[a] != usize::MAX && local[b] != usize::MAX {
            let _ = writeln!(out, "edge {} {}", local[a], local[b]);
        }
    }
    let roots = roots.unwrap_or(&[]);
    for &v in p.boundary() {
        if !roots.contains(&v) {
            let _ = writeln!(out, "boundary {}", local[v]);
        }
    }
    for &v in roots {
        let _ = writeln!(out, "root {}", local[v]);
    }
    if let Some(f) = f {
        for &x in p.interior() {
            if let Some(val) = f.get(x) {
                let _ = writeln!(out, "f {} {}", local[x], fmt_num(val));
            }
        }
    }
    if let Some(g) = g {
        for &y in p.boundary() {
            if let Some(val) = g.get(y) {
                let _ = writeln!(out, "g {} {}", local[y], fmt_num(val));
            }
        }
    }
    if let Some(labels) = graph.labels() {
        for &v in &universe {
            if labels[v].split_whitespace().count() == 1 && !labels[v].contains('#') {
                let _ = writeln!(out, "label {} {}", local[v], labels[v]);
            }
        }
    }
    out
}

/// CSV `vertex,depth,value` over the field's domain; depth is empty outside the partition.
pub fn write_field(p: Option<&BoundaryPartition>, u: &ScalarField) -> String {
    let mut out = String::from("# format: 1\nvertex,depth,value\n");
    for (v, x) in u.iter() {
        let depth = p.and_then(|p| p.depth(v)).map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{v},{depth},{}", fmt_num(x));
    }
    out
}

/// Reads a field CSV written by [`write_field`] for a graph with `n` vertices.
pub fn parse_field(text: &str, n: usize) -> Result<ScalarField> {
    let mut u = ScalarField::undefined(n);
    let mut header_seen = false;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            if line.starts_with("vertex") {
                continue;
            }
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(parse_err(line_no, "expected `vertex,depth,value`"));
        }
        let v: usize = cols[0].parse().map_err(|_| parse_err(line_no, format!("bad vertex `{}`", cols[0])))?;
        let x: f64 = cols[2].parse().map_err(|_| parse_err(line_no, format!("bad value `{}`", cols[2])))?;
        if v >= n {
            return Err(parse_err(line_no, format!("vertex {v} out of range for {n} vertices")));
        }
        if !x.is_finite() {
            return Err(parse_err(line_no, format!("non-finite value `{}`", cols[2])));
        }
        u.set(v, x)?;
    }
    Ok(u)
}
