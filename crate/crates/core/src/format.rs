//! Line-oriented text formats for bound quivers and representations.
//!
//! Quiver files:
//!
//! ```text
//! # A3 with one zero relation
//! vertex 1
//! vertex 2
//! vertex 3
//! arrow alpha 2 1
//! arrow beta 3 2
//! rel 1*alpha.beta
//! ```
//!
//! Relation terms are `coeff*arrow.arrow...` separated by ` + ` or ` - `; the
//! coefficient may be omitted and defaults to 1. Paths are written leftmost
//! arrow last applied, as in `alpha.beta` = beta then alpha.
//!
//! Representation files:
//!
//! ```text
//! dim 1 1
//! dim 2 1
//! mat alpha 1 1 : 1
//! mat beta 1 1 : 0
//! ```
//!
//! Vertices without a `dim` line get dimension 0. Every arrow with a
//! non-empty matrix needs a `mat` line; empty ones may be omitted.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quiver::{BoundQuiver, DimVector, Path, Quiver, Relation};
use crate::rep::Representation;
use crate::scalar::Scalar;

fn perr(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-')
        && !name.starts_with('-')
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_term<F: Scalar>(q: &Quiver, token: &str, sign: bool, line: usize) -> Result<(F, Path)> {
    let (coeff, path) = match token.split_once('*') {
        Some((c, p)) => (
            F::parse_exact(c).ok_or_else(|| perr(line, format!("bad coefficient `{c}`")))?,
            p,
        ),
        None => match token.strip_prefix('-') {
            Some(p) => (-F::one(), p),
            None => (F::one(), token.strip_prefix('+').unwrap_or(token)),
        },
    };
    let names: Vec<&str> = path.split('.').collect();
    if names.iter().any(|n| n.is_empty()) {
        return Err(perr(line, format!("bad path `{path}`")));
    }
    let path = Path::from_names(q, &names).map_err(|e| perr(line, e.to_string()))?;
    Ok((if sign { -coeff } else { coeff }, path))
}

fn parse_relation<F: Scalar>(q: &Quiver, body: &str, line: usize) -> Result<Relation<F>> {
    let mut terms = Vec::new();
    let mut negate = false;
    let mut expect_term = true;
    for token in body.split_whitespace() {
        if expect_term {
            if token == "+" || token == "-" {
                if !terms.is_empty() {
                    return Err(perr(line, "two signs in a row"));
                }
                negate = token == "-";
                continue;
            }
            terms.push(parse_term::<F>(q, token, negate, line)?);
            expect_term = false;
        } else {
            match token {
                "+" => negate = false,
                "-" => negate = true,
                other => return Err(perr(line, format!("expected `+` or `-`, found `{other}`"))),
            }
            expect_term = true;
        }
    }
    if expect_term {
        return Err(perr(line, "relation ends without a term"));
    }
    Relation::new(terms).map_err(|e| perr(line, e.to_string()))
}

/// Parses a quiver file. Errors carry the offending line number.
pub fn parse_quiver<F: Scalar>(text: &str) -> Result<BoundQuiver<F>> {
    let mut q = Quiver::new(Vec::<&str>::new(), Vec::<(&str, &str, &str)>::new())?;
    let mut rel_lines = Vec::new();
    for (line, content) in content_lines(text) {
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let args: Vec<&str> = rest.split_whitespace().collect();
        match keyword {
            "vertex" => {
                let [name] = args[..] else {
                    return Err(perr(line, "expected `vertex <name>`"));
                };
                if !valid_name(name) {
                    return Err(perr(line, format!("invalid name `{name}`")));
                }
                q.push_vertex(name).map_err(|e| perr(line, e.to_string()))?;
            }
            "arrow" => {
                let [name, source, target] = args[..] else {
                    return Err(perr(line, "expected `arrow <name> <source> <target>`"));
                };
                if !valid_name(name) {
                    return Err(perr(line, format!("invalid name `{name}`")));
                }
                q.push_arrow(name, source, target)
                    .map_err(|e| perr(line, e.to_string()))?;
            }
            "rel" => rel_lines.push((line, rest.trim())),
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }
    let relations = rel_lines
        .into_iter()
        .map(|(line, body)| parse_relation(&q, body, line))
        .collect::<Result<Vec<_>>>()?;
    BoundQuiver::new(Arc::new(q), relations)
}

/// Canonical text: vertices, arrows, then relations, each in declaration
/// order, coefficients reduced.
pub fn serialize_quiver<F: Scalar>(bq: &BoundQuiver<F>) -> String {
    let q = bq.quiver();
    let mut out = String::new();
    for v in q.vertices() {
        let _ = writeln!(out, "vertex {v}");
    }
    for a in q.arrows() {
        let _ = writeln!(out, "arrow {} {} {}", a.name, q.vertex_name(a.source), q.vertex_name(a.target));
    }
    for rel in bq.relations() {
        out.push_str("rel ");
        for (i, (c, p)) in rel.terms().iter().enumerate() {
            let negative = *c < F::zero();
            let shown = if i > 0 && negative { -c.clone() } else { c.clone() };
            if i > 0 {
                out.push_str(if negative { " - " } else { " + " });
            }
            let _ = write!(out, "{}*{}", shown, p.display(q));
        }
        out.push('\n');
    }
    out
}

/// Parses a representation file against `quiver`.
pub fn parse_rep<F: Scalar>(quiver: &Arc<Quiver>, text: &str) -> Result<Representation<F>> {
    let n = quiver.vertex_count();
    let mut dims: Vec<Option<usize>> = vec![None; n];
    let mut mats: Vec<Option<(usize, Matrix<F>)>> = vec![None; quiver.arrow_count()];
    for (line, content) in content_lines(text) {
        let (head, entries) = match content.split_once(':') {
            Some((h, e)) => (h, Some(e)),
            None => (content, None),
        };
        let args: Vec<&str> = head.split_whitespace().collect();
        match args.first().copied() {
            Some("dim") => {
                let (["dim", name, value], None) = (&args[..], entries) else {
                    return Err(perr(line, "expected `dim <vertex> <n>`"));
                };
                let v = quiver.vertex(name).map_err(|e| perr(line, e.to_string()))?;
                let value: usize = value
                    .parse()
                    .map_err(|_| perr(line, format!("bad dimension `{value}`")))?;
                if dims[v].replace(value).is_some() {
                    return Err(perr(line, format!("second `dim` for vertex `{name}`")));
                }
            }
            Some("mat") => {
                let (["mat", name, rows, cols], Some(entries)) = (&args[..], entries) else {
                    return Err(perr(line, "expected `mat <arrow> <rows> <cols> : <entries>`"));
                };
                let a = quiver.arrow_id(name).map_err(|e| perr(line, e.to_string()))?;
                let parse_size = |s: &str| s.parse::<usize>().map_err(|_| perr(line, format!("bad size `{s}`")));
                let (rows, cols) = (parse_size(rows)?, parse_size(cols)?);
                let data = entries
                    .split_whitespace()
                    .map(|t| F::parse_exact(t).ok_or_else(|| perr(line, format!("bad entry `{t}`"))))
                    .collect::<Result<Vec<F>>>()?;
                if data.len() != rows * cols {
                    return Err(perr(
                        line,
                        format!("{rows}x{cols} matrix needs {} entries, got {}", rows * cols, data.len()),
                    ));
                }
                if mats[a].replace((line, Matrix::from_vec(rows, cols, data))).is_some() {
                    return Err(perr(line, format!("second `mat` for arrow `{name}`")));
                }
            }
            _ => return Err(perr(line, "expected `dim` or `mat`")),
        }
    }
    let dim = DimVector::new(dims.into_iter().map(|d| d.unwrap_or(0)).collect());
    let mut matrices = Vec::with_capacity(quiver.arrow_count());
    for (a, slot) in mats.into_iter().enumerate() {
        let arrow = quiver.arrow(a);
        let shape = (dim.get(arrow.target), dim.get(arrow.source));
        match slot {
            Some((line, m)) => {
                if m.shape() != shape {
                    return Err(perr(
                        line,
                        format!(
                            "arrow `{}` needs a {}x{} matrix, got {}x{}",
                            arrow.name, shape.0, shape.1, m.rows(), m.cols()
                        ),
                    ));
                }
                matrices.push(m);
            }
            None if shape.0 * shape.1 == 0 => matrices.push(Matrix::zeros(shape.0, shape.1)),
            None => {
                return Err(perr(
                    text.lines().count().max(1),
                    format!("missing `mat` line for arrow `{}`", arrow.name),
                ))
            }
        }
    }
    Representation::new(quiver.clone(), dim, matrices)
}

/// Canonical text: every `dim`, then every `mat`, in declaration order.
pub fn serialize_rep<F: Scalar>(m: &Representation<F>) -> String {
    let q = m.quiver();
    let mut out = String::new();
    for (v, name) in q.vertices().iter().enumerate() {
        let _ = writeln!(out, "dim {name} {}", m.dim().get(v));
    }
    for (a, arrow) in q.arrows().iter().enumerate() {
        let mat = m.matrix(a);
        let _ = write!(out, "mat {} {} {} :", arrow.name, mat.rows(), mat.cols());
        for x in mat.as_slice() {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    out
}

/// Parses `name=value,...` naming every vertex exactly once.
pub fn parse_dimvec(q: &Quiver, text: &str) -> Result<DimVector> {
    let mut entries = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| perr(1, format!("expected `name=value`, found `{part}`")))?;
        let value: usize = value
            .trim()
            .parse()
            .map_err(|_| perr(1, format!("bad dimension `{}`", value.trim())))?;
        entries.push((name.trim(), value));
    }
    DimVector::from_named(q, &entries)
}
