//! Plain-text graph and vector files.
//!
//! Graph file: a header line `n m`, then `m` lines `tail head` with 0-based
//! vertex ids. Vector file: one real per line. Blank lines and lines starting
//! with `#` are ignored in both.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cyclelap::Graph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Graph {
        path: PathBuf,
        #[source]
        source: cyclelap::Error,
    },
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> InputError {
    InputError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_usize_pair(
    path: &Path,
    line: usize,
    text: &str,
    what: &str,
) -> Result<(usize, usize), InputError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_error(
            path,
            line,
            format!("expected '{what}', found '{text}'"),
        ));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_error(path, line, format!("'{s}' is not a non-negative integer")))
    };
    Ok((parse(fields[0])?, parse(fields[1])?))
}

/// Parse a graph file body; `path` is only used in error messages.
pub fn parse_graph(text: &str, path: &Path) -> Result<Graph, InputError> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "missing 'n m' header"))?;
    let (n, m) = parse_usize_pair(path, line, header, "n m")?;
    let mut edges = Vec::with_capacity(m);
    let mut last_line = line;
    for (line, text) in lines {
        if edges.len() == m {
            return Err(parse_error(
                path,
                line,
                format!("more than the declared {m} edges"),
            ));
        }
        edges.push(parse_usize_pair(path, line, text, "tail head")?);
        last_line = line;
    }
    if edges.len() != m {
        return Err(parse_error(
            path,
            last_line,
            format!("declared {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges).map_err(|source| InputError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_graph(path: &Path) -> Result<Graph, InputError> {
    parse_graph(&read(path)?, path)
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for &(tail, head) in g.edges() {
        let _ = writeln!(out, "{tail} {head}");
    }
    out
}

/// Parse a vector file with exactly `len` entries.
pub fn parse_vector(text: &str, path: &Path, len: usize) -> Result<Vec<f64>, InputError> {
    let mut values = Vec::with_capacity(len);
    let mut last_line = 0;
    for (line, text) in content_lines(text) {
        let value = text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                parse_error(path, line, format!("'{text}' is not a finite real number"))
            })?;
        values.push(value);
        last_line = line;
    }
    if values.len() != len {
        return Err(parse_error(
            path,
            last_line.max(1),
            format!("expected {len} entries, found {}", values.len()),
        ));
    }
    Ok(values)
}

pub fn read_vector(path: &Path, len: usize) -> Result<Vec<f64>, InputError> {
    parse_vector(&read(path)?, path, len)
}

/// One value per line using the shortest round-trip representation.
pub fn format_vector(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), InputError> {
    fs::write(path, contents).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}
