//! Text formats: edge-list graphs (single or concatenated), colouring files.
//!
//! Graph records look like
//!
//! ```text
//! # optional comments
//! n m
//! u v        (m lines, 0-based, u < v)
//! ```
//!
//! and a stream file is any number of records back to back. Colouring files
//! hold one `edge-id colour` pair per line. Blank lines and `#` comments are
//! skipped everywhere; every rejection carries the 1-based line number.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::graph::{Graph, GraphError, DEFAULT_EDGE_CAP};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IoError {
    fn format(line: usize, message: impl Into<String>) -> IoError {
        IoError::Format {
            line,
            message: message.into(),
        }
    }
}

/// Lines that carry data: (1-based number, trimmed text).
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn two_fields(line: usize, text: &str, what: &str) -> Result<(u64, u64), IoError> {
    let mut parts = text.split_whitespace();
    let a = parts.next();
    let b = parts.next();
    let rest = parts.next();
    match (a, b, rest) {
        (Some(a), Some(b), None) => {
            let a = a
                .parse::<u64>()
                .map_err(|_| IoError::format(line, format!("{what}: `{a}` is not a number")))?;
            let b = b
                .parse::<u64>()
                .map_err(|_| IoError::format(line, format!("{what}: `{b}` is not a number")))?;
            Ok((a, b))
        }
        _ => Err(IoError::format(
            line,
            format!("{what}: expected exactly two fields, got `{text}`"),
        )),
    }
}

/// Reads one graph record from the iterator; `None` at clean end of input.
fn parse_record<'a, I>(lines: &mut I, cap: usize) -> Result<Option<(usize, Graph)>, IoError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (header_line, header) = match lines.next() {
        Some(l) => l,
        None => return Ok(None),
    };
    let (n, m) = two_fields(header_line, header, "header `n m`")?;
    if n > u64::from(u32::MAX) {
        return Err(IoError::format(header_line, format!("order {n} too large")));
    }
    if m as usize > cap {
        return Err(IoError::format(
            header_line,
            format!("edge count {m} exceeds the cap of {cap}"),
        ));
    }
    let n = n as u32;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m as usize);
    let mut seen = std::collections::HashSet::new();
    for k in 0..m {
        let (line, text) = lines.next().ok_or_else(|| {
            IoError::format(
                header_line,
                format!("record declares {m} edges but input ends after {k}"),
            )
        })?;
        let (u, v) = two_fields(line, text, "edge `u v`")?;
        if u == v {
            return Err(IoError::format(line, format!("self-loop at vertex {u}")));
        }
        if u > v {
            return Err(IoError::format(
                line,
                format!("edge `{u} {v}` must list the smaller endpoint first"),
            ));
        }
        if v >= u64::from(n) {
            return Err(IoError::format(
                line,
                format!("vertex {v} out of range for order {n}"),
            ));
        }
        if !seen.insert((u, v)) {
            return Err(IoError::format(line, format!("duplicate edge `{u} {v}`")));
        }
        edges.push((u as u32, v as u32));
    }
    let graph = Graph::from_edges_with_n(n, &edges).map_err(|e| match e {
        GraphError::EmptyGraph => IoError::format(header_line, "record describes an empty graph"),
        other => IoError::format(header_line, other.to_string()),
    })?;
    Ok(Some((header_line, graph)))
}

/// Parses exactly one graph; trailing records are rejected.
pub fn parse_graph(text: &str) -> Result<Graph, IoError> {
    parse_graph_capped(text, DEFAULT_EDGE_CAP)
}

pub fn parse_graph_capped(text: &str, cap: usize) -> Result<Graph, IoError> {
    let mut lines = data_lines(text);
    let (_, graph) = parse_record(&mut lines, cap)?
        .ok_or_else(|| IoError::format(1, "input holds no graph record"))?;
    if let Some((line, _)) = lines.next() {
        return Err(IoError::format(
            line,
            "unexpected content after the declared edges",
        ));
    }
    Ok(graph)
}

/// Parses every record until end of input (possibly none).
pub fn parse_graph_stream(text: &str) -> Result<Vec<Graph>, IoError> {
    let mut lines = data_lines(text);
    let mut out = Vec::new();
    while let Some((_, graph)) = parse_record(&mut lines, DEFAULT_EDGE_CAP)? {
        out.push(graph);
    }
    Ok(out)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph, IoError> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn read_graph_stream(path: impl AsRef<Path>) -> Result<Vec<Graph>, IoError> {
    parse_graph_stream(&fs::read_to_string(path)?)
}

pub fn format_graph(graph: &Graph) -> String {
    let mut out = format!("{} {}\n", graph.n(), graph.m());
    for &(u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn write_graph(path: impl AsRef<Path>, graph: &Graph) -> Result<(), IoError> {
    fs::write(path, format_graph(graph))?;
    Ok(())
}

pub fn write_graph_stream(path: impl AsRef<Path>, graphs: &[Graph]) -> Result<(), IoError> {
    let mut out = String::new();
    for g in graphs {
        out.push_str(&format_graph(g));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parses `edge-id colour` lines into a partial colouring over `edge_count`
/// edges; absent ids stay uncoloured.
pub fn parse_colouring(text: &str, edge_count: usize) -> Result<PartialColouring, IoError> {
    let mut colouring = PartialColouring::empty(edge_count);
    for (line, text) in data_lines(text) {
        let (e, c) = two_fields(line, text, "entry `edge-id colour`")?;
        if e as usize >= edge_count {
            return Err(IoError::format(
                line,
                format!("edge id {e} out of range for {edge_count} edges"),
            ));
        }
        if c == 0 {
            return Err(IoError::format(line, "colours are positive integers"));
        }
        if c > u64::from(u32::MAX) {
            return Err(IoError::format(line, format!("colour {c} too large")));
        }
        if colouring.is_coloured(e as u32) {
            return Err(IoError::format(line, format!("edge id {e} repeated")));
        }
        colouring.set(e as u32, c as u32);
    }
    Ok(colouring)
}

pub fn read_colouring(
    path: impl AsRef<Path>,
    edge_count: usize,
) -> Result<PartialColouring, IoError> {
    parse_colouring(&fs::read_to_string(path)?, edge_count)
}

pub fn format_colouring<C: crate::colouring::ColourMap + ?Sized>(colouring: &C) -> String {
    let mut out = String::new();
    for e in 0..colouring.edge_count() as u32 {
        if let Some(c) = colouring.colour(e) {
            out.push_str(&format!("{e} {c}\n"));
        }
    }
    out
}

pub fn write_colouring<C: crate::colouring::ColourMap + ?Sized>(
    path: impl AsRef<Path>,
    colouring: &C,
) -> Result<(), IoError> {
    fs::write(path, format_colouring(colouring))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::ColourMap;
    use crate::graph::{gen_complete, gen_cycle};
    use proptest::prelude::*;

    fn format_error_line(err: IoError) -> usize {
        match err {
            IoError::Format { line, .. } => line,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn parses_triangle_with_comments() {
        let text = "# triangle\n\n3 3\n0 1\n# middle\n0 2\n1 2\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn rejections_carry_line_numbers() {
        // Header not numeric (line 1).
        assert_eq!(format_error_line(parse_graph("x 3\n").unwrap_err()), 1);
        // Self-loop on line 3.
        assert_eq!(
            format_error_line(parse_graph("3 2\n0 1\n2 2\n").unwrap_err()),
            3
        );
        // Endpoint order on line 2.
        assert_eq!(format_error_line(parse_graph("3 1\n1 0\n").unwrap_err()), 2);
        // Out-of-range vertex on line 4.
        assert_eq!(
            format_error_line(parse_graph("3 2\n\n0 1\n0 3\n").unwrap_err()),
            4
        );
        // Duplicate edge on line 3.
        assert_eq!(
            format_error_line(parse_graph("3 2\n0 1\n0 1\n").unwrap_err()),
            3
        );
        // Truncated record reports the header line.
        assert_eq!(format_error_line(parse_graph("4 3\n0 1\n").unwrap_err()), 1);
        // Trailing garbage after a complete record.
        assert_eq!(
            format_error_line(parse_graph("2 1\n0 1\n5 5\n").unwrap_err()),
            3
        );
        // Three fields on an edge line.
        assert_eq!(
            format_error_line(parse_graph("3 1\n0 1 2\n").unwrap_err()),
            2
        );
    }

    #[test]
    fn cap_is_enforced_on_the_header() {
        let err = parse_graph_capped("10 6\n0 1\n", 5).unwrap_err();
        assert_eq!(format_error_line(err), 1);
    }

    #[test]
    fn stream_roundtrip() {
        let graphs = vec![
            gen_cycle(5).unwrap(),
            gen_complete(4).unwrap(),
            gen_cycle(3).unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stream.txt");
        write_graph_stream(&path, &graphs).unwrap();
        let back = read_graph_stream(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in graphs.iter().zip(&back) {
            assert_eq!(a.n(), b.n());
            assert_eq!(a.edges(), b.edges());
        }
        // Empty stream parses to no graphs.
        assert!(parse_graph_stream("# nothing here\n\n").unwrap().is_empty());
    }

    #[test]
    fn colouring_roundtrip_with_gaps() {
        let text = "0 3\n# hole at 1\n2 1\n";
        let c = parse_colouring(text, 3).unwrap();
        assert_eq!(c.colour(0), Some(3));
        assert_eq!(c.colour(1), None);
        assert_eq!(c.colour(2), Some(1));
        assert_eq!(format_colouring(&c), "0 3\n2 1\n");

        assert_eq!(
            format_error_line(parse_colouring("3 1\n", 3).unwrap_err()),
            1
        );
        assert_eq!(
            format_error_line(parse_colouring("0 0\n", 3).unwrap_err()),
            1
        );
        assert_eq!(
            format_error_line(parse_colouring("0 1\n0 2\n", 3).unwrap_err()),
            2
        );
    }

    proptest! {
        #[test]
        fn graph_text_roundtrip(edge_bits in 0u32..(1 << 15)) {
            // Subsets of the 15 pairs on 6 vertices; skip the empty subset.
            prop_assume!(edge_bits != 0);
            let mut edges = Vec::new();
            let mut idx = 0;
            for u in 0..6u32 {
                for v in (u + 1)..6 {
                    if edge_bits & (1 << idx) != 0 {
                        edges.push((u, v));
                    }
                    idx += 1;
                }
            }
            let g = Graph::from_edges_with_n(6, &edges).unwrap();
            let back = parse_graph(&format_graph(&g)).unwrap();
            prop_assert_eq!(g.n(), back.n());
            prop_assert_eq!(g.edges(), back.edges());
        }
    }
}
