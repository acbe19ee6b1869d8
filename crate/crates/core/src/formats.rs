//! Bit-exact readers and writers for standard graph interchange formats
//! (graph6, DIMACS .col, plain edge lists) and for the line-delimited
//! structured result records the campaign tooling streams.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};
use crate::oracle::Coloring;
use crate::patterns::Witness;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph6: {0}")]
    Graph6(String),
    #[error("dimacs: {0}")]
    Dimacs(String),
    #[error("graph too large for this encoder: n = {0}")]
    TooLarge(usize),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

/// Source format tag for a parsed graph document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Graph6,
    DimacsCol,
    EdgeList,
}

/// A graph together with where it came from.
#[derive(Debug, Clone)]
pub struct GraphDocument {
    pub graph: Graph,
    pub name: Option<String>,
    pub format: SourceFormat,
}

// ---------------------------------------------------------------------------
// graph6 (McKay's format). Writers emit the canonical encoding: the shortest
// size field, then the upper triangle of the adjacency matrix in column-major
// order (x_{0,1}, x_{0,2}, x_{1,2}, x_{0,3}, ...), padded with zero bits to a
// multiple of six, each 6-bit group offset by 63.
// ---------------------------------------------------------------------------

const G6_HEADER: &str = ">>graph6<<";
const G6_MAX_N: usize = 258_047;

pub fn write_graph6(g: &Graph) -> Result<String, FormatError> {
    let n = g.n();
    if n > G6_MAX_N {
        return Err(FormatError::TooLarge(n));
    }
    let mut out = Vec::new();
    if n <= 62 {
        out.push((n + 63) as u8);
    } else {
        out.push(126);
        out.push(((n >> 12) & 0x3f) as u8 + 63);
        out.push(((n >> 6) & 0x3f) as u8 + 63);
        out.push((n & 0x3f) as u8 + 63);
    }
    let nbits = n * n.saturating_sub(1) / 2;
    let mut group = 0u8;
    let mut filled = 0usize;
    let mut emitted = 0usize;
    for j in 1..n {
        for i in 0..j {
            group = (group << 1) | u8::from(g.has_edge(i, j));
            filled += 1;
            if filled == 6 {
                out.push(group + 63);
                group = 0;
                filled = 0;
            }
            emitted += 1;
        }
    }
    debug_assert_eq!(emitted, nbits);
    if filled > 0 {
        group <<= 6 - filled;
        out.push(group + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are printable ASCII"))
}

pub fn read_graph6(text: &str) -> Result<Graph, FormatError> {
    let line = text.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(G6_HEADER).unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(FormatError::Graph6("empty input".into()));
    }
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(FormatError::Graph6(format!(
                "byte {b} outside printable graph6 range 63..=126"
            )));
        }
    }
    let (n, mut pos) = if bytes[0] == 126 {
        if bytes.len() >= 2 && bytes[1] == 126 {
            return Err(FormatError::Graph6(
                "graphs with more than 258047 vertices are not supported".into(),
            ));
        }
        if bytes.len() < 4 {
            return Err(FormatError::Graph6("truncated size field".into()));
        }
        let n = ((bytes[1] as usize - 63) << 12)
            | ((bytes[2] as usize - 63) << 6)
            | (bytes[3] as usize - 63);
        if n <= 62 {
            return Err(FormatError::Graph6(
                "non-canonical size field: long form used for n <= 62".into(),
            ));
        }
        (n, 4)
    } else {
        ((bytes[0] - 63) as usize, 1)
    };
    let nbits = n * n.saturating_sub(1) / 2;
    let needed = nbits.div_ceil(6);
    if bytes.len() - pos != needed {
        return Err(FormatError::Graph6(format!(
            "bit vector has {} bytes, expected {} for n = {}",
            bytes.len() - pos,
            needed,
            n
        )));
    }
    let mut b = GraphBuilder::new(n);
    let mut bit_index = 0usize;
    let mut pairs = (1..n).flat_map(|j| (0..j).map(move |i| (i, j)));
    while pos < bytes.len() {
        let group = bytes[pos] - 63;
        pos += 1;
        for k in (0..6).rev() {
            let bit = group >> k & 1;
            if bit_index < nbits {
                let (i, j) = pairs.next().expect("pair count matches bit count");
                if bit == 1 {
                    b.add_edge(i, j).expect("indices in range by construction");
                }
            } else if bit == 1 {
                return Err(FormatError::Graph6("nonzero padding bits".into()));
            }
            bit_index += 1;
        }
    }
    Ok(b.build())
}

// ---------------------------------------------------------------------------
// DIMACS .col
// ---------------------------------------------------------------------------

pub fn write_dimacs_col(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

pub fn read_dimacs_col(text: &str) -> Result<Graph, FormatError> {
    let mut builder: Option<GraphBuilder> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("p") => {
                if builder.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                let kind = tok.next().ok_or_else(|| parse_err(lineno, "missing format token"))?;
                if kind != "edge" {
                    return Err(parse_err(lineno, format!("unsupported format '{kind}', expected 'edge'")));
                }
                let n: usize = tok
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing vertex count"))?
                    .parse()
                    .map_err(|_| parse_err(lineno, "non-integer vertex count"))?;
                let _m: usize = tok
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing edge count"))?
                    .parse()
                    .map_err(|_| parse_err(lineno, "non-integer edge count"))?;
                builder = Some(GraphBuilder::new(n));
            }
            Some("e") => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| parse_err(lineno, "edge line before problem line"))?;
                let u: usize = tok
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing endpoint"))?
                    .parse()
                    .map_err(|_| parse_err(lineno, "non-integer vertex"))?;
                let v: usize = tok
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing endpoint"))?
                    .parse()
                    .map_err(|_| parse_err(lineno, "non-integer vertex"))?;
                if u == 0 || v == 0 || u > b.n() || v > b.n() {
                    return Err(parse_err(lineno, format!("vertex out of range 1..={}", b.n())));
                }
                if u == v {
                    return Err(parse_err(lineno, "self-loop"));
                }
                // duplicate and reversed edge lines are tolerated
                b.add_edge(u - 1, v - 1).expect("validated above");
            }
            Some(other) => {
                return Err(parse_err(lineno, format!("unknown line kind '{other}'")));
            }
            None => unreachable!("non-empty line has a token"),
        }
    }
    builder
        .map(GraphBuilder::build)
        .ok_or_else(|| FormatError::Dimacs("missing 'p edge n m' header".into()))
}

// ---------------------------------------------------------------------------
// Plain edge list: "n=<k>" first, then whitespace-separated 0-indexed pairs.
// ---------------------------------------------------------------------------

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text.lines().enumerate();
    let (mut builder, mut header_seen) = (None, false);
    for (idx, raw) in &mut lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            let n: usize = line
                .strip_prefix("n=")
                .ok_or_else(|| parse_err(lineno, "expected 'n=<count>' header"))?
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, "non-integer vertex count"))?;
            builder = Some(GraphBuilder::new(n));
            header_seen = true;
            continue;
        }
        let b = builder.as_mut().expect("set with header");
        let mut tok = line.split_whitespace();
        let u: usize = tok
            .next()
            .ok_or_else(|| parse_err(lineno, "missing endpoint"))?
            .parse()
            .map_err(|_| parse_err(lineno, "non-integer vertex"))?;
        let v: usize = tok
            .next()
            .ok_or_else(|| parse_err(lineno, "missing endpoint"))?
            .parse()
            .map_err(|_| parse_err(lineno, "non-integer vertex"))?;
        if tok.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after edge"));
        }
        if u >= b.n() || v >= b.n() {
            return Err(parse_err(lineno, format!("vertex out of range 0..{}", b.n())));
        }
        if u == v {
            return Err(parse_err(lineno, "self-loop"));
        }
        b.add_edge(u, v).expect("validated above");
    }
    builder
        .map(GraphBuilder::build)
        .ok_or_else(|| parse_err(1, "empty input, expected 'n=<count>' header"))
}

// ---------------------------------------------------------------------------
// Structured result records (one JSON object per line so campaigns stream).
// ---------------------------------------------------------------------------

/// Coloring record: vertex keys mapped to colors plus summary flags, e.g.
/// `{"0":1,"1":2,"colors_used":2,"proper":true}`.
pub fn write_coloring_json(coloring: &Coloring, proper: bool) -> String {
    let mut obj = BTreeMap::new();
    for (v, &c) in coloring.colors().iter().enumerate() {
        obj.insert(v.to_string(), json!(c));
    }
    obj.insert("colors_used".into(), json!(coloring.colors_used()));
    obj.insert("proper".into(), json!(proper));
    Value::Object(obj.into_iter().collect()).to_string()
}

/// Witness record: `{"pattern":"HVN","verified":true,"vertices":[..]}`.
pub fn write_witness_json(witness: &Witness) -> String {
    json!({
        "pattern": witness.pattern(),
        "vertices": witness.vertices(),
        "verified": witness.verified(),
    })
    .to_string()
}

pub fn read_by_format(text: &str, format: SourceFormat) -> Result<GraphDocument, FormatError> {
    let graph = match format {
        SourceFormat::Graph6 => read_graph6(
            text.lines()
                .find(|l| !l.trim().is_empty())
                .ok_or_else(|| FormatError::Graph6("empty input".into()))?,
        )?,
        SourceFormat::DimacsCol => read_dimacs_col(text)?,
        SourceFormat::EdgeList => read_edge_list(text)?,
    };
    Ok(GraphDocument {
        graph,
        name: None,
        format,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn graph6_empty_graph_is_question_mark() {
        assert_eq!(write_graph6(&Graph::empty(0)).unwrap(), "?");
        assert_eq!(read_graph6("?").unwrap(), Graph::empty(0));
    }

    #[test]
    fn graph6_k3_roundtrip() {
        let k3 = Graph::complete(3);
        let s = write_graph6(&k3).unwrap();
        // n=3 -> 'B'; upper triangle bits 111 padded to 111000 -> 56+63=119 'w'
        assert_eq!(s, "Bw");
        assert_eq!(read_graph6(&s).unwrap(), k3);
    }

    #[test]
    fn graph6_header_accepted() {
        let k3 = Graph::complete(3);
        assert_eq!(read_graph6(">>graph6<<Bw").unwrap(), k3);
    }

    #[test]
    fn graph6_roundtrips_small() {
        for n in 0..=7usize {
            let mut gs = vec![Graph::empty(n), Graph::complete(n)];
            if n >= 3 {
                gs.push(Graph::cycle(n));
                gs.push(Graph::path(n));
            }
            for g in gs {
                let s = write_graph6(&g).unwrap();
                assert_eq!(read_graph6(&s).unwrap(), g, "roundtrip for {s}");
                assert_eq!(write_graph6(&read_graph6(&s).unwrap()).unwrap(), s);
            }
        }
    }

    #[test]
    fn graph6_long_size_field() {
        let g = Graph::empty(63);
        let s = write_graph6(&g).unwrap();
        assert!(s.starts_with('~'));
        assert_eq!(read_graph6(&s).unwrap(), g);

        let g = Graph::from_edges(100, &[(0, 99), (40, 60)]).unwrap();
        let s = write_graph6(&g).unwrap();
        assert_eq!(read_graph6(&s).unwrap(), g);
    }

    #[test]
    fn graph6_malformed_inputs() {
        assert!(matches!(read_graph6(""), Err(FormatError::Graph6(_))));
        // space (32) is outside the printable range
        assert!(matches!(read_graph6("B "), Err(FormatError::Graph6(_))));
        // truncated bit vector for n=3
        assert!(matches!(read_graph6("B"), Err(FormatError::Graph6(_))));
        // overlong bit vector
        assert!(matches!(read_graph6("Bww"), Err(FormatError::Graph6(_))));
        // nonzero padding: K2 is "A_" (bit 1, pad 00000)
        assert_eq!(read_graph6("A_").unwrap(), Graph::complete(2));
        assert!(matches!(read_graph6("A`"), Err(FormatError::Graph6(_))));
    }

    #[test]
    fn dimacs_k2_and_write_c5() {
        let g = read_dimacs_col("p edge 2 1\ne 1 2\n").unwrap();
        assert_eq!(g, Graph::complete(2));
        let out = write_dimacs_col(&Graph::cycle(5));
        assert_eq!(out.lines().filter(|l| l.starts_with('e')).count(), 5);
    }

    #[test]
    fn dimacs_tolerates_duplicates_and_comments() {
        let g = read_dimacs_col("c a comment\np edge 3 2\ne 1 2\ne 2 1\ne 2 3\n").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn dimacs_errors() {
        assert!(matches!(
            read_dimacs_col("e 1 2\n"),
            Err(FormatError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_dimacs_col("p edge 2 1\ne 1 5\n"),
            Err(FormatError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_dimacs_col("p edge 2 x\n"),
            Err(FormatError::Parse { line: 1, .. })
        ));
        assert!(matches!(read_dimacs_col(""), Err(FormatError::Dimacs(_))));
    }

    #[test]
    fn edge_list_p3() {
        let g = read_edge_list("n=3\n0 1\n1 2\n").unwrap();
        assert_eq!(g, Graph::path(3));
        assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        assert!(matches!(
            read_edge_list("n=3\n0 9\n"),
            Err(FormatError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_edge_list("3\n0 1\n"),
            Err(FormatError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn coloring_record_shape() {
        let c = Coloring::new(vec![1, 2], 2);
        assert_eq!(
            write_coloring_json(&c, true),
            r#"{"0":1,"1":2,"colors_used":2,"proper":true}"#
        );
    }

    #[test]
    fn random_roundtrips_up_to_n8() {
        let mut state = 0x0f0f_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            state >> 33
        };
        for _ in 0..256 {
            let n = (next() % 9) as usize;
            let mut b = crate::graph::GraphBuilder::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if next() % 2 == 0 {
                        b.add_edge(u, v).unwrap();
                    }
                }
            }
            let g = b.build();
            assert_eq!(read_graph6(&write_graph6(&g).unwrap()).unwrap(), g);
            assert_eq!(read_dimacs_col(&write_dimacs_col(&g)).unwrap(), g);
            assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
        }
    }
}
