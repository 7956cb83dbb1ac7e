//! Text formats for graphs.
//!
//! Edge list: one `u v` pair per line, 0-indexed, whitespace separated. A
//! `#n <count>` line pins the vertex count (needed for isolated vertices);
//! without it the count is one past the largest endpoint. Other lines
//! starting with `#` are comments. Matrix: `n` lines of `n` characters over
//! `{0, 1}`, symmetric with zero diagonal; `#` lines are comments here too.
//!
//! The serializers always emit `\n` line endings and edges sorted by
//! `(min, max)` endpoint; the edge list always carries the `#n` line.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Graph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    EdgeList,
    Matrix,
}

impl FromStr for Format {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" | "edge-list" => Ok(Format::EdgeList),
            "matrix" => Ok(Format::Matrix),
            other => Err(GraphError::InvalidParameter(format!(
                "unknown graph format {other:?}"
            ))),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<Graph, GraphError> {
    match format {
        Format::EdgeList => parse_edge_list(text),
        Format::Matrix => parse_matrix(text),
    }
}

fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut pinned: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#n") {
            if !rest.starts_with(char::is_whitespace) {
                continue;
            }
            if pinned.is_some() || !edges.is_empty() {
                return Err(parse_err(
                    line_no,
                    "#n must precede every edge and appear once",
                ));
            }
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad vertex count {:?}", rest.trim())))?;
            pinned = Some(n);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(
                line_no,
                format!("expected \"u v\", got {line:?}"),
            ));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad vertex index {s:?}")))
        };
        edges.push((line_no, parse(a)?, parse(b)?));
    }
    let n = pinned.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(_, u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    });
    let mut g = Graph::empty(n);
    for (line_no, u, v) in edges {
        match g.insert_edge(u, v) {
            Ok(true) => {}
            Ok(false) => return Err(parse_err(line_no, format!("duplicate edge ({u}, {v})"))),
            Err(e) => return Err(parse_err(line_no, e.to_string())),
        }
    }
    Ok(g)
}

fn parse_matrix(text: &str) -> Result<Graph, GraphError> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let n = rows.len();
    let mut cells = vec![false; n * n];
    for (r, &(line_no, row)) in rows.iter().enumerate() {
        if row.chars().count() != n {
            return Err(parse_err(
                line_no,
                format!("expected {n} cells, found {}", row.chars().count()),
            ));
        }
        for (c, ch) in row.chars().enumerate() {
            cells[r * n + c] = match ch {
                '0' => false,
                '1' => true,
                other => {
                    return Err(parse_err(
                        line_no,
                        format!("unexpected character {other:?}"),
                    ))
                }
            };
        }
    }
    let mut g = Graph::empty(n);
    for (r, &(line_no, _)) in rows.iter().enumerate() {
        if cells[r * n + r] {
            return Err(parse_err(
                line_no,
                format!("nonzero diagonal at vertex {r}"),
            ));
        }
        for c in 0..r {
            if cells[r * n + c] != cells[c * n + r] {
                return Err(parse_err(
                    line_no,
                    format!("asymmetric cells ({r}, {c}) and ({c}, {r})"),
                ));
            }
            if cells[r * n + c] {
                g.insert_edge(c, r)?;
            }
        }
    }
    Ok(g)
}

pub fn serialize_graph(g: &Graph, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::EdgeList => {
            writeln!(out, "#n {}", g.vertex_count()).unwrap();
            for (u, v) in g.edges() {
                writeln!(out, "{u} {v}").unwrap();
            }
        }
        Format::Matrix => {
            for row in g.adjacency().to_rows() {
                out.push_str(&row);
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn parses_both_formats() {
        assert_eq!(parse_graph("0 1\n1 2\n", Format::EdgeList).unwrap(), p3());
        assert_eq!(
            parse_graph("010\n101\n010\n", Format::Matrix).unwrap(),
            p3()
        );
    }

    #[test]
    fn pinned_count_keeps_isolated_vertices() {
        let g = parse_graph("#n 5\n# comment\n0 1\n", Format::EdgeList).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 1));
        assert_eq!(serialize_graph(&g, Format::EdgeList), "#n 5\n0 1\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("0 0\n", Format::EdgeList, 1),
            ("0 1\n1 x\n", Format::EdgeList, 2),
            ("0 1 2\n", Format::EdgeList, 1),
            ("#n 2\n0 1\n1 2\n", Format::EdgeList, 3),
            ("0 1\n1 0\n", Format::EdgeList, 2),
            ("0 1\n#n 3\n", Format::EdgeList, 2),
            ("01\n00\n", Format::Matrix, 2),
            ("10\n00\n", Format::Matrix, 1),
            ("01\n1\n", Format::Matrix, 2),
            ("02\n20\n", Format::Matrix, 1),
        ];
        for (text, format, line) in cases {
            match parse_graph(text, format) {
                Err(GraphError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trips(g in arb_graph()) {
            for format in [Format::EdgeList, Format::Matrix] {
                let text = serialize_graph(&g, format);
                prop_assert_eq!(parse_graph(&text, format).unwrap(), g.clone());
            }
        }

        #[test]
        fn adjacency_symmetric_zero_diagonal(g in arb_graph()) {
            let a = g.adjacency();
            prop_assert!(a.is_symmetric());
            prop_assert!((0..a.rows()).all(|i| !a.get(i, i)));
            prop_assert_eq!(a.count_ones(), 2 * g.edge_count());
        }
    }
}
