//! Line-oriented graph file format and dataset directories.
//!
//! ```text
//! # optional comments
//! graph n=<n>
//! node <id> <attr...>                 (one line per vertex, in index order)
//! edge <i> <j> <attr_ij...> / <attr_ji...>
//! ```
//!
//! `<i>` and `<j>` are vertex indices; `<id>` is the vertex's unique id.
//! Attribute values are exact decimal strings of dyadic rationals, so
//! `parse(serialize(g)) == g` bit-for-bit, attributes and ids included.
//! The `/` separates the two directed attribute vectors of an edge.
//!
//! A dataset is a directory of `*.graph` files plus a `labels.csv` with
//! `filename,label` rows.

use crate::fixed::Fixed;
use crate::graph::{AttrVec, AttributedGraph, GraphError, NodeId};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph structure: {0}")]
    Graph(#[from] GraphError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("labels.csv line {line}: {msg}")]
    Labels { line: usize, msg: String },
}

fn perr(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn serialize(g: &AttributedGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph n={}\n", g.n()));
    for v in 0..g.n() as NodeId {
        out.push_str(&format!("node {}", g.id_of(v)));
        for a in g.node_attr(v) {
            out.push(' ');
            out.push_str(&a.to_decimal_string());
        }
        out.push('\n');
    }
    for &(i, j) in g.edges() {
        out.push_str(&format!("edge {i} {j}"));
        for a in g.edge_attr_into(i, j) {
            out.push(' ');
            out.push_str(&a.to_decimal_string());
        }
        out.push_str(" /");
        for a in g.edge_attr_into(j, i) {
            out.push(' ');
            out.push_str(&a.to_decimal_string());
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<AttributedGraph, FormatError> {
    let mut n: Option<usize> = None;
    let mut ids: Vec<NodeId> = Vec::new();
    let mut node_attr: Vec<AttrVec> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut edge_attr: BTreeMap<(NodeId, NodeId), AttrVec> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        let mut tok = stripped.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        match kind {
            "graph" => {
                let spec = tok.next().ok_or_else(|| perr(line, "expected n=<count>"))?;
                let count = spec
                    .strip_prefix("n=")
                    .ok_or_else(|| perr(line, "expected n=<count>"))?
                    .parse::<usize>()
                    .map_err(|_| perr(line, "bad node count"))?;
                if n.replace(count).is_some() {
                    return Err(perr(line, "duplicate graph header"));
                }
            }
            "node" => {
                let n = n.ok_or_else(|| perr(line, "node before graph header"))?;
                let id = tok
                    .next()
                    .ok_or_else(|| perr(line, "expected node id"))?
                    .parse::<NodeId>()
                    .map_err(|_| perr(line, "bad node id"))?;
                if (id as usize) >= n {
                    return Err(perr(line, format!("node id {id} out of range 0..{n}")));
                }
                let attrs = tok
                    .map(|t| Fixed::parse_decimal(t).map_err(|e| perr(line, e.to_string())))
                    .collect::<Result<AttrVec, _>>()?;
                ids.push(id);
                node_attr.push(attrs);
            }
            "edge" => {
                let n = n.ok_or_else(|| perr(line, "edge before graph header"))?;
                let i = tok
                    .next()
                    .ok_or_else(|| perr(line, "expected endpoint"))?
                    .parse::<NodeId>()
                    .map_err(|_| perr(line, "bad endpoint"))?;
                let j = tok
                    .next()
                    .ok_or_else(|| perr(line, "expected endpoint"))?
                    .parse::<NodeId>()
                    .map_err(|_| perr(line, "bad endpoint"))?;
                if (i as usize) >= n || (j as usize) >= n {
                    return Err(perr(line, format!("edge ({i}, {j}) out of range for n={n}")));
                }
                let rest: Vec<&str> = tok.collect();
                let split = rest
                    .iter()
                    .position(|&t| t == "/")
                    .ok_or_else(|| perr(line, "missing '/' attribute separator"))?;
                let parse_attrs = |toks: &[&str]| {
                    toks.iter()
                        .map(|t| Fixed::parse_decimal(t).map_err(|e| perr(line, e.to_string())))
                        .collect::<Result<AttrVec, _>>()
                };
                let a_ij = parse_attrs(&rest[..split])?;
                let a_ji = parse_attrs(&rest[split + 1..])?;
                edges.push((i, j));
                if !a_ij.is_empty() {
                    edge_attr.insert((i, j), a_ij);
                }
                if !a_ji.is_empty() {
                    edge_attr.insert((j, i), a_ji);
                }
            }
            other => return Err(perr(line, format!("unknown directive '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| perr(0, "missing graph header"))?;
    if ids.len() != n {
        return Err(perr(0, format!("expected {n} node lines, found {}", ids.len())));
    }
    let g = AttributedGraph::build(n, &edges, node_attr, edge_attr)?;
    // Restore the id labeling recorded in the file.
    Ok(g.permute_ids(&ids)?)
}

/// A graph dataset: parallel lists of graphs and boolean labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graphs: Vec<AttributedGraph>,
    pub labels: Vec<bool>,
    pub names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn max_n(&self) -> usize {
        self.graphs.iter().map(|g| g.n()).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.graphs.iter().map(|g| g.max_degree()).max().unwrap_or(0)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), FormatError> {
        std::fs::create_dir_all(dir)?;
        let mut labels = String::from("filename,label\n");
        for (k, g) in self.graphs.iter().enumerate() {
            let name = &self.names[k];
            std::fs::write(dir.join(name), serialize(g))?;
            labels.push_str(&format!("{},{}\n", name, self.labels[k] as u8));
        }
        std::fs::write(dir.join("labels.csv"), labels)?;
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Dataset, FormatError> {
        let text = std::fs::read_to_string(dir.join("labels.csv"))?;
        let mut graphs = Vec::new();
        let mut labels = Vec::new();
        let mut names = Vec::new();
        for (lineno, row) in text.lines().enumerate() {
            if lineno == 0 && row.trim() == "filename,label" {
                continue;
            }
            if row.trim().is_empty() {
                continue;
            }
            let (name, label) = row.split_once(',').ok_or(FormatError::Labels {
                line: lineno + 1,
                msg: "expected filename,label".into(),
            })?;
            let label = match label.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(FormatError::Labels {
                        line: lineno + 1,
                        msg: format!("bad label '{other}'"),
                    })
                }
            };
            let g = parse(&std::fs::read_to_string(dir.join(name.trim()))?)?;
            graphs.push(g);
            labels.push(label);
            names.push(name.trim().to_string());
        }
        Ok(Dataset {
            graphs,
            labels,
            names,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c3_round_trip() {
        let g = AttributedGraph::cycle(3);
        let text = serialize(&g);
        let back = parse(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn attributes_round_trip_bit_exactly() {
        let mut edge_attr = BTreeMap::new();
        edge_attr.insert((0u32, 1u32), vec![Fixed::parse_decimal("1.5").unwrap()]);
        edge_attr.insert((1u32, 0u32), vec![Fixed::parse_decimal("-0.125").unwrap()]);
        let g = AttributedGraph::build(
            3,
            &[(0, 1), (1, 2)],
            vec![
                vec![Fixed::from_int(7)],
                vec![Fixed::parse_decimal("0.5").unwrap(), Fixed::from_int(-2)],
                vec![],
            ],
            edge_attr,
        )
        .unwrap();
        let g = g.permute_ids(&[2, 0, 1]).unwrap();
        let back = parse(&serialize(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn out_of_range_edge_is_a_positioned_error() {
        let text = "graph n=3\nnode 0\nnode 1\nnode 2\nedge 0 5 /\n";
        match parse(text) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# a triangle\ngraph n=3\n\nnode 0 # first\nnode 1\nnode 2\nedge 0 1 /\nedge 1 2 /\nedge 0 2 /\n";
        let g = parse(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn non_dyadic_attribute_rejected() {
        let text = "graph n=2\nnode 0 0.3\nnode 1\nedge 0 1 /\n";
        assert!(matches!(parse(text), Err(FormatError::Parse { line: 2, .. })));
    }
}
