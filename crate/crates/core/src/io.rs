//! JSON graph files and Graphviz export.
//!
//! The file format is `{"nodes":[...],"edges":[["A","--","B"],...]}` with
//! nodes sorted and edges listed in canonical order, so writing a parsed file
//! reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{CgError, Result};
use crate::graph::{EdgeKind, MixedGraph};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<String>,
    edges: Vec<(String, String, String)>,
}

pub fn graph_from_json(text: &str) -> Result<MixedGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    let mut g = MixedGraph::new(file.nodes)?;
    for (a, tok, b) in file.edges {
        let kind = EdgeKind::from_token(&tok)?;
        let (ia, ib) = (g.index(&a)?, g.index(&b)?);
        g.add_edge(ia, ib, kind)?;
    }
    Ok(g)
}

pub fn graph_to_json(g: &MixedGraph) -> String {
    let file = GraphFile {
        nodes: g.names().to_vec(),
        edges: g
            .edges()
            .into_iter()
            .map(|e| {
                (
                    g.name(e.from).to_string(),
                    e.kind.token().to_string(),
                    g.name(e.to).to_string(),
                )
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("graph serializes")
}

pub fn read_graph(path: &std::path::Path) -> Result<MixedGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CgError::Parse(format!("{}: {e}", path.display())))?;
    graph_from_json(&text)
}

/// Graphviz rendering; undirected edges drawn without heads, bidirected with
/// heads at both ends.
pub fn graph_to_dot(g: &MixedGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for name in g.names() {
        out.push_str(&format!("  \"{name}\";\n"));
    }
    for e in g.edges() {
        let attr = match e.kind {
            EdgeKind::Undirected => " [dir=none]",
            EdgeKind::Directed => "",
            EdgeKind::Bidirected => " [dir=both]",
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\"{attr};\n",
            g.name(e.from),
            g.name(e.to)
        ));
    }
    out.push_str("}\n");
    out
}
