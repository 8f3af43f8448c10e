//! Community files and DOT rendering.
//!
//! A community file holds one community per line as whitespace-separated
//! node labels; a node listed on several lines belongs to several
//! communities. Lines starting with `#` are comments.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, parse_gml, Graph};
use crate::partition::Cover;

/// Reads community lines as raw label lists.
pub fn parse_communities(text: &str) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        out.push(t.split_whitespace().map(str::to_string).collect());
    }
    Ok(out)
}

/// Resolves labelled communities against `universe` (label -> index).
pub fn cover_from_labels(
    communities: &[Vec<String>],
    universe: &HashMap<String, usize>,
) -> Result<Cover> {
    let mut indexed = Vec::with_capacity(communities.len());
    for (line, c) in communities.iter().enumerate() {
        let mut members = Vec::with_capacity(c.len());
        for label in c {
            let &i = universe.get(label).ok_or_else(|| Error::Parse {
                line: line + 1,
                message: format!("unknown node {label}"),
            })?;
            members.push(i);
        }
        indexed.push(members);
    }
    Cover::from_communities(universe.len(), &indexed)
}

/// Reads a community file whose labels refer to the nodes of `g`.
pub fn read_cover(text: &str, g: &Graph) -> Result<Cover> {
    let universe: HashMap<String, usize> = g
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    cover_from_labels(&parse_communities(text)?, &universe)
}

/// Reads two community files over the same label set. Labels are indexed
/// in sorted order (numerically when all are integers).
pub fn read_cover_pair(a: &str, b: &str) -> Result<(Cover, Cover)> {
    let ca = parse_communities(a)?;
    let cb = parse_communities(b)?;
    let labels_of = |cs: &[Vec<String>]| {
        let mut v: Vec<String> = cs.iter().flatten().cloned().collect();
        v.sort();
        v.dedup();
        v
    };
    let la = labels_of(&ca);
    let lb = labels_of(&cb);
    if la != lb {
        return Err(Error::Domain(format!(
            "node universes differ ({} vs {} labels)",
            la.len(),
            lb.len()
        )));
    }
    let numeric: Option<Vec<i64>> = la.iter().map(|l| l.parse().ok()).collect();
    let ordered: Vec<String> = match numeric {
        Some(values) => {
            let mut paired: Vec<(i64, String)> = values.into_iter().zip(la).collect();
            paired.sort();
            paired.into_iter().map(|(_, l)| l).collect()
        }
        None => la,
    };
    let universe: HashMap<String, usize> = ordered
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    Ok((
        cover_from_labels(&ca, &universe)?,
        cover_from_labels(&cb, &universe)?,
    ))
}

/// Groups nodes by a per-node class value; every node needs one.
pub fn cover_from_values(values: &[Option<String>]) -> Result<Cover> {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut communities: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let Some(v) = v else {
            return Err(Error::Domain(format!("node {i} has no class value")));
        };
        let next = ids.len();
        let c = *ids.entry(v.as_str()).or_insert(next);
        if c == communities.len() {
            communities.push(Vec::new());
        }
        communities[c].push(i);
    }
    Cover::from_communities(values.len(), &communities)
}

/// Loads a graph file, GML when the extension is `.gml` and an edge list
/// otherwise. For GML whose nodes all carry a `value`, the classes are
/// returned as a reference cover.
pub fn read_graph_file(path: &Path) -> Result<(Graph, Option<Cover>)> {
    let is_gml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"));
    if is_gml {
        let parsed = parse_gml(&std::fs::read_to_string(path)?)?;
        let classes =
            if !parsed.node_values.is_empty() && parsed.node_values.iter().all(Option::is_some) {
                Some(cover_from_values(&parsed.node_values)?)
            } else {
                None
            };
        Ok((parsed.loaded.graph, classes))
    } else {
        let file = std::fs::File::open(path)?;
        Ok((load_edge_list(std::io::BufReader::new(file))?.graph, None))
    }
}

/// Writes communities as label lines, preceded by `header` as `#` comments.
pub fn write_communities(g: &Graph, communities: &[Vec<usize>], header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        for line in h.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for c in communities {
        let labels: Vec<&str> = c.iter().map(|&i| g.label(i)).collect();
        let _ = writeln!(out, "{}", labels.join(" "));
    }
    out
}

fn color(k: usize, total: usize) -> String {
    let hue = k as f64 / total.max(1) as f64;
    format!("{hue:.3} 0.450 0.950")
}

/// DOT rendering: nodes filled by home community, overlapping nodes drawn
/// as double circles.
pub fn to_dot(g: &Graph, cover: &Cover, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        for line in h.lines() {
            let _ = writeln!(out, "// {line}");
        }
    }
    out.push_str("graph communities {\n  node [style=filled];\n");
    let k = cover.community_count();
    for i in 0..g.node_count() {
        let m = cover.memberships(i);
        let shape = if m.len() > 1 {
            "doublecircle"
        } else {
            "circle"
        };
        let all: Vec<String> = m.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "  \"{}\" [shape={shape}, fillcolor=\"{}\", comment=\"communities {}\"];",
            g.label(i),
            color(m[0], k),
            all.join(",")
        );
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", g.label(u), g.label(v));
    }
    out.push_str("}\n");
    out
}
