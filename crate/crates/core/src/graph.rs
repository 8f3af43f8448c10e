//! Immutable undirected simple graphs and the local counting primitives
//! (neighbor fractions, triangles, open triples) consumed by the quality
//! functions.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which connected triples count as "containing" a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleScope {
    /// Only triples whose middle vertex is the node (pairs of its neighbors).
    #[default]
    Centered,
    /// Any connected triple that has the node as center or endpoint.
    AnyPosition,
}

/// Closed/open triple counts for one node, restricted to some node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TripleCounts {
    /// Triangles through the node.
    pub closed: usize,
    /// Connected triples through the node spanned by exactly two edges.
    pub open: usize,
}

impl TripleCounts {
    pub fn total(&self) -> usize {
        self.closed + self.open
    }
}

/// Undirected simple graph over dense node indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    labels: Vec<String>,
    /// For node i, every neighbor pair (j, k), j < k, that closes a triangle.
    triangle_pairs: Vec<Vec<(usize, usize)>>,
    /// Whole-graph any-position counts, cached because every Flex term divides by them.
    full_any: Vec<TripleCounts>,
}

/// Outcome of reading an edge list: the graph plus what was silently dropped.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes labelled `0..n`. Self-loops and repeated
    /// edges are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::build(n, edges, labels)?.graph)
    }

    /// Builds a graph with explicit node labels (`labels.len()` nodes).
    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Loaded> {
        Self::build(labels.len(), edges, labels)
    }

    fn build(n: usize, raw: &[(usize, usize)], labels: Vec<String>) -> Result<Loaded> {
        let mut self_loops = 0;
        let mut edges = Vec::with_capacity(raw.len());
        for &(u, v) in raw {
            if u >= n || v >= n {
                return domain(format!("edge ({u}, {v}) out of range for {n} nodes"));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let duplicates = before - edges.len();

        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        let mut triangle_pairs = vec![Vec::new(); n];
        for (i, nbrs) in adjacency.iter().enumerate() {
            for (a, &j) in nbrs.iter().enumerate() {
                for &k in &nbrs[a + 1..] {
                    if adjacency[j].binary_search(&k).is_ok() {
                        triangle_pairs[i].push((j, k));
                    }
                }
            }
        }

        let mut graph = Graph {
            adjacency,
            edges,
            labels,
            triangle_pairs,
            full_any: Vec::new(),
        };
        graph.full_any = (0..n)
            .map(|i| graph.counts_with(i, &|_| true, TripleScope::AnyPosition).1)
            .collect();

        if self_loops + duplicates > 0 {
            log::warn!("dropped {self_loops} self-loops and {duplicates} duplicate edges");
        }
        Ok(Loaded {
            graph,
            dropped_self_loops: self_loops,
            dropped_duplicates: duplicates,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the node carrying `label`, if any.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of triangles containing `i`.
    pub fn triangles(&self, i: usize) -> usize {
        self.triangle_pairs[i].len()
    }

    pub fn total_triangles(&self) -> usize {
        self.triangle_pairs.iter().map(Vec::len).sum::<usize>() / 3
    }

    /// Whole-graph triple counts of `i` under `scope`.
    pub fn full_triples(&self, i: usize, scope: TripleScope) -> TripleCounts {
        match scope {
            TripleScope::AnyPosition => self.full_any[i],
            TripleScope::Centered => {
                let d = self.degree(i);
                let closed = self.triangles(i);
                TripleCounts {
                    closed,
                    open: d * d.saturating_sub(1) / 2 - closed,
                }
            }
        }
    }

    /// Inside-degree and triple counts of `i` restricted to the nodes accepted
    /// by `member`. `i` itself is assumed to be a member.
    pub(crate) fn counts_with<F>(
        &self,
        i: usize,
        member: &F,
        scope: TripleScope,
    ) -> (usize, TripleCounts)
    where
        F: Fn(usize) -> bool,
    {
        let inside = self.adjacency[i].iter().filter(|&&j| member(j)).count();
        let closed = self.triangle_pairs[i]
            .iter()
            .filter(|&&(j, k)| member(j) && member(k))
            .count();
        let centered_pairs = inside * inside.saturating_sub(1) / 2;
        let open = match scope {
            TripleScope::Centered => centered_pairs - closed,
            TripleScope::AnyPosition => {
                // endpoint triples i-j-k: every in-set neighbor k of an in-set
                // neighbor j, except i itself and the k that close a triangle.
                let paths: usize = self.adjacency[i]
                    .iter()
                    .filter(|&&j| member(j))
                    .map(|&j| self.adjacency[j].iter().filter(|&&k| member(k)).count() - 1)
                    .sum();
                centered_pairs + paths - 3 * closed
            }
        };
        (inside, TripleCounts { closed, open })
    }

    fn set_mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.node_count()];
        for &j in set {
            if j >= self.node_count() {
                return domain(format!("node {j} out of range"));
            }
            mask[j] = true;
        }
        Ok(mask)
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.node_count() {
            return domain(format!("node {i} out of range"));
        }
        Ok(())
    }

    /// Triangles and open triples (any position) of `i` with all three
    /// vertices inside `set`.
    pub fn triples_of_node_in_set(&self, i: usize, set: &[usize]) -> Result<TripleCounts> {
        self.triples_in_set(i, set, TripleScope::AnyPosition)
    }

    pub fn triples_in_set(
        &self,
        i: usize,
        set: &[usize],
        scope: TripleScope,
    ) -> Result<TripleCounts> {
        self.check_node(i)?;
        let mask = self.set_mask(set)?;
        if !mask[i] {
            return domain(format!("node {i} is not in the given set"));
        }
        Ok(self.counts_with(i, &|j| mask[j], scope).1)
    }

    /// `|N(i) ∩ set| / |N(i)|`, or 0 for an isolated node.
    pub fn neighbor_fraction(&self, i: usize, set: &[usize]) -> Result<f64> {
        self.check_node(i)?;
        let mask = self.set_mask(set)?;
        let d = self.degree(i);
        if d == 0 {
            return Ok(0.0);
        }
        let inside = self.adjacency[i].iter().filter(|&&j| mask[j]).count();
        Ok(inside as f64 / d as f64)
    }

    /// Local clustering coefficient; 0 when the degree is below 2.
    pub fn clustering_coefficient(&self, i: usize) -> Result<f64> {
        self.check_node(i)?;
        let d = self.degree(i);
        if d < 2 {
            return Ok(0.0);
        }
        Ok(self.triangles(i) as f64 / (d * (d - 1) / 2) as f64)
    }

    pub fn mean_clustering(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        (0..n)
            .map(|i| self.clustering_coefficient(i).unwrap_or(0.0))
            .sum::<f64>()
            / n as f64
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }
}

/// Orders node tokens numerically when all of them are integers, otherwise
/// lexicographically, so the resulting indexing ignores input order.
fn canonical_labels(tokens: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut labels: Vec<String> = tokens.into_iter().collect();
    labels.sort_unstable();
    labels.dedup();
    let numeric: Option<Vec<i64>> = labels.iter().map(|l| l.parse().ok()).collect();
    if let Some(values) = numeric {
        let mut paired: Vec<(i64, String)> = values.into_iter().zip(labels).collect();
        paired.sort();
        labels = paired.into_iter().map(|(_, l)| l).collect();
    }
    labels
}

fn labelled_graph(labels: Vec<String>, token_edges: &[(String, String)]) -> Result<Loaded> {
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = token_edges
        .iter()
        .map(|(a, b)| (index[a.as_str()], index[b.as_str()]))
        .collect();
    Graph::with_labels(labels, &edges)
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are ignored; every other line must hold exactly two tokens.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Loaded> {
    let mut token_edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 node tokens, found {}", tokens.len()),
            });
        }
        token_edges.push((tokens[0].to_string(), tokens[1].to_string()));
    }
    let labels = canonical_labels(token_edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    labelled_graph(labels, &token_edges)
}

pub fn parse_edge_list(text: &str) -> Result<Loaded> {
    load_edge_list(text.as_bytes())
}

/// Writes one `u v` line per edge using node labels.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for &(u, v) in g.edges() {
        out.push_str(g.label(u));
        out.push(' ');
        out.push_str(g.label(v));
        out.push('\n');
    }
    out
}

/// A graph read from GML together with each node's `value` attribute, which
/// the public datasets use for their ground-truth classes.
#[derive(Debug, Clone)]
pub struct GmlGraph {
    pub loaded: Loaded,
    pub node_values: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq)]
enum GmlToken {
    Key(String),
    Value(String),
    Open,
    Close,
}

fn tokenize_gml(text: &str) -> Result<Vec<(usize, GmlToken)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    // a bare word is a key when a value is expected next, otherwise a value
    let mut expect_value = false;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '[' => {
                chars.next();
                out.push((line, GmlToken::Open));
                expect_value = false;
            }
            ']' => {
                chars.next();
                out.push((line, GmlToken::Close));
                expect_value = false;
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => {
                            return Err(Error::Parse {
                                line,
                                message: "unterminated string".into(),
                            })
                        }
                    }
                }
                out.push((line, GmlToken::Value(s)));
                expect_value = false;
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || ch == '[' || ch == ']' || ch == '"' {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                if expect_value {
                    out.push((line, GmlToken::Value(s)));
                    expect_value = false;
                } else {
                    out.push((line, GmlToken::Key(s)));
                    expect_value = true;
                }
            }
        }
    }
    Ok(out)
}

/// Reads the node/edge subset of GML: `node [ id .. ]` and
/// `edge [ source .. target .. ]`. Directed graphs and weighted edges are
/// rejected.
pub fn parse_gml(text: &str) -> Result<GmlGraph> {
    let tokens = tokenize_gml(text)?;
    let perr = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };

    let mut nodes: Vec<(String, Option<String>)> = Vec::new();
    let mut token_edges: Vec<(String, String)> = Vec::new();
    let mut pos = 0;
    let mut depth = 0usize;
    while pos < tokens.len() {
        let (line, tok) = &tokens[pos];
        match tok {
            GmlToken::Key(k) if (k == "node" || k == "edge") && depth == 1 => {
                if tokens.get(pos + 1).map(|t| &t.1) != Some(&GmlToken::Open) {
                    return Err(perr(*line, "expected '[' after node/edge"));
                }
                let mut attrs: BTreeMap<String, String> = BTreeMap::new();
                let mut p = pos + 2;
                let mut inner = 0usize;
                loop {
                    let Some((l, t)) = tokens.get(p) else {
                        return Err(perr(*line, "unterminated block"));
                    };
                    match t {
                        GmlToken::Close if inner == 0 => break,
                        GmlToken::Close => inner -= 1,
                        GmlToken::Open => inner += 1,
                        GmlToken::Key(key) if inner == 0 => match tokens.get(p + 1) {
                            Some((_, GmlToken::Value(v))) => {
                                attrs.insert(key.clone(), v.clone());
                                p += 1;
                            }
                            Some((_, GmlToken::Open)) => {}
                            _ => return Err(perr(*l, "attribute without value")),
                        },
                        _ => {}
                    }
                    p += 1;
                }
                if k == "node" {
                    let id = attrs
                        .get("id")
                        .ok_or_else(|| perr(*line, "node without id"))?;
                    nodes.push((id.clone(), attrs.get("value").cloned()));
                } else {
                    if attrs.contains_key("weight") || attrs.contains_key("value") {
                        return Err(perr(*line, "weighted edges are not supported"));
                    }
                    let s = attrs
                        .get("source")
                        .ok_or_else(|| perr(*line, "edge without source"))?;
                    let t = attrs
                        .get("target")
                        .ok_or_else(|| perr(*line, "edge without target"))?;
                    token_edges.push((s.clone(), t.clone()));
                }
                pos = p + 1;
                continue;
            }
            GmlToken::Key(k) if k == "directed" && depth == 1 => {
                if let Some((_, GmlToken::Value(v))) = tokens.get(pos + 1) {
                    if v != "0" {
                        return Err(perr(*line, "directed graphs are not supported"));
                    }
                }
            }
            GmlToken::Open => depth += 1,
            GmlToken::Close => depth = depth.saturating_sub(1),
            _ => {}
        }
        pos += 1;
    }

    let labels = canonical_labels(nodes.iter().map(|(id, _)| id.clone()));
    if labels.len() != nodes.len() {
        return Err(perr(0, "duplicate node ids"));
    }
    let values: HashMap<&str, Option<String>> = nodes
        .iter()
        .map(|(id, v)| (id.as_str(), v.clone()))
        .collect();
    for (s, t) in &token_edges {
        for end in [s, t] {
            if !values.contains_key(end.as_str()) {
                return Err(perr(0, &format!("edge references unknown node {end}")));
            }
        }
    }
    let node_values = labels.iter().map(|l| values[l.as_str()].clone()).collect();
    let loaded = labelled_graph(labels, &token_edges)?;
    Ok(GmlGraph {
        loaded,
        node_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridge() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    /// Brute force: every 3-subset containing `i`, classified by edge count.
    fn enumerate_triples(g: &Graph, i: usize, set: &[usize]) -> TripleCounts {
        let mut c = TripleCounts::default();
        for &j in set {
            for &k in set {
                if j < k && j != i && k != i {
                    let e = [(i, j), (i, k), (j, k)]
                        .iter()
                        .filter(|&&(a, b)| g.has_edge(a, b))
                        .count();
                    match e {
                        3 => c.closed += 1,
                        2 => c.open += 1,
                        _ => {}
                    }
                }
            }
        }
        c
    }

    #[test]
    fn edge_list_triangle() {
        let l = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!(l.graph.node_count(), 3);
        assert_eq!(l.graph.edge_count(), 3);
    }

    #[test]
    fn edge_list_labels() {
        let l = parse_edge_list("a b\nb c").unwrap();
        assert_eq!(l.graph.node_count(), 3);
        assert_eq!(l.graph.edge_count(), 2);
        assert_eq!(l.graph.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn edge_list_drops_loops_and_duplicates() {
        let l = parse_edge_list("# c\n% c\n0 1\n1 0\n1 1\n\n1 2\n").unwrap();
        assert_eq!(l.graph.edge_count(), 2);
        assert_eq!(l.dropped_self_loops, 1);
        assert_eq!(l.dropped_duplicates, 1);
    }

    #[test]
    fn edge_list_malformed_line() {
        match parse_edge_list("0 1\n1 2 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn edge_order_does_not_matter() {
        let a = parse_edge_list("3 1\n1 2\n10 2").unwrap().graph;
        let b = parse_edge_list("2 10\n2 1\n1 3").unwrap().graph;
        assert_eq!(a, b);
        assert_eq!(a.labels(), &["1", "2", "3", "10"]);
    }

    #[test]
    fn triples_examples() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            k3.triples_of_node_in_set(0, &[0, 1, 2]).unwrap(),
            TripleCounts { closed: 1, open: 0 }
        );
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            path.triples_of_node_in_set(1, &[0, 1, 2]).unwrap(),
            TripleCounts { closed: 0, open: 1 }
        );
        let g = bridge();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(
            g.triples_of_node_in_set(2, &all).unwrap(),
            TripleCounts { closed: 1, open: 4 }
        );
        assert_eq!(
            enumerate_triples(&g, 2, &all),
            TripleCounts { closed: 1, open: 4 }
        );
        // centered: only {0,2,3} and {1,2,3}
        assert_eq!(
            g.triples_in_set(2, &all, TripleScope::Centered).unwrap(),
            TripleCounts { closed: 1, open: 2 }
        );
        assert!(g.triples_of_node_in_set(2, &[3, 4]).is_err());
    }

    #[test]
    fn neighbor_fraction_examples() {
        let g = bridge();
        assert!((g.neighbor_fraction(2, &[0, 1, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.neighbor_fraction(4, &[0, 1, 2, 3, 4, 5]).unwrap(), 1.0);
        let iso = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(iso.neighbor_fraction(2, &[0, 1, 2]).unwrap(), 0.0);
    }

    #[test]
    fn clustering_examples() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.clustering_coefficient(0).unwrap(), 1.0);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.clustering_coefficient(1).unwrap(), 0.0);
        assert!((bridge().clustering_coefficient(2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn karate_dataset_size() {
        let g = crate::datasets::karate().graph;
        assert_eq!(g.node_count(), 34);
        assert_eq!(g.edge_count(), 78);
        assert_eq!(g.total_triangles(), 45);
    }

    #[test]
    fn gml_subset() {
        let text = r#"Creator "x"
graph
[
  directed 0
  node [ id 1 label "a" value "x" ]
  node [ id 2 value "y" ]
  node [ id 3 graphics [ x 1.0 y 2.0 ] ]
  edge [ source 1 target 2 ]
  edge [ source 2 target 3 ]
]"#;
        let gml = parse_gml(text).unwrap();
        assert_eq!(gml.loaded.graph.node_count(), 3);
        assert_eq!(gml.loaded.graph.edge_count(), 2);
        assert_eq!(
            gml.node_values,
            vec![Some("x".into()), Some("y".into()), None]
        );
        assert!(parse_gml("graph [ directed 1 node [ id 1 ] ]").is_err());
        assert!(parse_gml(
            "graph [ node [ id 1 ] node [ id 2 ] edge [ source 1 target 2 weight 3 ] ]"
        )
        .is_err());
        assert!(parse_gml("graph [ node [ id 1 ] edge [ source 1 target 9 ] ]").is_err());
    }
}
