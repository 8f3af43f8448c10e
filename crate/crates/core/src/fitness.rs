//! Partition quality: the Flex function built from per-node local
//! contributions, and Newman–Girvan modularity as the baseline.
//!
//! For node `i` in community `c`:
//!
//! ```text
//! LC(i,c) = alpha * tri(i,c) + (1 - alpha) * nbr(i,c) - beta * wedge(i,c)
//! CC(c)   = sum_{i in c} LC(i,c) - (|c| / |V|)^gamma
//! Flex(p) = (1 / |V|) * sum_{c in p} CC(c)
//! ```
//!
//! `tri` is the share of i's triangles that lie inside `c`, `nbr` the share
//! of its neighbors inside `c`, and `wedge` the open triples through i inside
//! `c` relative to all triples through i in the whole graph. Ratios with a
//! zero denominator are 0.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::graph::{Graph, TripleScope};
use crate::partition::Partition;

/// Weights of the Flex function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexParams {
    /// Transitivity (1) versus neighborhood (0) balance.
    pub alpha: f64,
    /// Open-triangle penalty weight.
    pub beta: f64,
    /// Exponent of the community-size penalty.
    pub gamma: f64,
    /// Which open triples count against a node.
    #[serde(default)]
    pub triples: TripleScope,
}

impl FlexParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<FlexParams> {
        let p = FlexParams {
            alpha,
            beta,
            gamma,
            triples: TripleScope::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_triples(mut self, triples: TripleScope) -> FlexParams {
        self.triples = triples;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return invalid(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(0.0..f64::INFINITY).contains(&self.beta) {
            return invalid(format!("beta must be >= 0, got {}", self.beta));
        }
        if !(1.0..f64::INFINITY).contains(&self.gamma) {
            return invalid(format!("gamma must be >= 1, got {}", self.gamma));
        }
        Ok(())
    }
}

/// The three ratios of one local contribution and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBreakdown {
    pub tri_ratio: f64,
    pub nbr_ratio: f64,
    pub wedge_ratio: f64,
    pub lc: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub(crate) fn local_with<F>(g: &Graph, i: usize, member: &F, params: &FlexParams) -> LocalBreakdown
where
    F: Fn(usize) -> bool,
{
    let (inside, counts) = g.counts_with(i, member, params.triples);
    let full = g.full_triples(i, params.triples);
    let tri_ratio = ratio(counts.closed, full.closed);
    let nbr_ratio = ratio(inside, g.degree(i));
    let wedge_ratio = ratio(counts.open, full.total());
    let lc =
        params.alpha * tri_ratio + (1.0 - params.alpha) * nbr_ratio - params.beta * wedge_ratio;
    LocalBreakdown {
        tri_ratio,
        nbr_ratio,
        wedge_ratio,
        lc,
    }
}

fn member_mask(g: &Graph, c: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; g.node_count()];
    for &j in c {
        if j >= g.node_count() {
            return domain(format!("node {j} out of range"));
        }
        mask[j] = true;
    }
    Ok(mask)
}

pub fn local_contribution(
    g: &Graph,
    i: usize,
    c: &[usize],
    params: &FlexParams,
) -> Result<LocalBreakdown> {
    let mask = member_mask(g, c)?;
    if i >= g.node_count() || !mask[i] {
        return domain(format!("node {i} is not in the community"));
    }
    Ok(local_with(g, i, &|j| mask[j], params))
}

fn size_penalty(size: usize, n: usize, gamma: f64) -> f64 {
    (size as f64 / n as f64).powf(gamma)
}

pub fn community_contribution(g: &Graph, c: &[usize], params: &FlexParams) -> Result<f64> {
    if c.is_empty() {
        return domain("community is empty");
    }
    let mask = member_mask(g, c)?;
    let mut members = c.to_vec();
    members.sort_unstable();
    members.dedup();
    let sum: f64 = members
        .iter()
        .map(|&i| local_with(g, i, &|j| mask[j], params).lc)
        .sum();
    Ok(sum - size_penalty(members.len(), g.node_count(), params.gamma))
}

/// Flex of `p`, without shape checks.
pub(crate) fn flex_unchecked(g: &Graph, p: &Partition, params: &FlexParams) -> f64 {
    let labels = p.labels();
    let n = g.node_count();
    let total: f64 = p
        .communities()
        .iter()
        .enumerate()
        .map(|(cid, members)| {
            let member = |j: usize| labels[j] == cid;
            let sum: f64 = members
                .iter()
                .map(|&i| local_with(g, i, &member, params).lc)
                .sum();
            sum - size_penalty(members.len(), n, params.gamma)
        })
        .sum();
    total / n as f64
}

pub fn flex(g: &Graph, p: &Partition, params: &FlexParams) -> Result<f64> {
    if p.node_count() != g.node_count() {
        return domain(format!(
            "partition covers {} nodes, graph has {}",
            p.node_count(),
            g.node_count()
        ));
    }
    Ok(flex_unchecked(g, p, params))
}

pub(crate) fn modularity_unchecked(g: &Graph, p: &Partition) -> f64 {
    let k = p.community_count();
    let mut internal = vec![0usize; k];
    let mut degree_sum = vec![0usize; k];
    for &(u, v) in g.edges() {
        if p.community_of(u) == p.community_of(v) {
            internal[p.community_of(u)] += 1;
        }
    }
    for i in 0..g.node_count() {
        degree_sum[p.community_of(i)] += g.degree(i);
    }
    let m = g.edge_count() as f64;
    internal
        .iter()
        .zip(&degree_sum)
        .map(|(&e, &d)| e as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum()
}

/// `sum_c (e_c / m - (d_c / 2m)^2)` with `e_c` intra-community edges and
/// `d_c` the degree sum of community `c`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if g.edge_count() == 0 {
        return domain("modularity is undefined on a graph without edges");
    }
    if p.node_count() != g.node_count() {
        return domain(format!(
            "partition covers {} nodes, graph has {}",
            p.node_count(),
            g.node_count()
        ));
    }
    Ok(modularity_unchecked(g, p))
}

/// A quality function maximized by the optimizer.
pub trait Objective: Sync {
    fn evaluate(&self, g: &Graph, p: &Partition) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct FlexObjective(pub FlexParams);

impl Objective for FlexObjective {
    fn evaluate(&self, g: &Graph, p: &Partition) -> f64 {
        flex_unchecked(g, p, &self.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ModularityObjective;

impl Objective for ModularityObjective {
    fn evaluate(&self, g: &Graph, p: &Partition) -> f64 {
        if g.edge_count() == 0 {
            return 0.0;
        }
        modularity_unchecked(g, p)
    }
}
