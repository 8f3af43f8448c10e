//! Planted-partition benchmark graphs with overlapping nodes.
//!
//! Recipe: community sizes are drawn uniformly and trimmed to fill the node
//! set; degrees follow a truncated power law (exponent 2) whose mean is
//! matched to `avg_degree`; a `1 - mixing` share of each node's stubs is
//! wired inside its communities (split evenly across the memberships of
//! overlapping nodes) and the rest to nodes sharing no community. A final
//! degree- and community-preserving rewiring closes triangles until the
//! mean local clustering reaches `target_clustering` or the attempt budget
//! runs out.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::partition::Cover;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_nodes: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub max_communities: usize,
    /// Fraction of each node's edges leaving its communities.
    pub mixing: f64,
    pub n_overlap_nodes: usize,
    /// Mean number of communities per overlapping node.
    pub avg_memberships: f64,
    pub target_clustering: f64,
    pub rng_seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_nodes: 50,
            avg_degree: 10.0,
            max_degree: 15,
            max_communities: 10,
            mixing: 0.1,
            n_overlap_nodes: 3,
            avg_memberships: 2.0,
            target_clustering: 0.7,
            rng_seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return invalid("n_nodes must be at least 2");
        }
        if !(1.0..).contains(&self.avg_degree) || self.avg_degree > self.max_degree as f64 {
            return invalid(format!(
                "need 1 <= avg_degree <= max_degree, got {} and {}",
                self.avg_degree, self.max_degree
            ));
        }
        if self.max_degree >= self.n_nodes {
            return invalid("max_degree must be below n_nodes");
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return invalid(format!("mixing must lie in [0, 1], got {}", self.mixing));
        }
        if self.max_communities == 0 || self.max_communities > self.n_nodes {
            return invalid(format!(
                "max_communities must lie in [1, n_nodes], got {}",
                self.max_communities
            ));
        }
        if self.n_overlap_nodes > self.n_nodes {
            return invalid("more overlapping nodes than nodes");
        }
        if self.n_overlap_nodes > 0 && !(1.0..).contains(&self.avg_memberships) {
            return invalid("avg_memberships must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.target_clustering) {
            return invalid("target_clustering must lie in [0, 1]");
        }
        if self.min_community_size() > self.n_nodes {
            return invalid(format!(
                "communities need at least {} nodes to hold the internal degree, only {} available",
                self.min_community_size(),
                self.n_nodes
            ));
        }
        Ok(())
    }

    fn min_community_size(&self) -> usize {
        let by_count = self.n_nodes.div_ceil(2 * self.max_communities);
        let by_degree = ((1.0 - self.mixing) * self.avg_degree).ceil() as usize + 1;
        by_count.max(by_degree)
    }

    fn max_community_size(&self) -> usize {
        let by_count = 2 * self.n_nodes / self.max_communities;
        let by_degree = ((1.0 - self.mixing) * self.max_degree as f64).ceil() as usize + 1;
        by_count
            .max(by_degree)
            .max(self.min_community_size())
            .min(self.n_nodes)
    }
}

/// What the generator actually produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub communities: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    /// Fraction of edges whose endpoints share no community.
    pub mixing: f64,
    pub mean_clustering: f64,
    pub overlapping_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub truth: Cover,
    pub report: GeneratorReport,
}

fn community_sizes<R: Rng>(config: &GeneratorConfig, rng: &mut R) -> Vec<usize> {
    let n = config.n_nodes;
    let lo = config.min_community_size();
    let hi = config.max_community_size();
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < n {
        let s = rng.random_range(lo..=hi);
        sizes.push(s);
        total += s;
    }
    let last = sizes.len() - 1;
    sizes[last] -= total - n;
    // fold an undersized or surplus community into the smallest others
    while sizes.len() > 1 && (sizes[sizes.len() - 1] < lo || sizes.len() > config.max_communities) {
        let mut spare = sizes.pop().unwrap();
        while spare > 0 {
            let smallest = (0..sizes.len()).min_by_key(|&c| sizes[c]).unwrap();
            sizes[smallest] += 1;
            spare -= 1;
        }
    }
    sizes
}

/// Truncated power law `P(k) ~ k^-2` on `[k_min, k_max]`, with `k_min`
/// chosen so the mean is as close as possible to `avg`.
fn degree_distribution(avg: f64, k_max: usize) -> (usize, WeightedIndex<f64>) {
    let mean_for = |k_min: usize| {
        let (mut num, mut den) = (0.0, 0.0);
        for k in k_min..=k_max {
            let w = (k as f64).powi(-2);
            num += k as f64 * w;
            den += w;
        }
        num / den
    };
    let k_min = (1..=k_max)
        .min_by(|&a, &b| {
            (mean_for(a) - avg)
                .abs()
                .partial_cmp(&(mean_for(b) - avg).abs())
                .unwrap()
        })
        .unwrap();
    let weights: Vec<f64> = (k_min..=k_max).map(|k| (k as f64).powi(-2)).collect();
    (
        k_min,
        WeightedIndex::new(weights).expect("positive weights"),
    )
}

struct Wiring {
    adjacency: Vec<BTreeSet<usize>>,
}

impl Wiring {
    fn connect(&mut self, u: usize, v: usize) {
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
    }

    fn disconnect(&mut self, u: usize, v: usize) {
        self.adjacency[u].remove(&v);
        self.adjacency[v].remove(&u);
    }

    fn linked(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    fn triangles_at(&self, i: usize) -> usize {
        let nbrs: Vec<usize> = self.adjacency[i].iter().copied().collect();
        let mut t = 0;
        for (a, &j) in nbrs.iter().enumerate() {
            for &k in &nbrs[a + 1..] {
                if self.linked(j, k) {
                    t += 1;
                }
            }
        }
        t
    }

    fn clustering_at(&self, i: usize) -> f64 {
        let d = self.adjacency[i].len();
        if d < 2 {
            0.0
        } else {
            self.triangles_at(i) as f64 / (d * (d - 1) / 2) as f64
        }
    }

    fn mean_clustering(&self) -> f64 {
        let n = self.adjacency.len();
        (0..n).map(|i| self.clustering_at(i)).sum::<f64>() / n as f64
    }

    /// Randomized Havel–Hakimi: repeatedly saturates the node with most
    /// remaining stubs, linking it to eligible partners drawn in proportion
    /// to their remaining stubs. Stubs that cannot be placed are dropped.
    fn wire<R, F>(&mut self, pool: &[usize], remaining: &mut [usize], eligible: F, rng: &mut R)
    where
        R: Rng,
        F: Fn(usize, usize) -> bool,
    {
        while let Some(&u) = pool
            .iter()
            .filter(|&&u| remaining[u] > 0)
            .max_by_key(|&&u| (remaining[u], std::cmp::Reverse(u)))
        {
            let mut partners: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|&v| v != u && remaining[v] > 0 && !self.linked(u, v) && eligible(u, v))
                .collect();
            let want = remaining[u].min(partners.len());
            for _ in 0..want {
                let weights: Vec<usize> = partners.iter().map(|&v| remaining[v]).collect();
                let pick = WeightedIndex::new(&weights)
                    .expect("positive stubs")
                    .sample(rng);
                let v = partners.swap_remove(pick);
                self.connect(u, v);
                remaining[v] -= 1;
            }
            remaining[u] = 0;
        }
    }
}

pub fn generate(config: &GeneratorConfig) -> Result<Generated> {
    config.validate()?;
    let n = config.n_nodes;
    let mu = config.mixing;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let sizes = community_sizes(config, &mut rng);
    let k = sizes.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut memberships: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0;
    for (c, &s) in sizes.iter().enumerate() {
        for &i in &order[cursor..cursor + s] {
            memberships[i].push(c);
            members[c].push(i);
        }
        cursor += s;
    }

    if k > 1 {
        let mut candidates: Vec<usize> = (0..n).collect();
        candidates.shuffle(&mut rng);
        let extra_mean = config.avg_memberships - 1.0;
        for &i in candidates.iter().take(config.n_overlap_nodes) {
            let whole = extra_mean.floor();
            let extra = whole as usize + usize::from(rng.random_bool(extra_mean - whole));
            let mut others: Vec<usize> = (0..k).filter(|&c| c != memberships[i][0]).collect();
            others.shuffle(&mut rng);
            for &c in others.iter().take(extra.max(1)) {
                memberships[i].push(c);
                members[c].push(i);
            }
        }
    }
    for m in &mut members {
        m.sort_unstable();
    }

    let (k_min, degrees) = degree_distribution(config.avg_degree, config.max_degree);
    let mut internal: Vec<Vec<usize>> = vec![vec![0; k]; n];
    let mut external = vec![0usize; n];
    for i in 0..n {
        let degree = k_min + degrees.sample(&mut rng);
        let total_in = ((1.0 - mu) * degree as f64).round() as usize;
        let m = memberships[i].len();
        let mut placed = 0;
        for (slot, &c) in memberships[i].iter().enumerate() {
            let share = total_in / m + usize::from(slot < total_in % m);
            let share = share.min(members[c].len() - 1);
            internal[i][c] = share;
            placed += share;
        }
        external[i] = if placed < total_in && mu < 1.0 {
            (mu / (1.0 - mu) * placed as f64).round() as usize
        } else {
            degree - total_in
        };
    }

    let mut wiring = Wiring {
        adjacency: vec![BTreeSet::new(); n],
    };
    for c in 0..k {
        let mut remaining: Vec<usize> = (0..n).map(|i| internal[i][c]).collect();
        wiring.wire(&members[c], &mut remaining, |_, _| true, &mut rng);
    }
    let everyone: Vec<usize> = (0..n).collect();
    let shares_community =
        |u: usize, v: usize| memberships[u].iter().any(|c| memberships[v].contains(c));
    wiring.wire(
        &everyone,
        &mut external,
        |u, v| !shares_community(u, v),
        &mut rng,
    );

    for i in 0..n {
        if wiring.adjacency[i].is_empty() {
            let home = &members[memberships[i][0]];
            let pool: Vec<usize> = if home.len() > 1 {
                home.clone()
            } else {
                everyone.clone()
            };
            let choices: Vec<usize> = pool.into_iter().filter(|&v| v != i).collect();
            let v = *choices.choose(&mut rng).expect("at least two nodes");
            wiring.connect(i, v);
        }
    }

    let pinned: Vec<bool> = memberships.iter().map(|m| m.len() > 1).collect();
    close_triangles(
        &mut wiring,
        &members,
        &pinned,
        config.target_clustering,
        &mut rng,
    );

    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| {
            wiring.adjacency[u]
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
        .collect();
    let graph = Graph::from_edges(n, &edges)?;
    let truth = Cover::from_communities(n, &members)?;
    let report = measure(&graph, &truth);
    Ok(Generated {
        graph,
        truth,
        report,
    })
}

/// Swaps `j-a, k-b` for `j-k, a-b` inside one community whenever that
/// closes more triangles than it opens. Pinned nodes never change
/// neighbors, so overlapping nodes keep their planted per-community split.
fn close_triangles<R: Rng>(
    wiring: &mut Wiring,
    members: &[Vec<usize>],
    pinned: &[bool],
    target: f64,
    rng: &mut R,
) {
    let edges: usize = wiring.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2;
    let budget = 50 * edges;
    let mut clustering = wiring.mean_clustering();
    let mut accepted = 0;
    for _ in 0..budget {
        if clustering >= target {
            break;
        }
        let c = rng.random_range(0..members.len());
        let comm = &members[c];
        if comm.len() < 4 {
            continue;
        }
        let inside = |x: usize| comm.binary_search(&x).is_ok();
        let i = comm[rng.random_range(0..comm.len())];
        let nbrs: Vec<usize> = wiring.adjacency[i]
            .iter()
            .copied()
            .filter(|&x| inside(x) && !pinned[x])
            .collect();
        if nbrs.len() < 2 {
            continue;
        }
        let j = nbrs[rng.random_range(0..nbrs.len())];
        let kk = nbrs[rng.random_range(0..nbrs.len())];
        if j == kk || wiring.linked(j, kk) {
            continue;
        }
        let pick = |w: &Wiring, x: usize, rng: &mut R, avoid: [usize; 2]| {
            let opts: Vec<usize> = w.adjacency[x]
                .iter()
                .copied()
                .filter(|&y| inside(y) && !pinned[y] && !avoid.contains(&y))
                .collect();
            opts.choose(rng).copied()
        };
        let (Some(a), Some(b)) = (pick(wiring, j, rng, [i, kk]), pick(wiring, kk, rng, [i, j]))
        else {
            continue;
        };
        if a == b || wiring.linked(a, b) {
            continue;
        }
        let touched = [i, j, kk, a, b];
        let affected: BTreeSet<usize> = touched
            .iter()
            .flat_map(|&x| wiring.adjacency[x].iter().copied().chain([x]))
            .collect();
        let before: usize = affected.iter().map(|&x| wiring.triangles_at(x)).sum();
        wiring.disconnect(j, a);
        wiring.disconnect(kk, b);
        wiring.connect(j, kk);
        wiring.connect(a, b);
        let after: usize = affected.iter().map(|&x| wiring.triangles_at(x)).sum();
        if after <= before {
            wiring.disconnect(j, kk);
            wiring.disconnect(a, b);
            wiring.connect(j, a);
            wiring.connect(kk, b);
            continue;
        }
        accepted += 1;
        if accepted % 25 == 0 {
            clustering = wiring.mean_clustering();
        }
    }
}

/// Degree, mixing and clustering statistics of a generated graph.
pub fn measure(g: &Graph, truth: &Cover) -> GeneratorReport {
    let n = g.node_count();
    let cut = g
        .edges()
        .iter()
        .filter(|&&(u, v)| {
            !truth
                .memberships(u)
                .iter()
                .any(|c| truth.memberships(v).contains(c))
        })
        .count();
    GeneratorReport {
        communities: truth.community_count(),
        mean_degree: g.mean_degree(),
        max_degree: (0..n).map(|i| g.degree(i)).max().unwrap_or(0),
        mixing: if g.edge_count() == 0 {
            0.0
        } else {
            cut as f64 / g.edge_count() as f64
        },
        mean_clustering: g.mean_clustering(),
        overlapping_nodes: truth.overlap_count(),
    }
}
