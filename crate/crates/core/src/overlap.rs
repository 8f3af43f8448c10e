//! Promotion of a disjoint partition to an overlapping cover.
//!
//! A node whose triangle share or neighbor share inside its own community
//! falls below a threshold is weakly anchored there; it is additionally
//! placed in every other community holding more than `thr_shared` of its
//! neighbors. All tests read the original partition, so the outcome does
//! not depend on node order.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};
use crate::graph::Graph;
use crate::partition::{Cover, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapThresholds {
    pub thr_tri: f64,
    pub thr_nbr: f64,
    pub thr_shared: f64,
}

impl OverlapThresholds {
    pub fn new(thr_tri: f64, thr_nbr: f64, thr_shared: f64) -> Result<OverlapThresholds> {
        let th = OverlapThresholds {
            thr_tri,
            thr_nbr,
            thr_shared,
        };
        th.validate()?;
        Ok(th)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("thr_tri", self.thr_tri),
            ("thr_nbr", self.thr_nbr),
            ("thr_shared", self.thr_shared),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }
}

/// Per-node shares used by the flagging test.
fn shares(g: &Graph, p: &Partition, i: usize) -> (f64, f64) {
    let home = p.community_of(i);
    let labels = p.labels();
    let member = |j: usize| labels[j] == home;
    let (inside, counts) = g.counts_with(i, &member, crate::graph::TripleScope::Centered);
    let tri = match g.triangles(i) {
        0 => 0.0,
        t => counts.closed as f64 / t as f64,
    };
    let nbr = match g.degree(i) {
        0 => 0.0,
        d => inside as f64 / d as f64,
    };
    (tri, nbr)
}

/// Nodes that fail either anchoring test in their home community.
pub fn flagged_nodes(g: &Graph, p: &Partition, th: &OverlapThresholds) -> Vec<usize> {
    (0..g.node_count())
        .filter(|&i| {
            let (tri, nbr) = shares(g, p, i);
            tri < th.thr_tri || nbr < th.thr_nbr
        })
        .collect()
}

pub fn find_overlaps(g: &Graph, p: &Partition, th: &OverlapThresholds) -> Result<Cover> {
    if p.node_count() != g.node_count() {
        return domain(format!(
            "partition covers {} nodes, graph has {}",
            p.node_count(),
            g.node_count()
        ));
    }
    let mut cover = Cover::from_partition(p);
    for i in flagged_nodes(g, p, th) {
        let d = g.degree(i);
        if d == 0 {
            continue;
        }
        let mut per_community = vec![0usize; p.community_count()];
        for &j in g.neighbors(i) {
            per_community[p.community_of(j)] += 1;
        }
        let home = p.community_of(i);
        for (c, &count) in per_community.iter().enumerate() {
            if c != home && count as f64 / d as f64 > th.thr_shared {
                cover.add_membership(i, c);
            }
        }
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridge() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn bridge_nodes_overlap() {
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let th = OverlapThresholds::new(0.3, 0.7, 0.25).unwrap();
        let cover = find_overlaps(&bridge(), &p, &th).unwrap();
        assert_eq!(cover.communities(), &[vec![0, 1, 2, 3], vec![2, 3, 4, 5]]);
        assert_eq!(cover.overlapping_nodes(), vec![2, 3]);
        assert_eq!(cover.home_partition(), p);
    }

    #[test]
    fn lower_neighbor_threshold_keeps_partition() {
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        let th = OverlapThresholds::new(0.3, 0.6, 0.25).unwrap();
        let cover = find_overlaps(&bridge(), &p, &th).unwrap();
        assert_eq!(cover, Cover::from_partition(&p));
    }

    #[test]
    fn vacuous_thresholds() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 1, 0]);
        let th = OverlapThresholds::new(0.0, 0.0, 1.0).unwrap();
        assert!(flagged_nodes(&bridge(), &p, &th).is_empty());
        assert_eq!(
            find_overlaps(&bridge(), &p, &th).unwrap(),
            Cover::from_partition(&p)
        );
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(OverlapThresholds::new(1.5, 0.0, 0.0).is_err());
        assert!(OverlapThresholds::new(0.0, -0.1, 0.0).is_err());
    }
}
