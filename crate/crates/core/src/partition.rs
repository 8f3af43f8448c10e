//! Disjoint partitions and overlapping covers of a node set `0..n`.

use crate::error::{domain, Result};

/// Disjoint assignment of every node to one community. Community ids are
/// dense and numbered by first appearance, so two partitions compare equal
/// exactly when they induce the same set partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    communities: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary per-node community labels.
    pub fn from_labels(raw: &[usize]) -> Partition {
        let mut remap = std::collections::HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        let mut communities: Vec<Vec<usize>> = Vec::new();
        for (i, &r) in raw.iter().enumerate() {
            let id = *remap.entry(r).or_insert_with(|| {
                communities.push(Vec::new());
                communities.len() - 1
            });
            labels.push(id);
            communities[id].push(i);
        }
        Partition {
            labels,
            communities,
        }
    }

    /// Builds a partition from community node lists; every node in `0..n`
    /// must appear exactly once.
    pub fn from_communities(n: usize, communities: &[Vec<usize>]) -> Result<Partition> {
        let mut raw = vec![usize::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for &i in members {
                if i >= n {
                    return domain(format!("node {i} out of range for {n} nodes"));
                }
                if raw[i] != usize::MAX {
                    return domain(format!("node {i} appears in more than one community"));
                }
                raw[i] = c;
            }
        }
        if let Some(i) = raw.iter().position(|&c| c == usize::MAX) {
            return domain(format!("node {i} is not assigned to any community"));
        }
        Ok(Partition::from_labels(&raw))
    }

    pub fn singletons(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn whole(n: usize) -> Partition {
        Partition::from_labels(&vec![0; n])
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn community_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Community node lists, each sorted ascending.
    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }
}

/// Assignment of every node to one or more communities. The first
/// membership of each node is its home community.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    memberships: Vec<Vec<usize>>,
    communities: Vec<Vec<usize>>,
}

impl Cover {
    pub fn from_partition(p: &Partition) -> Cover {
        Cover {
            memberships: p.labels().iter().map(|&c| vec![c]).collect(),
            communities: p.communities().to_vec(),
        }
    }

    /// Builds a cover from community node lists. A node's home community is
    /// the first list it appears in. Every node must be covered.
    pub fn from_communities(n: usize, communities: &[Vec<usize>]) -> Result<Cover> {
        let mut memberships = vec![Vec::new(); n];
        let mut cleaned = Vec::with_capacity(communities.len());
        for (c, members) in communities.iter().enumerate() {
            if members.is_empty() {
                return domain(format!("community {c} is empty"));
            }
            let mut m = members.clone();
            m.sort_unstable();
            m.dedup();
            for &i in &m {
                if i >= n {
                    return domain(format!("node {i} out of range for {n} nodes"));
                }
                memberships[i].push(c);
            }
            cleaned.push(m);
        }
        if let Some(i) = memberships.iter().position(Vec::is_empty) {
            return domain(format!("node {i} is not covered"));
        }
        Ok(Cover {
            memberships,
            communities: cleaned,
        })
    }

    pub(crate) fn add_membership(&mut self, i: usize, c: usize) {
        if !self.memberships[i].contains(&c) {
            self.memberships[i].push(c);
            let members = &mut self.communities[c];
            let at = members.binary_search(&i).unwrap_or_else(|e| e);
            members.insert(at, i);
        }
    }

    pub fn node_count(&self) -> usize {
        self.memberships.len()
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn memberships(&self, i: usize) -> &[usize] {
        &self.memberships[i]
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    /// The disjoint partition given by each node's home community.
    pub fn home_partition(&self) -> Partition {
        let raw: Vec<usize> = self.memberships.iter().map(|m| m[0]).collect();
        Partition::from_labels(&raw)
    }

    pub fn overlapping_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&i| self.memberships[i].len() > 1)
            .collect()
    }

    pub fn overlap_count(&self) -> usize {
        self.memberships.iter().filter(|m| m.len() > 1).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_canonical() {
        let a = Partition::from_labels(&[7, 7, 3, 9]);
        let b = Partition::from_labels(&[0, 0, 1, 2]);
        assert_eq!(a, b);
        assert_eq!(a.communities(), &[vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn from_communities_rejects_bad_input() {
        assert!(Partition::from_communities(3, &[vec![0, 1]]).is_err());
        assert!(Partition::from_communities(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_communities(2, &[vec![0, 5]]).is_err());
        assert!(Cover::from_communities(3, &[vec![0, 1]]).is_err());
        assert!(Cover::from_communities(2, &[vec![0, 1], vec![]]).is_err());
    }

    #[test]
    fn cover_home_projection() {
        let c = Cover::from_communities(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert_eq!(c.overlapping_nodes(), vec![2]);
        assert_eq!(c.home_partition(), Partition::from_labels(&[0, 0, 0, 1]));
    }
}
