//! Bundled reference networks.

use crate::graph::{parse_edge_list, Graph};
use crate::io::read_cover;
use crate::partition::Cover;

const KARATE_EDGES: &str = include_str!("../data/karate.edges");
const KARATE_TRUTH: &str = include_str!("../data/karate.truth");

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub truth: Cover,
}

/// Zachary's karate club (34 members, 78 ties) with the two-club split that
/// followed the conflict between the instructor and the administrator.
pub fn karate() -> Dataset {
    let graph = parse_edge_list(KARATE_EDGES)
        .expect("bundled edge list")
        .graph;
    let truth = read_cover(KARATE_TRUTH, &graph).expect("bundled ground truth");
    Dataset {
        name: "karate".to_string(),
        graph,
        truth,
    }
}

/// Looks up a bundled dataset by name.
pub fn builtin(name: &str) -> Option<Dataset> {
    match name {
        "karate" => Some(karate()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn karate_truth_is_two_clubs() {
        let d = super::karate();
        assert_eq!(d.truth.community_count(), 2);
        assert_eq!(d.truth.overlap_count(), 0);
        assert_eq!(d.truth.communities()[0].len(), 17);
        assert!(d.truth.communities()[0].contains(&0));
        assert!(d.truth.communities()[1].contains(&33));
    }
}
