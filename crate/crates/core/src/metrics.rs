//! Agreement between detected and reference community structures:
//! normalized mutual information for partitions and for covers.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::partition::{Cover, Partition};

/// Joint community counts of two partitions over the same nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTable {
    /// `joint[k][l]` = nodes in community k of A and community l of B.
    pub joint: Vec<Vec<usize>>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub total: usize,
}

impl ConfusionTable {
    pub fn new(a: &Partition, b: &Partition) -> Result<ConfusionTable> {
        if a.node_count() != b.node_count() {
            return domain(format!(
                "partitions cover {} and {} nodes",
                a.node_count(),
                b.node_count()
            ));
        }
        let mut joint = vec![vec![0usize; b.community_count()]; a.community_count()];
        for i in 0..a.node_count() {
            joint[a.community_of(i)][b.community_of(i)] += 1;
        }
        let rows = joint.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..b.community_count())
            .map(|l| joint.iter().map(|r| r[l]).sum())
            .collect();
        Ok(ConfusionTable {
            joint,
            rows,
            cols,
            total: a.node_count(),
        })
    }

    fn entropy(counts: &[usize], n: f64) -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        let mut mi = 0.0;
        for (k, row) in self.joint.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                if c > 0 {
                    let c = c as f64;
                    mi += c / n * (n * c / (self.rows[k] as f64 * self.cols[l] as f64)).ln();
                }
            }
        }
        mi
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// `2 I(A;B) / (H(A) + H(B))` with natural logarithms. Two single-community
/// partitions score 1; if only one side has zero entropy the score is 0.
pub fn nmi_disjoint(a: &Partition, b: &Partition) -> Result<f64> {
    let t = ConfusionTable::new(a, b)?;
    let n = t.total as f64;
    let ha = ConfusionTable::entropy(&t.rows, n);
    let hb = ConfusionTable::entropy(&t.cols, n);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    Ok(clamp_unit(2.0 * t.mutual_information() / (ha + hb)))
}

/// Normalization used for the cover NMI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverNmiVariant {
    /// `1 - (H(X|Y)_norm + H(Y|X)_norm) / 2`, averaging per-community
    /// normalized conditional entropies.
    #[default]
    LackOfInformation,
    /// `I(X:Y) / max(H(X), H(Y))` over summed community entropies.
    Max,
}

fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

fn binary_entropy(size: usize, n: usize) -> f64 {
    let p = size as f64 / n as f64;
    h(p) + h(1.0 - p)
}

/// Conditional entropy of one community of X given the best-matching
/// community of Y, or its own entropy when no match carries information.
fn best_conditional(x: &[usize], ys: &[Vec<usize>], n: usize) -> f64 {
    let hx = binary_entropy(x.len(), n);
    let nf = n as f64;
    let mut best = hx;
    for y in ys {
        let both = sorted_intersection(x, y);
        let p11 = both as f64 / nf;
        let p10 = (x.len() - both) as f64 / nf;
        let p01 = (y.len() - both) as f64 / nf;
        let p00 = 1.0 - p11 - p10 - p01;
        if h(p11) + h(p00) > h(p01) + h(p10) {
            let joint = h(p00) + h(p01) + h(p10) + h(p11);
            let hy = h(p01 + p11) + h(p00 + p10);
            best = best.min(joint - hy);
        }
    }
    best
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn is_whole(c: &[usize], n: usize) -> bool {
    c.len() == n
}

/// Normalized conditional entropy `H(X|Y)_norm` of the lack-of-information
/// form. Whole-network communities carry no entropy and count as fully
/// explained only when the other cover has one too.
fn normalized_conditional(xs: &[Vec<usize>], ys: &[Vec<usize>], n: usize) -> f64 {
    let other_has_whole = ys.iter().any(|y| is_whole(y, n));
    let total: f64 = xs
        .iter()
        .map(|x| {
            let hx = binary_entropy(x.len(), n);
            if hx == 0.0 {
                if other_has_whole {
                    0.0
                } else {
                    1.0
                }
            } else {
                best_conditional(x, ys, n) / hx
            }
        })
        .sum();
    total / xs.len() as f64
}

pub fn nmi_cover(a: &Cover, b: &Cover) -> Result<f64> {
    nmi_cover_with(a, b, CoverNmiVariant::default())
}

/// NMI between two covers using binary membership vectors per community.
pub fn nmi_cover_with(a: &Cover, b: &Cover, variant: CoverNmiVariant) -> Result<f64> {
    if a.node_count() != b.node_count() {
        return domain(format!(
            "covers span {} and {} nodes",
            a.node_count(),
            b.node_count()
        ));
    }
    let n = a.node_count();
    let xs = a.communities();
    let ys = b.communities();
    if xs.is_empty() || ys.is_empty() {
        return domain("covers must contain at least one community");
    }
    let value = match variant {
        CoverNmiVariant::LackOfInformation => {
            1.0 - 0.5 * (normalized_conditional(xs, ys, n) + normalized_conditional(ys, xs, n))
        }
        CoverNmiVariant::Max => {
            let hx: f64 = xs.iter().map(|x| binary_entropy(x.len(), n)).sum();
            let hy: f64 = ys.iter().map(|y| binary_entropy(y.len(), n)).sum();
            if hx == 0.0 && hy == 0.0 {
                return Ok(1.0);
            }
            let hx_y: f64 = xs.iter().map(|x| best_conditional(x, ys, n)).sum();
            let hy_x: f64 = ys.iter().map(|y| best_conditional(y, xs, n)).sum();
            let mi = 0.5 * (hx - hx_y + hy - hy_x);
            mi / hx.max(hy)
        }
    };
    Ok(clamp_unit(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scores_one() {
        let p = Partition::from_labels(&[0, 0, 1, 1, 2, 0]);
        assert!((nmi_disjoint(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        let c = Cover::from_communities(5, &[vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        for v in [CoverNmiVariant::LackOfInformation, CoverNmiVariant::Max] {
            assert!((nmi_cover_with(&c, &c, v).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_partitions() {
        let one = Partition::whole(5);
        let single = Partition::singletons(5);
        assert_eq!(nmi_disjoint(&one, &single).unwrap(), 0.0);
        assert_eq!(nmi_disjoint(&one, &one).unwrap(), 1.0);
        let c1 = Cover::from_partition(&one);
        let cs = Cover::from_partition(&single);
        assert_eq!(nmi_cover(&c1, &c1).unwrap(), 1.0);
        assert!(nmi_cover(&c1, &cs).unwrap().abs() < 1e-12);
    }

    #[test]
    fn four_node_table() {
        // table [[2,0],[1,1]] on n = 4
        let a = Partition::from_labels(&[0, 0, 1, 1]);
        let b = Partition::from_labels(&[0, 0, 0, 1]);
        let t = ConfusionTable::new(&a, &b).unwrap();
        assert_eq!(t.joint, vec![vec![2, 0], vec![1, 1]]);
        // hand evaluation:
        // I  = 0.5 ln(4/3) + 0.25 ln(2/3) + 0.25 ln 2
        // Ha = ln 2, Hb = -(0.75 ln 0.75 + 0.25 ln 0.25)
        let i = 0.5 * (4.0f64 / 3.0).ln() + 0.25 * (2.0f64 / 3.0).ln() + 0.25 * 2.0f64.ln();
        let ha = 2.0f64.ln();
        let hb = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let expected = 2.0 * i / (ha + hb);
        assert!((expected - 0.343_711_018_485_450_8).abs() < 1e-12);
        assert!((nmi_disjoint(&a, &b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn universe_mismatch() {
        assert!(nmi_disjoint(&Partition::whole(3), &Partition::whole(4)).is_err());
        let a = Cover::from_partition(&Partition::whole(3));
        let b = Cover::from_partition(&Partition::whole(4));
        assert!(nmi_cover(&a, &b).is_err());
    }

    #[test]
    fn cover_symmetry_on_partitions() {
        let a = Cover::from_partition(&Partition::from_labels(&[0, 0, 0, 1, 1, 2, 2, 2]));
        let b = Cover::from_partition(&Partition::from_labels(&[0, 0, 1, 1, 1, 2, 2, 0]));
        for v in [CoverNmiVariant::LackOfInformation, CoverNmiVariant::Max] {
            let ab = nmi_cover_with(&a, &b, v).unwrap();
            let ba = nmi_cover_with(&b, &a, v).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!(ab > 0.0 && ab < 1.0);
        }
    }
}
