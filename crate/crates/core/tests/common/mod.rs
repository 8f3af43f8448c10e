//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library's counting or scoring code.

#![allow(dead_code)]

use flexcomm::{Graph, Partition, TripleScope};

pub fn bridge() -> Graph {
    Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
}

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Closed and open triples containing `i` whose other two nodes pass `inside`.
pub fn brute_triples(
    a: &[Vec<bool>],
    i: usize,
    inside: &dyn Fn(usize) -> bool,
    scope: TripleScope,
) -> (usize, usize) {
    let n = a.len();
    let (mut closed, mut open) = (0, 0);
    for j in 0..n {
        for k in (j + 1)..n {
            if j == i || k == i || !inside(j) || !inside(k) {
                continue;
            }
            let edges = [a[i][j], a[i][k], a[j][k]].iter().filter(|&&e| e).count();
            match edges {
                3 => closed += 1,
                2 => {
                    let centered = a[i][j] && a[i][k];
                    if centered || scope == TripleScope::AnyPosition {
                        open += 1;
                    }
                }
                _ => {}
            }
        }
    }
    (closed, open)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub scope: TripleScope,
}

/// Local contribution of `i` to the community given as a membership mask.
pub fn brute_lc(a: &[Vec<bool>], i: usize, mask: &[bool], w: &Weights) -> f64 {
    let n = a.len();
    let (closed_c, open_c) = brute_triples(a, i, &|j| mask[j], w.scope);
    let (closed, open) = brute_triples(a, i, &|_| true, w.scope);
    let deg = (0..n).filter(|&j| a[i][j]).count();
    let deg_c = (0..n).filter(|&j| a[i][j] && mask[j]).count();
    w.alpha * ratio(closed_c, closed) + (1.0 - w.alpha) * ratio(deg_c, deg)
        - w.beta * ratio(open_c, closed + open)
}

/// Flex from per-(node, community mask) contributions, summed straight from
/// the definition.
pub fn brute_flex(a: &[Vec<bool>], communities: &[Vec<usize>], w: &Weights) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for c in communities {
        let mut mask = vec![false; n];
        for &j in c {
            mask[j] = true;
        }
        let lc: f64 = c.iter().map(|&i| brute_lc(a, i, &mask, w)).sum();
        total += lc - (c.len() as f64 / n as f64).powf(w.gamma);
    }
    total / n as f64
}

/// `(1/2m) sum_ij (A_ij - k_i k_j / 2m) [c_i = c_j]`.
pub fn brute_modularity(a: &[Vec<bool>], labels: &[usize]) -> f64 {
    let n = a.len();
    let k: Vec<f64> = a
        .iter()
        .map(|row| row.iter().filter(|&&e| e).count() as f64)
        .collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += f64::from(u8::from(a[i][j])) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted-growth label strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for label in 0..=max + 1 {
            prefix.push(label);
            grow(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut prefix = vec![0];
    grow(&mut prefix, 0, n, &mut out);
    out
}

pub fn groups(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        out[l].push(i);
    }
    out.retain(|c| !c.is_empty());
    out
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// `2 I(A;B) / (H(A) + H(B))` from raw label vectors; 1 when both are trivial.
pub fn brute_nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ga = groups(a);
    let gb = groups(b);
    let ha: f64 = ga.iter().map(|c| plogp(c.len() as f64 / n)).sum();
    let hb: f64 = gb.iter().map(|c| plogp(c.len() as f64 / n)).sum();
    let mut mi = 0.0;
    for x in &ga {
        for y in &gb {
            let both = x.iter().filter(|i| y.contains(i)).count() as f64;
            if both > 0.0 {
                mi += both / n * (both * n / (x.len() as f64 * y.len() as f64)).ln();
            }
        }
    }
    if ha + hb == 0.0 {
        return 1.0;
    }
    2.0 * mi / (ha + hb)
}

/// Lack-of-information cover NMI computed from a dense node x community
/// membership matrix. Whole-network communities are fully explained only by
/// another whole-network community.
pub fn brute_cover_nmi(n: usize, xs: &[Vec<usize>], ys: &[Vec<usize>]) -> f64 {
    let matrix = |cs: &[Vec<usize>]| -> Vec<Vec<bool>> {
        cs.iter()
            .map(|c| (0..n).map(|i| c.contains(&i)).collect())
            .collect()
    };
    let mx = matrix(xs);
    let my = matrix(ys);
    let conditional = |a: &[Vec<bool>], b: &[Vec<bool>]| -> f64 {
        let b_whole = b.iter().any(|col| col.iter().all(|&v| v));
        let mut sum = 0.0;
        for col in a {
            let p1 = col.iter().filter(|&&v| v).count() as f64 / n as f64;
            let hx = plogp(p1) + plogp(1.0 - p1);
            if hx == 0.0 {
                sum += if b_whole { 0.0 } else { 1.0 };
                continue;
            }
            let mut best = hx;
            for other in b {
                let mut cnt = [[0usize; 2]; 2];
                for i in 0..n {
                    cnt[usize::from(col[i])][usize::from(other[i])] += 1;
                }
                let p = |x: usize, y: usize| cnt[x][y] as f64 / n as f64;
                if plogp(p(1, 1)) + plogp(p(0, 0)) <= plogp(p(0, 1)) + plogp(p(1, 0)) {
                    continue;
                }
                let joint = plogp(p(0, 0)) + plogp(p(0, 1)) + plogp(p(1, 0)) + plogp(p(1, 1));
                let hy = plogp(p(0, 1) + p(1, 1)) + plogp(p(0, 0) + p(1, 0));
                best = best.min(joint - hy);
            }
            sum += best / hx;
        }
        sum / a.len() as f64
    };
    (1.0 - 0.5 * (conditional(&mx, &my) + conditional(&my, &mx))).clamp(0.0, 1.0)
}

pub fn partition_of(labels: &[usize]) -> Partition {
    Partition::from_labels(labels)
}
