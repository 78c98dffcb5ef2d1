//! Generators for preorders (equivalently Alexandrov topologies) on small carriers.
//!
//! A preorder is stored as row masks: bit `y` of `rows[x]` is set iff `x ≤ y`,
//! so `rows[x]` is the minimal neighborhood `N(x)`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitopology::{AlexandrovTopology, BitopSpace};
use crate::gauges::index_labels;
use crate::pointset::PointSet;

pub type Preorder = Vec<u64>;

fn up_closed(p: &[u64], s: u64) -> bool {
    (0..p.len()).filter(|&x| s >> x & 1 == 1).all(|x| p[x] & !s == 0)
}

fn down_closed(p: &[u64], s: u64) -> bool {
    (0..p.len()).all(|x| s >> x & 1 == 1 || p[x] & s == 0)
}

/// Every preorder on `n` points.
///
/// Built one point at a time: the new point picks an up-closed set `U` above it
/// and a down-closed set `D` below it with every `d ∈ D` below every `u ∈ U`.
pub fn all_preorders(n: usize) -> Vec<Preorder> {
    assert!(n <= 8, "preorder enumeration is limited to 8 points");
    let mut layer: Vec<Preorder> = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for p in &layer {
            let subsets = 1u64 << k;
            let ups: Vec<u64> = (0..subsets).filter(|&u| up_closed(p, u)).collect();
            let downs: Vec<u64> = (0..subsets).filter(|&d| down_closed(p, d)).collect();
            for &d in &downs {
                for &u in &ups {
                    if (0..k).filter(|&x| d >> x & 1 == 1).any(|x| p[x] & u != u) {
                        continue;
                    }
                    let mut q: Preorder = p.clone();
                    for (x, row) in q.iter_mut().enumerate() {
                        if d >> x & 1 == 1 {
                            *row |= 1 << k;
                        }
                    }
                    q.push(u | 1 << k);
                    next.push(q);
                }
            }
        }
        layer = next;
    }
    layer
}

pub fn topology_of(p: &[u64]) -> AlexandrovTopology {
    let n = p.len();
    let sets = p.iter().map(|&m| PointSet::from_mask(n, m)).collect();
    AlexandrovTopology::new(index_labels(n), sets).expect("preorder rows are coherent")
}

pub fn bitop_of(forward: &[u64], backward: &[u64]) -> BitopSpace {
    BitopSpace::new(topology_of(forward), topology_of(backward)).expect("same carrier")
}

/// Reflexive-transitive closure of row masks.
pub fn close(rows: &mut [u64]) {
    let n = rows.len();
    for (x, row) in rows.iter_mut().enumerate() {
        *row |= 1 << x;
    }
    for k in 0..n {
        for x in 0..n {
            if rows[x] >> k & 1 == 1 {
                rows[x] |= rows[k];
            }
        }
    }
}

/// Random "DAG of equivalence classes" preorder.
pub fn random_preorder<R: Rng>(rng: &mut R, n: usize) -> Preorder {
    if n == 0 {
        return vec![];
    }
    let classes = rng.gen_range(1..=n);
    let class_of: Vec<usize> = (0..n).map(|_| rng.gen_range(0..classes)).collect();
    let mut order: Vec<usize> = (0..classes).collect();
    order.shuffle(rng);
    let density: f64 = rng.gen_range(0.0..0.8);
    let mut dag = vec![0u64; classes];
    for i in 0..classes {
        for j in i + 1..classes {
            if rng.gen_bool(density) {
                dag[order[i]] |= 1 << order[j];
            }
        }
    }
    close(&mut dag);
    let rows: Preorder = (0..n)
        .map(|x| (0..n).filter(|&y| dag[class_of[x]] >> class_of[y] & 1 == 1).fold(0u64, |m, y| m | 1 << y))
        .collect();
    debug_assert!({
        let mut c = rows.clone();
        close(&mut c);
        c == rows
    });
    rows
}

pub fn random_bitop<R: Rng>(rng: &mut R, n: usize) -> (Preorder, Preorder) {
    (random_preorder(rng, n), random_preorder(rng, n))
}

/// A target bitopology and a map into it that preserves both specialization orders.
///
/// The target's preorders are the closures of the image relations plus a few
/// random extra pairs.
pub fn random_monotone_map<R: Rng>(rng: &mut R, fwd: &[u64], bwd: &[u64]) -> (Vec<usize>, Preorder, Preorder) {
    let n = fwd.len();
    let m = rng.gen_range(1..=n.max(1));
    let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
    let push = |rows: &[u64], rng: &mut R| {
        let mut out = vec![0u64; m];
        for x in 0..n {
            for y in 0..n {
                if rows[x] >> y & 1 == 1 {
                    out[assignment[x]] |= 1 << assignment[y];
                }
            }
        }
        for _ in 0..rng.gen_range(0..=m) {
            let (u, v) = (rng.gen_range(0..m), rng.gen_range(0..m));
            out[u] |= 1 << v;
        }
        close(&mut out);
        out
    };
    let tf = push(fwd, rng);
    let tb = push(bwd, rng);
    (assignment, tf, tb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn is_preorder(p: &[u64]) -> bool {
        let mut c = p.to_vec();
        close(&mut c);
        c == p
    }

    #[test]
    fn preorder_counts() {
        // Number of preorders on a labelled n-set: 1, 1, 4, 29, 355, 6942.
        let counts: Vec<usize> = (0..=5).map(|n| all_preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355, 6942]);
    }

    #[test]
    fn enumeration_is_distinct_and_closed() {
        let all = all_preorders(4);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.iter().all(|p| is_preorder(p)));
    }

    #[test]
    fn random_preorders_are_preorders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 0..9 {
            for _ in 0..50 {
                assert!(is_preorder(&random_preorder(&mut rng, n)));
            }
        }
    }

    #[test]
    fn monotone_maps_preserve_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (f, b) = random_bitop(&mut rng, 6);
            let (g, tf, tb) = random_monotone_map(&mut rng, &f, &b);
            for x in 0..6 {
                for y in 0..6 {
                    if f[x] >> y & 1 == 1 {
                        assert_eq!(tf[g[x]] >> g[y] & 1, 1);
                    }
                    if b[x] >> y & 1 == 1 {
                        assert_eq!(tb[g[x]] >> g[y] & 1, 1);
                    }
                }
            }
        }
    }
}
