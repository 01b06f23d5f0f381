use std::collections::VecDeque;

use super::diagram::{Pair, PersistenceDiagram};

fn linf(p: &Pair, q: &Pair) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

/// ∞-distance from a pair to the diagonal.
fn to_diagonal(p: &Pair) -> f64 {
    (p.birth - p.death) / 2.0
}

/// Bottleneck distance between two diagrams.
///
/// Finite pairs may be matched to each other or to the diagonal; essential
/// classes are matched only among themselves (sorted births, which is
/// optimal on a line), and differing essential counts give `+∞`.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let (ea, fa): (Vec<Pair>, Vec<Pair>) = a.pairs().iter().partition(|p| p.is_essential());
    let (eb, fb): (Vec<Pair>, Vec<Pair>) = b.pairs().iter().partition(|p| p.is_essential());
    if ea.len() != eb.len() {
        return f64::INFINITY;
    }
    let mut ba: Vec<f64> = ea.iter().map(|p| p.birth).collect();
    let mut bb: Vec<f64> = eb.iter().map(|p| p.birth).collect();
    ba.sort_by(f64::total_cmp);
    bb.sort_by(f64::total_cmp);
    let essential = ba
        .iter()
        .zip(&bb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    essential.max(finite_bottleneck(&fa, &fb))
}

/// Bottleneck distance of finite pairs: the smallest candidate value at
/// which a perfect matching exists.
pub fn finite_bottleneck(a: &[Pair], b: &[Pair]) -> f64 {
    let mut cands: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    cands.push(0.0);
    cands.extend(a.iter().map(to_diagonal));
    cands.extend(b.iter().map(to_diagonal));
    for p in a {
        cands.extend(b.iter().map(|q| linf(p, q)));
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    // the largest candidate always admits the all-to-diagonal matching
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(a, b, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

/// Left side: `a` then diagonal copies of `b`; right side: `b` then
/// diagonal copies of `a`.
fn perfect_matching_exists(a: &[Pair], b: &[Pair], c: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|l| {
            if l < na {
                let mut v: Vec<usize> = (0..nb).filter(|&j| linf(&a[l], &b[j]) <= c).collect();
                if to_diagonal(&a[l]) <= c {
                    v.push(nb + l);
                }
                v
            } else {
                let j = l - na;
                let mut v: Vec<usize> = if to_diagonal(&b[j]) <= c {
                    vec![j]
                } else {
                    Vec::new()
                };
                v.extend(nb..nb + na);
                v
            }
        })
        .collect();
    hopcroft_karp(&adj, n) == n
}

/// Maximum bipartite matching size.
pub(crate) fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..n_left {
            if match_l[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = match_r[r];
                if m == FREE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            return size;
        }
        fn augment(
            l: usize,
            adj: &[Vec<usize>],
            ml: &mut [usize],
            mr: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &r in &adj[l] {
                let m = mr[r];
                if m == usize::MAX || (dist[m] == dist[l] + 1 && augment(m, adj, ml, mr, dist)) {
                    ml[l] = r;
                    mr[r] = l;
                    return true;
                }
            }
            dist[l] = usize::MAX;
            false
        }
        for l in 0..n_left {
            if match_l[l] == FREE && augment(l, adj, &mut match_l, &mut match_r, &mut dist) {
                size += 1;
            }
        }
    }
}
