use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

/// A maximum matching together with a minimum vertex cover of the same size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    /// Matched pairs `(i, j)`, sorted by `i`.
    pub matching: Vec<(usize, usize)>,
    /// Cover vertices on the left, sorted.
    pub s: Vec<usize>,
    /// Cover vertices on the right, sorted.
    pub t: Vec<usize>,
}

impl CoverResult {
    pub fn cover_size(&self) -> usize {
        self.s.len() + self.t.len()
    }
}

const NIL: usize = usize::MAX;

/// Hopcroft–Karp on the bipartite graph `(L, R, edges)`, followed by the König
/// cover obtained from alternating reachability out of unmatched left vertices.
///
/// The cover is `S = L ∖ Z`, `T = R ∩ Z` for the reachable set `Z`; among all
/// minimum covers it has the largest `S` and the smallest `T`.
pub fn max_matching_min_cover(l: usize, r: usize, edges: &[(usize, usize)]) -> CoverResult {
    let mut adj = vec![Vec::new(); l];
    for &(i, j) in edges {
        adj[i].push(j);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut mate_l = vec![NIL; l];
    let mut mate_r = vec![NIL; r];
    let mut dist = vec![0usize; l];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..l {
            if mate_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; l];
        for u in 0..l {
            if mate_l[u] == NIL {
                augment(u, &adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }

    let mut in_z_l = vec![false; l];
    let mut in_z_r = vec![false; r];
    let mut queue: VecDeque<usize> = (0..l).filter(|&u| mate_l[u] == NIL).collect();
    for &u in &queue {
        in_z_l[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !in_z_r[v] {
                in_z_r[v] = true;
                let w = mate_r[v];
                if w != NIL && !in_z_l[w] {
                    in_z_l[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    CoverResult {
        matching: (0..l).filter(|&u| mate_l[u] != NIL).map(|u| (u, mate_l[u])).collect(),
        s: (0..l).filter(|&u| !in_z_l[u]).collect(),
        t: (0..r).filter(|&v| in_z_r[v]).collect(),
    }
}

/// Iterative layered DFS from a free left vertex.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = mate_r[v];
        if w == NIL {
            // flip the path root … u, v
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = mate_l[u];
                mate_l[u] = v;
                mate_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_max_matching(l: usize, r: usize, edges: &[(usize, usize)]) -> usize {
        fn go(u: usize, l: usize, used: &mut [bool], adj: &[Vec<usize>]) -> usize {
            if u == l {
                return 0;
            }
            let mut best = go(u + 1, l, used, adj);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, l, used, adj));
                    used[v] = false;
                }
            }
            best
        }
        let mut adj = vec![Vec::new(); l];
        for &(i, j) in edges {
            adj[i].push(j);
        }
        go(0, l, &mut vec![false; r], &adj)
    }

    fn is_cover(c: &CoverResult, edges: &[(usize, usize)]) -> bool {
        edges.iter().all(|(i, j)| c.s.contains(i) || c.t.contains(j))
    }

    #[test]
    fn empty_graph() {
        let c = max_matching_min_cover(3, 3, &[]);
        assert!(c.matching.is_empty() && c.s.is_empty() && c.t.is_empty());
    }

    #[test]
    fn complete_two_by_two() {
        let e = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let c = max_matching_min_cover(2, 2, &e);
        assert_eq!(c.matching.len(), 2);
        assert_eq!(c.cover_size(), 2);
        assert!(is_cover(&c, &e));
    }

    #[test]
    fn star_cover_is_center() {
        let e = [(0, 0), (0, 1), (0, 2)];
        let c = max_matching_min_cover(3, 3, &e);
        assert_eq!(c.matching.len(), 1);
        assert_eq!((c.s.clone(), c.t.clone()), (vec![0], vec![]));
        // the star centered on the right
        let e = [(0, 1), (1, 1), (2, 1)];
        let c = max_matching_min_cover(3, 3, &e);
        assert_eq!((c.s, c.t), (vec![], vec![1]));
    }

    proptest! {
        #[test]
        fn konig_equality_against_enumeration(
            l in 1usize..=6,
            r in 1usize..=6,
            raw in prop::collection::vec((0usize..6, 0usize..6), 0..20),
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|&(i, j)| i < l && j < r).collect();
            let c = max_matching_min_cover(l, r, &edges);
            prop_assert_eq!(c.matching.len(), brute_max_matching(l, r, &edges));
            prop_assert_eq!(c.cover_size(), c.matching.len());
            prop_assert!(is_cover(&c, &edges));
            for &(i, j) in &c.matching {
                prop_assert!(edges.contains(&(i, j)));
            }
        }
    }
}
