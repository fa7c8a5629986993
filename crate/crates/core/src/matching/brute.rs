use crate::error::{Error, Result};

use super::MatchingInstance;

pub const BRUTE_FORCE_MAX_SIDE: usize = 8;

/// A matching as `(left, right)` pairs.
pub type Pairs = Vec<(usize, usize)>;

/// Optimal weight and every optimal perfect matching, by enumerating permutations.
pub fn brute_force_matching(inst: &MatchingInstance) -> Result<(i64, Vec<Pairs>)> {
    let h = inst.side();
    if h > BRUTE_FORCE_MAX_SIDE {
        return Err(Error::Capacity {
            what: "matching enumeration side",
            size: h as u128,
            limit: BRUTE_FORCE_MAX_SIDE as u128,
        });
    }
    let mut weight = vec![vec![None; h]; h];
    for e in inst.edges() {
        weight[e.i][e.j] = Some(e.w);
    }
    let mut best: Option<i64> = None;
    let mut all = Vec::new();
    let mut current = Vec::with_capacity(h);
    let mut used = vec![false; h];
    enumerate(0, 0, &weight, &mut used, &mut current, &mut best, &mut all);
    match best {
        Some(b) => Ok((b, all)),
        None => Err(Error::NoPerfectMatching),
    }
}

fn enumerate(
    i: usize,
    acc: i64,
    weight: &[Vec<Option<i64>>],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    best: &mut Option<i64>,
    all: &mut Vec<Vec<(usize, usize)>>,
) {
    let h = weight.len();
    if i == h {
        match best {
            Some(b) if acc < *b => {}
            Some(b) if acc == *b => all.push(current.clone()),
            _ => {
                *best = Some(acc);
                all.clear();
                all.push(current.clone());
            }
        }
        return;
    }
    for j in 0..h {
        if let (false, Some(w)) = (used[j], weight[i][j]) {
            used[j] = true;
            current.push((i, j));
            enumerate(i + 1, acc + w, weight, used, current, best, all);
            current.pop();
            used[j] = false;
        }
    }
}
