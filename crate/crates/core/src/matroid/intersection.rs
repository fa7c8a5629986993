use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::oracle::{max_base_weight, mv_query, rank_of, CountingMatroid, Matroid};

/// The two kinds of query an augmenting-path algorithm asks about a common
/// independent set `I`.
pub trait ExchangeOracle {
    fn ground_size(&self) -> usize;
    /// Independence of `I − removed + added`.
    fn test(&self, i_set: &[usize], removed: Option<usize>, added: usize) -> Result<bool>;
    /// Rank of `x`, computed without touching any call counter.
    fn certify_rank(&self, x: &[usize]) -> usize;
}

/// Queries answered directly by a matroid oracle.
pub struct Plain<'a>(pub &'a CountingMatroid<'a>);

impl ExchangeOracle for Plain<'_> {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }

    fn test(&self, i_set: &[usize], removed: Option<usize>, added: usize) -> Result<bool> {
        let mut set: Vec<usize> = i_set.iter().copied().filter(|&x| Some(x) != removed).collect();
        set.push(added);
        Ok(self.0.is_independent(&set))
    }

    fn certify_rank(&self, x: &[usize]) -> usize {
        rank_of(self.0.inner(), x)
    }
}

/// `M^v`, the matroid of maximum `v`-weight bases of `M`, queried through
/// [`mv_query`] against a fixed reference base.
pub struct WeightedLevels<'a> {
    m: &'a CountingMatroid<'a>,
    v: Vec<i64>,
    b_ref: Vec<usize>,
}

impl<'a> WeightedLevels<'a> {
    pub fn new(m: &'a CountingMatroid<'a>, v: Vec<i64>, b_ref: Vec<usize>) -> Self {
        WeightedLevels { m, v, b_ref }
    }
}

impl ExchangeOracle for WeightedLevels<'_> {
    fn ground_size(&self) -> usize {
        self.m.ground_size()
    }

    fn test(&self, i_set: &[usize], removed: Option<usize>, added: usize) -> Result<bool> {
        mv_query(self.m, &self.v, &self.b_ref, i_set, removed, added)
    }

    /// `ρ^v(X) = max (v + 1_X)(B) − max v(B)`.
    fn certify_rank(&self, x: &[usize]) -> usize {
        let mut lifted = self.v.clone();
        x.iter().for_each(|&e| lifted[e] += 1);
        let inner = self.m.inner();
        (max_base_weight(inner, &lifted) - max_base_weight(inner, &self.v)) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionResult {
    /// A maximum common independent set, sorted.
    pub common: Vec<usize>,
    /// A minimizer of `ρ₁(X) + ρ₂(V ∖ X)`, sorted.
    pub x_min: Vec<usize>,
}

/// Maximum-cardinality common independent set by shortest augmenting paths in
/// the exchange graph, with the Edmonds min-max certificate.
///
/// Arcs run `y → z` when `I − y + z` is independent in the first matroid and
/// `z → y` when it is independent in the second; paths go from elements that
/// can be added in the first matroid to those that can be added in the second.
/// When no path remains, `x_min` is the complement of the set reachable from the sources.
pub fn cardinality_intersection(o1: &dyn ExchangeOracle, o2: &dyn ExchangeOracle) -> Result<IntersectionResult> {
    let n = o1.ground_size();
    if o2.ground_size() != n {
        return Err(Error::DimensionMismatch { expected: n, got: o2.ground_size() });
    }
    let mut in_i = vec![false; n];
    loop {
        let i_set: Vec<usize> = (0..n).filter(|&x| in_i[x]).collect();
        let mut sink = vec![false; n];
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for z in (0..n).filter(|&z| !in_i[z]) {
            if o1.test(&i_set, None, z)? {
                seen[z] = true;
                queue.push_back(z);
            }
        }
        let mut end = None;
        while let Some(u) = queue.pop_front() {
            if !in_i[u] {
                sink[u] = o2.test(&i_set, None, u)?;
                if sink[u] {
                    end = Some(u);
                    break;
                }
                for &y in &i_set {
                    if !seen[y] && o2.test(&i_set, Some(y), u)? {
                        seen[y] = true;
                        parent[y] = u;
                        queue.push_back(y);
                    }
                }
            } else {
                for z in (0..n).filter(|&z| !in_i[z]) {
                    if !seen[z] && o1.test(&i_set, Some(u), z)? {
                        seen[z] = true;
                        parent[z] = u;
                        queue.push_back(z);
                    }
                }
            }
        }
        match end {
            Some(mut z) => loop {
                in_i[z] = !in_i[z];
                if parent[z] == usize::MAX {
                    break;
                }
                z = parent[z];
            },
            None => {
                let common = i_set;
                let x_min: Vec<usize> = (0..n).filter(|&x| !seen[x]).collect();
                let complement: Vec<usize> = (0..n).filter(|&x| seen[x]).collect();
                let bound = o1.certify_rank(&x_min) + o2.certify_rank(&complement);
                if bound != common.len() {
                    return Err(Error::InvariantViolation(format!(
                        "min-max certificate fails: |I| = {} but rank bound = {bound}",
                        common.len()
                    )));
                }
                return Ok(IntersectionResult { common, x_min });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::oracle::{Partition, Uniform};

    #[test]
    fn two_uniform_rank_two() {
        let u = Uniform { n: 3, k: 2 };
        let (a, b) = (CountingMatroid::new(&u), CountingMatroid::new(&u));
        let res = cardinality_intersection(&Plain(&a), &Plain(&b)).unwrap();
        assert_eq!(res.common.len(), 2);
        assert!(a.calls() > 0 && b.calls() > 0);
    }

    #[test]
    fn tight_family_has_unique_common_base() {
        let m1 = Partition::new(5, vec![vec![0], vec![1, 2], vec![3, 4]], vec![0, 1, 1]).unwrap();
        let m2 = Partition::new(5, vec![vec![0, 1], vec![2, 3], vec![4]], vec![1, 1, 0]).unwrap();
        let (a, b) = (CountingMatroid::new(&m1), CountingMatroid::new(&m2));
        let res = cardinality_intersection(&Plain(&a), &Plain(&b)).unwrap();
        assert_eq!(res.common, vec![1, 3]);
    }

    #[test]
    fn disjoint_supports_give_empty_intersection() {
        let m1 = Partition::new(2, vec![vec![0], vec![1]], vec![1, 0]).unwrap();
        let m2 = Partition::new(2, vec![vec![0], vec![1]], vec![0, 1]).unwrap();
        let (a, b) = (CountingMatroid::new(&m1), CountingMatroid::new(&m2));
        let res = cardinality_intersection(&Plain(&a), &Plain(&b)).unwrap();
        assert!(res.common.is_empty());
    }
}
