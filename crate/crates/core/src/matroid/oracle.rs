use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A matroid on `{0, …, n−1}` given by an independence oracle.
pub trait Matroid: Sync {
    fn ground_size(&self) -> usize;
    /// Independence of a duplicate-free set.
    fn is_independent(&self, set: &[usize]) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uniform {
    pub n: usize,
    pub k: usize,
}

impl Matroid for Uniform {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        set.len() <= self.k
    }
}

/// Blocks partition the ground set; a set is independent when it meets block
/// `b` in at most `caps[b]` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    caps: Vec<usize>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::DimensionMismatch { expected: blocks.len(), got: caps.len() });
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n || block_of[x] != usize::MAX {
                    return Err(Error::InvalidInstance(format!("element {x} is out of range or in two blocks")));
                }
                block_of[x] = b;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidInstance(format!("element {x} is in no block")));
        }
        Ok(Partition { n, blocks, caps, block_of })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }
}

impl Matroid for Partition {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut used = vec![0usize; self.caps.len()];
        for &x in set {
            let b = self.block_of[x];
            used[b] += 1;
            if used[b] > self.caps[b] {
                return false;
            }
        }
        true
    }
}

/// A matroid listed by its bases, for small test oracles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseList {
    n: usize,
    bases: Vec<u64>,
}

impl BaseList {
    pub fn new(n: usize, bases: &[Vec<usize>]) -> Result<Self> {
        if n > 64 {
            return Err(Error::Capacity { what: "base-list ground set", size: n as u128, limit: 64 });
        }
        let masks: Vec<u64> = bases.iter().map(|b| b.iter().fold(0u64, |m, &x| m | 1 << x)).collect();
        if bases.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidInstance("base element out of range".into()));
        }
        let sizes: Vec<u32> = masks.iter().map(|m| m.count_ones()).collect();
        if masks.is_empty() || sizes.iter().any(|&s| s != sizes[0]) {
            return Err(Error::InvalidInstance("bases must be non-empty and equicardinal".into()));
        }
        Ok(BaseList { n, bases: masks })
    }

    pub fn bases(&self) -> Vec<Vec<usize>> {
        self.bases.iter().map(|&m| (0..self.n).filter(|&x| m >> x & 1 == 1).collect()).collect()
    }
}

impl Matroid for BaseList {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let m = set.iter().fold(0u64, |m, &x| m | 1 << x);
        self.bases.iter().any(|&b| b & m == m)
    }
}

/// Serializable description of a built-in matroid (the ground-set size is
/// supplied by the surrounding instance).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform { k: usize },
    Partition { blocks: Vec<Vec<usize>>, caps: Vec<usize> },
    Bases { bases: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinMatroid {
    Uniform(Uniform),
    Partition(Partition),
    Bases(BaseList),
}

impl BuiltinMatroid {
    pub fn from_spec(n: usize, spec: &MatroidSpec) -> Result<Self> {
        Ok(match spec {
            MatroidSpec::Uniform { k } => BuiltinMatroid::Uniform(Uniform { n, k: *k }),
            MatroidSpec::Partition { blocks, caps } => {
                BuiltinMatroid::Partition(Partition::new(n, blocks.clone(), caps.clone())?)
            }
            MatroidSpec::Bases { bases } => BuiltinMatroid::Bases(BaseList::new(n, bases)?),
        })
    }

    pub fn to_spec(&self) -> MatroidSpec {
        match self {
            BuiltinMatroid::Uniform(u) => MatroidSpec::Uniform { k: u.k },
            BuiltinMatroid::Partition(p) => MatroidSpec::Partition { blocks: p.blocks.clone(), caps: p.caps.clone() },
            BuiltinMatroid::Bases(b) => MatroidSpec::Bases { bases: b.bases() },
        }
    }
}

impl Matroid for BuiltinMatroid {
    fn ground_size(&self) -> usize {
        match self {
            BuiltinMatroid::Uniform(m) => m.ground_size(),
            BuiltinMatroid::Partition(m) => m.ground_size(),
            BuiltinMatroid::Bases(m) => m.ground_size(),
        }
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        match self {
            BuiltinMatroid::Uniform(m) => m.is_independent(set),
            BuiltinMatroid::Partition(m) => m.is_independent(set),
            BuiltinMatroid::Bases(m) => m.is_independent(set),
        }
    }
}

/// Wraps an oracle and counts independence calls.
pub struct CountingMatroid<'a> {
    inner: &'a dyn Matroid,
    calls: AtomicU64,
}

impl<'a> CountingMatroid<'a> {
    pub fn new(inner: &'a dyn Matroid) -> Self {
        CountingMatroid { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// The wrapped oracle, for checks that should not be counted.
    pub fn inner(&self) -> &'a dyn Matroid {
        self.inner
    }
}

impl Matroid for CountingMatroid<'_> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.is_independent(set)
    }
}

/// Elements in non-increasing `v`, ties by ascending index.
fn scan_order(v: &[i64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(v[x]), x));
    order
}

/// Greedy maximum-weight base, returned sorted.
pub fn greedy_max_weight_base(m: &dyn Matroid, v: &[i64]) -> Vec<usize> {
    let mut base = Vec::new();
    for x in scan_order(v) {
        base.push(x);
        if !m.is_independent(&base) {
            base.pop();
        }
    }
    base.sort_unstable();
    base
}

/// `max_{B} v(B)`.
pub fn max_base_weight(m: &dyn Matroid, v: &[i64]) -> i64 {
    greedy_max_weight_base(m, v).iter().map(|&x| v[x]).sum()
}

pub fn rank(m: &dyn Matroid) -> usize {
    greedy_max_weight_base(m, &vec![0; m.ground_size()]).len()
}

/// Rank of a subset, by growing an independent set inside it.
pub fn rank_of(m: &dyn Matroid, x: &[usize]) -> usize {
    let mut indep = Vec::new();
    for &e in x {
        indep.push(e);
        if !m.is_independent(&indep) {
            indep.pop();
        }
    }
    indep.len()
}

/// Independence of `I − removed + added` in `M^v`, with one call to the oracle of `M`.
///
/// `b_ref` must be a maximum `v`-weight base of `M` and `I` independent in `M^v`.
/// The test set is the level of `added` in `I − removed + added`, together
/// with the part of `b_ref` lying strictly above that level.
pub fn mv_query(
    m: &dyn Matroid,
    v: &[i64],
    b_ref: &[usize],
    i_set: &[usize],
    removed: Option<usize>,
    added: usize,
) -> Result<bool> {
    if i_set.contains(&added) {
        return Err(Error::Contract(format!("element {added} is already in I")));
    }
    if let Some(r) = removed {
        if !i_set.contains(&r) {
            return Err(Error::Contract(format!("element {r} is not in I")));
        }
    }
    check_levels(v, b_ref, i_set)?;
    let level = v[added];
    let mut test: Vec<usize> = i_set.iter().copied().filter(|&x| Some(x) != removed && v[x] == level).collect();
    test.push(added);
    test.extend(b_ref.iter().copied().filter(|&x| v[x] > level));
    Ok(m.is_independent(&test))
}

/// A set independent in `M^v` meets each level of `v` in at most as many
/// elements as a maximum-weight base does.
fn check_levels(v: &[i64], b_ref: &[usize], i_set: &[usize]) -> Result<()> {
    let mut count = std::collections::HashMap::<i64, i64>::new();
    for &x in b_ref {
        *count.entry(v[x]).or_default() += 1;
    }
    for &x in i_set {
        let c = count.entry(v[x]).or_default();
        *c -= 1;
        if *c < 0 {
            return Err(Error::Contract(format!("I is dependent in M^v at level {}", v[x])));
        }
    }
    Ok(())
}
