//! Weighted matroid intersection through the weight-splitting dual
//!
//! ```text
//! g(p) = max_{B ∈ B₁} p(B) + max_{B ∈ B₂} (w − p)(B),
//! ```
//!
//! an unconstrained L-convex function. The local step is a maximum-cardinality
//! intersection of `M₁^p` and `M₂^{w−p}`, each query of which costs one call to
//! the underlying oracle.

mod intersection;
mod oracle;

pub use intersection::{cardinality_intersection, ExchangeOracle, IntersectionResult, Plain, WeightedLevels};
pub use oracle::{
    greedy_max_weight_base, max_base_weight, mv_query, rank, rank_of, BaseList, BuiltinMatroid, CountingMatroid,
    Matroid, MatroidSpec, Partition, Uniform,
};

use serde::{Deserialize, Serialize};

use crate::descent::{
    long_step_length, round_ties_down, steepest_descent, Convexity, DescentOptions, DescentTrace, Direction, IntVector,
    LocalOracle, NeighborhoodMode, Objective, Sign, StepKind, StepRule, UnitStep,
};
use crate::error::{Error, Result};
use crate::value::ExtValue;

pub const WEIGHT_CAP: i64 = 1 << 31;

/// Largest ground set accepted by [`brute_force_matroid_intersection`].
pub const BRUTE_FORCE_MAX_GROUND: usize = 20;

/// Two matroids of equal rank on one ground set, with integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatroidInstance", into = "RawMatroidInstance")]
pub struct WeightedMIInstance {
    n: usize,
    m1: BuiltinMatroid,
    m2: BuiltinMatroid,
    w: Vec<i64>,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct RawMatroidInstance {
    n: usize,
    m1: MatroidSpec,
    m2: MatroidSpec,
    w: Vec<i64>,
}

impl TryFrom<RawMatroidInstance> for WeightedMIInstance {
    type Error = Error;

    fn try_from(raw: RawMatroidInstance) -> Result<Self> {
        WeightedMIInstance::new(
            BuiltinMatroid::from_spec(raw.n, &raw.m1)?,
            BuiltinMatroid::from_spec(raw.n, &raw.m2)?,
            raw.w,
        )
    }
}

impl From<WeightedMIInstance> for RawMatroidInstance {
    fn from(inst: WeightedMIInstance) -> Self {
        RawMatroidInstance { n: inst.n, m1: inst.m1.to_spec(), m2: inst.m2.to_spec(), w: inst.w }
    }
}

impl WeightedMIInstance {
    /// Checks ranks, weights, and that a common base exists.
    pub fn new(m1: BuiltinMatroid, m2: BuiltinMatroid, w: Vec<i64>) -> Result<Self> {
        let n = m1.ground_size();
        if n == 0 {
            return Err(Error::InvalidInstance("ground set must be non-empty".into()));
        }
        if m2.ground_size() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m2.ground_size() });
        }
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
        if let Some(x) = w.iter().find(|x| x.abs() > WEIGHT_CAP) {
            return Err(Error::InvalidInstance(format!("weight {x} exceeds 2^31")));
        }
        let r = rank(&m1);
        if rank(&m2) != r {
            return Err(Error::InvalidInstance(format!("ranks differ: {r} and {}", rank(&m2))));
        }
        let (c1, c2) = (CountingMatroid::new(&m1), CountingMatroid::new(&m2));
        if cardinality_intersection(&Plain(&c1), &Plain(&c2))?.common.len() < r {
            return Err(Error::NoCommonBase);
        }
        Ok(WeightedMIInstance { n, m1, m2, w, rank: r })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[i64] {
        &self.w
    }

    pub fn m1(&self) -> &BuiltinMatroid {
        &self.m1
    }

    pub fn m2(&self) -> &BuiltinMatroid {
        &self.m2
    }

    /// `W = ‖w‖∞`.
    pub fn max_abs_weight(&self) -> i64 {
        self.w.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn weight_of(&self, set: &[usize]) -> i64 {
        set.iter().map(|&x| self.w[x]).sum()
    }
}

fn dual_with(m1: &dyn Matroid, m2: &dyn Matroid, w: &[i64], p: &[i64]) -> i64 {
    let q: Vec<i64> = w.iter().zip(p).map(|(a, b)| a - b).collect();
    max_base_weight(m1, p) + max_base_weight(m2, &q)
}

/// `g(p)` by two greedy runs.
pub fn dual_value(inst: &WeightedMIInstance, p: &[i64]) -> Result<i64> {
    if p.len() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: p.len() });
    }
    Ok(dual_with(&inst.m1, &inst.m2, &inst.w, p))
}

/// The dual as an objective, with oracle calls counted.
pub struct MatroidDual<'a> {
    inst: &'a WeightedMIInstance,
    m1: &'a CountingMatroid<'a>,
    m2: &'a CountingMatroid<'a>,
}

impl<'a> MatroidDual<'a> {
    pub fn new(inst: &'a WeightedMIInstance, m1: &'a CountingMatroid<'a>, m2: &'a CountingMatroid<'a>) -> Self {
        MatroidDual { inst, m1, m2 }
    }
}

impl Objective for MatroidDual<'_> {
    fn dim(&self) -> usize {
        self.inst.n
    }

    fn eval(&self, p: &[i64]) -> ExtValue {
        ExtValue::Finite(dual_with(self.m1, self.m2, &self.inst.w, p))
    }

    fn convexity(&self) -> Convexity {
        Convexity::L
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidLocal {
    /// Minimizer of `g(p + 1_X) − g(p)`.
    pub x: Vec<usize>,
    /// `g(p + 1_X) − g(p) = |I| − r`.
    pub improvement: i64,
    /// Maximum common independent set of `M₁^p` and `M₂^{w−p}`.
    pub common: Vec<usize>,
}

/// Solves the local problem at `p` by cardinality intersection of `M₁^p` and `M₂^{w−p}`.
pub fn matroid_local_direction(
    inst: &WeightedMIInstance,
    p: &[i64],
    m1: &CountingMatroid<'_>,
    m2: &CountingMatroid<'_>,
) -> Result<MatroidLocal> {
    if p.len() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: p.len() });
    }
    let q: Vec<i64> = inst.w.iter().zip(p).map(|(a, b)| a - b).collect();
    let b1 = greedy_max_weight_base(m1, p);
    let b2 = greedy_max_weight_base(m2, &q);
    let o1 = WeightedLevels::new(m1, p.to_vec(), b1);
    let o2 = WeightedLevels::new(m2, q, b2);
    let res = cardinality_intersection(&o1, &o2)?;
    let improvement = res.common.len() as i64 - inst.rank as i64;

    let mut moved = p.to_vec();
    res.x_min.iter().for_each(|&x| moved[x] += 1);
    let (inner1, inner2) = (m1.inner(), m2.inner());
    let actual = dual_with(inner1, inner2, &inst.w, &moved) - dual_with(inner1, inner2, &inst.w, p);
    if actual != improvement {
        return Err(Error::InvariantViolation(format!("local change {actual} differs from |I| − r = {improvement}")));
    }
    Ok(MatroidLocal { x: res.x_min, improvement, common: res.common })
}

pub struct MatroidLocalOracle<'a> {
    inst: &'a WeightedMIInstance,
    m1: &'a CountingMatroid<'a>,
    m2: &'a CountingMatroid<'a>,
    last: Option<MatroidLocal>,
}

impl<'a> MatroidLocalOracle<'a> {
    pub fn new(inst: &'a WeightedMIInstance, m1: &'a CountingMatroid<'a>, m2: &'a CountingMatroid<'a>) -> Self {
        MatroidLocalOracle { inst, m1, m2, last: None }
    }

    pub fn last(&self) -> Option<&MatroidLocal> {
        self.last.as_ref()
    }
}

impl LocalOracle for MatroidLocalOracle<'_> {
    fn direction(&mut self, _: &dyn Objective, p: &[i64], _: NeighborhoodMode) -> Result<Direction> {
        let local = matroid_local_direction(self.inst, p, self.m1, self.m2)?;
        let d = if local.improvement == 0 { Direction::zero() } else { Direction::new(local.x.clone(), Sign::Plus) };
        self.last = Some(local);
        Ok(d)
    }
}

/// Long-step cap along `1_X` at `p`.
///
/// Some optimum lies within `rW` of a shift of zero, so from `p` no long step
/// needs to exceed `spread(p) + 2rW`; `4rW + 1` covers starts near the optimum.
pub fn step_cap(inst: &WeightedMIInstance, p: &[i64]) -> i64 {
    let w = inst.max_abs_weight();
    let r = inst.rank as i64;
    let spread = p.iter().max().unwrap_or(&0) - p.iter().min().unwrap_or(&0);
    (4 * r * w + 1).max(spread + 2 * r * w + 2)
}

/// Long step along `1_X` by doubling and bisection, capped by [`step_cap`].
pub fn matroid_step_length(inst: &WeightedMIInstance, p: &[i64], x: &[usize]) -> Result<i64> {
    let g = FreeDual(inst);
    let d = Direction::new(x.to_vec(), Sign::Plus);
    let change = g.eval(&d.apply(p, 1)).diff(g.eval(p)).unwrap_or(0);
    if change >= 0 {
        return Err(Error::Contract("step requested along a non-improving direction".into()));
    }
    capped_long_step(inst, &g, p, &d, change)
}

fn capped_long_step(
    inst: &WeightedMIInstance,
    g: &dyn Objective,
    p: &[i64],
    d: &Direction,
    change: i64,
) -> Result<i64> {
    let cap = step_cap(inst, p);
    long_step_length(g, p, d, change, cap).map_err(|e| match e {
        Error::UnboundedDirection { cap } => {
            Error::InvariantViolation(format!("dual slope stays linear beyond the step cap {cap}"))
        }
        other => other,
    })
}

/// Uncounted dual, for standalone step computations.
struct FreeDual<'a>(&'a WeightedMIInstance);

impl Objective for FreeDual<'_> {
    fn dim(&self) -> usize {
        self.0.n
    }

    fn eval(&self, p: &[i64]) -> ExtValue {
        ExtValue::Finite(dual_with(&self.0.m1, &self.0.m2, &self.0.w, p))
    }

    fn convexity(&self) -> Convexity {
        Convexity::L
    }
}

struct MatroidLongStep<'a> {
    inst: &'a WeightedMIInstance,
}

impl StepRule for MatroidLongStep<'_> {
    fn length(&mut self, g: &dyn Objective, p: &[i64], d: &Direction, unit_change: i64) -> Result<i64> {
        capped_long_step(self.inst, g, p, d, unit_change)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatroidSolution {
    /// A maximum-weight common base, sorted.
    pub base: Vec<usize>,
    pub weight: i64,
    /// Optimal dual with `g(p) = weight`.
    pub dual: IntVector,
    pub start: IntVector,
    pub trace: DescentTrace,
    /// Independence calls to both matroids, including greedy evaluations of `g`.
    pub oracle_calls: u64,
}

/// Warm-started solve: the domain is all of `Z^V`, so the prediction is only rounded.
pub fn solve_matroid_intersection(inst: &WeightedMIInstance, p_hat: &[f64], step: StepKind) -> Result<MatroidSolution> {
    if p_hat.len() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: p_hat.len() });
    }
    let p0 = round_ties_down(p_hat)?;
    solve_matroid_from(inst, p0, step)
}

pub fn solve_matroid_from(inst: &WeightedMIInstance, p0: IntVector, step: StepKind) -> Result<MatroidSolution> {
    let (c1, c2) = (CountingMatroid::new(&inst.m1), CountingMatroid::new(&inst.m2));
    let g = MatroidDual::new(inst, &c1, &c2);
    let mut local = MatroidLocalOracle::new(inst, &c1, &c2);
    let spread = p0.iter().max().unwrap() - p0.iter().min().unwrap();
    let range = (4 * inst.rank as i64 * inst.max_abs_weight() + spread + 2) as u64;
    let opts = DescentOptions::for_range(inst.n, range);
    let (p, trace) = match step {
        StepKind::Unit => steepest_descent(&g, &mut local, &mut UnitStep, p0.clone(), &opts)?,
        StepKind::Long => steepest_descent(&g, &mut local, &mut MatroidLongStep { inst }, p0.clone(), &opts)?,
    };
    let last = local.last.take().ok_or_else(|| Error::InvariantViolation("no local step was taken".into()))?;
    let base = last.common;
    let weight = inst.weight_of(&base);
    let value = dual_with(&inst.m1, &inst.m2, &inst.w, &p);
    let is_common_base = base.len() == inst.rank && inst.m1.is_independent(&base) && inst.m2.is_independent(&base);
    if !is_common_base || value != weight {
        return Err(Error::InvariantViolation(format!(
            "no weight-splitting certificate: |B| = {}, w(B) = {weight}, g(p) = {value}",
            base.len()
        )));
    }
    Ok(MatroidSolution { base, weight, dual: p, start: p0, trace, oracle_calls: c1.calls() + c2.calls() })
}

/// `min_c ‖p − c·1‖∞ = (max p − min p) / 2` for an optimal dual `p`.
pub fn normalized_dual_norm(inst: &WeightedMIInstance, p: &[i64]) -> Result<f64> {
    let (c1, c2) = (CountingMatroid::new(&inst.m1), CountingMatroid::new(&inst.m2));
    let local = matroid_local_direction(inst, p, &c1, &c2)?;
    if local.improvement != 0 {
        return Err(Error::Contract("dual point is not optimal".into()));
    }
    let hi = *p.iter().max().unwrap();
    let lo = *p.iter().min().unwrap();
    Ok((hi - lo) as f64 / 2.0)
}

/// Optimal weight and every maximum-weight common base, by enumeration.
pub fn brute_force_matroid_intersection(inst: &WeightedMIInstance) -> Result<(i64, Vec<Vec<usize>>)> {
    let n = inst.n;
    if n > BRUTE_FORCE_MAX_GROUND {
        return Err(Error::Capacity {
            what: "matroid enumeration ground set",
            size: n as u128,
            limit: BRUTE_FORCE_MAX_GROUND as u128,
        });
    }
    let mut best: Option<i64> = None;
    let mut all = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != inst.rank {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
        if !(inst.m1.is_independent(&set) && inst.m2.is_independent(&set)) {
            continue;
        }
        let w = inst.weight_of(&set);
        match best {
            Some(b) if w < b => {}
            Some(b) if w == b => all.push(set),
            _ => {
                best = Some(w);
                all = vec![set];
            }
        }
    }
    best.map(|b| (b, all)).ok_or(Error::NoCommonBase)
}

/// The partition-matroid family on which every optimal dual has normalized
/// norm at least `rW` (`n` odd, `r = (n − 1)/2`).
///
/// With 1-based labels, `M₁` has blocks `{2,3}, {4,5}, …` of capacity one and
/// `{1}` of capacity zero; `M₂` has blocks `{1,2}, {3,4}, …` and `{n}` of
/// capacity zero; `w_i = (−1)^{i+1} W`. The unique common base is `{2, 4, …, n−1}`.
pub fn tight_example(n: usize, w: i64) -> Result<WeightedMIInstance> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidInstance(format!("tight example needs odd n ≥ 3, got {n}")));
    }
    let mut b1 = vec![vec![0]];
    let mut c1 = vec![0];
    for k in (1..n).step_by(2) {
        b1.push(vec![k, k + 1]);
        c1.push(1);
    }
    let mut b2 = Vec::new();
    let mut c2 = Vec::new();
    for k in (0..n - 1).step_by(2) {
        b2.push(vec![k, k + 1]);
        c2.push(1);
    }
    b2.push(vec![n - 1]);
    c2.push(0);
    let weights = (0..n).map(|k| if k % 2 == 0 { w } else { -w }).collect();
    WeightedMIInstance::new(
        BuiltinMatroid::Partition(Partition::new(n, b1, c1)?),
        BuiltinMatroid::Partition(Partition::new(n, b2, c2)?),
        weights,
    )
}

/// An optimal dual of [`tight_example`] with `‖p‖∞ = rW` exactly.
///
/// Optimality of `g` there means `p_{2k} − p_{2k−1} ≤ −2W` and
/// `p_{2k+1} ≤ p_{2k}` (1-based), so the spread of any optimum is at least
/// `(n − 1)W = 2rW`. The witness is `p_1 = rW`, `p_{2k} = p_{2k+1} = rW − 2kW`.
pub fn tight_example_witness(n: usize, w: i64) -> Vec<i64> {
    let r = (n as i64 - 1) / 2;
    (0..n as i64).map(|x| if x == 0 { r * w } else { r * w - 2 * ((x + 1) / 2) * w }).collect()
}
