//! Maximum-weight perfect bipartite matching through its L-convex dual
//!
//! ```text
//! minimize Σ s_i − Σ t_j   subject to   s_i − t_j ≥ w_ij  for (i, j) ∈ E.
//! ```
//!
//! The local step extracts a maximum matching on the tight edges; its König
//! cover `(S, T)` gives the steepest direction `(1_S, 1_{R∖T})`, and the exact
//! long step is the smallest slack among edges the cover misses.

mod brute;
mod hopcroft_karp;

pub use brute::{brute_force_matching, BRUTE_FORCE_MAX_SIDE};
pub use hopcroft_karp::{max_matching_min_cover, CoverResult};

use serde::{Deserialize, Serialize};

use crate::descent::{
    linf_pm_distance_f64, round_ties_down, steepest_descent, Convexity, DescentOptions, DescentTrace, Direction,
    IntVector, LocalOracle, LongStep, NeighborhoodMode, Objective, Sign, StepKind, StepRule, UnitStep,
};
use crate::error::{Error, Result};
use crate::lnat::LNatSystem;
use crate::value::ExtValue;

/// Largest admissible `|w_e|`.
pub const WEIGHT_CAP: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, i64)", into = "(usize, usize, i64)")]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: i64,
}

impl From<(usize, usize, i64)> for Edge {
    fn from((i, j, w): (usize, usize, i64)) -> Self {
        Edge { i, j, w }
    }
}

impl From<Edge> for (usize, usize, i64) {
    fn from(e: Edge) -> Self {
        (e.i, e.j, e.w)
    }
}

/// A bipartite graph with `|L| = |R|` and integer edge weights, known to have a
/// perfect matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatching", into = "RawMatching")]
pub struct MatchingInstance {
    l: usize,
    r: usize,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawMatching {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "R")]
    r: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawMatching> for MatchingInstance {
    type Error = Error;

    fn try_from(raw: RawMatching) -> Result<Self> {
        MatchingInstance::new(raw.l, raw.r, raw.edges)
    }
}

impl From<MatchingInstance> for RawMatching {
    fn from(m: MatchingInstance) -> Self {
        RawMatching { l: m.l, r: m.r, edges: m.edges }
    }
}

impl MatchingInstance {
    /// Validates sizes, indices and weights, and checks that a perfect matching exists.
    pub fn new(l: usize, r: usize, edges: Vec<Edge>) -> Result<Self> {
        if l != r || l == 0 {
            return Err(Error::InvalidInstance(format!("sides must be equal and non-empty, got {l} and {r}")));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.i >= l || e.j >= r {
                return Err(Error::InvalidInstance(format!("edge ({}, {}) out of range", e.i, e.j)));
            }
            if e.w.abs() > WEIGHT_CAP {
                return Err(Error::InvalidInstance(format!("weight {} exceeds 2^31", e.w)));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        let inst = MatchingInstance { l, r, edges };
        let pairs: Vec<_> = inst.edges.iter().map(|e| (e.i, e.j)).collect();
        if max_matching_min_cover(l, r, &pairs).matching.len() < l {
            return Err(Error::NoPerfectMatching);
        }
        Ok(inst)
    }

    /// `|L| = |R| = n/2`.
    pub fn side(&self) -> usize {
        self.l
    }

    /// `n = |L| + |R|`.
    pub fn dim(&self) -> usize {
        self.l + self.r
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn max_abs_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.w.abs()).max().unwrap_or(0)
    }

    /// Weight of a set of `(i, j)` pairs; `None` if one of them is not an edge.
    pub fn matching_weight(&self, m: &[(usize, usize)]) -> Option<i64> {
        m.iter().map(|&(i, j)| self.edges.iter().find(|e| e.i == i && e.j == j).map(|e| e.w)).sum()
    }

    /// The dual domain as an L♮-system over `(s, t)`: `t_j − s_i ≤ −w_ij`.
    pub fn dual_domain(&self) -> LNatSystem {
        let n = self.dim();
        let gamma = self.edges.iter().map(|e| (e.i, self.l + e.j, -e.w));
        LNatSystem::new(n, vec![None; n], vec![None; n], gamma).expect("dual domain of a valid instance is non-empty")
    }
}

/// Integral dual variables `p = (s, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualPair {
    pub s: Vec<i64>,
    pub t: Vec<i64>,
}

/// Real-valued dual point, used for predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealDualPair {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

impl DualPair {
    pub fn to_vec(&self) -> Vec<i64> {
        self.s.iter().chain(&self.t).copied().collect()
    }

    pub fn from_slice(l: usize, p: &[i64]) -> Self {
        DualPair { s: p[..l].to_vec(), t: p[l..].to_vec() }
    }

    pub fn to_real(&self) -> RealDualPair {
        RealDualPair { s: self.s.iter().map(|&v| v as f64).collect(), t: self.t.iter().map(|&v| v as f64).collect() }
    }
}

impl RealDualPair {
    pub fn to_vec(&self) -> Vec<f64> {
        self.s.iter().chain(&self.t).copied().collect()
    }

    pub fn from_slice(l: usize, p: &[f64]) -> Self {
        RealDualPair { s: p[..l].to_vec(), t: p[l..].to_vec() }
    }
}

fn check_dims(inst: &MatchingInstance, s: usize, t: usize) -> Result<()> {
    if s != inst.l {
        return Err(Error::DimensionMismatch { expected: inst.l, got: s });
    }
    if t != inst.r {
        return Err(Error::DimensionMismatch { expected: inst.r, got: t });
    }
    Ok(())
}

/// `Σs − Σt` and whether every edge constraint holds.
pub fn dual_objective(inst: &MatchingInstance, p: &DualPair) -> Result<(i64, bool)> {
    check_dims(inst, p.s.len(), p.t.len())?;
    let value = p.s.iter().sum::<i64>() - p.t.iter().sum::<i64>();
    let feasible = inst.edges.iter().all(|e| p.s[e.i] - p.t[e.j] >= e.w);
    Ok((value, feasible))
}

/// `ε = max_e (w_ij − ŝ_i + t̂_j)`.
fn violation(inst: &MatchingInstance, p: &RealDualPair) -> f64 {
    inst.edges.iter().map(|e| e.w as f64 - p.s[e.i] + p.t[e.j]).fold(f64::NEG_INFINITY, f64::max)
}

/// The ℓ∞±-projection `(ŝ + ε/2, t̂ − ε/2)` onto the relaxed dual domain, before rounding.
pub fn project_dual_real(inst: &MatchingInstance, p_hat: &RealDualPair) -> Result<RealDualPair> {
    check_dims(inst, p_hat.s.len(), p_hat.t.len())?;
    if let Some(&x) = p_hat.s.iter().chain(&p_hat.t).find(|x| !x.is_finite()) {
        return Err(Error::Overflow { value: x });
    }
    let eps = violation(inst, p_hat);
    Ok(shift(p_hat, eps))
}

fn shift(p: &RealDualPair, eps: f64) -> RealDualPair {
    if eps <= 0.0 {
        return p.clone();
    }
    let h = eps / 2.0;
    RealDualPair { s: p.s.iter().map(|v| v + h).collect(), t: p.t.iter().map(|v| v - h).collect() }
}

/// Projects a real prediction and rounds it into the dual domain.
///
/// Dyadic inputs are handled exactly. For other inputs a floating-point
/// residual can leave the rounded point a hair infeasible; ε is then widened
/// by a relative `10⁻⁹` and the shift repeated.
pub fn project_dual(inst: &MatchingInstance, p_hat: &RealDualPair) -> Result<DualPair> {
    check_dims(inst, p_hat.s.len(), p_hat.t.len())?;
    if let Some(&x) = p_hat.s.iter().chain(&p_hat.t).find(|x| !x.is_finite()) {
        return Err(Error::Overflow { value: x });
    }
    let mut eps = violation(inst, p_hat);
    for _ in 0..8 {
        let q = shift(p_hat, eps);
        let p = DualPair::from_slice(inst.l, &round_ties_down(&q.to_vec())?);
        if dual_objective(inst, &p)?.1 {
            return Ok(p);
        }
        eps += 1e-9 * eps.abs().max(1.0);
    }
    Err(Error::InvariantViolation("rounded projection is not dual feasible".into()))
}

/// Indices into [`MatchingInstance::edges`] of the tight edges `s_i − t_j = w_ij`.
pub fn tight_edges(inst: &MatchingInstance, p: &DualPair) -> Result<Vec<usize>> {
    check_dims(inst, p.s.len(), p.t.len())?;
    let mut out = Vec::new();
    for (k, e) in inst.edges.iter().enumerate() {
        let slack = p.s[e.i] - p.t[e.j] - e.w;
        if slack < 0 {
            return Err(Error::InfeasibleDual(e.i, e.j));
        }
        if slack == 0 {
            out.push(k);
        }
    }
    Ok(out)
}

/// Smallest slack over edges with `i ∉ S` and `j ∉ T`.
pub fn matching_step_length(inst: &MatchingInstance, p: &DualPair, s: &[usize], t: &[usize]) -> Result<i64> {
    check_dims(inst, p.s.len(), p.t.len())?;
    let mut in_s = vec![false; inst.l];
    let mut in_t = vec![false; inst.r];
    s.iter().for_each(|&i| in_s[i] = true);
    t.iter().for_each(|&j| in_t[j] = true);
    inst.edges
        .iter()
        .filter(|e| !in_s[e.i] && !in_t[e.j])
        .map(|e| p.s[e.i] - p.t[e.j] - e.w)
        .min()
        .ok_or_else(|| Error::InvariantViolation("no edge leaves the cover; the dual is unbounded".into()))
}

/// A simple feasible dual: `s_i = max_j w_ij`, `t = 0`.
pub fn cold_start(inst: &MatchingInstance) -> DualPair {
    let mut s = vec![i64::MIN; inst.l];
    for e in &inst.edges {
        s[e.i] = s[e.i].max(e.w);
    }
    DualPair { s, t: vec![0; inst.r] }
}

/// The dual objective as an L-convex function on `Z^{L ∪ R}`.
pub struct MatchingDual<'a> {
    inst: &'a MatchingInstance,
}

impl<'a> MatchingDual<'a> {
    pub fn new(inst: &'a MatchingInstance) -> Self {
        MatchingDual { inst }
    }
}

impl Objective for MatchingDual<'_> {
    fn dim(&self) -> usize {
        self.inst.dim()
    }

    fn eval(&self, p: &[i64]) -> ExtValue {
        let l = self.inst.l;
        if self.inst.edges.iter().any(|e| p[e.i] - p[l + e.j] < e.w) {
            return ExtValue::Infinite;
        }
        ExtValue::Finite(p[..l].iter().sum::<i64>() - p[l..].iter().sum::<i64>())
    }

    fn convexity(&self) -> Convexity {
        Convexity::L
    }
}

/// Local oracle: Hopcroft–Karp on the tight subgraph and its König cover.
pub struct MatchingLocalOracle<'a> {
    inst: &'a MatchingInstance,
    last: Option<CoverResult>,
}

impl<'a> MatchingLocalOracle<'a> {
    pub fn new(inst: &'a MatchingInstance) -> Self {
        MatchingLocalOracle { inst, last: None }
    }

    pub fn last_cover(&self) -> Option<&CoverResult> {
        self.last.as_ref()
    }
}

impl LocalOracle for MatchingLocalOracle<'_> {
    fn direction(&mut self, _: &dyn Objective, p: &[i64], _: NeighborhoodMode) -> Result<Direction> {
        let inst = self.inst;
        let dual = DualPair::from_slice(inst.l, p);
        let tight: Vec<_> = tight_edges(inst, &dual)?.into_iter().map(|k| (inst.edges[k].i, inst.edges[k].j)).collect();
        let cover = max_matching_min_cover(inst.l, inst.r, &tight);
        let dir = if cover.cover_size() == inst.l {
            Direction::zero()
        } else {
            let mut in_t = vec![false; inst.r];
            cover.t.iter().for_each(|&j| in_t[j] = true);
            let support =
                cover.s.iter().copied().chain((0..inst.r).filter(|&j| !in_t[j]).map(|j| inst.l + j)).collect();
            Direction::new(support, Sign::Plus)
        };
        self.last = Some(cover);
        Ok(dir)
    }
}

/// Exact long step along a cover direction.
pub struct MatchingLongStep<'a> {
    inst: &'a MatchingInstance,
}

impl<'a> MatchingLongStep<'a> {
    pub fn new(inst: &'a MatchingInstance) -> Self {
        MatchingLongStep { inst }
    }
}

impl StepRule for MatchingLongStep<'_> {
    fn length(&mut self, _: &dyn Objective, p: &[i64], d: &Direction, _: i64) -> Result<i64> {
        let l = self.inst.l;
        let s: Vec<usize> = d.support.iter().copied().filter(|&k| k < l).collect();
        let mut in_d = vec![false; self.inst.r];
        d.support.iter().filter(|&&k| k >= l).for_each(|&k| in_d[k - l] = true);
        let t: Vec<usize> = (0..self.inst.r).filter(|&j| !in_d[j]).collect();
        matching_step_length(self.inst, &DualPair::from_slice(l, p), &s, &t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingSolution {
    /// A maximum-weight perfect matching, as `(i, j)` pairs sorted by `i`.
    pub matching: Vec<(usize, usize)>,
    pub weight: i64,
    /// Optimal dual, with `Σs − Σt = weight`.
    pub dual: DualPair,
    /// The rounded projection the descent started from.
    pub start: DualPair,
    pub trace: DescentTrace,
}

/// Warm-started solve from a real prediction: project, round, descend.
pub fn solve_matching(inst: &MatchingInstance, p_hat: &RealDualPair, step: StepKind) -> Result<MatchingSolution> {
    let p0 = project_dual(inst, p_hat)?;
    solve_matching_from(inst, p0, step)
}

/// Descent from a feasible integral dual.
pub fn solve_matching_from(inst: &MatchingInstance, p0: DualPair, step: StepKind) -> Result<MatchingSolution> {
    let g = MatchingDual::new(inst);
    let mut local = MatchingLocalOracle::new(inst);
    let start = IntVector::new(p0.to_vec())?;
    let spread = start.iter().max().unwrap() - start.iter().min().unwrap();
    let opts = DescentOptions::for_range(inst.dim(), (4 * inst.max_abs_weight() + spread + 2) as u64);
    let (p, trace) = match step {
        StepKind::Unit => steepest_descent(&g, &mut local, &mut UnitStep, start, &opts)?,
        StepKind::Long => steepest_descent(&g, &mut local, &mut MatchingLongStep::new(inst), start, &opts)?,
    };
    let cover = local.last.take().ok_or_else(|| Error::InvariantViolation("no local step was taken".into()))?;
    let dual = DualPair::from_slice(inst.l, &p);
    let weight = inst
        .matching_weight(&cover.matching)
        .ok_or_else(|| Error::InvariantViolation("matching uses a non-edge".into()))?;
    let (value, feasible) = dual_objective(inst, &dual)?;
    if cover.matching.len() != inst.l || !feasible || value != weight {
        return Err(Error::InvariantViolation(format!(
            "no strong-duality certificate: |M| = {}, w(M) = {weight}, dual = {value}",
            cover.matching.len()
        )));
    }
    Ok(MatchingSolution { matching: cover.matching, weight, dual, start: p0, trace })
}

/// `‖P(p̂) − p̂‖∞±` for the ε-shift projection.
pub fn projection_distance(inst: &MatchingInstance, p_hat: &RealDualPair) -> Result<f64> {
    let q = project_dual_real(inst, p_hat)?;
    Ok(linf_pm_distance_f64(&q.to_vec(), &p_hat.to_vec()))
}

/// Generic long step, kept for cross-checking [`MatchingLongStep`].
pub fn generic_long_step(inst: &MatchingInstance, p: &DualPair, d: &Direction) -> Result<i64> {
    let g = MatchingDual::new(inst);
    let v = p.to_vec();
    let change = g.eval(&d.apply(&v, 1)).diff(g.eval(&v)).ok_or(Error::InfeasibleStart)?;
    LongStep::default().length(&g, &v, d, change)
}

/// The path `1 – 2 – … – n` (even `n`) as a maximization instance.
///
/// Odd path vertices form `L` (index `(v − 1)/2`), even ones form `R`
/// (index `v/2 − 1`). The edge `{v, v + 1}` costs `c` when `v` is odd and
/// 0 otherwise, and weights are negated costs. The only perfect matching is
/// `{1,2}, {3,4}, …`.
pub fn path_counterexample(n: usize, c: i64) -> Result<MatchingInstance> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidInstance(format!("path instance needs even n ≥ 2, got {n}")));
    }
    let side = n / 2;
    let edges = (1..n)
        .map(|v| {
            if v % 2 == 1 {
                Edge { i: (v - 1) / 2, j: (v - 1) / 2, w: -c }
            } else {
                Edge { i: v / 2, j: v / 2 - 1, w: 0 }
            }
        })
        .collect();
    MatchingInstance::new(side, side, edges)
}

/// The min-cost dual `y` along the path, `y_v = −s` on `L` and `t` on `R`,
/// listed in path order.
pub fn path_min_cost_dual(p: &DualPair) -> Vec<i64> {
    let mut y = Vec::with_capacity(p.s.len() * 2);
    for (s, t) in p.s.iter().zip(&p.t) {
        y.push(-s);
        y.push(*t);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: i64) -> MatchingInstance {
        MatchingInstance::new(1, 1, vec![Edge { i: 0, j: 0, w }]).unwrap()
    }

    fn two_by_two() -> MatchingInstance {
        let e = [(0, 0, 1), (0, 1, 2), (1, 0, 3), (1, 1, 1)];
        MatchingInstance::new(2, 2, e.into_iter().map(Edge::from).collect()).unwrap()
    }

    #[test]
    fn dual_objective_examples() {
        let inst = single(5);
        assert_eq!(dual_objective(&inst, &DualPair { s: vec![5], t: vec![0] }).unwrap(), (5, true));
        assert_eq!(dual_objective(&inst, &DualPair { s: vec![0], t: vec![0] }).unwrap(), (0, false));
        let inst = two_by_two();
        let p = DualPair { s: vec![3, -1], t: vec![4, 0] };
        let q = DualPair { s: vec![10, 6], t: vec![11, 7] };
        assert_eq!(dual_objective(&inst, &p).unwrap().0, dual_objective(&inst, &q).unwrap().0);
    }

    #[test]
    fn project_dual_examples() {
        let inst = single(5);
        let p = project_dual(&inst, &RealDualPair { s: vec![0.0], t: vec![0.0] }).unwrap();
        assert_eq!(p, DualPair { s: vec![2], t: vec![-3] });
        let p = project_dual(&inst, &RealDualPair { s: vec![10.0], t: vec![0.0] }).unwrap();
        assert_eq!(p, DualPair { s: vec![10], t: vec![0] });
    }

    #[test]
    fn tight_edge_examples() {
        let inst = single(5);
        assert_eq!(tight_edges(&inst, &DualPair { s: vec![5], t: vec![0] }).unwrap(), vec![0]);
        assert!(tight_edges(&inst, &DualPair { s: vec![6], t: vec![0] }).unwrap().is_empty());
        assert_eq!(tight_edges(&inst, &DualPair { s: vec![4], t: vec![0] }), Err(Error::InfeasibleDual(0, 0)));
    }

    #[test]
    fn step_length_examples() {
        // three uncovered edges with slacks 3, 1, 7
        let e = [(0, 0, 0), (1, 1, 0), (2, 2, 0)];
        let inst = MatchingInstance::new(3, 3, e.into_iter().map(Edge::from).collect()).unwrap();
        let p = DualPair { s: vec![3, 1, 7], t: vec![0, 0, 0] };
        assert_eq!(matching_step_length(&inst, &p, &[], &[]).unwrap(), 1);
        assert_eq!(matching_step_length(&inst, &p, &[1, 2], &[]).unwrap(), 3);
        let p = DualPair { s: vec![4], t: vec![0] };
        assert_eq!(matching_step_length(&single(0), &p, &[], &[]).unwrap(), 4);
        assert!(matching_step_length(&single(0), &p, &[0], &[]).is_err());
    }

    #[test]
    fn two_by_two_solution() {
        let inst = two_by_two();
        for step in [StepKind::Unit, StepKind::Long] {
            let sol = solve_matching_from(&inst, cold_start(&inst), step).unwrap();
            assert_eq!(sol.matching, vec![(0, 1), (1, 0)]);
            assert_eq!(sol.weight, 5);
        }
        assert_eq!(brute_force_matching(&inst).unwrap(), (5, vec![vec![(0, 1), (1, 0)]]));
    }

    #[test]
    fn exact_prediction_needs_one_iteration() {
        let inst = two_by_two();
        let opt = solve_matching_from(&inst, cold_start(&inst), StepKind::Long).unwrap();
        let sol = solve_matching(&inst, &opt.dual.to_real(), StepKind::Long).unwrap();
        assert_eq!(sol.trace.iterations, 1);
        assert_eq!(sol.start, opt.dual);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_matching(&single(5)).unwrap().0, 5);
        let mut e = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                e.push(Edge { i, j, w: i64::from(i == j) });
            }
        }
        let inst = MatchingInstance::new(3, 3, e).unwrap();
        assert_eq!(brute_force_matching(&inst).unwrap().0, 3);
    }

    #[test]
    fn load_time_checks() {
        // two left vertices competing for one right vertex
        let e = vec![Edge { i: 0, j: 0, w: 1 }, Edge { i: 1, j: 0, w: 1 }];
        assert_eq!(MatchingInstance::new(2, 2, e), Err(Error::NoPerfectMatching));
        assert!(MatchingInstance::new(1, 1, vec![Edge { i: 0, j: 0, w: WEIGHT_CAP + 1 }]).is_err());
        let text = r#"{"type":"matching","L":1,"R":1,"edges":[[0,0,5]]}"#;
        let inst: MatchingInstance = serde_json::from_str(text).unwrap();
        assert_eq!(inst, single(5));
    }

    #[test]
    fn specialised_and_generic_long_steps_agree() {
        let inst = two_by_two();
        let p = DualPair { s: vec![5, 5], t: vec![0, 0] };
        let mut oracle = MatchingLocalOracle::new(&inst);
        let g = MatchingDual::new(&inst);
        let d = oracle.direction(&g, &p.to_vec(), NeighborhoodMode::Plus).unwrap();
        let special = MatchingLongStep::new(&inst).length(&g, &p.to_vec(), &d, 0).unwrap();
        assert_eq!(d, Direction::new(vec![2, 3], Sign::Plus));
        assert_eq!(special, 2);
        assert_eq!(special, generic_long_step(&inst, &p, &d).unwrap());
    }

    #[test]
    fn path_counterexample_chain() {
        let c = 5;
        let inst = path_counterexample(8, c).unwrap();
        assert_eq!(brute_force_matching(&inst).unwrap(), (-4 * c, vec![vec![(0, 0), (1, 1), (2, 2), (3, 3)]]));
        for step in [StepKind::Unit, StepKind::Long] {
            let sol = solve_matching(&inst, &RealDualPair::from_slice(4, &[0.0; 8]), step).unwrap();
            let y = path_min_cost_dual(&sol.dual);
            assert_eq!(y.iter().sum::<i64>(), 4 * c);
            for v in 0..7 {
                let cost = if v % 2 == 0 { c } else { 0 };
                assert!(y[v] + y[v + 1] <= cost);
            }
            assert!(y[0] >= y[6] + 3 * c);
        }
    }
}
