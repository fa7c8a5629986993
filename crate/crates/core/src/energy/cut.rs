use std::cmp::Ordering;

use crate::descent::{Direction, Sign};
use crate::error::{Error, Result};
use crate::value::ExtValue;

use super::dinic::{dinic_min_cut, CutArc, FlowNetwork, MinCut};
use super::EnergyInstance;

/// The set function `x ↦ g(p + sign · x)` on `{0,1}^V` written as
/// `constant + Σ coef_i x_i + Σ K (1 − x_i) x_j` with `K ≥ 0`.
#[derive(Debug, Clone)]
struct PseudoBoolean {
    constant: i64,
    coef: Vec<i64>,
    /// `(j, i, K)`: cost `K` when `j` is selected and `i` is not.
    cross: Vec<(usize, usize, i64)>,
    big_m: i64,
}

/// The s–t graph whose minimum cuts are the minimizers of `x ↦ g(p + sign · x)`.
///
/// Vertex `i` is node `i`; the source is node `n` and the sink node `n + 1`.
/// A vertex on the source side is selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutGraph {
    pub network: FlowNetwork,
    /// Add to a cut value to get the energy of the corresponding labeling.
    pub constant: i64,
    pub big_m: i64,
    pub sign: Sign,
}

impl CutGraph {
    pub fn vertex_count(&self) -> usize {
        self.network.nodes - 2
    }

    pub fn arc_count(&self) -> usize {
        self.network.arcs.len()
    }
}

fn pseudo_boolean(inst: &EnergyInstance, p: &[i64], sign: Sign) -> Result<PseudoBoolean> {
    let n = inst.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.len() });
    }
    if !inst.energy_value(p).is_finite() {
        return Err(Error::InfeasibleStart);
    }
    let s = sign.as_i64();
    let mut unary = Vec::with_capacity(n);
    for (i, &pi) in p.iter().enumerate() {
        unary.push([inst.unary_value(i, pi), inst.unary_value(i, pi + s)]);
    }
    let mut pairwise = Vec::with_capacity(inst.pairwise.len());
    for term in &inst.pairwise {
        let (i, j) = term.edge;
        let delta = p[j] - p[i];
        // (x_i, x_j) = (0,0), (1,0), (0,1), (1,1)
        pairwise.push((i, j, [term.eval(delta), term.eval(delta - s), term.eval(delta + s), term.eval(delta)]));
    }

    let finite_mass: i64 = unary
        .iter()
        .flat_map(|u| u.iter())
        .chain(pairwise.iter().flat_map(|(_, _, t)| t.iter()))
        .filter_map(|v| v.finite())
        .map(i64::abs)
        .sum();
    let big_m = 1 + 2 * finite_mass;
    let val = |v: ExtValue| v.finite().unwrap_or(big_m);

    let mut constant = 0i64;
    let mut coef = vec![0i64; n];
    for (i, [u0, u1]) in unary.into_iter().enumerate() {
        let u0 = val(u0);
        constant += u0;
        coef[i] += val(u1) - u0;
    }
    let mut cross = Vec::new();
    for (i, j, [a, b, c, e]) in pairwise {
        let (a, b, c, e) = (val(a), val(b), val(c), val(e));
        let k = b + c - a - e;
        if k < 0 {
            return Err(Error::NotConvex(format!("pairwise term on ({i}, {j}) is not submodular at p")));
        }
        constant += a;
        coef[i] += b - a;
        coef[j] += e - b;
        if k > 0 {
            cross.push((j, i, k));
        }
    }
    Ok(PseudoBoolean { constant, coef, cross, big_m })
}

impl PseudoBoolean {
    /// The cut graph with some vertices pinned to the source (`Some(true)`) or sink side.
    fn network(&self, pinned: &[Option<bool>]) -> (FlowNetwork, i64) {
        let n = self.coef.len();
        let (source, sink) = (n, n + 1);
        let node = |v: usize| match pinned[v] {
            Some(true) => source,
            Some(false) => sink,
            None => v,
        };
        let mut constant = self.constant;
        let mut arcs = Vec::with_capacity(n + self.cross.len());
        for (i, &a) in self.coef.iter().enumerate() {
            if a > 0 {
                arcs.push(CutArc { from: node(i), to: sink, cap: a });
            } else if a < 0 {
                constant += a;
                arcs.push(CutArc { from: source, to: node(i), cap: -a });
            }
        }
        for &(j, i, k) in &self.cross {
            arcs.push(CutArc { from: node(j), to: node(i), cap: k });
        }
        arcs.retain(|a| a.from != a.to);
        (FlowNetwork { nodes: n + 2, source, sink, arcs }, constant)
    }
}

/// Builds the cut graph of `x ↦ g(p + sign · x)`; `p` must have finite energy.
pub fn build_cut_graph(inst: &EnergyInstance, p: &[i64], sign: Sign) -> Result<CutGraph> {
    let pb = pseudo_boolean(inst, p, sign)?;
    let (network, constant) = pb.network(&vec![None; p.len()]);
    Ok(CutGraph { network, constant, big_m: pb.big_m, sign })
}

/// Best direction of one sign and its energy `g(p + sign · 1_X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMinimizer {
    pub support: Vec<usize>,
    pub value: i64,
    /// Number of min-cut computations spent.
    pub cuts: usize,
}

fn shifted_energy(inst: &EnergyInstance, p: &[i64], sign: Sign, support: &[usize]) -> ExtValue {
    inst.energy_value(&Direction::new(support.to_vec(), sign).apply(p, 1))
}

/// The lexicographically smallest minimizer of `x ↦ g(p + sign · x)`.
///
/// Minimizers form a lattice, so the smallest next element after a fixed
/// prefix is the least free vertex of the largest minimizer that respects the
/// prefix; each round pins it and costs one min cut.
pub fn signed_minimizer(inst: &EnergyInstance, p: &[i64], sign: Sign) -> Result<SignedMinimizer> {
    let pb = pseudo_boolean(inst, p, sign)?;
    let n = p.len();
    let mut pinned: Vec<Option<bool>> = vec![None; n];
    let solve = |pinned: &[Option<bool>]| -> (MinCut, i64) {
        let (net, constant) = pb.network(pinned);
        let cut = dinic_min_cut(&net);
        let total = cut.value + constant;
        (cut, total)
    };
    let (mut cut, best) = solve(&pinned);
    let mut cuts = 1;
    let current = inst.energy_value(p).finite().ok_or(Error::InfeasibleStart)?;
    if best > current {
        return Err(Error::InvariantViolation(format!("min cut {best} exceeds the energy {current} of d = 0")));
    }
    let mut support = Vec::new();
    let mut next_free = 0;
    // a cut value that no labeling attains means a big-M arc was cut
    while shifted_energy(inst, p, sign, &support).finite() != Some(best) {
        if !support.is_empty() {
            let (c, total) = solve(&pinned);
            cuts += 1;
            if total != best {
                return Err(Error::InvariantViolation("pinned cut lost optimality".into()));
            }
            cut = c;
        }
        let j = (next_free..n)
            .find(|&v| cut.max_source_side[v])
            .ok_or_else(|| Error::InvariantViolation("no finite labeling attains the min cut".into()))?;
        for slot in pinned.iter_mut().take(j).skip(next_free) {
            *slot = Some(false);
        }
        pinned[j] = Some(true);
        support.push(j);
        next_free = j + 1;
    }
    Ok(SignedMinimizer { support, value: best, cuts })
}

/// Steepest direction in `N±` and its improvement `g(p + d) − g(p) ≤ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyLocal {
    pub direction: Direction,
    pub improvement: i64,
    pub cuts: usize,
}

/// Solves the local problem over `{0,1}^V ∪ {0,−1}^V` with one family of cuts
/// per sign. Ties go to the lexicographically smallest support, then to `+`.
pub fn energy_local_direction(inst: &EnergyInstance, p: &[i64]) -> Result<EnergyLocal> {
    let current = inst.energy_value(p).finite().ok_or(Error::InfeasibleStart)?;
    let plus = signed_minimizer(inst, p, Sign::Plus)?;
    let minus = signed_minimizer(inst, p, Sign::Minus)?;
    let cuts = plus.cuts + minus.cuts;
    let take_minus =
        minus.value < plus.value || (minus.value == plus.value && minus.support.cmp(&plus.support) == Ordering::Less);
    let (best, sign) = if take_minus { (minus, Sign::Minus) } else { (plus, Sign::Plus) };
    if best.value >= current {
        return Ok(EnergyLocal { direction: Direction::zero(), improvement: 0, cuts });
    }
    Ok(EnergyLocal { direction: Direction::new(best.support, sign), improvement: best.value - current, cuts })
}

/// The largest `X` with `g(p − 1_X) = g(p)`, for a minimizer `p`.
pub(super) fn largest_zero_cost_descent(inst: &EnergyInstance, p: &[i64]) -> Result<Vec<usize>> {
    let pb = pseudo_boolean(inst, p, Sign::Minus)?;
    let (net, constant) = pb.network(&vec![None; p.len()]);
    let cut = dinic_min_cut(&net);
    let current = inst.energy_value(p).finite().ok_or(Error::InfeasibleStart)?;
    if cut.value + constant != current {
        return Err(Error::Contract("point is not a minimizer".into()));
    }
    let support: Vec<usize> = (0..p.len()).filter(|&v| cut.max_source_side[v]).collect();
    if shifted_energy(inst, p, Sign::Minus, &support).finite() != Some(current) {
        return Err(Error::InvariantViolation("largest minimizer does not attain the min cut".into()));
    }
    Ok(support)
}
