//! Discrete energy minimization
//!
//! ```text
//! g(p) = Σ_i φ_i(p_i) + Σ_{(i,j)} ψ_ij(p_j − p_i)
//! ```
//!
//! with convex unary tables and convex pairwise terms. `g` is L♮-convex, and
//! each local step reduces to two families of s–t min cuts.

mod cut;
mod dinic;

pub use cut::{build_cut_graph, energy_local_direction, signed_minimizer, CutGraph, EnergyLocal, SignedMinimizer};
pub use dinic::{dinic_min_cut, CutArc, FlowNetwork, MinCut};

use serde::{Deserialize, Serialize};

use crate::descent::{
    lexicographic_minimizer, steepest_descent, Convexity, DescentOptions, DescentTrace, Direction, IntVector,
    LocalOracle, LongStep, NeighborhoodMode, Objective, Sign, StepKind, UnitStep,
};
use crate::error::{Error, Result};
use crate::lnat::LNatSystem;
use crate::value::ExtValue;

/// Largest admissible `|α_i|`, `|β_i|`.
pub const LABEL_CAP: i64 = 1 << 20;

/// Bound on `(n + m) · max |term|` over the label box, keeping cut arithmetic in `i64`.
pub const MASS_CAP: i64 = 1 << 44;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairwiseKind {
    /// `weight · |δ|`
    Abs {
        #[serde(default = "unit_weight")]
        weight: i64,
    },
    /// `weight · δ²`
    Quad {
        #[serde(default = "unit_weight")]
        weight: i64,
    },
    /// `values[δ − lo]`, and `+∞` beyond the table.
    Table { lo: i64, values: Vec<i64> },
}

fn unit_weight() -> i64 {
    1
}

/// `ψ_ij` applied to `p_j − p_i`, optionally restricted to a window of deviations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairwiseTerm {
    pub edge: (usize, usize),
    #[serde(flatten)]
    pub kind: PairwiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
}

impl PairwiseTerm {
    /// The deviations where the term is finite, `None` meaning unbounded.
    pub fn finite_window(&self) -> (Option<i64>, Option<i64>) {
        let (mut lo, mut hi) = match self.window {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        if let PairwiseKind::Table { lo: t, values } = &self.kind {
            let top = t + values.len() as i64 - 1;
            lo = Some(lo.map_or(*t, |l| l.max(*t)));
            hi = Some(hi.map_or(top, |h| h.min(top)));
        }
        (lo, hi)
    }

    pub fn eval(&self, delta: i64) -> ExtValue {
        if let Some((a, b)) = self.window {
            if delta < a || delta > b {
                return ExtValue::Infinite;
            }
        }
        match &self.kind {
            PairwiseKind::Abs { weight } => ExtValue::Finite(weight * delta.abs()),
            PairwiseKind::Quad { weight } => ExtValue::Finite(weight * delta * delta),
            PairwiseKind::Table { lo, values } => match usize::try_from(delta - lo).ok().and_then(|k| values.get(k)) {
                Some(&v) => ExtValue::Finite(v),
                None => ExtValue::Infinite,
            },
        }
    }
}

/// An energy instance on a graph with per-vertex label ranges `[α_i, β_i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEnergy", into = "RawEnergy")]
pub struct EnergyInstance {
    n: usize,
    edges: Vec<(usize, usize)>,
    unary: Vec<Vec<i64>>,
    pairwise: Vec<PairwiseTerm>,
    labels: Vec<(i64, i64)>,
    domain: LNatSystem,
}

#[derive(Serialize, Deserialize)]
struct RawEnergy {
    #[serde(rename = "type", default = "energy_tag")]
    tag: String,
    n: usize,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
    unary: Vec<Vec<i64>>,
    #[serde(default)]
    pairwise: Vec<PairwiseTerm>,
    #[serde(rename = "box")]
    labels: Vec<(i64, i64)>,
}

fn energy_tag() -> String {
    "energy".into()
}

impl TryFrom<RawEnergy> for EnergyInstance {
    type Error = Error;

    fn try_from(raw: RawEnergy) -> Result<Self> {
        if raw.tag != "energy" {
            return Err(Error::InvalidInstance(format!("expected an energy instance, found type `{}`", raw.tag)));
        }
        if raw.n != raw.unary.len() {
            return Err(Error::DimensionMismatch { expected: raw.n, got: raw.unary.len() });
        }
        EnergyInstance::new(raw.labels, raw.unary, raw.edges, raw.pairwise)
    }
}

impl From<EnergyInstance> for RawEnergy {
    fn from(e: EnergyInstance) -> Self {
        RawEnergy { tag: energy_tag(), n: e.n, edges: e.edges, unary: e.unary, pairwise: e.pairwise, labels: e.labels }
    }
}

fn second_differences_nonnegative(values: &[i64]) -> bool {
    values.windows(3).all(|w| w[0] + w[2] >= 2 * w[1])
}

impl EnergyInstance {
    /// Validates ranges, convexity of every term and non-emptiness of the domain.
    ///
    /// `unary[i][k]` is `φ_i(α_i + k)`. Edges without a pairwise term contribute nothing.
    pub fn new(
        labels: Vec<(i64, i64)>,
        unary: Vec<Vec<i64>>,
        edges: Vec<(usize, usize)>,
        pairwise: Vec<PairwiseTerm>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInstance("an energy needs at least one vertex".into()));
        }
        if unary.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: unary.len() });
        }
        for (i, (&(a, b), table)) in labels.iter().zip(&unary).enumerate() {
            if a > b || a.abs() > LABEL_CAP || b.abs() > LABEL_CAP {
                return Err(Error::InvalidInstance(format!("label range [{a}, {b}] of vertex {i} is invalid")));
            }
            if table.len() as i64 != b - a + 1 {
                return Err(Error::InvalidInstance(format!(
                    "unary table of vertex {i} has {} entries for {} labels",
                    table.len(),
                    b - a + 1
                )));
            }
            if !second_differences_nonnegative(table) {
                return Err(Error::NotConvex(format!("unary table of vertex {i}")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidInstance(format!("bad edge ({i}, {j})")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({i}, {j})")));
            }
        }
        let oriented: std::collections::BTreeSet<(usize, usize)> = edges.iter().copied().collect();
        let mut covered = std::collections::BTreeSet::new();
        let mut gamma = Vec::new();
        for t in &pairwise {
            let (i, j) = t.edge;
            if !oriented.contains(&(i, j)) {
                return Err(Error::InvalidInstance(format!("pairwise term on ({i}, {j}) has no matching edge")));
            }
            if !covered.insert((i, j)) {
                return Err(Error::InvalidInstance(format!("edge ({i}, {j}) has two pairwise terms")));
            }
            match &t.kind {
                PairwiseKind::Abs { weight } | PairwiseKind::Quad { weight } => {
                    if *weight < 0 {
                        return Err(Error::NotConvex(format!("negative pairwise weight {weight} on ({i}, {j})")));
                    }
                    if *weight > LABEL_CAP {
                        return Err(Error::Overflow { value: *weight as f64 });
                    }
                }
                PairwiseKind::Table { lo, values } => {
                    if values.is_empty() || lo.abs() > 4 * LABEL_CAP {
                        return Err(Error::InvalidInstance(format!("empty or misplaced table on ({i}, {j})")));
                    }
                    if !second_differences_nonnegative(values) {
                        return Err(Error::NotConvex(format!("pairwise table on ({i}, {j})")));
                    }
                }
            }
            let (lo, hi) = t.finite_window();
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo > hi {
                    return Err(Error::EmptySet);
                }
            }
            if let Some(hi) = hi {
                gamma.push((i, j, hi));
            }
            if let Some(lo) = lo {
                gamma.push((j, i, -lo));
            }
        }
        let domain = LNatSystem::new(
            n,
            labels.iter().map(|&(a, _)| Some(a)).collect(),
            labels.iter().map(|&(_, b)| Some(b)).collect(),
            gamma,
        )?;
        let inst = EnergyInstance { n, edges, unary, pairwise, labels, domain };
        inst.check_mass()?;
        Ok(inst)
    }

    /// Largest `|term|` reachable from the label box with one unit of slack,
    /// times the number of terms, must stay below [`MASS_CAP`].
    fn check_mass(&self) -> Result<()> {
        let mut worst: i128 = 0;
        for t in &self.unary {
            worst = worst.max(t.iter().map(|v| (*v as i128).abs()).max().unwrap_or(0));
        }
        for t in &self.pairwise {
            let (i, j) = t.edge;
            let lo = self.labels[j].0 - self.labels[i].1 - 1;
            let hi = self.labels[j].1 - self.labels[i].0 + 1;
            let m = match &t.kind {
                PairwiseKind::Abs { weight } => *weight as i128 * lo.abs().max(hi.abs()) as i128,
                PairwiseKind::Quad { weight } => *weight as i128 * (lo.abs().max(hi.abs()) as i128).pow(2),
                PairwiseKind::Table { values, .. } => values.iter().map(|v| (*v as i128).abs()).max().unwrap_or(0),
            };
            worst = worst.max(m);
        }
        let mass = worst * (self.n + self.pairwise.len()) as i128 * 4;
        if mass > MASS_CAP as i128 {
            return Err(Error::Overflow { value: mass as f64 });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn unary(&self) -> &[Vec<i64>] {
        &self.unary
    }

    pub fn pairwise(&self) -> &[PairwiseTerm] {
        &self.pairwise
    }

    pub fn labels(&self) -> &[(i64, i64)] {
        &self.labels
    }

    /// The effective domain: the label box and every pairwise window.
    pub fn domain(&self) -> &LNatSystem {
        &self.domain
    }

    /// Widest label range, `max_i (β_i − α_i)`.
    pub fn label_width(&self) -> i64 {
        self.labels.iter().map(|(a, b)| b - a).max().unwrap_or(0)
    }

    pub fn unary_value(&self, i: usize, label: i64) -> ExtValue {
        let (a, b) = self.labels[i];
        if label < a || label > b {
            return ExtValue::Infinite;
        }
        ExtValue::Finite(self.unary[i][(label - a) as usize])
    }

    /// `g(p)`; `+∞` when a label leaves its range or a deviation leaves its window.
    pub fn energy_value(&self, p: &[i64]) -> ExtValue {
        if p.len() != self.n {
            return ExtValue::Infinite;
        }
        let unary: ExtValue = p.iter().enumerate().map(|(i, &l)| self.unary_value(i, l)).sum();
        if !unary.is_finite() {
            return unary;
        }
        unary + self.pairwise.iter().map(|t| t.eval(p[t.edge.1] - p[t.edge.0])).sum()
    }

    /// ℓ∞±-projection of a prediction onto the domain, then rounding into it.
    pub fn project(&self, p_hat: &[f64]) -> Result<IntVector> {
        let q = self.domain.project_general(p_hat)?;
        self.domain.round_into(&q)
    }
}

impl Objective for EnergyInstance {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, p: &[i64]) -> ExtValue {
        self.energy_value(p)
    }

    fn convexity(&self) -> Convexity {
        Convexity::LNatural
    }
}

/// Local oracle answering with [`energy_local_direction`].
pub struct EnergyLocalOracle<'a> {
    inst: &'a EnergyInstance,
    pub cuts: usize,
}

impl<'a> EnergyLocalOracle<'a> {
    pub fn new(inst: &'a EnergyInstance) -> Self {
        EnergyLocalOracle { inst, cuts: 0 }
    }
}

impl LocalOracle for EnergyLocalOracle<'_> {
    fn direction(&mut self, _: &dyn Objective, p: &[i64], _: NeighborhoodMode) -> Result<Direction> {
        let local = energy_local_direction(self.inst, p)?;
        self.cuts += local.cuts;
        Ok(local.direction)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    pub labels: IntVector,
    pub value: i64,
    /// The rounded projection the descent started from.
    pub start: IntVector,
    pub trace: DescentTrace,
    /// Min-cut computations over the whole run.
    pub cuts: usize,
}

/// Projects `p_hat` into the domain and runs steepest descent from there.
pub fn solve_energy(inst: &EnergyInstance, p_hat: &[f64], step: StepKind) -> Result<EnergySolution> {
    if p_hat.len() != inst.n {
        return Err(Error::DimensionMismatch { expected: inst.n, got: p_hat.len() });
    }
    solve_energy_from(inst, inst.project(p_hat)?, step)
}

pub fn solve_energy_from(inst: &EnergyInstance, p0: IntVector, step: StepKind) -> Result<EnergySolution> {
    let mut local = EnergyLocalOracle::new(inst);
    let width = inst.label_width();
    let opts = DescentOptions::for_range(inst.n, width as u64 + 2);
    let (labels, trace) = match step {
        StepKind::Unit => steepest_descent(inst, &mut local, &mut UnitStep, p0.clone(), &opts)?,
        // one past the widest range always leaves the box
        StepKind::Long => steepest_descent(inst, &mut local, &mut LongStep { cap: width + 1 }, p0.clone(), &opts)?,
    };
    let value = inst
        .energy_value(&labels)
        .finite()
        .ok_or(Error::InvariantViolation("descent ended outside the domain".into()))?;
    Ok(EnergySolution { labels, value, start: p0, trace, cuts: local.cuts })
}

/// Minimum energy and the lexicographically smallest minimizer, by enumeration.
pub fn brute_force_energy(inst: &EnergyInstance) -> Result<(i64, IntVector)> {
    let p = lexicographic_minimizer(inst, &inst.domain)?;
    let v = inst.energy_value(&p).finite().ok_or(Error::EmptySet)?;
    Ok((v, p))
}

/// The componentwise smallest minimizer, reached from any minimizer `p` by
/// following zero-cost `−1_X` steps. It coincides with the lexicographically
/// smallest minimizer.
pub fn lowest_minimizer(inst: &EnergyInstance, p: &[i64]) -> Result<IntVector> {
    let mut p = p.to_vec();
    let value = inst.energy_value(&p).finite().ok_or(Error::InfeasibleStart)?;
    let local = energy_local_direction(inst, &p)?;
    if local.improvement < 0 {
        return Err(Error::Contract("starting point is not a minimizer".into()));
    }
    let cap = inst.label_width() as usize * inst.n + 1;
    for _ in 0..=cap {
        let down = cut::largest_zero_cost_descent(inst, &p)?;
        if down.is_empty() {
            return IntVector::new(p);
        }
        p = Direction::new(down, Sign::Minus).apply(&p, 1);
        debug_assert_eq!(inst.energy_value(&p).finite(), Some(value));
    }
    Err(Error::Divergence { cap })
}

#[cfg(test)]
mod tests;
