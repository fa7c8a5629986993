//! Steepest descent for L-convex and L♮-convex functions on the integer lattice.
//!
//! The engine alternates between a local oracle, which returns a steepest
//! direction `±1_X` in the neighborhood of the current point, and a step rule,
//! which decides how far to move along it. It stops at the first direction
//! that does not improve the objective; for L/L♮-convex objectives such a point
//! is a global minimizer.
//!
//! The number of iterations is bounded by `‖p* − p°‖∞± + 1` for any minimizer
//! `p*`, which makes the quality of the initial point `p°` the dominant cost.

use std::cmp::Ordering;
use std::ops::Deref;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lnat::LNatSystem;
use crate::value::ExtValue;

/// Entries of every iterate are kept within `±2^40`.
pub const MAGNITUDE_CAP: i64 = 1 << 40;

/// Largest dimension accepted by the exhaustive local oracle.
pub const BRUTE_FORCE_MAX_DIM: usize = 22;

/// Largest domain accepted by [`lexicographic_minimizer`].
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// A point of `Z^V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct IntVector(Vec<i64>);

impl IntVector {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(&v) = values.iter().find(|v| v.abs() > MAGNITUDE_CAP) {
            return Err(Error::Overflow { value: v as f64 });
        }
        Ok(IntVector(values))
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![0; n.max(1)])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }
}

impl Deref for IntVector {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl TryFrom<Vec<i64>> for IntVector {
    type Error = Error;

    fn try_from(values: Vec<i64>) -> Result<Self> {
        IntVector::new(values)
    }
}

impl From<IntVector> for Vec<i64> {
    fn from(v: IntVector) -> Vec<i64> {
        v.0
    }
}

/// The two halves of the ℓ∞± norm and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmNorm {
    pub plus: f64,
    pub minus: f64,
    pub total: f64,
}

/// `‖p‖∞± = max_i max{0, p_i} + max_i max{0, −p_i}`.
pub fn linf_pm_norm(p: &[f64]) -> PmNorm {
    let plus = p.iter().fold(0.0f64, |m, &x| m.max(x));
    let minus = p.iter().fold(0.0f64, |m, &x| m.max(-x));
    PmNorm { plus, minus, total: plus + minus }
}

/// `‖a − b‖∞±` for integer points.
pub fn linf_pm_distance(a: &[i64], b: &[i64]) -> i64 {
    let (mut plus, mut minus) = (0i64, 0i64);
    for (&x, &y) in a.iter().zip(b) {
        plus = plus.max(x - y);
        minus = minus.max(y - x);
    }
    plus + minus
}

/// `‖a − b‖∞±` for real points.
pub fn linf_pm_distance_f64(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    linf_pm_norm(&diff).total
}

pub fn linf_norm(p: &[f64]) -> f64 {
    p.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Nearest integer with exact halves going down: `⌈x − 1/2⌉`.
pub fn round_half_down(x: f64) -> f64 {
    (x - 0.5).ceil()
}

/// Coordinate-wise [`round_half_down`], checked against the magnitude cap.
pub fn round_ties_down(q: &[f64]) -> Result<IntVector> {
    let mut out = Vec::with_capacity(q.len());
    for &x in q {
        let r = round_half_down(x);
        if !r.is_finite() || r.abs() > MAGNITUDE_CAP as f64 {
            return Err(Error::Overflow { value: x });
        }
        out.push(r as i64);
    }
    IntVector::new(out)
}

/// Declared convexity class of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    L,
    LNatural,
}

/// Neighborhood searched by the local oracle: `{0,1}^V` or `{0,1}^V ∪ {0,−1}^V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborhoodMode {
    Plus,
    PlusMinus,
}

impl From<Convexity> for NeighborhoodMode {
    fn from(c: Convexity) -> Self {
        match c {
            Convexity::L => NeighborhoodMode::Plus,
            Convexity::LNatural => NeighborhoodMode::PlusMinus,
        }
    }
}

/// An objective `g : Z^V → Z ∪ {+∞}`.
///
/// Evaluation must be pure and deterministic.
pub trait Objective {
    fn dim(&self) -> usize;
    fn eval(&self, p: &[i64]) -> ExtValue;
    fn convexity(&self) -> Convexity;
}

/// Objective backed by a closure.
pub struct FnObjective<F> {
    n: usize,
    convexity: Convexity,
    f: F,
}

impl<F: Fn(&[i64]) -> ExtValue> FnObjective<F> {
    pub fn new(n: usize, convexity: Convexity, f: F) -> Self {
        FnObjective { n, convexity, f }
    }
}

impl<F: Fn(&[i64]) -> ExtValue> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, p: &[i64]) -> ExtValue {
        (self.f)(p)
    }

    fn convexity(&self) -> Convexity {
        self.convexity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A direction `sign · 1_X` with `X` stored as a sorted index list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Direction {
    pub support: Vec<usize>,
    pub sign: Sign,
}

impl Direction {
    pub fn zero() -> Self {
        Direction { support: Vec::new(), sign: Sign::Plus }
    }

    pub fn new(mut support: Vec<usize>, sign: Sign) -> Self {
        support.sort_unstable();
        support.dedup();
        Direction { support, sign }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// `p + λ · d`.
    pub fn apply(&self, p: &[i64], lambda: i64) -> Vec<i64> {
        let mut q = p.to_vec();
        let delta = lambda * self.sign.as_i64();
        for &i in &self.support {
            q[i] += delta;
        }
        q
    }

    pub fn to_vector(&self, n: usize) -> Vec<i64> {
        self.apply(&vec![0; n], 1)
    }
}

/// Solves the local problem `argmin { g(p + d) : d ∈ N }` exactly.
pub trait LocalOracle {
    fn direction(&mut self, g: &dyn Objective, p: &[i64], mode: NeighborhoodMode) -> Result<Direction>;
}

/// Chooses the step length along an improving direction.
///
/// `unit_change` is `g(p + d) − g(p) < 0`.
pub trait StepRule {
    fn length(&mut self, g: &dyn Objective, p: &[i64], d: &Direction, unit_change: i64) -> Result<i64>;
}

/// Always `λ = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitStep;

impl StepRule for UnitStep {
    fn length(&mut self, _: &dyn Objective, _: &[i64], _: &Direction, _: i64) -> Result<i64> {
        Ok(1)
    }
}

/// The long step `sup{λ : g(p + λd) − g(p) = λ (g(p + d) − g(p))}`.
#[derive(Debug, Clone, Copy)]
pub struct LongStep {
    pub cap: i64,
}

impl Default for LongStep {
    fn default() -> Self {
        LongStep { cap: MAGNITUDE_CAP }
    }
}

impl StepRule for LongStep {
    fn length(&mut self, g: &dyn Objective, p: &[i64], d: &Direction, unit_change: i64) -> Result<i64> {
        long_step_length(g, p, d, unit_change, self.cap)
    }
}

/// Which step rule a solver should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    #[default]
    Unit,
    Long,
}

impl std::str::FromStr for StepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "unit" => Ok(StepKind::Unit),
            "long" => Ok(StepKind::Long),
            other => Err(format!("unknown step rule `{other}` (expected unit or long)")),
        }
    }
}

/// Long-step length by doubling and then bisecting on the linearity predicate.
///
/// Convexity along `d` makes the predicate monotone in `λ`, so the largest
/// `λ` keeping the objective linear is found in `O(log λ)` evaluations.
pub fn long_step_length(g: &dyn Objective, p: &[i64], d: &Direction, unit_change: i64, cap: i64) -> Result<i64> {
    let base = g.eval(p);
    let linear = |lambda: i64| -> bool {
        let q = d.apply(p, lambda);
        match g.eval(&q).diff(base) {
            Some(change) => change as i128 == lambda as i128 * unit_change as i128,
            None => false,
        }
    };
    if !linear(1) {
        return Err(Error::Contract("long step requested along a direction that is not improving".into()));
    }
    let cap = cap.max(1);
    let mut lo = 1i64;
    let mut hi;
    loop {
        if lo == cap {
            return Err(Error::UnboundedDirection { cap });
        }
        let next = lo.saturating_mul(2).min(cap);
        if linear(next) {
            lo = next;
        } else {
            hi = next;
            break;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if linear(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// One step of the descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub support: Vec<usize>,
    pub sign: Sign,
    pub step: i64,
    /// Objective value after the step (equal to the previous value for the final check).
    pub value: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DescentTrace {
    /// Number of local-oracle calls, including the final non-improving check.
    pub iterations: usize,
    pub records: Vec<IterationRecord>,
    pub local_calls: usize,
    pub elapsed: Duration,
}

impl DescentTrace {
    pub fn final_value(&self) -> Option<i64> {
        self.records.last().map(|r| r.value)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iterations: usize,
}

impl DescentOptions {
    /// `10 · n · range`, the default safety cap.
    pub fn for_range(n: usize, value_range: u64) -> Self {
        let cap = 10u64.saturating_mul(n.max(1) as u64).saturating_mul(value_range.max(1)).min(usize::MAX as u64 / 2);
        DescentOptions { max_iterations: cap as usize }
    }
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { max_iterations: 1_000_000 }
    }
}

/// Runs steepest descent from `p0` until no direction improves `g`.
///
/// The neighborhood is `N₊` for L-convex objectives and `N±` for L♮-convex ones.
pub fn steepest_descent(
    g: &dyn Objective,
    local: &mut dyn LocalOracle,
    step: &mut dyn StepRule,
    p0: IntVector,
    opts: &DescentOptions,
) -> Result<(IntVector, DescentTrace)> {
    let start = Instant::now();
    if p0.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: p0.len() });
    }
    let mode = NeighborhoodMode::from(g.convexity());
    let mut p = p0.into_inner();
    let mut value = g.eval(&p).finite().ok_or(Error::InfeasibleStart)?;
    let mut trace = DescentTrace::default();

    loop {
        if trace.iterations >= opts.max_iterations {
            return Err(Error::Divergence { cap: opts.max_iterations });
        }
        trace.iterations += 1;
        trace.local_calls += 1;
        let d = local.direction(g, &p, mode)?;
        let probe = if d.is_zero() { ExtValue::Finite(value) } else { g.eval(&d.apply(&p, 1)) };
        let change = match probe.finite() {
            Some(v) => v - value,
            None => return Err(Error::Contract("local oracle returned an infeasible direction".into())),
        };
        if change > 0 {
            return Err(Error::Contract("local oracle returned a worsening direction".into()));
        }
        if change == 0 {
            trace.records.push(IterationRecord { support: d.support, sign: d.sign, step: 0, value });
            break;
        }
        let lambda = step.length(g, &p, &d, change)?;
        let next = d.apply(&p, lambda);
        if let Some(&v) = next.iter().find(|v| v.abs() > MAGNITUDE_CAP) {
            return Err(Error::Overflow { value: v as f64 });
        }
        let next_value =
            g.eval(&next).finite().ok_or_else(|| Error::Contract("step rule left the effective domain".into()))?;
        if next_value >= value {
            return Err(Error::Contract("step did not decrease the objective".into()));
        }
        p = next;
        value = next_value;
        trace.records.push(IterationRecord { support: d.support, sign: d.sign, step: lambda, value });
    }
    trace.elapsed = start.elapsed();
    Ok((IntVector(p), trace))
}

/// How the exhaustive oracle picks among equally good directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lexicographically smallest support, then `+` before `−`.
    #[default]
    Lexicographic,
    /// The extremal minimizer of the lifted L-convex problem: the largest
    /// improving `+` support, else the smallest improving `−` support, with
    /// `−` preferred on ties between the signs.
    Extremal,
}

/// Exhaustive local oracle over `2^n` subsets per sign.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForceLocalOracle {
    pub tie_break: TieBreak,
}

impl LocalOracle for BruteForceLocalOracle {
    fn direction(&mut self, g: &dyn Objective, p: &[i64], mode: NeighborhoodMode) -> Result<Direction> {
        brute_force_direction(g, p, mode, self.tie_break)
    }
}

/// Exhaustive local oracle with the lexicographic tie-break.
pub fn brute_force_local_oracle(g: &dyn Objective, p: &[i64], mode: NeighborhoodMode) -> Result<Direction> {
    brute_force_direction(g, p, mode, TieBreak::Lexicographic)
}

fn lex_cmp_masks(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ai, bi) = (a.trailing_zeros(), b.trailing_zeros());
        if ai != bi {
            return ai.cmp(&bi);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

fn mask_to_support(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

struct SignScan {
    best: ExtValue,
    lex_first: u64,
    union: u64,
    intersection: u64,
}

fn scan_sign(g: &dyn Objective, p: &[i64], sign: i64) -> SignScan {
    let n = p.len();
    let mut q = p.to_vec();
    let mut scan = SignScan { best: ExtValue::Infinite, lex_first: 0, union: 0, intersection: u64::MAX };
    for mask in 0u64..(1u64 << n) {
        for (i, qi) in q.iter_mut().enumerate() {
            *qi = p[i] + sign * (mask >> i & 1) as i64;
        }
        let v = g.eval(&q);
        match v.cmp(&scan.best) {
            Ordering::Less => {
                scan = SignScan { best: v, lex_first: mask, union: mask, intersection: mask };
            }
            Ordering::Equal => {
                if lex_cmp_masks(mask, scan.lex_first) == Ordering::Less {
                    scan.lex_first = mask;
                }
                scan.union |= mask;
                scan.intersection &= mask;
            }
            Ordering::Greater => {}
        }
    }
    scan
}

fn brute_force_direction(g: &dyn Objective, p: &[i64], mode: NeighborhoodMode, tie: TieBreak) -> Result<Direction> {
    let n = p.len();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::Capacity {
            what: "exhaustive local search dimension",
            size: n as u128,
            limit: BRUTE_FORCE_MAX_DIM as u128,
        });
    }
    let current = g.eval(p);
    let plus = scan_sign(g, p, 1);
    let minus = match mode {
        NeighborhoodMode::Plus => None,
        NeighborhoodMode::PlusMinus => Some(scan_sign(g, p, -1)),
    };
    let best = minus.as_ref().map_or(plus.best, |m| m.best.min(plus.best));
    if best >= current {
        return Ok(Direction::zero());
    }
    let dir = match tie {
        TieBreak::Lexicographic => {
            let mut choice = (plus.lex_first, Sign::Plus);
            if let Some(m) = &minus {
                let better = m.best < plus.best
                    || (m.best == plus.best && lex_cmp_masks(m.lex_first, plus.lex_first) == Ordering::Less);
                if better {
                    choice = (m.lex_first, Sign::Minus);
                }
            }
            choice
        }
        TieBreak::Extremal => match &minus {
            Some(m) if m.best <= plus.best => (m.intersection, Sign::Minus),
            _ => (plus.union, Sign::Plus),
        },
    };
    Ok(Direction::new(mask_to_support(dir.0), dir.1))
}

/// The lexicographically smallest minimizer of `g` over a bounded domain.
///
/// Ties are broken by comparing coordinates from the first index onwards.
pub fn lexicographic_minimizer(g: &dyn Objective, domain: &LNatSystem) -> Result<IntVector> {
    let n = domain.dim();
    if n != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: n });
    }
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut size: u128 = 1;
    for i in 0..n {
        let (a, b) = match (domain.alpha()[i], domain.beta()[i]) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Contract("lexicographic minimizer needs a bounded box".into())),
        };
        size = size.saturating_mul((b - a + 1) as u128);
        lo.push(a);
        hi.push(b);
    }
    if size > ENUMERATION_LIMIT {
        return Err(Error::Capacity { what: "enumerated domain", size, limit: ENUMERATION_LIMIT });
    }
    let mut p = lo.clone();
    let mut best: Option<(ExtValue, Vec<i64>)> = None;
    loop {
        if domain.contains(&p)? {
            let v = g.eval(&p);
            if v.is_finite() && best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, p.clone()));
            }
        }
        // odometer, last coordinate fastest
        let mut k = n;
        loop {
            if k == 0 {
                return best.map(|(_, p)| IntVector(p)).ok_or(Error::EmptySet);
            }
            k -= 1;
            if p[k] < hi[k] {
                p[k] += 1;
                break;
            }
            p[k] = lo[k];
        }
    }
}
