//! L♮-convex sets described by a box and difference constraints,
//! `α_i ≤ p_i ≤ β_i` and `p_j − p_i ≤ γ_ij`.
//!
//! Besides membership this module provides the ℓ∞±-projection of a real point
//! onto the convex hull of such a set, computed as a shortest-path potential,
//! and the rounding step that maps a hull point back into the set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::descent::{round_ties_down, IntVector};
use crate::error::{Error, Result};

/// Tolerance for membership of real points in the relaxed system.
pub const RELAXED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct LNatSystem {
    n: usize,
    alpha: Vec<Option<i64>>,
    beta: Vec<Option<i64>>,
    gamma: BTreeMap<(usize, usize), i64>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    n: usize,
    alpha: Vec<Option<i64>>,
    beta: Vec<Option<i64>>,
    #[serde(default)]
    gamma: Vec<(usize, usize, i64)>,
}

impl TryFrom<RawSystem> for LNatSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        LNatSystem::new(raw.n, raw.alpha, raw.beta, raw.gamma)
    }
}

impl From<LNatSystem> for RawSystem {
    fn from(s: LNatSystem) -> RawSystem {
        RawSystem {
            n: s.n,
            alpha: s.alpha,
            beta: s.beta,
            gamma: s.gamma.into_iter().map(|((i, j), b)| (i, j, b)).collect(),
        }
    }
}

/// Anchor vertex used for box constraints in the constraint graph.
fn anchor(n: usize) -> usize {
    n
}

impl LNatSystem {
    /// Builds and validates a system. Repeated `(i, j)` pairs keep the tightest bound.
    pub fn new(
        n: usize,
        alpha: Vec<Option<i64>>,
        beta: Vec<Option<i64>>,
        gamma: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        for v in [&alpha, &beta] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        for i in 0..n {
            if let (Some(a), Some(b)) = (alpha[i], beta[i]) {
                if a > b {
                    return Err(Error::EmptySet);
                }
            }
        }
        let mut map = BTreeMap::new();
        for (i, j, b) in gamma {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidInstance(format!("bad difference constraint index ({i}, {j})")));
            }
            let e = map.entry((i, j)).or_insert(b);
            *e = (*e).min(b);
        }
        let s = LNatSystem { n, alpha, beta, gamma: map };
        s.integer_potential()?;
        Ok(s)
    }

    /// The box `[α, β]` with no difference constraints.
    pub fn boxed(alpha: Vec<i64>, beta: Vec<i64>) -> Result<Self> {
        let n = alpha.len();
        LNatSystem::new(n, alpha.into_iter().map(Some).collect(), beta.into_iter().map(Some).collect(), [])
    }

    pub fn unconstrained(n: usize) -> Result<Self> {
        LNatSystem::new(n, vec![None; n], vec![None; n], [])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &[Option<i64>] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Option<i64>] {
        &self.beta
    }

    pub fn gamma(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.gamma
    }

    pub fn is_bounded(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(Option::is_some)
    }

    /// Arcs `(from, to, w)` meaning `x_to − x_from ≤ w`, with the anchor at index `n`.
    fn constraint_arcs(&self) -> Vec<(usize, usize, i64)> {
        let z = anchor(self.n);
        let mut arcs: Vec<(usize, usize, i64)> = self.gamma.iter().map(|(&(i, j), &b)| (i, j, b)).collect();
        for i in 0..self.n {
            if let Some(a) = self.alpha[i] {
                arcs.push((i, z, -a));
            }
            if let Some(b) = self.beta[i] {
                arcs.push((z, i, b));
            }
        }
        arcs
    }

    /// Shortest distances from a virtual source joined to every vertex,
    /// or the empty-set error on a negative cycle.
    fn integer_potential(&self) -> Result<Vec<i128>> {
        let arcs: Vec<(usize, usize, i128)> =
            self.constraint_arcs().into_iter().map(|(u, v, w)| (u, v, w as i128)).collect();
        let nv = self.n + 1;
        let mut d = vec![0i128; nv];
        for round in 0..=nv {
            let mut changed = false;
            for &(u, v, w) in &arcs {
                if d[u] + w < d[v] {
                    d[v] = d[u] + w;
                    changed = true;
                }
            }
            if !changed {
                return Ok(d);
            }
            if round == nv {
                break;
            }
        }
        Err(Error::EmptySet)
    }

    /// Some integer point of the set.
    pub fn feasible_point(&self) -> Result<IntVector> {
        let d = self.integer_potential()?;
        let z = d[anchor(self.n)];
        let p = d[..self.n].iter().map(|&x| (x - z) as i64).collect();
        IntVector::new(p)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got });
        }
        Ok(())
    }

    pub fn contains(&self, p: &[i64]) -> Result<bool> {
        self.check_dim(p.len())?;
        let box_ok =
            (0..self.n).all(|i| self.alpha[i].is_none_or(|a| a <= p[i]) && self.beta[i].is_none_or(|b| p[i] <= b));
        Ok(box_ok && self.gamma.iter().all(|(&(i, j), &b)| p[j] - p[i] <= b))
    }

    /// Membership of a real point in the relaxed system, up to `tol`.
    pub fn contains_relaxed(&self, q: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(q.len())?;
        let box_ok = (0..self.n).all(|i| {
            self.alpha[i].is_none_or(|a| a as f64 <= q[i] + tol) && self.beta[i].is_none_or(|b| q[i] <= b as f64 + tol)
        });
        Ok(box_ok && self.gamma.iter().all(|(&(i, j), &b)| q[j] - q[i] <= b as f64 + tol))
    }

    /// Largest violation of a relaxed constraint (0 when feasible).
    pub fn max_violation(&self, q: &[f64]) -> Result<f64> {
        self.check_dim(q.len())?;
        let mut worst = 0.0f64;
        for ((&x, a), b) in q.iter().zip(&self.alpha).zip(&self.beta) {
            if let Some(a) = a {
                worst = worst.max(*a as f64 - x);
            }
            if let Some(b) = b {
                worst = worst.max(x - *b as f64);
            }
        }
        for (&(i, j), &b) in &self.gamma {
            worst = worst.max(q[j] - q[i] - b as f64);
        }
        Ok(worst)
    }

    /// ℓ∞±-projection of `p_hat` onto the convex hull of the set.
    ///
    /// Pure boxes are clamped; otherwise the projection is read off a
    /// shortest-path potential on the constraint graph.
    pub fn project_general(&self, p_hat: &[f64]) -> Result<Vec<f64>> {
        Ok(self.project_general_with_stats(p_hat)?.point)
    }

    /// As [`project_general`](Self::project_general), also reporting the size of
    /// the auxiliary graph and the optimal distance.
    pub fn project_general_with_stats(&self, p_hat: &[f64]) -> Result<Projection> {
        self.check_dim(p_hat.len())?;
        if let Some(&x) = p_hat.iter().find(|x| !x.is_finite()) {
            return Err(Error::Overflow { value: x });
        }
        if self.gamma.is_empty() {
            let lo: Vec<f64> = self.alpha.iter().map(|a| a.map_or(f64::NEG_INFINITY, |a| a as f64)).collect();
            let hi: Vec<f64> = self.beta.iter().map(|b| b.map_or(f64::INFINITY, |b| b as f64)).collect();
            let point = project_box(&lo, &hi, p_hat);
            let distance = crate::descent::linf_pm_distance_f64(&point, p_hat);
            return Ok(Projection { point, distance, vertices: 0, arcs: 0 });
        }
        self.project_shortest_path(p_hat)
    }

    /// The shortest-path projection, used for every system including pure boxes.
    pub fn project_shortest_path(&self, p_hat: &[f64]) -> Result<Projection> {
        self.check_dim(p_hat.len())?;
        if let Some(&x) = p_hat.iter().find(|x| !x.is_finite()) {
            return Err(Error::Overflow { value: x });
        }
        let n = self.n;
        let z = anchor(n);
        let (s, t) = (n + 1, n + 2);
        let shifted = |v: usize| if v == z { 0.0 } else { p_hat[v] };
        let mut arcs: Vec<(usize, usize, f64)> =
            self.constraint_arcs().into_iter().map(|(u, v, w)| (u, v, w as f64 - shifted(v) + shifted(u))).collect();
        for v in 0..=n {
            arcs.push((s, v, 0.0));
            arcs.push((v, t, 0.0));
        }
        let nv = n + 3;
        let mut d = vec![f64::INFINITY; nv];
        d[s] = 0.0;
        for _ in 0..nv - 1 {
            let mut changed = false;
            for &(u, v, w) in &arcs {
                if d[u] + w < d[v] {
                    d[v] = d[u] + w;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for &(u, v, w) in &arcs {
            if d[u] + w < d[v] - RELAXED_TOL * (1.0 + d[v].abs()) {
                return Err(Error::EmptySet);
            }
        }
        let point: Vec<f64> = (0..n).map(|i| p_hat[i] + d[i] - d[z]).collect();
        let distance = crate::descent::linf_pm_distance_f64(&point, p_hat);
        Ok(Projection { point, distance, vertices: nv, arcs: arcs.len() })
    }

    /// `round_ties_down(q)` for a point `q` of the relaxed system; the result lies in the set.
    pub fn round_into(&self, q: &[f64]) -> Result<IntVector> {
        if !self.contains_relaxed(q, RELAXED_TOL)? {
            return Err(Error::Contract("point to round lies outside the relaxed system".into()));
        }
        let p = round_ties_down(q)?;
        if !self.contains(&p)? {
            return Err(Error::InvariantViolation(format!("rounded point {:?} is not in the set", p.as_slice())));
        }
        Ok(p)
    }
}

/// Result of [`LNatSystem::project_general_with_stats`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    /// `‖point − p̂‖∞±`.
    pub distance: f64,
    pub vertices: usize,
    pub arcs: usize,
}

/// Coordinate-wise clamp `max{α_i, min{p̂_i, β_i}}`; infinite bounds are allowed.
pub fn project_box(alpha: &[f64], beta: &[f64], p_hat: &[f64]) -> Vec<f64> {
    p_hat.iter().zip(alpha.iter().zip(beta)).map(|(&x, (&a, &b))| x.min(b).max(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn halfplane() -> LNatSystem {
        // p₂ − p₁ ≤ 0
        LNatSystem::new(2, vec![None; 2], vec![None; 2], [(0, 1, 0)]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = halfplane();
        assert!(s.contains(&[1, 1]).unwrap());
        assert!(!s.contains(&[0, 3]).unwrap());
        let b = LNatSystem::boxed(vec![0, 0], vec![4, 4]).unwrap();
        assert!(!b.contains(&[5, 0]).unwrap());
        assert!(matches!(b.contains(&[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn construction_rejects_empty_sets() {
        // p₂ − p₁ ≤ −1 and p₁ − p₂ ≤ 0
        assert_eq!(LNatSystem::new(2, vec![None; 2], vec![None; 2], [(0, 1, -1), (1, 0, 0)]), Err(Error::EmptySet));
        // box 0 ≤ p ≤ 1 with p₂ − p₁ ≤ −2
        assert_eq!(LNatSystem::new(2, vec![Some(0); 2], vec![Some(1); 2], [(0, 1, -2)]), Err(Error::EmptySet));
        assert_eq!(LNatSystem::boxed(vec![3], vec![2]), Err(Error::EmptySet));
    }

    #[test]
    fn project_box_examples() {
        assert_eq!(project_box(&[0.0, 0.0], &[4.0, 4.0], &[5.0, -3.0]), vec![4.0, 0.0]);
        assert_eq!(project_box(&[0.0, 0.0], &[4.0, 4.0], &[1.5, 2.0]), vec![1.5, 2.0]);
        assert_eq!(project_box(&[f64::NEG_INFINITY], &[2.0], &[7.0]), vec![2.0]);
    }

    #[test]
    fn project_general_halfplane() {
        let s = halfplane();
        let pr = s.project_general_with_stats(&[0.0, 3.0]).unwrap();
        // any point on the segment from (0,0) to (3,3) along p₁ = p₂ with ℓ∞± distance 3 is optimal
        assert!((pr.distance - 3.0).abs() < 1e-12);
        assert!(s.contains_relaxed(&pr.point, RELAXED_TOL).unwrap());
        assert!(pr.arcs <= s.gamma().len() + 4 * 2 + 2);
        let r = s.round_into(&pr.point).unwrap();
        assert!(s.contains(&r).unwrap());
    }

    #[test]
    fn project_general_fixed_point() {
        let s = halfplane();
        let pr = s.project_general_with_stats(&[2.0, 1.5]).unwrap();
        assert_eq!(pr.point, vec![2.0, 1.5]);
        assert_eq!(pr.distance, 0.0);
    }

    #[test]
    fn round_into_examples() {
        let s = halfplane();
        assert_eq!(s.round_into(&[1.5, 1.5]).unwrap().as_slice(), &[1, 1]);
        assert_eq!(s.round_into(&[0.5, 0.5]).unwrap().as_slice(), &[0, 0]);
        assert_eq!(s.round_into(&[4.0, -2.0]).unwrap().as_slice(), &[4, -2]);
        assert!(matches!(s.round_into(&[0.0, 3.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn json_round_trip_with_nulls() {
        let text = r#"{"n":2,"alpha":[0,null],"beta":[null,5],"gamma":[[0,1,3]]}"#;
        let s: LNatSystem = serde_json::from_str(text).unwrap();
        assert_eq!(s.alpha(), &[Some(0), None]);
        assert_eq!(s.gamma().get(&(0, 1)), Some(&3));
        let back: LNatSystem = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<LNatSystem>(r#"{"n":1,"alpha":[2],"beta":[1]}"#).is_err());
    }

    #[test]
    fn feasible_point_is_member() {
        let s =
            LNatSystem::new(3, vec![Some(-2), None, Some(1)], vec![None, Some(0), Some(4)], [(0, 1, -1), (2, 0, 0)])
                .unwrap();
        let p = s.feasible_point().unwrap();
        assert!(s.contains(&p).unwrap());
    }

    fn arb_system() -> impl Strategy<Value = LNatSystem> {
        (1usize..=6).prop_flat_map(|n| {
            (prop::collection::vec((-5i64..=5, 0i64..=6), n), prop::collection::vec((0..n, 0..n, -3i64..=4), 0..8))
                .prop_filter_map("empty", move |(boxes, gam)| {
                    let alpha = boxes.iter().map(|&(a, _)| Some(a)).collect();
                    let beta = boxes.iter().map(|&(a, w)| Some(a + w)).collect();
                    let gam: Vec<_> = gam.into_iter().filter(|&(i, j, _)| i != j).collect();
                    LNatSystem::new(n, alpha, beta, gam).ok()
                })
        })
    }

    proptest! {
        #[test]
        fn projection_is_relaxed_feasible_and_roundable(
            s in arb_system(),
            raw in prop::collection::vec(-12.0f64..12.0, 6),
        ) {
            let p_hat = &raw[..s.dim()];
            let pr = s.project_general_with_stats(p_hat).unwrap();
            prop_assert!(s.max_violation(&pr.point).unwrap() <= RELAXED_TOL);
            prop_assert!(pr.arcs <= s.gamma().len() + 4 * s.dim() + 2);
            prop_assert!(s.round_into(&pr.point).is_ok());
        }

        #[test]
        fn projection_agrees_with_box_clamp_on_box_systems(
            boxes in prop::collection::vec((-5i64..=5, 0i64..=6), 1..=5),
            raw in prop::collection::vec(-12.0f64..12.0, 5),
        ) {
            let alpha: Vec<i64> = boxes.iter().map(|b| b.0).collect();
            let beta: Vec<i64> = boxes.iter().map(|b| b.0 + b.1).collect();
            let s = LNatSystem::boxed(alpha.clone(), beta.clone()).unwrap();
            let p_hat = &raw[..alpha.len()];
            let clamp = project_box(
                &alpha.iter().map(|&a| a as f64).collect::<Vec<_>>(),
                &beta.iter().map(|&b| b as f64).collect::<Vec<_>>(),
                p_hat,
            );
            let pr = s.project_general_with_stats(p_hat).unwrap();
            let clamp_dist = crate::descent::linf_pm_distance_f64(&clamp, p_hat);
            prop_assert!((pr.distance - clamp_dist).abs() <= 1e-9);
            prop_assert_eq!(pr.point, clamp);
            let graph = s.project_shortest_path(p_hat).unwrap();
            prop_assert!((graph.distance - clamp_dist).abs() <= 1e-9);
            prop_assert!(s.max_violation(&graph.point).unwrap() <= RELAXED_TOL);
        }
    }
}
