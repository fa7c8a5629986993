//! Learning initial points: projected online gradient descent on the
//! ℓ∞ loss `L_t(p) = ‖p*_t − p‖∞` over the box `[−C, C]^V`, with
//! online-to-batch averaging.

use serde::{Deserialize, Serialize};

use crate::descent::MAGNITUDE_CAP;
use crate::error::{Error, Result};

/// Slack allowed when checking that a comparator lies in the box.
const BOX_TOL: f64 = 1e-12;

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `max_i |p_i − p*_i|` and the subgradient `sign(p_k − p*_k) e_k` at the
/// lowest maximizing index `k` (zero when the loss is zero).
pub fn linf_loss_subgradient(p_star: &[i64], p: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dims(p_star.len(), p.len())?;
    let mut loss = 0.0;
    let mut k = None;
    for (i, (&s, &x)) in p_star.iter().zip(p).enumerate() {
        let gap = (x - s as f64).abs();
        if gap > loss {
            loss = gap;
            k = Some(i);
        }
    }
    let mut sub = vec![0.0; p.len()];
    if let Some(k) = k {
        sub[k] = (p[k] - p_star[k] as f64).signum();
    }
    Ok((loss, sub))
}

/// The ℓ∞± loss `max(0, max_i (p − p*)_i) + max(0, max_i (p* − p)_i)`,
/// convex and √2-Lipschitz, with a subgradient built from the lowest
/// maximizing index of each part.
pub fn linf_pm_loss_subgradient(p_star: &[i64], p: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dims(p_star.len(), p.len())?;
    let mut sub = vec![0.0; p.len()];
    let mut up: (f64, Option<usize>) = (0.0, None);
    let mut down: (f64, Option<usize>) = (0.0, None);
    for (i, (&s, &x)) in p_star.iter().zip(p).enumerate() {
        let d = x - s as f64;
        if d > up.0 {
            up = (d, Some(i));
        }
        if -d > down.0 {
            down = (-d, Some(i));
        }
    }
    if let Some(i) = up.1 {
        sub[i] += 1.0;
    }
    if let Some(i) = down.1 {
        sub[i] -= 1.0;
    }
    Ok((up.0 + down.0, sub))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    #[default]
    Linf,
    LinfPm,
}

impl LossKind {
    pub fn evaluate(self, p_star: &[i64], p: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            LossKind::Linf => linf_loss_subgradient(p_star, p),
            LossKind::LinfPm => linf_pm_loss_subgradient(p_star, p),
        }
    }
}

/// Step size schedule: `η = C√n/√T` for a declared horizon, or `C√n/√t` at round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Horizon(usize),
    Anytime,
}

/// One round: the prediction used, the target revealed afterwards and the loss paid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub prediction: Vec<f64>,
    pub target: Vec<i64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    c: f64,
    n: usize,
    p_hat: Vec<f64>,
    schedule: Schedule,
    loss: LossKind,
    t: usize,
    history: Vec<Round>,
}

/// Checkpoint file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    #[serde(rename = "C")]
    pub c: f64,
    pub n: usize,
    pub p_hat: Vec<f64>,
    /// Rounds completed so far.
    pub t: usize,
    pub eta: f64,
}

impl LearnerState {
    /// A learner for `horizon` rounds starting from the box center.
    pub fn new(c: f64, n: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Contract("the horizon must be at least one round".into()));
        }
        Self::with_schedule(c, n, Schedule::Horizon(horizon))
    }

    pub fn with_schedule(c: f64, n: usize, schedule: Schedule) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Contract(format!("box radius must be positive, got {c}")));
        }
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        Ok(LearnerState { c, n, p_hat: vec![0.0; n], schedule, loss: LossKind::Linf, t: 0, history: Vec::new() })
    }

    pub fn with_loss(mut self, loss: LossKind) -> Self {
        self.loss = loss;
        self
    }

    pub fn radius(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The prediction for the next round.
    pub fn prediction(&self) -> &[f64] {
        &self.p_hat
    }

    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn history(&self) -> &[Round] {
        &self.history
    }

    /// Step size of the next update.
    pub fn eta(&self) -> f64 {
        let horizon = match self.schedule {
            Schedule::Horizon(t) => t,
            Schedule::Anytime => self.t + 1,
        };
        self.c * (self.n as f64).sqrt() / (horizon as f64).sqrt()
    }

    /// Pays the loss of the current prediction on `p_star`, then takes a projected
    /// subgradient step. Returns the loss.
    pub fn ogd_step(&mut self, p_star: &[i64]) -> Result<f64> {
        check_dims(self.n, p_star.len())?;
        if let Some(&v) = p_star.iter().find(|v| v.abs() > MAGNITUDE_CAP) {
            return Err(Error::Overflow { value: v as f64 });
        }
        let (loss, sub) = self.loss.evaluate(p_star, &self.p_hat)?;
        let eta = self.eta();
        let next: Vec<f64> = self.p_hat.iter().zip(&sub).map(|(x, g)| (x - eta * g).clamp(-self.c, self.c)).collect();
        let prediction = std::mem::replace(&mut self.p_hat, next);
        self.history.push(Round { prediction, target: p_star.to_vec(), loss });
        self.t += 1;
        Ok(loss)
    }

    /// Mean of the predictions used so far; the box center before any round.
    pub fn average(&self) -> Vec<f64> {
        if self.history.is_empty() {
            return vec![0.0; self.n];
        }
        let mut avg = vec![0.0; self.n];
        for r in &self.history {
            avg.iter_mut().zip(&r.prediction).for_each(|(a, x)| *a += x);
        }
        let t = self.history.len() as f64;
        avg.iter_mut().for_each(|a| *a /= t);
        avg
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { c: self.c, n: self.n, p_hat: self.p_hat.clone(), t: self.t, eta: self.eta() }
    }

    /// Resumes a fixed-horizon learner. The horizon is recovered from `eta`;
    /// the history is not part of a checkpoint.
    pub fn from_checkpoint(cp: &Checkpoint) -> Result<Self> {
        check_dims(cp.n, cp.p_hat.len())?;
        if !(cp.eta.is_finite() && cp.eta > 0.0) {
            return Err(Error::Contract(format!("step size must be positive, got {}", cp.eta)));
        }
        let horizon = (cp.c * cp.c * cp.n as f64 / (cp.eta * cp.eta)).round().max(1.0) as usize;
        let mut s = Self::new(cp.c, cp.n, horizon)?;
        if cp.p_hat.iter().any(|x| x.abs() > cp.c + BOX_TOL) {
            return Err(Error::Contract("checkpointed prediction lies outside the box".into()));
        }
        s.p_hat = cp.p_hat.clone();
        s.t = cp.t;
        Ok(s)
    }
}

/// Runs a fixed-horizon learner over `samples` and returns the averaged prediction.
pub fn learn_batch(samples: &[Vec<i64>], c: f64) -> Result<Vec<f64>> {
    let first = samples.first().ok_or_else(|| Error::Contract("learning needs at least one sample".into()))?;
    let mut state = LearnerState::new(c, first.len(), samples.len())?;
    for s in samples {
        state.ogd_step(s)?;
    }
    Ok(state.average())
}

/// `C √(2nT)`.
pub fn regret_bound(c: f64, n: usize, t: usize) -> f64 {
    c * (2.0 * n as f64 * t as f64).sqrt()
}

/// Sample size `⌈32 (C/ε)² (n + ln(1/δ))⌉` for ε-excess risk with probability `1 − δ`.
pub fn sample_size(c: f64, eps: f64, delta: f64, n: usize) -> usize {
    (32.0 * (c / eps).powi(2) * (n as f64 + (1.0 / delta).ln())).ceil() as usize
}

/// Box radius large enough for matching duals, `n ‖w‖∞`.
pub fn matching_radius(n: usize, max_abs_weight: i64) -> f64 {
    (n as f64 * max_abs_weight as f64).max(1.0)
}

/// Box radius large enough for matroid-intersection duals, `r ‖w‖∞`.
pub fn matroid_radius(rank: usize, max_abs_weight: i64) -> f64 {
    (rank as f64 * max_abs_weight as f64).max(1.0)
}

/// `max_q Σ_t (loss(p̂_t) − loss(q))` over the comparators `q`, with the ℓ∞ loss.
pub fn regret_eval(history: &[Round], comparators: &[Vec<f64>], c: f64) -> Result<f64> {
    if comparators.is_empty() {
        return Err(Error::Contract("no comparators supplied".into()));
    }
    let learner: f64 = history.iter().map(|r| r.loss).sum();
    let mut worst = f64::NEG_INFINITY;
    for q in comparators {
        if q.iter().any(|x| !x.is_finite() || x.abs() > c + BOX_TOL) {
            return Err(Error::Contract("comparator lies outside the box".into()));
        }
        let mut total = 0.0;
        for r in history {
            total += linf_loss_subgradient(&r.target, q)?.0;
        }
        worst = worst.max(learner - total);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linf(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn subgradient_examples() {
        assert_eq!(linf_loss_subgradient(&[0, 0], &[2.0, -1.0]).unwrap(), (2.0, vec![1.0, 0.0]));
        assert_eq!(linf_loss_subgradient(&[1, 2], &[1.0, 2.0]).unwrap(), (0.0, vec![0.0, 0.0]));
        assert_eq!(linf_loss_subgradient(&[0, 0], &[-1.0, 1.0]).unwrap(), (1.0, vec![-1.0, 0.0]));
        assert!(linf_loss_subgradient(&[0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn pm_loss_example() {
        let (l, g) = linf_pm_loss_subgradient(&[0, 0], &[2.0, -1.0]).unwrap();
        assert_eq!(l, 3.0);
        assert_eq!(g, vec![1.0, -1.0]);
    }

    #[test]
    fn single_round() {
        let mut s = LearnerState::new(1.0, 1, 1).unwrap();
        let loss = s.ogd_step(&[1]).unwrap();
        assert_eq!(loss, 1.0);
        assert!(loss <= regret_bound(1.0, 1, 1));
        let r = regret_eval(s.history(), &[vec![1.0]], 1.0).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn clamp_holds_boundary() {
        let mut s = LearnerState::new(2.0, 1, 4).unwrap();
        s.p_hat = vec![2.0];
        s.ogd_step(&[5]).unwrap();
        assert_eq!(s.prediction(), &[2.0]);
    }

    #[test]
    fn constant_target_converges_monotonically() {
        let (c, n, t) = (10.0, 5, 1000);
        let target = vec![3i64; n];
        let tf = vec![3.0; n];
        let mut s = LearnerState::new(c, n, t).unwrap();
        let eta = s.eta();
        let mut prev = linf(s.prediction(), &tf);
        for _ in 0..t {
            s.ogd_step(&target).unwrap();
            let d = linf(s.prediction(), &tf);
            if prev > eta {
                assert!(d <= prev + 1e-12);
            } else {
                assert!(d <= eta + 1e-12);
            }
            prev = d;
        }
        assert!(prev <= eta);
    }

    #[test]
    fn batch_of_one_is_the_initial_point() {
        assert_eq!(learn_batch(&[vec![4, -4]], 5.0).unwrap(), vec![0.0, 0.0]);
        assert!(learn_batch(&[], 1.0).is_err());
    }

    #[test]
    fn batch_constant_target() {
        let v = vec![1i64, -2, 3];
        let samples = vec![v.clone(); 10_000];
        let c = 5.0;
        let avg = learn_batch(&samples, c).unwrap();
        let eta = c * 3f64.sqrt() / 100.0;
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        assert!(linf(&avg, &vf) <= eta, "{avg:?}");
    }

    #[test]
    fn constant_predictions_have_zero_regret_against_themselves() {
        let mut s = LearnerState::new(1.0, 2, 3).unwrap();
        for _ in 0..3 {
            s.ogd_step(&[0, 0]).unwrap();
        }
        assert_eq!(regret_eval(s.history(), &[vec![0.0, 0.0]], 1.0).unwrap(), 0.0);
        assert!(regret_eval(s.history(), &[vec![2.0, 0.0]], 1.0).is_err());
    }

    /// Exact expected ℓ∞ risk when each coordinate is `a_i` or `b_i` with probability 1/2.
    fn two_point_risk(a: &[i64], b: &[i64], p: &[f64]) -> f64 {
        let n = a.len();
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let target: Vec<i64> = (0..n).map(|i| if mask >> i & 1 == 1 { b[i] } else { a[i] }).collect();
            total += linf_loss_subgradient(&target, p).unwrap().0;
        }
        total / (1u32 << n) as f64
    }

    #[test]
    fn averaged_predictor_has_small_excess_risk() {
        let (c, eps, delta, n) = (2.0, 0.5, 0.1, 2);
        let t = sample_size(c, eps, delta, n);
        let (a, b) = (vec![-2i64, 1], vec![1i64, 2]);
        let mut best = f64::INFINITY;
        for x in -200..=200 {
            for y in -200..=200 {
                best = best.min(two_point_risk(&a, &b, &[x as f64 / 100.0, y as f64 / 100.0]));
            }
        }
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Vec<i64>> =
                (0..t).map(|_| (0..n).map(|i| if rng.gen_bool(0.5) { a[i] } else { b[i] }).collect()).collect();
            let p = learn_batch(&samples, c).unwrap();
            assert!(two_point_risk(&a, &b, &p) <= best + eps);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut s = LearnerState::new(3.0, 2, 50).unwrap();
        s.ogd_step(&[2, -1]).unwrap();
        let cp = s.checkpoint();
        let text = serde_json::to_string(&cp).unwrap();
        assert!(text.contains("\"C\":3.0"));
        let back: Checkpoint = serde_json::from_str(&text).unwrap();
        let r = LearnerState::from_checkpoint(&back).unwrap();
        assert_eq!(r.prediction(), s.prediction());
        assert_eq!(r.rounds(), 1);
        assert!((r.eta() - s.eta()).abs() < 1e-12);
    }

    #[test]
    fn anytime_schedule_shrinks() {
        let mut s = LearnerState::with_schedule(1.0, 4, Schedule::Anytime).unwrap();
        let first = s.eta();
        s.ogd_step(&[1, 1, 1, 1]).unwrap();
        assert!(s.eta() < first);
    }

    #[test]
    fn rejects_huge_targets() {
        let mut s = LearnerState::new(1.0, 1, 1).unwrap();
        assert!(matches!(s.ogd_step(&[MAGNITUDE_CAP + 1]), Err(Error::Overflow { .. })));
    }

    proptest! {
        #[test]
        fn loss_is_midpoint_convex(
            star in prop::collection::vec(-5i64..5, 3),
            p in prop::collection::vec(-5.0f64..5.0, 3),
            q in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a + b) / 2.0).collect();
            let l = |x: &[f64]| linf_loss_subgradient(&star, x).unwrap().0;
            prop_assert!(l(&mid) <= (l(&p) + l(&q)) / 2.0 + 1e-12);
        }

        #[test]
        fn loss_is_one_lipschitz(
            star in prop::collection::vec(-5i64..5, 4),
            p in prop::collection::vec(-5.0f64..5.0, 4),
            q in prop::collection::vec(-5.0f64..5.0, 4),
        ) {
            let l = |x: &[f64]| linf_loss_subgradient(&star, x).unwrap().0;
            let l2 = p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!((l(&p) - l(&q)).abs() <= l2 + 1e-12);
        }

        #[test]
        fn iterates_stay_in_box_and_regret_is_bounded(
            seed in any::<u64>(),
            n in 1usize..6,
            t in 1usize..200,
        ) {
            let c = 3.0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = LearnerState::new(c, n, t).unwrap();
            for _ in 0..t {
                let target: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
                s.ogd_step(&target).unwrap();
                prop_assert!(s.prediction().iter().all(|x| x.abs() <= c));
            }
            let mut comparators: Vec<Vec<f64>> = s.history().iter()
                .map(|r| r.target.iter().map(|&x| (x as f64).clamp(-c, c)).collect())
                .collect();
            comparators.push(vec![0.0; n]);
            let regret = regret_eval(s.history(), &comparators, c).unwrap();
            prop_assert!(regret <= regret_bound(c, n, t));
        }
    }
}
