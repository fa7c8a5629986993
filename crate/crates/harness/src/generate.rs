use anyhow::{bail, Result};
use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use dca_warmstart::energy::{EnergyInstance, PairwiseKind, PairwiseTerm};
use dca_warmstart::matching::{path_counterexample, Edge, MatchingInstance};
use dca_warmstart::matroid::{tight_example, BuiltinMatroid, Partition, WeightedMIInstance};

use crate::instance::{Instance, ProblemKind};

pub const MAX_MATCHING_VERTICES: usize = 2000;
pub const MAX_MATROID_GROUND: usize = 400;
pub const MAX_ENERGY_VERTICES: usize = 10_000;
pub const MAX_GENERIC_VERTICES: usize = 16;
pub const MAX_WEIGHT: i64 = 1 << 20;
pub const MAX_LABELS: i64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[default]
    Random,
    /// Matroid: the alternating partition-matroid family with a unique common base.
    Tight,
    /// Matching: the even path whose optimal duals need a wide box.
    Path,
    /// Energy: the two-vertex fixture.
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub kind: ProblemKind,
    /// Vertex count for matching (both sides together), ground-set size for
    /// matroids, vertex count for energies.
    pub n: usize,
    pub seed: u64,
    pub family: Family,
    /// `‖w‖∞` for matching and matroid weights, slope range for energies.
    pub max_weight: i64,
    /// Labels per vertex for energies.
    pub labels: i64,
}

impl GenParams {
    pub fn new(kind: ProblemKind, n: usize, seed: u64) -> Self {
        GenParams { kind, n, seed, family: Family::Random, max_weight: 10, labels: 5 }
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic instance for the given parameters.
pub fn gen_instance(p: &GenParams) -> Result<Instance> {
    if p.max_weight < 1 || p.max_weight > MAX_WEIGHT {
        bail!("max weight must lie in 1..={MAX_WEIGHT}");
    }
    if p.labels < 1 || p.labels > MAX_LABELS {
        bail!("label count must lie in 1..={MAX_LABELS}");
    }
    let mut rng = rng_for(p.seed, 0);
    match (p.kind, p.family) {
        (ProblemKind::Matching, Family::Random) => {
            Ok(Instance::Matching(random_matching(&mut rng, p.n, p.max_weight)?))
        }
        (ProblemKind::Matching, Family::Path) => {
            check_even(p.n)?;
            Ok(Instance::Matching(path_counterexample(p.n, p.max_weight)?))
        }
        (ProblemKind::Matroid, Family::Random) => Ok(Instance::Matroid(random_matroid(&mut rng, p.n, p.max_weight)?)),
        (ProblemKind::Matroid, Family::Tight) => {
            if p.n < 3 || p.n.is_multiple_of(2) || p.n > MAX_MATROID_GROUND {
                bail!("the tight family needs an odd n between 3 and {MAX_MATROID_GROUND}");
            }
            Ok(Instance::Matroid(tight_example(p.n, p.max_weight)?))
        }
        (ProblemKind::Energy, Family::Random) => {
            check_cap(p.n, MAX_ENERGY_VERTICES)?;
            Ok(Instance::Energy(random_energy(&mut rng, p.n, p.labels, p.max_weight)?))
        }
        (ProblemKind::Energy, Family::Toy) => Ok(Instance::Energy(toy_energy())),
        (ProblemKind::Generic, Family::Random) => {
            check_cap(p.n, MAX_GENERIC_VERTICES)?;
            Ok(Instance::Generic(random_energy(&mut rng, p.n, p.labels, p.max_weight)?))
        }
        (kind, family) => bail!("family {family:?} is not available for {kind}"),
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        bail!("size {n} outside 1..={cap}");
    }
    Ok(())
}

fn check_even(n: usize) -> Result<()> {
    check_cap(n, MAX_MATCHING_VERTICES)?;
    if n % 2 == 1 {
        bail!("matching instances need an even vertex count, got {n}");
    }
    Ok(())
}

/// A planted perfect matching plus random extra edges, weights uniform in `[−W, W]`.
pub fn random_matching(rng: &mut ChaCha8Rng, n: usize, w: i64) -> Result<MatchingInstance> {
    check_even(n)?;
    let side = n / 2;
    let mut perm: Vec<usize> = (0..side).collect();
    perm.shuffle(rng);
    let density = (4.0 / side as f64).clamp(0.3, 1.0);
    let mut edges = Vec::new();
    for (i, &planted) in perm.iter().enumerate() {
        for j in 0..side {
            if planted == j || rng.gen_bool(density) {
                edges.push(Edge { i, j, w: rng.gen_range(-w..=w) });
            }
        }
    }
    Ok(MatchingInstance::new(side, side, edges)?)
}

/// Two partition matroids of rank `⌈n/2⌉` sharing a planted common base.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize, w: i64) -> Result<WeightedMIInstance> {
    check_cap(n, MAX_MATROID_GROUND)?;
    let r = n.div_ceil(2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let base = &order[..r];
    let rest = &order[r..];
    let mut side = || -> Result<BuiltinMatroid> {
        let mut blocks: Vec<Vec<usize>> = base.iter().map(|&b| vec![b]).collect();
        for &x in rest {
            let k = rng.gen_range(0..r);
            blocks[k].push(x);
        }
        Ok(BuiltinMatroid::Partition(Partition::new(n, blocks, vec![1; r])?))
    };
    let (m1, m2) = (side()?, side()?);
    let weights = (0..n).map(|_| rng.gen_range(-w..=w)).collect();
    Ok(WeightedMIInstance::new(m1, m2, weights)?)
}

/// Random convex table of the given length, slopes within `[−w, w]`.
pub fn convex_table(rng: &mut ChaCha8Rng, len: usize, w: i64) -> Vec<i64> {
    let mut slopes: Vec<i64> = (1..len).map(|_| rng.gen_range(-w..=w)).collect();
    slopes.sort_unstable();
    let mut v = rng.gen_range(0..=w);
    let mut out = Vec::with_capacity(len);
    out.push(v);
    for s in slopes {
        v += s;
        out.push(v);
    }
    out
}

/// A grid-shaped energy with labels `0..labels`, convex unary tables and a mix
/// of absolute, quadratic and tabulated pairwise terms.
pub fn random_energy(rng: &mut ChaCha8Rng, n: usize, labels: i64, w: i64) -> Result<EnergyInstance> {
    let width = (n as f64).sqrt().ceil() as usize;
    let boxes = vec![(0, labels - 1); n];
    let unary = (0..n).map(|_| convex_table(rng, labels as usize, w)).collect();
    let mut edges = Vec::new();
    for v in 0..n {
        if (v + 1) % width != 0 && v + 1 < n {
            edges.push((v, v + 1));
        }
        if v + width < n {
            edges.push((v, v + width));
        }
    }
    let pair_weight = (w / 2).max(1);
    let pairwise = edges
        .iter()
        .map(|&edge| {
            let kind = match rng.gen_range(0..3) {
                0 => PairwiseKind::Abs { weight: rng.gen_range(0..=pair_weight) },
                1 => PairwiseKind::Quad { weight: rng.gen_range(0..=2) },
                _ => {
                    let k = labels - 1;
                    PairwiseKind::Table { lo: -k, values: convex_table(rng, (2 * k + 1) as usize, pair_weight) }
                }
            };
            PairwiseTerm { edge, kind, window: None }
        })
        .collect();
    Ok(EnergyInstance::new(boxes, unary, edges, pairwise)?)
}

/// Two vertices with labels `{0,1,2}`, `φ₁ = (0,1,2)`, `φ₂ = (2,1,0)` and `ψ(δ) = |δ|`.
pub fn toy_energy() -> EnergyInstance {
    EnergyInstance::new(
        vec![(0, 2), (0, 2)],
        vec![vec![0, 1, 2], vec![2, 1, 0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: 1 }, window: None }],
    )
    .expect("fixture is valid")
}

/// The same instance with weights (or unary slopes) shifted by noise in `[−s, s]`.
pub fn perturb(inst: &Instance, rng: &mut ChaCha8Rng, s: i64) -> Result<Instance> {
    Ok(match inst {
        Instance::Matching(m) => {
            let edges = m.edges().iter().map(|e| Edge { w: e.w + rng.gen_range(-s..=s), ..*e }).collect();
            Instance::Matching(MatchingInstance::new(m.side(), m.side(), edges)?)
        }
        Instance::Matroid(m) => {
            let w = m.weights().iter().map(|x| x + rng.gen_range(-s..=s)).collect();
            Instance::Matroid(WeightedMIInstance::new(m.m1().clone(), m.m2().clone(), w)?)
        }
        Instance::Energy(e) | Instance::Generic(e) => {
            // adding a linear term keeps every table convex
            let unary = e
                .unary()
                .iter()
                .zip(e.labels())
                .map(|(t, &(a, _))| {
                    let slope = rng.gen_range(-s..=s);
                    t.iter().enumerate().map(|(k, v)| v + slope * (a + k as i64)).collect()
                })
                .collect();
            let shifted = EnergyInstance::new(e.labels().to_vec(), unary, e.edges().to_vec(), e.pairwise().to_vec())?;
            match inst {
                Instance::Energy(_) => Instance::Energy(shifted),
                _ => Instance::Generic(shifted),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        for kind in [ProblemKind::Matching, ProblemKind::Matroid, ProblemKind::Energy, ProblemKind::Generic] {
            let p = GenParams::new(kind, 8, 1);
            assert_eq!(gen_instance(&p).unwrap().to_json(), gen_instance(&p).unwrap().to_json());
        }
        let a = gen_instance(&GenParams::new(ProblemKind::Matching, 8, 1)).unwrap();
        let b = gen_instance(&GenParams::new(ProblemKind::Matching, 8, 2)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn fixtures() {
        let toy = GenParams { family: Family::Toy, ..GenParams::new(ProblemKind::Energy, 2, 0) };
        assert_eq!(gen_instance(&toy).unwrap(), Instance::Energy(toy_energy()));
        let tight = GenParams { family: Family::Tight, max_weight: 3, ..GenParams::new(ProblemKind::Matroid, 9, 0) };
        assert_eq!(gen_instance(&tight).unwrap(), Instance::Matroid(tight_example(9, 3).unwrap()));
        let path = GenParams { family: Family::Path, ..GenParams::new(ProblemKind::Matching, 8, 0) };
        assert_eq!(gen_instance(&path).unwrap().dim(), 8);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gen_instance(&GenParams::new(ProblemKind::Matching, 7, 0)).is_err());
        assert!(gen_instance(&GenParams::new(ProblemKind::Generic, 40, 0)).is_err());
        let bad = GenParams { family: Family::Tight, ..GenParams::new(ProblemKind::Energy, 4, 0) };
        assert!(gen_instance(&bad).is_err());
    }

    #[test]
    fn perturbation_keeps_structure() {
        let mut rng = rng_for(3, 1);
        for kind in [ProblemKind::Matching, ProblemKind::Matroid, ProblemKind::Energy] {
            let inst = gen_instance(&GenParams::new(kind, 10, 4)).unwrap();
            let p = perturb(&inst, &mut rng, 3).unwrap();
            assert_eq!(p.kind(), kind);
            assert_eq!(p.dim(), inst.dim());
        }
    }
}
