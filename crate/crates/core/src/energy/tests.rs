use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::descent::{brute_force_local_oracle, linf_pm_distance};

fn toy() -> EnergyInstance {
    EnergyInstance::new(
        vec![(0, 2), (0, 2)],
        vec![vec![0, 1, 2], vec![2, 1, 0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: 1 }, window: None }],
    )
    .unwrap()
}

fn convex_table(rng: &mut ChaCha8Rng, len: usize) -> Vec<i64> {
    let mut slopes: Vec<i64> = (1..len).map(|_| rng.gen_range(-6..=6)).collect();
    slopes.sort_unstable();
    let mut v = rng.gen_range(-5..=5);
    let mut out = vec![v];
    for s in slopes {
        v += s;
        out.push(v);
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, max_labels: i64) -> EnergyInstance {
    loop {
        match try_random_instance(rng, n, max_labels) {
            Ok(e) => return e,
            Err(Error::EmptySet) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

fn try_random_instance(rng: &mut ChaCha8Rng, n: usize, max_labels: i64) -> Result<EnergyInstance> {
    let labels: Vec<(i64, i64)> = (0..n)
        .map(|_| {
            let a = rng.gen_range(-2..=1);
            (a, a + rng.gen_range(0..max_labels))
        })
        .collect();
    let unary = labels.iter().map(|&(a, b)| convex_table(rng, (b - a + 1) as usize)).collect();
    let mut edges = Vec::new();
    let mut pairwise = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let (i, j) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            edges.push((i, j));
            let kind = match rng.gen_range(0..3) {
                0 => PairwiseKind::Abs { weight: rng.gen_range(0..=3) },
                1 => PairwiseKind::Quad { weight: rng.gen_range(0..=2) },
                _ => {
                    let k = rng.gen_range(1..=3);
                    PairwiseKind::Table { lo: -k, values: convex_table(rng, 2 * k as usize + 1) }
                }
            };
            let window = rng.gen_bool(0.2).then(|| (-rng.gen_range(1..=3), rng.gen_range(1..=3)));
            pairwise.push(PairwiseTerm { edge: (i, j), kind, window });
        }
    }
    EnergyInstance::new(labels, unary, edges, pairwise)
}

fn random_feasible_point(rng: &mut ChaCha8Rng, inst: &EnergyInstance) -> Vec<i64> {
    loop {
        let p: Vec<i64> = inst.labels().iter().map(|&(a, b)| rng.gen_range(a..=b)).collect();
        if inst.energy_value(&p).is_finite() {
            return p;
        }
    }
}

#[test]
fn toy_values() {
    let e = toy();
    assert_eq!(e.energy_value(&[0, 2]), ExtValue::Finite(2));
    assert_eq!(e.energy_value(&[0, 3]), ExtValue::Infinite);
    assert_eq!(e.energy_value(&[-1, 0]), ExtValue::Infinite);
}

#[test]
fn single_vertex_energy_is_its_table() {
    let e = EnergyInstance::new(vec![(0, 2)], vec![vec![3, 1, 2]], vec![], vec![]).unwrap();
    for (l, v) in [3, 1, 2].into_iter().enumerate() {
        assert_eq!(e.energy_value(&[l as i64]), ExtValue::Finite(v));
    }
    assert_eq!(brute_force_energy(&e).unwrap(), (1, IntVector::new(vec![1]).unwrap()));
}

#[test]
fn toy_cross_arc_capacity() {
    let g = build_cut_graph(&toy(), &[0, 0], Sign::Plus).unwrap();
    let cross: Vec<_> = g.network.arcs.iter().filter(|a| a.from < 2 && a.to < 2).collect();
    assert_eq!(cross.len(), 1);
    assert_eq!((cross[0].from, cross[0].to, cross[0].cap), (1, 0, 2));
    assert_eq!(g.vertex_count(), 2);
}

#[test]
fn toy_is_already_optimal() {
    let e = toy();
    assert_eq!(brute_force_energy(&e).unwrap(), (2, IntVector::new(vec![0, 0]).unwrap()));
    let local = energy_local_direction(&e, &[0, 0]).unwrap();
    assert!(local.direction.is_zero());
    assert_eq!(local.improvement, 0);
    for sign in [Sign::Plus, Sign::Minus] {
        let m = signed_minimizer(&e, &[0, 0], sign).unwrap();
        assert!(m.support.is_empty());
        assert_eq!(m.value, 2);
    }
}

#[test]
fn toy_solve_from_prediction() {
    let e = toy();
    let sol = solve_energy(&e, &[0.4, 0.3], StepKind::Unit).unwrap();
    assert_eq!(sol.start.as_slice(), &[0, 0]);
    assert_eq!(sol.value, 2);
    assert_eq!(sol.trace.iterations, 1);
}

#[test]
fn all_zero_tables_pick_the_lower_corner() {
    let e = EnergyInstance::new(
        vec![(-1, 2), (3, 4), (0, 0)],
        vec![vec![0; 4], vec![0; 2], vec![0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: 0 }, window: None }],
    )
    .unwrap();
    assert_eq!(brute_force_energy(&e).unwrap(), (0, IntVector::new(vec![-1, 3, 0]).unwrap()));
}

#[test]
fn rejects_nonconvex_terms() {
    let bad_unary = EnergyInstance::new(vec![(0, 2)], vec![vec![0, 2, 1]], vec![], vec![]);
    assert!(matches!(bad_unary, Err(Error::NotConvex(_))));
    let bad_pair = EnergyInstance::new(
        vec![(0, 1), (0, 1)],
        vec![vec![0, 0], vec![0, 0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Table { lo: -1, values: vec![0, 1, 0] }, window: None }],
    );
    assert!(matches!(bad_pair, Err(Error::NotConvex(_))));
    let negative = EnergyInstance::new(
        vec![(0, 1), (0, 1)],
        vec![vec![0, 0], vec![0, 0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: -1 }, window: None }],
    );
    assert!(matches!(negative, Err(Error::NotConvex(_))));
}

#[test]
fn windows_restrict_the_domain() {
    let e = EnergyInstance::new(
        vec![(0, 3), (0, 3)],
        vec![vec![3, 2, 1, 0], vec![0, 1, 2, 3]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: 0 }, window: Some((-1, 1)) }],
    )
    .unwrap();
    assert_eq!(e.energy_value(&[3, 0]), ExtValue::Infinite);
    assert_eq!(e.energy_value(&[3, 2]), ExtValue::Finite(2));
    let sol = solve_energy(&e, &[3.0, 0.0], StepKind::Long).unwrap();
    assert!(e.domain().contains(sol.start.as_slice()).unwrap());
    assert_eq!(sol.value, brute_force_energy(&e).unwrap().0);
}

#[test]
fn empty_window_system_is_rejected() {
    let e = EnergyInstance::new(
        vec![(0, 0), (5, 5)],
        vec![vec![0], vec![0]],
        vec![(0, 1)],
        vec![PairwiseTerm { edge: (0, 1), kind: PairwiseKind::Abs { weight: 1 }, window: Some((-1, 1)) }],
    );
    assert!(matches!(e, Err(Error::EmptySet)));
}

#[test]
fn json_round_trip_and_literal() {
    let text = r#"{"type":"energy","n":2,"edges":[[0,1]],"unary":[[0,1,2],[2,1,0]],
        "pairwise":[{"edge":[0,1],"kind":"abs"}],"box":[[0,2],[0,2]]}"#;
    let e: EnergyInstance = serde_json::from_str(text).unwrap();
    assert_eq!(e, toy());
    let back: EnergyInstance = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
    assert_eq!(back, e);
    let table = r#"{"type":"energy","n":2,"edges":[[0,1]],"unary":[[0,0],[0,0]],
        "pairwise":[{"edge":[0,1],"kind":"table","lo":-1,"values":[1,0,1],"window":[-1,0]}],"box":[[0,1],[0,1]]}"#;
    let t: EnergyInstance = serde_json::from_str(table).unwrap();
    assert_eq!(t.energy_value(&[0, 1]), ExtValue::Infinite);
    assert_eq!(t.energy_value(&[1, 0]), ExtValue::Finite(1));
    assert!(serde_json::from_str::<EnergyInstance>(&text.replace("energy", "matching")).is_err());
}

#[test]
fn arc_count_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let e = random_instance(&mut rng, n, 5);
        let p = random_feasible_point(&mut rng, &e);
        for sign in [Sign::Plus, Sign::Minus] {
            let g = build_cut_graph(&e, &p, sign).unwrap();
            assert!(g.arc_count() <= 3 * e.edges().len() + n);
            assert!(g.network.arcs.iter().all(|a| a.cap >= 0));
        }
    }
}

#[test]
fn cut_model_matches_energy_on_every_labeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.gen_range(1..=6);
        let e = random_instance(&mut rng, n, 4);
        let p = random_feasible_point(&mut rng, &e);
        for sign in [Sign::Plus, Sign::Minus] {
            let g = build_cut_graph(&e, &p, sign).unwrap();
            for mask in 0u32..(1 << n) {
                let side: Vec<bool> = (0..n + 2).map(|v| v == n || (v < n && mask >> v & 1 == 1)).collect();
                let cut: i64 = g.network.arcs.iter().filter(|a| side[a.from] && !side[a.to]).map(|a| a.cap).sum();
                let support: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                match e.energy_value(&Direction::new(support, sign).apply(&p, 1)) {
                    ExtValue::Finite(v) => assert_eq!(cut + g.constant, v),
                    ExtValue::Infinite => assert!(cut + g.constant > e.energy_value(&p).finite().unwrap()),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn local_direction_matches_enumeration(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_instance(&mut rng, n, 4);
        let p = random_feasible_point(&mut rng, &e);
        let cut = energy_local_direction(&e, &p).unwrap();
        let brute = brute_force_local_oracle(&e, &p, NeighborhoodMode::PlusMinus).unwrap();
        let current = e.energy_value(&p).finite().unwrap();
        let brute_gain = if brute.is_zero() { 0 } else { e.energy_value(&brute.apply(&p, 1)).finite().unwrap() - current };
        prop_assert_eq!(cut.improvement, brute_gain);
        prop_assert_eq!(cut.direction, brute);
    }

    #[test]
    fn lowest_minimizer_is_lexicographic(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_instance(&mut rng, n, 5);
        let (v, lex) = brute_force_energy(&e).unwrap();
        let sol = solve_energy(&e, &vec![0.0; n], StepKind::Unit).unwrap();
        prop_assert_eq!(sol.value, v);
        prop_assert_eq!(lowest_minimizer(&e, sol.labels.as_slice()).unwrap(), lex);
    }
}

#[test]
fn random_solves_match_enumeration_and_iteration_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let e = random_instance(&mut rng, n, 5);
        let (v, p_star) = brute_force_energy(&e).unwrap();
        for step in [StepKind::Unit, StepKind::Long] {
            let p_hat: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..6.0)).collect();
            let sol = solve_energy(&e, &p_hat, step).unwrap();
            assert_eq!(sol.value, v);
            let bound = linf_pm_distance(p_star.as_slice(), sol.start.as_slice()) as usize + 1;
            assert!(sol.trace.iterations <= bound, "{} > {bound}", sol.trace.iterations);
        }
        let exact: Vec<f64> = p_star.iter().map(|&x| x as f64).collect();
        assert!(solve_energy(&e, &exact, StepKind::Unit).unwrap().trace.iterations <= 1);
    }
}
