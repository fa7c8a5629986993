use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use dca_warmstart::descent::{
    brute_force_local_oracle, linf_pm_distance_f64, steepest_descent, BruteForceLocalOracle, DescentOptions, IntVector,
    LongStep, NeighborhoodMode, StepKind, TieBreak, UnitStep,
};
use dca_warmstart::energy::{energy_local_direction, solve_energy, EnergyInstance};
use dca_warmstart::lnat::LNatSystem;
use dca_warmstart::matching::{
    dual_objective, project_dual, project_dual_real, solve_matching, MatchingInstance, MatchingSolution, RealDualPair,
};
use dca_warmstart::matroid::{dual_value, solve_matroid_intersection, Matroid, MatroidSolution, WeightedMIInstance};
use dca_warmstart::{Error, Result};

use crate::instance::{Instance, ProblemKind};

/// Outcome of one solve, with an independently re-checked optimality certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub kind: ProblemKind,
    pub objective: i64,
    /// Matching pairs, common base, or labeling.
    pub solution: Value,
    /// Final dual point or labeling.
    pub point: Vec<i64>,
    /// Rounded projection the descent started from.
    pub start: Vec<i64>,
    pub iterations: usize,
    /// Matching: maximum-matching calls. Matroid: independence-oracle calls.
    /// Energy: min cuts. Generic: local-oracle calls.
    pub oracle_calls: u64,
    pub certificate: bool,
    pub certificate_detail: String,
    pub wall_us: u128,
}

/// Solves from `prediction`, or from the zero prediction when absent.
pub fn solve_instance(inst: &Instance, prediction: Option<&[f64]>, step: StepKind) -> Result<SolveReport> {
    let n = inst.dim();
    let zero = vec![0.0; n];
    let p_hat = prediction.unwrap_or(&zero);
    if p_hat.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p_hat.len() });
    }
    let clock = Instant::now();
    let mut report = match inst {
        Instance::Matching(m) => {
            let sol = solve_matching(m, &RealDualPair::from_slice(m.side(), p_hat), step)?;
            matching_report(m, sol)
        }
        Instance::Matroid(m) => matroid_report(m, solve_matroid_intersection(m, p_hat, step)?),
        Instance::Energy(e) => {
            let sol = solve_energy(e, p_hat, step)?;
            let (ok, detail) = energy_certificate(e, &sol.labels, sol.value, true)?;
            SolveReport {
                kind: ProblemKind::Energy,
                objective: sol.value,
                solution: json!(sol.labels.as_slice()),
                point: sol.labels.into_inner(),
                start: sol.start.into_inner(),
                iterations: sol.trace.iterations,
                oracle_calls: sol.cuts as u64,
                certificate: ok,
                certificate_detail: detail,
                wall_us: 0,
            }
        }
        Instance::Generic(e) => solve_generic(e, p_hat, step)?,
    };
    report.wall_us = clock.elapsed().as_micros();
    Ok(report)
}

fn matching_report(m: &MatchingInstance, sol: MatchingSolution) -> SolveReport {
    let side = m.side();
    let mut left = vec![false; side];
    let mut right = vec![false; side];
    let mut perfect = sol.matching.len() == side;
    for &(i, j) in &sol.matching {
        perfect &= !std::mem::replace(&mut left[i], true) && !std::mem::replace(&mut right[j], true);
    }
    let weight = m.matching_weight(&sol.matching);
    let (dual_value, feasible) = dual_objective(m, &sol.dual).unwrap_or((i64::MIN, false));
    let ok = perfect && feasible && weight == Some(dual_value) && weight == Some(sol.weight);
    SolveReport {
        kind: ProblemKind::Matching,
        objective: sol.weight,
        solution: json!(sol.matching),
        point: sol.dual.to_vec(),
        start: sol.start.to_vec(),
        iterations: sol.trace.iterations,
        oracle_calls: sol.trace.local_calls as u64,
        certificate: ok,
        certificate_detail: format!(
            "perfect={perfect} dual_feasible={feasible} w(M)={} dual={dual_value}",
            weight.map_or("n/a".into(), |w| w.to_string())
        ),
        wall_us: 0,
    }
}

fn matroid_report(m: &WeightedMIInstance, sol: MatroidSolution) -> SolveReport {
    let common = sol.base.len() == m.rank() && m.m1().is_independent(&sol.base) && m.m2().is_independent(&sol.base);
    let weight = m.weight_of(&sol.base);
    let g = dual_value(m, sol.dual.as_slice()).unwrap_or(i64::MIN);
    let ok = common && weight == g && weight == sol.weight;
    SolveReport {
        kind: ProblemKind::Matroid,
        objective: sol.weight,
        solution: json!(sol.base),
        point: sol.dual.into_inner(),
        start: sol.start.into_inner(),
        iterations: sol.trace.iterations,
        oracle_calls: sol.oracle_calls,
        certificate: ok,
        certificate_detail: format!("common_base={common} w(B)={weight} g(p)={g}"),
        wall_us: 0,
    }
}

/// Re-evaluates the energy and checks local optimality over `N±`, either with
/// cuts or by enumeration.
fn energy_certificate(e: &EnergyInstance, labels: &IntVector, value: i64, cuts: bool) -> Result<(bool, String)> {
    let again = e.energy_value(labels.as_slice()).finite();
    let locally_optimal = if cuts {
        energy_local_direction(e, labels.as_slice())?.improvement == 0
    } else {
        brute_force_local_oracle(e, labels.as_slice(), NeighborhoodMode::PlusMinus)?.is_zero()
    };
    let ok = again == Some(value) && locally_optimal;
    Ok((ok, format!("energy={} local_optimum={locally_optimal}", again.map_or("inf".into(), |v| v.to_string()))))
}

fn solve_generic(e: &EnergyInstance, p_hat: &[f64], step: StepKind) -> Result<SolveReport> {
    let start = e.project(p_hat)?;
    let width = e.label_width();
    let opts = DescentOptions::for_range(e.dim(), width as u64 + 2);
    let mut oracle = BruteForceLocalOracle { tie_break: TieBreak::Lexicographic };
    let (labels, trace) = match step {
        StepKind::Unit => steepest_descent(e, &mut oracle, &mut UnitStep, start.clone(), &opts)?,
        StepKind::Long => steepest_descent(e, &mut oracle, &mut LongStep { cap: width + 1 }, start.clone(), &opts)?,
    };
    let value =
        e.energy_value(labels.as_slice()).finite().ok_or(Error::InvariantViolation("left the domain".into()))?;
    let (ok, detail) = energy_certificate(e, &labels, value, false)?;
    Ok(SolveReport {
        kind: ProblemKind::Generic,
        objective: value,
        solution: json!(labels.as_slice()),
        point: labels.into_inner(),
        start: start.into_inner(),
        iterations: trace.iterations,
        oracle_calls: trace.local_calls as u64,
        certificate: ok,
        certificate_detail: detail,
        wall_us: 0,
    })
}

pub const SOLVE_CSV_HEADER: &str = "kind,objective,iterations,oracle_calls,certificate,wall_us,point,start";

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

impl SolveReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.kind,
            self.objective,
            self.iterations,
            self.oracle_calls,
            self.certificate,
            self.wall_us,
            join(&self.point),
            join(&self.start)
        )
    }
}

/// Projection of a point and its rounding, with ℓ∞± distances to the input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectReport {
    pub projection: Vec<f64>,
    pub rounded: Vec<i64>,
    pub distance: f64,
    pub rounded_distance: f64,
}

fn report(p_hat: &[f64], projection: Vec<f64>, rounded: IntVector) -> ProjectReport {
    let rounded_f: Vec<f64> = rounded.iter().map(|&x| x as f64).collect();
    ProjectReport {
        distance: linf_pm_distance_f64(&projection, p_hat),
        rounded_distance: linf_pm_distance_f64(&rounded_f, p_hat),
        projection,
        rounded: rounded.into_inner(),
    }
}

pub fn project_onto_system(system: &LNatSystem, p_hat: &[f64]) -> Result<ProjectReport> {
    let q = system.project_general(p_hat)?;
    let rounded = system.round_into(&q)?;
    Ok(report(p_hat, q, rounded))
}

/// Projects onto the domain of an instance; matching duals use the ε-shift.
pub fn project_for_instance(inst: &Instance, p_hat: &[f64]) -> Result<ProjectReport> {
    match inst {
        Instance::Matching(m) => {
            let real = RealDualPair::from_slice(m.side(), p_hat);
            let q = project_dual_real(m, &real)?.to_vec();
            let rounded = IntVector::new(project_dual(m, &real)?.to_vec())?;
            Ok(report(p_hat, q, rounded))
        }
        Instance::Matroid(m) => {
            // the dual is unconstrained
            project_onto_system(&LNatSystem::unconstrained(m.dim())?, p_hat)
        }
        Instance::Energy(e) | Instance::Generic(e) => project_onto_system(e.domain(), p_hat),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_instance, GenParams};

    #[test]
    fn every_kind_certifies() {
        for kind in [ProblemKind::Matching, ProblemKind::Matroid, ProblemKind::Energy, ProblemKind::Generic] {
            let inst = gen_instance(&GenParams::new(kind, 6, 9)).unwrap();
            for step in [StepKind::Unit, StepKind::Long] {
                let r = solve_instance(&inst, None, step).unwrap();
                assert!(r.certificate, "{kind}: {}", r.certificate_detail);
                assert_eq!(r.point.len(), inst.dim());
            }
        }
    }

    #[test]
    fn energy_and_generic_agree() {
        let inst = gen_instance(&GenParams::new(ProblemKind::Generic, 5, 2)).unwrap();
        let Instance::Generic(e) = &inst else { unreachable!() };
        let a = solve_instance(&inst, None, StepKind::Unit).unwrap();
        let b = solve_instance(&Instance::Energy(e.clone()), None, StepKind::Unit).unwrap();
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.point, b.point);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn wrong_prediction_length() {
        let inst = gen_instance(&GenParams::new(ProblemKind::Energy, 4, 0)).unwrap();
        assert!(solve_instance(&inst, Some(&[0.0]), StepKind::Unit).is_err());
    }

    #[test]
    fn projection_report() {
        let s = LNatSystem::new(2, vec![Some(0), Some(0)], vec![Some(5), Some(5)], [(0, 1, 0)]).unwrap();
        let r = project_onto_system(&s, &[0.0, 3.0]).unwrap();
        assert!((r.distance - 3.0).abs() < 1e-9);
        assert!(s.contains(&r.rounded).unwrap());
    }
}
