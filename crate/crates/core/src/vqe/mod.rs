//! Sampling VQE over one cable block, and the per-cable decomposed solve.

mod simplex;

pub use simplex::{nelder_mead, Minimum, SimplexOptions};

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::{check_block, FeasibilityReport};
use crate::quantum::{estimate_energy, exact_distribution, prepare_state, AnsatzSpec, Sampler};
use crate::qubo::{
    build_cable_qubo, penalties_for, scale_penalties, BitEnergy, CableQubo, PenaltyMode, MAX_DIM,
};
use crate::seed::{derive_seed, stream, TAG_CABLE, TAG_SHOTS, TAG_THETA};

/// Initial simplex edge length in radians.
pub const INITIAL_STEP: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaInit {
    /// Uniform in `[0, 2π)`.
    Random,
    Zeros,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VqeConfig {
    /// Shots per evaluation; 0 uses the exact distribution.
    pub shots: u64,
    pub reps: usize,
    /// Objective-evaluation budget.
    pub maxiter: usize,
    pub seed: u64,
    pub ftol: f64,
    pub theta_init: ThetaInit,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            shots: 1000,
            reps: 1,
            maxiter: 100,
            seed: 0,
            ftol: 1e-6,
            theta_init: ThetaInit::Random,
        }
    }
}

impl VqeConfig {
    fn check(&self) -> Result<()> {
        if self.maxiter == 0 {
            return Err(Error::InvalidArgument("maxiter must be at least 1".into()));
        }
        if self.ftol.is_nan() || self.ftol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ftol must be positive, got {}",
                self.ftol
            )));
        }
        Ok(())
    }
}

pub fn initial_theta<R: Rng + ?Sized>(dim: usize, init: ThetaInit, rng: &mut R) -> Vec<f64> {
    match init {
        ThetaInit::Random => (0..dim).map(|_| rng.random::<f64>() * TAU).collect(),
        ThetaInit::Zeros => vec![0.0; dim],
    }
}

/// Budgeted derivative-free minimization of `objective` from a seeded
/// starting point.
pub fn minimize<F, R>(objective: F, dim: usize, config: &VqeConfig, rng: &mut R) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    config.check()?;
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "parameter dimension must be at least 1".into(),
        ));
    }
    let x0 = initial_theta(dim, config.theta_init, rng);
    let opts = SimplexOptions {
        max_evaluations: config.maxiter,
        ftol: config.ftol,
        initial_step: INITIAL_STEP,
    };
    Ok(nelder_mead(objective, &x0, &opts))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub cable_id: String,
    pub bitstring: Bitstring,
    /// Energy of `bitstring`.
    pub energy: f64,
    /// Expectation at the last evaluation.
    pub e_exp_final: f64,
    pub feasibility: FeasibilityReport,
    /// Routing cost, when the bitstring is a feasible path.
    pub objective: Option<f64>,
    pub iterations_used: usize,
    pub evaluations_used: usize,
    pub seed: u64,
    pub num_qubits: usize,
}

impl SolveResult {
    pub fn feasible(&self) -> bool {
        self.feasibility.feasible_path
    }
}

pub fn vqe_solve(q: &CableQubo, config: &VqeConfig) -> Result<SolveResult> {
    config.check()?;
    let m = q.dim();
    if m > MAX_DIM {
        return Err(Error::DimensionOverCap {
            dim: m,
            cap: MAX_DIM,
        });
    }
    let table = q.energy_table()?;
    let spec = AnsatzSpec::new(m, config.reps);
    let mut theta_rng = stream(config.seed, 0, TAG_THETA);
    let mut shot_rng = stream(config.seed, 0, TAG_SHOTS);

    let mut best: Option<(f64, usize)> = None;
    let mut last = f64::NAN;
    let mut failure = None;
    let objective = |theta: &[f64]| -> f64 {
        let estimate = prepare_state(&spec, theta).and_then(|state| {
            let dist = exact_distribution(&state);
            if config.shots == 0 {
                estimate_energy(&dist, &table)
            } else {
                let counts = Sampler::new(&dist).sample(config.shots, &mut shot_rng);
                estimate_energy(&counts, &table)
            }
        });
        match estimate {
            Ok(est) => {
                let improves = best.is_none_or(|(e, idx)| {
                    est.best_energy < e
                        || (est.best_energy == e
                            && crate::bits::lex_key(est.best_index, m)
                                < crate::bits::lex_key(idx, m))
                });
                if improves {
                    best = Some((est.best_energy, est.best_index));
                }
                last = est.mean;
                est.mean
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let min = minimize(objective, spec.parameter_count(), config, &mut theta_rng)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let (energy, index) = best.expect("at least one evaluation");
    let bitstring = Bitstring::from_index(index, m);
    debug_assert_eq!(energy, table.energy_at(index));
    let feasibility = check_block(&q.vmap, &bitstring)?;
    let objective = feasibility
        .feasible_path
        .then(|| q.vmap.objective(&bitstring));
    Ok(SolveResult {
        cable_id: q.cable_id.clone(),
        bitstring,
        energy,
        e_exp_final: last,
        feasibility,
        objective,
        iterations_used: min.iterations,
        evaluations_used: min.evaluations,
        seed: config.seed,
        num_qubits: m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalAssignment {
    pub instance_name: String,
    pub kappa: f64,
    pub results: Vec<SolveResult>,
    pub total_energy: f64,
    pub all_feasible: bool,
}

impl GlobalAssignment {
    /// Per-cable bitstrings concatenated in cable order.
    pub fn bitstring(&self) -> Bitstring {
        Bitstring::concat(self.results.iter().map(|r| &r.bitstring))
    }
}

/// Seed handed to the solve of cable number `index`.
pub fn cable_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64, TAG_CABLE)
}

pub fn solve_decomposed(
    instance: &Instance,
    kappa: f64,
    config: &VqeConfig,
) -> Result<GlobalAssignment> {
    solve_decomposed_with(instance, kappa, PenaltyMode::PerCable, config)
}

pub fn solve_decomposed_with(
    instance: &Instance,
    kappa: f64,
    mode: PenaltyMode,
    config: &VqeConfig,
) -> Result<GlobalAssignment> {
    let results = instance
        .cables()
        .par_iter()
        .enumerate()
        .map(|(c, cable)| {
            let p = scale_penalties(&penalties_for(instance, cable, mode), kappa)?;
            let q = build_cable_qubo(instance, cable, &p)?;
            let sub = VqeConfig {
                seed: cable_seed(config.seed, c),
                ..*config
            };
            vqe_solve(&q, &sub)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalAssignment {
        instance_name: instance.name().to_string(),
        kappa,
        total_energy: results.iter().map(|r| r.energy).sum(),
        all_feasible: results.iter().all(SolveResult::feasible),
        results,
    })
}
