//! Feasibility rate and optimality-gap statistics, and the κ × seed sweep.
//!
//! Reported numbers carry the precision of the results CSV: every stored
//! real is rounded to 12 significant digits, so statistics recomputed
//! from a written CSV match the in-memory ones bit for bit.
//!
//! ```
//! use cablevqe::metrics::{emp_prob, opt_gap_stats, RunRecord};
//!
//! let rec = |seed, objective: Option<f64>| {
//!     RunRecord::new("l", "c1", 1.0, seed, objective.unwrap_or(50.0), objective, 10.0)
//! };
//! let runs = vec![rec(0, Some(11.0)), rec(1, Some(10.0)), rec(2, Some(12.0)), rec(3, None)];
//! assert_eq!(emp_prob(&runs).unwrap(), 0.75);
//! let stats = opt_gap_stats(&runs).unwrap().unwrap();
//! assert_eq!((stats.count, stats.mean), (3, 0.1));
//! assert_eq!(stats.quartiles.median, 0.1);
//! ```

mod table;

pub use table::{
    format_g12, plot_tables, read_csv, render_csv, render_summary, write_csv, CSV_HEADER,
};

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::shortest_path_opt;
use crate::qubo::PenaltyMode;
use crate::vqe::{solve_decomposed_with, VqeConfig};

/// Rounds to the 12 significant digits written to the results CSV.
pub fn quantize(x: f64) -> f64 {
    format_g12(x).parse().unwrap_or(x)
}

/// `|objective - oracle| / |oracle|`, undefined for a zero oracle.
pub fn relative_gap(objective: f64, oracle: f64) -> Option<f64> {
    (oracle != 0.0).then(|| quantize((objective - oracle).abs() / oracle.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub layout: String,
    pub cable_id: String,
    pub kappa: f64,
    pub seed: u64,
    pub feasible: bool,
    pub energy: f64,
    /// Present exactly when `feasible`.
    pub objective: Option<f64>,
    pub oracle_objective: f64,
    pub opt_gap: Option<f64>,
}

impl RunRecord {
    /// Builds a record; `objective` of `None` marks an infeasible run.
    pub fn new(
        layout: &str,
        cable_id: &str,
        kappa: f64,
        seed: u64,
        energy: f64,
        objective: Option<f64>,
        oracle_objective: f64,
    ) -> Self {
        let objective = objective.map(quantize);
        let oracle_objective = quantize(oracle_objective);
        RunRecord {
            layout: layout.to_string(),
            cable_id: cable_id.to_string(),
            kappa: quantize(kappa),
            seed,
            feasible: objective.is_some(),
            energy: quantize(energy),
            opt_gap: objective.and_then(|o| relative_gap(o, oracle_objective)),
            objective,
            oracle_objective,
        }
    }

    fn cell(&self) -> (&str, &str, f64) {
        (&self.layout, &self.cable_id, self.kappa)
    }

    fn sort_key(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.layout
            .cmp(&b.layout)
            .then_with(|| a.cable_id.cmp(&b.cable_id))
            .then_with(|| a.kappa.total_cmp(&b.kappa))
            .then_with(|| a.seed.cmp(&b.seed))
    }
}

fn single_cell(records: &[RunRecord]) -> Result<()> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    if records.iter().any(|r| r.cell() != first.cell()) {
        return Err(Error::MixedRecords);
    }
    Ok(())
}

/// Fraction of runs that returned a feasible path.
pub fn emp_prob(records: &[RunRecord]) -> Result<f64> {
    single_cell(records)?;
    let feasible = records.iter().filter(|r| r.feasible).count();
    Ok(feasible as f64 / records.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Five-number summary. Quartiles are medians of the lower and upper
/// halves with the middle element excluded for odd counts; a single value
/// gives five equal numbers.
pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    let mut v = values.to_vec();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let (lower, upper) = if n == 1 {
        (&v[..], &v[..])
    } else {
        (&v[..n / 2], &v[n.div_ceil(2)..])
    };
    Some(Quartiles {
        min: v[0],
        q1: quantize(median_sorted(lower)),
        median: quantize(median_sorted(&v)),
        q3: quantize(median_sorted(upper)),
        max: v[n - 1],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapStats {
    /// Feasible runs with a defined gap.
    pub count: usize,
    pub mean: f64,
    pub quartiles: Quartiles,
}

/// Gap statistics over the feasible runs; `None` when no run has a gap.
pub fn opt_gap_stats(records: &[RunRecord]) -> Result<Option<GapStats>> {
    single_cell(records)?;
    let gaps: Vec<f64> = records.iter().filter_map(|r| r.opt_gap).collect();
    let Some(quartiles) = quartiles(&gaps) else {
        return Ok(None);
    };
    let mean = quantize(gaps.iter().sum::<f64>() / gaps.len() as f64);
    Ok(Some(GapStats {
        count: gaps.len(),
        mean,
        quartiles,
    }))
}

/// Aggregates for one `(layout, cable, κ)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub layout: String,
    pub cable_id: String,
    pub kappa: f64,
    pub runs: usize,
    pub feasible: usize,
    pub emp_prob: f64,
    pub opt_gap: Option<GapStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    /// Sorted by layout, cable, κ, seed.
    pub records: Vec<RunRecord>,
    pub cells: Vec<CellSummary>,
}

impl SweepReport {
    pub fn from_records(mut records: Vec<RunRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyRecords);
        }
        records.sort_by(RunRecord::sort_key);
        let cells = records
            .chunk_by(|a, b| a.cell() == b.cell())
            .map(|group| {
                Ok(CellSummary {
                    layout: group[0].layout.clone(),
                    cable_id: group[0].cable_id.clone(),
                    kappa: group[0].kappa,
                    runs: group.len(),
                    feasible: group.iter().filter(|r| r.feasible).count(),
                    emp_prob: emp_prob(group)?,
                    opt_gap: opt_gap_stats(group)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SweepReport { records, cells })
    }

    pub fn cell(&self, layout: &str, cable_id: &str, kappa: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.layout == layout && c.cable_id == cable_id && c.kappa == kappa)
    }

    /// Mean feasibility rate across cables at one κ.
    pub fn mean_emp_prob(&self, kappa: f64) -> Option<f64> {
        let rates: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.kappa == kappa)
            .map(|c| c.emp_prob)
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

/// One finished `(κ, seed)` cell of a running sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepProgress {
    pub done: usize,
    pub total: usize,
    pub kappa: f64,
    pub seed: u64,
    pub feasible_cables: usize,
    pub cables: usize,
}

/// Seed of run `r` under a master seed.
pub fn run_seed(master: u64, r: usize) -> u64 {
    master.wrapping_add(r as u64)
}

/// Solves every `(κ, seed)` combination; `config.seed` is the master seed.
pub fn run_sweep<P>(
    instance: &Instance,
    kappas: &[f64],
    num_seeds: usize,
    config: &VqeConfig,
    progress: P,
) -> Result<SweepReport>
where
    P: Fn(SweepProgress) + Sync,
{
    run_sweep_with(
        instance,
        kappas,
        num_seeds,
        PenaltyMode::PerCable,
        config,
        progress,
    )
}

pub fn run_sweep_with<P>(
    instance: &Instance,
    kappas: &[f64],
    num_seeds: usize,
    mode: PenaltyMode,
    config: &VqeConfig,
    progress: P,
) -> Result<SweepReport>
where
    P: Fn(SweepProgress) + Sync,
{
    if kappas.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one kappa is required".into(),
        ));
    }
    if num_seeds == 0 {
        return Err(Error::InvalidArgument(
            "at least one seed is required".into(),
        ));
    }
    let distinct: BTreeSet<u64> = kappas.iter().map(|k| quantize(*k).to_bits()).collect();
    if distinct.len() != kappas.len() {
        return Err(Error::InvalidArgument("kappas must be distinct".into()));
    }
    let oracle: Vec<f64> = instance
        .cables()
        .iter()
        .map(|c| shortest_path_opt(instance, c).map(|s| s.objective))
        .collect::<Result<_>>()?;

    let jobs: Vec<(f64, u64)> = kappas
        .iter()
        .flat_map(|&k| (0..num_seeds).map(move |r| (k, run_seed(config.seed, r))))
        .collect();
    let done = AtomicUsize::new(0);
    let total = jobs.len();
    let runs = jobs
        .par_iter()
        .map(|&(kappa, seed)| {
            let g = solve_decomposed_with(instance, kappa, mode, &VqeConfig { seed, ..*config })?;
            progress(SweepProgress {
                done: done.fetch_add(1, Ordering::Relaxed) + 1,
                total,
                kappa,
                seed,
                feasible_cables: g.results.iter().filter(|r| r.feasible()).count(),
                cables: g.results.len(),
            });
            Ok(g.results
                .iter()
                .zip(&oracle)
                .map(|(r, &o)| {
                    RunRecord::new(
                        instance.name(),
                        &r.cable_id,
                        kappa,
                        seed,
                        r.energy,
                        r.objective,
                        o,
                    )
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    SweepReport::from_records(runs.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::bundled_layout;

    fn rec(cable: &str, kappa: f64, seed: u64, objective: Option<f64>, oracle: f64) -> RunRecord {
        RunRecord::new(
            "l",
            cable,
            kappa,
            seed,
            objective.unwrap_or(99.0),
            objective,
            oracle,
        )
    }

    fn cell_with(feasible: usize, total: usize) -> Vec<RunRecord> {
        (0..total)
            .map(|s| rec("c1", 1.0, s as u64, (s < feasible).then_some(10.0), 10.0))
            .collect()
    }

    #[test]
    fn emp_prob_hand_values() {
        assert_eq!(emp_prob(&cell_with(24, 30)).unwrap(), 0.8);
        assert_eq!(emp_prob(&cell_with(0, 30)).unwrap(), 0.0);
        assert_eq!(emp_prob(&cell_with(30, 30)).unwrap(), 1.0);
    }

    #[test]
    fn emp_prob_is_permutation_invariant() {
        let mut v = cell_with(7, 30);
        let a = emp_prob(&v).unwrap();
        v.reverse();
        v.rotate_left(11);
        assert_eq!(emp_prob(&v).unwrap(), a);
    }

    #[test]
    fn emp_prob_rejects_empty_and_mixed_sets() {
        assert!(matches!(emp_prob(&[]), Err(Error::EmptyRecords)));
        let mixed = vec![rec("c1", 1.0, 0, None, 1.0), rec("c1", 2.0, 0, None, 1.0)];
        assert!(matches!(emp_prob(&mixed), Err(Error::MixedRecords)));
        assert!(matches!(opt_gap_stats(&mixed), Err(Error::MixedRecords)));
    }

    #[test]
    fn gap_stats_hand_values() {
        let runs = vec![
            rec("c1", 1.0, 0, Some(11.0), 10.0),
            rec("c1", 1.0, 1, Some(10.0), 10.0),
            rec("c1", 1.0, 2, Some(12.0), 10.0),
        ];
        let gaps: Vec<_> = runs.iter().map(|r| r.opt_gap.unwrap()).collect();
        assert_eq!(gaps, vec![0.1, 0.0, 0.2]);
        let s = opt_gap_stats(&runs).unwrap().unwrap();
        assert_eq!(s.count, 3);
        assert_eq!(s.mean, 0.1);
        assert_eq!(
            s.quartiles,
            Quartiles {
                min: 0.0,
                q1: 0.0,
                median: 0.1,
                q3: 0.2,
                max: 0.2
            }
        );
    }

    #[test]
    fn single_optimal_run_and_empty_marker() {
        let one = vec![
            rec("c1", 0.25, 0, Some(6.0), 6.0),
            rec("c1", 0.25, 1, None, 6.0),
        ];
        let s = opt_gap_stats(&one).unwrap().unwrap();
        assert_eq!((s.count, s.mean), (1, 0.0));
        assert_eq!(s.quartiles.q1, 0.0);
        assert_eq!(opt_gap_stats(&cell_with(0, 5)).unwrap(), None);
    }

    #[test]
    fn quartile_convention() {
        let q = quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        assert_eq!((q.q1, q.median, q.q3), (2.5, 4.5, 6.5));
        let q = quartiles(&[7.0, 1.0, 3.0, 5.0, 9.0]).unwrap();
        assert_eq!(
            (q.min, q.q1, q.median, q.q3, q.max),
            (1.0, 2.0, 5.0, 8.0, 9.0)
        );
        let q = quartiles(&[4.0]).unwrap();
        assert_eq!(
            (q.min, q.q1, q.median, q.q3, q.max),
            (4.0, 4.0, 4.0, 4.0, 4.0)
        );
        assert_eq!(quartiles(&[]), None);
    }

    #[test]
    fn zero_oracle_leaves_the_gap_undefined() {
        let r = rec("c1", 1.0, 0, Some(0.0), 0.0);
        assert!(r.feasible);
        assert_eq!(r.opt_gap, None);
        assert_eq!(opt_gap_stats(&[r]).unwrap(), None);
    }

    #[test]
    fn report_groups_cells_in_sort_order() {
        let mut records = cell_with(3, 4);
        records.extend((0..2).map(|s| rec("c0", 4.0, s, None, 1.0)));
        records.reverse();
        let report = SweepReport::from_records(records).unwrap();
        let keys: Vec<_> = report
            .cells
            .iter()
            .map(|c| (c.cable_id.as_str(), c.kappa, c.runs))
            .collect();
        assert_eq!(keys, vec![("c0", 4.0, 2), ("c1", 1.0, 4)]);
        assert_eq!(report.cell("l", "c1", 1.0).unwrap().emp_prob, 0.75);
        assert_eq!(report.records[0].seed, 0);
        assert!(SweepReport::from_records(vec![]).is_err());
    }

    #[test]
    fn small_sweep_counts_and_bounds() {
        let l = bundled_layout("layout-1").unwrap();
        let config = VqeConfig {
            maxiter: 20,
            seed: 100,
            ..VqeConfig::default()
        };
        let calls = AtomicUsize::new(0);
        let report = run_sweep(&l, &[1.0], 2, &config, |_| {
            calls.fetch_add(1, Ordering::Relaxed);
        })
        .unwrap();
        assert_eq!(report.records.len(), 8);
        assert_eq!(report.cells.len(), 4);
        assert_eq!(calls.into_inner(), 2);
        assert_eq!(
            report
                .records
                .iter()
                .map(|r| r.seed)
                .collect::<BTreeSet<_>>(),
            BTreeSet::from([100, 101])
        );
        for r in &report.records {
            if let Some(o) = r.objective {
                assert!(o >= r.oracle_objective);
                let direct = quantize(o / r.oracle_objective - 1.0);
                assert!((r.opt_gap.unwrap() - direct).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let l = bundled_layout("layout-1").unwrap();
        let c = VqeConfig::default();
        assert!(run_sweep(&l, &[], 1, &c, |_| {}).is_err());
        assert!(run_sweep(&l, &[1.0], 0, &c, |_| {}).is_err());
        assert!(run_sweep(&l, &[1.0, 1.0], 1, &c, |_| {}).is_err());
        assert!(run_sweep(&l, &[-1.0], 1, &c, |_| {}).is_err());
    }
}
