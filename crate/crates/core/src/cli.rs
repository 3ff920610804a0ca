//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
//! Instance paths may name a bundled layout as `bundled:<name>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::instance::{bundled_layout, parse_instance, Instance, BUNDLED_NAMES};
use crate::metrics::{
    format_g12, plot_tables, read_csv, render_summary, run_sweep_with, write_csv, SweepReport,
};
use crate::oracle::{brute_force_min, check_block, shortest_path_opt};
use crate::qubo::{build_cable_qubo, penalties_for, scale_penalties, ExportDocument, PenaltyMode};
use crate::vqe::{cable_seed, vqe_solve, ThetaInit, VqeConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "CABLEVQE_JOBS";

#[derive(Debug, Parser)]
#[command(
    name = "cablevqe",
    version,
    about = "Cable routing QUBO compiler and sampling VQE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance and print its dimensions.
    Validate { path: String },
    /// Export one cable block in QUBO or Ising form.
    Qubo {
        path: String,
        #[arg(long)]
        cable: String,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        kappa: f64,
        /// Emit the spin form instead of the binary form.
        #[arg(long)]
        ising: bool,
        /// Use cross-cable maxima for the penalty bounds.
        #[arg(long)]
        global_penalties: bool,
        /// Output file; the document goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every cable, or one with --cable.
    Solve {
        path: String,
        #[arg(long)]
        cable: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Vqe)]
        method: Method,
        #[arg(long, default_value_t = 1.0, value_parser = positive)]
        kappa: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the κ × seed grid and write the results CSV.
    Sweep {
        path: String,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4", value_parser = positive)]
        kappas: Vec<f64>,
        /// Number of seeds per κ.
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Also write the summary table here.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Recompute summary and plot tables from a results CSV.
    Report {
        csv: PathBuf,
        /// Directory for whitespace-separated plot-data tables.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Vqe,
    Brute,
    Dijkstra,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shots per evaluation; 0 uses exact probabilities.
    #[arg(long, default_value_t = 1000)]
    shots: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Objective-evaluation budget.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    maxiter: u64,
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    ftol: f64,
    /// Start from all-zero angles instead of random ones.
    #[arg(long)]
    zero_init: bool,
    #[arg(long)]
    global_penalties: bool,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = JOBS_ENV, default_value_t = 0)]
    jobs: usize,
}

impl SolverArgs {
    fn config(&self) -> VqeConfig {
        VqeConfig {
            shots: self.shots,
            reps: self.reps,
            maxiter: self.maxiter as usize,
            seed: self.seed,
            ftol: self.ftol,
            theta_init: if self.zero_init {
                ThetaInit::Zeros
            } else {
                ThetaInit::Random
            },
        }
    }

    fn mode(&self) -> PenaltyMode {
        mode_of(self.global_penalties)
    }
}

fn mode_of(global: bool) -> PenaltyMode {
    if global {
        PenaltyMode::Global
    } else {
        PenaltyMode::PerCable
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be a positive finite number"))
    }
}

/// Loads an instance file, or a bundled layout given as `bundled:<name>`.
pub fn load_instance(path: &str) -> Result<Instance> {
    match path.strip_prefix("bundled:") {
        Some(name) => bundled_layout(name).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown bundled layout '{name}' (available: {})",
                BUNDLED_NAMES.join(", ")
            ))
        }),
        None => parse_instance(&std::fs::read_to_string(path)?),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(
    command: Command,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    match command {
        Command::Validate { path } => cmd_validate(&path, out),
        Command::Qubo {
            path,
            cable,
            kappa,
            ising,
            global_penalties,
            out: file,
        } => cmd_qubo(
            &path,
            &cable,
            kappa,
            ising,
            mode_of(global_penalties),
            file.as_deref(),
            out,
            err,
        ),
        Command::Solve {
            path,
            cable,
            method,
            kappa,
            solver,
        } => with_jobs(solver.jobs, || {
            cmd_solve(&path, cable.as_deref(), method, kappa, &solver, out)
        }),
        Command::Sweep {
            path,
            kappas,
            seeds,
            out: file,
            summary,
            solver,
        } => with_jobs(solver.jobs, || {
            cmd_sweep(
                &path,
                &kappas,
                seeds as usize,
                &file,
                summary.as_deref(),
                &solver,
                out,
                err,
            )
        }),
        Command::Report { csv, plot_dir } => cmd_report(&csv, plot_dir.as_deref(), out),
    }
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn cmd_validate(path: &str, out: &mut (dyn Write + Send)) -> Result<()> {
    let inst = load_instance(path)?;
    writeln!(
        out,
        "cables={} segments={} nodes={} qubits_per_cable={}",
        inst.cables().len(),
        inst.segments().len(),
        inst.nodes().len(),
        inst.block_dim()
    )?;
    for c in inst.cables() {
        writeln!(
            out,
            "cable={} source={} terminal={} internal_nodes={} qubits={}",
            c.id,
            c.source,
            c.terminal,
            inst.internal_nodes(c).len(),
            inst.block_dim()
        )?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_qubo(
    path: &str,
    cable_id: &str,
    kappa: f64,
    ising: bool,
    mode: PenaltyMode,
    file: Option<&Path>,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let inst = load_instance(path)?;
    let cable = inst.cable(cable_id)?;
    let p = scale_penalties(&penalties_for(&inst, cable, mode), kappa)?;
    let q = build_cable_qubo(&inst, cable, &p)?;
    let doc = if ising {
        ExportDocument::ising(&q)
    } else {
        ExportDocument::qubo(&q)
    };
    let etas = p.etas().map(format_g12).join(",");
    let summary = format!(
        "cable={} dim={} offset={} eta=[{}]",
        q.cable_id,
        q.dim(),
        format_g12(q.offset),
        etas
    );
    match file {
        Some(f) => {
            std::fs::write(f, doc.to_json() + "\n")?;
            writeln!(out, "{summary}")?;
        }
        None => {
            writeln!(out, "{}", doc.to_json())?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(())
}

struct Outcome {
    cable_id: String,
    route: Option<Vec<String>>,
    objective: Option<f64>,
    energy: f64,
    feasible: bool,
    bitstring: String,
}

fn solve_one(
    inst: &Instance,
    index: usize,
    method: Method,
    kappa: f64,
    solver: &SolverArgs,
) -> Result<Outcome> {
    let cable = &inst.cables()[index];
    let p = scale_penalties(&penalties_for(inst, cable, solver.mode()), kappa)?;
    let q = build_cable_qubo(inst, cable, &p)?;
    let (bits, energy) = match method {
        Method::Vqe => {
            let config = VqeConfig {
                seed: cable_seed(solver.seed, index),
                ..solver.config()
            };
            let r = vqe_solve(&q, &config)?;
            (r.bitstring, r.energy)
        }
        Method::Brute => {
            let s = brute_force_min(&q)?;
            (s.bitstring, s.energy)
        }
        Method::Dijkstra => {
            let s = shortest_path_opt(inst, cable)?;
            let e = q.energy(&s.bitstring)?;
            (s.bitstring, e)
        }
    };
    let report = check_block(&q.vmap, &bits)?;
    Ok(Outcome {
        cable_id: cable.id.clone(),
        objective: report.feasible_path.then(|| q.vmap.objective(&bits)),
        route: report.route,
        energy,
        feasible: report.feasible_path,
        bitstring: bits.to_string(),
    })
}

fn cmd_solve(
    path: &str,
    cable: Option<&str>,
    method: Method,
    kappa: f64,
    solver: &SolverArgs,
    out: &mut (dyn Write + Send),
) -> Result<()> {
    use rayon::prelude::*;
    let inst = load_instance(path)?;
    let indices: Vec<usize> = match cable {
        Some(id) => vec![inst.cable_position(id)?],
        None => (0..inst.cables().len()).collect(),
    };
    let outcomes = indices
        .par_iter()
        .map(|&i| solve_one(&inst, i, method, kappa, solver))
        .collect::<Result<Vec<_>>>()?;
    let dash = || "-".to_string();
    for o in &outcomes {
        writeln!(
            out,
            "cable={} feasible={} route={} objective={} energy={} bitstring={}",
            o.cable_id,
            o.feasible,
            o.route.as_ref().map_or_else(dash, |r| r.join("-")),
            o.objective.map_or_else(dash, format_g12),
            format_g12(o.energy),
            o.bitstring
        )?;
    }
    let all_feasible = outcomes.iter().all(|o| o.feasible);
    let total_objective: Option<f64> = outcomes.iter().map(|o| o.objective).sum();
    writeln!(
        out,
        "total objective={} energy={} all_feasible={}",
        total_objective.map_or_else(dash, format_g12),
        format_g12(outcomes.iter().map(|o| o.energy).sum()),
        all_feasible
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    path: &str,
    kappas: &[f64],
    seeds: usize,
    file: &Path,
    summary_file: Option<&Path>,
    solver: &SolverArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> Result<()> {
    let inst = load_instance(path)?;
    let progress = std::sync::Mutex::new(&mut *err);
    let report = run_sweep_with(&inst, kappas, seeds, solver.mode(), &solver.config(), |p| {
        if let Ok(mut e) = progress.lock() {
            let _ = writeln!(
                e,
                "[{}/{}] kappa={} seed={} feasible={}/{}",
                p.done,
                p.total,
                format_g12(p.kappa),
                p.seed,
                p.feasible_cables,
                p.cables
            );
        }
    })?;
    write_csv(file, &report.records)?;
    let summary = render_summary(&report);
    if let Some(f) = summary_file {
        std::fs::write(f, &summary)?;
    }
    out.write_all(summary.as_bytes())?;
    Ok(())
}

fn cmd_report(csv: &Path, plot_dir: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<()> {
    let text = std::fs::read_to_string(csv)?;
    let report = SweepReport::from_records(read_csv(&text)?)?;
    out.write_all(render_summary(&report).as_bytes())?;
    if let Some(dir) = plot_dir {
        std::fs::create_dir_all(dir)?;
        for (name, body) in plot_tables(&report) {
            std::fs::write(dir.join(name), body)?;
        }
    }
    Ok(())
}
