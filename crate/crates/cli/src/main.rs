//! `latfold` command-line interface.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage or
//! validation errors.

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use latfold::analysis::{
    depth_sweep, exact_ground_state, kabsch_rmsd, penalty_sweep, repeat_experiment, PenaltyName,
    SweepResult, DEFAULT_PENALTY_GRID,
};
use latfold::lattice::{detect_overlap, read_structure, to_pdb, to_xyz, turns_to_coordinates};
use latfold::solver::run_algorithm;
use latfold::{Error, Result};
use serde::Serialize;

use config::{RunArgs, Settings};

#[derive(Parser)]
#[command(
    name = "latfold",
    version,
    about = "Lattice protein folding with variational quantum algorithms"
)]
struct Cli {
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization and write the folded structure.
    Fold(RunArgs),
    /// Enumerate every basis state of the compressed Hamiltonian.
    Exact {
        #[command(flatten)]
        run: RunArgs,
        /// Also write spectrum.csv.
        #[arg(long)]
        spectrum: bool,
    },
    /// Repeat seeded trials and histogram the outcomes.
    Repeat(RunArgs),
    /// Sweep one penalty (rebuilding the Hamiltonian) or the QAOA depth `p`.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// penalty_chiral, penalty_back, penalty_1 or p.
        #[arg(long)]
        param: String,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Kabsch RMSD between two XYZ or PDB structures.
    Rmsd { a: PathBuf, b: PathBuf },
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_counts_csv(dir: &Path, name: &str, counts: &BTreeMap<String, u64>) -> Result<()> {
    let mut text = String::from("key,count\n");
    for (k, c) in counts {
        writeln!(text, "{k},{c}").unwrap();
    }
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn prepare_out(settings: &Settings) -> Result<&Path> {
    std::fs::create_dir_all(&settings.out)?;
    Ok(&settings.out)
}

#[derive(Serialize)]
struct FoldOutput<'a> {
    settings: &'a Settings,
    result: &'a latfold::solver::FoldingResult,
    overlaps: Option<bool>,
}

fn cmd_fold(run: &RunArgs) -> Result<()> {
    let settings = run.resolve()?;
    let problem = settings.problem()?;
    let spec = settings.run_spec(&problem)?;
    let result = run_algorithm(&problem, &spec)?;
    let dir = prepare_out(&settings)?;
    if let Some(cal) = &spec.calibration {
        std::fs::write(dir.join("calibration.json"), cal.to_json())?;
    }
    let overlaps = result.overlap.as_ref().map(|o| !o.is_self_avoiding());
    write_json(
        dir,
        "result.json",
        &FoldOutput {
            settings: &settings,
            result: &result,
            overlaps,
        },
    )?;
    if let (Some(conf), Some(peptide)) = (&result.decoded, &problem.peptide) {
        std::fs::write(dir.join("structure.xyz"), to_xyz(conf, peptide, 1.0))?;
        std::fs::write(dir.join("structure.pdb"), to_pdb(conf, peptide, 1.0))?;
    }
    println!(
        "{}\tground state energy {:.3}\tbitstring {}\tturns {}\toverlap {}",
        result.algorithm.name(),
        result.reported_energy,
        result.best_bitstring,
        result.turns.as_deref().unwrap_or("-"),
        overlaps.map_or("-".to_string(), |o| o.to_string()),
    );
    Ok(())
}

#[derive(Serialize)]
struct Minimizer {
    bitstring: String,
    turns: Option<String>,
    overlaps: Option<bool>,
}

#[derive(Serialize)]
struct ExactOutput {
    num_qubits: usize,
    min_energy: f64,
    minimizers: Vec<Minimizer>,
}

fn cmd_exact(run: &RunArgs, spectrum: bool) -> Result<()> {
    let settings = run.resolve()?;
    let (op, peptide) = settings.operator()?;
    let exact = exact_ground_state(&op, spectrum)?;
    let problem = match &peptide {
        Some(_) => Some(settings.problem()?),
        None => None,
    };
    let minimizers = exact
        .argmin_indices
        .iter()
        .zip(&exact.argmin_bitstrings)
        .map(|(&i, b)| {
            let decoded = problem.as_ref().and_then(|p| p.turns(i)).transpose()?;
            let (turns, overlaps) = match (decoded, &peptide) {
                (Some(t), Some(pep)) => {
                    let conf = turns_to_coordinates(&t, pep);
                    (
                        Some(t.label()),
                        Some(!detect_overlap(&conf).is_self_avoiding()),
                    )
                }
                _ => (None, None),
            };
            Ok(Minimizer {
                bitstring: b.clone(),
                turns,
                overlaps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dir = prepare_out(&settings)?;
    write_json(
        dir,
        "exact.json",
        &ExactOutput {
            num_qubits: exact.num_qubits,
            min_energy: exact.min_energy,
            minimizers,
        },
    )?;
    if let Some(full) = &exact.full_spectrum {
        let mut text = String::from("bitstring,energy\n");
        for (b, e) in full {
            writeln!(text, "{b},{e}").unwrap();
        }
        std::fs::write(dir.join("spectrum.csv"), text)?;
    }
    println!(
        "exact\tminimum energy {:.3}\tqubits {}\tminimizers {}",
        exact.min_energy,
        exact.num_qubits,
        exact.argmin_bitstrings.len()
    );
    Ok(())
}

fn cmd_repeat(run: &RunArgs) -> Result<()> {
    let settings = run.resolve()?;
    let problem = settings.problem()?;
    let spec = settings.run_spec(&problem)?;
    let report = repeat_experiment(&problem, &spec, settings.trials, settings.seed)?;
    let dir = prepare_out(&settings)?;
    write_json(dir, "report.json", &report)?;
    write_counts_csv(dir, "energy_histogram.csv", &report.energy_histogram)?;
    write_counts_csv(dir, "structure_histogram.csv", &report.structure_histogram)?;
    println!(
        "{}\ttrials {}\tconvergence rate {:.3}\ttop structure frequency {:.3}\toverlap fraction {:.3}",
        report.algorithm, report.trials, report.convergence_rate, report.top_structure_frequency, report.overlap_fraction
    );
    Ok(())
}

fn cmd_sweep(run: &RunArgs, param: &str, grid: Option<&[f64]>) -> Result<()> {
    let settings = run.resolve()?;
    let result: SweepResult = if param == "p" {
        let grid = grid
            .ok_or_else(|| Error::InvalidConfig("--grid is required for a depth sweep".into()))?;
        if grid.iter().any(|&g| g.fract() != 0.0 || g < 1.0) {
            return Err(Error::InvalidConfig(
                "depths must be positive integers".into(),
            ));
        }
        let depths: Vec<usize> = grid.iter().map(|&g| g as usize).collect();
        let problem = settings.problem()?;
        let spec = settings.run_spec(&problem)?;
        depth_sweep(&problem, &depths, &spec, settings.trials, settings.seed)?
    } else {
        let name = PenaltyName::parse(param)?;
        let grid = grid.unwrap_or(&DEFAULT_PENALTY_GRID);
        let peptide = settings.peptide()?.ok_or_else(|| {
            Error::InvalidConfig("a penalty sweep needs a peptide instance".into())
        })?;
        let problem = settings.problem()?;
        let spec = settings.run_spec(&problem)?;
        penalty_sweep(
            &peptide,
            &settings.table()?,
            &settings.penalties,
            name,
            grid,
            &spec,
            settings.trials,
            settings.seed,
        )?
    };
    let dir = prepare_out(&settings)?;
    write_json(dir, "sweep.json", &result)?;
    let mut text = format!("{},{}\n", result.parameter, result.metric);
    for (g, v) in result.grid.iter().zip(&result.values) {
        writeln!(text, "{g},{v}").unwrap();
    }
    std::fs::write(dir.join("sweep.csv"), text)?;
    for (g, v) in result.grid.iter().zip(&result.values) {
        println!("{}={g}\t{} {v:.4}", result.parameter, result.metric);
    }
    Ok(())
}

fn cmd_rmsd(a: &Path, b: &Path) -> Result<()> {
    for path in [a, b] {
        config::read_text(path)?;
    }
    let pa = read_structure(a)?;
    let pb = read_structure(b)?;
    println!("{:.4}", kabsch_rmsd(&pa, &pb)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool starts once");
    }
    let outcome = match &cli.command {
        Command::Fold(run) => cmd_fold(run),
        Command::Exact { run, spectrum } => cmd_exact(run, *spectrum),
        Command::Repeat(run) => cmd_repeat(run),
        Command::Sweep { run, param, grid } => cmd_sweep(run, param, grid.as_deref()),
        Command::Rmsd { a, b } => cmd_rmsd(a, b),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
