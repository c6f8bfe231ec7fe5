//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use latfold::hamiltonian::{DiagonalOperator, InteractionTable, PenaltyConfig};
use latfold::lattice::Peptide;
use latfold::mitigation::{build_calibration, CalibrationMode};
use latfold::simulator::{Entanglement, ReadoutNoise};
use latfold::solver::{Algorithm, FoldingProblem, ObjectiveSpec, RunSpec};
use latfold::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum AlgorithmArg {
    Vqe,
    Qaoa,
    CvarVqe,
    CvarQaoa,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Vqe => Algorithm::Vqe,
            AlgorithmArg::Qaoa => Algorithm::Qaoa,
            AlgorithmArg::CvarVqe => Algorithm::CvarVqe,
            AlgorithmArg::CvarQaoa => Algorithm::CvarQaoa,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveArg {
    Expectation,
    Cvar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigateArg {
    Off,
    Full,
    Tensored,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglementArg {
    Full,
    Linear,
}

/// Readout noise as written by users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NoiseSpec {
    Symmetric(f64),
    Uniform { p01: f64, p10: f64 },
    PerQubit { per_qubit: Vec<(f64, f64)> },
}

impl NoiseSpec {
    /// Reads inline JSON, or a path to a JSON file.
    pub fn parse(text: &str) -> Result<NoiseSpec> {
        let trimmed = text.trim();
        let json = if trimmed.starts_with('{') || trimmed.parse::<f64>().is_ok() {
            trimmed.to_string()
        } else {
            read_text(Path::new(trimmed))?
        };
        serde_json::from_str(&json)
            .map_err(|e| Error::InvalidConfig(format!("bad noise spec: {e}")))
    }

    pub fn resolve(&self, n: usize) -> Result<ReadoutNoise> {
        let noise = match self {
            NoiseSpec::Symmetric(p) => ReadoutNoise::symmetric(n, *p),
            NoiseSpec::Uniform { p01, p10 } => ReadoutNoise::uniform(n, *p01, *p10),
            NoiseSpec::PerQubit { per_qubit } => ReadoutNoise {
                per_qubit: per_qubit.clone(),
            },
        };
        noise.validate(n)?;
        Ok(noise)
    }
}

/// Keys accepted in a `--config` file. Every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: Option<PathBuf>,
    pub operator: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub algorithm: Option<AlgorithmArg>,
    pub objective: Option<ObjectiveArg>,
    pub alpha: Option<f64>,
    pub reps: Option<usize>,
    pub entanglement: Option<EntanglementArg>,
    pub p: Option<usize>,
    pub shots: Option<u64>,
    pub iterations: Option<usize>,
    pub penalty_chiral: Option<f64>,
    pub penalty_back: Option<f64>,
    pub penalty_1: Option<f64>,
    pub noise: Option<NoiseSpec>,
    pub mitigate: Option<MitigateArg>,
    pub calibration_shots: Option<u64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Peptide instance file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Diagonal operator JSON, used instead of an instance.
    #[arg(long, conflicts_with = "instance")]
    pub operator: Option<PathBuf>,
    /// Interaction energy table; the bundled table by default.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,
    /// Objective; defaults to cvar for the cvar_* algorithms.
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum)]
    pub entanglement: Option<EntanglementArg>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub penalty_chiral: Option<f64>,
    #[arg(long)]
    pub penalty_back: Option<f64>,
    #[arg(long = "penalty-1")]
    pub penalty_1: Option<f64>,
    /// Readout noise: a flip probability, {"p01":..,"p10":..}, {"per_qubit":[[..,..],..]}, or a file.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long, value_enum)]
    pub mitigate: Option<MitigateArg>,
    /// Shots per prepared state when building a calibration.
    #[arg(long)]
    pub calibration_shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub instance: Option<PathBuf>,
    pub operator: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub algorithm: Algorithm,
    pub objective: ObjectiveSpec,
    pub reps: usize,
    pub entanglement: Entanglement,
    pub p: usize,
    pub shots: u64,
    pub iterations: usize,
    pub penalties: PenaltyConfig,
    pub noise: Option<NoiseSpec>,
    pub mitigate: MitigateArg,
    pub calibration_shots: u64,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

/// Reads a file, naming it in the error.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

impl RunArgs {
    pub fn resolve(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let noise = match &self.noise {
            Some(text) => Some(NoiseSpec::parse(text)?),
            None => file.noise.clone(),
        };
        let algorithm: Algorithm = self
            .algorithm
            .or(file.algorithm)
            .unwrap_or(AlgorithmArg::CvarVqe)
            .into();
        let alpha = self.alpha.or(file.alpha);
        let objective = match self.objective.or(file.objective) {
            Some(ObjectiveArg::Expectation) => ObjectiveSpec::Expectation,
            Some(ObjectiveArg::Cvar) => ObjectiveSpec::Cvar {
                alpha: alpha.unwrap_or(0.01),
            },
            None => match (algorithm.default_objective(), alpha) {
                (ObjectiveSpec::Cvar { .. }, Some(a)) => ObjectiveSpec::Cvar { alpha: a },
                (o, _) => o,
            },
        };
        if alpha.is_some() && objective == ObjectiveSpec::Expectation {
            return Err(Error::InvalidConfig(
                "--alpha needs a cvar objective".into(),
            ));
        }
        objective.validate()?;
        let defaults = PenaltyConfig::default();
        let penalties = PenaltyConfig {
            penalty_chiral: self
                .penalty_chiral
                .or(file.penalty_chiral)
                .unwrap_or(defaults.penalty_chiral),
            penalty_back: self
                .penalty_back
                .or(file.penalty_back)
                .unwrap_or(defaults.penalty_back),
            penalty_1: self
                .penalty_1
                .or(file.penalty_1)
                .unwrap_or(defaults.penalty_1),
        };
        penalties.validate()?;
        let settings = Settings {
            instance: self.instance.clone().or(file.instance),
            operator: self.operator.clone().or(file.operator),
            table: self.table.clone().or(file.table),
            algorithm,
            objective,
            reps: self.reps.or(file.reps).unwrap_or(1),
            entanglement: match self
                .entanglement
                .or(file.entanglement)
                .unwrap_or(EntanglementArg::Full)
            {
                EntanglementArg::Full => Entanglement::Full,
                EntanglementArg::Linear => Entanglement::Linear,
            },
            p: self.p.or(file.p).unwrap_or(2),
            shots: self.shots.or(file.shots).unwrap_or(8192),
            iterations: self.iterations.or(file.iterations).unwrap_or(50),
            penalties,
            noise,
            mitigate: self.mitigate.or(file.mitigate).unwrap_or(MitigateArg::Off),
            calibration_shots: self
                .calibration_shots
                .or(file.calibration_shots)
                .unwrap_or(8192),
            seed: self.seed.or(file.seed).unwrap_or(0),
            trials: self.trials.or(file.trials).unwrap_or(100),
            out: self
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
        };
        if settings.instance.is_some() && settings.operator.is_some() {
            return Err(Error::InvalidConfig(
                "give either an instance or an operator, not both".into(),
            ));
        }
        if settings.instance.is_none() && settings.operator.is_none() {
            return Err(Error::InvalidConfig(
                "an instance or operator file is required".into(),
            ));
        }
        for (name, ok) in [
            ("shots", settings.shots >= 1),
            ("iterations", settings.iterations >= 1),
            ("p", settings.p >= 1),
            ("trials", settings.trials >= 1),
            ("calibration shots", settings.calibration_shots >= 1),
        ] {
            if !ok {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(settings)
    }
}

impl Settings {
    pub fn table(&self) -> Result<InteractionTable> {
        match &self.table {
            Some(path) => InteractionTable::parse(&read_text(path)?),
            None => Ok(InteractionTable::bundled()),
        }
    }

    pub fn peptide(&self) -> Result<Option<Peptide>> {
        self.instance
            .as_deref()
            .map(|p| Peptide::from_json(&read_text(p)?))
            .transpose()
    }

    /// The operator to enumerate, with its problem when it has a lattice meaning.
    pub fn operator(&self) -> Result<(DiagonalOperator, Option<Peptide>)> {
        match self.peptide()? {
            Some(peptide) => {
                let full = latfold::hamiltonian::build_hamiltonian(
                    &peptide,
                    &self.penalties,
                    &self.table()?,
                )?;
                Ok((latfold::hamiltonian::compress(&full).0, Some(peptide)))
            }
            None => {
                let path = self.operator.as_ref().expect("checked in resolve");
                Ok((DiagonalOperator::from_json(&read_text(path)?)?, None))
            }
        }
    }

    pub fn problem_with(&self, penalties: &PenaltyConfig) -> Result<FoldingProblem> {
        match self.peptide()? {
            Some(peptide) => FoldingProblem::new(&peptide, penalties, &self.table()?),
            None => FoldingProblem::synthetic(self.operator()?.0),
        }
    }

    pub fn problem(&self) -> Result<FoldingProblem> {
        self.problem_with(&self.penalties)
    }

    /// Run settings for `problem`, with a calibration built if mitigation is on.
    pub fn run_spec(&self, problem: &FoldingProblem) -> Result<RunSpec> {
        let n = problem.num_qubits();
        let noise = self.noise.as_ref().map(|s| s.resolve(n)).transpose()?;
        let calibration = match self.mitigate {
            MitigateArg::Off => None,
            mode => {
                let mode = if mode == MitigateArg::Full {
                    CalibrationMode::Full
                } else {
                    CalibrationMode::Tensored
                };
                let channel = noise
                    .clone()
                    .unwrap_or_else(|| ReadoutNoise::symmetric(n, 0.0));
                let seed = self.seed ^ 0x9e37_79b9_7f4a_7c15;
                Some(Arc::new(build_calibration(
                    n,
                    &channel,
                    self.calibration_shots,
                    mode,
                    seed,
                )?))
            }
        };
        let spec = RunSpec {
            algorithm: self.algorithm,
            objective: self.objective,
            reps: self.reps,
            entanglement: self.entanglement,
            p: self.p,
            shots: self.shots,
            iterations: self.iterations,
            noise,
            calibration,
            seed: self.seed,
        };
        spec.validate(n)?;
        Ok(spec)
    }
}
