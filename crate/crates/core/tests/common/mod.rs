#![allow(dead_code)]

pub mod dense;

use std::path::PathBuf;

use latfold::hamiltonian::{InteractionTable, PenaltyConfig};
use latfold::lattice::Peptide;
use latfold::solver::FoldingProblem;

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(rel)
}

pub fn peptide(name: &str) -> Peptide {
    Peptide::load(&data(&format!("instances/{name}.json"))).unwrap()
}

pub fn problem(name: &str) -> FoldingProblem {
    FoldingProblem::new(
        &peptide(name),
        &PenaltyConfig::default(),
        &InteractionTable::bundled(),
    )
    .unwrap()
}
