use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{residue_index, ALPHABET};

const BUNDLED: &str = include_str!("../../data/mj_1996.txt");

/// Symmetric 20×20 residue contact energies, indexed in [`ALPHABET`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionTable {
    e: [[f64; 20]; 20],
}

impl InteractionTable {
    /// The shipped Miyazawa-Jernigan table.
    pub fn bundled() -> InteractionTable {
        InteractionTable::parse(BUNDLED).expect("bundled table is well formed")
    }

    pub fn energy(&self, a: char, b: char) -> f64 {
        let i = residue_index(a).expect("validated residue");
        let j = residue_index(b).expect("validated residue");
        self.e[i][j]
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> f64) -> InteractionTable {
        let mut e = [[0.0; 20]; 20];
        for i in 0..20 {
            for j in 0..=i {
                e[i][j] = f(i, j);
                e[j][i] = e[i][j];
            }
        }
        InteractionTable { e }
    }

    /// Table with the labels of residues `a` and `b` exchanged.
    pub fn with_residues_swapped(&self, a: char, b: char) -> InteractionTable {
        let (ia, ib) = (residue_index(a).unwrap(), residue_index(b).unwrap());
        let map = |k: usize| {
            if k == ia {
                ib
            } else if k == ib {
                ia
            } else {
                k
            }
        };
        InteractionTable::from_fn(|i, j| self.e[map(i)][map(j)])
    }

    /// Accepts 20 lower-triangular rows or a full 20×20 matrix.
    pub fn parse(text: &str) -> Result<InteractionTable> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>().map_err(|_| {
                        Error::Schema(format!("line {}: bad number \"{v}\"", lineno + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.len() != 20 {
            return Err(Error::Schema(format!(
                "expected 20 rows for residues {ALPHABET}, found {}",
                rows.len()
            )));
        }
        let full = rows.iter().all(|r| r.len() == 20);
        let mut e = [[0.0; 20]; 20];
        for (i, r) in rows.iter().enumerate() {
            let code = ALPHABET.as_bytes()[i] as char;
            if full {
                e[i].copy_from_slice(r);
            } else if r.len() != i + 1 {
                return Err(Error::Schema(format!(
                    "row for residue {code} has {} columns, lower-triangular layout needs {}",
                    r.len(),
                    i + 1
                )));
            } else {
                for (j, &v) in r.iter().enumerate() {
                    e[i][j] = v;
                    e[j][i] = v;
                }
            }
        }
        if full {
            for i in 0..20 {
                for j in 0..i {
                    if (e[i][j] - e[j][i]).abs() > 1e-12 {
                        return Err(Error::Data(format!(
                            "matrix not symmetric at ({}, {}): {} vs {}",
                            ALPHABET.as_bytes()[i] as char,
                            ALPHABET.as_bytes()[j] as char,
                            e[i][j],
                            e[j][i]
                        )));
                    }
                }
            }
        }
        Ok(InteractionTable { e })
    }
}

pub fn load_interaction_table(path: &Path) -> Result<InteractionTable> {
    InteractionTable::parse(&std::fs::read_to_string(path)?)
}
