use super::builder::{contact_qubit, contacts, register_width, ContactKind};
use super::{config_bits, Bits, InteractionTable, PenaltyConfig};
use crate::error::{Error, Result};
use crate::lattice::{decode_turns, turns_to_coordinates, Conformation, Coord, Peptide};

fn sub(a: Coord, b: Coord) -> Coord {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn det(a: Coord, b: Coord, c: Coord) -> i32 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

struct Geometry<'a> {
    conf: &'a Conformation,
    peptide: &'a Peptide,
    table: &'a InteractionTable,
    lambda_1: f64,
}

impl Geometry<'_> {
    /// Position and sublattice of a 1-based bead.
    fn site(&self, bead: usize, side: bool) -> Option<(Coord, usize)> {
        if bead < 1 || bead > self.peptide.len() {
            return None;
        }
        if side {
            self.conf.side_coords[bead - 1].map(|c| (c, bead % 2))
        } else {
            Some((self.conf.main_coords[bead - 1], (bead - 1) % 2))
        }
    }

    /// Lattice distance in units where nearest neighbours sit at 1.
    fn x(&self, i: usize, si: bool, j: usize, sj: bool) -> Option<f64> {
        let (a, pa) = self.site(i, si)?;
        let (b, pb) = self.site(j, sj)?;
        let d = sub(a, b);
        let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + (pa != pb) as i32;
        debug_assert_eq!(d2 % 4, 0);
        Some((d2 / 4) as f64)
    }

    fn energy(&self, i: usize, si: bool, j: usize, sj: bool) -> f64 {
        let r = |b: usize, s: bool| {
            if s {
                self.peptide.side_chains()[b - 1].unwrap()
            } else {
                self.peptide.main_chain()[b - 1]
            }
        };
        self.table.energy(r(i, si), r(j, sj))
    }

    fn first(&self, i: usize, si: bool, j: usize, sj: bool) -> f64 {
        self.x(i, si, j, sj).map_or(0.0, |x| {
            7.0 * (j - i + 1) as f64 * self.lambda_1 * (x - 1.0) + 0.1 * self.energy(i, si, j, sj)
        })
    }

    fn second(&self, i: usize, si: bool, j: usize, sj: bool) -> f64 {
        self.x(i, si, j, sj).map_or(0.0, |x| {
            self.lambda_1 * (2.0 - x) + 0.1 * self.energy(i, si, j, sj)
        })
    }
}

/// Energy of a full-register state computed from the decoded lattice structure.
pub fn classical_energy(
    peptide: &Peptide,
    penalties: &PenaltyConfig,
    table: &InteractionTable,
    bits: &Bits,
) -> Result<f64> {
    let n = peptide.len();
    if n < 4 {
        return Err(Error::InstanceTooSmall { beads: n });
    }
    if bits.len() != register_width(n) {
        return Err(Error::RegisterWidth {
            expected: register_width(n),
            actual: bits.len(),
        });
    }
    let mut bits = bits.clone();
    if !peptide.has_side(1) {
        bits.set(5, true);
    }
    let turns = decode_turns(&config_bits(&bits, peptide)?, peptide)?;
    let conf = turns_to_coordinates(&turns, peptide);
    let t = &turns.turns;
    let mut energy = 0.0;

    let back_turns = t.windows(2).filter(|w| w[0] == w[1]).count();
    energy += penalties.penalty_back * back_turns as f64;

    for host in 1..n - 1 {
        let Some(side) = conf.side_coords[host] else {
            continue;
        };
        if t[host - 1] == t[host] {
            continue;
        }
        let m = &conf.main_coords;
        let handed = det(
            sub(m[host], m[host - 1]),
            sub(m[host + 1], m[host]),
            sub(side, m[host]),
        );
        if handed != 4 {
            energy += penalties.penalty_chiral;
        }
    }

    let g = Geometry {
        conf: &conf,
        peptide,
        table,
        lambda_1: penalties.penalty_1,
    };
    let side_turn = |bead: usize| turns.side_turns[bead - 1];
    for i in 1..=n - 3 {
        if peptide.has_side(i - 1) && peptide.has_side(i + 2) {
            if Some(t[i + 1]) == side_turn(i) && Some(t[i - 1]) == side_turn(i + 3) {
                energy += g.energy(i, true, i + 3, true)
                    + 0.1 * (g.energy(i, true, i + 3, false) + g.energy(i, false, i + 3, true));
            }
        }
    }

    if penalties.penalty_1 != 0.0 {
        for (kind, i, j) in contacts(peptide) {
            if !bits.get(contact_qubit(n, kind, i, j)) {
                continue;
            }
            energy += match kind {
                ContactKind::MainMain => {
                    g.first(i, false, j, false)
                        + g.second(i - 1, false, j, false)
                        + g.second(i + 1, false, j, false)
                        + g.second(i, false, j - 1, false)
                        + g.second(i, false, j + 1, false)
                }
                ContactKind::MainSide => {
                    g.first(i, false, j, true)
                        + g.second(i, false, j, false)
                        + g.second(i + 1, false, j, true)
                        + g.second(i - 1, false, j, true)
                }
                ContactKind::SideMain => {
                    g.first(i, true, j, false)
                        + g.second(i, false, j, false)
                        + g.second(i, true, j, true)
                        + g.second(i, true, j + 1, false)
                        + g.second(i, true, j - 1, false)
                }
                ContactKind::SideSide if j - i >= 5 => {
                    g.first(i, true, j, true)
                        + g.second(i, true, j, false)
                        + g.second(i, false, j, true)
                }
                ContactKind::SideSide => 0.0,
            };
        }
    }
    Ok(energy)
}
