use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Bits, DiagonalOperator, PenaltyConfig, QubitRole, ZMask};
use crate::error::{Error, Result};
use crate::lattice::Peptide;

const PRUNE: f64 = 1e-10;

/// Which ends of a contact are side beads. Variant order is allocation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    SideMain,
    MainSide,
    SideSide,
    MainMain,
}

impl ContactKind {
    fn block(self) -> usize {
        self as usize
    }
}

/// Qubits in the uncompressed register of an `n`-bead chain.
pub fn register_width(n: usize) -> usize {
    4 * (n - 1) * (n - 1) + 4 * (n - 1)
}

fn main_turn_qubits(turn: usize) -> (usize, usize) {
    (2 * turn, 2 * turn + 1)
}

fn side_turn_qubits(n: usize, bead: usize) -> (usize, usize) {
    (2 * (n - 1) + 2 * bead, 2 * (n - 1) + 2 * bead + 1)
}

/// Contact qubit for 1-based beads `lower < upper`.
pub fn contact_qubit(n: usize, kind: ContactKind, lower: usize, upper: usize) -> usize {
    let m = n - 1;
    4 * m + kind.block() * m * m + (lower - 1) * m + (upper - 1)
}

/// Pinned main-turn qubits and their values.
fn pins(peptide: &Peptide) -> Vec<(usize, bool)> {
    let mut p = vec![(0, false), (1, true), (2, false), (3, false)];
    if peptide.len() > 3 && !peptide.has_side(1) {
        p.push((5, true));
    }
    p
}

/// Admissible contacts as (kind, lower, upper), 1-based.
pub(crate) fn contacts(peptide: &Peptide) -> Vec<(ContactKind, usize, usize)> {
    let n = peptide.len();
    let side = |b: usize| peptide.has_side(b - 1);
    let mut out = Vec::new();
    for i in 1..=n.saturating_sub(4) {
        for j in i + 3..=n {
            let d = j - i;
            if d % 2 == 1 {
                if d >= 5 {
                    out.push((ContactKind::MainMain, i, j));
                }
                if side(i) && side(j) {
                    out.push((ContactKind::SideSide, i, j));
                }
            } else if d >= 4 {
                if side(j) {
                    out.push((ContactKind::MainSide, i, j));
                }
                if side(i) {
                    out.push((ContactKind::SideMain, i, j));
                }
            }
        }
    }
    out
}

pub(crate) fn layout(peptide: &Peptide) -> Vec<QubitRole> {
    let n = peptide.len();
    let mut roles = vec![QubitRole::Spare; register_width(n)];
    let pinned = pins(peptide);
    for t in 0..n - 1 {
        let (hi, lo) = main_turn_qubits(t);
        for (q, high) in [(hi, true), (lo, false)] {
            let pin = pinned.iter().find(|p| p.0 == q).map(|p| p.1);
            roles[q] = QubitRole::MainTurn {
                turn: t,
                high,
                pinned: pin,
            };
        }
    }
    for b in (0..n).filter(|&b| peptide.has_side(b)) {
        let (hi, lo) = side_turn_qubits(n, b);
        roles[hi] = QubitRole::SideTurn {
            bead: b,
            high: true,
        };
        roles[lo] = QubitRole::SideTurn {
            bead: b,
            high: false,
        };
    }
    for (kind, i, j) in contacts(peptide) {
        roles[contact_qubit(n, kind, i, j)] = QubitRole::Contact {
            kind,
            lower: i,
            upper: j,
        };
    }
    roles
}

/// Configuration bits of a full-register state, in the order read by `decode_turns`.
pub fn config_bits(full: &Bits, peptide: &Peptide) -> Result<Vec<bool>> {
    let n = peptide.len();
    if full.len() != register_width(n) {
        return Err(Error::RegisterWidth {
            expected: register_width(n),
            actual: full.len(),
        });
    }
    let mut bits = Vec::with_capacity(peptide.config_width());
    for t in 2..n - 1 {
        let (hi, lo) = main_turn_qubits(t);
        bits.push(full.get(hi));
        bits.push(full.get(lo));
    }
    for b in (0..n).filter(|&b| peptide.has_side(b)) {
        let (hi, lo) = side_turn_qubits(n, b);
        bits.push(full.get(hi));
        bits.push(full.get(lo));
    }
    Ok(bits)
}

#[derive(Clone, Debug, Default)]
struct Poly(BTreeMap<ZMask, f64>);

impl Poly {
    fn constant(c: f64) -> Poly {
        let mut p = Poly::default();
        p.0.insert(ZMask::identity(), c);
        p
    }

    /// The projector onto bit value 1 (`one == true`) or 0.
    fn bit(q: usize, one: bool) -> Poly {
        let mut p = Poly::constant(0.5);
        p.0.insert(ZMask::single(q), if one { -0.5 } else { 0.5 });
        p
    }

    fn add(&mut self, other: &Poly, scale: f64) {
        for (m, c) in &other.0 {
            *self.0.entry(m.clone()).or_insert(0.0) += scale * c;
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                *out.0.entry(a.xor(b)).or_insert(0.0) += ca * cb;
            }
        }
        out
    }

    fn scaled(mut self, s: f64) -> Poly {
        for c in self.0.values_mut() {
            *c *= s;
        }
        self
    }
}

/// Indicators of the four turn values for a qubit pair.
fn indicators((hi, lo): (usize, usize)) -> [Poly; 4] {
    let (h1, h0) = (Poly::bit(hi, true), Poly::bit(hi, false));
    let (l1, l0) = (Poly::bit(lo, true), Poly::bit(lo, false));
    [h0.mul(&l0), h0.mul(&l1), h1.mul(&l0), h1.mul(&l1)]
}

fn equal_turns(a: &[Poly; 4], b: &[Poly; 4]) -> Poly {
    let mut p = Poly::default();
    for k in 0..4 {
        p.add(&a[k].mul(&b[k]), 1.0);
    }
    p
}

/// Side-turn value required for each ordered pair of distinct (incoming, outgoing) turns
/// at an even-numbered host; odd hosts use the reversed pairs.
const CHIRAL_PAIRS: [[(usize, usize); 3]; 4] = [
    [(1, 2), (2, 3), (3, 1)],
    [(0, 3), (3, 2), (2, 0)],
    [(0, 1), (1, 3), (3, 0)],
    [(0, 2), (2, 1), (1, 0)],
];

struct Builder<'a> {
    peptide: &'a Peptide,
    table: &'a super::InteractionTable,
    lambda_1: f64,
    main: Vec<[Poly; 4]>,
    side: Vec<Option<[Poly; 4]>>,
}

impl Builder<'_> {
    fn residue(&self, bead: usize, side: bool) -> char {
        if side {
            self.peptide.side_chains()[bead - 1].expect("side bead exists")
        } else {
            self.peptide.main_chain()[bead - 1]
        }
    }

    /// Squared-count distance between two beads (1-based), or None if a bead is missing.
    fn distance(&self, i: usize, si: bool, j: usize, sj: bool) -> Option<Poly> {
        let n = self.peptide.len();
        if i < 1
            || j > n
            || (si && self.side[i - 1].is_none())
            || (sj && self.side[j - 1].is_none())
        {
            return None;
        }
        let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut x = Poly::default();
        for a in 0..4 {
            let mut axis = Poly::default();
            for k in i..j {
                axis.add(&self.main[k - 1][a], sign(k));
            }
            if si {
                axis.add(&self.side[i - 1].as_ref().unwrap()[a], -sign(i));
            }
            if sj {
                axis.add(&self.side[j - 1].as_ref().unwrap()[a], sign(j));
            }
            x.add(&axis.mul(&axis), 1.0);
        }
        Some(x)
    }

    fn energy(&self, i: usize, si: bool, j: usize, sj: bool) -> f64 {
        self.table.energy(self.residue(i, si), self.residue(j, sj))
    }

    fn first_neighbor(&self, i: usize, si: bool, j: usize, sj: bool) -> Option<Poly> {
        let x = self.distance(i, si, j, sj)?;
        let lambda_0 = 7.0 * (j - i + 1) as f64 * self.lambda_1;
        let mut p = x.scaled(lambda_0);
        p.add(
            &Poly::constant(-lambda_0 + 0.1 * self.energy(i, si, j, sj)),
            1.0,
        );
        Some(p)
    }

    fn second_neighbor(&self, i: usize, si: bool, j: usize, sj: bool) -> Option<Poly> {
        let x = self.distance(i, si, j, sj)?;
        let mut p = x.scaled(-self.lambda_1);
        p.add(
            &Poly::constant(2.0 * self.lambda_1 + 0.1 * self.energy(i, si, j, sj)),
            1.0,
        );
        Some(p)
    }
}

pub fn build_hamiltonian(
    peptide: &Peptide,
    penalties: &PenaltyConfig,
    table: &super::InteractionTable,
) -> Result<DiagonalOperator> {
    let n = peptide.len();
    if n < 4 {
        return Err(Error::InstanceTooSmall { beads: n });
    }
    penalties.validate()?;
    let b = Builder {
        peptide,
        table,
        lambda_1: penalties.penalty_1,
        main: (0..n - 1)
            .map(|t| indicators(main_turn_qubits(t)))
            .collect(),
        side: (0..n)
            .map(|bead| {
                peptide
                    .has_side(bead)
                    .then(|| indicators(side_turn_qubits(n, bead)))
            })
            .collect(),
    };
    let side = |bead: usize| peptide.has_side(bead - 1);
    let mut h = Poly::default();

    for t in 0..n - 2 {
        h.add(
            &equal_turns(&b.main[t], &b.main[t + 1]),
            penalties.penalty_back,
        );
    }

    for host in 1..n - 1 {
        let Some(s) = &b.side[host] else { continue };
        let (lower, upper) = (&b.main[host - 1], &b.main[host]);
        let reversed = (host + 1) % 2 == 1;
        for (a, pairs) in CHIRAL_PAIRS.iter().enumerate() {
            let mut wrong = Poly::constant(1.0);
            wrong.add(&s[a], -1.0);
            let mut hit = Poly::default();
            for &(l, u) in pairs {
                let (l, u) = if reversed { (u, l) } else { (l, u) };
                hit.add(&lower[l].mul(&upper[u]), 1.0);
            }
            h.add(&wrong.mul(&hit), penalties.penalty_chiral);
        }
    }

    for i in 1..=n.saturating_sub(3) {
        if i + 3 <= n && side(i) && side(i + 3) {
            let op1 = equal_turns(&b.main[i + 1], b.side[i - 1].as_ref().unwrap());
            let op2 = equal_turns(&b.main[i - 1], b.side[i + 2].as_ref().unwrap());
            let coeff = b.energy(i, true, i + 3, true)
                + 0.1 * (b.energy(i, true, i + 3, false) + b.energy(i, false, i + 3, true));
            h.add(&op1.mul(&op2), coeff);
        }
    }

    if penalties.penalty_1 != 0.0 {
        let gate = |kind, i, j| Poly::bit(contact_qubit(n, kind, i, j), true);
        let sum = |terms: Vec<Option<Poly>>| {
            let mut p = Poly::default();
            for t in terms.into_iter().flatten() {
                p.add(&t, 1.0);
            }
            p
        };
        for (kind, i, j) in contacts(peptide) {
            let body = match kind {
                ContactKind::MainMain => sum(vec![
                    b.first_neighbor(i, false, j, false),
                    b.second_neighbor(i - 1, false, j, false),
                    b.second_neighbor(i + 1, false, j, false),
                    b.second_neighbor(i, false, j - 1, false),
                    b.second_neighbor(i, false, j + 1, false),
                ]),
                ContactKind::MainSide => sum(vec![
                    b.first_neighbor(i, false, j, true),
                    b.second_neighbor(i, false, j, false),
                    b.second_neighbor(i + 1, false, j, true),
                    b.second_neighbor(i - 1, false, j, true),
                ]),
                ContactKind::SideMain => sum(vec![
                    b.first_neighbor(i, true, j, false),
                    b.second_neighbor(i, false, j, false),
                    b.second_neighbor(i, true, j, true),
                    b.second_neighbor(i, true, j + 1, false),
                    b.second_neighbor(i, true, j - 1, false),
                ]),
                ContactKind::SideSide if j - i >= 5 => sum(vec![
                    b.first_neighbor(i, true, j, true),
                    b.second_neighbor(i, true, j, false),
                    b.second_neighbor(i, false, j, true),
                ]),
                ContactKind::SideSide => continue,
            };
            h.add(&gate(kind, i, j).mul(&body), 1.0);
        }
    }

    let pinned = pins(peptide);
    let terms = h.0.into_iter().map(|(mut m, mut c)| {
        for &(q, v) in &pinned {
            if m.contains(q) {
                m = m.xor(&ZMask::single(q));
                if v {
                    c = -c;
                }
            }
        }
        (m, c)
    });
    let op = DiagonalOperator::with_layout(terms, layout(peptide))?;
    let kept = op.terms.into_iter().filter(|(_, c)| c.abs() > PRUNE);
    DiagonalOperator::with_layout(kept, op.layout)
}
