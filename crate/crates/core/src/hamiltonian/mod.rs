//! Diagonal Pauli-Z Hamiltonians for the folding problem.

mod builder;
mod oracle;
mod table;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use builder::{build_hamiltonian, config_bits, contact_qubit, register_width, ContactKind};
pub use oracle::classical_energy;
pub use table::{load_interaction_table, InteractionTable};

/// Widest operator whose spectrum may be tabulated.
pub const SPECTRUM_LIMIT: usize = 26;

type Words = SmallVec<[u64; 2]>;

fn trim(w: &mut Words) {
    while w.last() == Some(&0) {
        w.pop();
    }
}

/// Set of qubits carrying a Z factor. Stored without trailing zero words.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ZMask(Words);

impl ZMask {
    pub fn identity() -> ZMask {
        ZMask::default()
    }

    pub fn single(q: usize) -> ZMask {
        let mut w: Words = SmallVec::from_elem(0, q / 64 + 1);
        w[q / 64] = 1 << (q % 64);
        ZMask(w)
    }

    pub fn from_qubits(qs: &[usize]) -> ZMask {
        qs.iter()
            .fold(ZMask::identity(), |m, &q| m.xor(&ZMask::single(q)))
    }

    pub fn from_u64(v: u64) -> ZMask {
        let mut w: Words = SmallVec::from_elem(v, 1);
        trim(&mut w);
        ZMask(w)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0.get(q / 64).is_some_and(|w| w >> (q % 64) & 1 == 1)
    }

    pub fn xor(&self, other: &ZMask) -> ZMask {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut w = long.0.clone();
        for (a, b) in w.iter_mut().zip(short.0.iter()) {
            *a ^= b;
        }
        trim(&mut w);
        ZMask(w)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| 64 * k + b)
        })
    }

    /// One past the highest qubit, or 0 for the identity.
    pub fn span(&self) -> usize {
        match self.0.last() {
            None => 0,
            Some(&w) => 64 * (self.0.len() - 1) + 64 - w.leading_zeros() as usize,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self.0.len() {
            0 => Some(0),
            1 => Some(self.0[0]),
            _ => None,
        }
    }

    /// Whether the product of Z factors is −1 on `bits`.
    pub fn odd_on(&self, bits: &Bits) -> bool {
        let ones: u32 = self
            .0
            .iter()
            .zip(bits.words.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn to_hex(&self) -> String {
        if self.0.is_empty() {
            return "0x0".into();
        }
        let mut s = format!("0x{:x}", self.0.last().unwrap());
        for w in self.0.iter().rev().skip(1) {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<ZMask> {
        let digits = s.strip_prefix("0x").unwrap_or(s);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(Error::Parse(format!("bad hex mask \"{s}\"")));
        }
        let mut w: Words = SmallVec::new();
        let bytes = digits.as_bytes();
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = std::str::from_utf8(&bytes[start..end]).expect("ascii");
            w.push(u64::from_str_radix(chunk, 16).expect("checked hex"));
            end = start;
        }
        trim(&mut w);
        Ok(ZMask(w))
    }
}

impl Ord for ZMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for ZMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ZMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z{:?}", self.qubits().collect::<Vec<_>>())
    }
}

/// Computational basis state. Qubit 0 is the least-significant bit;
/// the text form lists qubit n-1 first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    n: usize,
    words: Words,
}

impl Bits {
    pub fn zeros(n: usize) -> Bits {
        Bits {
            n,
            words: SmallVec::from_elem(0, n.div_ceil(64).max(1)),
        }
    }

    pub fn from_index(n: usize, index: u64) -> Bits {
        let mut b = Bits::zeros(n);
        b.words[0] = if n >= 64 {
            index
        } else {
            index & ((1u64 << n) - 1)
        };
        b
    }

    /// Builds from qubit values listed in qubit order.
    pub fn from_bools(values: &[bool]) -> Bits {
        let mut b = Bits::zeros(values.len());
        for (q, &v) in values.iter().enumerate() {
            b.set(q, v);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, q: usize) -> bool {
        self.words[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn set(&mut self, q: usize, v: bool) {
        if v {
            self.words[q / 64] |= 1 << (q % 64);
        } else {
            self.words[q / 64] &= !(1 << (q % 64));
        }
    }

    pub fn index(&self) -> Option<u64> {
        (self.n <= 64).then(|| self.words[0])
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.n).map(|q| self.get(q)).collect()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n)
            .rev()
            .map(|q| if self.get(q) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits> {
        let n = s.len();
        let mut b = Bits::zeros(n);
        for (k, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(n - 1 - k, true),
                _ => return Err(Error::Parse(format!("bad bitstring \"{s}\""))),
            }
        }
        Ok(b)
    }
}

/// Formats a basis index as a bitstring of width `n`.
pub fn index_to_string(n: usize, index: u64) -> String {
    Bits::from_index(n, index).to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    pub penalty_chiral: f64,
    pub penalty_back: f64,
    pub penalty_1: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            penalty_chiral: 10.0,
            penalty_back: 10.0,
            penalty_1: 10.0,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("penalty_chiral", self.penalty_chiral),
            ("penalty_back", self.penalty_back),
            ("penalty_1", self.penalty_1),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be a non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Meaning of one qubit of a folding register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum QubitRole {
    /// `high` is the first of the two code bits of turn `turn`.
    MainTurn {
        turn: usize,
        high: bool,
        pinned: Option<bool>,
    },
    SideTurn {
        bead: usize,
        high: bool,
    },
    Contact {
        kind: ContactKind,
        lower: usize,
        upper: usize,
    },
    Spare,
    Generic,
}

impl QubitRole {
    pub fn is_interaction(&self) -> bool {
        matches!(self, QubitRole::Contact { .. })
    }

    pub fn pinned(&self) -> Option<bool> {
        match *self {
            QubitRole::MainTurn { pinned, .. } => pinned,
            _ => None,
        }
    }
}

/// Sum of Z-product terms with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    num_qubits: usize,
    terms: Vec<(ZMask, f64)>,
    layout: Vec<QubitRole>,
}

impl DiagonalOperator {
    /// Merges duplicate masks and drops zero coefficients. Terms end up sorted by mask.
    pub fn new(
        num_qubits: usize,
        terms: impl IntoIterator<Item = (ZMask, f64)>,
    ) -> Result<DiagonalOperator> {
        DiagonalOperator::with_layout(terms, vec![QubitRole::Generic; num_qubits])
    }

    pub fn with_layout(
        terms: impl IntoIterator<Item = (ZMask, f64)>,
        layout: Vec<QubitRole>,
    ) -> Result<DiagonalOperator> {
        let num_qubits = layout.len();
        let mut merged: BTreeMap<ZMask, f64> = BTreeMap::new();
        for (m, c) in terms {
            if m.span() > num_qubits {
                return Err(Error::RegisterWidth {
                    expected: num_qubits,
                    actual: m.span(),
                });
            }
            *merged.entry(m).or_insert(0.0) += c;
        }
        let terms = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        Ok(DiagonalOperator {
            num_qubits,
            terms,
            layout,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(ZMask, f64)] {
        &self.terms
    }

    pub fn layout(&self) -> &[QubitRole] {
        &self.layout
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(m, _)| m.is_identity())
            .map_or(0.0, |t| t.1)
    }

    /// Adds `c` times the identity.
    pub fn shifted(&self, c: f64) -> DiagonalOperator {
        let terms = self.terms.iter().cloned().chain([(ZMask::identity(), c)]);
        DiagonalOperator::with_layout(terms, self.layout.clone()).expect("same width")
    }

    pub fn used_qubits(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_qubits];
        for (m, _) in &self.terms {
            for q in m.qubits() {
                used[q] = true;
            }
        }
        (0..self.num_qubits).filter(|&q| used[q]).collect()
    }

    /// Terms as 64-bit masks, for operators of at most 64 qubits.
    pub fn dense_terms(&self) -> Result<Vec<(u64, f64)>> {
        if self.num_qubits > 64 {
            return Err(Error::Capacity {
                what: "64-bit basis index",
                requested: self.num_qubits,
                limit: 64,
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| (m.as_u64().expect("width checked"), *c))
            .collect())
    }

    /// Energy of basis state `index`.
    pub fn evaluate_index(&self, index: u64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mask = m.as_u64().expect("operator wider than 64 qubits");
                if (mask & index).count_ones() % 2 == 1 {
                    -c
                } else {
                    *c
                }
            })
            .sum()
    }

    /// Energies of all 2^n basis states, each summed term by term.
    pub fn energies(&self) -> Result<Vec<f64>> {
        let n = self.num_qubits;
        if n > SPECTRUM_LIMIT {
            return Err(Error::Capacity {
                what: "spectrum qubits",
                requested: n,
                limit: SPECTRUM_LIMIT,
            });
        }
        let terms = self.dense_terms()?;
        let eval = |i: u64| -> f64 {
            terms
                .iter()
                .map(|&(m, c)| if (m & i).count_ones() % 2 == 1 { -c } else { c })
                .sum()
        };
        Ok((0..1u64 << n).into_par_iter().map(eval).collect())
    }

    /// Energies of all 2^n basis states by a fast Walsh-Hadamard transform.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.num_qubits;
        if n > SPECTRUM_LIMIT {
            return Err(Error::Capacity {
                what: "spectrum qubits",
                requested: n,
                limit: SPECTRUM_LIMIT,
            });
        }
        let mut s = vec![0.0; 1 << n];
        for (m, c) in self.dense_terms()? {
            s[m as usize] += c;
        }
        let mut h = 1;
        while h < s.len() {
            for block in s.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            }
            h *= 2;
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let dump = OperatorDump {
            num_qubits: self.num_qubits,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermDump {
                    mask: m.to_hex(),
                    coeff: *c,
                })
                .collect(),
            register_layout: self.layout.clone(),
        };
        serde_json::to_string_pretty(&dump).expect("operator serializes")
    }

    pub fn from_json(text: &str) -> Result<DiagonalOperator> {
        let dump: OperatorDump = serde_json::from_str(text)?;
        if dump.register_layout.len() != dump.num_qubits {
            return Err(Error::Schema(format!(
                "register layout lists {} qubits, operator has {}",
                dump.register_layout.len(),
                dump.num_qubits
            )));
        }
        let terms = dump
            .terms
            .iter()
            .map(|t| Ok((ZMask::from_hex(&t.mask)?, t.coeff)))
            .collect::<Result<Vec<_>>>()?;
        DiagonalOperator::with_layout(terms, dump.register_layout)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDump {
    mask: String,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDump {
    num_qubits: usize,
    terms: Vec<TermDump>,
    register_layout: Vec<QubitRole>,
}

pub fn evaluate(op: &DiagonalOperator, bits: &Bits) -> Result<f64> {
    if bits.len() != op.num_qubits {
        return Err(Error::RegisterWidth {
            expected: op.num_qubits,
            actual: bits.len(),
        });
    }
    Ok(op
        .terms
        .iter()
        .map(|(m, c)| if m.odd_on(bits) { -c } else { *c })
        .sum())
}

/// Record of which original qubits survive compression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitMap {
    pub original_width: usize,
    pub kept_qubits: Vec<usize>,
    pub fixed_values: Vec<(usize, bool)>,
}

impl QubitMap {
    pub fn identity(width: usize) -> QubitMap {
        QubitMap {
            original_width: width,
            kept_qubits: (0..width).collect(),
            fixed_values: Vec::new(),
        }
    }

    pub fn compressed_width(&self) -> usize {
        self.kept_qubits.len()
    }

    pub fn lift(&self, compressed: &Bits) -> Result<Bits> {
        if compressed.len() != self.kept_qubits.len() {
            return Err(Error::RegisterWidth {
                expected: self.kept_qubits.len(),
                actual: compressed.len(),
            });
        }
        let mut full = Bits::zeros(self.original_width);
        for &(q, v) in &self.fixed_values {
            full.set(q, v);
        }
        for (k, &q) in self.kept_qubits.iter().enumerate() {
            full.set(q, compressed.get(k));
        }
        Ok(full)
    }

    pub fn project(&self, full: &Bits) -> Bits {
        Bits::from_bools(
            &self
                .kept_qubits
                .iter()
                .map(|&q| full.get(q))
                .collect::<Vec<_>>(),
        )
    }

    /// Composes `self` (applied first) with a later compression `next`.
    pub fn then(&self, next: &QubitMap) -> QubitMap {
        let mut fixed = self.fixed_values.clone();
        for &(q, v) in &next.fixed_values {
            fixed.push((self.kept_qubits[q], v));
        }
        fixed.sort();
        QubitMap {
            original_width: self.original_width,
            kept_qubits: next
                .kept_qubits
                .iter()
                .map(|&q| self.kept_qubits[q])
                .collect(),
            fixed_values: fixed,
        }
    }
}

/// Drops every qubit that appears in no term.
pub fn compress(op: &DiagonalOperator) -> (DiagonalOperator, QubitMap) {
    let kept = op.used_qubits();
    let mut new_index = vec![usize::MAX; op.num_qubits];
    for (k, &q) in kept.iter().enumerate() {
        new_index[q] = k;
    }
    let terms = op.terms.iter().map(|(m, c)| {
        let qs: Vec<usize> = m.qubits().map(|q| new_index[q]).collect();
        (ZMask::from_qubits(&qs), *c)
    });
    let layout = kept.iter().map(|&q| op.layout[q]).collect();
    let fixed_values = (0..op.num_qubits)
        .filter(|q| new_index[*q] == usize::MAX)
        .map(|q| (q, op.layout[q].pinned().unwrap_or(false)))
        .collect();
    let small = DiagonalOperator::with_layout(terms, layout).expect("re-indexed masks fit");
    (
        small,
        QubitMap {
            original_width: op.num_qubits,
            kept_qubits: kept,
            fixed_values,
        },
    )
}
