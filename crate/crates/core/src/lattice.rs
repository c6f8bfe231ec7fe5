//! Tetrahedral lattice geometry: turns, coordinates, overlaps and structure files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-letter amino-acid codes in the order used by interaction tables.
pub const ALPHABET: &str = "ARNDCQEGHILKMFPSTWYV";

/// Values of the first two main-chain turns.
pub const FIXED_TURNS: [Turn; 2] = [Turn(1), Turn(0)];

const THREE_LETTER: [&str; 20] = [
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET",
    "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
];

const BASIS: [[i32; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

pub type Coord = [i32; 3];

/// Index of a residue code in [`ALPHABET`].
pub fn residue_index(code: char) -> Option<usize> {
    ALPHABET.find(code)
}

/// A lattice direction, always in `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Turn(u8);

impl Turn {
    pub const ALL: [Turn; 4] = [Turn(0), Turn(1), Turn(2), Turn(3)];

    pub fn new(value: u8) -> Option<Turn> {
        (value < 4).then_some(Turn(value))
    }

    /// Builds a turn from its two code bits, high bit first.
    pub fn from_bits(high: bool, low: bool) -> Turn {
        Turn((high as u8) << 1 | low as u8)
    }

    pub fn bits(self) -> (bool, bool) {
        (self.0 & 2 != 0, self.0 & 1 != 0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for Turn {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, Self::Error> {
        Turn::new(value).ok_or_else(|| format!("turn {value} out of range 0..=3"))
    }
}

impl From<Turn> for u8 {
    fn from(t: Turn) -> u8 {
        t.0
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Lattice step for `turn` leaving a bead of the given parity.
pub fn turn_displacement(turn: Turn, parity: Parity) -> Coord {
    let v = BASIS[turn.index()];
    match parity {
        Parity::Even => v,
        Parity::Odd => [-v[0], -v[1], -v[2]],
    }
}

/// Amino-acid chain with optional single-residue side chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peptide {
    main_chain: Vec<char>,
    side_chains: Vec<Option<char>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeptideFile {
    main_chain: String,
    #[serde(default)]
    side_chains: Option<Vec<Option<String>>>,
}

impl Peptide {
    pub fn new(main_chain: &str, side_chains: &[Option<char>]) -> Result<Peptide> {
        let main: Vec<char> = main_chain.chars().collect();
        if main.len() < 2 {
            return Err(Error::InvalidPeptide(format!(
                "main chain needs at least 2 beads, got {}",
                main.len()
            )));
        }
        for &c in &main {
            if residue_index(c).is_none() {
                return Err(Error::InvalidPeptide(format!("unknown residue code '{c}'")));
            }
        }
        let sides = if side_chains.is_empty() {
            vec![None; main.len()]
        } else {
            side_chains.to_vec()
        };
        if sides.len() != main.len() {
            return Err(Error::InvalidPeptide(format!(
                "side chain list has {} entries for {} beads",
                sides.len(),
                main.len()
            )));
        }
        for (b, s) in sides.iter().enumerate() {
            if let Some(c) = *s {
                if residue_index(c).is_none() {
                    return Err(Error::InvalidPeptide(format!("unknown residue code '{c}'")));
                }
                if b == 0 || b + 1 == main.len() {
                    return Err(Error::InvalidPeptide(format!(
                        "side chain not allowed on terminal bead {b}"
                    )));
                }
            }
        }
        Ok(Peptide {
            main_chain: main,
            side_chains: sides,
        })
    }

    pub fn from_json(text: &str) -> Result<Peptide> {
        let raw: PeptideFile = serde_json::from_str(text)?;
        let mut sides = Vec::new();
        for s in raw.side_chains.unwrap_or_default() {
            match s.as_deref() {
                None | Some("") => sides.push(None),
                Some(code) => {
                    let mut chars = code.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) => sides.push(Some(c)),
                        _ => {
                            return Err(Error::InvalidPeptide(format!(
                                "side chain \"{code}\" must be a single residue"
                            )))
                        }
                    }
                }
            }
        }
        Peptide::new(&raw.main_chain, &sides)
    }

    pub fn load(path: &Path) -> Result<Peptide> {
        Peptide::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = PeptideFile {
            main_chain: self.main_chain.iter().collect(),
            side_chains: Some(
                self.side_chains
                    .iter()
                    .map(|s| s.map(String::from))
                    .collect(),
            ),
        };
        serde_json::to_string_pretty(&raw).expect("peptide serializes")
    }

    pub fn len(&self) -> usize {
        self.main_chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main_chain.is_empty()
    }

    pub fn main_chain(&self) -> &[char] {
        &self.main_chain
    }

    pub fn side_chains(&self) -> &[Option<char>] {
        &self.side_chains
    }

    pub fn has_side(&self, bead: usize) -> bool {
        self.side_chains[bead].is_some()
    }

    pub fn side_count(&self) -> usize {
        self.side_chains.iter().filter(|s| s.is_some()).count()
    }

    /// Width of the configuration bits read by [`decode_turns`].
    pub fn config_width(&self) -> usize {
        2 * self.len().saturating_sub(3) + 2 * self.side_count()
    }

    pub fn with_residues_swapped(&self, a: char, b: char) -> Peptide {
        let swap = |c: char| {
            if c == a {
                b
            } else if c == b {
                a
            } else {
                c
            }
        };
        Peptide {
            main_chain: self.main_chain.iter().map(|&c| swap(c)).collect(),
            side_chains: self.side_chains.iter().map(|s| s.map(swap)).collect(),
        }
    }
}

/// Main-chain turns plus the turn of each side bead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnSequence {
    pub turns: Vec<Turn>,
    pub side_turns: Vec<Option<Turn>>,
}

impl TurnSequence {
    /// Turn string of the free main-chain turns, e.g. "130".
    pub fn label(&self) -> String {
        self.turns.iter().skip(2).map(|t| t.to_string()).collect()
    }

    pub fn main_only(turns: &[u8]) -> Option<TurnSequence> {
        let turns = turns
            .iter()
            .map(|&t| Turn::new(t))
            .collect::<Option<Vec<_>>>()?;
        let n = turns.len() + 1;
        Some(TurnSequence {
            turns,
            side_turns: vec![None; n],
        })
    }
}

/// Reads turns from the configuration bits: free main turns 2..N-1 then side turns by bead.
pub fn decode_turns(bits: &[bool], peptide: &Peptide) -> Result<TurnSequence> {
    let n = peptide.len();
    let expected = peptide.config_width();
    if bits.len() != expected {
        return Err(Error::RegisterWidth {
            expected,
            actual: bits.len(),
        });
    }
    let mut turns: Vec<Turn> = FIXED_TURNS.iter().copied().take(n - 1).collect();
    let mut pairs = bits.chunks_exact(2).map(|p| Turn::from_bits(p[0], p[1]));
    for _ in 2..n.saturating_sub(1) {
        turns.push(pairs.next().expect("width checked"));
    }
    let side_turns = (0..n)
        .map(|b| {
            peptide
                .has_side(b)
                .then(|| pairs.next().expect("width checked"))
        })
        .collect();
    Ok(TurnSequence { turns, side_turns })
}

/// Inverse of [`decode_turns`] on the free turns.
pub fn encode_turns(turns: &TurnSequence, peptide: &Peptide) -> Vec<bool> {
    let mut bits = Vec::with_capacity(peptide.config_width());
    let side = turns
        .side_turns
        .iter()
        .enumerate()
        .filter(|(b, _)| peptide.has_side(*b));
    let free = turns.turns.iter().skip(2).copied();
    for t in free.chain(side.map(|(_, t)| t.unwrap_or(Turn(0)))) {
        let (hi, lo) = t.bits();
        bits.push(hi);
        bits.push(lo);
    }
    bits
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conformation {
    pub turns: TurnSequence,
    pub main_coords: Vec<Coord>,
    pub side_coords: Vec<Option<Coord>>,
}

fn add(a: Coord, b: Coord) -> Coord {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn turns_to_coordinates(turns: &TurnSequence, peptide: &Peptide) -> Conformation {
    let mut main = vec![[0; 3]];
    for (k, &t) in turns.turns.iter().enumerate() {
        main.push(add(main[k], turn_displacement(t, Parity::of(k))));
    }
    let side = (0..main.len())
        .map(|b| {
            match (
                peptide.side_chains.get(b).copied().flatten(),
                turns.side_turns.get(b),
            ) {
                (Some(_), Some(Some(t))) => {
                    Some(add(main[b], turn_displacement(*t, Parity::of(b))))
                }
                _ => None,
            }
        })
        .collect();
    Conformation {
        turns: turns.clone(),
        main_coords: main,
        side_coords: side,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BeadId {
    Main(usize),
    Side(usize),
}

impl fmt::Display for BeadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeadId::Main(b) => write!(f, "{b}"),
            BeadId::Side(b) => write!(f, "{b}'"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub pairs: Vec<(BeadId, BeadId)>,
}

impl OverlapReport {
    pub fn is_self_avoiding(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl Conformation {
    /// Main beads first, then side beads in host order.
    pub fn beads(&self) -> Vec<(BeadId, Coord)> {
        let main = self
            .main_coords
            .iter()
            .enumerate()
            .map(|(b, &c)| (BeadId::Main(b), c));
        let side = self
            .side_coords
            .iter()
            .enumerate()
            .filter_map(|(b, c)| c.map(|c| (BeadId::Side(b), c)));
        main.chain(side).collect()
    }

    pub fn translated(&self, by: Coord) -> Conformation {
        Conformation {
            turns: self.turns.clone(),
            main_coords: self.main_coords.iter().map(|&c| add(c, by)).collect(),
            side_coords: self
                .side_coords
                .iter()
                .map(|c| c.map(|c| add(c, by)))
                .collect(),
        }
    }
}

pub fn detect_overlap(conf: &Conformation) -> OverlapReport {
    let mut sites: BTreeMap<Coord, Vec<BeadId>> = BTreeMap::new();
    for (id, c) in conf.beads() {
        sites.entry(c).or_default().push(id);
    }
    let mut pairs = Vec::new();
    for ids in sites.values() {
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                pairs.push(if a < b { (*a, *b) } else { (*b, *a) });
            }
        }
    }
    pairs.sort();
    pairs.dedup();
    OverlapReport { pairs }
}

/// Cartesian positions in Å, with `lattice_constant` the bond length.
pub fn cartesian(conf: &Conformation, lattice_constant: f64) -> Vec<[f64; 3]> {
    let scale = lattice_constant / 3f64.sqrt();
    conf.beads()
        .iter()
        .map(|(_, c)| {
            [
                c[0] as f64 * scale,
                c[1] as f64 * scale,
                c[2] as f64 * scale,
            ]
        })
        .collect()
}

fn residue_of(peptide: &Peptide, id: BeadId) -> char {
    match id {
        BeadId::Main(b) => peptide.main_chain[b],
        BeadId::Side(b) => peptide.side_chains[b].unwrap_or('G'),
    }
}

pub fn to_xyz(conf: &Conformation, peptide: &Peptide, lattice_constant: f64) -> String {
    let beads = conf.beads();
    let pos = cartesian(conf, lattice_constant);
    let mut out = format!(
        "{}\n{} turns={}\n",
        beads.len(),
        peptide.main_chain.iter().collect::<String>(),
        conf.turns
            .turns
            .iter()
            .map(|t| t.to_string())
            .collect::<String>()
    );
    for ((id, _), p) in beads.iter().zip(&pos) {
        let name = if matches!(id, BeadId::Main(_)) {
            "CA"
        } else {
            "CB"
        };
        out.push_str(&format!(
            "{:<3} {:>12.6} {:>12.6} {:>12.6}\n",
            name, p[0], p[1], p[2]
        ));
    }
    out
}

pub fn to_pdb(conf: &Conformation, peptide: &Peptide, lattice_constant: f64) -> String {
    let beads = conf.beads();
    let pos = cartesian(conf, lattice_constant);
    let mut out = String::new();
    for (serial, ((id, _), p)) in beads.iter().zip(&pos).enumerate() {
        let (name, res_seq) = match id {
            BeadId::Main(b) => (" CA ", b + 1),
            BeadId::Side(b) => (" CB ", b + 1),
        };
        let res = THREE_LETTER[residue_index(residue_of(peptide, *id)).expect("validated")];
        out.push_str(&format!(
            "HETATM{:>5} {:<4} {:>3} A{:>4}    {:>8.3}{:>8.3}{:>8.3}{:>6.2}{:>6.2}           C\n",
            serial + 1,
            name,
            res,
            res_seq,
            p[0],
            p[1],
            p[2],
            1.0,
            0.0
        ));
    }
    let serial_of = |target: BeadId| {
        beads
            .iter()
            .position(|(id, _)| *id == target)
            .map(|i| i + 1)
    };
    for b in 1..conf.main_coords.len() {
        out.push_str(&format!("CONECT{:>5}{:>5}\n", b, b + 1));
    }
    for (b, c) in conf.side_coords.iter().enumerate() {
        if c.is_some() {
            let s = serial_of(BeadId::Side(b)).expect("side bead listed");
            out.push_str(&format!("CONECT{:>5}{:>5}\n", b + 1, s));
        }
    }
    out.push_str("END\n");
    out
}

pub fn parse_xyz(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut lines = text.lines();
    let count: usize = lines
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or_else(|| Error::Parse("xyz: first line must be the atom count".into()))?;
    lines.next();
    let mut pts = Vec::with_capacity(count);
    for line in lines.filter(|l| !l.trim().is_empty()).take(count) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 4 {
            return Err(Error::Parse(format!("xyz: malformed atom line \"{line}\"")));
        }
        let mut p = [0.0; 3];
        for (k, v) in f[1..4].iter().enumerate() {
            p[k] = v
                .parse()
                .map_err(|_| Error::Parse(format!("xyz: bad number \"{v}\"")))?;
        }
        pts.push(p);
    }
    if pts.len() != count {
        return Err(Error::Parse(format!(
            "xyz: header says {count} atoms, found {}",
            pts.len()
        )));
    }
    Ok(pts)
}

pub fn parse_pdb(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut pts = Vec::new();
    for line in text.lines() {
        if !(line.starts_with("HETATM") || line.starts_with("ATOM")) {
            continue;
        }
        let field = |a: usize, b: usize| {
            line.get(a..b)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("pdb: bad coordinate record \"{line}\"")))
        };
        pts.push([field(30, 38)?, field(38, 46)?, field(46, 54)?]);
    }
    if pts.is_empty() {
        return Err(Error::Parse("pdb: no ATOM/HETATM records".into()));
    }
    Ok(pts)
}

/// Reads an XYZ or PDB file, chosen by extension.
pub fn read_structure(path: &Path) -> Result<Vec<[f64; 3]>> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("pdb") => parse_pdb(&text),
        _ => parse_xyz(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plain(n: usize) -> Peptide {
        Peptide::new(&"A".repeat(n), &[]).unwrap()
    }

    fn dot(a: Coord, b: Coord) -> i32 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[test]
    fn displacement_convention() {
        assert_eq!(turn_displacement(Turn(0), Parity::Even), [1, 1, 1]);
        assert_eq!(turn_displacement(Turn(0), Parity::Odd), [-1, -1, -1]);
        let sum = Turn::ALL
            .iter()
            .map(|&t| turn_displacement(t, Parity::Even))
            .fold([0; 3], add);
        assert_eq!(sum, [0, 0, 0]);
        for a in Turn::ALL {
            for b in Turn::ALL {
                let d = dot(
                    turn_displacement(a, Parity::Even),
                    turn_displacement(b, Parity::Even),
                );
                assert_eq!(d, if a == b { 3 } else { -1 });
            }
        }
    }

    #[test]
    fn decode_examples() {
        let p = plain(6);
        assert_eq!(p.config_width(), 6);
        let zero = decode_turns(&[false; 6], &p).unwrap();
        assert_eq!(
            zero.turns,
            vec![Turn(1), Turn(0), Turn(0), Turn(0), Turn(0)]
        );
        let bits: Vec<bool> = "110100".chars().map(|c| c == '1').collect();
        let t = decode_turns(&bits, &p).unwrap();
        assert_eq!(t.turns, vec![Turn(1), Turn(0), Turn(3), Turn(1), Turn(0)]);
        assert_eq!(t.label(), "310");
        match decode_turns(&[false; 5], &p) {
            Err(Error::RegisterWidth {
                expected: 6,
                actual: 5,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decode_side_turns() {
        let p = Peptide::new("YPYFIP", &[None, Some('I'), None, None, Some('Y'), None]).unwrap();
        assert_eq!(p.config_width(), 10);
        let bits: Vec<bool> = "0001101101".chars().map(|c| c == '1').collect();
        let t = decode_turns(&bits, &p).unwrap();
        assert_eq!(t.label(), "012");
        assert_eq!(
            t.side_turns,
            vec![None, Some(Turn(3)), None, None, Some(Turn(1)), None]
        );
    }

    #[test]
    fn round_trip_all_six_bit_strings() {
        let p = plain(6);
        for v in 0u32..64 {
            let bits: Vec<bool> = (0..6).map(|k| v >> (5 - k) & 1 == 1).collect();
            let t = decode_turns(&bits, &p).unwrap();
            assert_eq!(encode_turns(&t, &p), bits);
        }
    }

    #[test]
    fn coordinate_examples() {
        let p = plain(2);
        let c = turns_to_coordinates(&TurnSequence::main_only(&[0]).unwrap(), &p);
        assert_eq!(c.main_coords, vec![[0, 0, 0], [1, 1, 1]]);
        let p = plain(3);
        let c = turns_to_coordinates(&TurnSequence::main_only(&[0, 0]).unwrap(), &p);
        assert_eq!(c.main_coords, vec![[0, 0, 0], [1, 1, 1], [0, 0, 0]]);
        assert_eq!(
            detect_overlap(&c).pairs,
            vec![(BeadId::Main(0), BeadId::Main(2))]
        );
    }

    #[test]
    fn zig_zag_is_self_avoiding() {
        let turns: Vec<u8> = (0..9).map(|k| (k % 2) as u8).collect();
        let c = turns_to_coordinates(&TurnSequence::main_only(&turns).unwrap(), &plain(10));
        assert!(detect_overlap(&c).is_self_avoiding());
    }

    #[test]
    fn side_bead_overlapping_main_bead() {
        let p = Peptide::new("AAAA", &[None, Some('G'), None, None]).unwrap();
        let t = TurnSequence {
            turns: vec![Turn(1), Turn(0), Turn(2)],
            side_turns: vec![None, Some(Turn(0)), None, None],
        };
        let c = turns_to_coordinates(&t, &p);
        assert_eq!(c.side_coords[1], Some(c.main_coords[2]));
        assert_eq!(
            detect_overlap(&c).pairs,
            vec![(BeadId::Main(2), BeadId::Side(1))]
        );
    }

    #[test]
    fn peptide_validation() {
        assert!(Peptide::new("A", &[]).is_err());
        assert!(Peptide::new("AXA", &[]).is_err());
        assert!(Peptide::new("AAA", &[Some('G'), None, None]).is_err());
        assert!(Peptide::new("AAA", &[None, None, Some('G')]).is_err());
        assert!(Peptide::new("AAA", &[None, Some('G')]).is_err());
        let p = Peptide::from_json(
            r#"{"main_chain":"YPYFIP","side_chains":[null,"I","P","F","Y",null]}"#,
        )
        .unwrap();
        assert_eq!(p.side_count(), 4);
        assert_eq!(Peptide::from_json(&p.to_json()).unwrap(), p);
        assert!(Peptide::from_json(r#"{"main_chain":"AAA","extra":1}"#).is_err());
        assert!(
            Peptide::from_json(r#"{"main_chain":"AAAA","side_chains":[null,"IP",null,null]}"#)
                .is_err()
        );
    }

    #[test]
    fn structure_files_round_trip() {
        let p = Peptide::new("YPYFIP", &[None, Some('I'), None, None, None, None]).unwrap();
        let t = TurnSequence {
            turns: vec![Turn(1), Turn(0), Turn(1), Turn(3), Turn(0)],
            side_turns: vec![None, Some(Turn(2)), None, None, None, None],
        };
        let c = turns_to_coordinates(&t, &p);
        let expect = cartesian(&c, 2.0);
        for pts in [
            parse_xyz(&to_xyz(&c, &p, 2.0)).unwrap(),
            parse_pdb(&to_pdb(&c, &p, 2.0)).unwrap(),
        ] {
            assert_eq!(pts.len(), 7);
            for (a, b) in pts.iter().zip(&expect) {
                for k in 0..3 {
                    assert!((a[k] - b[k]).abs() < 1e-3);
                }
            }
        }
        let d = expect[1]
            .iter()
            .zip(&expect[0])
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>();
        assert!((d.sqrt() - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn geometry_invariants(turns in proptest::collection::vec(0u8..4, 1..12), shift in proptest::array::uniform3(-5i32..5)) {
            let n = turns.len() + 1;
            let c = turns_to_coordinates(&TurnSequence::main_only(&turns).unwrap(), &plain(n));
            prop_assert_eq!(c.main_coords.len(), n);
            let steps: Vec<Coord> = c.main_coords.windows(2)
                .map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1], w[1][2] - w[0][2]])
                .collect();
            for s in &steps {
                prop_assert_eq!(dot(*s, *s), 3);
            }
            for w in steps.windows(2) {
                let d = dot(w[0], w[1]);
                prop_assert!(d == -3 || d == 1);
            }
            prop_assert_eq!(detect_overlap(&c), detect_overlap(&c.translated(shift)));
        }
    }
}
