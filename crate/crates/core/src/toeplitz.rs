//! Periodic structure of Toeplitz sequences: `Per_s` sets, skeleton blocks,
//! hole statistics and essential-period witnesses.
//!
//! Two engines coexist. [`per_set_brute`] and [`skeleton_brute`] work on any
//! finite window and are only sound up to the sampled translates. The exact
//! functions ([`skeleton_exact`], [`hole_positions`], [`essential_check`])
//! use the closed-form description of the holes of `eta`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{solve_congruence, Rational};
use crate::bfree::BFreeFamily;
use crate::error::{Error, Result};
use crate::word::{cells_to_string, parse_cells, Cell, SymbolWindow};

/// One period of the `p_t`-skeleton: periodic cells keep their value, the rest are holes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SkeletonJson", try_from = "SkeletonJson")]
pub struct SkeletonBlock {
    t: usize,
    cells: Vec<Cell>,
    holes: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct SkeletonJson {
    t: usize,
    p_t: u64,
    cells: String,
    holes: Vec<u64>,
}

impl From<SkeletonBlock> for SkeletonJson {
    fn from(b: SkeletonBlock) -> Self {
        SkeletonJson {
            t: b.t,
            p_t: b.period(),
            cells: cells_to_string(&b.cells),
            holes: b.holes,
        }
    }
}

impl TryFrom<SkeletonJson> for SkeletonBlock {
    type Error = Error;

    fn try_from(j: SkeletonJson) -> Result<Self> {
        let block = SkeletonBlock::from_cells(j.t, parse_cells(&j.cells)?);
        if block.period() != j.p_t || block.holes != j.holes {
            return Err(Error::InvalidArgument(
                "skeleton fields disagree with cells".into(),
            ));
        }
        Ok(block)
    }
}

impl SkeletonBlock {
    pub fn from_cells(t: usize, cells: Vec<Cell>) -> Self {
        let holes = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_hole())
            .map(|(i, _)| i as u64)
            .collect();
        Self { t, cells, holes }
    }

    pub fn level(&self) -> usize {
        self.t
    }

    pub fn period(&self) -> u64 {
        self.cells.len() as u64
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: u64) -> Cell {
        self.cells[i as usize]
    }

    /// Sorted hole positions.
    pub fn holes(&self) -> &[u64] {
        &self.holes
    }

    pub fn filled(&self) -> usize {
        self.cells.len() - self.holes.len()
    }

    /// The block `A A [offset, offset + len)`, i.e. the skeleton read from `offset` cyclically.
    pub fn rotated(&self, offset: u64) -> SkeletonBlock {
        let p = self.cells.len();
        let off = (offset % p as u64) as usize;
        let cells = (0..p).map(|i| self.cells[(off + i) % p]).collect();
        SkeletonBlock::from_cells(self.t, cells)
    }

    /// Whether `finer` agrees with this block repeated, wherever this block is filled.
    pub fn refined_by(&self, finer: &SkeletonBlock) -> bool {
        let p = self.cells.len();
        finer.cells.len().is_multiple_of(p)
            && finer
                .cells
                .iter()
                .enumerate()
                .all(|(i, c)| match self.cells[i % p] {
                    Cell::Hole => true,
                    filled => *c == filled,
                })
    }
}

impl std::fmt::Display for SkeletonBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&cells_to_string(&self.cells))
    }
}

/// Residues `r ∈ [0, s)` whose in-window orbit `r + sZ` is constant.
///
/// Every residue class must have at least `2·horizon + 1` positions in the
/// window. The result over-approximates the true `Per_s` residues.
pub fn per_set_brute(window: &SymbolWindow, s: u64, horizon: usize) -> Result<BTreeSet<u64>> {
    if s == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    let need = (2 * horizon + 1).saturating_mul(s as usize);
    if window.len() < need {
        return Err(Error::WindowTooShort {
            have: window.len(),
            need,
        });
    }
    let mut first: Vec<Option<u8>> = vec![None; s as usize];
    let mut constant = vec![true; s as usize];
    for (i, &x) in window.symbols().iter().enumerate() {
        let r = (window.start() + i as i64).rem_euclid(s as i64) as usize;
        match first[r] {
            None => first[r] = Some(x),
            Some(v) if v != x => constant[r] = false,
            _ => {}
        }
    }
    Ok((0..s).filter(|&r| constant[r as usize]).collect())
}

/// The skeleton of period `s` as seen by [`per_set_brute`].
pub fn skeleton_brute(
    window: &SymbolWindow,
    t: usize,
    s: u64,
    horizon: usize,
) -> Result<SkeletonBlock> {
    let periodic = per_set_brute(window, s, horizon)?;
    let cells = (0..s)
        .map(|r| {
            if !periodic.contains(&r) {
                return Cell::Hole;
            }
            // Any in-window representative carries the constant value.
            let n = window.start() + (r as i64 - window.start()).rem_euclid(s as i64);
            Cell::from_bit(window.get(n).expect("window covers every residue"))
        })
        .collect();
    Ok(SkeletonBlock::from_cells(t, cells))
}

fn power_of_two(t: usize) -> Result<u64> {
    if t >= 63 {
        return Err(Error::Overflow("2^t"));
    }
    Ok(1 << t)
}

/// Cell `s` of `A_t` for `eta`: zero when some `2^j·b_j | s` (`j <= t`),
/// a hole when `2^t | s` and no `b_i | s`, otherwise the constant value `eta(s)`.
pub fn skeleton_cell(family: &BFreeFamily, t: usize, s: u64) -> Result<Cell> {
    family.check_level(t)?;
    let two_t = power_of_two(t)?;
    if family.elements()[..t].iter().any(|&e| s.is_multiple_of(e)) {
        return Ok(Cell::Zero);
    }
    if s.is_multiple_of(two_t) {
        return Ok(Cell::Hole);
    }
    // v_2(s) < t, so eta(s) is decided by the first t generators.
    Ok(Cell::from_bit(family.eta_at(s as i64)?))
}

pub fn skeleton_exact(family: &BFreeFamily, t: usize) -> Result<SkeletonBlock> {
    let p = family.period(t)?;
    let cells = (0..p)
        .map(|s| skeleton_cell(family, t, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(SkeletonBlock::from_cells(t, cells))
}

/// Holes of `A_t`: multiples of `2^t` below `p_t` coprime to `b_1⋯b_t`.
pub fn hole_positions(family: &BFreeFamily, t: usize) -> Result<Vec<u64>> {
    let p = family.period(t)?;
    let two_t = power_of_two(t)?;
    let gens = &family.generators()[..t];
    Ok((0..p / two_t)
        .filter(|m| gens.iter().all(|b| m % b != 0))
        .map(|m| m * two_t)
        .collect())
}

/// `∏_{i<=t} (b_i − 1)`.
pub fn hole_count_formula(family: &BFreeFamily, t: usize) -> Result<u64> {
    family.check_level(t)?;
    family.generators()[..t]
        .iter()
        .try_fold(1u64, |acc, &b| acc.checked_mul(b - 1))
        .ok_or(Error::Overflow("hole count"))
}

/// Minimal cyclic distance between consecutive holes, wraparound included.
pub fn cyclic_min_gap(holes: &[u64], period: u64) -> Option<u64> {
    let (&first, &last) = (holes.first()?, holes.last()?);
    let wrap = period - last + first;
    holes
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(wrap))
        .min()
}

/// `k_t` of property (Sh) for `eta`.
pub fn sh_gap(family: &BFreeFamily, t: usize) -> Result<u64> {
    let holes = hole_positions(family, t)?;
    cyclic_min_gap(&holes, family.period(t)?).ok_or(Error::InvalidArgument("no holes".into()))
}

/// Fraction of holes in `A_t`, `s_t / p_t`; never above `2^-t`.
pub fn regularity_ratio(family: &BFreeFamily, t: usize) -> Result<Rational> {
    let ratio = Rational::new(hole_count_formula(family, t)?, family.period(t)?);
    debug_assert!(ratio <= Rational::new(1, power_of_two(t)?));
    Ok(ratio)
}

/// `{ I/2^t mod b_i : I a hole of A_t }`.
pub fn residue_classes_of_holes(family: &BFreeFamily, t: usize, i: usize) -> Result<BTreeSet<u64>> {
    if i == 0 || i > t {
        return Err(Error::InvalidArgument(format!(
            "generator index {i} not in 1..={t}"
        )));
    }
    let b = family.generator(i)?;
    let two_t = power_of_two(t)?;
    Ok(hole_positions(family, t)?
        .into_iter()
        .map(|h| (h / two_t) % b)
        .collect())
}

/// Which branch of the essential-period argument produced the witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialCase {
    /// Some `b_i` (`i < t`) does not divide `s`.
    PartialGenerator { generator: usize },
    /// `b_1..b_(t-1)` divide `s` but `b_t` does not.
    LastGenerator,
    /// All of `b_1..b_t` divide `s`.
    AllGenerators,
}

/// A position of `Per_(p_t)(eta)` outside `Per_s(eta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialWitness {
    pub position: i64,
    /// `eta(position + multiplier·s) != eta(position)`.
    pub multiplier: i64,
    pub case: EssentialCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialReport {
    pub t: usize,
    pub candidate: u64,
    pub violated: bool,
    pub witness: Option<EssentialWitness>,
}

/// Shows that the candidate period `s <= p_t` does not capture `Per_(p_t)(eta)`.
///
/// For `s < p_t` a witness position is built explicitly and then checked by
/// evaluating `eta`; failure of that check is reported as
/// [`Error::InconsistentLevels`].
pub fn essential_check(family: &BFreeFamily, t: usize, s: u64) -> Result<EssentialReport> {
    let p = family.period(t)?;
    if s == 0 || s > p {
        return Err(Error::InvalidArgument(format!(
            "candidate {s} not in 1..={p}"
        )));
    }
    if s == p {
        return Ok(EssentialReport {
            t,
            candidate: s,
            violated: false,
            witness: None,
        });
    }
    let gens = &family.generators()[..t];
    let si = s as i64;
    let witness = if let Some(i) = (1..t).find(|&i| s.gcd(&gens[i - 1]) < gens[i - 1]) {
        let reduced = s.gcd(&gens[i - 1]);
        let position = (power_of_two(t - 1)? * reduced) as i64;
        let modulus = family.element(i)? as i64;
        let k =
            solve_congruence(si, -position, modulus).expect("gcd(2^i b_i, s) divides the witness");
        EssentialWitness {
            position,
            multiplier: k,
            case: EssentialCase::PartialGenerator { generator: i },
        }
    } else {
        let position = family.element(t)? as i64;
        if !s.is_multiple_of(gens[t - 1]) {
            let multiplier = power_of_two(t + 1)? as i64;
            EssentialWitness {
                position,
                multiplier,
                case: EssentialCase::LastGenerator,
            }
        } else {
            EssentialWitness {
                position,
                multiplier: 1,
                case: EssentialCase::AllGenerators,
            }
        }
    };

    let moved = witness
        .multiplier
        .checked_mul(si)
        .and_then(|d| d.checked_add(witness.position))
        .ok_or(Error::Overflow("witness position"))?;
    let here = family.eta_at(witness.position)?;
    let there = family.eta_at(moved)?;
    let periodic_cell = skeleton_cell(family, t, witness.position.rem_euclid(p as i64) as u64)?;
    if here == there || periodic_cell != Cell::from_bit(here) {
        return Err(Error::InconsistentLevels(witness.position));
    }
    Ok(EssentialReport {
        t,
        candidate: s,
        violated: true,
        witness: Some(witness),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureLevel {
    pub t: usize,
    pub p_t: u64,
    pub essential: bool,
    /// Candidate period -> witness position.
    pub witnesses: BTreeMap<u64, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicStructureReport {
    pub levels: Vec<StructureLevel>,
}

/// Runs [`essential_check`] for every candidate below `p_t`, `t = 1..=max_t`.
pub fn periodic_structure(family: &BFreeFamily, max_t: usize) -> Result<PeriodicStructureReport> {
    let mut levels = Vec::with_capacity(max_t);
    for t in 1..=max_t {
        let p_t = family.period(t)?;
        if t > 1 && p_t % family.period(t - 1)? != 0 {
            return Err(Error::InconsistentLevels(p_t as i64));
        }
        let mut witnesses = BTreeMap::new();
        let mut essential = true;
        for s in 1..p_t {
            let report = essential_check(family, t, s)?;
            essential &= report.violated;
            if let Some(w) = report.witness {
                witnesses.insert(s, w.position);
            }
        }
        levels.push(StructureLevel {
            t,
            p_t,
            essential,
            witnesses,
        });
    }
    Ok(PeriodicStructureReport { levels })
}
