//! Sliding block codes on `{0,1}^Z`, an exhaustive endomorphism search over
//! finite windows, and the hole-alignment certificates behind the triviality
//! of the automorphism group of `eta`'s subshift.

use std::collections::{BTreeSet, HashSet};
use std::ops::RangeInclusive;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bfree::BFreeFamily;
use crate::error::{Error, Result};
use crate::odometer::{shifted_holes, OdometerElement};
use crate::toeplitz::hole_positions;
use crate::word::SymbolWindow;

/// Widest supported code: its rule table must fit in a `u64`.
pub const MAX_WIDTH: usize = 6;
/// Longest factor length the search can validate.
pub const MAX_HORIZON: usize = 128;

/// `Ĉ(x)(m) = rule(x[m + anchor .. m + anchor + width])`.
///
/// Bit `w` of `rule` is the image of the word whose big-endian encoding is `w`
/// (the leftmost symbol is the most significant bit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlidingCode {
    pub anchor: i64,
    pub width: usize,
    pub rule: u64,
}

impl SlidingCode {
    pub fn new(anchor: i64, width: usize, rule: u64) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "code width {width} not in 1..={MAX_WIDTH}"
            )));
        }
        if width < MAX_WIDTH && rule >> (1u32 << width) != 0 {
            return Err(Error::InvalidArgument(format!(
                "rule {rule} has bits beyond 2^{width} words"
            )));
        }
        Ok(Self {
            anchor,
            width,
            rule,
        })
    }

    pub fn identity() -> Self {
        Self {
            anchor: 0,
            width: 1,
            rule: 0b10,
        }
    }

    pub fn complement() -> Self {
        Self {
            anchor: 0,
            width: 1,
            rule: 0b01,
        }
    }

    /// Reads the symbol at `offset` inside a window of `width`; equals `S^(anchor + offset)`.
    pub fn projection(anchor: i64, width: usize, offset: usize) -> Result<Self> {
        if offset >= width {
            return Err(Error::InvalidArgument(format!(
                "offset {offset} outside width {width}"
            )));
        }
        let rule = (0..1u64 << width)
            .filter(|w| (w >> (width - 1 - offset)) & 1 == 1)
            .fold(0u64, |acc, w| acc | 1 << w);
        Self::new(anchor, width, rule)
    }

    pub fn apply_word(&self, word: &[u8]) -> u8 {
        debug_assert_eq!(word.len(), self.width);
        let index = word.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        ((self.rule >> index) & 1) as u8
    }

    /// The image on every position whose input block lies inside `window`.
    pub fn apply(&self, window: &SymbolWindow) -> Option<SymbolWindow> {
        if window.len() < self.width {
            return None;
        }
        let symbols = window
            .symbols()
            .windows(self.width)
            .map(|w| self.apply_word(w))
            .collect();
        Some(SymbolWindow::new(window.start() - self.anchor, symbols).expect("binary image"))
    }
}

/// All length-`k` factors of the window.
pub fn language(window: &SymbolWindow, k: usize) -> Result<BTreeSet<Vec<u8>>> {
    if k == 0 || window.len() < k {
        return Err(Error::WindowTooShort {
            have: window.len(),
            need: k.max(1),
        });
    }
    Ok(window.symbols().windows(k).map(<[u8]>::to_vec).collect())
}

fn factor_codes(symbols: &[u8], len: usize) -> impl Iterator<Item = u128> + '_ {
    symbols
        .windows(len)
        .map(|w| w.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128))
}

/// Checks that every length-`horizon` factor of the image of `rule` is a factor of the source.
fn rule_survives(rule: u64, word_index: &[u32], factors: &HashSet<u128>, horizon: usize) -> bool {
    let mask = if horizon == 128 {
        u128::MAX
    } else {
        (1u128 << horizon) - 1
    };
    let mut current = 0u128;
    for (n, &w) in word_index.iter().enumerate() {
        current = ((current << 1) | ((rule >> w) & 1) as u128) & mask;
        if n + 1 >= horizon && !factors.contains(&current) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeClass {
    ShiftPower(i64),
    Complement,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "SurvivorJson")]
pub struct Survivor {
    pub code: SlidingCode,
    pub class: CodeClass,
}

#[derive(Serialize)]
struct SurvivorJson {
    rule_index: u64,
    anchor: i64,
    class: &'static str,
    shift: Option<i64>,
}

impl From<Survivor> for SurvivorJson {
    fn from(s: Survivor) -> Self {
        let (class, shift) = match s.class {
            CodeClass::ShiftPower(j) => ("shift_power", Some(j)),
            CodeClass::Complement => ("complement", None),
            CodeClass::Other => ("other", None),
        };
        SurvivorJson {
            rule_index: s.code.rule,
            anchor: s.code.anchor,
            class,
            shift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    /// Code width `k`.
    pub radius: usize,
    /// Number of (rule, anchor) candidates covered.
    #[serde(rename = "checked")]
    pub candidates_checked: u64,
    /// Sorted by rule index, then anchor.
    pub survivors: Vec<Survivor>,
}

impl SearchReport {
    pub fn only_shift_powers(&self) -> bool {
        self.survivors
            .iter()
            .all(|s| matches!(s.class, CodeClass::ShiftPower(_)))
    }

    pub fn has_complement(&self) -> bool {
        self.survivors
            .iter()
            .any(|s| s.class == CodeClass::Complement)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub width: usize,
    pub anchors: RangeInclusive<i64>,
    /// Length of the image factors that must occur in the source window.
    pub horizon: usize,
    /// Maximum number of (rule, anchor) candidates.
    pub budget: u64,
}

impl SearchParams {
    pub fn candidates(&self) -> u128 {
        let rules = 1u128
            .checked_shl(1u32 << self.width.min(7))
            .unwrap_or(u128::MAX);
        let anchors =
            (*self.anchors.end() as i128 - *self.anchors.start() as i128 + 1).max(0) as u128;
        rules.saturating_mul(anchors)
    }
}

/// Enumerates every rule of the given width and keeps those whose image of the
/// window only contains factors of the window.
///
/// The anchor only relabels positions of the image, so each rule is validated
/// once and then paired with every anchor. True endomorphisms always survive;
/// survivors classed [`CodeClass::Other`] are candidates at this horizon only.
pub fn endomorphism_search(window: &SymbolWindow, params: &SearchParams) -> Result<SearchReport> {
    let SearchParams {
        width,
        horizon,
        budget,
        ..
    } = *params;
    if width == 0 || width > 5 {
        return Err(Error::InvalidArgument(format!(
            "search width {width} not in 1..=5"
        )));
    }
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} not in 1..={MAX_HORIZON}"
        )));
    }
    if params.anchors.is_empty() {
        return Err(Error::InvalidArgument("empty anchor range".into()));
    }
    let needed = params.candidates();
    if needed > budget as u128 {
        return Err(Error::ComplexityRefusal { needed, budget });
    }
    let need = width + horizon - 1;
    if window.len() < need {
        return Err(Error::WindowTooShort {
            have: window.len(),
            need,
        });
    }

    let factors: HashSet<u128> = factor_codes(window.symbols(), horizon).collect();
    let word_index: Vec<u32> = window
        .symbols()
        .windows(width)
        .map(|w| w.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
        .collect();
    let rules = 1u64 << (1u32 << width);
    let valid: Vec<u64> = (0..rules)
        .into_par_iter()
        .filter(|&rule| rule_survives(rule, &word_index, &factors, horizon))
        .collect();

    let max_shift = params.anchors.start().abs().max(params.anchors.end().abs()) + width as i64;
    let mut survivors = Vec::new();
    for &rule in &valid {
        for anchor in params.anchors.clone() {
            let code = SlidingCode {
                anchor,
                width,
                rule,
            };
            survivors.push(Survivor {
                code,
                class: classify(&code, window, max_shift),
            });
        }
    }
    Ok(SearchReport {
        radius: width,
        candidates_checked: needed as u64,
        survivors,
    })
}

fn overlap_agrees(image: &SymbolWindow, window: &SymbolWindow, shift: i64, flip: bool) -> bool {
    let lo = image.start().max(window.start() - shift);
    let hi = image.end().min(window.end() - shift);
    if hi - lo < (image.len() as i64 + 1) / 2 {
        return false;
    }
    (lo..hi).all(|m| {
        let y = image.get(m).unwrap();
        let x = window.get(m + shift).unwrap();
        (y == x) != flip
    })
}

/// `j` with `Ĉ = S^j` on the window, searching `|j| <= max_shift` by increasing `|j|`.
pub fn is_shift_power(code: &SlidingCode, window: &SymbolWindow, max_shift: i64) -> Option<i64> {
    let image = code.apply(window)?;
    (0..=max_shift)
        .flat_map(|j| if j == 0 { vec![0] } else { vec![j, -j] })
        .find(|&j| overlap_agrees(&image, window, j, false))
}

pub fn classify(code: &SlidingCode, window: &SymbolWindow, max_shift: i64) -> CodeClass {
    if let Some(j) = is_shift_power(code, window, max_shift) {
        return CodeClass::ShiftPower(j);
    }
    match code.apply(window) {
        Some(image) if overlap_agrees(&image, window, 0, true) => CodeClass::Complement,
        _ => CodeClass::Other,
    }
}

/// Pairing of a hole `I_i` of `A_t` with the hole `J_j` of `A_t(h)` it is coded from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleAlignment {
    pub hole: u64,
    pub shifted_hole: u64,
    /// `(I_i − J_j) mod p_t`.
    pub difference: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCertificate {
    pub t: usize,
    pub width: usize,
    pub k_prime: u64,
    pub alignment: Vec<HoleAlignment>,
}

/// Aligns the holes of `A_t(h)` with those of `A_t` under a code of the given width.
///
/// Each shifted hole must see exactly one hole of `A_t` at cyclic distance
/// `[0, width)` to its right, and all those distances must agree. `None`
/// means no code of this width can lift `h` at level `t`.
pub fn alignment_certificate(
    family: &BFreeFamily,
    t: usize,
    width: usize,
    h: &OdometerElement,
) -> Result<Option<LiftCertificate>> {
    family.check_level(t)?;
    if t > h.depth() {
        return Err(Error::LevelOutOfRange {
            level: t,
            depth: h.depth(),
        });
    }
    if width == 0 || t >= 63 || (1u64 << t) <= width as u64 {
        return Err(Error::LevelTooShallow { level: t, width });
    }
    let p = family.period(t)?;
    let holes: BTreeSet<u64> = hole_positions(family, t)?.into_iter().collect();
    let shifted = shifted_holes(family, t, h.coordinate(t))?;
    let mut alignment = Vec::with_capacity(shifted.len());
    for &j in &shifted {
        let mut matches = (0..width as u64).filter(|d| holes.contains(&((j + d) % p)));
        let (Some(d), None) = (matches.next(), matches.next()) else {
            return Ok(None);
        };
        alignment.push(HoleAlignment {
            hole: (j + d) % p,
            shifted_hole: j,
            difference: d,
        });
    }
    let k_prime = alignment[0].difference;
    if alignment.iter().any(|a| a.difference != k_prime) {
        return Ok(None);
    }
    Ok(Some(LiftCertificate {
        t,
        width,
        k_prime,
        alignment,
    }))
}

/// Certificates for every level `t <= depth(h)` with `2^t > width`.
///
/// Returns `None` as soon as one level admits no alignment. Disagreeing
/// offsets across levels are an internal error.
pub fn certificate_chain(
    family: &BFreeFamily,
    width: usize,
    h: &OdometerElement,
) -> Result<Option<Vec<LiftCertificate>>> {
    let first = (1..=h.depth())
        .find(|&t| (1u64 << t) > width as u64)
        .ok_or(Error::LevelTooShallow {
            level: h.depth(),
            width,
        })?;
    let mut chain = Vec::new();
    for t in first..=h.depth() {
        match alignment_certificate(family, t, width, h)? {
            None => return Ok(None),
            Some(c) => {
                if let Some(prev) = chain.last() {
                    let prev: &LiftCertificate = prev;
                    if prev.k_prime != c.k_prime {
                        return Err(Error::InconsistentLevels(t as i64));
                    }
                }
                chain.push(c);
            }
        }
    }
    Ok(Some(chain))
}

/// `2^t | n_t − k'`.
pub fn divisibility_check(family: &BFreeFamily, t: usize, n_t: i64, k_prime: i64) -> Result<bool> {
    family.check_level(t)?;
    let diff = n_t as i128 - k_prime as i128;
    Ok(diff.rem_euclid(1i128 << t) == 0)
}

/// All `n ∈ [0, p_t)` with `(I − n + k') mod p_t = I` for the hole set `I` of `A_t`.
pub fn hole_stabilizer(family: &BFreeFamily, t: usize, k_prime: i64) -> Result<BTreeSet<u64>> {
    let p = family.period(t)?;
    let holes = hole_positions(family, t)?;
    let mut is_hole = vec![false; p as usize];
    for &h in &holes {
        is_hole[h as usize] = true;
    }
    let k = k_prime.rem_euclid(p as i64) as u64;
    Ok((0..p)
        .into_par_iter()
        .filter(|&n| {
            holes
                .iter()
                .all(|&h| is_hole[((h + p - n + k) % p) as usize])
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ComplementReason {
    /// `B = {2}`: `eta` alternates, so the shift itself is the complement.
    ShiftIsComplement { positions_checked: usize },
    /// `gcd(b, c) = 1`: every progression `b·i + r`, `1 <= i <= c`, meets a zero of
    /// `eta`, while `eta` vanishes on `b·Z`; a long enough run of ones is impossible.
    CoprimePair {
        b: u64,
        c: u64,
        residues_checked: u64,
    },
    /// All pairwise gcds exceed one: `11` occurs in `eta` but `00` cannot.
    NoCoprimePair { ones_at: i64, min_gcd: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementVerdict {
    pub member: bool,
    pub reason: ComplementReason,
}

fn eta_of_set(set: &[u64], n: i64) -> u8 {
    u8::from(!set.iter().any(|&b| n.unsigned_abs().is_multiple_of(b)))
}

/// Boolean complement membership in the automorphism group for an explicit finite primitive set.
pub fn complement_membership_literal(set: &[u64]) -> Result<ComplementVerdict> {
    if let Some(&d) = set.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidDivisor(d));
    }
    let mut set = set.to_vec();
    set.sort_unstable();
    for (i, &x) in set.iter().enumerate() {
        if set[i + 1..].iter().any(|&y| y % x == 0) {
            return Err(Error::NotPrimitive(set));
        }
    }
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty set".into()));
    }
    if set == [2] {
        let range = -64i64..64;
        for n in range.clone() {
            if eta_of_set(&set, n + 1) != 1 - eta_of_set(&set, n) {
                return Err(Error::InconsistentLevels(n));
            }
        }
        return Ok(ComplementVerdict {
            member: true,
            reason: ComplementReason::ShiftIsComplement {
                positions_checked: range.count(),
            },
        });
    }
    let pair = set
        .iter()
        .enumerate()
        .flat_map(|(i, &b)| set[i + 1..].iter().map(move |&c| (b, c)))
        .find(|(b, c)| b.gcd(c) == 1);
    if let Some((b, c)) = pair {
        // For each r mod c some i in [1, c] makes c | b·i + r.
        for r in 0..c {
            let found = (1..=c as i64).any(|i| {
                let n = b as i64 * i + r as i64;
                n % c as i64 == 0 && eta_of_set(&set, n) == 0
            });
            if !found {
                return Err(Error::InconsistentLevels(r as i64));
            }
        }
        return Ok(ComplementVerdict {
            member: false,
            reason: ComplementReason::CoprimePair {
                b,
                c,
                residues_checked: c,
            },
        });
    }
    let min_gcd = min_pairwise_gcd(&set);
    let span = 4 * *set.last().unwrap() as i64;
    let ones_at =
        find_pattern(|n| eta_of_set(&set, n), span, [1, 1]).ok_or(Error::InconsistentLevels(0))?;
    if find_pattern(|n| eta_of_set(&set, n), span, [0, 0]).is_some() {
        return Err(Error::InconsistentLevels(0));
    }
    Ok(ComplementVerdict {
        member: false,
        reason: ComplementReason::NoCoprimePair { ones_at, min_gcd },
    })
}

/// The same criterion for the infinite family `{2^i·b_i}`: every element is even,
/// so no coprime pair exists and `00` never occurs while `11` does.
pub fn complement_membership(family: &BFreeFamily) -> Result<ComplementVerdict> {
    let span = 3i64 << (family.depth() + 1).min(40);
    let window = family.eta_window(0, span)?;
    let ones_at = find_pattern(|n| window.get(n).unwrap(), span, [1, 1])
        .ok_or(Error::InconsistentLevels(0))?;
    if find_pattern(|n| window.get(n).unwrap(), span, [0, 0]).is_some() {
        return Err(Error::InconsistentLevels(0));
    }
    Ok(ComplementVerdict {
        member: false,
        reason: ComplementReason::NoCoprimePair {
            ones_at,
            min_gcd: min_pairwise_gcd(family.elements()),
        },
    })
}

fn min_pairwise_gcd(set: &[u64]) -> u64 {
    set.iter()
        .enumerate()
        .flat_map(|(i, &b)| set[i..].iter().map(move |&c| b.gcd(&c)))
        .min()
        .unwrap_or(0)
}

fn find_pattern(eta: impl Fn(i64) -> u8, span: i64, pattern: [u8; 2]) -> Option<i64> {
    (0..span - 1).find(|&n| eta(n) == pattern[0] && eta(n + 1) == pattern[1])
}
