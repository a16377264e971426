//! The odometer `G = lim Z/p_t Z`, truncated to a finite depth.
//!
//! Everything here is stated "at depth": membership in `G_1`/`G_2` is a limit
//! notion, and this module only ever inspects levels `1..=depth`.

use serde::{Deserialize, Serialize};

use crate::arithmetic::Rational;
use crate::bfree::BFreeFamily;
use crate::error::{Error, Result};
use crate::toeplitz::{hole_positions, skeleton_exact, SkeletonBlock};
use crate::word::Cell;

/// A compatible residue vector `(n_1, …, n_T)` with `n_(t+1) ≡ n_t (mod p_t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ElementJson", try_from = "ElementJson")]
pub struct OdometerElement {
    residues: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    depth: usize,
    residues: Vec<u64>,
}

impl From<OdometerElement> for ElementJson {
    fn from(g: OdometerElement) -> Self {
        ElementJson {
            depth: g.residues.len(),
            residues: g.residues,
        }
    }
}

impl TryFrom<ElementJson> for OdometerElement {
    type Error = Error;

    fn try_from(j: ElementJson) -> Result<Self> {
        if j.depth != j.residues.len() {
            return Err(Error::DepthMismatch(j.depth, j.residues.len()));
        }
        Ok(OdometerElement {
            residues: j.residues,
        })
    }
}

impl OdometerElement {
    pub fn depth(&self) -> usize {
        self.residues.len()
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// `n_t`, 1-based.
    pub fn coordinate(&self, t: usize) -> u64 {
        self.residues[t - 1]
    }
}

/// The moduli `p_1 | p_2 | … | p_T` of a truncated odometer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Odometer {
    moduli: Vec<u64>,
}

impl Odometer {
    pub fn new(family: &BFreeFamily, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::LevelOutOfRange {
                level: 0,
                depth: family.depth(),
            });
        }
        let moduli = (1..=depth)
            .map(|t| family.period(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { moduli })
    }

    pub fn depth(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Validates ranges and compatibility of an explicit residue vector.
    pub fn element(&self, residues: Vec<u64>) -> Result<OdometerElement> {
        if residues.len() != self.depth() {
            return Err(Error::DepthMismatch(self.depth(), residues.len()));
        }
        for (t, (&n, &p)) in residues.iter().zip(&self.moduli).enumerate() {
            if n >= p {
                return Err(Error::IncompatibleResidues(t + 1));
            }
            if t > 0 && n % self.moduli[t - 1] != residues[t - 1] {
                return Err(Error::IncompatibleResidues(t + 1));
            }
        }
        Ok(OdometerElement { residues })
    }

    pub fn from_integer(&self, n: i64) -> OdometerElement {
        let residues = self
            .moduli
            .iter()
            .map(|&p| (n as i128).rem_euclid(p as i128) as u64)
            .collect();
        OdometerElement { residues }
    }

    pub fn zero(&self) -> OdometerElement {
        self.from_integer(0)
    }

    fn check(&self, g: &OdometerElement) -> Result<()> {
        if g.depth() != self.depth() {
            return Err(Error::DepthMismatch(self.depth(), g.depth()));
        }
        Ok(())
    }

    pub fn add(&self, g: &OdometerElement, h: &OdometerElement) -> Result<OdometerElement> {
        self.check(g)?;
        self.check(h)?;
        let residues = g
            .residues
            .iter()
            .zip(&h.residues)
            .zip(&self.moduli)
            .map(|((&a, &b), &p)| ((a as u128 + b as u128) % p as u128) as u64)
            .collect();
        Ok(OdometerElement { residues })
    }

    pub fn neg(&self, g: &OdometerElement) -> Result<OdometerElement> {
        self.check(g)?;
        let residues = g
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &p)| (p - a) % p)
            .collect();
        Ok(OdometerElement { residues })
    }

    /// Translation by `1̄`.
    pub fn translate(&self, g: &OdometerElement) -> Result<OdometerElement> {
        self.add(g, &self.from_integer(1))
    }

    /// `max{1/(i+1) : n_i != n'_i}`, zero for equal elements.
    pub fn metric(&self, g: &OdometerElement, h: &OdometerElement) -> Result<Rational> {
        self.check(g)?;
        self.check(h)?;
        Ok(g.residues
            .iter()
            .zip(&h.residues)
            .position(|(a, b)| a != b)
            .map_or(Rational::new(0, 1), |i| Rational::new(1, i as u64 + 2)))
    }
}

/// `A_t(g)`: the skeleton `A_t` read cyclically from `n_t`.
pub fn shifted_skeleton(
    family: &BFreeFamily,
    t: usize,
    g: &OdometerElement,
) -> Result<SkeletonBlock> {
    if t == 0 || t > g.depth() {
        return Err(Error::LevelOutOfRange {
            level: t,
            depth: g.depth(),
        });
    }
    Ok(skeleton_exact(family, t)?.rotated(g.coordinate(t)))
}

/// Hole positions of `A_t(g)`: `{(I − n_t) mod p_t}`, sorted.
pub fn shifted_holes(family: &BFreeFamily, t: usize, n_t: u64) -> Result<Vec<u64>> {
    let p = family.period(t)?;
    let mut holes: Vec<u64> = hole_positions(family, t)?
        .into_iter()
        .map(|i| (i as i128 - n_t as i128).rem_euclid(p as i128) as u64)
        .collect();
    holes.sort_unstable();
    Ok(holes)
}

fn is_hole(family: &BFreeFamily, t: usize, n: u64) -> Result<bool> {
    let two_t = 1u64 << t;
    Ok(n.is_multiple_of(two_t)
        && family.generators()[..t]
            .iter()
            .all(|b| !n.is_multiple_of(*b))
        && n < family.period(t)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Every coordinate sits on a hole of its level.
    pub in_g2: bool,
    /// Smallest-magnitude `m` with `g + m̄` in `G_2` at this depth, if any within the bound.
    pub g1_witness: Option<i64>,
    /// No witness was found within the bound; a claim about this depth only.
    pub in_g0_at_depth: bool,
    pub shift_bound: u64,
}

/// The default witness bound: translates shorter than the hole spacing `2^T`.
pub fn default_shift_bound(depth: usize) -> u64 {
    (1u64 << depth.min(62)) - 1
}

/// Classifies `g` against `G_2` and `G_1 = G_2 + Z·1̄`, trying translates `|m| <= shift_bound`.
pub fn classify_at_depth(
    family: &BFreeFamily,
    g: &OdometerElement,
    shift_bound: u64,
) -> Result<Classification> {
    let depth = g.depth();
    if depth == 0 {
        return Err(Error::LevelOutOfRange { level: 0, depth: 0 });
    }
    let odometer = Odometer::new(family, depth)?;
    odometer.check(g)?;
    let p_top = *odometer.moduli.last().unwrap();
    if shift_bound > p_top {
        return Err(Error::InvalidArgument(format!(
            "shift bound {shift_bound} exceeds p_T = {p_top}"
        )));
    }
    let in_g2_after = |m: i64| -> Result<bool> {
        for t in 1..=depth {
            let p = odometer.moduli[t - 1] as i128;
            let n = (g.coordinate(t) as i128 + m as i128).rem_euclid(p) as u64;
            if !is_hole(family, t, n)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let in_g2 = in_g2_after(0)?;
    let mut g1_witness = None;
    'search: for magnitude in 0..=shift_bound as i64 {
        for m in [magnitude, -magnitude] {
            if in_g2_after(m)? {
                g1_witness = Some(m);
                break 'search;
            }
            if magnitude == 0 {
                break;
            }
        }
    }
    Ok(Classification {
        in_g2,
        g1_witness,
        in_g0_at_depth: g1_witness.is_none(),
        shift_bound,
    })
}

/// Depth-`T` approximation of `x(g)` on `[lo, hi)`: each position takes the
/// value of any level that fills it, and stays a hole if none does.
pub fn point_of(family: &BFreeFamily, g: &OdometerElement, lo: i64, hi: i64) -> Result<Vec<Cell>> {
    if hi < lo {
        return Err(Error::InvalidArgument(format!("empty range {lo}..{hi}")));
    }
    let blocks = (1..=g.depth())
        .map(|t| shifted_skeleton(family, t, g))
        .collect::<Result<Vec<_>>>()?;
    (lo..hi)
        .map(|i| {
            let mut value = Cell::Hole;
            for block in &blocks {
                let c = block.cell(i.rem_euclid(block.period() as i64) as u64);
                match (value, c) {
                    (_, Cell::Hole) => {}
                    (Cell::Hole, filled) => value = filled,
                    (v, filled) if v != filled => return Err(Error::InconsistentLevels(i)),
                    _ => {}
                }
            }
            Ok(value)
        })
        .collect()
}
