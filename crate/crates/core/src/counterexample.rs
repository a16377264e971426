//! A Toeplitz sequence with two holes per level whose language is closed
//! under the Boolean complement.
//!
//! `B_1` is the seed; `B_(t+1) = B_t c_t ~B_t c_t B_t` and
//! `A_t = B_t _ ~B_t _`, so `|A_(t+1)| = 3·|A_t|`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toeplitz::SkeletonBlock;
use crate::word::{Cell, SymbolWindow};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoHoleConstruction {
    seed: Vec<u8>,
    /// `c_1, c_2, …`; level `t + 1` consumes `c_t`.
    bits: Vec<u8>,
    depth: usize,
}

impl TwoHoleConstruction {
    pub fn new(seed: Vec<u8>, bits: Vec<u8>, depth: usize) -> Result<Self> {
        if seed.is_empty() {
            return Err(Error::InvalidArgument("seed block must be nonempty".into()));
        }
        if seed.iter().chain(&bits).any(|&b| b > 1) {
            return Err(Error::InvalidArgument(
                "seed and bits must be binary".into(),
            ));
        }
        if depth == 0 || depth > bits.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "depth {depth} needs 1 <= depth <= {} (bits + 1)",
                bits.len() + 1
            )));
        }
        Ok(Self { seed, bits, depth })
    }

    /// All fill bits zero.
    pub fn with_zero_bits(seed: Vec<u8>, depth: usize) -> Result<Self> {
        Self::new(seed, vec![0; depth.saturating_sub(1)], depth)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `B_1, …, B_depth`.
    pub fn inner_blocks(&self) -> Vec<Vec<u8>> {
        let mut out = vec![self.seed.clone()];
        for t in 1..self.depth {
            let b = &out[t - 1];
            let c = self.bits[t - 1];
            let not_b: Vec<u8> = b.iter().map(|x| 1 - x).collect();
            let mut next = Vec::with_capacity(3 * b.len() + 2);
            next.extend_from_slice(b);
            next.push(c);
            next.extend_from_slice(&not_b);
            next.push(c);
            next.extend_from_slice(b);
            out.push(next);
        }
        out
    }

    /// `A_1, …, A_depth`, after checking refinement and the fill ratio of each level.
    pub fn build_blocks(&self) -> Result<Vec<SkeletonBlock>> {
        let blocks: Vec<SkeletonBlock> = self
            .inner_blocks()
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                let mut cells: Vec<Cell> = b.iter().map(|&x| Cell::from_bit(x)).collect();
                cells.push(Cell::Hole);
                cells.extend(b.iter().map(|&x| Cell::from_bit(1 - x)));
                cells.push(Cell::Hole);
                SkeletonBlock::from_cells(i + 1, cells)
            })
            .collect();
        for (i, block) in blocks.iter().enumerate() {
            if block.holes().len() != 2 || block.filled() as u64 != block.period() - 2 {
                return Err(Error::InconsistentLevels(i as i64 + 1));
            }
            if let Some(next) = blocks.get(i + 1) {
                if next.period() != 3 * block.period() || !block.refined_by(next) {
                    return Err(Error::InconsistentLevels(i as i64 + 2));
                }
            }
        }
        Ok(blocks)
    }

    /// The sequence on `[lo, hi)`; every position must be filled by some level.
    pub fn window_of(&self, lo: i64, hi: i64) -> Result<SymbolWindow> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty range {lo}..{hi}")));
        }
        let blocks = self.build_blocks()?;
        let symbols = (lo..hi)
            .map(|i| {
                let mut value = None;
                for block in &blocks {
                    if let Some(bit) = block.cell(i.rem_euclid(block.period() as i64) as u64).bit()
                    {
                        match value {
                            None => value = Some(bit),
                            Some(v) if v != bit => return Err(Error::InconsistentLevels(i)),
                            _ => {}
                        }
                    }
                }
                value.ok_or(Error::DepthInsufficient(i))
            })
            .collect::<Result<Vec<u8>>>()?;
        SymbolWindow::new(lo, symbols)
    }

    /// The longest run filled at the top level: `B_depth` at `[0, |B_depth|)`.
    pub fn span(&self) -> Result<SymbolWindow> {
        let len = self.inner_blocks().last().map_or(0, Vec::len);
        self.window_of(0, len as i64)
    }

    /// Whether every length-`word_len` factor of the span has its complement as a factor.
    ///
    /// The span must be at least `4·|A_level|` long.
    pub fn complement_closure_check(&self, word_len: usize, level: usize) -> Result<bool> {
        if level == 0 || level > self.depth {
            return Err(Error::LevelOutOfRange {
                level,
                depth: self.depth,
            });
        }
        let span = self.span()?;
        let q_level = 2 * self.inner_blocks()[level - 1].len() + 2;
        let need = 4 * q_level;
        if span.len() < need.max(word_len) {
            return Err(Error::WindowTooShort {
                have: span.len(),
                need: need.max(word_len),
            });
        }
        let factors: HashSet<&[u8]> = span.symbols().windows(word_len).collect();
        Ok(factors.iter().all(|w| {
            let flipped: Vec<u8> = w.iter().map(|x| 1 - x).collect();
            factors.contains(flipped.as_slice())
        }))
    }

    /// A period of the span no longer than half its length, if one exists.
    pub fn apparent_period(&self) -> Result<Option<usize>> {
        let span = self.span()?;
        Ok(span.least_period().filter(|&p| 2 * p <= span.len()))
    }
}
