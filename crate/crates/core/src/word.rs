//! Finite words over `{0, 1}` and `{0, 1, _}` anchored at an absolute index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite piece of a two-sided `{0,1}` sequence: `symbols[i]` is the value at `start + i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolWindow {
    start: i64,
    symbols: Vec<u8>,
}

impl SymbolWindow {
    pub fn new(start: i64, symbols: Vec<u8>) -> Result<Self> {
        if let Some(bad) = symbols.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidArgument(format!(
                "symbol {bad} is not binary"
            )));
        }
        Ok(Self { start, symbols })
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(start: i64, word: &str) -> Result<Self> {
        let symbols = word
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!(
                    "unexpected symbol {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { start, symbols })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last absolute index.
    pub fn end(&self) -> i64 {
        self.start + self.symbols.len() as i64
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.start && n < self.end()
    }

    pub fn get(&self, n: i64) -> Option<u8> {
        if self.contains(n) {
            Some(self.symbols[(n - self.start) as usize])
        } else {
            None
        }
    }

    /// The sub-window `[lo, hi)`, clipped to what is available.
    pub fn slice(&self, lo: i64, hi: i64) -> SymbolWindow {
        let lo = lo.max(self.start);
        let hi = hi.min(self.end()).max(lo);
        let a = (lo - self.start) as usize;
        let b = (hi - self.start) as usize;
        SymbolWindow {
            start: lo,
            symbols: self.symbols[a..b].to_vec(),
        }
    }

    pub fn complement(&self) -> SymbolWindow {
        SymbolWindow {
            start: self.start,
            symbols: self.symbols.iter().map(|s| 1 - s).collect(),
        }
    }

    /// Smallest `p < len` with `x(n) = x(n + p)` throughout the window.
    pub fn least_period(&self) -> Option<usize> {
        let w = &self.symbols;
        (1..w.len()).find(|&p| (0..w.len() - p).all(|i| w[i] == w[i + p]))
    }
}

impl fmt::Display for SymbolWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(if *s == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A cell of a skeleton block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cell {
    Zero,
    One,
    Hole,
}

impl Cell {
    pub fn from_bit(bit: u8) -> Cell {
        if bit == 0 {
            Cell::Zero
        } else {
            Cell::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            Cell::Zero => Some(0),
            Cell::One => Some(1),
            Cell::Hole => None,
        }
    }

    pub fn is_hole(self) -> bool {
        self == Cell::Hole
    }

    pub fn to_char(self) -> char {
        match self {
            Cell::Zero => '0',
            Cell::One => '1',
            Cell::Hole => '_',
        }
    }

    pub fn from_char(c: char) -> Option<Cell> {
        match c {
            '0' => Some(Cell::Zero),
            '1' => Some(Cell::One),
            '_' => Some(Cell::Hole),
            _ => None,
        }
    }
}

pub fn cells_to_string(cells: &[Cell]) -> String {
    cells.iter().map(|c| c.to_char()).collect()
}

pub fn parse_cells(s: &str) -> Result<Vec<Cell>> {
    s.chars()
        .map(|c| {
            Cell::from_char(c).ok_or_else(|| Error::InvalidArgument(format!("bad cell {c:?}")))
        })
        .collect()
}
