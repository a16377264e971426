//! The family `B = {2^i·b_i}` and its characteristic sequence of B-free integers.
//!
//! Only finitely many generators `b_1..b_T` are ever known, but `eta_at` stays
//! exact: a generator `2^i·b_i` can divide `n != 0` only if `2^i | n` and
//! `2^i·b_i <= |n|`, so deeper, unknown generators are ruled out whenever
//! `v_2(n) <= T` or `|n| < 3·2^(T+1)`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{multiples_density, DensityReport};
use crate::error::{Error, Result};
use crate::word::SymbolWindow;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFreeFamily {
    generators: Vec<u64>,
    /// `2^i·b_i` for `i = 1..=T`.
    elements: Vec<u64>,
    /// `p_t = 2^t·b_1⋯b_t` for every `t` whose value fits in an `i64`.
    periods: Vec<u64>,
}

impl BFreeFamily {
    /// Validates odd, `> 1`, pairwise coprime generators.
    pub fn new(generators: &[u64]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (i, &b) in generators.iter().enumerate() {
            if b <= 1 {
                return Err(Error::NotGreaterThanOne {
                    index: i + 1,
                    value: b,
                });
            }
            if b % 2 == 0 {
                return Err(Error::NotOdd {
                    index: i + 1,
                    value: b,
                });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].gcd(&generators[j]) != 1 {
                    return Err(Error::NotCoprime(i + 1, j + 1));
                }
            }
        }
        let elements = generators
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                1u64.checked_shl(i as u32 + 1)
                    .filter(|_| i < 62)
                    .and_then(|two| two.checked_mul(b))
                    .filter(|&e| e <= i64::MAX as u64)
                    .ok_or(Error::Overflow("family element 2^i·b_i"))
            })
            .collect::<Result<Vec<u64>>>()?;
        let mut periods = Vec::with_capacity(generators.len());
        let mut p = 1u64;
        for &b in generators {
            match p.checked_mul(2 * b).filter(|&v| v <= i64::MAX as u64) {
                Some(v) => {
                    p = v;
                    periods.push(v);
                }
                None => break,
            }
        }
        Ok(Self {
            generators: generators.to_vec(),
            elements,
            periods,
        })
    }

    /// The family built from the first `depth` odd primes.
    pub fn odd_primes(depth: usize) -> Result<Self> {
        let mut primes = Vec::with_capacity(depth);
        let mut candidate = 3u64;
        while primes.len() < depth {
            if primes
                .iter()
                .take_while(|&&p| p * p <= candidate)
                .all(|&p| !candidate.is_multiple_of(p))
            {
                primes.push(candidate);
            }
            candidate += 2;
        }
        Self::new(&primes)
    }

    /// Number of known generators `T`.
    pub fn depth(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// `b_i`, 1-based.
    pub fn generator(&self, i: usize) -> Result<u64> {
        self.check_level(i)?;
        Ok(self.generators[i - 1])
    }

    /// `2^i·b_i`, 1-based.
    pub fn element(&self, i: usize) -> Result<u64> {
        self.check_level(i)?;
        Ok(self.elements[i - 1])
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// `p_t = 2^t·b_1⋯b_t`.
    pub fn period(&self, t: usize) -> Result<u64> {
        self.check_level(t)?;
        self.periods
            .get(t - 1)
            .copied()
            .ok_or(Error::Overflow("period p_t"))
    }

    pub(crate) fn check_level(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: t,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    /// Whether the known generators decide `eta(n)` exactly.
    pub fn decides(&self, n: i64) -> bool {
        if n == 0 {
            return true;
        }
        let depth = self.depth() as u32;
        if n.trailing_zeros() <= depth {
            return true;
        }
        // Any deeper generator is at least 3·2^(T+1).
        let smallest_unknown = 3u128 << (depth + 1).min(126);
        (n.unsigned_abs() as u128) < smallest_unknown
    }

    /// `1` if `n` is B-free, `0` otherwise; `eta(0) = 0`.
    pub fn eta_at(&self, n: i64) -> Result<u8> {
        if !self.decides(n) {
            return Err(Error::DepthInsufficient(n));
        }
        Ok(self.eta_unchecked(n))
    }

    fn eta_unchecked(&self, n: i64) -> u8 {
        if n == 0 {
            return 0;
        }
        let v = (n.trailing_zeros() as usize).min(self.depth());
        let a = n.unsigned_abs();
        if self.elements[..v].iter().any(|&e| a.is_multiple_of(e)) {
            0
        } else {
            1
        }
    }

    /// `eta` on `[lo, hi)`.
    pub fn eta_window(&self, lo: i64, hi: i64) -> Result<SymbolWindow> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty range {lo}..{hi}")));
        }
        if let Some(bad) = (lo..hi).find(|&n| !self.decides(n)) {
            return Err(Error::DepthInsufficient(bad));
        }
        SymbolWindow::new(lo, (lo..hi).map(|n| self.eta_unchecked(n)).collect())
    }

    /// A period `s` with `eta(n + k·s) = eta(n)` for every `k`.
    pub fn period_certificate(&self, n: i64) -> Result<PeriodCertificate> {
        if self.eta_at(n)? == 0 {
            let a = n.unsigned_abs();
            let j = (1..=self.depth())
                .find(|&j| a.is_multiple_of(self.elements[j - 1]))
                .expect("eta(n) = 0 has a dividing element");
            Ok(PeriodCertificate {
                position: n,
                period: self.period(j)?,
                kind: CertificateKind::Zero { witness: j },
            })
        } else {
            let a = n.trailing_zeros() as usize;
            if a + 1 > self.depth() {
                return Err(Error::DepthInsufficient(n));
            }
            Ok(PeriodCertificate {
                position: n,
                period: self.period(a + 1)?,
                kind: CertificateKind::One {
                    valuation: a as u32,
                },
            })
        }
    }

    /// Densities of the first `t` elements and of each single removal.
    pub fn taut_check_truncated(&self, t: usize) -> Result<TautReport> {
        self.check_level(t)?;
        let elements = &self.elements[..t];
        for (i, &x) in elements.iter().enumerate() {
            for (j, &y) in elements.iter().enumerate() {
                if i != j && y % x == 0 {
                    return Err(Error::NotPrimitive(elements.to_vec()));
                }
            }
        }
        let base = multiples_density(elements)?;
        let removals = (0..t)
            .map(|skip| {
                let rest: Vec<u64> = elements
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &e)| e)
                    .collect();
                multiples_density(&rest)
            })
            .collect::<Result<Vec<_>>>()?;
        let is_taut_at_t = removals.iter().all(|r| r.density < base.density);
        Ok(TautReport {
            t,
            base,
            removals,
            is_taut_at_t,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CertificateKind {
    /// `2^j·b_j | n` for the least such `j`; the period is `p_j`.
    Zero { witness: usize },
    /// `n = 2^a·m` with `m` odd; the period is `p_(a+1)`.
    One { valuation: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodCertificate {
    pub position: i64,
    pub period: u64,
    pub kind: CertificateKind,
}

impl PeriodCertificate {
    /// Checks `eta(n + k·s) = eta(n)` for `|k| <= max_k`, skipping positions the
    /// family cannot decide. Returns the number of positions compared, or the
    /// first `k` that breaks periodicity.
    pub fn verify(
        &self,
        family: &BFreeFamily,
        max_k: i64,
    ) -> Result<std::result::Result<usize, i64>> {
        let value = family.eta_at(self.position)?;
        let s = self.period as i64;
        let mut checked = 0;
        for k in -max_k..=max_k {
            let Some(n) = k.checked_mul(s).and_then(|d| d.checked_add(self.position)) else {
                continue;
            };
            if !family.decides(n) {
                continue;
            }
            if family.eta_unchecked(n) != value {
                return Ok(Err(k));
            }
            checked += 1;
        }
        Ok(Ok(checked))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TautReport {
    pub t: usize,
    pub base: DensityReport,
    /// `removals[i]` drops the element `2^(i+1)·b_(i+1)`.
    pub removals: Vec<DensityReport>,
    pub is_taut_at_t: bool,
}
