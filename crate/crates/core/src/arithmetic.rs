//! Exact integer algebra: linear congruences, intersections of arithmetic
//! progressions, interval counts and densities of finite sets of multiples.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// `modulus·Z + residue` with `0 <= residue < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Progression {
    modulus: u64,
    residue: u64,
}

impl Progression {
    /// Builds `modulus·Z + residue`; negative moduli and residues are normalized.
    pub fn new(modulus: i64, residue: i64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument(
                "progression modulus must be nonzero".into(),
            ));
        }
        let m = modulus.unsigned_abs();
        Ok(Self::normalized(m, residue as i128))
    }

    fn normalized(modulus: u64, residue: i128) -> Self {
        let residue = residue.rem_euclid(modulus as i128) as u64;
        Self { modulus, residue }
    }

    /// The multiples `modulus·Z`.
    pub fn multiples(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument(
                "progression modulus must be nonzero".into(),
            ));
        }
        Ok(Self {
            modulus,
            residue: 0,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn contains(&self, n: i64) -> bool {
        (n as i128).rem_euclid(self.modulus as i128) as u64 == self.residue
    }
}

/// Smallest non-negative `x` with `a·x ≡ b (mod |m|)`, if one exists.
///
/// A solution exists iff `gcd(a, m) | b`; the returned value lies in
/// `[0, |m| / gcd(a, m))`, which determines the full solution class.
///
/// Panics when `a == 0` or `m == 0`.
pub fn solve_congruence(a: i64, b: i64, m: i64) -> Option<i64> {
    assert!(a != 0 && m != 0, "solve_congruence needs nonzero a and m");
    let m = i128::from(m).abs();
    let a = i128::from(a).rem_euclid(m);
    let b = i128::from(b);
    let ext = a.extended_gcd(&m);
    let g = ext.gcd;
    if b % g != 0 {
        return None;
    }
    let step = m / g;
    let x = (ext.x.rem_euclid(step) * (b / g).rem_euclid(step)).rem_euclid(step);
    Some(x as i64)
}

/// `(a·Z + r) ∩ b·Z`, empty exactly when `gcd(a, b) ∤ r`.
pub fn intersect_progressions(p: Progression, b: u64) -> Result<Option<Progression>> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "progression modulus must be nonzero".into(),
        ));
    }
    let a = p.modulus;
    if !p.residue.is_multiple_of(a.gcd(&b)) {
        return Ok(None);
    }
    let l = checked_lcm(a, b)?;
    // b·s ≡ r (mod a); both fit in i64 after the lcm check only when a, b do.
    let (bi, ri, ai) = (to_i64(b)?, to_i64(p.residue)?, to_i64(a)?);
    let s = solve_congruence(bi, ri, ai).expect("gcd divides residue");
    let first = (b as u128 * s as u128) % l as u128;
    Ok(Some(Progression {
        modulus: l,
        residue: first as u64,
    }))
}

/// Number of elements of `p` in the half-open interval `[lo, hi)`.
pub fn count_in_interval(p: Progression, lo: i64, hi: i64) -> u64 {
    if hi <= lo {
        return 0;
    }
    let a = p.modulus as i128;
    let r = p.residue as i128;
    let below = |x: i128| (x - r).div_euclid(a);
    (below(hi as i128 - 1) - below(lo as i128 - 1)) as u64
}

/// Number of elements of `p` in `[0, m·modulus)`; always `m`.
pub fn count_in_periods(p: Progression, m: u64) -> Result<u64> {
    let hi = m
        .checked_mul(p.modulus)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or(Error::Overflow("interval end"))?;
    Ok(count_in_interval(p, 0, hi))
}

pub fn checked_lcm(a: u64, b: u64) -> Result<u64> {
    (a / a.gcd(&b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

fn to_i64(v: u64) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow("signed conversion"))
}

/// Exact density of the multiples of a finite divisor set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub divisors: Vec<u64>,
    /// lcm of the divisors; the set of multiples is periodic with this period.
    pub period: u64,
    pub multiples_in_period: u64,
    #[serde(with = "ratio_json")]
    pub density: Rational,
}

/// Subsets are enumerated explicitly, so the divisor list is capped.
pub const MAX_DENSITY_DIVISORS: usize = 24;

/// Density of `∪ dZ` over `d ∈ divisors`, by inclusion–exclusion over subset lcms.
pub fn multiples_density(divisors: &[u64]) -> Result<DensityReport> {
    if let Some(&d) = divisors.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidDivisor(d));
    }
    if divisors.len() > MAX_DENSITY_DIVISORS {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_DENSITY_DIVISORS} divisors are supported"
        )));
    }
    let period = divisors
        .iter()
        .try_fold(1u64, |acc, &d| checked_lcm(acc, d))?;

    // Every subset lcm divides `period`, so no further overflow is possible.
    fn walk(divisors: &[u64], lcm: u64, size: usize, period: u64, acc: &mut i128) {
        for (i, &d) in divisors.iter().enumerate() {
            let l = lcm / lcm.gcd(&d) * d;
            let term = (period / l) as i128;
            if (size + 1) % 2 == 1 {
                *acc += term;
            } else {
                *acc -= term;
            }
            walk(&divisors[i + 1..], l, size + 1, period, acc);
        }
    }
    let mut count = 0i128;
    walk(divisors, 1, 0, period, &mut count);
    assert!(
        (0..=period as i128).contains(&count),
        "inclusion-exclusion count {count} outside [0, {period}]"
    );
    let multiples_in_period = count as u64;
    Ok(DensityReport {
        divisors: divisors.to_vec(),
        period,
        multiples_in_period,
        density: Rational::new(multiples_in_period, period),
    })
}

/// Serializes a rational as `{"num": .., "den": ..}`.
pub mod ratio_json {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        num: u64,
        den: u64,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Parts {
            num: *r.numer(),
            den: *r.denom(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let p = Parts::deserialize(d)?;
        if p.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational::new(p.num, p.den))
    }
}
