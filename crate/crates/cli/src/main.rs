mod commands;
mod render;

use std::ops::Range;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bfree_core::BFreeFamily;

#[derive(Parser, Debug)]
#[command(
    name = "bfree",
    version,
    about = "B-free Toeplitz sequences and their automorphisms"
)]
pub struct Cli {
    /// Output format; defaults to text for `gen` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Odd, pairwise coprime generators b_1,b_2,... [default: 3,5,7]
    #[arg(long = "b", value_delimiter = ',', conflicts_with = "primes")]
    pub b: Option<Vec<u64>>,

    /// Use the first N odd primes as generators instead of --b.
    #[arg(long)]
    pub primes: Option<usize>,
}

impl FamilyArgs {
    pub fn family(&self) -> bfree_core::Result<BFreeFamily> {
        self.family_or(|| BFreeFamily::new(&[3, 5, 7]))
    }

    /// The family from the flags, or `fallback` when neither flag is given.
    pub fn family_or(
        &self,
        fallback: impl FnOnce() -> bfree_core::Result<BFreeFamily>,
    ) -> bfree_core::Result<BFreeFamily> {
        match (&self.b, self.primes) {
            (_, Some(n)) => BFreeFamily::odd_primes(n),
            (Some(b), None) => BFreeFamily::new(b),
            (None, None) => fallback(),
        }
    }
}

/// Parses `lo..hi` (half-open; negative bounds allowed).
pub fn parse_range(s: &str) -> Result<Range<i64>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    if hi < lo {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..hi)
}

/// A binary word given as `0110` or `0,1,1,0`.
#[derive(Clone, Debug, Default)]
pub struct Bits(pub Vec<u8>);

fn parse_bits(s: &str) -> Result<Bits, String> {
    s.chars()
        .filter(|c| *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(format!("not a bit: {other:?}")),
        })
        .collect::<Result<_, _>>()
        .map(Bits)
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print eta on a window.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Range<i64>,
    },
    /// The skeleton A_t as a "01_" block.
    Skeleton {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
    },
    /// Hole positions of A_t.
    Holes {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
    },
    /// Minimal cyclic distance between holes of A_t.
    Gaps {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
    },
    /// Residues n in [0, p_t) whose rotation by n - k' fixes the hole set.
    Stabilizer {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
        #[arg(long = "kprime", allow_hyphen_values = true)]
        k_prime: i64,
    },
    /// Witness that a period s < p_t misses a p_t-periodic position.
    Essential {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        s: u64,
    },
    /// Local period certificate for eta(n).
    Certificate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Exact density of the multiples of a finite set.
    Density {
        #[arg(long, value_delimiter = ',', required = true)]
        divisors: Vec<u64>,
    },
    /// Densities of the first t elements and of each single removal.
    Taut {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: usize,
    },
    /// Enumerate sliding block codes and keep those consistent with the language.
    Autosearch(SearchArgs),
    /// Blocks, span and complement closure of the two-hole construction.
    Counterexample {
        #[command(flatten)]
        construction: ConstructionArgs,
        /// Check complement closure for word lengths 1..=L.
        #[arg(long)]
        closure: Option<usize>,
        /// Level whose period sizes the closure check (default depth - 2).
        #[arg(long)]
        level: Option<usize>,
    },
    /// Odometer element at a finite depth: coordinates, classification, point.
    Odometer {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        depth: usize,
        /// The element is the image of this integer.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "residues")]
        n: Option<i64>,
        /// Explicit compatible residues n_1,...,n_T.
        #[arg(long, value_delimiter = ',')]
        residues: Option<Vec<u64>>,
        /// Largest translate tried when looking for a G_1 witness.
        #[arg(long)]
        shift_bound: Option<u64>,
        /// Also print the depth-T approximation of the point on lo..hi.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        point: Option<Range<i64>>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ConstructionArgs {
    #[arg(long, value_parser = parse_bits, default_value = "1")]
    pub seed: Bits,
    /// Fill bits c_1,c_2,...; missing bits are zero.
    #[arg(long, value_parser = parse_bits)]
    pub bits: Option<Bits>,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Eta,
    Counterexample,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value = "eta")]
    pub source: Source,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Code width k.
    #[arg(long, default_value_t = 1)]
    pub width: usize,
    /// Window half-width; defaults to 5·p_3 (or the whole span for the construction).
    /// Without --b or --primes, eta comes from the first 17 odd primes, which
    /// agree with 3,5,7 on the first three levels and decide eta on that window.
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long, value_parser = parse_anchors, allow_hyphen_values = true, default_value = "0..=0")]
    pub anchors: std::ops::RangeInclusive<i64>,
    #[arg(long, default_value_t = 24)]
    pub horizon: usize,
    #[arg(long, env = "BFREE_SEARCH_BUDGET", default_value_t = 1_000_000)]
    pub budget: u64,
}

/// Parses `lo..=hi` or `lo..hi` into an inclusive anchor range.
fn parse_anchors(s: &str) -> Result<std::ops::RangeInclusive<i64>, String> {
    if let Some((lo, hi)) = s.split_once("..=") {
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad anchor {lo:?}: {e}"))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad anchor {hi:?}: {e}"))?;
        return Ok(lo..=hi);
    }
    let r = parse_range(s)?;
    if r.is_empty() {
        return Err(format!("empty anchor range {s:?}"));
    }
    Ok(r.start..=r.end - 1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
