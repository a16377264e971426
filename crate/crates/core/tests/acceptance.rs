//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails or overruns its time limit.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bfree_core::arithmetic::{intersect_progressions, solve_congruence, Progression, Rational};
use bfree_core::automorphism::{
    complement_membership, complement_membership_literal, divisibility_check, endomorphism_search,
    hole_stabilizer, CodeClass, ComplementReason, SearchParams, SlidingCode,
};
use bfree_core::counterexample::TwoHoleConstruction;
use bfree_core::odometer::{shifted_holes, shifted_skeleton, Odometer};
use bfree_core::toeplitz::{
    essential_check, hole_count_formula, hole_positions, per_set_brute, regularity_ratio,
    residue_classes_of_holes, sh_gap, skeleton_brute, skeleton_exact,
};
use bfree_core::BFreeFamily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn small() -> BFreeFamily {
    BFreeFamily::new(&[3, 5, 7]).unwrap()
}

/// First odd primes as generators: agrees with `[3, 5, 7]` on levels 1..=3
/// and decides `eta` on windows far beyond `p_3`.
fn deep() -> BFreeFamily {
    BFreeFamily::odd_primes(17).unwrap()
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Holes of `A_t` by scanning divisibility directly.
fn holes_by_scan(gens: &[u64], t: usize) -> Vec<u64> {
    let p: u64 = (1u64 << t) * gens[..t].iter().product::<u64>();
    (0..p)
        .filter(|&s| s % (1 << t) == 0 && gens[..t].iter().all(|&b| s % b != 0))
        .collect()
}

fn scan_eta(set: &[u64], n: i64) -> u8 {
    u8::from(set.iter().all(|&b| n.rem_euclid(b as i64) != 0))
}

fn c1_hole_count() -> Outcome {
    const K: usize = 200;
    let family = deep();
    let mut counts = Vec::new();
    for (t, expected) in [(1usize, 2usize), (2, 8), (3, 48)] {
        let exact = skeleton_exact(&small(), t).map_err(err)?;
        ensure!(
            exact.holes().len() == expected,
            "t={t}: exact count {}",
            exact.holes().len()
        );
        ensure!(
            hole_count_formula(&small(), t).map_err(err)? == expected as u64,
            "t={t}: formula"
        );
        let p = family.period(t).map_err(err)?;
        let radius = (K as i64 + 1) * p as i64;
        let window = family.eta_window(-radius, radius).map_err(err)?;
        let brute = skeleton_brute(&window, t, p, K).map_err(err)?;
        ensure!(brute == exact, "t={t}: brute skeleton differs from exact");
        let per = per_set_brute(&window, p, K).map_err(err)?;
        ensure!(
            per.len() + expected == p as usize,
            "t={t}: Per set size {}",
            per.len()
        );
        counts.push(expected);
    }
    Ok(format!("counts {counts:?}, brute K={K} agrees"))
}

fn c2_hole_positions() -> Outcome {
    let family = small();
    let h1 = hole_positions(&family, 1).map_err(err)?;
    let h2 = hole_positions(&family, 2).map_err(err)?;
    ensure!(h1 == [2, 4], "t=1: {h1:?}");
    ensure!(h2 == [4, 8, 16, 28, 32, 44, 52, 56], "t=2: {h2:?}");
    for t in 1..=3 {
        let got = hole_positions(&family, t).map_err(err)?;
        ensure!(got == holes_by_scan(&[3, 5, 7], t), "t={t}: scan disagrees");
    }
    Ok(format!("t=1 {h1:?}, t=2 {h2:?}"))
}

fn c3_gap_law() -> Outcome {
    let family = small();
    let mut gaps = Vec::new();
    for t in 1..=3 {
        let gap = sh_gap(&family, t).map_err(err)?;
        let holes = holes_by_scan(&[3, 5, 7], t);
        let p = family.period(t).map_err(err)?;
        let oracle = (0..holes.len())
            .map(|i| (holes[(i + 1) % holes.len()] + p - holes[i]) % p)
            .min()
            .unwrap();
        ensure!(
            gap == 1 << t && oracle == gap,
            "t={t}: gap {gap}, oracle {oracle}"
        );
        ensure!(
            holes[0] == 1 << t && holes[1] == 1 << (t + 1),
            "t={t}: first holes {:?}",
            &holes[..2]
        );
        gaps.push(gap);
    }
    Ok(format!("gaps {gaps:?}"))
}

fn c4_essential() -> Outcome {
    const HORIZON: i64 = 500;
    let family = deep();
    let p3 = family.period(3).map_err(err)? as i64;
    let reach = HORIZON * p3 + p3;
    let eta = family.eta_window(-reach, reach + 1).map_err(err)?;
    let at = |n: i64| eta.get(n).expect("inside precomputed window");
    let mut checked = 0;
    for t in 1..=3 {
        let p = family.period(t).map_err(err)?;
        let skeleton = skeleton_exact(&family, t).map_err(err)?;
        let periodic: Vec<i64> = (0..p)
            .filter(|&r| !skeleton.cell(r).is_hole())
            .map(|r| r as i64)
            .collect();
        for s in 1..p as i64 {
            let brute = periodic
                .iter()
                .any(|&r| (1..=HORIZON).any(|k| at(r + k * s) != at(r) || at(r - k * s) != at(r)));
            ensure!(
                brute,
                "t={t}, s={s}: no brute-force violation within horizon {HORIZON}"
            );
            let report = essential_check(&family, t, s as u64).map_err(err)?;
            let w = report.witness.ok_or(format!("t={t}, s={s}: no witness"))?;
            ensure!(report.violated, "t={t}, s={s}: not violated");
            ensure!(
                !skeleton
                    .cell(w.position.rem_euclid(p as i64) as u64)
                    .is_hole(),
                "t={t}, s={s}: witness on a hole"
            );
            ensure!(
                at(w.position + w.multiplier * s) != at(w.position),
                "t={t}, s={s}: witness does not break period s"
            );
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} candidate periods violated, horizon {HORIZON}"
    ))
}

fn c5_regularity() -> Outcome {
    let family = small();
    let expected = [
        Rational::new(1, 3),
        Rational::new(2, 15),
        Rational::new(2, 35),
    ];
    for (t, want) in (1..=3).zip(expected) {
        let got = regularity_ratio(&family, t).map_err(err)?;
        let p = family.period(t).map_err(err)?;
        let oracle = Rational::new(holes_by_scan(&[3, 5, 7], t).len() as u64, p);
        ensure!(
            got == want && got == oracle,
            "t={t}: {got} (oracle {oracle})"
        );
        ensure!(got <= Rational::new(1, 1 << t), "t={t}: {got} above 2^-t");
    }
    Ok("1/3, 2/15, 2/35, each <= 2^-t".into())
}

fn c6_residues() -> Outcome {
    let family = small();
    for t in 1..=3 {
        for i in 1..=t {
            let b = family.generator(i).map_err(err)?;
            let got = residue_classes_of_holes(&family, t, i).map_err(err)?;
            let oracle: BTreeSet<u64> =
                holes_by_scan(&[3, 5, 7], t).iter().map(|h| h % b).collect();
            let full: BTreeSet<u64> = (1..b).collect();
            ensure!(got == full && oracle == full, "t={t}, i={i}: {got:?}");
        }
    }
    Ok("hole residues mod b_i = {1..b_i-1} for i <= t <= 3".into())
}

fn c7_stabilizer() -> Outcome {
    let family = small();
    let mut cases = 0;
    for t in 1..=3 {
        let p = family.period(t).map_err(err)?;
        let holes: BTreeSet<u64> = holes_by_scan(&[3, 5, 7], t).into_iter().collect();
        let bound = (1i64 << t) - 1;
        for k in -bound..=bound {
            let got = hole_stabilizer(&family, t, k).map_err(err)?;
            let km = k.rem_euclid(p as i64) as u64;
            let oracle: BTreeSet<u64> = (0..p)
                .filter(|&n| {
                    let moved: BTreeSet<u64> =
                        holes.iter().map(|&h| (h + p - n + km) % p).collect();
                    moved == holes
                })
                .collect();
            ensure!(
                got == BTreeSet::from([km]) && oracle == got,
                "t={t}, k'={k}: {got:?}"
            );
            for n in 0..p {
                let divides = divisibility_check(&family, t, n as i64, k).map_err(err)?;
                ensure!(
                    !got.contains(&n) || divides,
                    "t={t}, k'={k}, n={n}: 2^t does not divide n-k'"
                );
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} (t, k') pairs, stabilizer = {{k' mod p_t}}"
    ))
}

/// Horizon at which every non-shift rule of width <= 3 is refuted on the
/// `eta` window of radius `5·p_3`.
const ETA_SEARCH_HORIZON: usize = 24;

fn c8_search_eta() -> Outcome {
    const BUDGET: u64 = 1_000_000;
    const MAX_ANCHOR: i64 = 3;
    let family = deep();
    let radius = 5 * family.period(3).map_err(err)? as i64;
    let window = family.eta_window(-radius, radius + 1).map_err(err)?;
    let mut spent = 0u64;
    let mut shifts = BTreeSet::new();
    for width in 1..=3usize {
        let params = SearchParams {
            width,
            anchors: -MAX_ANCHOR..=MAX_ANCHOR,
            horizon: ETA_SEARCH_HORIZON,
            budget: BUDGET - spent,
        };
        let report = endomorphism_search(&window, &params).map_err(err)?;
        spent += report.candidates_checked;
        ensure!(!report.has_complement(), "k={width}: complement survived");
        let reach = MAX_ANCHOR + width as i64 - 1;
        for s in &report.survivors {
            match s.class {
                CodeClass::ShiftPower(j) if j.abs() <= reach => {
                    shifts.insert(j);
                }
                other => {
                    return Err(format!(
                        "k={width}: survivor {:?} classed {other:?}",
                        s.code
                    ))
                }
            }
        }
        ensure!(
            report
                .survivors
                .iter()
                .any(|s| s.code == SlidingCode::identity())
                || width > 1,
            "identity refuted"
        );
    }
    ensure!(spent <= BUDGET, "spent {spent} rule checks");
    Ok(format!(
        "only shift powers, j in {shifts:?}; {spent} candidates, horizon {ETA_SEARCH_HORIZON}"
    ))
}

fn c9_positive_control() -> Outcome {
    // A depth-4 construction only fills B_4 contiguously; the complements of
    // its factors live in ~B_4. Depth 6 fills a span of at least 4·|A_4|.
    let construction = TwoHoleConstruction::with_zero_bits(vec![1], 6).map_err(err)?;
    let blocks = construction.build_blocks().map_err(err)?;
    ensure!(
        blocks[3].period() == 108 && blocks[3].holes().len() == 2,
        "unexpected A_4"
    );
    let span = construction.span().map_err(err)?;
    let params = SearchParams {
        width: 1,
        anchors: 0..=0,
        horizon: 8,
        budget: 1_000,
    };
    let report = endomorphism_search(&span, &params).map_err(err)?;
    ensure!(
        report
            .survivors
            .iter()
            .any(|s| s.code == SlidingCode::complement() && s.class == CodeClass::Complement),
        "complement not among survivors: {:?}",
        report.survivors
    );
    for len in 1..=6 {
        ensure!(
            construction.complement_closure_check(len, 4).map_err(err)?,
            "closure fails at L={len}"
        );
    }
    Ok(format!(
        "{} survivors incl. complement; closed for L <= 6",
        report.survivors.len()
    ))
}

/// Whether every factor of length `len` of the periodic sequence has its
/// complement as a factor; exact because `eta` of a finite set has period `lcm`.
fn literal_closed(set: &[u64], len: usize) -> bool {
    let period: i64 = set.iter().fold(1u64, |acc, &b| num_integer::lcm(acc, b)) as i64;
    let factors: HashSet<Vec<u8>> = (0..period)
        .map(|n| (0..len as i64).map(|i| scan_eta(set, n + i)).collect())
        .collect();
    factors
        .iter()
        .all(|w| factors.contains(&w.iter().map(|x| 1 - x).collect::<Vec<_>>()))
}

fn c10_complement_criterion() -> Outcome {
    let sets: [&[u64]; 7] = [&[2], &[3], &[4], &[2, 3], &[3, 5, 7], &[4, 6], &[6, 20, 56]];
    for set in sets {
        let verdict = complement_membership_literal(set).map_err(err)?;
        let closed = (1..=8).all(|len| literal_closed(set, len));
        ensure!(
            verdict.member == (set == [2]),
            "{set:?}: member = {}",
            verdict.member
        );
        ensure!(
            verdict.member == closed,
            "{set:?}: factor scan says closed = {closed}"
        );
    }
    let family = small();
    let verdict = complement_membership(&family).map_err(err)?;
    ensure!(!verdict.member, "b=[3,5,7] reported as member");
    let ComplementReason::NoCoprimePair { ones_at, .. } = verdict.reason else {
        return Err(format!("unexpected reason {:?}", verdict.reason));
    };
    let deep = deep();
    ensure!(
        deep.eta_at(ones_at).map_err(err)? == 1 && deep.eta_at(ones_at + 1).map_err(err)? == 1,
        "no 11 at {ones_at}"
    );
    let window = deep.eta_window(-5000, 5000).map_err(err)?;
    ensure!(
        !window.symbols().windows(2).any(|w| w == [0, 0]),
        "00 occurs"
    );
    Ok(format!(
        "member only for {{2}}; b=[3,5,7]: 11 at {ones_at}, 00 absent"
    ))
}

fn c11_taut() -> Outcome {
    let family = small();
    let report = family.taut_check_truncated(3).map_err(err)?;
    let density = |set: &[u64]| {
        Rational::new(
            (0..840i64).filter(|&n| scan_eta(set, n) == 0).count() as u64,
            840,
        )
    };
    let base = Rational::new(176, 840);
    ensure!(
        report.base.density == base && density(&[6, 20, 56]) == base,
        "base {}",
        report.base.density
    );
    let want = [
        Rational::new(9, 140),
        Rational::new(5, 28),
        Rational::new(1, 5),
    ];
    let oracle = [density(&[20, 56]), density(&[6, 56]), density(&[6, 20])];
    for ((r, w), o) in report.removals.iter().zip(want).zip(oracle) {
        ensure!(
            r.density == w && o == w && w < base,
            "removal {} vs {w}",
            r.density
        );
    }
    ensure!(
        report.removals.len() == 3 && report.is_taut_at_t,
        "not taut"
    );
    Ok("176/840 > 9/140, 5/28, 1/5".into())
}

fn c12_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let m = loop {
            let m: i64 = rng.gen_range(-64..=64);
            if m != 0 {
                break m;
            }
        };
        let a = loop {
            let a: i64 = rng.gen_range(-500..=500);
            if a != 0 {
                break a;
            }
        };
        let b: i64 = rng.gen_range(-500..=500);
        let scan = (0..m.abs()).find(|&x| (a * x - b).rem_euclid(m) == 0);
        let got = solve_congruence(a, b, m);
        ensure!(got == scan, "({a}, {b}, {m}): {got:?}, scan {scan:?}");
    }
    for _ in 0..1_000 {
        let a: i64 = rng.gen_range(1..=40);
        let r: i64 = rng.gen_range(-100..=100);
        let b: u64 = rng.gen_range(1..=40);
        let p = Progression::new(a, r).map_err(err)?;
        let got = intersect_progressions(p, b).map_err(err)?;
        let span = 10 * num_integer::lcm(a, b as i64);
        for n in -span..span {
            let member = p.contains(n) && n.rem_euclid(b as i64) == 0;
            ensure!(
                got.is_some_and(|q| q.contains(n)) == member,
                "({a}Z+{r}) ∩ {b}Z at {n}: {got:?}"
            );
        }
    }
    Ok("10^4 congruences, 10^3 intersections match scans".into())
}

fn c13_odometer() -> Outcome {
    let family = small();
    let odo = Odometer::new(&family, 3).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let random_element = |rng: &mut ChaCha8Rng| {
        let n3: u64 = rng.gen_range(0..840);
        odo.element(vec![n3 % 6, n3 % 60, n3]).unwrap()
    };
    for _ in 0..1_000 {
        let (a, b): (i64, i64) = (
            rng.gen_range(-10_000..=10_000),
            rng.gen_range(-10_000..=10_000),
        );
        let sum = odo
            .add(&odo.from_integer(a), &odo.from_integer(b))
            .map_err(err)?;
        ensure!(
            sum == odo.from_integer(a + b),
            "homomorphism fails at ({a}, {b})"
        );
        let (g, h, k) = (
            random_element(&mut rng),
            random_element(&mut rng),
            random_element(&mut rng),
        );
        let d = |x, y| odo.metric(x, y).unwrap();
        ensure!(d(&g, &h) == d(&h, &g), "asymmetric");
        ensure!(d(&g, &g) == Rational::new(0, 1), "d(g, g) != 0");
        ensure!(d(&g, &k) <= d(&g, &h).max(d(&h, &k)), "ultrametric fails");
        let back = odo
            .add(&odo.add(&g, &h).map_err(err)?, &odo.neg(&h).map_err(err)?)
            .map_err(err)?;
        ensure!(back == g, "g + h - h != g");
    }
    let mut checked = 0;
    for t in 1..=3 {
        let p = family.period(t).map_err(err)?;
        let holes = holes_by_scan(&[3, 5, 7], t);
        let tp = Odometer::new(&family, t).map_err(err)?;
        for n in 0..p {
            let expected: BTreeSet<u64> = holes.iter().map(|&i| (i + p - n) % p).collect();
            let got: BTreeSet<u64> = shifted_holes(&family, t, n)
                .map_err(err)?
                .into_iter()
                .collect();
            let block = shifted_skeleton(&family, t, &tp.from_integer(n as i64)).map_err(err)?;
            let from_block: BTreeSet<u64> = block.holes().iter().copied().collect();
            ensure!(got == expected && from_block == expected, "t={t}, n_t={n}");
            checked += 1;
        }
    }
    Ok(format!("laws on 10^3 samples; {checked} hole translations"))
}

fn c14_not_equidistant() -> Outcome {
    let family = small();
    let mut pairs = Vec::new();
    for t in 1..=3 {
        let s = hole_positions(&family, t).map_err(err)?.len() as u64;
        let prod: u64 = family.generators()[..t].iter().product();
        ensure!(s < prod, "t={t}: {s} >= {prod}");
        pairs.push(format!("{s}<{prod}"));
    }
    Ok(pairs.join(", "))
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("hole count law", Duration::from_secs(5), c1_hole_count),
        ("hole positions", Duration::from_secs(5), c2_hole_positions),
        ("gap law", Duration::from_secs(5), c3_gap_law),
        ("essential periods", Duration::from_secs(60), c4_essential),
        ("regularity", Duration::from_secs(5), c5_regularity),
        ("hole residues", Duration::from_secs(5), c6_residues),
        ("hole stabilizer", Duration::from_secs(10), c7_stabilizer),
        ("search on eta", Duration::from_secs(120), c8_search_eta),
        (
            "complement positive control",
            Duration::from_secs(10),
            c9_positive_control,
        ),
        (
            "complement criterion",
            Duration::from_secs(10),
            c10_complement_criterion,
        ),
        ("tautness", Duration::from_secs(5), c11_taut),
        (
            "arithmetic oracles",
            Duration::from_secs(60),
            c12_arithmetic,
        ),
        ("odometer laws", Duration::from_secs(30), c13_odometer),
        (
            "non-equidistant holes",
            Duration::from_secs(5),
            c14_not_equidistant,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 14 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
