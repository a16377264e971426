use std::time::Instant;

use serde::Serialize;

use bfree_core::arithmetic::{multiples_density, ratio_json, Rational};
use bfree_core::automorphism::{endomorphism_search, CodeClass, SearchParams};
use bfree_core::counterexample::TwoHoleConstruction;
use bfree_core::odometer::{
    classify_at_depth, default_shift_bound, point_of, Classification, Odometer, OdometerElement,
};
use bfree_core::toeplitz::{
    essential_check, hole_positions, sh_gap, skeleton_exact, SkeletonBlock,
};
use bfree_core::word::cells_to_string;
use bfree_core::{BFreeFamily, Error, Result, SymbolWindow};

use crate::render::{csv, join, Rendered};
use crate::{Cli, Command, ConstructionArgs, Format, SearchArgs, Source};

pub fn run(cli: &Cli) -> Result<String> {
    let default = match cli.command {
        Command::Gen { .. } => Format::Text,
        _ => Format::Json,
    };
    let rendered = dispatch(&cli.command)?;
    Ok(rendered.select(cli.format.unwrap_or(default)))
}

fn dispatch(command: &Command) -> Result<Rendered> {
    match command {
        Command::Gen { family, range } => {
            let window = family.family()?.eta_window(range.start, range.end)?;
            Ok(window_output(&window))
        }
        Command::Skeleton { family, t } => {
            let block = skeleton_exact(&family.family()?, *t)?;
            let rows = block
                .cells()
                .iter()
                .enumerate()
                .map(|(s, c)| format!("{s},{}", c.to_char()));
            Ok(Rendered::new(
                &block,
                csv("s,cell", rows),
                block.to_string(),
            ))
        }
        Command::Holes { family, t } => {
            let family = family.family()?;
            let holes = hole_positions(&family, *t)?;
            #[derive(Serialize)]
            struct Out<'a> {
                t: usize,
                p_t: u64,
                holes: &'a [u64],
            }
            let out = Out {
                t: *t,
                p_t: family.period(*t)?,
                holes: &holes,
            };
            let rows = holes.iter().enumerate().map(|(i, h)| format!("{i},{h}"));
            Ok(Rendered::new(
                &out,
                csv("index,hole", rows),
                join(&holes, " "),
            ))
        }
        Command::Gaps { family, t } => {
            let k_t = sh_gap(&family.family()?, *t)?;
            #[derive(Serialize)]
            struct Out {
                t: usize,
                k_t: u64,
            }
            Ok(Rendered::new(
                &Out { t: *t, k_t },
                csv("t,k_t", [format!("{t},{k_t}")]),
                k_t.to_string(),
            ))
        }
        Command::Stabilizer { family, t, k_prime } => {
            let family = family.family()?;
            let stabilizer: Vec<u64> =
                bfree_core::automorphism::hole_stabilizer(&family, *t, *k_prime)?
                    .into_iter()
                    .collect();
            #[derive(Serialize)]
            struct Out<'a> {
                t: usize,
                k_prime: i64,
                stabilizer: &'a [u64],
            }
            let out = Out {
                t: *t,
                k_prime: *k_prime,
                stabilizer: &stabilizer,
            };
            Ok(Rendered::new(
                &out,
                csv("n", &stabilizer),
                join(&stabilizer, " "),
            ))
        }
        Command::Essential { family, t, s } => {
            let report = essential_check(&family.family()?, *t, *s)?;
            let text = match report.witness {
                Some(w) => format!(
                    "period {s} violated at {} with multiplier {}",
                    w.position, w.multiplier
                ),
                None => format!("period {s} not violated"),
            };
            let row = report.witness.map_or(format!("{t},{s},false,,"), |w| {
                format!("{t},{s},true,{},{}", w.position, w.multiplier)
            });
            Ok(Rendered::new(
                &report,
                csv("t,s,violated,position,multiplier", [row]),
                text,
            ))
        }
        Command::Certificate { family, n } => {
            let family = family.family()?;
            let eta = family.eta_at(*n)?;
            let cert = family.period_certificate(*n)?;
            #[derive(Serialize)]
            struct Out {
                eta: u8,
                #[serde(flatten)]
                cert: bfree_core::bfree::PeriodCertificate,
            }
            let text = format!("eta({n}) = {eta}, constant along {n} + {}Z", cert.period);
            let row = format!("{n},{eta},{}", cert.period);
            Ok(Rendered::new(
                &Out { eta, cert },
                csv("n,eta,period", [row]),
                text,
            ))
        }
        Command::Density { divisors } => {
            let report = multiples_density(divisors)?;
            let text = format!(
                "{} ({} of {})",
                report.density, report.multiples_in_period, report.period
            );
            let row = format!(
                "{},{},{}",
                report.period, report.multiples_in_period, report.density
            );
            Ok(Rendered::new(
                &report,
                csv("period,multiples,density", [row]),
                text,
            ))
        }
        Command::Taut { family, t } => taut(&family.family()?, *t),
        Command::Autosearch(args) => autosearch(args),
        Command::Counterexample {
            construction,
            closure,
            level,
        } => counterexample(construction, *closure, *level),
        Command::Odometer {
            family,
            depth,
            n,
            residues,
            shift_bound,
            point,
        } => {
            let family = family.family()?;
            let odo = Odometer::new(&family, *depth)?;
            let g = match residues {
                Some(r) => odo.element(r.clone())?,
                None => odo.from_integer(n.unwrap_or(0)),
            };
            let bound = shift_bound.unwrap_or_else(|| default_shift_bound(*depth));
            let classification = classify_at_depth(&family, &g, bound)?;
            let point = match point {
                Some(r) => Some(cells_to_string(&point_of(&family, &g, r.start, r.end)?)),
                None => None,
            };
            odometer_output(g, classification, point)
        }
    }
}

fn window_output(window: &SymbolWindow) -> Rendered {
    #[derive(Serialize)]
    struct Out {
        start: i64,
        end: i64,
        word: String,
    }
    let word: String = window.to_string();
    let rows = window
        .symbols()
        .iter()
        .enumerate()
        .map(|(i, x)| format!("{},{x}", window.start() + i as i64));
    let out = Out {
        start: window.start(),
        end: window.end(),
        word: word.clone(),
    };
    Rendered::new(&out, csv("n,eta", rows), word)
}

fn taut(family: &BFreeFamily, t: usize) -> Result<Rendered> {
    let report = family.taut_check_truncated(t)?;
    #[derive(Serialize)]
    struct Ratio(#[serde(with = "ratio_json")] Rational);
    #[derive(Serialize)]
    struct Out {
        t: usize,
        base: Ratio,
        removals: Vec<Ratio>,
        taut: bool,
    }
    let removals: Vec<Rational> = report.removals.iter().map(|r| r.density).collect();
    let out = Out {
        t,
        base: Ratio(report.base.density),
        removals: removals.iter().copied().map(Ratio).collect(),
        taut: report.is_taut_at_t,
    };
    let rows = removals
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{},{d}", i + 1));
    let text = format!(
        "base {}; without each element: {}; taut at t={t}: {}",
        report.base.density,
        join(&removals, ", "),
        report.is_taut_at_t
    );
    let mut table = csv("removed,density", rows);
    table.insert_str(
        table.find('\n').unwrap() + 1,
        &format!("none,{}\n", report.base.density),
    );
    Ok(Rendered::new(&out, table, text))
}

fn construction(args: &ConstructionArgs) -> Result<TwoHoleConstruction> {
    let mut bits = args.bits.clone().unwrap_or_default().0;
    let needed = args.depth.saturating_sub(1);
    if bits.len() < needed {
        bits.resize(needed, 0);
    }
    TwoHoleConstruction::new(args.seed.0.clone(), bits, args.depth)
}

fn autosearch(args: &SearchArgs) -> Result<Rendered> {
    let window = match args.source {
        Source::Eta => {
            let family = args.family.family_or(|| BFreeFamily::odd_primes(17))?;
            let radius = match args.window {
                Some(r) => r,
                None => 5 * family.period(3.min(family.depth()))? as i64,
            };
            family.eta_window(-radius, radius + 1)?
        }
        Source::Counterexample => {
            let span = construction(&args.construction)?.span()?;
            match args.window {
                Some(r) => {
                    let hi = (2 * r + 1).min(span.len() as i64);
                    span.slice(0, hi)
                }
                None => span,
            }
        }
    };
    let params = SearchParams {
        width: args.width,
        anchors: args.anchors.clone(),
        horizon: args.horizon,
        budget: args.budget,
    };
    if args.budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    log::info!(
        "searching {} candidates on a window of {} symbols",
        params.candidates(),
        window.len()
    );
    let started = Instant::now();
    let report = endomorphism_search(&window, &params)?;
    log::info!("search finished in {:.2?}", started.elapsed());
    let describe = |class: CodeClass| match class {
        CodeClass::ShiftPower(j) => ("shift_power", j.to_string()),
        CodeClass::Complement => ("complement", String::new()),
        CodeClass::Other => ("other", String::new()),
    };
    let rows = report.survivors.iter().map(|s| {
        let (class, shift) = describe(s.class);
        format!("{},{},{class},{shift}", s.code.rule, s.code.anchor)
    });
    let table = csv("rule_index,anchor,class,shift", rows);
    let mut text = format!(
        "width {}: {} candidates, {} survivors\n",
        report.radius,
        report.candidates_checked,
        report.survivors.len()
    );
    for s in &report.survivors {
        let (class, shift) = describe(s.class);
        let shift = if shift.is_empty() {
            String::new()
        } else {
            format!(" {shift}")
        };
        text.push_str(&format!(
            "rule {} anchor {}: {class}{shift}\n",
            s.code.rule, s.code.anchor
        ));
    }
    Ok(Rendered::new(&report, table, text))
}

fn counterexample(
    args: &ConstructionArgs,
    closure: Option<usize>,
    level: Option<usize>,
) -> Result<Rendered> {
    let c = construction(args)?;
    let blocks = c.build_blocks()?;
    let span = c.span()?;
    let closure = match closure {
        Some(max_len) => {
            let level = level.unwrap_or(c.depth().saturating_sub(2).max(1));
            (1..=max_len)
                .map(|len| Ok((len, c.complement_closure_check(len, level)?)))
                .collect::<Result<Vec<_>>>()?
        }
        None => Vec::new(),
    };
    #[derive(Serialize)]
    struct Closure {
        len: usize,
        closed: bool,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        depth: usize,
        blocks: &'a [SkeletonBlock],
        span: String,
        apparent_period: Option<usize>,
        closure: Vec<Closure>,
    }
    let out = Out {
        depth: c.depth(),
        blocks: &blocks,
        span: span.to_string(),
        apparent_period: c.apparent_period()?,
        closure: closure
            .iter()
            .map(|&(len, closed)| Closure { len, closed })
            .collect(),
    };
    let rows = blocks
        .iter()
        .map(|b| format!("{},{},{}", b.level(), b.period(), b));
    let mut text = String::new();
    for b in &blocks {
        text.push_str(&format!("A_{} = {b}\n", b.level()));
    }
    for (len, closed) in &closure {
        text.push_str(&format!(
            "closed under complement for length {len}: {closed}\n"
        ));
    }
    Ok(Rendered::new(&out, csv("t,q_t,cells", rows), text))
}

fn odometer_output(
    g: OdometerElement,
    classification: Classification,
    point: Option<String>,
) -> Result<Rendered> {
    #[derive(Serialize)]
    struct Out {
        element: OdometerElement,
        classification: Classification,
        #[serde(skip_serializing_if = "Option::is_none")]
        point: Option<String>,
    }
    let residues = join(g.residues(), ",");
    let witness = classification
        .g1_witness
        .map_or(String::new(), |m| m.to_string());
    let row = format!(
        "\"{residues}\",{},{witness},{}",
        classification.in_g2, classification.in_g0_at_depth
    );
    let mut text = format!(
        "({residues}) in G2: {}, G1 witness: {}, G0 at depth: {}",
        classification.in_g2,
        if witness.is_empty() { "none" } else { &witness },
        classification.in_g0_at_depth
    );
    if let Some(p) = &point {
        text.push('\n');
        text.push_str(p);
    }
    let out = Out {
        element: g,
        classification,
        point,
    };
    Ok(Rendered::new(
        &out,
        csv("residues,in_g2,g1_witness,in_g0_at_depth", [row]),
        text,
    ))
}
