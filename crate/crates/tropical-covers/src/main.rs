//! Command-line surface: every computation exposed with reproducible,
//! machine-readable output.  Exit 0 on success or verification pass, 1 on
//! verification failure, 2 on usage errors.

use clap::{Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational};
use std::path::PathBuf;
use std::process::ExitCode;
use tropical_covers::invariants::{
    connected_through_codim1, descendant, hurwitz_cycle, hurwitz_number, Insertion,
};
use tropical_covers::lattice::fan::{balanced_everywhere, is_subdivision, verify_fan};
use tropical_covers::lattice::{eq_mod_lineality, primitive, split_ray, QuotientLattice};
use tropical_covers::moduli::{
    build_delta_rub, replay_stellar_sequence, subdivide_tree_cone, tree_cone,
    verify_stellar_factorization,
};
use tropical_covers::oracle::oracle_vs_tropical_report;
use tropical_covers::relmaps::{
    linear_extensions, vertex_partial_order, MapType, RamificationData,
};
use tropical_covers::trees::{enumerate_trees, to_dot, tree_from_splits, Split};
use tropical_covers::{json as enc, Error, Result};

#[derive(Parser)]
#[command(name = "tropcov", version, about = "Tropical relative stable maps: moduli fans, Hurwitz numbers, descendants")]
struct Cli {
    /// Worker cap for internally parallel sweeps; results are independent
    /// of this value.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the JSON artifact to a file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate stable leaf-labeled trees.
    Trees {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trivalent: bool,
        /// Write DOT renderings to a file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate combinatorial types of rubber maps (maximal cells).
    Types {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Build the subdivided rubber fan, or one tree cone's subdivision.
    Subdivide {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Semicolon-separated splits, e.g. "1,4;1,3,4;5,6".
        #[arg(long)]
        tree: Option<String>,
    },
    /// Find a weighted stellar factorization and verify its replay.
    StellarReplay {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        tree: String,
    },
    /// Tropical relative descendant invariant.
    Descendant {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Repeatable: k=K or k=K,pt=Q with Q an integer or p/q.
        #[arg(long = "insert")]
        inserts: Vec<String>,
    },
    /// Tropical double Hurwitz number, optionally checked by the oracle.
    HurwitzNumber {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Tropical Hurwitz cycle.
    HurwitzCycle {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Verification of fan artifacts.
    Check {
        /// Fan JSON to verify for balancing at every codim-1 cone.
        #[arg(long)]
        balancing: Option<PathBuf>,
        /// Fan JSON whose maximal cones should subdivide a tree cone.
        #[arg(long)]
        subdivision: Option<PathBuf>,
        /// Splits of the tree cone, for --subdivision.
        #[arg(long)]
        against: Option<String>,
    },
}

fn parse_x(s: &str) -> Result<RamificationData> {
    let entries: Vec<i64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("bad ramification entry '{p}'")))
        })
        .collect::<Result<_>>()?;
    RamificationData::new(entries)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.contains('.') {
        return Err(Error::InvalidInput(format!(
            "decimal '{s}' rejected; use exact p/q"
        )));
    }
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("bad rational '{s}'")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den == BigInt::from(0) {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
    }
}

fn parse_splits(n: usize, s: &str) -> Result<Vec<Split>> {
    s.split(';')
        .map(|part| {
            let labels: Vec<usize> = part
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidInput(format!("bad split label '{p}'")))
                })
                .collect::<Result<_>>()?;
            Split::new(n, &labels)
        })
        .collect()
}

fn parse_insert(s: &str) -> Result<Insertion> {
    let mut k: Option<u32> = None;
    let mut pt: Option<BigRational> = None;
    for part in s.split(',') {
        match part.trim().split_once('=') {
            Some(("k", v)) => {
                k = Some(v.parse().map_err(|_| {
                    Error::InvalidInput(format!("bad psi power '{v}'"))
                })?)
            }
            Some(("pt", v)) => pt = Some(parse_rational(v)?),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "bad insertion component '{part}'; expected k=K or pt=Q"
                )))
            }
        }
    }
    let k = k.ok_or_else(|| Error::InvalidInput("insertion needs k=K".into()))?;
    Ok(match pt {
        Some(p) => Insertion::point(k, p),
        None => Insertion::one(k),
    })
}

fn emit(cli_format: Format, out: &Option<PathBuf>, text: String, value: serde_json::Value) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&value)?)?;
    }
    match cli_format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value)?),
    }
    Ok(())
}

/// Names a ray by its split when it is one, else prints the ambient
/// representative.
fn ray_name(ctx: &QuotientLattice, ray: &tropical_covers::lattice::QuotientVector) -> String {
    let p = match primitive(ctx, ray.representative()) {
        Ok(p) => p,
        Err(_) => return "0".into(),
    };
    for s in Split::all(ctx.n()) {
        if let Ok(v) = split_ray(&s, ctx.n()) {
            if let Ok(pv) = primitive(ctx, &v) {
                if eq_mod_lineality(ctx, &p, &pv).unwrap_or(false) {
                    return format!("v{{{s}}}");
                }
            }
        }
    }
    format!("{:?}", p.representative())
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Trees { n, trivalent, dot } => {
            let trees = enumerate_trees(*n, *trivalent)?;
            if let Some(path) = dot {
                let all: String = trees.iter().map(to_dot).collect::<Vec<_>>().join("\n");
                std::fs::write(path, all)?;
            }
            let values: Vec<serde_json::Value> = trees.iter().map(enc::tree_to_json).collect();
            let mut text = format!("{} trees\n", trees.len());
            for t in &trees {
                let splits: Vec<String> = t.splits().iter().map(|s| format!("{{{s}}}")).collect();
                text.push_str(&format!("{}\n", splits.join(" ")));
            }
            emit(cli.format, &cli.out, text.trim_end().into(), serde_json::json!(values))?;
            Ok(0)
        }
        Command::Types { x } => {
            let x = parse_x(x)?;
            let mut values = Vec::new();
            let mut lines = Vec::new();
            for t in enumerate_trees(x.n(), true)? {
                let order = vertex_partial_order(&t, &x)?;
                for ext in linear_extensions(&order) {
                    let mt = MapType::from_extension(&t, &x, &ext)?;
                    let splits: Vec<String> =
                        t.splits().iter().map(|s| format!("{{{s}}}")).collect();
                    lines.push(format!(
                        "tree {} order {:?} weights {:?}",
                        splits.join(" "),
                        mt.order(),
                        mt.weights()
                    ));
                    values.push(enc::maptype_to_json(&mt));
                }
            }
            let text = format!("{} types\n{}", values.len(), lines.join("\n"));
            emit(cli.format, &cli.out, text, serde_json::json!(values))?;
            Ok(0)
        }
        Command::Subdivide { x, tree } => {
            let x = parse_x(x)?;
            let ctx = QuotientLattice::new(x.n())?;
            match tree {
                Some(spec) => {
                    let splits = parse_splits(x.n(), spec)?;
                    let t = tree_from_splits(x.n(), &splits)?;
                    let (fan, provenance) = subdivide_tree_cone(&ctx, &t, &x)?;
                    let m = tropical_covers::moduli::ModuliFan {
                        n: x.n(),
                        x: Some(x.clone()),
                        fan,
                        provenance,
                    };
                    let tree_ray_count = t.splits().len();
                    let text = format!(
                        "maximal cones: {}\nnew rays: {}",
                        m.fan.maximal_cones().len(),
                        m.fan.rays().len() - tree_ray_count
                    );
                    emit(cli.format, &cli.out, text, enc::moduli_to_json(&m)?)?;
                }
                None => {
                    let m = build_delta_rub(&x)?;
                    let text = format!(
                        "maximal cones: {}\nrays: {}",
                        m.fan.maximal_cones().len(),
                        m.fan.rays().len()
                    );
                    emit(cli.format, &cli.out, text, enc::moduli_to_json(&m)?)?;
                }
            }
            Ok(0)
        }
        Command::StellarReplay { x, tree } => {
            let x = parse_x(x)?;
            let ctx = QuotientLattice::new(x.n())?;
            let splits = parse_splits(x.n(), tree)?;
            let t = tree_from_splits(x.n(), &splits)?;
            let steps = verify_stellar_factorization(&ctx, &x, &t)?;
            let ok = replay_stellar_sequence(&ctx, &x, &t, &steps)?;
            let mut lines = Vec::new();
            for (i, step) in steps.iter().enumerate() {
                let names: Vec<String> =
                    step.face.iter().map(|r| ray_name(&ctx, r)).collect();
                lines.push(format!(
                    "step {}: face <{}> weights {:?}",
                    i + 1,
                    names.join(", "),
                    step.weights
                ));
            }
            lines.push(format!("replay matches extension subdivision: {ok}"));
            let value = serde_json::json!({
                "steps": steps.iter().map(|s| serde_json::json!({
                    "face": s.face.iter().map(|r| format!("{:?}", r.representative())).collect::<Vec<_>>(),
                    "weights": s.weights,
                })).collect::<Vec<_>>(),
                "replay_matches": ok,
            });
            emit(cli.format, &cli.out, lines.join("\n"), value)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Descendant { x, inserts } => {
            let x = parse_x(x)?;
            let insertions: Vec<Insertion> = inserts
                .iter()
                .map(|s| parse_insert(s))
                .collect::<Result<_>>()?;
            let res = descendant(&x, &insertions)?;
            let text = format!("value {}", res.value);
            emit(cli.format, &cli.out, text, enc::descendant_to_json(&x, &insertions, &res)?)?;
            Ok(0)
        }
        Command::HurwitzNumber { x, oracle } => {
            let x = parse_x(x)?;
            if *oracle {
                let rows = oracle_vs_tropical_report(std::slice::from_ref(&x))?;
                let row = &rows[0];
                let text = format!(
                    "tropical {}\noracle {}\nequal {}",
                    row.tropical, row.oracle, row.equal
                );
                let value = serde_json::json!({
                    "x": row.x,
                    "d": row.d,
                    "r": row.r,
                    "tropical": row.tropical.to_string(),
                    "oracle": row.oracle.to_string(),
                    "equal": row.equal,
                });
                emit(cli.format, &cli.out, text, value)?;
                Ok(if row.equal { 0 } else { 1 })
            } else {
                let h = hurwitz_number(&x)?;
                emit(
                    cli.format,
                    &cli.out,
                    format!("tropical {h}"),
                    serde_json::json!({"x": x.entries(), "tropical": h.to_string()}),
                )?;
                Ok(0)
            }
        }
        Command::HurwitzCycle { x, k, points } => {
            let x = parse_x(x)?;
            let pts: Vec<BigRational> = match points {
                None => Vec::new(),
                Some(s) if s.trim().is_empty() => Vec::new(),
                Some(s) => s
                    .split(',')
                    .map(parse_rational)
                    .collect::<Result<_>>()?,
            };
            let cycle = hurwitz_cycle(&x, *k, &pts)?;
            let ctx = QuotientLattice::new(x.n())?;
            let balanced = cycle.is_balanced(&ctx)?;
            let connected = connected_through_codim1(&cycle);
            let mut text = format!(
                "cells: {}\nbalanced: {balanced}\nconnected through codim 1: {connected}",
                cycle.cells.len()
            );
            if *k == 0 {
                text.push_str(&format!("\ndegree: {}", cycle.degree()?));
            }
            emit(cli.format, &cli.out, text, enc::cycle_to_json(&cycle)?)?;
            Ok(if balanced { 0 } else { 1 })
        }
        Command::Check { balancing, subdivision, against } => {
            if let Some(path) = balancing {
                let data: serde_json::Value =
                    serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let n = data["n"]
                    .as_u64()
                    .ok_or_else(|| Error::InvalidInput("fan json: missing n".into()))?
                    as usize;
                let ctx = QuotientLattice::new(n)?;
                let fan = enc::fan_from_json(&ctx, &data)?;
                verify_fan(&ctx, &fan)?;
                let ok = balanced_everywhere(&ctx, &fan)?;
                println!("fan: PASS");
                println!("balancing: {}", if ok { "PASS" } else { "FAIL" });
                return Ok(if ok { 0 } else { 1 });
            }
            if let (Some(path), Some(spec)) = (subdivision, against) {
                let data: serde_json::Value =
                    serde_json::from_str(&std::fs::read_to_string(path)?)?;
                let n = data["n"]
                    .as_u64()
                    .ok_or_else(|| Error::InvalidInput("fan json: missing n".into()))?
                    as usize;
                let ctx = QuotientLattice::new(n)?;
                let fan = enc::fan_from_json(&ctx, &data)?;
                let splits = parse_splits(n, spec)?;
                let t = tree_from_splits(n, &splits)?;
                let cone = tree_cone(&ctx, &t)?;
                let ok = is_subdivision(&ctx, &fan, &cone)?;
                println!("subdivision: {}", if ok { "PASS" } else { "FAIL" });
                return Ok(if ok { 0 } else { 1 });
            }
            Err(Error::InvalidInput(
                "check needs --balancing FILE or --subdivision FILE --against SPLITS".into(),
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
