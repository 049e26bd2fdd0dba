//! Command line surface for the stratified simple homotopy toolkit.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on input
//! errors. `-` means stdin or stdout for complex files.

use std::collections::BTreeSet;
use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use strathom::error::Error;
use strathom::pairing::{Cofibration, Pairing, Regularity};
use strathom::poset::Poset;
use strathom::reduce::{cell_table, reduce, Deformation, ReduceStrategy};
use strathom::sset::{CellId, Fss};
use strathom::{cylinder, fos, homology, subdivision, tda};

#[derive(Parser)]
#[command(name = "strathom", version, about = "Stratified simple homotopy for filtered simplicial sets")]
struct Cli {
    /// Worker threads for parallelizable stages (default: STRATHOM_THREADS or 1)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Machine readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a complex
    Validate { input: String },
    /// Cell counts, dimension, Euler characteristics
    Info { input: String },
    /// Build a filtered Vietoris-Rips complex from a labelled point cloud
    Vr(VrArgs),
    /// Greedily collapse a complex, emitting a replayable certificate
    Reduce(ReduceArgs),
    /// Replay a deformation certificate between two complexes
    Verify(VerifyArgs),
    /// Apply a subdivision functor
    Subdivide(SubdivideArgs),
    /// Convert to a filtered ordered simplicial complex
    FosConvert(FosArgs),
    /// Mod 2 Betti numbers, total and per stratum
    Homology {
        input: String,
        #[arg(long)]
        strata: bool,
    },
    /// Check a pairing certificate: properness, regularity, replay
    PairCheck(PairCheckArgs),
    /// Build a mapping cylinder and certify its target inclusion
    Cylinder(CylinderArgs),
}

#[derive(Args)]
struct VrArgs {
    /// CSV file: coordinate columns then a final label column
    points: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 3)]
    max_dim: usize,
    /// Number of elements of the label chain 0 < 1 < ...
    #[arg(long, default_value_t = 2)]
    chain: usize,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct ReduceArgs {
    input: String,
    #[arg(long)]
    strict_only: bool,
    /// Comma separated cell ids the reducer must not touch
    #[arg(long)]
    protect: Option<String>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Write the deformation certificate here
    #[arg(long)]
    cert: Option<String>,
    /// Write the reduction report here
    #[arg(long)]
    report: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    cert: String,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
}

#[derive(Args)]
struct SubdivideArgs {
    input: String,
    /// One of: sd, sdp, rel
    #[arg(long, default_value = "sd")]
    kind: String,
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    /// For `rel`: comma separated cell ids spanning the subcomplex
    #[arg(long)]
    subcomplex: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct FosArgs {
    input: String,
    /// Write the deformation certificate here
    #[arg(long)]
    emit_cert: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct PairCheckArgs {
    /// The total complex
    input: String,
    /// Comma separated base cell ids (closed under faces before use)
    #[arg(long)]
    base: String,
    /// Pairing certificate JSON
    #[arg(long)]
    cert: String,
}

#[derive(Args)]
struct CylinderArgs {
    /// Map JSON: {"assign": {cell: [word, cell]}}
    map: String,
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: String,
    #[arg(long)]
    emit_cert: Option<String>,
    #[arg(long, default_value = "-")]
    out: String,
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn read_complex(path: &str) -> Result<Fss, Error> {
    Fss::from_json_str(&read_input(path)?)
}

fn write_output(path: &str, text: &str) -> Result<(), Error> {
    if path == "-" {
        println!("{text}");
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn parse_cells(spec: &str) -> BTreeSet<CellId> {
    spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(CellId::new).collect()
}

/// 0 = success, 1 = verification failure, 2 = input error.
fn run(cli: Cli) -> Result<u8, Error> {
    let threads = cli
        .threads
        .or_else(|| std::env::var("STRATHOM_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1);
    match cli.command {
        Command::Validate { input } => {
            let x = read_complex(&input)?;
            let violations = x.validate();
            if cli.json {
                println!("{}", serde_json::json!({ "violations": violations }));
            } else {
                for v in &violations {
                    println!("{}: {}", v.cell, v.message);
                }
                if violations.is_empty() {
                    println!("ok: {} cells", x.len());
                }
            }
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        Command::Info { input } => {
            let x = read_complex(&input)?;
            let info = serde_json::json!({
                "cells": x.len(),
                "dim": x.dim(),
                "euler": x.euler(),
                "euler_by_stratum": homology::euler_by_stratum(&x),
                "table": cell_table(&x),
            });
            if cli.json {
                println!("{info}");
            } else {
                println!("{}", serde_json::to_string_pretty(&info)?);
            }
            Ok(0)
        }
        Command::Vr(args) => {
            let poset = Poset::chain(args.chain);
            let cloud = tda::parse_points(&poset, &read_input(&args.points)?)?;
            let k = tda::vietoris_rips(&cloud, args.eps, args.max_dim, threads)?;
            write_output(&args.out, &k.to_json_string())?;
            Ok(0)
        }
        Command::Reduce(args) => {
            let x = read_complex(&args.input)?;
            let strategy = ReduceStrategy {
                strict_only: args.strict_only,
                descending: true,
                max_rounds: args.max_rounds,
                protected: args.protect.as_deref().map(parse_cells).unwrap_or_default(),
            };
            let r = reduce(&x, &strategy);
            if let Some(path) = &args.cert {
                write_output(path, &serde_json::to_string_pretty(&r.certificate.to_json())?)?;
            }
            if let Some(path) = &args.report {
                write_output(path, &serde_json::to_string_pretty(&r.report)?)?;
            }
            if cli.json && args.out == "-" {
                println!(
                    "{}",
                    serde_json::json!({"result": r.result.to_json(), "moves": r.report.moves})
                );
            } else {
                write_output(&args.out, &r.result.to_json_string())?;
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let cert: serde_json::Value = serde_json::from_str(&read_input(&args.cert)?)?;
            let mut d = Deformation::from_json(&cert)?;
            if let Some(from) = &args.from {
                d.start = read_complex(from)?;
            }
            if let Some(to) = &args.to {
                d.end = read_complex(to)?;
            }
            let report = d.verify();
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "ok": report.is_ok(),
                        "strict_steps": report.strict_steps,
                        "diagnostics": report.diagnostics,
                    })
                );
            } else {
                for m in &report.diagnostics {
                    println!("fail: {m}");
                }
                if report.is_ok() {
                    let strict = report.strict_steps.iter().filter(|s| **s).count();
                    println!("ok: {} steps, {} strict", report.strict_steps.len(), strict);
                }
            }
            Ok(if report.is_ok() { 0 } else { 1 })
        }
        Command::Subdivide(args) => {
            let x = Arc::new(read_complex(&args.input)?);
            let result = match args.kind.as_str() {
                "sd" => {
                    let mut cur = (*x).clone();
                    for _ in 0..args.iterations.max(1) {
                        cur = subdivision::sd(&cur);
                    }
                    cur
                }
                "sdp" => {
                    let mut cur = (*x).clone();
                    for _ in 0..args.iterations.max(1) {
                        cur = subdivision::sd_p(&cur);
                    }
                    cur
                }
                "rel" => {
                    let a = args
                        .subcomplex
                        .as_deref()
                        .map(parse_cells)
                        .ok_or_else(|| Error::Parameter("rel subdivision needs --subcomplex".into()))?;
                    let a = x.close_faces(a);
                    let family: Vec<BTreeSet<CellId>> =
                        (0..args.iterations.max(1)).map(|_| a.clone()).collect();
                    (*subdivision::sd_family(&x, &family)?.total).clone()
                }
                other => return Err(Error::Parameter(format!("unknown subdivision kind `{other}`"))),
            };
            write_output(&args.out, &result.to_json_string())?;
            Ok(0)
        }
        Command::FosConvert(args) => {
            let x = read_complex(&args.input)?;
            let (k, cert) = fos::to_fos(&x)?;
            if let Some(path) = &args.emit_cert {
                write_output(path, &serde_json::to_string_pretty(&cert.to_json())?)?;
            }
            write_output(&args.out, &k.to_json_string())?;
            Ok(0)
        }
        Command::Homology { input, strata } => {
            let x = read_complex(&input)?;
            let mut out = serde_json::json!({
                "betti": homology::betti_z2(&x),
                "euler": x.euler(),
            });
            if strata {
                let sb = homology::strata_betti(&x);
                out["strata"] = serde_json::json!({
                    "relative": sb.relative,
                    "absolute": sb.absolute,
                });
            }
            if cli.json {
                println!("{out}");
            } else {
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
            Ok(0)
        }
        Command::PairCheck(args) => {
            let x = Arc::new(read_complex(&args.input)?);
            let base = x.close_faces(parse_cells(&args.base));
            let cof = Cofibration::new(x, base)?;
            let cert: serde_json::Value = serde_json::from_str(&read_input(&args.cert)?)?;
            let pairing = Pairing::from_json(cof, &cert)?;
            let proper = pairing.check_proper();
            if !proper.is_empty() {
                for m in &proper {
                    println!("improper: {m}");
                }
                return Ok(1);
            }
            match pairing.check_regular()? {
                Regularity::Regular { .. } => {
                    pairing.to_presentation()?.replay()?;
                    if cli.json {
                        println!("{}", serde_json::json!({"ok": true, "pairs": pairing.len()}));
                    } else {
                        println!("ok: {} pairs, proper, regular, replays", pairing.len());
                    }
                    Ok(0)
                }
                Regularity::Cycle { cells } => {
                    println!("irregular: ancestral cycle through {cells:?}");
                    Ok(1)
                }
            }
        }
        Command::Cylinder(args) => {
            let src = Arc::new(read_complex(&args.src)?);
            let dst = Arc::new(read_complex(&args.dst)?);
            let map_json: serde_json::Value = serde_json::from_str(&read_input(&args.map)?)?;
            let f = strathom::sset::SimplicialMap::from_assignment_json(src, dst, &map_json)?;
            let bundle = cylinder::mapping_cylinder(&f)?;
            if let Some(path) = &args.emit_cert {
                write_output(path, &serde_json::to_string_pretty(&bundle.tgt_pairing.to_json())?)?;
            }
            write_output(&args.out, &bundle.total.to_json_string())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
