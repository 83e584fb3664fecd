//! Command-line front end for `symfv`: classification, synthesis, catalog
//! export, certificate-table verification and the residue cross-check.
//!
//! Every subcommand prints JSON on standard output unless `--pretty` asks
//! for a human-readable table. Exit codes: `0` success / member / verified,
//! `1` non-member or verification failure, `2` usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symfv::catalog::{self, CatalogKey};
use symfv::certify::{self, ErrataReport, TableReport, TableSet};
use symfv::classify::{self, in_FG};
use symfv::group::standard_group;
use symfv::polytope::is_symmetric;
use symfv::synth::{SynthError, Synthesizer};
use symfv::{FVector, GroupSpec, Polytope};

/// Environment variable naming a directory of certificate tables that
/// override the built-in ones.
pub const TABLE_DIR_ENV: &str = "SYMFV_TABLE_DIR";

/// Exit code for success, membership or a verified sweep.
pub const EXIT_OK: i32 = 0;
/// Exit code for non-membership or a failed verification.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "symfv", version, about = "f-vectors of symmetric 3-polytopes, exactly")]
struct Cli {
    /// Print human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether an f-vector belongs to F(G).
    Classify(ClassifyArgs),
    /// Construct a G-symmetric polytope with a given f-vector.
    Synth(SynthArgs),
    /// List or build catalog polytopes.
    Catalog(CatalogArgs),
    /// Verify certificate tables.
    VerifyTables(VerifyArgs),
    /// Compare the residue classes derived from ray orbits with the classification.
    Residues(ResiduesArgs),
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Group: C:n, D:d, T, O, I or G:d.
    #[arg(long, value_parser = parse_group)]
    group: GroupSpec,
    /// f-vector as f0,f2.
    #[arg(long, value_parser = parse_f)]
    f: FVector,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Group: C:n, D:d, T, O, I or G:d.
    #[arg(long, value_parser = parse_group)]
    group: GroupSpec,
    /// f-vector as f0,f2.
    #[arg(long, value_parser = parse_f)]
    f: FVector,
    /// Write the witness as an OFF file.
    #[arg(long)]
    off: Option<PathBuf>,
    /// Write the construction trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Fractional digits of OFF coordinates.
    #[arg(long, default_value_t = 12)]
    digits: usize,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// List every registered name.
    #[arg(long, conflicts_with = "build", required_unless_present = "build")]
    list: bool,
    /// Build an entry: Name, Name:p1,p2 or Name[p1,p2].
    #[arg(long, value_parser = parse_key)]
    build: Option<CatalogKey>,
    /// Write the built polytope as an OFF file.
    #[arg(long, requires = "build")]
    off: Option<PathBuf>,
    /// Fractional digits of OFF coordinates.
    #[arg(long, default_value_t = 12)]
    digits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    /// Per-table summaries with the errata.
    Summary,
    /// Full per-cell reports.
    Json,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Group (C:n, D:d, T, O, I, G:d) or `all`.
    #[arg(long, value_parser = parse_group_or_all)]
    group: GroupSelection,
    /// Largest n / d swept with `--group all`.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(3..))]
    max_param: u64,
    /// Output detail.
    #[arg(long, value_enum, default_value_t = ReportFormat::Summary)]
    report: ReportFormat,
    /// Cap on worker threads.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Write the errata (cells not verifying as printed) as JSON.
    #[arg(long)]
    errata: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ResiduesArgs {
    /// Group (C:n, D:d, T, O, I, G:d) or `all`.
    #[arg(long, value_parser = parse_group_or_all)]
    group: GroupSelection,
    /// Largest n / d swept with `--group all`.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(3..))]
    max_param: u64,
}

#[derive(Debug, Clone)]
enum GroupSelection {
    All,
    One(GroupSpec),
}

impl GroupSelection {
    fn specs(&self, max_param: u64) -> Vec<GroupSpec> {
        match self {
            GroupSelection::All => certify::default_specs(max_param),
            GroupSelection::One(s) => vec![*s],
        }
    }
}

fn parse_group(s: &str) -> Result<GroupSpec, String> {
    s.parse::<GroupSpec>().map_err(|e| e.to_string())
}

fn parse_group_or_all(s: &str) -> Result<GroupSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(GroupSelection::All)
    } else {
        parse_group(s).map(GroupSelection::One)
    }
}

fn parse_f(s: &str) -> Result<FVector, String> {
    s.parse::<FVector>()
}

fn parse_key(s: &str) -> Result<CatalogKey, String> {
    s.parse::<CatalogKey>().map_err(|e| e.to_string())
}

/// Certificate tables, honouring [`TABLE_DIR_ENV`].
pub fn load_tables() -> Result<TableSet> {
    match std::env::var_os(TABLE_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            TableSet::from_dir(&dir).with_context(|| format!("loading tables from {}", dir.display()))
        }
        _ => Ok(TableSet::builtin()),
    }
}

/// Run the command line `argv` (including the program name), writing
/// regular output to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAIL
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Classify(a) => classify_cmd(a, cli.pretty, out),
        Command::Synth(a) => synth_cmd(a, cli.pretty, out),
        Command::Catalog(a) => catalog_cmd(a, cli.pretty, out),
        Command::VerifyTables(a) => verify_cmd(a, cli.pretty, out),
        Command::Residues(a) => residues_cmd(a, cli.pretty, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn classify_cmd(a: &ClassifyArgs, pretty: bool, out: &mut dyn Write) -> Result<i32> {
    let d = in_FG(a.group, a.f);
    if pretty {
        writeln!(out, "{} in F({}): {}", a.f, a.group, d)?;
    } else {
        let mut v = serde_json::to_value(&d)?;
        v["group"] = json!(a.group.to_string());
        v["f"] = json!([a.f.f0, a.f.f2]);
        emit(out, &v)?;
    }
    Ok(if d.member { EXIT_OK } else { EXIT_FAIL })
}

fn polytope_summary(p: &Polytope) -> Value {
    let f = p.f_vector();
    json!({
        "f": [f.f0, f.f2],
        "edges": p.edge_count(),
        "provenance": p.provenance,
    })
}

fn synth_cmd(a: &SynthArgs, pretty: bool, out: &mut dyn Write) -> Result<i32> {
    let synth = Synthesizer::new(load_tables()?);
    match synth.synthesize(a.group, a.f) {
        Ok((p, trace)) => {
            if let Some(path) = &a.off {
                write_file(path, &p.to_off(a.digits))?;
            }
            if let Some(path) = &a.trace {
                write_file(path, &trace.to_json())?;
            }
            if pretty {
                writeln!(out, "witness for {} under {}: {}", a.f, a.group, p.provenance)?;
                writeln!(out, "  certificate {} class {:?} slot {:?} ({:?}), root {}, a = {}, b = {}{}",
                    trace.table, trace.class, trace.slot, trace.kind, trace.root, trace.a, trace.b,
                    if trace.dual { ", dualized" } else { "" })?;
            } else {
                let mut v = polytope_summary(&p);
                v["group"] = json!(a.group.to_string());
                v["member"] = json!(true);
                v["trace"] = serde_json::to_value(&trace)?;
                emit(out, &v)?;
            }
            Ok(EXIT_OK)
        }
        Err(SynthError::NotAMember { decision, .. }) => {
            if pretty {
                writeln!(out, "refused: {} is not in F({}): {}", a.f, a.group, decision)?;
            } else {
                let mut v = serde_json::to_value(&decision)?;
                v["group"] = json!(a.group.to_string());
                v["f"] = json!([a.f.f0, a.f.f2]);
                emit(out, &v)?;
            }
            Ok(EXIT_FAIL)
        }
        Err(e) => Err(e.into()),
    }
}

fn catalog_cmd(a: &CatalogArgs, pretty: bool, out: &mut dyn Write) -> Result<i32> {
    if a.list {
        if pretty {
            for e in catalog::list() {
                writeln!(out, "{:<8} {} param(s)  {}", e.name, e.arity, e.description)?;
            }
        } else {
            let v: Vec<Value> = catalog::list()
                .iter()
                .map(|e| json!({"name": e.name, "arity": e.arity, "description": e.description}))
                .collect();
            emit(out, &Value::Array(v))?;
        }
        return Ok(EXIT_OK);
    }
    let key = a.build.as_ref().expect("clap enforces --list or --build");
    let (expected, group) = catalog::registered_expectation(key)?;
    let p = catalog::build_default(key)?;
    if let Some(path) = &a.off {
        write_file(path, &p.to_off(a.digits))?;
    }
    let g = standard_group(group)?;
    let symmetric = is_symmetric(&p, &g)?;
    let ok = p.f_vector() == expected && symmetric;
    if pretty {
        writeln!(out, "{key}: f = {} (expected {expected}), symmetric under {group}: {symmetric}", p.f_vector())?;
    } else {
        let mut v = polytope_summary(&p);
        v["name"] = json!(key.to_string());
        v["group"] = json!(group.to_string());
        v["expected"] = json!([expected.f0, expected.f2]);
        v["symmetric"] = json!(symmetric);
        emit(out, &v)?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn verify_cmd(a: &VerifyArgs, pretty: bool, out: &mut dyn Write) -> Result<i32> {
    let tables = load_tables()?;
    let specs = a.group.specs(a.max_param);
    let reports = certify::verify_specs(&specs, &tables, a.jobs.map(|j| j as usize))?;
    let errata = ErrataReport::from_reports(&reports);
    if let Some(path) = &a.errata {
        write_file(path, &errata.to_json())?;
    }
    if pretty {
        print_reports(&reports, out)?;
    } else {
        let tables: Vec<Value> = reports
            .iter()
            .map(|r| match a.report {
                ReportFormat::Json => serde_json::to_value(r).expect("report serializes"),
                ReportFormat::Summary => json!({
                    "group": r.group,
                    "table": r.table,
                    "cells": r.cells.len(),
                    "passed": r.passed,
                    "passed_with_reading": r.passed_with_reading,
                    "failed": r.failed,
                }),
            })
            .collect();
        let total = |f: fn(&TableReport) -> usize| reports.iter().map(f).sum::<usize>();
        emit(out, &json!({
            "verified": !errata.has_failures(),
            "cells": total(|r| r.cells.len()),
            "passed": total(|r| r.passed),
            "passed_with_reading": total(|r| r.passed_with_reading),
            "failed": total(|r| r.failed),
            "tables": tables,
            "errata": serde_json::to_value(&errata)?,
        }))?;
    }
    Ok(if errata.has_failures() { EXIT_FAIL } else { EXIT_OK })
}

fn print_reports(reports: &[TableReport], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{:<6} {:<6} {:>5} {:>6} {:>8} {:>6}", "group", "table", "cells", "passed", "reading", "failed")?;
    for r in reports {
        writeln!(out, "{:<6} {:<6} {:>5} {:>6} {:>8} {:>6}", r.group, r.table, r.cells.len(), r.passed, r.passed_with_reading, r.failed)?;
        for c in r.cells.iter().filter(|c| c.status != certify::CellStatus::Pass) {
            writeln!(out, "    {} {:?}: {:?}{}", c.label(), c.slot, c.status,
                c.reading.as_deref().map(|s| format!(" ({s})")).unwrap_or_default())?;
        }
    }
    Ok(())
}

fn residues_cmd(a: &ResiduesArgs, pretty: bool, out: &mut dyn Write) -> Result<i32> {
    let specs: Vec<GroupSpec> = a.group.specs(a.max_param);
    let reports = specs
        .iter()
        .map(|&s| classify::verify_residue_engine(s))
        .collect::<Result<Vec<_>, _>>()?;
    let all_equal = reports.iter().all(|r| r.equal);
    if pretty {
        for r in &reports {
            writeln!(out, "{:<6} mod {:<3} {:<5} {:?}", r.group, r.modulus, if r.equal { "equal" } else { "DIFF" }, r.engine)?;
            if !r.equal {
                writeln!(out, "{:<16} expected {:?}", "", r.theorem)?;
            }
        }
    } else {
        emit(out, &json!({"equal": all_equal, "groups": serde_json::to_value(&reports)?}))?;
    }
    Ok(if all_equal { EXIT_OK } else { EXIT_FAIL })
}
