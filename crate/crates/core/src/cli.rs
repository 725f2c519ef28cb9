//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the data fails a mathematical check,
//! 2 on I/O, parse or usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::axioms::{validate, AxiomReport, Severity};
use crate::bantay::{compute_tables, realizability_report};
use crate::error::Error;
use crate::modular_data::ModularData;
use crate::numerics::{nearest_turns, Complex, Tolerance};
use crate::oracle;
use crate::rmatrix::{monodromy_check, synthesize, BlockForm, RBlock};
use crate::search::{search_pipeline, write_results, FusionRing, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const MAX_TURN_DENOMINATOR: i64 = 240;

#[derive(Debug, Parser)]
#[command(
    name = "modtrace",
    version,
    about = "Invariants and realizability checks for modular data"
)]
pub struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance for floating-point equalities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Tolerance for rounding to integers.
    #[arg(long = "int-tol", global = true, default_value_t = 1e-6)]
    pub int_tol: f64,
    /// Largest root-of-unity order tried by `search`.
    #[arg(long = "max-order", global = true, default_value_t = 16)]
    pub max_order: u32,
    /// Print only the verdict.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the modularity axioms.
    Validate { file: PathBuf },
    /// Trace table, Frobenius-Schur indicators and eigenvalue multiplicities.
    Bantay { file: PathBuf },
    /// Canonical R-matrices and their monodromy check.
    Rmatrix { file: PathBuf },
    /// Axioms plus the realizability constraints.
    Check { file: PathBuf },
    /// List the built-in catalog, or print one entry.
    Catalog { name: Option<String> },
    /// Compare the trace formula with an explicit model.
    Oracle { model: String },
    /// Search a fusion ring for admissible modular data.
    Search {
        file: PathBuf,
        /// Directory receiving one modular-data file per result.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable internal parallelism.
        #[arg(long)]
        serial: bool,
    },
}

struct Ctx<'a> {
    cli: &'a Cli,
    pol: Tolerance,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

type Outcome = Result<i32, Error>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let pol = match Tolerance::new(cli.tol, cli.int_tol) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut ctx = Ctx {
        cli: &cli,
        pol,
        out,
        err,
    };
    let result = match &cli.command {
        Command::Validate { file } => cmd_validate(&mut ctx, file),
        Command::Bantay { file } => cmd_bantay(&mut ctx, file),
        Command::Rmatrix { file } => cmd_rmatrix(&mut ctx, file),
        Command::Check { file } => cmd_check(&mut ctx, file),
        Command::Catalog { name } => cmd_catalog(&mut ctx, name.as_deref()),
        Command::Oracle { model } => cmd_oracle(&mut ctx, model),
        Command::Search { file, out, serial } => cmd_search(&mut ctx, file, out.as_deref(), *serial),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_FAIL
            }
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

/// `[re, im]` plus the nearest turn fraction when the value is a root of unity.
pub fn format_phase(z: Complex, pol: &Tolerance) -> String {
    let decimal = format!("[{:>9.6}, {:>9.6}]", z.re, z.im);
    if z.norm() < pol.int_tol {
        return format!("{decimal}  0");
    }
    match nearest_turns(z, MAX_TURN_DENOMINATOR, pol.int_tol) {
        Some((0, _)) => format!("{decimal}  1"),
        Some((p, q)) => format!("{decimal}  e(2πi·{p}/{q})"),
        None => format!("{decimal}  (approximate, |z| = {:.6})", z.norm()),
    }
}

fn verdict_code(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn print_json<T: Serialize>(ctx: &mut Ctx, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(ctx.out, "{text}").map_err(io)
}

fn print_report(ctx: &mut Ctx, report: &AxiomReport) -> Result<(), Error> {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(ctx.out, "verdict: {verdict}").map_err(io)?;
    if ctx.cli.quiet {
        return Ok(());
    }
    if let Some(note) = &report.convention_note {
        writeln!(ctx.out, "note: {note}").map_err(io)?;
    }
    for d in &report.diagnostics {
        let sev = match d.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        writeln!(
            ctx.out,
            "  {sev:<7} {:<24} measured {:.3e}  at {:?}  {}",
            d.check_id, d.measured, d.indices, d.message
        )
        .map_err(io)?;
    }
    writeln!(ctx.out, "max deviation by check:").map_err(io)?;
    for (id, dev) in &report.deviations {
        writeln!(ctx.out, "  {id:<24} {dev:.3e}").map_err(io)?;
    }
    Ok(())
}

fn load(ctx: &Ctx, file: &std::path::Path) -> Result<ModularData, Error> {
    ModularData::load(file, &ctx.pol)
}

fn cmd_validate(ctx: &mut Ctx, file: &std::path::Path) -> Outcome {
    let md = load(ctx, file)?;
    let report = validate(&md, &ctx.pol);
    if ctx.cli.json {
        print_json(ctx, &report)?;
    } else {
        print_report(ctx, &report)?;
    }
    Ok(verdict_code(report.passed()))
}

fn cmd_check(ctx: &mut Ctx, file: &std::path::Path) -> Outcome {
    let md = load(ctx, file)?;
    let report = realizability_report(&md, &ctx.pol);
    if ctx.cli.json {
        print_json(ctx, &report)?;
    } else {
        print_report(ctx, &report)?;
    }
    Ok(verdict_code(report.passed()))
}

fn cmd_bantay(ctx: &mut Ctx, file: &std::path::Path) -> Outcome {
    let md = load(ctx, file)?;
    let report = validate(&md, &ctx.pol);
    if !report.passed() {
        if ctx.cli.json {
            print_json(ctx, &report)?;
        } else {
            print_report(ctx, &report)?;
        }
        return Ok(EXIT_FAIL);
    }
    let (_, tables) = compute_tables(&md, &ctx.pol)?;
    if ctx.cli.json {
        print_json(ctx, &tables)?;
        return Ok(EXIT_OK);
    }
    let labels = md.labels().to_vec();
    let pol = ctx.pol;
    writeln!(ctx.out, "Frobenius-Schur indicators:").map_err(io)?;
    for (i, nu) in tables.indicators.nu.iter().enumerate() {
        writeln!(ctx.out, "  nu[{}] = {nu:+}", labels[i]).map_err(io)?;
    }
    if ctx.cli.quiet {
        return Ok(EXIT_OK);
    }
    writeln!(ctx.out, "traces tau[k][i]:").map_err(io)?;
    for (k, row) in tables.traces.tau.iter().enumerate() {
        for (i, z) in row.iter().enumerate() {
            writeln!(
                ctx.out,
                "  tau[{}][{}] = {}",
                labels[k],
                labels[i],
                format_phase(*z, &pol)
            )
            .map_err(io)?;
        }
    }
    writeln!(ctx.out, "eigenvalue multiplicities (m+, m-) by [k][i]:").map_err(io)?;
    let mt = &tables.multiplicities;
    for k in 0..labels.len() {
        let cells: Vec<String> = (0..labels.len())
            .map(|i| format!("({}, {})", mt.m_plus[k][i], mt.m_minus[k][i]))
            .collect();
        writeln!(ctx.out, "  k = {:<6} {}", labels[k], cells.join("  ")).map_err(io)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RMatrixOutput<'a> {
    blocks: &'a [RBlock],
    monodromy: &'a AxiomReport,
}

fn cmd_rmatrix(ctx: &mut Ctx, file: &std::path::Path) -> Outcome {
    let md = load(ctx, file)?;
    let (dd, blocks) = synthesize(&md, &ctx.pol)?;
    let report = monodromy_check(&blocks, &dd, &ctx.pol);
    if ctx.cli.json {
        print_json(
            ctx,
            &RMatrixOutput {
                blocks: &blocks,
                monodromy: &report,
            },
        )?;
        return Ok(verdict_code(report.passed()));
    }
    let labels = md.labels().to_vec();
    let pol = ctx.pol;
    if !ctx.cli.quiet {
        for b in &blocks {
            let [i, j, k] = b.channel;
            let shape = match b.form {
                BlockForm::Scalar { size, .. } => format!("scalar x{size}"),
                BlockForm::Signed {
                    dim_plus, dim_minus, ..
                } => format!("signed (+{dim_plus}, -{dim_minus})"),
            };
            writeln!(
                ctx.out,
                "  R[{}, {} -> {}]  {:<18} {}",
                labels[i],
                labels[j],
                labels[k],
                shape,
                format_phase(b.value(), &pol)
            )
            .map_err(io)?;
        }
    }
    print_report(ctx, &report)?;
    Ok(verdict_code(report.passed()))
}

#[derive(Serialize)]
struct CatalogListing<'a> {
    name: &'a str,
    rank: usize,
    notes: &'a str,
}

fn cmd_catalog(ctx: &mut Ctx, name: Option<&str>) -> Outcome {
    let Some(name) = name else {
        let entries = oracle::catalog();
        if ctx.cli.json {
            let listing: Vec<CatalogListing> = entries
                .iter()
                .map(|e| CatalogListing {
                    name: e.name,
                    rank: e.md.rank(),
                    notes: e.notes,
                })
                .collect();
            print_json(ctx, &listing)?;
        } else {
            for e in &entries {
                writeln!(ctx.out, "{:<14} rank {}  {}", e.name, e.md.rank(), e.notes).map_err(io)?;
            }
        }
        return Ok(EXIT_OK);
    };
    let entry = oracle::lookup(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
    if ctx.cli.json {
        writeln!(ctx.out, "{}", entry.md.to_json_string()).map_err(io)?;
        return Ok(EXIT_OK);
    }
    let pol = ctx.pol;
    writeln!(ctx.out, "{}: rank {}  {}", entry.name, entry.md.rank(), entry.notes).map_err(io)?;
    writeln!(ctx.out, "S:").map_err(io)?;
    let s = entry.md.s();
    for r in 0..s.nrows() {
        let row: Vec<String> = (0..s.ncols())
            .map(|c| format!("[{:>9.6}, {:>9.6}]", s[(r, c)].re, s[(r, c)].im))
            .collect();
        writeln!(ctx.out, "  {}", row.join(" ")).map_err(io)?;
    }
    writeln!(ctx.out, "T:").map_err(io)?;
    for (label, t) in entry.md.labels().iter().zip(entry.md.t()) {
        writeln!(ctx.out, "  {label:<6} {}", format_phase(*t, &pol)).map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(ctx: &mut Ctx, name: &str) -> Outcome {
    let model = oracle::model(name, &ctx.pol)?;
    let cmp = oracle::compare(&model, &ctx.pol)?;
    let passed = cmp.max_delta <= ctx.pol.eq_tol;
    if ctx.cli.json {
        print_json(ctx, &cmp)?;
        return Ok(verdict_code(passed));
    }
    let pol = ctx.pol;
    if !ctx.cli.quiet {
        writeln!(
            ctx.out,
            "{:<16} {:<40} {:<40} |delta|",
            "channel (i,k)", "definition", "formula"
        )
        .map_err(io)?;
        for c in &cmp.channels {
            writeln!(
                ctx.out,
                "({:>5},{:>5})    {:<40} {:<40} {:.2e}",
                model.labels[c.i],
                model.labels[c.k],
                format_phase(c.brute, &pol),
                format_phase(c.formula, &pol),
                c.delta
            )
            .map_err(io)?;
        }
    }
    writeln!(
        ctx.out,
        "{}: max |delta| = {:.3e}  {}",
        cmp.model,
        cmp.max_delta,
        if passed { "PASS" } else { "FAIL" }
    )
    .map_err(io)?;
    Ok(verdict_code(passed))
}

fn cmd_search(ctx: &mut Ctx, file: &std::path::Path, out_dir: Option<&std::path::Path>, serial: bool) -> Outcome {
    let ring = FusionRing::load(file)?;
    let config = SearchConfig {
        pol: ctx.pol,
        max_order: ctx.cli.max_order,
        parallel: !serial,
        ..SearchConfig::default()
    };
    let outcome = search_pipeline(&ring, &config)?;
    if let Some(dir) = out_dir {
        let paths = write_results(&outcome, dir)?;
        if !ctx.cli.json && !ctx.cli.quiet {
            writeln!(ctx.err, "wrote {} files to {}", paths.len(), dir.display()).map_err(io)?;
        }
    }
    if ctx.cli.json {
        writeln!(ctx.out, "{}", outcome.to_json_string()).map_err(io)?;
    } else {
        writeln!(
            ctx.out,
            "rank {}, max order {}: {} S candidates, {} twist assignments ({} without a modular T), {} results in {} twist families",
            outcome.rank,
            outcome.max_order,
            outcome.s_candidates,
            outcome.assignments,
            outcome.skipped,
            outcome.results.len(),
            outcome.twist_families()
        )
        .map_err(io)?;
        if !ctx.cli.quiet {
            let pol = ctx.pol;
            for (idx, res) in outcome.results.iter().enumerate() {
                let p = &res.provenance;
                writeln!(
                    ctx.out,
                    "  #{idx:03}  S#{} twists [{}] cube root {}  T_0 = {}",
                    p.s_candidate,
                    p.twists.join(", "),
                    p.cube_root,
                    format_phase(res.md.t()[0], &pol)
                )
                .map_err(io)?;
            }
        }
    }
    Ok(verdict_code(!outcome.results.is_empty()))
}
