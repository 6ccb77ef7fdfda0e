//! `kstrong` — construct, verify, search, compile, and render k-strong
//! defining sets in back-circulant Latin squares.
//!
//! Exit codes: 0 for success / a true verdict, 1 for a false verdict or a
//! reproduction mismatch, 2 for usage errors (the offending flag is named).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest as _, Sha256};

use kstrong::io::{
    read_pls, read_tessellation_json, read_trade_json, write_grid, write_json, write_trade_json,
};
use kstrong::svg::{render_square, render_tessellation, render_trade};
use kstrong::tessellation::{tessellation_to_trade, validate_tessellation};
use kstrong::{
    back_circulant, build_c_partition, build_p, build_q, build_qk, enumerate_trades,
    extract_chain, is_defining_set, search_min_k_strong, smallest_trade_size, validate_bitrade,
    verify_k_strong, verify_minimal_k_strong, witness_p, witness_q, Bitrade, LatinSquare, Pls,
    SearchError, SearchMode, SearchOptions, Triple,
};

const EXPECTED_TABLE: &str = include_str!("../data/table1.txt");

#[derive(Parser)]
#[command(name = "kstrong", version, about = "k-strong defining sets in back-circulant Latin squares", max_term_width = 100)]
struct Cli {
    /// Output style for reports: human-readable text or a JSON document.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write a run manifest (command line, input digests, tool version,
    /// elapsed time, result digest) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,

    /// Worker threads for search (default: $KSTRONG_WORKERS, then 1).
    /// Results are independent of the worker count.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named set in the back-circulant square B_n.
    Construct(ConstructArgs),
    /// Emit the canonical witness trade through one cell of a named set.
    Witness(WitnessArgs),
    /// Verdicts: defining set, k-strong, minimally k-strong.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Enumerate, measure, or validate trades.
    #[command(subcommand)]
    Trades(TradesCmd),
    /// Validate, compile, or render corner tessellations.
    #[command(subcommand)]
    Tess(TessCmd),
    /// Exact minimum-size search for a k-strong defining set.
    Search(SearchArgs),
    /// Extract the full nested chain of minimally t-strong defining sets.
    Chain(ChainArgs),
    /// Render a square, trade, or tessellation file as a deterministic SVG.
    Render(RenderArgs),
    /// Recompute the bundled reference table of minimum sizes and diff it.
    ReproduceTable1(ReproArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Set family: P (diagonal band), Q (banded critical set), Qk (union of
    /// the broken diagonals 0..=k), C (union of the first k quarter-partition
    /// parts; k defaults to 1).
    #[arg(long, value_enum, ignore_case = true)]
    name: SetName,
    /// Order of the back-circulant square.
    #[arg(long)]
    n: usize,
    /// Parameter for Qk (required) and C (optional, 1..=4).
    #[arg(long)]
    k: Option<usize>,
    /// Write the set here (.json for the JSON schema, anything else for the
    /// grid format) instead of printing it.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "verbatim")]
enum SetName {
    P,
    Q,
    Qk,
    C,
}

#[derive(Args)]
struct WitnessArgs {
    /// Which named set the trade meets minimally: P (twice) or Q (once).
    #[arg(long, value_enum, ignore_case = true)]
    set: WitnessSet,
    /// Order of the back-circulant square.
    #[arg(long)]
    n: usize,
    /// Cell "r,c"; the cell must lie in the named set.
    #[arg(long, value_parser = parse_cell)]
    cell: (u16, u16),
    /// Write the trade here as JSON instead of printing it.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "verbatim")]
enum WitnessSet {
    P,
    Q,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Does the set complete uniquely to its square?
    DefiningSet {
        /// Partial-square file (grid or JSON).
        set: PathBuf,
        /// Square to verify against: a file or "Bn:<n>" (default: the
        /// back-circulant square of the set's order).
        #[arg(long)]
        square: Option<String>,
    },
    /// Does the set stay defining after every deletion of k−1 cells?
    KStrong {
        #[arg(long, value_name = "FILE")]
        set: PathBuf,
        /// Square file or "Bn:<n>" (default: back-circulant of the set's order).
        #[arg(long)]
        square: Option<String>,
        #[arg(long)]
        k: usize,
    },
    /// Is the set k-strong with no k-strong proper subset?
    Minimal {
        #[arg(long, value_name = "FILE")]
        set: PathBuf,
        /// Square file or "Bn:<n>" (default: back-circulant of the set's order).
        #[arg(long)]
        square: Option<String>,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum TradesCmd {
    /// List the trades of a square (order at most 5).
    Enumerate {
        /// Square file or "Bn:<n>".
        #[arg(long)]
        square: String,
        /// Keep only minimal trades (those containing no smaller trade).
        #[arg(long)]
        minimal_only: bool,
        /// Write the full list here as a JSON array of trade documents.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Size of the smallest trade in a square.
    Smallest {
        /// Square file or "Bn:<n>".
        #[arg(long)]
        square: String,
    },
    /// Check a trade file against the bitrade axioms.
    Validate {
        /// Trade file ({"n", "T", "T_mate"}).
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum TessCmd {
    /// Check a tessellation file: region, triangles, overlap, cover, corners.
    Validate { file: PathBuf },
    /// Compile a valid tessellation to its trade.
    Compile {
        file: PathBuf,
        /// Write the trade here as JSON instead of printing it.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Draw the triangles (and, when the tessellation compiles, the marked
    /// square of its trade) as a static SVG.
    Render {
        file: PathBuf,
        /// Output path; with no value (or no flag) the SVG goes to stdout.
        #[arg(long, value_name = "FILE", num_args = 0..=1)]
        svg: Option<Option<PathBuf>>,
    },
}

#[derive(Args)]
struct SearchArgs {
    /// Square file or "Bn:<n>" (order at most 11).
    #[arg(long)]
    square: String,
    /// Strength to optimize for.
    #[arg(long)]
    k: usize,
    /// Run to a certified optimum (the default mode).
    #[arg(long, conflicts_with = "pool_only")]
    exact: bool,
    /// Stop after the lazily grown trade pool stabilizes; the result is a
    /// certified lower bound with a verified (possibly non-optimal) witness.
    #[arg(long)]
    pool_only: bool,
    /// Cap on search nodes and on verification subsets per round.
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
    /// Write the full certificate (witness, pool, bound trace) here as JSON.
    #[arg(long, value_name = "FILE")]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    /// Square file or "Bn:<n>".
    #[arg(long)]
    square: String,
    /// Write the chain here as JSON instead of printing level sizes only.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Input: a square/partial square (grid or JSON), a trade file, or a
    /// tessellation file; the kind is detected from the content.
    input: PathBuf,
    /// Output path for the SVG; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// Largest order to recompute (2..=5).
    #[arg(long, default_value_t = 5)]
    n_max: usize,
}

/// A usage error: printed to stderr, exit code 2.
struct Usage(String);

fn usage(flag: &str, msg: impl std::fmt::Display) -> Usage {
    Usage(format!("{flag}: {msg}"))
}

fn parse_cell(s: &str) -> Result<(u16, u16), String> {
    let (r, c) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"r,c\", got {s:?}"))?;
    let parse = |part: &str| {
        part.trim()
            .parse::<u16>()
            .map_err(|_| format!("expected \"r,c\" with small non-negative integers, got {s:?}"))
    };
    Ok((parse(r)?, parse(c)?))
}

/// Shared command state: the commands append their report to `out`, which is
/// printed once at the end and hashed into the manifest's result digest.
struct Ctx {
    format: Format,
    workers: usize,
    out: String,
    inputs: Vec<(String, String)>,
}

impl Ctx {
    /// Reads an input file, recording its digest for the run manifest.
    fn read_input(&mut self, path: &Path, flag: &str) -> Result<String, Usage> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(flag, format!("cannot read {}: {e}", path.display())))?;
        self.inputs
            .push((path.display().to_string(), hex_sha256(text.as_bytes())));
        Ok(text)
    }

    /// Parses `--square` input: "Bn:<n>" or a path to a complete square.
    fn load_square(&mut self, spec: &str, flag: &str) -> Result<LatinSquare, Usage> {
        if let Some(rest) = spec.strip_prefix("Bn:") {
            let n: usize = rest
                .parse()
                .map_err(|_| usage(flag, format!("bad order in {spec:?}")))?;
            if n < 1 || n > 4096 {
                return Err(usage(flag, format!("order {n} out of range 1..=4096")));
            }
            return Ok(back_circulant(n));
        }
        let text = self.read_input(Path::new(spec), flag)?;
        let p = read_pls(&text).map_err(|e| usage(flag, e))?;
        p.to_latin()
            .map_err(|_| usage(flag, format!("{spec}: the square has empty cells")))
    }

    fn load_set(&mut self, path: &Path, flag: &str) -> Result<Pls, Usage> {
        let text = self.read_input(path, flag)?;
        read_pls(&text).map_err(|e| usage(flag, e))
    }

    fn emit(&mut self, value: Value, text: impl FnOnce(&mut String)) {
        match self.format {
            Format::Text => text(&mut self.out),
            Format::Structured => {
                self.out
                    .push_str(&serde_json::to_string_pretty(&value).expect("serializable"));
                self.out.push('\n');
            }
        }
    }
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let d = h.finalize();
    let mut s = String::with_capacity(64);
    for b in d {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn pls_value(p: &Pls) -> Value {
    serde_json::from_str(&write_json(p)).expect("canonical writer emits valid JSON")
}

fn trade_value(b: &Bitrade) -> Value {
    serde_json::from_str(&write_trade_json(b.t(), b.t_mate()))
        .expect("canonical writer emits valid JSON")
}

fn write_out(path: &Path, contents: &str, flag: &str) -> Result<(), Usage> {
    fs::write(path, contents)
        .map_err(|e| usage(flag, format!("cannot write {}: {e}", path.display())))
}

/// Serializes a set to a file, choosing JSON for `.json` and grid otherwise.
fn write_set_file(path: &Path, p: &Pls) -> Result<(), Usage> {
    let text = if path.extension().is_some_and(|e| e == "json") {
        write_json(p)
    } else {
        write_grid(p)
    };
    write_out(path, &text, "--out")
}

/// Prints a trade as one line per cell, sorted by cell: "r c: s -> s'".
fn trade_lines(out: &mut String, b: &Bitrade) {
    let mut cells: Vec<(u16, u16, u16, u16)> = b
        .t()
        .iter()
        .map(|t| {
            let mate = b
                .t_mate()
                .get(t.row, t.col)
                .expect("mate covers the same cells");
            (t.row, t.col, t.sym, mate)
        })
        .collect();
    cells.sort_unstable();
    for (r, c, s, m) in cells {
        let _ = writeln!(out, "{r} {c}: {s} -> {m}");
    }
}

fn cmd_construct(ctx: &mut Ctx, a: &ConstructArgs) -> Result<i32, Usage> {
    let (set, label) = match a.name {
        SetName::P => {
            if a.k.is_some() {
                return Err(usage("--k", "not accepted with --name P"));
            }
            if a.n < 2 {
                return Err(usage("--n", "the diagonal band needs order at least 2"));
            }
            (build_p(a.n), format!("P_{}", a.n))
        }
        SetName::Q => {
            if a.k.is_some() {
                return Err(usage("--k", "not accepted with --name Q"));
            }
            (build_q(a.n).map_err(|e| usage("--n", e))?, format!("Q_{}", a.n))
        }
        SetName::Qk => {
            let k = a.k.ok_or_else(|| usage("--k", "required with --name Qk"))?;
            (
                build_qk(a.n, k).map_err(|e| usage("--k", e))?,
                format!("Q_{{{},{k}}}", a.n),
            )
        }
        SetName::C => {
            let k = a.k.unwrap_or(1);
            if !(1..=4).contains(&k) {
                return Err(usage("--k", "the quarter partition has parts 1..=4"));
            }
            let parts = build_c_partition(a.n).map_err(|e| usage("--n", e))?;
            let union = parts[..k]
                .iter()
                .try_fold(Pls::empty(a.n).expect("valid order"), |acc, p| acc.union(p))
                .expect("partition parts are disjoint");
            (union, format!("C_1..C_{k} of order {}", a.n))
        }
    };
    if let Some(path) = &a.out {
        write_set_file(path, &set)?;
        let v = json!({"name": label, "n": set.n(), "size": set.len(),
                        "out": path.display().to_string()});
        ctx.emit(v, |out| {
            let _ = writeln!(out, "wrote {label} ({} triples) to {}", set.len(), path.display());
        });
    } else {
        let v = pls_value(&set);
        ctx.emit(v, |out| out.push_str(&write_grid(&set)));
    }
    Ok(0)
}

fn cmd_witness(ctx: &mut Ctx, a: &WitnessArgs) -> Result<i32, Usage> {
    let (r, c) = a.cell;
    if a.n < 2 || (r as usize) >= a.n || (c as usize) >= a.n {
        return Err(usage("--cell", format!("({r}, {c}) is outside an order-{} square", a.n)));
    }
    let e = Triple::new(r, c, ((r as usize + c as usize) % a.n) as u16);
    let (trade, set, label) = match a.set {
        WitnessSet::P => (
            witness_p(a.n, e).map_err(|err| usage("--cell", err))?,
            build_p(a.n),
            "diagonal band",
        ),
        WitnessSet::Q => (
            witness_q(a.n, e).map_err(|err| usage("--cell", err))?,
            build_q(a.n).map_err(|err| usage("--n", err))?,
            "banded critical set",
        ),
    };
    let meets = trade.t().intersection(&set).len();
    if let Some(path) = &a.out {
        write_out(path, &write_trade_json(trade.t(), trade.t_mate()), "--out")?;
    }
    let v = json!({"cell": [r, c], "set": label, "n": a.n, "meets": meets,
                    "trade": trade_value(&trade)});
    ctx.emit(v, |out| {
        let _ = writeln!(
            out,
            "witness trade through ({r}, {c}) of the order-{} {label}: {} cells, meets the set {meets} time(s)",
            a.n,
            trade.size()
        );
        trade_lines(out, &trade);
    });
    Ok(0)
}

fn cmd_verify(ctx: &mut Ctx, v: &VerifyCmd) -> Result<i32, Usage> {
    let (set_path, square_spec) = match v {
        VerifyCmd::DefiningSet { set, square }
        | VerifyCmd::KStrong { set, square, .. }
        | VerifyCmd::Minimal { set, square, .. } => (set, square),
    };
    let set = ctx.load_set(set_path, "--set")?;
    let square = match square_spec {
        Some(spec) => ctx.load_square(spec, "--square")?,
        None => back_circulant(set.n()),
    };
    match v {
        VerifyCmd::DefiningSet { .. } => {
            let verdict = is_defining_set(&set, &square).map_err(|e| usage("--set", e))?;
            let val = json!({"kind": "defining-set", "n": square.n(),
                              "size": set.len(), "verdict": verdict});
            ctx.emit(val, |out| {
                let _ = writeln!(
                    out,
                    "defining set: {verdict} — {} cells in an order-{} square",
                    set.len(),
                    square.n()
                );
            });
            Ok(if verdict { 0 } else { 1 })
        }
        VerifyCmd::KStrong { k, .. } => {
            let report = verify_k_strong(&set, &square, *k).map_err(|e| usage("--set", e))?;
            let counterexample = report.violating_trade.as_ref().map(trade_value);
            let val = json!({"kind": "k-strong", "k": k, "n": square.n(),
                              "size": set.len(), "verdict": report.verdict,
                              "checked": report.checked_subsets,
                              "counterexample": counterexample});
            ctx.emit(val, |out| {
                let _ = writeln!(out, "{k}-strong: {}", report.verdict);
                if let Some(t) = &report.violating_trade {
                    let _ = writeln!(
                        out,
                        "counterexample: a trade of size {} meets the set {} time(s)",
                        t.size(),
                        t.t().intersection(&set).len()
                    );
                    trade_lines(out, t);
                }
            });
            Ok(if report.verdict { 0 } else { 1 })
        }
        VerifyCmd::Minimal { k, .. } => {
            let verdict =
                verify_minimal_k_strong(&set, &square, *k).map_err(|e| usage("--set", e))?;
            let val = json!({"kind": "minimal", "k": k, "n": square.n(),
                              "size": set.len(), "verdict": verdict});
            ctx.emit(val, |out| {
                let _ = writeln!(out, "minimally {k}-strong: {verdict}");
            });
            Ok(if verdict { 0 } else { 1 })
        }
    }
}

fn cmd_trades(ctx: &mut Ctx, t: &TradesCmd) -> Result<i32, Usage> {
    match t {
        TradesCmd::Enumerate { square, minimal_only, out } => {
            let l = ctx.load_square(square, "--square")?;
            let trades = enumerate_trades(&l, *minimal_only).map_err(|e| usage("--square", e))?;
            if let Some(path) = out {
                let list = Value::Array(trades.iter().map(trade_value).collect());
                write_out(path, &format!("{list:#}\n"), "--out")?;
            }
            let mut histogram: Vec<(usize, usize)> = Vec::new();
            for b in &trades {
                match histogram.iter_mut().find(|(s, _)| *s == b.size()) {
                    Some((_, c)) => *c += 1,
                    None => histogram.push((b.size(), 1)),
                }
            }
            histogram.sort_unstable();
            let label = if *minimal_only { "minimal trades" } else { "trades" };
            let val = json!({"n": l.n(), "minimal_only": minimal_only,
                              "count": trades.len(),
                              "sizes": histogram.iter()
                                  .map(|&(s, c)| json!({"size": s, "count": c}))
                                  .collect::<Vec<_>>()});
            ctx.emit(val, |o| {
                let _ = writeln!(o, "{} {label} in the order-{} square", trades.len(), l.n());
                for (s, c) in &histogram {
                    let _ = writeln!(o, "size {s}: {c}");
                }
            });
            Ok(0)
        }
        TradesCmd::Smallest { square } => {
            let l = ctx.load_square(square, "--square")?;
            let size = smallest_trade_size(&l).map_err(|e| usage("--square", e))?;
            let val = json!({"n": l.n(), "smallest_trade": size});
            ctx.emit(val, |o| {
                let _ = writeln!(o, "smallest trade in the order-{} square: {size} cells", l.n());
            });
            Ok(0)
        }
        TradesCmd::Validate { file } => {
            let text = ctx.read_input(file, "file")?;
            let (t, mate) = read_trade_json(&text).map_err(|e| usage("file", e))?;
            match validate_bitrade(&t, &mate) {
                Ok(()) => {
                    let val = json!({"verdict": true, "n": t.n(), "size": t.len()});
                    ctx.emit(val, |o| {
                        let _ = writeln!(o, "valid bitrade: {} cells", t.len());
                    });
                    Ok(0)
                }
                Err(e) => {
                    let val =
                        json!({"verdict": false, "n": t.n(), "error": e.to_string()});
                    ctx.emit(val, |o| {
                        let _ = writeln!(o, "not a bitrade: {e}");
                    });
                    Ok(1)
                }
            }
        }
    }
}

/// Reads `width="w" height="h"` from an SVG produced by this workspace.
fn svg_dims(svg: &str) -> (i64, i64) {
    let grab = |key: &str| -> i64 {
        let start = svg.find(key).expect("generated SVG carries dimensions") + key.len();
        svg[start..]
            .chars()
            .take_while(char::is_ascii_digit)
            .collect::<String>()
            .parse()
            .expect("numeric dimension")
    };
    (grab("width=\""), grab("height=\""))
}

/// Stacks SVG documents side by side into one outer document.
fn svg_hstack(parts: &[String]) -> String {
    let dims: Vec<(i64, i64)> = parts.iter().map(|s| svg_dims(s)).collect();
    let total_w: i64 = dims.iter().map(|d| d.0).sum();
    let total_h: i64 = dims.iter().map(|d| d.1).max().unwrap_or(0);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {total_w} {total_h}\" \
         width=\"{total_w}\" height=\"{total_h}\">\n"
    );
    let mut x = 0;
    for (part, (w, _)) in parts.iter().zip(&dims) {
        out.push_str(&part.replacen("<svg ", &format!("<svg x=\"{x}\" y=\"0\" "), 1));
        x += w;
    }
    out.push_str("</svg>\n");
    out
}

fn cmd_tess(ctx: &mut Ctx, t: &TessCmd) -> Result<i32, Usage> {
    match t {
        TessCmd::Validate { file } => {
            let text = ctx.read_input(file, "file")?;
            let tess = read_tessellation_json(&text).map_err(|e| usage("file", e))?;
            match validate_tessellation(&tess) {
                Ok(()) => {
                    let val = json!({"verdict": true, "triangles": tess.triangles.len()});
                    ctx.emit(val, |o| {
                        let _ = writeln!(
                            o,
                            "valid tessellation: {} triangles cover the region",
                            tess.triangles.len()
                        );
                    });
                    Ok(0)
                }
                Err(e) => {
                    let val = json!({"verdict": false, "error": e.to_string()});
                    ctx.emit(val, |o| {
                        let _ = writeln!(o, "invalid tessellation: {e}");
                    });
                    Ok(1)
                }
            }
        }
        TessCmd::Compile { file, out } => {
            let text = ctx.read_input(file, "file")?;
            let tess = read_tessellation_json(&text).map_err(|e| usage("file", e))?;
            match tessellation_to_trade(&tess) {
                Ok(trade) => {
                    if let Some(path) = out {
                        write_out(path, &write_trade_json(trade.t(), trade.t_mate()), "--out")?;
                    }
                    let val = trade_value(&trade);
                    ctx.emit(val, |o| {
                        let _ = writeln!(o, "compiled trade: {} cells", trade.size());
                        trade_lines(o, &trade);
                    });
                    Ok(0)
                }
                Err(e) => {
                    let val = json!({"verdict": false, "error": e.to_string()});
                    ctx.emit(val, |o| {
                        let _ = writeln!(o, "does not compile: {e}");
                    });
                    Ok(1)
                }
            }
        }
        TessCmd::Render { file, svg } => {
            let text = ctx.read_input(file, "file")?;
            let tess = read_tessellation_json(&text).map_err(|e| usage("file", e))?;
            let mut parts = vec![render_tessellation(&tess)];
            if let Ok(trade) = tessellation_to_trade(&tess) {
                parts.push(render_trade(&trade));
            }
            let document = if parts.len() == 1 { parts.pop().expect("one part") } else { svg_hstack(&parts) };
            match svg {
                Some(Some(path)) => {
                    write_out(path, &document, "--svg")?;
                    let _ = writeln!(ctx.out, "wrote SVG to {}", path.display());
                }
                _ => ctx.out.push_str(&document),
            }
            Ok(0)
        }
    }
}

fn certificate_value(c: &kstrong::SearchCertificate) -> Value {
    let rows: Vec<Vec<u16>> = (0..c.square.n() as u16)
        .map(|r| (0..c.square.n() as u16).map(|col| c.square.get(r, col)).collect())
        .collect();
    json!({
        "square": {"n": c.square.n(), "rows": rows},
        "k": c.k,
        "optimum": c.optimum,
        "exact": c.exact,
        "symmetry_broken": c.symmetry_broken,
        "witness": pls_value(&c.witness),
        "pool": c.pool.iter().map(trade_value).collect::<Vec<_>>(),
        "rounds": c.rounds.iter().map(|r| json!({
            "round": r.round,
            "pool_size": r.pool_size,
            "candidate_size": r.candidate_size,
            "violations_added": r.violations_added,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_search(ctx: &mut Ctx, a: &SearchArgs) -> Result<i32, Usage> {
    let l = ctx.load_square(&a.square, "--square")?;
    let mut opts = SearchOptions::default();
    opts.mode = if a.pool_only { SearchMode::PoolOnly } else { SearchMode::Exact };
    opts.workers = ctx.workers;
    if let Some(budget) = a.budget {
        opts.budget_nodes = budget;
        opts.budget_subsets = budget;
    }
    match search_min_k_strong(&l, a.k, &opts) {
        Ok(cert) => {
            if let Some(path) = &a.cert {
                write_out(path, &format!("{:#}\n", certificate_value(&cert)), "--cert")?;
            }
            let val = certificate_value(&cert);
            ctx.emit(val, |o| {
                let bound = if cert.exact { "minimum size" } else { "certified lower bound" };
                let _ = writeln!(
                    o,
                    "{bound} of a {}-strong defining set in the order-{} square: {}",
                    cert.k,
                    l.n(),
                    cert.optimum
                );
                let _ = writeln!(
                    o,
                    "witness: {} cells, pool: {} trades, rounds: {}",
                    cert.witness.len(),
                    cert.pool.len(),
                    cert.rounds.len()
                );
                o.push_str(&write_grid(&cert.witness));
            });
            Ok(0)
        }
        Err(SearchError::BudgetExceeded { lower_bound, upper_bound }) => {
            let val = json!({"error": "budget exhausted", "lower_bound": lower_bound,
                              "upper_bound": upper_bound});
            ctx.emit(val, |o| {
                let _ = writeln!(
                    o,
                    "budget exhausted: lower bound {lower_bound}, upper bound {}",
                    upper_bound.map_or_else(|| "none".into(), |u| u.to_string())
                );
            });
            Ok(1)
        }
        Err(e @ SearchError::Infeasible { .. }) => {
            let val = json!({"error": e.to_string()});
            ctx.emit(val, |o| {
                let _ = writeln!(o, "infeasible: {e}");
            });
            Ok(1)
        }
        Err(e @ SearchError::OrderTooLarge { .. }) => Err(usage("--square", e)),
    }
}

fn cmd_chain(ctx: &mut Ctx, a: &ChainArgs) -> Result<i32, Usage> {
    let l = ctx.load_square(&a.square, "--square")?;
    let chain = extract_chain(&l).map_err(|e| usage("--square", e))?;
    let sizes: Vec<usize> = chain.levels.iter().map(Pls::len).collect();
    let val = json!({"n": l.n(),
                      "levels": chain.levels.iter().map(pls_value).collect::<Vec<_>>()});
    if let Some(path) = &a.out {
        write_out(path, &format!("{val:#}\n"), "--out")?;
    }
    ctx.emit(val, |o| {
        let _ = writeln!(
            o,
            "chain for the order-{} square: {} nested levels, level t minimally t-strong",
            l.n(),
            sizes.len()
        );
        let _ = writeln!(o, "sizes: {sizes:?}");
    });
    Ok(0)
}

fn cmd_render(ctx: &mut Ctx, a: &RenderArgs) -> Result<i32, Usage> {
    let text = ctx.read_input(&a.input, "input")?;
    let trimmed = text.trim_start();
    let document = if trimmed.starts_with('{') {
        let probe: Value = serde_json::from_str(trimmed)
            .map_err(|e| usage("input", format!("not valid JSON: {e}")))?;
        let keys = probe.as_object().map(|o| o.contains_key("triangles")).unwrap_or(false);
        if keys {
            let tess = read_tessellation_json(trimmed).map_err(|e| usage("input", e))?;
            render_tessellation(&tess)
        } else if probe.get("T").is_some() {
            let (t, mate) = read_trade_json(trimmed).map_err(|e| usage("input", e))?;
            let trade = Bitrade::new(t, mate).map_err(|e| usage("input", e))?;
            render_trade(&trade)
        } else {
            let p = read_pls(trimmed).map_err(|e| usage("input", e))?;
            render_square(&p)
        }
    } else {
        let p = read_pls(&text).map_err(|e| usage("input", e))?;
        render_square(&p)
    };
    match &a.out {
        Some(path) => {
            write_out(path, &document, "--out")?;
            let _ = writeln!(ctx.out, "wrote SVG to {}", path.display());
        }
        None => ctx.out.push_str(&document),
    }
    Ok(0)
}

fn cmd_reproduce(ctx: &mut Ctx, a: &ReproArgs) -> Result<i32, Usage> {
    if !(2..=5).contains(&a.n_max) {
        return Err(usage("--n-max", "bundled reference values cover orders 2..=5"));
    }
    let mut expected: Vec<(usize, usize, usize)> = Vec::new();
    for (i, line) in EXPECTED_TABLE.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(n)), Some(Ok(k)), Some(Ok(size))) => expected.push((n, k, size)),
            _ => return Err(usage("(bundled table)", format!("unreadable row at line {}", i + 1))),
        }
    }
    let mut opts = SearchOptions::default();
    opts.workers = ctx.workers;
    let mut rows = Vec::new();
    let mut mismatches = 0usize;
    for &(n, k, want) in expected.iter().filter(|&&(n, _, _)| n <= a.n_max) {
        let cert = search_min_k_strong(&back_circulant(n), k, &opts)
            .map_err(|e| usage("(bundled table)", e))?;
        let ok = cert.exact && cert.optimum == want;
        mismatches += usize::from(!ok);
        rows.push(json!({"n": n, "k": k, "expected": want,
                          "computed": cert.optimum, "ok": ok}));
        if ctx.format == Format::Text {
            let _ = writeln!(
                ctx.out,
                "n={n} k={k}: computed {}, expected {want}{}",
                cert.optimum,
                if ok { "" } else { "  MISMATCH" }
            );
        }
    }
    let total = rows.len();
    let val = json!({"rows": rows, "mismatches": mismatches});
    match ctx.format {
        Format::Text => {
            let _ = writeln!(
                ctx.out,
                "reproduced {}/{} reference values",
                total - mismatches,
                total
            );
        }
        Format::Structured => ctx.emit(val, |_| {}),
    }
    Ok(if mismatches == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let workers = cli
        .workers
        .or_else(|| std::env::var("KSTRONG_WORKERS").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1);
    let mut ctx = Ctx { format: cli.format, workers, out: String::new(), inputs: Vec::new() };
    let result = match &cli.command {
        Command::Construct(a) => cmd_construct(&mut ctx, a),
        Command::Witness(a) => cmd_witness(&mut ctx, a),
        Command::Verify(v) => cmd_verify(&mut ctx, v),
        Command::Trades(t) => cmd_trades(&mut ctx, t),
        Command::Tess(t) => cmd_tess(&mut ctx, t),
        Command::Search(a) => cmd_search(&mut ctx, a),
        Command::Chain(a) => cmd_chain(&mut ctx, a),
        Command::Render(a) => cmd_render(&mut ctx, a),
        Command::ReproduceTable1(a) => cmd_reproduce(&mut ctx, a),
    };
    let code = match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    print!("{}", ctx.out);
    if let Some(path) = &cli.manifest {
        let manifest = json!({
            "command": std::env::args().collect::<Vec<_>>(),
            "inputs": ctx.inputs.iter()
                .map(|(p, d)| json!({"path": p, "sha256": d}))
                .collect::<Vec<_>>(),
            "tool_version": env!("CARGO_PKG_VERSION"),
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "result_digest": format!("sha256:{}", hex_sha256(ctx.out.as_bytes())),
        });
        if let Err(e) = fs::write(path, format!("{manifest:#}\n")) {
            eprintln!("error: --manifest: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
