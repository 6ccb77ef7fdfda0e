//! Text and JSON serialization for partial squares, trades, and
//! tessellations.
//!
//! Two formats for partial squares exist. The grid format is a header line
//! `n=<order>` followed by `n` rows of `n` space-separated tokens, `.` for
//! an empty cell and the decimal symbol otherwise. The structured format is
//! a JSON document `{"n": …, "triples": [[r,c,s],…]}` with triples sorted
//! by `(r,c)`. Writers emit LF line endings and sorted triples, so both
//! formats round-trip bit-exactly.

use crate::pls::{Pls, PlsError, Triple};
use crate::tessellation::Tessellation;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Pls(#[from] PlsError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}

/// Renders `p` in the grid format.
pub fn write_grid(p: &Pls) -> String {
    let n = p.n();
    let mut out = String::new();
    writeln!(out, "n={n}").unwrap();
    let mut grid = vec![None; n * n];
    for t in p.iter() {
        grid[t.row as usize * n + t.col as usize] = Some(t.sym);
    }
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                out.push(' ');
            }
            match grid[r * n + c] {
                Some(s) => write!(out, "{s}").unwrap(),
                None => out.push('.'),
            }
        }
        out.push('\n');
    }
    out
}

/// Parses the grid format.
pub fn read_grid(s: &str) -> Result<Pls, IoError> {
    let mut lines = s.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected header n=<order>"))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .ok_or_else(|| parse_err(1, "expected header n=<order>"))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad order: {e}")))?;
    let mut triples = Vec::new();
    let mut rows_seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows_seen == n {
            return Err(parse_err(lineno, format!("expected {n} rows, found more")));
        }
        let row = rows_seen as u16;
        let mut cols_seen = 0usize;
        for tok in line.split_whitespace() {
            if cols_seen == n {
                return Err(parse_err(lineno, format!("expected {n} tokens per row")));
            }
            if tok != "." {
                let sym: u16 = tok
                    .parse()
                    .map_err(|e| parse_err(lineno, format!("bad symbol {tok:?}: {e}")))?;
                triples.push(Triple::new(row, cols_seen as u16, sym));
            }
            cols_seen += 1;
        }
        if cols_seen != n {
            return Err(parse_err(
                lineno,
                format!("expected {n} tokens per row, found {cols_seen}"),
            ));
        }
        rows_seen += 1;
    }
    if rows_seen != n {
        return Err(parse_err(
            s.lines().count(),
            format!("expected {n} rows, found {rows_seen}"),
        ));
    }
    Ok(Pls::from_triples(n, triples)?)
}

#[derive(Serialize, Deserialize)]
struct PlsDoc {
    n: usize,
    triples: Vec<Triple>,
}

/// Renders `p` as a structured JSON document plus trailing newline.
pub fn write_json(p: &Pls) -> String {
    let doc = PlsDoc { n: p.n(), triples: p.triples().to_vec() };
    let mut s = serde_json::to_string(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Parses the structured JSON document.
pub fn read_json(s: &str) -> Result<Pls, IoError> {
    let doc: PlsDoc = serde_json::from_str(s)?;
    Ok(Pls::from_triples(doc.n, doc.triples)?)
}

/// Parses either format, distinguished by the leading `n=` header.
pub fn read_pls(s: &str) -> Result<Pls, IoError> {
    let head = s.trim_start();
    if head.starts_with("n=") {
        read_grid(s)
    } else if head.starts_with('{') {
        read_json(s)
    } else {
        Err(parse_err(1, "expected n=<order> header or a JSON document"))
    }
}

#[derive(Serialize, Deserialize)]
struct TradeDoc {
    n: usize,
    #[serde(rename = "T")]
    t: Vec<Triple>,
    #[serde(rename = "T_mate")]
    t_mate: Vec<Triple>,
}

/// Renders a trade pair as `{"n":…,"T":…,"T_mate":…}` plus trailing newline.
///
/// `t` and `t_mate` must share an order; validity as a bitrade is not
/// required here and is checked separately.
pub fn write_trade_json(t: &Pls, t_mate: &Pls) -> String {
    assert_eq!(t.n(), t_mate.n(), "trade halves must share an order");
    let doc = TradeDoc {
        n: t.n(),
        t: t.triples().to_vec(),
        t_mate: t_mate.triples().to_vec(),
    };
    let mut s = serde_json::to_string(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Parses a trade document into its two halves.
pub fn read_trade_json(s: &str) -> Result<(Pls, Pls), IoError> {
    let doc: TradeDoc = serde_json::from_str(s)?;
    let t = Pls::from_triples(doc.n, doc.t)?;
    let t_mate = Pls::from_triples(doc.n, doc.t_mate)?;
    Ok((t, t_mate))
}

/// Renders a tessellation as JSON plus trailing newline.
pub fn write_tessellation_json(t: &Tessellation) -> String {
    let mut s = serde_json::to_string(t).expect("serializable");
    s.push('\n');
    s
}

/// Parses a tessellation document. Geometric validity is not checked here.
pub fn read_tessellation_json(s: &str) -> Result<Tessellation, IoError> {
    Ok(serde_json::from_str(s)?)
}
