//! Deterministic SVG rendering of partial squares, trades, and
//! tessellations. Elements are emitted in a fixed, sorted order, so equal
//! inputs produce byte-identical output.

use crate::pls::Pls;
use crate::tessellation::{Region, Tessellation};
use crate::trades::Bitrade;
use std::fmt::Write;

const CELL: i64 = 40;
const MARGIN: i64 = 20;

fn open_svg(out: &mut String, width: i64, height: i64) {
    let _ = write!(
        out,
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" ",
            "width=\"{w}\" height=\"{h}\" font-family=\"monospace\">\n",
            "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n"
        ),
        w = width,
        h = height
    );
}

fn grid_lines(out: &mut String, n: i64) {
    let mut d = String::new();
    for i in 0..=n {
        let p = MARGIN + i * CELL;
        let _ = write!(d, "M{p} {MARGIN}V{}", MARGIN + n * CELL);
    }
    for i in 0..=n {
        let p = MARGIN + i * CELL;
        let _ = write!(d, "M{MARGIN} {p}H{}", MARGIN + n * CELL);
    }
    let _ = write!(out, "<path d=\"{d}\" stroke=\"#444444\" fill=\"none\" stroke-width=\"1\"/>\n");
}

/// Renders a partial square as a grid with one shaded, labeled cell per
/// entry; an empty square renders as a bare grid.
pub fn render_square(p: &Pls) -> String {
    let n = p.n() as i64;
    let side = 2 * MARGIN + n * CELL;
    let mut out = String::new();
    open_svg(&mut out, side, side);
    for t in p.iter() {
        let x = MARGIN + t.col as i64 * CELL;
        let y = MARGIN + t.row as i64 * CELL;
        let _ = write!(
            out,
            "<rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#cfe0f5\"/>\n"
        );
    }
    grid_lines(&mut out, n);
    for t in p.iter() {
        let x = MARGIN + t.col as i64 * CELL + CELL / 2;
        let y = MARGIN + t.row as i64 * CELL + CELL / 2 + 6;
        let _ = write!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"16\" text-anchor=\"middle\" fill=\"#111111\">{}</text>\n",
            t.sym
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Renders a trade as a grid marking each traded cell with its symbol and,
/// in the corner, the mate symbol it exchanges with.
pub fn render_trade(b: &Bitrade) -> String {
    let n = b.n() as i64;
    let side = 2 * MARGIN + n * CELL;
    let mut out = String::new();
    open_svg(&mut out, side, side);
    for t in b.t().iter() {
        let x = MARGIN + t.col as i64 * CELL;
        let y = MARGIN + t.row as i64 * CELL;
        let _ = write!(
            out,
            "<rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"#f5e2c8\"/>\n"
        );
    }
    grid_lines(&mut out, n);
    for t in b.t().iter() {
        let mate = b
            .t_mate()
            .get(t.row, t.col)
            .expect("both halves occupy the same cells");
        let x = MARGIN + t.col as i64 * CELL + CELL / 2;
        let y = MARGIN + t.row as i64 * CELL + CELL / 2 + 2;
        let _ = write!(
            out,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"16\" text-anchor=\"middle\" fill=\"#111111\">{}</text>\n",
            t.sym
        );
        let mx = MARGIN + t.col as i64 * CELL + CELL - 6;
        let my = MARGIN + t.row as i64 * CELL + CELL - 4;
        let _ = write!(
            out,
            "<text x=\"{mx}\" y=\"{my}\" font-size=\"10\" text-anchor=\"end\" fill=\"#8a4a10\">{mate}</text>\n"
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Maps a lattice point (x along rows downward, y along columns rightward)
/// to pixel coordinates.
fn px(x: i64, y: i64) -> (i64, i64) {
    (MARGIN + y * CELL, MARGIN + x * CELL)
}

/// Renders a tessellation: the region outline and one polygon per
/// triangle, positive-leg triangles in blue, negative in orange.
pub fn render_tessellation(tess: &Tessellation) -> String {
    let (w, h, outline) = match tess.region {
        Region::Corner { n } => {
            let (ax, ay) = px(0, 0);
            let (bx, by) = px(n, 0);
            let (cx, cy) = px(0, n);
            (
                2 * MARGIN + n * CELL,
                2 * MARGIN + n * CELL,
                format!("{ax},{ay} {bx},{by} {cx},{cy}"),
            )
        }
        Region::Rect { x0, y0, x1, y1 } => {
            let (ax, ay) = px(x0 - x0, y0 - y0);
            let (bx, by) = px(x1 - x0, y0 - y0);
            let (cx, cy) = px(x1 - x0, y1 - y0);
            let (dx, dy) = px(x0 - x0, y1 - y0);
            (
                2 * MARGIN + (y1 - y0) * CELL,
                2 * MARGIN + (x1 - x0) * CELL,
                format!("{ax},{ay} {bx},{by} {cx},{cy} {dx},{dy}"),
            )
        }
    };
    let (ox, oy) = match tess.region {
        Region::Corner { .. } => (0, 0),
        Region::Rect { x0, y0, .. } => (x0, y0),
    };
    let mut out = String::new();
    open_svg(&mut out, w, h);
    for t in &tess.triangles {
        let [a, b, c] = t.vertices();
        let (ax, ay) = px(a.0 - ox, a.1 - oy);
        let (bx, by) = px(b.0 - ox, b.1 - oy);
        let (cx, cy) = px(c.0 - ox, c.1 - oy);
        let fill = if t.k > 0 { "#c9daf0" } else { "#f0dcbe" };
        let _ = write!(
            out,
            "<polygon points=\"{ax},{ay} {bx},{by} {cx},{cy}\" fill=\"{fill}\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n"
        );
    }
    let _ = write!(
        out,
        "<polygon points=\"{outline}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n"
    );
    out.push_str("</svg>\n");
    out
}
