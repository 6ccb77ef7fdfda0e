//! Exact integer geometry for right triangles with gradient −1 hypotenuses,
//! tilings of corner triangles and rectangles by such pieces, and the
//! compiler that turns a tiling into a Latin trade of the cyclic square.
//!
//! All predicates use integer arithmetic only; areas are doubled so they
//! stay integral.

use crate::pls::{Pls, Shift, Triple, MAX_ORDER};
use crate::trades::{Bitrade, TradeError};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TessError {
    #[error("region is empty or degenerate")]
    EmptyRegion,
    #[error("triangle {index} has a zero leg")]
    DegenerateTriangle { index: usize },
    #[error("triangle {index} extends outside the region")]
    TriangleOutsideRegion { index: usize },
    #[error("triangles {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("tile areas sum to {tiles} (doubled), region area is {region}")]
    AreaMismatch { tiles: i64, region: i64 },
    #[error("point ({x},{y}) is a vertex of {count} triangles, more than 3")]
    NotGood { x: i64, y: i64, count: usize },
    #[error(
        "point ({x},{y}) is the right-angle vertex of {count} triangles, expected exactly one"
    )]
    RightAngleCoverageViolated { x: i64, y: i64, count: usize },
    #[error("compilation requires at least two triangles")]
    SingleTriangle,
    #[error("compilation requires the corner-triangle region")]
    NotCornerRegion,
    #[error("parameters out of range: {reason}")]
    ParameterRange { reason: String },
    #[error("the trade meets the diagonal band {count} times, above the limit {limit:.2}")]
    IntersectionBoundExceeded { count: usize, limit: f64 },
    #[error(transparent)]
    Trade(#[from] TradeError),
}

fn param_err(reason: impl Into<String>) -> TessError {
    TessError::ParameterRange { reason: reason.into() }
}

/// An isoceles right triangle with integer coordinates, axis-parallel legs,
/// and a hypotenuse of gradient −1: vertices `(x,y)`, `(x+k,y)`, `(x,y+k)`.
/// The right angle sits at `rv`; the signed leg `k` must be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodTriangle {
    pub rv: [i64; 2],
    pub k: i64,
}

impl GoodTriangle {
    pub fn new(x: i64, y: i64, k: i64) -> GoodTriangle {
        GoodTriangle { rv: [x, y], k }
    }

    pub fn vertices(&self) -> [(i64, i64); 3] {
        let [x, y] = self.rv;
        [(x, y), (x + self.k, y), (x, y + self.k)]
    }

    fn doubled_area(&self) -> i64 {
        self.k * self.k
    }

    /// Closed projection intervals onto the three edge-normal axes
    /// `x`, `y`, and `x+y`.
    fn axis_intervals(&self) -> [(i64, i64); 3] {
        let [x, y] = self.rv;
        let k = self.k;
        let span = |a: i64| if k > 0 { (a, a + k) } else { (a + k, a) };
        [span(x), span(y), span(x + y)]
    }
}

/// Separating-axis overlap test. The edge normals of every good triangle
/// lie along `x`, `y`, and `x+y`, so interiors intersect exactly when the
/// open projection intervals overlap on all three axes.
fn triangles_overlap(a: &GoodTriangle, b: &GoodTriangle) -> bool {
    a.axis_intervals()
        .iter()
        .zip(b.axis_intervals().iter())
        .all(|(ia, ib)| ia.0.max(ib.0) < ia.1.min(ib.1))
}

/// The region a tessellation tiles: either the corner triangle with
/// vertices `(0,0)`, `(0,n)`, `(n,0)`, or an axis-parallel rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Region {
    #[serde(rename = "En")]
    Corner { n: i64 },
    #[serde(rename = "rect")]
    Rect { x0: i64, y0: i64, x1: i64, y1: i64 },
}

impl Region {
    fn is_valid(&self) -> bool {
        match *self {
            Region::Corner { n } => n >= 2,
            Region::Rect { x0, y0, x1, y1 } => x1 > x0 && y1 > y0,
        }
    }

    fn doubled_area(&self) -> i64 {
        match *self {
            Region::Corner { n } => n * n,
            Region::Rect { x0, y0, x1, y1 } => 2 * (x1 - x0) * (y1 - y0),
        }
    }

    fn contains(&self, p: (i64, i64)) -> bool {
        match *self {
            Region::Corner { n } => p.0 >= 0 && p.1 >= 0 && p.0 + p.1 <= n,
            Region::Rect { x0, y0, x1, y1 } => {
                x0 <= p.0 && p.0 <= x1 && y0 <= p.1 && p.1 <= y1
            }
        }
    }
}

/// A list of good triangles intended to tile a region exactly, with no
/// point used as a triangle corner more than 3 times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tessellation {
    pub region: Region,
    pub triangles: Vec<GoodTriangle>,
}

/// Checks that the triangles tile the region exactly and that no point is a
/// corner of more than 3 triangles. Corner incidences alone count: a vertex
/// lying in the interior of another triangle's edge does not.
///
/// Diagnostics are reported in this order: degenerate region or triangle,
/// containment, pairwise overlap, area (containment plus disjointness plus
/// matching area is exact coverage), then corner multiplicity.
pub fn validate_tessellation(t: &Tessellation) -> Result<(), TessError> {
    if !t.region.is_valid() {
        return Err(TessError::EmptyRegion);
    }
    for (index, tri) in t.triangles.iter().enumerate() {
        if tri.k == 0 {
            return Err(TessError::DegenerateTriangle { index });
        }
        // The region is convex, so vertex containment is containment.
        if !tri.vertices().iter().all(|&v| t.region.contains(v)) {
            return Err(TessError::TriangleOutsideRegion { index });
        }
    }
    for i in 0..t.triangles.len() {
        for j in i + 1..t.triangles.len() {
            if triangles_overlap(&t.triangles[i], &t.triangles[j]) {
                return Err(TessError::Overlap { first: i, second: j });
            }
        }
    }
    let tiles: i64 = t.triangles.iter().map(GoodTriangle::doubled_area).sum();
    let region = t.region.doubled_area();
    if tiles != region {
        return Err(TessError::AreaMismatch { tiles, region });
    }
    let mut corners: HashMap<(i64, i64), usize> = HashMap::new();
    for tri in &t.triangles {
        for v in tri.vertices() {
            *corners.entry(v).or_insert(0) += 1;
        }
    }
    let mut worst: Option<((i64, i64), usize)> = None;
    for (&p, &count) in &corners {
        if count > 3 && worst.is_none_or(|(wp, wc)| count > wc || (count == wc && p < wp)) {
            worst = Some((p, count));
        }
    }
    if let Some(((x, y), count)) = worst {
        return Err(TessError::NotGood { x, y, count });
    }
    Ok(())
}

/// Compiles a tessellation of the order-`n` corner triangle into a trade of
/// the cyclic square: every triangle corner `(x,y)` except `(0,n)` and
/// `(n,0)` becomes the cell `(x,y)` holding symbol `x+y mod n`, and the
/// mate at a right-angle vertex of the triangle with leg `k` holds
/// `x+y+k mod n`. Every non-excluded corner must be the right-angle vertex
/// of exactly one triangle.
pub fn tessellation_to_trade(t: &Tessellation) -> Result<Bitrade, TessError> {
    let n = match t.region {
        Region::Corner { n } => n,
        Region::Rect { .. } => return Err(TessError::NotCornerRegion),
    };
    assert!(n as usize <= MAX_ORDER, "order exceeds the supported maximum");
    validate_tessellation(t)?;
    if t.triangles.len() < 2 {
        return Err(TessError::SingleTriangle);
    }

    let excluded = [(0, n), (n, 0)];
    let mut rv_of: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut corners: Vec<(i64, i64)> = Vec::new();
    for (idx, tri) in t.triangles.iter().enumerate() {
        for v in tri.vertices() {
            corners.push(v);
        }
        rv_of.entry((tri.rv[0], tri.rv[1])).or_default().push(idx);
    }
    corners.sort_unstable();
    corners.dedup();

    let mut t_half = Vec::new();
    let mut mate_half = Vec::new();
    for &(x, y) in &corners {
        if excluded.contains(&(x, y)) {
            continue;
        }
        let owners = rv_of.get(&(x, y)).map_or(&[][..], Vec::as_slice);
        if owners.len() != 1 {
            return Err(TessError::RightAngleCoverageViolated { x, y, count: owners.len() });
        }
        let k = t.triangles[owners[0]].k;
        let sym = (x + y).rem_euclid(n) as u16;
        let mate_sym = (x + y + k).rem_euclid(n) as u16;
        t_half.push(Triple::new(x as u16, y as u16, sym));
        mate_half.push(Triple::new(x as u16, y as u16, mate_sym));
    }
    let t_half = Pls::from_triples(n as usize, t_half).expect("corner cells are in range");
    // A repeated symbol in a mate row or column means that line's symbol
    // sets cannot match the trade half, so report the matching axiom.
    let mate_half = Pls::from_triples(n as usize, mate_half).map_err(|e| {
        let axiom = match e {
            crate::pls::PlsError::ColConflict { .. } => {
                crate::trades::BitradeAxiom::ColSymbolsDiffer
            }
            _ => crate::trades::BitradeAxiom::RowSymbolsDiffer,
        };
        TradeError::InvalidBitrade { axiom }
    })?;
    Ok(Bitrade::new(t_half, mate_half)?)
}

fn push_square(x0: i64, y0: i64, side: i64, out: &mut Vec<GoodTriangle>) {
    out.push(GoodTriangle::new(x0, y0, side));
    out.push(GoodTriangle::new(x0 + side, y0 + side, -side));
}

/// Tiles the rectangle `[x0,x1]×[y0,y1]` by repeatedly cutting the largest
/// square off the high end of the longer dimension and splitting each
/// square along its gradient −1 diagonal.
pub(crate) fn tile_rect_into(
    x0: i64,
    y0: i64,
    mut x1: i64,
    mut y1: i64,
    out: &mut Vec<GoodTriangle>,
) {
    while x1 > x0 && y1 > y0 {
        let (w, h) = (x1 - x0, y1 - y0);
        if w <= h {
            push_square(x0, y1 - w, w, out);
            y1 -= w;
        } else {
            push_square(x1 - h, y0, h, out);
            x1 -= h;
        }
    }
}

/// A tessellation of the `w×h` rectangle with corner at the origin by
/// maximal squares, each split into two good triangles.
pub fn tessellate_rectangle(w: usize, h: usize) -> Tessellation {
    assert!(w >= 1 && h >= 1, "rectangle sides must be positive");
    let mut triangles = Vec::new();
    tile_rect_into(0, 0, w as i64, h as i64, &mut triangles);
    let t = Tessellation {
        region: Region::Rect { x0: 0, y0: 0, x1: w as i64, y1: h as i64 },
        triangles,
    };
    debug_assert_eq!(validate_tessellation(&t), Ok(()));
    t
}

/// The 7-piece tiling of the corner triangle used when `2 ≤ 2m < n < 3m`:
/// a split `m×m` square at the origin, the two large corner pieces, a split
/// `(n−2m)` square, and a tiled `(3m−n)×(n−2m)` rectangle.
pub fn doubletool_tessellation(m: usize, n: usize) -> Result<Tessellation, TessError> {
    let (mi, ni) = (m as i64, n as i64);
    if !(2 <= 2 * mi && 2 * mi < ni && ni < 3 * mi) {
        return Err(param_err(format!("need 2 ≤ 2m < n < 3m, got m={m}, n={n}")));
    }
    let mut triangles = vec![
        GoodTriangle::new(0, 0, mi),
        GoodTriangle::new(mi, mi, -mi),
        GoodTriangle::new(mi, 0, ni - mi),
        GoodTriangle::new(0, ni - mi, mi),
        GoodTriangle::new(3 * mi - ni, mi, ni - 2 * mi),
        GoodTriangle::new(mi, ni - mi, 2 * mi - ni),
    ];
    tile_rect_into(0, mi, 3 * mi - ni, ni - mi, &mut triangles);
    let t = Tessellation { region: Region::Corner { n: ni }, triangles };
    debug_assert_eq!(validate_tessellation(&t), Ok(()));
    Ok(t)
}

/// The trade compiled from [`doubletool_tessellation`]. It contains the
/// four triples `(0,0;0)`, `(m,0;m)`, `(m,m;2m)`, `(m,n−m;0)`; every other
/// cell `(r,c)` has `0 ≤ r ≤ 3m−n` and `m ≤ c ≤ n−m`.
pub fn doubletool(m: usize, n: usize) -> Result<Bitrade, TessError> {
    tessellation_to_trade(&doubletool_tessellation(m, n)?)
}

/// The 7-piece tiling of the corner triangle used when `n > 3m ≥ 3`: two
/// stacked split `m×m` squares at the origin, the two large corner pieces,
/// and a tiled `m×(n−3m)` rectangle.
pub fn tripletool_tessellation(m: usize, n: usize) -> Result<Tessellation, TessError> {
    let (mi, ni) = (m as i64, n as i64);
    if !(ni > 3 * mi && 3 * mi >= 3) {
        return Err(param_err(format!("need n > 3m ≥ 3, got m={m}, n={n}")));
    }
    let mut triangles = vec![
        GoodTriangle::new(0, 0, mi),
        GoodTriangle::new(mi, mi, -mi),
        GoodTriangle::new(0, mi, mi),
        GoodTriangle::new(mi, 2 * mi, -mi),
        GoodTriangle::new(0, ni - mi, mi),
        GoodTriangle::new(mi, 0, ni - mi),
    ];
    tile_rect_into(0, 2 * mi, mi, ni - mi, &mut triangles);
    let t = Tessellation { region: Region::Corner { n: ni }, triangles };
    debug_assert_eq!(validate_tessellation(&t), Ok(()));
    Ok(t)
}

/// The trade compiled from [`tripletool_tessellation`]. It contains the
/// four triples `(0,0;0)`, `(m,0;m)`, `(m,m;2m)`, `(0,m;m)`; every other
/// cell `(r,c)` has `0 ≤ r ≤ m` and `2m ≤ c ≤ n−m`.
pub fn tripletool(m: usize, n: usize) -> Result<Bitrade, TessError> {
    tessellation_to_trade(&tripletool_tessellation(m, n)?)
}

/// Squares `(x0, y0, side)` refining an `(m+3)×m` rectangle (width `m+3`
/// along x, height `m` along y) down to a `2(k+3)×2k` sub-rectangle at
/// `(m−2k−3, 0)`, where `k = ⌊(m−3)/4⌋`. Requires `m ≥ 7` so `k ≥ 1`.
fn refinement_squares(m: i64) -> Vec<(i64, i64, i64)> {
    debug_assert!(m >= 7);
    let k = (m - 3) / 4;
    match m % 4 {
        3 => vec![(0, 2 * k, 2 * k + 3), (2 * k + 3, 2 * k, 2 * k + 3), (0, 0, 2 * k)],
        0 => vec![
            (0, 2 * k + 1, 2 * k + 3),
            (2 * k + 3, 2 * k, 2 * k + 4),
            (0, 0, 2 * k + 1),
            (2 * k + 1, 2 * k, 1),
            (2 * k + 2, 2 * k, 1),
        ],
        1 => vec![
            (0, 2 * k + 2, 2 * k + 3),
            (2 * k + 3, 2 * k, 2 * k + 5),
            (0, 0, 2 * k + 2),
            (2 * k + 2, 2 * k + 1, 1),
            (2 * k + 2, 2 * k, 1),
        ],
        _ => vec![(0, 2 * k + 3, 2 * k + 3), (0, 0, 2 * k + 3), (2 * k + 3, 2 * k, 2 * k + 6)],
    }
}

/// Builds a trade of the odd-order cyclic square that stays sparse on the
/// low diagonal band: the trade meets the union of diagonals
/// `0..=n−⌈4n/x⌉−30` at most `10·log₄(2x)` times, and the exact meeting
/// count is returned alongside the trade.
///
/// The corner triangle is split into two large triangles and a central
/// `(m_0+3)×m_0` rectangle with `m_0 = (n−3)/2`; the rectangle is refined
/// through shrinking halved copies (`m_{i+1} = ⌊(m_i−3)/4⌋`, square side
/// doubling per stage) until the refined rectangle both meets the sparsity
/// threshold `m_a ≤ n/x+6` and is small enough to translate into the gap
/// above the protected band; the translation is applied as a column/symbol
/// shift of the compiled trade.
pub fn sparse_trade(n: usize, x: usize) -> Result<(Bitrade, usize), TessError> {
    let (ni, xi) = (n as i64, x as i64);
    if n % 2 == 0 {
        return Err(param_err(format!("order {n} is even, the split needs odd n")));
    }
    if xi < 1 || xi > ni {
        return Err(param_err(format!("x={x} must lie in 1..={n}")));
    }
    if ni * (xi - 4) < 30 * xi {
        return Err(param_err(format!("n − 4n/x ≥ 30 fails for n={n}, x={x}")));
    }
    // Protected band: diagonals 0..=K.
    let k_band = ni - (4 * ni + xi - 1) / xi - 30;
    debug_assert!(k_band >= 0);

    // Shrinking rectangle heights; stop at the sparsity threshold m ≤ n/x+6.
    let mut ms = vec![(ni - 3) / 2];
    while ms.last().unwrap() * xi > ni + 6 * xi {
        ms.push((ms.last().unwrap() - 3) / 4);
    }
    // Deepen until the final rectangle fits above the band; the occupied
    // diagonal span 2^a(2m_a+3) shrinks strictly with each extra stage.
    let depth = loop {
        let a = ms.len() - 1;
        if (1i64 << a) * (2 * ms[a] + 3) <= ni - k_band - 2 {
            break a;
        }
        if ms[a] < 7 {
            return Err(param_err(format!(
                "no refinement depth fits the free diagonal span for n={n}, x={x}"
            )));
        }
        ms.push((ms[a] - 3) / 4);
    };

    let m0 = ms[0];
    let mut triangles = vec![
        GoodTriangle::new(m0 + 3, 0, m0),
        GoodTriangle::new(0, m0, m0 + 3),
    ];
    let (mut rx, ry) = (0i64, 0i64);
    let (mut rw, mut rh) = (m0 + 3, m0);
    for i in 1..=depth {
        let scale = 1i64 << (i - 1);
        let (m_prev, k) = (ms[i - 1], ms[i]);
        for (qx, qy, side) in refinement_squares(m_prev) {
            push_square(rx + scale * qx, ry + scale * qy, scale * side, &mut triangles);
        }
        rx += scale * (m_prev - 2 * k - 3);
        rw = 2 * scale * (k + 3);
        rh = 2 * scale * k;
        debug_assert_eq!((rw, rh), ((1 << i) * (ms[i] + 3), (1 << i) * ms[i]));
    }
    tile_rect_into(rx, ry, rx + rw, ry + rh, &mut triangles);

    let tess = Tessellation { region: Region::Corner { n: ni }, triangles };
    let trade = tessellation_to_trade(&tess)?;

    // Translate columns so the final rectangle's lowest diagonal (column
    // minus row) lands just past the protected band.
    let delta = (k_band + 1 - (ry - rx - rw)).rem_euclid(ni);
    let trade = trade.shifted(Shift::new(0, delta));

    let count = trade
        .t()
        .iter()
        .filter(|t| (t.col as i64 - t.row as i64).rem_euclid(ni) <= k_band)
        .count();
    let limit = 10.0 * (2.0 * x as f64).ln() / 4f64.ln();
    if count as f64 > limit {
        return Err(TessError::IntersectionBoundExceeded { count, limit });
    }
    Ok((trade, count))
}
