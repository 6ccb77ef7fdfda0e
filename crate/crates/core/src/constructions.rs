//! Named partial squares inside the cyclic square — the diagonal-band set
//! `P_n`, the banded critical set `Q_n`, generic diagonal unions, the
//! four-piece critical-set partition for even orders — plus the witness
//! trades that certify how sparsely each named set can meet a trade.

use crate::pls::{back_circulant, diagonal, shift_unchecked, transpose, Pls, Shift, Triple};
use crate::completion::complete_up_to;
use crate::tessellation::{
    doubletool, tessellation_to_trade, tripletool, GoodTriangle, Region, Tessellation,
};
use crate::trades::{Bitrade, Intercalate};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("order {n} is below the minimum {min} for this construction")]
    OrderTooSmall { n: usize, min: usize },
    #[error("diagonal index {k} is out of range for order {n}")]
    IndexRange { k: usize, n: usize },
    #[error("order {n} is odd, this construction needs an even order")]
    OddOrder { n: usize },
    #[error("triple {triple} does not lie in the diagonal-band set")]
    NotInP { triple: Triple },
    #[error("triple {triple} does not lie in the banded critical set")]
    NotInQ { triple: Triple },
}

/// Width parameter shared by the banded sets: `⌈(n−3)/2⌉`.
fn band(n: usize) -> usize {
    (n - 2) / 2
}

/// The union of the broken diagonals `0..=⌈(n−3)/2⌉` of the cyclic square:
/// cells `(r, r+d)` with symbol `r+d`, one band of diagonals wide enough
/// that, with its shifts, every row and column is majority-covered.
pub fn build_p(n: usize) -> Pls {
    assert!(n >= 2, "the diagonal band needs order at least 2");
    let mut triples = Vec::new();
    for d in 0..=band(n) {
        triples.extend(diagonal(n, d as u16).triples().iter().copied());
    }
    Pls::from_triples(n, triples).expect("diagonals are disjoint and valid")
}

/// The clipped triangular band `{(i, j; i+j mod n) : 1 ≤ i ≤ j ≤ i+⌈(n−3)/2⌉,
/// j ≤ n−1}`: the part of the diagonal band strictly below row 0 that does
/// not wrap past the last column.
pub fn build_q(n: usize) -> Result<Pls, ConstructError> {
    if n < 3 {
        return Err(ConstructError::OrderTooSmall { n, min: 3 });
    }
    let mut triples = Vec::new();
    for i in 1..n {
        for j in i..=(i + band(n)).min(n - 1) {
            triples.push(Triple::new(i as u16, j as u16, ((i + j) % n) as u16));
        }
    }
    Ok(Pls::from_triples(n, triples).expect("distinct in-range cells"))
}

/// The union of the broken diagonals `0..=k`.
pub fn build_qk(n: usize, k: usize) -> Result<Pls, ConstructError> {
    if k >= n {
        return Err(ConstructError::IndexRange { k, n });
    }
    let mut triples = Vec::new();
    for d in 0..=k {
        triples.extend(diagonal(n, d as u16).triples().iter().copied());
    }
    Ok(Pls::from_triples(n, triples).expect("diagonals are disjoint and valid"))
}

/// Splits the even-order cyclic square into four disjoint pieces of size
/// `n²/4` whose union is the whole square: a staircase pair of triangles
/// and its three translates by half-order row/column shifts. Each piece is
/// a critical set, and each 2×2 subsquare on half-order spaced rows and
/// columns meets each piece exactly once.
pub fn build_c_partition(n: usize) -> Result<[Pls; 4], ConstructError> {
    if n % 2 != 0 || n == 0 {
        return Err(ConstructError::OddOrder { n });
    }
    let m = n / 2;
    let mut c1 = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i + j <= m - 1 {
                c1.push(Triple::new(i as u16, j as u16, ((i + j) % n) as u16));
            }
        }
    }
    for i in m..n {
        for j in m..n {
            if i + j >= 3 * m {
                c1.push(Triple::new(i as u16, j as u16, ((i + j) % n) as u16));
            }
        }
    }
    let c1 = Pls::from_triples(n, c1).expect("distinct in-range cells");
    let h = m as i64;
    let c2 = shift_unchecked(&c1, Shift::new(0, h));
    let c3 = shift_unchecked(&c1, Shift::new(h, 0));
    let c4 = shift_unchecked(&c1, Shift::new(h, h));
    Ok([c1, c2, c3, c4])
}

/// The order-reversing symmetry `(i, j; s) ↦ (n−j, n−i; n−s)` (indices mod
/// `n`). It is an involution, fixes the cyclic square, maps trades to
/// trades, and fixes the banded critical set.
pub fn anti_transpose(p: &Pls) -> Pls {
    let n = p.n() as i64;
    let flip = |v: u16| -> u16 { ((n - v as i64) % n) as u16 };
    let triples: Vec<Triple> =
        p.iter().map(|t| Triple::new(flip(t.col), flip(t.row), flip(t.sym))).collect();
    Pls::from_triples(p.n(), triples).expect("bijective relabeling preserves validity")
}

/// The cell order in which the complement of the banded critical set fills
/// by forced single-candidate steps: the unbanded upper diagonals from the
/// band edge outward (each bottom-up), the top-right corner, then each
/// column from the last to the first (below the main diagonal top-down,
/// then its row-0 cell).
pub fn qn_completion_sequence(n: usize) -> Result<Vec<(u16, u16)>, ConstructError> {
    if n < 3 {
        return Err(ConstructError::OrderTooSmall { n, min: 3 });
    }
    let mut seq = Vec::with_capacity(n * n);
    for o in band(n) + 1..=n.saturating_sub(2) {
        for r in 1..=n - 1 - o {
            seq.push((r as u16, (r + o) as u16));
        }
    }
    seq.push((0, (n - 1) as u16));
    for c in (0..=n - 2).rev() {
        for r in c + 1..n {
            seq.push((r as u16, c as u16));
        }
        seq.push((0, c as u16));
    }
    Ok(seq)
}

fn transpose_bitrade(b: &Bitrade) -> Bitrade {
    Bitrade::new(transpose(b.t()), transpose(b.t_mate()))
        .expect("transposition preserves the trade axioms")
}

fn anti_transpose_bitrade(b: &Bitrade) -> Bitrade {
    Bitrade::new(anti_transpose(b.t()), anti_transpose(b.t_mate()))
        .expect("the order-reversing symmetry preserves the trade axioms")
}

/// A trade of the cyclic square through `e` that meets the diagonal-band
/// set exactly twice.
///
/// For even orders the 2×2 subsquare on rows `{i, i+n/2}` and columns
/// `{j, j+n/2}` does it directly: its four cells sit on two diagonals half
/// an order apart, exactly one of which lies in the band. For odd orders
/// the element is first moved to row 0 by a diagonal shift, reflected into
/// the upper half of the band if needed, and then one of three corner
/// tilings supplies the trade; the normalization is undone at the end.
pub fn witness_p(n: usize, e: Triple) -> Result<Bitrade, ConstructError> {
    let p = build_p(n);
    if !p.contains(&e) {
        return Err(ConstructError::NotInP { triple: e });
    }

    if n % 2 == 0 {
        let h = n / 2;
        let ic = Intercalate {
            i: (e.row as usize % h) as u16,
            j: (e.col as usize % h) as u16,
            n,
        };
        let w = ic.bitrade();
        debug_assert!(w.t().contains(&e));
        return Ok(w);
    }

    // Normalize to row 0: (i, j) ↦ (0, j−i) preserves the band.
    let i = e.row as i64;
    let j0 = (e.col as i64 - i).rem_euclid(n as i64) as usize;
    let nn = band(n); // (n−3)/2 for odd n
    // Reflect low band offsets into the upper half, where the corner
    // tilings stay clear of the band: transpose, then shift rows by
    // (n+3)/2, then renormalize to row 0.
    let reflect = j0 < nn.div_ceil(2);
    let (j1, r1) = if reflect {
        let r1 = (j0 + (n + 3) / 2) as i64;
        (nn - j0, r1)
    } else {
        (j0, 0)
    };

    let m = j1 + 1;
    let w = if 3 * j1 == n - 3 {
        // Two-row, three-column trade cycling three symbols.
        let (j1, m) = (j1 as u16, m as u16);
        let (c0, c1, c2) = (j1, 2 * j1 + 1, 3 * j1 + 2);
        let t = Pls::from_triples(
            n,
            [
                Triple::new(0, c0, c0),
                Triple::new(0, c1, c1),
                Triple::new(0, c2, c2),
                Triple::new(m, c0, c1),
                Triple::new(m, c1, c2),
                Triple::new(m, c2, c0),
            ],
        )
        .expect("distinct symbols in two rows");
        let t_mate = Pls::from_triples(
            n,
            [
                Triple::new(0, c0, c1),
                Triple::new(0, c1, c2),
                Triple::new(0, c2, c0),
                Triple::new(m, c0, c0),
                Triple::new(m, c1, c1),
                Triple::new(m, c2, c2),
            ],
        )
        .expect("distinct symbols in two rows");
        Bitrade::new(t, t_mate).expect("three-symbol two-row cycle is a trade")
    } else if 3 * j1 < n - 3 {
        tripletool(m, n)
            .expect("n > 3m holds in this branch")
            .shifted(Shift::new(0, j1 as i64))
    } else {
        doubletool(m, n)
            .expect("2m < n < 3m holds in this branch")
            .shifted(Shift::new(0, j1 as i64))
    };

    // Undo the normalization; each symmetry fixes the band setwise.
    let w = if reflect {
        let back = w.shifted(Shift::new(r1, r1));
        transpose_bitrade(&back.shifted(Shift::new(-((n as i64 + 3) / 2), 0)))
    } else {
        w
    };
    let w = w.shifted(Shift::new(i, i));

    debug_assert!(w.t().contains(&e));
    debug_assert_eq!(w.t().intersection(&p).len(), 2);
    Ok(w)
}

/// A trade of the cyclic square meeting the banded critical set only at
/// `e`.
///
/// Elements past the anti-diagonal are first reflected by the
/// order-reversing symmetry. Elements in the right half of the square use
/// a direct trade (a 2×2 subsquare when the order is even, a two-plus-two
/// row pattern when odd). Elements in the left half compile an A-shaped
/// corner tiling and shift it into place; when that trade happens to touch
/// the band more than once, a second completion of the band with `e`
/// replaced supplies a correct trade instead.
pub fn witness_q(n: usize, e: Triple) -> Result<Bitrade, ConstructError> {
    let q = build_q(n)?;
    if !q.contains(&e) {
        return Err(ConstructError::NotInQ { triple: e });
    }

    let flipped = (e.row as usize) + (e.col as usize) > n;
    let e1 = if flipped {
        let ni = n as i64;
        let flip = |v: u16| ((ni - v as i64) % ni) as u16;
        Triple::new(flip(e.col), flip(e.row), flip(e.sym))
    } else {
        e
    };
    debug_assert!(q.contains(&e1));

    let (i, j) = (e1.row as usize, e1.col as usize);
    let w = if 2 * j >= n {
        if n % 2 == 0 {
            let h = n / 2;
            Intercalate { i: (i % h) as u16, j: (j % h) as u16, n }.bitrade()
        } else {
            odd_far_witness(n, i, j)
        }
    } else {
        near_witness(n, &q, e1)
    };

    let w = if flipped { anti_transpose_bitrade(&w) } else { w };
    debug_assert_eq!(w.t().intersection(&q).triples(), [e]);
    Ok(w)
}

/// Far-column odd-order witness: swap `e`'s symbol with the one a
/// half-band left of it in its own row, and rotate two full row segments
/// below to absorb the swap.
fn odd_far_witness(n: usize, i: usize, j: usize) -> Bitrade {
    let half = (n - 1) / 2;
    let b = |r: usize, c: usize| ((r + c) % n) as u16;
    let r1 = (i + half) % n;
    let r2 = (i + half + 1) % n;
    let mut t = Vec::new();
    let mut t_mate = Vec::new();

    t.push(Triple::new(i as u16, j as u16, b(i, j)));
    t_mate.push(Triple::new(i as u16, j as u16, b(i, j - half)));
    t.push(Triple::new(i as u16, (j - half) as u16, b(i, j - half)));
    t_mate.push(Triple::new(i as u16, (j - half) as u16, b(i, j)));

    for c in j - half..=j {
        t.push(Triple::new(r1 as u16, c as u16, b(r1, c)));
        let mate = if c == j { b(r1, j - half) } else { b(r1, c + 1) };
        t_mate.push(Triple::new(r1 as u16, c as u16, mate));

        t.push(Triple::new(r2 as u16, c as u16, b(r2, c)));
        let mate = if c == j - half { b(r2, j) } else { b(r2, c - 1) };
        t_mate.push(Triple::new(r2 as u16, c as u16, mate));
    }
    let t = Pls::from_triples(n, t).expect("row segments of the cyclic square");
    let t_mate = Pls::from_triples(n, t_mate).expect("rotated row segments");
    Bitrade::new(t, t_mate).expect("segment rotation is a trade")
}

/// Near-column witness: compile an A-shaped four-piece-plus-rectangle
/// tiling of the corner triangle whose waist matches `e`'s band offset,
/// shift it onto `e`, and fall back to a completion-extracted difference
/// trade when the tiling meets the band elsewhere too.
fn near_witness(n: usize, q: &Pls, e: Triple) -> Bitrade {
    let (i, j) = (e.row as i64, e.col as i64);
    let a = j - i + 1;
    let b = n as i64 - a;
    debug_assert!(a >= 1 && 2 * a < n as i64);
    let mut triangles = vec![
        GoodTriangle::new(0, 0, a),
        GoodTriangle::new(a, a, -a),
        GoodTriangle::new(0, a, b),
        GoodTriangle::new(b, 0, a),
    ];
    crate::tessellation::tile_rect_into(a, 0, b, a, &mut triangles);
    let tess = Tessellation { region: Region::Corner { n: n as i64 }, triangles };
    let w = tessellation_to_trade(&tess)
        .expect("the A-shaped tiling is valid and right-angle exact")
        .shifted(Shift::new(i, i - 1));
    debug_assert!(w.t().contains(&e));
    if w.t().intersection(q).len() == 1 {
        return w;
    }

    // The tiling grazes the band. Replace e's symbol and complete the rest
    // of the band; the difference with the cyclic square is a trade that
    // meets the band exactly at e.
    let l = back_circulant(n);
    let mut base = q.clone();
    base.remove(e.row, e.col).expect("e lies in the band");
    for s in 0..n as u16 {
        if s == e.sym {
            continue;
        }
        let mut start = base.clone();
        if start.insert(Triple::new(e.row, e.col, s)).is_err() {
            continue;
        }
        if let Some(w) = complete_up_to(&start, 1).into_iter().next() {
            return crate::trades::extract_difference(&l, &w);
        }
    }
    unreachable!("the band minus one cell always completes to another square")
}
