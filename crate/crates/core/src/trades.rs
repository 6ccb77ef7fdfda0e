//! Latin bitrades: validation, intercalates, difference and row-swap
//! trades, exhaustive enumeration at small order, and extraction of trades
//! meeting a partial square a bounded number of times.

use crate::completion::{all_latin_squares, complete_up_to, count_completions, CountClass};
use crate::pls::{back_circulant, LatinSquare, Pls, Shift, Triple};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

/// Largest order for which exhaustive trade enumeration is offered.
pub const MAX_ENUM_ORDER: usize = 5;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TradeError {
    #[error("the two squares are identical, so they admit no difference trade")]
    IdenticalSquares,
    #[error("order {n} is odd, intercalates require an even order")]
    OddOrder { n: usize },
    #[error("order {n} exceeds the trade enumeration limit {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("not a bitrade: {axiom}")]
    InvalidBitrade { axiom: BitradeAxiom },
}

/// The first bitrade requirement a pair of partial squares violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitradeAxiom {
    /// The halves have different orders.
    OrderMismatch,
    /// Some triple lies in both halves.
    NotDisjoint,
    /// The halves occupy different cell sets.
    CellSetsDiffer,
    /// Some row carries different symbol sets in the two halves.
    RowSymbolsDiffer,
    /// Some column carries different symbol sets in the two halves.
    ColSymbolsDiffer,
    /// Both halves are empty.
    Empty,
}

impl fmt::Display for BitradeAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            BitradeAxiom::OrderMismatch => "the halves have different orders",
            BitradeAxiom::NotDisjoint => "the halves share a triple",
            BitradeAxiom::CellSetsDiffer => "the halves occupy different cells",
            BitradeAxiom::RowSymbolsDiffer => "a row has different symbol sets",
            BitradeAxiom::ColSymbolsDiffer => "a column has different symbol sets",
            BitradeAxiom::Empty => "both halves are empty",
        };
        f.write_str(msg)
    }
}

/// Checks the bitrade axioms: triple-disjoint halves on a common non-empty
/// cell set, with matching symbol sets in every row and every column.
/// Returns the first violated axiom.
pub fn validate_bitrade(t: &Pls, t_mate: &Pls) -> Result<(), BitradeAxiom> {
    if t.n() != t_mate.n() {
        return Err(BitradeAxiom::OrderMismatch);
    }
    for a in t.iter() {
        if t_mate.contains(&a) {
            return Err(BitradeAxiom::NotDisjoint);
        }
    }
    let cells_a: Vec<(u16, u16)> = t.iter().map(|x| (x.row, x.col)).collect();
    let cells_b: Vec<(u16, u16)> = t_mate.iter().map(|x| (x.row, x.col)).collect();
    if cells_a != cells_b {
        return Err(BitradeAxiom::CellSetsDiffer);
    }
    let line_symbols = |p: &Pls, by_row: bool| -> HashMap<u16, Vec<u16>> {
        let mut m: HashMap<u16, Vec<u16>> = HashMap::new();
        for x in p.iter() {
            let line = if by_row { x.row } else { x.col };
            m.entry(line).or_default().push(x.sym);
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    };
    if line_symbols(t, true) != line_symbols(t_mate, true) {
        return Err(BitradeAxiom::RowSymbolsDiffer);
    }
    if line_symbols(t, false) != line_symbols(t_mate, false) {
        return Err(BitradeAxiom::ColSymbolsDiffer);
    }
    if t.is_empty() {
        return Err(BitradeAxiom::Empty);
    }
    Ok(())
}

/// A Latin trade with its disjoint mate. Construction validates the axioms,
/// so a value of this type is always a genuine bitrade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitrade {
    t: Pls,
    t_mate: Pls,
}

impl Bitrade {
    pub fn new(t: Pls, t_mate: Pls) -> Result<Bitrade, TradeError> {
        validate_bitrade(&t, &t_mate).map_err(|axiom| TradeError::InvalidBitrade { axiom })?;
        Ok(Bitrade { t, t_mate })
    }

    pub fn t(&self) -> &Pls {
        &self.t
    }

    pub fn t_mate(&self) -> &Pls {
        &self.t_mate
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    /// Number of cells in each half.
    pub fn size(&self) -> usize {
        self.t.len()
    }

    /// Applies a row/column/symbol shift to both halves.
    ///
    /// Shifting acts cellwise by a bijection of rows, columns, and symbols,
    /// so every axiom is preserved.
    pub fn shifted(&self, sh: Shift) -> Bitrade {
        let out = Bitrade {
            t: crate::pls::shift_unchecked(&self.t, sh),
            t_mate: crate::pls::shift_unchecked(&self.t_mate, sh),
        };
        debug_assert!(validate_bitrade(&out.t, &out.t_mate).is_ok());
        out
    }
}

/// Builds the difference trade of two distinct Latin squares of one order:
/// the restriction of each square to the cells where they disagree.
pub fn difference_trade(l: &LatinSquare, l2: &LatinSquare) -> Result<Bitrade, TradeError> {
    assert_eq!(l.n(), l2.n(), "difference trade requires equal orders");
    if l == l2 {
        return Err(TradeError::IdenticalSquares);
    }
    Ok(extract_difference(l, l2))
}

/// Difference trade of two squares already known to be distinct.
pub(crate) fn extract_difference(l: &LatinSquare, l2: &LatinSquare) -> Bitrade {
    let n = l.n();
    let mut t = Vec::new();
    let mut t_mate = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let (a, b) = (l.get(r as u16, c as u16), l2.get(r as u16, c as u16));
            if a != b {
                t.push(Triple::new(r as u16, c as u16, a));
                t_mate.push(Triple::new(r as u16, c as u16, b));
            }
        }
    }
    let t = Pls::from_triples(n, t).expect("restriction of a Latin square");
    let t_mate = Pls::from_triples(n, t_mate).expect("restriction of a Latin square");
    Bitrade::new(t, t_mate).expect("difference of distinct Latin squares is a bitrade")
}

/// The trade formed by swapping two rows of a Latin square. Distinct rows
/// disagree in every column, so the trade has exactly `2n` cells.
pub fn row_swap_trade(l: &LatinSquare, r1: usize, r2: usize) -> Bitrade {
    let n = l.n();
    assert!(r1 < n && r2 < n && r1 != r2, "rows must be distinct and in range");
    let mut t = Vec::new();
    let mut t_mate = Vec::new();
    for c in 0..n {
        t.push(Triple::new(r1 as u16, c as u16, l.get(r1 as u16, c as u16)));
        t.push(Triple::new(r2 as u16, c as u16, l.get(r2 as u16, c as u16)));
        t_mate.push(Triple::new(r1 as u16, c as u16, l.get(r2 as u16, c as u16)));
        t_mate.push(Triple::new(r2 as u16, c as u16, l.get(r1 as u16, c as u16)));
    }
    let t = Pls::from_triples(n, t).expect("two rows of a Latin square");
    let t_mate = Pls::from_triples(n, t_mate).expect("two swapped rows of a Latin square");
    Bitrade::new(t, t_mate).expect("swapping two rows yields a bitrade")
}

/// One 2×2 subsquare of the cyclic square of even order `n`: the four cells
/// on rows `{i, i+n/2}` and columns `{j, j+n/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Intercalate {
    pub i: u16,
    pub j: u16,
    pub n: usize,
}

impl Intercalate {
    pub fn cells(&self) -> [(u16, u16); 4] {
        let h = (self.n / 2) as u16;
        let (i, j) = (self.i, self.j);
        [(i, j), (i, j + h), (i + h, j), (i + h, j + h)]
    }

    /// The four cyclic-square triples of the subsquare.
    pub fn triples(&self) -> [Triple; 4] {
        let n = self.n as u32;
        self.cells()
            .map(|(r, c)| Triple::new(r, c, ((r as u32 + c as u32) % n) as u16))
    }

    /// The mate: the same four cells with the two symbols exchanged.
    pub fn mate_triples(&self) -> [Triple; 4] {
        let n = self.n as u32;
        let h = (self.n / 2) as u32;
        self.cells()
            .map(|(r, c)| Triple::new(r, c, ((r as u32 + c as u32 + h) % n) as u16))
    }

    pub fn bitrade(&self) -> Bitrade {
        let t = Pls::from_triples(self.n, self.triples()).expect("subsquare of B_n");
        let t_mate = Pls::from_triples(self.n, self.mate_triples()).expect("swapped subsquare");
        Bitrade::new(t, t_mate).expect("a 2×2 subsquare swap is a bitrade")
    }
}

/// The `(n/2)²` pairwise-disjoint intercalates that partition the cyclic
/// square of even order `n`, anchors in row-major order.
pub fn intercalates_of_bn(n: usize) -> Result<Vec<Intercalate>, TradeError> {
    if n % 2 != 0 || n == 0 {
        return Err(TradeError::OddOrder { n });
    }
    let h = n / 2;
    let mut out = Vec::with_capacity(h * h);
    for i in 0..h {
        for j in 0..h {
            out.push(Intercalate { i: i as u16, j: j as u16, n });
        }
    }
    Ok(out)
}

/// Compact reference to one difference trade of a fixed base square:
/// the cell set as a bitmask over `r*n+c` plus the index of the other
/// square. Valid only for orders with at most 32 cells.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TradeRef {
    pub size: u8,
    pub mask: u32,
    pub other: u32,
}

/// Every difference trade of one base square, over all Latin squares of its
/// order, sorted by size then cell list then mate symbols.
pub(crate) struct TradeList {
    pub n: usize,
    pub base: LatinSquare,
    pub squares: Arc<Vec<LatinSquare>>,
    pub refs: Vec<TradeRef>,
    minimal: OnceLock<Vec<u32>>,
}

/// Compares two equal-popcount cell masks by their ascending cell lists.
fn mask_lex(a: u32, b: u32) -> std::cmp::Ordering {
    let (mut a, mut b) = (a, b);
    while a != 0 && b != 0 {
        let (ta, tb) = (a.trailing_zeros(), b.trailing_zeros());
        match ta.cmp(&tb) {
            std::cmp::Ordering::Equal => {
                a &= a - 1;
                b &= b - 1;
            }
            other => return other,
        }
    }
    a.count_ones().cmp(&b.count_ones())
}

impl TradeList {
    fn build(base: &LatinSquare) -> TradeList {
        let n = base.n();
        let squares = cached_squares(n);
        let base_cells = base.cells();
        let mut refs = Vec::with_capacity(squares.len().saturating_sub(1));
        for (idx, sq) in squares.iter().enumerate() {
            if sq.cells() == base_cells {
                continue;
            }
            let mut mask = 0u32;
            for (pos, (&a, &b)) in base_cells.iter().zip(sq.cells()).enumerate() {
                if a != b {
                    mask |= 1 << pos;
                }
            }
            refs.push(TradeRef { size: mask.count_ones() as u8, mask, other: idx as u32 });
        }
        let mate_key = |r: &TradeRef| -> Vec<u16> {
            let other = &squares[r.other as usize];
            let mut mask = r.mask;
            let mut key = Vec::with_capacity(r.size as usize);
            while mask != 0 {
                let pos = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                key.push(other.cells()[pos]);
            }
            key
        };
        refs.sort_by(|a, b| {
            a.size
                .cmp(&b.size)
                .then_with(|| mask_lex(a.mask, b.mask))
                .then_with(|| mate_key(a).cmp(&mate_key(b)))
        });
        TradeList { n, base: base.clone(), squares, refs, minimal: OnceLock::new() }
    }

    /// Indices of the refs whose cell set contains no other trade's cell set
    /// as a proper subset.
    ///
    /// For difference trades of one base square, triple containment between
    /// the trade halves taken from the base coincides with cell containment,
    /// and every trade contains a minimal one, so testing only against
    /// already-kept minimal masks is sufficient.
    pub fn minimal_indices(&self) -> &[u32] {
        self.minimal.get_or_init(|| {
            let mut minimal_masks: Vec<u32> = Vec::new();
            let mut keep = Vec::new();
            for (idx, r) in self.refs.iter().enumerate() {
                let dominated = minimal_masks
                    .iter()
                    .any(|&m| m != r.mask && m & r.mask == m);
                if !dominated {
                    // Refs sharing a cell set are adjacent in the sort.
                    if minimal_masks.last() != Some(&r.mask) {
                        minimal_masks.push(r.mask);
                    }
                    keep.push(idx as u32);
                }
            }
            keep
        })
    }

    pub fn materialize(&self, r: &TradeRef) -> Bitrade {
        let other = &self.squares[r.other as usize];
        let n = self.n;
        let mut t = Vec::with_capacity(r.size as usize);
        let mut t_mate = Vec::with_capacity(r.size as usize);
        let mut mask = r.mask;
        while mask != 0 {
            let pos = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let (row, col) = ((pos / n) as u16, (pos % n) as u16);
            t.push(Triple::new(row, col, self.base.cells()[pos]));
            t_mate.push(Triple::new(row, col, other.cells()[pos]));
        }
        let t = Pls::from_triples(n, t).expect("restriction of a Latin square");
        let t_mate = Pls::from_triples(n, t_mate).expect("restriction of a Latin square");
        Bitrade::new(t, t_mate).expect("difference of distinct Latin squares")
    }
}

static SQUARES_CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<LatinSquare>>>>> = OnceLock::new();
static TRADES_CACHE: OnceLock<Mutex<HashMap<(usize, Vec<u16>), Arc<TradeList>>>> =
    OnceLock::new();

/// All Latin squares of order `n ≤ 5`, cached after the first call.
pub(crate) fn cached_squares(n: usize) -> Arc<Vec<LatinSquare>> {
    assert!(n <= MAX_ENUM_ORDER);
    let cache = SQUARES_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(all_latin_squares(n)))
        .clone()
}

/// The cached trade list of `base`, or `OrderTooLarge` past the enumeration
/// limit.
pub(crate) fn trade_list_for(base: &LatinSquare) -> Result<Arc<TradeList>, TradeError> {
    let n = base.n();
    if n > MAX_ENUM_ORDER {
        return Err(TradeError::OrderTooLarge { n, max: MAX_ENUM_ORDER });
    }
    let cache = TRADES_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let key = (n, base.cells().to_vec());
    Ok(guard
        .entry(key)
        .or_insert_with(|| Arc::new(TradeList::build(base)))
        .clone())
}

/// Cell bitmask of a partial square at order ≤ 5 (bit `r*n+c`).
pub(crate) fn cell_mask(p: &Pls) -> u32 {
    debug_assert!(p.n() * p.n() <= 32);
    let n = p.n();
    let mut mask = 0u32;
    for t in p.iter() {
        mask |= 1 << (t.row as usize * n + t.col as usize);
    }
    mask
}

/// Enumerates every trade of `l`: one bitrade `l ∖ l2` per Latin square
/// `l2 ≠ l` of the same order. With `minimal_only`, trades whose cell set
/// properly contains another trade's cell set are dropped.
///
/// Output is sorted by size, then cell list, then mate symbols, so it does
/// not depend on enumeration internals.
pub fn enumerate_trades(l: &LatinSquare, minimal_only: bool) -> Result<Vec<Bitrade>, TradeError> {
    let list = trade_list_for(l)?;
    let out = if minimal_only {
        list.minimal_indices()
            .iter()
            .map(|&i| list.materialize(&list.refs[i as usize]))
            .collect()
    } else {
        list.refs.iter().map(|r| list.materialize(r)).collect()
    };
    Ok(out)
}

/// The size of the smallest trade in `l`. Exhaustive for order ≤ 5; for the
/// even-order cyclic square the intercalates settle it directly, since no
/// Latin trade has fewer than four cells.
pub fn smallest_trade_size(l: &LatinSquare) -> Result<usize, TradeError> {
    let n = l.n();
    assert!(n >= 2, "an order-1 square admits no trades");
    if n % 2 == 0 && *l == back_circulant(n) {
        return Ok(4);
    }
    let list = trade_list_for(l)?;
    Ok(list.refs.first().map(|r| r.size as usize).expect("order ≥ 2 admits trades"))
}

/// Searches for a trade of `l` meeting `d` in at most `k` triples, passing
/// through `e` when given. Returns `None` when no such trade exists.
///
/// `d` must be contained in `l` and `e`, if given, must lie in `d`. At
/// order ≤ 5 the sorted trade list is scanned and the first qualifying
/// trade returned. Otherwise deletion subsets of `d` of size `k` (with `e`
/// always among the deleted cells) are tried in lexicographic order; a
/// deletion admitting a second completion yields a difference trade that
/// avoids the retained cells.
pub fn trade_through(l: &LatinSquare, d: &Pls, k: usize, e: Option<Triple>) -> Option<Bitrade> {
    let n = l.n();
    assert_eq!(d.n(), n, "subset must share the square's order");
    assert!(
        d.iter().all(|t| l.get(t.row, t.col) == t.sym),
        "d must be contained in l"
    );
    if let Some(e) = e {
        assert!(d.contains(&e), "e must lie in d");
        assert!(k >= 1, "a trade through e meets d at least once");
    }

    if n <= MAX_ENUM_ORDER {
        let list = trade_list_for(l).expect("order within enumeration limit");
        let dmask = cell_mask(d);
        let emask = e.map(|e| 1u32 << (e.row as usize * n + e.col as usize));
        let found = list.refs.iter().find(|r| {
            (r.mask & dmask).count_ones() as usize <= k
                && emask.is_none_or(|m| r.mask & m != 0)
        });
        return found.map(|r| list.materialize(r));
    }

    // Deletion sweep. The retained set P is disjoint from any extracted
    // trade, so |T ∩ D| is at most the deletion size.
    let rest: Vec<Triple> = match e {
        Some(e) => d.iter().filter(|&t| t != e).collect(),
        None => d.iter().collect(),
    };
    let free = match e {
        Some(_) => k - 1,
        None => k,
    };
    let choose = free.min(rest.len());
    let mut combo: Vec<usize> = (0..choose).collect();
    loop {
        let mut p = d.clone();
        if let Some(e) = e {
            p.remove(e.row, e.col).expect("e lies in d");
        }
        for &idx in &combo {
            p.remove(rest[idx].row, rest[idx].col).expect("chosen from d");
        }
        let outcome = count_completions(&p);
        if outcome.class == CountClass::Multiple {
            match e {
                None => {
                    let w = outcome
                        .witnesses
                        .iter()
                        .find(|w| w.to_pls() != l.to_pls())
                        .expect("two distinct witnesses include one differing from l");
                    return Some(extract_difference(l, w));
                }
                Some(e) => {
                    if let Some(w) = outcome
                        .witnesses
                        .iter()
                        .find(|w| w.get(e.row, e.col) != e.sym)
                    {
                        return Some(extract_difference(l, w));
                    }
                    // Both witnesses agree with l at e; force a different
                    // symbol there and complete.
                    for s in 0..n as u16 {
                        if s == e.sym {
                            continue;
                        }
                        let mut forced = p.clone();
                        if forced.insert(Triple::new(e.row, e.col, s)).is_err() {
                            continue;
                        }
                        if let Some(w) = complete_up_to(&forced, 1).into_iter().next() {
                            return Some(extract_difference(l, &w));
                        }
                    }
                }
            }
        }
        // Next lexicographic combination of `choose` indices out of rest.
        if choose == 0 {
            return None;
        }
        let mut i = choose;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if combo[i] != i + rest.len() - choose {
                combo[i] += 1;
                for j in i + 1..choose {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}
