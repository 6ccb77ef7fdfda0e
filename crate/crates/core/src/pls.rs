//! Core types: triples, partial Latin squares, Latin squares, the cyclic
//! square, and its translation / transposition symmetries.

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Largest supported order. Indices fit comfortably in `u16`.
pub const MAX_ORDER: usize = 4096;

/// One filled cell: row, column, and the symbol placed there, all in
/// `0..n` for the ambient order `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Triple {
    pub row: u16,
    pub col: u16,
    pub sym: u16,
}

impl Triple {
    pub fn new(row: u16, col: u16, sym: u16) -> Triple {
        Triple { row, col, sym }
    }

    /// The cell coordinates without the symbol.
    pub fn cell(&self) -> (u16, u16) {
        (self.row, self.col)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{})", self.row, self.col, self.sym)
    }
}

// Serialized as the 3-tuple [row, col, sym].
impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.row)?;
        t.serialize_element(&self.col)?;
        t.serialize_element(&self.sym)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Triple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Triple, D::Error> {
        struct TripleVisitor;
        impl<'de> Visitor<'de> for TripleVisitor {
            type Value = Triple;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [row, col, sym] triple")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Triple, A::Error> {
                let row = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let col = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let sym = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(Triple { row, col, sym })
            }
        }
        deserializer.deserialize_tuple(3, TripleVisitor)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PlsError {
    #[error("order {n} out of range 1..={max}", max = MAX_ORDER)]
    OrderOutOfRange { n: usize },
    #[error("triple ({row},{col};{sym}) out of range for order {n}")]
    TripleOutOfRange { row: u16, col: u16, sym: u16, n: usize },
    #[error("cell ({row},{col}) is filled more than once")]
    DuplicateCell { row: u16, col: u16 },
    #[error("symbol {sym} occurs more than once in row {row}")]
    RowConflict { row: u16, sym: u16 },
    #[error("symbol {sym} occurs more than once in column {col}")]
    ColConflict { col: u16, sym: u16 },
    #[error("set is not contained in the cyclic square of order {n}")]
    ContainmentViolated { n: usize },
    #[error("orders differ: {a} vs {b}")]
    OrderMismatch { a: usize, b: usize },
    #[error("square of order {n} has {got} entries, expected {expected}")]
    NotComplete { n: usize, got: usize, expected: usize },
}

/// A partial Latin square: an order and a set of triples with at most one
/// entry per cell and no symbol repeated within a row or a column.
///
/// Triples are kept sorted by `(row, col)`, so equality and subset tests are
/// independent of insertion order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pls {
    n: usize,
    triples: Vec<Triple>,
}

impl Pls {
    /// The empty partial square of order `n`.
    pub fn empty(n: usize) -> Result<Pls, PlsError> {
        check_order(n)?;
        Ok(Pls { n, triples: Vec::new() })
    }

    /// Builds a partial square from arbitrary triples, validating ranges,
    /// cell uniqueness, and the row/column Latin conditions.
    pub fn from_triples(
        n: usize,
        triples: impl IntoIterator<Item = Triple>,
    ) -> Result<Pls, PlsError> {
        check_order(n)?;
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        for t in &triples {
            if (t.row as usize) >= n || (t.col as usize) >= n || (t.sym as usize) >= n {
                return Err(PlsError::TripleOutOfRange {
                    row: t.row,
                    col: t.col,
                    sym: t.sym,
                    n,
                });
            }
        }
        triples.sort_unstable();
        for w in triples.windows(2) {
            if w[0].cell() == w[1].cell() {
                return Err(PlsError::DuplicateCell { row: w[0].row, col: w[0].col });
            }
        }
        let mut row_syms: Vec<(u16, u16)> = triples.iter().map(|t| (t.row, t.sym)).collect();
        row_syms.sort_unstable();
        for w in row_syms.windows(2) {
            if w[0] == w[1] {
                return Err(PlsError::RowConflict { row: w[0].0, sym: w[0].1 });
            }
        }
        let mut col_syms: Vec<(u16, u16)> = triples.iter().map(|t| (t.col, t.sym)).collect();
        col_syms.sort_unstable();
        for w in col_syms.windows(2) {
            if w[0] == w[1] {
                return Err(PlsError::ColConflict { col: w[0].0, sym: w[0].1 });
            }
        }
        Ok(Pls { n, triples })
    }

    /// Construction bypass for callers that guarantee validity and sorted
    /// order; used where validity is preserved by a bijection on rows,
    /// columns, and symbols.
    pub(crate) fn from_sorted_unchecked(n: usize, triples: Vec<Triple>) -> Pls {
        debug_assert!(triples.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(Pls::from_triples(n, triples.iter().copied()).is_ok());
        Pls { n, triples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples sorted by `(row, col)`.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().copied()
    }

    /// Symbol at `(row, col)`, if that cell is filled.
    pub fn get(&self, row: u16, col: u16) -> Option<u16> {
        self.triples
            .binary_search_by_key(&(row, col), |t| t.cell())
            .ok()
            .map(|i| self.triples[i].sym)
    }

    /// Whether the exact triple (cell and symbol) is present.
    pub fn contains(&self, t: &Triple) -> bool {
        self.get(t.row, t.col) == Some(t.sym)
    }

    pub fn contains_cell(&self, row: u16, col: u16) -> bool {
        self.get(row, col).is_some()
    }

    /// Inserts one triple, rejecting duplicate cells and row/column
    /// conflicts deterministically.
    pub fn insert(&mut self, t: Triple) -> Result<(), PlsError> {
        let n = self.n;
        if (t.row as usize) >= n || (t.col as usize) >= n || (t.sym as usize) >= n {
            return Err(PlsError::TripleOutOfRange { row: t.row, col: t.col, sym: t.sym, n });
        }
        let idx = match self.triples.binary_search_by_key(&(t.row, t.col), |x| x.cell()) {
            Ok(_) => return Err(PlsError::DuplicateCell { row: t.row, col: t.col }),
            Err(i) => i,
        };
        for x in &self.triples {
            if x.row == t.row && x.sym == t.sym {
                return Err(PlsError::RowConflict { row: t.row, sym: t.sym });
            }
            if x.col == t.col && x.sym == t.sym {
                return Err(PlsError::ColConflict { col: t.col, sym: t.sym });
            }
        }
        self.triples.insert(idx, t);
        Ok(())
    }

    /// Removes and returns the entry at `(row, col)`, if any.
    pub fn remove(&mut self, row: u16, col: u16) -> Option<Triple> {
        match self.triples.binary_search_by_key(&(row, col), |x| x.cell()) {
            Ok(i) => Some(self.triples.remove(i)),
            Err(_) => None,
        }
    }

    /// Set inclusion of triples. Requires equal orders to be meaningful;
    /// differing orders always compare false.
    pub fn is_subset_of(&self, other: &Pls) -> bool {
        self.n == other.n && self.triples.iter().all(|t| other.contains(t))
    }

    /// Set union; fails if the union violates the Latin conditions.
    pub fn union(&self, other: &Pls) -> Result<Pls, PlsError> {
        if self.n != other.n {
            return Err(PlsError::OrderMismatch { a: self.n, b: other.n });
        }
        let mut all: Vec<Triple> = self.triples.clone();
        all.extend(other.triples.iter().copied());
        all.sort_unstable();
        all.dedup();
        Pls::from_triples(self.n, all)
    }

    /// Triples of `self` not present in `other` (exact triple match).
    pub fn difference(&self, other: &Pls) -> Pls {
        let triples: Vec<Triple> =
            self.triples.iter().copied().filter(|t| !other.contains(t)).collect();
        Pls::from_sorted_unchecked(self.n, triples)
    }

    /// Triples present in both (exact triple match).
    pub fn intersection(&self, other: &Pls) -> Pls {
        let triples: Vec<Triple> =
            self.triples.iter().copied().filter(|t| other.contains(t)).collect();
        Pls::from_sorted_unchecked(self.n, triples)
    }

    /// Whether every cell is filled.
    pub fn is_complete(&self) -> bool {
        self.triples.len() == self.n * self.n
    }

    /// Converts to a dense square; fails unless every cell is filled.
    pub fn to_latin(&self) -> Result<LatinSquare, PlsError> {
        if !self.is_complete() {
            return Err(PlsError::NotComplete {
                n: self.n,
                got: self.triples.len(),
                expected: self.n * self.n,
            });
        }
        let mut cells = vec![0u16; self.n * self.n];
        for t in &self.triples {
            cells[t.row as usize * self.n + t.col as usize] = t.sym;
        }
        Ok(LatinSquare { n: self.n, cells })
    }

    /// Whether every triple satisfies `sym = row + col (mod n)`.
    pub fn is_contained_in_cyclic(&self) -> bool {
        let n = self.n as u32;
        self.triples
            .iter()
            .all(|t| (t.row as u32 + t.col as u32) % n == t.sym as u32)
    }
}

fn check_order(n: usize) -> Result<(), PlsError> {
    if n == 0 || n > MAX_ORDER {
        return Err(PlsError::OrderOutOfRange { n });
    }
    Ok(())
}

/// A Latin square stored densely: every row and column is a permutation of
/// `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u16>,
}

impl LatinSquare {
    /// Builds from dense rows, validating the Latin conditions.
    pub fn from_rows(rows: Vec<Vec<u16>>) -> Result<LatinSquare, PlsError> {
        let n = rows.len();
        check_order(n)?;
        let mut triples = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PlsError::NotComplete { n, got: row.len(), expected: n });
            }
            for (c, &s) in row.iter().enumerate() {
                triples.push(Triple::new(r as u16, c as u16, s));
            }
        }
        Pls::from_triples(n, triples)?.to_latin()
    }

    pub(crate) fn from_cells_unchecked(n: usize, cells: Vec<u16>) -> LatinSquare {
        debug_assert_eq!(cells.len(), n * n);
        LatinSquare { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: u16, col: u16) -> u16 {
        self.cells[row as usize * self.n + col as usize]
    }

    pub(crate) fn cells(&self) -> &[u16] {
        &self.cells
    }

    pub fn to_pls(&self) -> Pls {
        let mut triples = Vec::with_capacity(self.n * self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                triples.push(Triple::new(r as u16, c as u16, self.cells[r * self.n + c]));
            }
        }
        Pls::from_sorted_unchecked(self.n, triples)
    }

    pub fn triple_at(&self, row: u16, col: u16) -> Triple {
        Triple::new(row, col, self.get(row, col))
    }
}

/// The cyclic square: the addition table of the integers modulo `n`, with
/// `row + col (mod n)` in each cell.
pub fn back_circulant(n: usize) -> LatinSquare {
    assert!(n >= 1 && n <= MAX_ORDER, "order {n} out of range 1..={MAX_ORDER}");
    let mut cells = vec![0u16; n * n];
    for r in 0..n {
        for c in 0..n {
            cells[r * n + c] = ((r + c) % n) as u16;
        }
    }
    LatinSquare { n, cells }
}

/// Translation parameters for the cyclic square's shift symmetry: rows move
/// by `rows`, columns by `cols`, symbols by `rows + cols`, all modulo the
/// order. Values are reduced on application, so any integers are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shift {
    pub rows: i64,
    pub cols: i64,
}

impl Shift {
    pub fn new(rows: i64, cols: i64) -> Shift {
        Shift { rows, cols }
    }

    pub fn inverse(&self) -> Shift {
        Shift { rows: -self.rows, cols: -self.cols }
    }
}

fn add_mod(x: u16, d: i64, n: usize) -> u16 {
    (((x as i64 + d).rem_euclid(n as i64)) as u64) as u16
}

/// Applies the shift after checking that `s` is contained in the cyclic
/// square, which the shift then provably preserves.
pub fn shift(s: &Pls, sh: Shift) -> Result<Pls, PlsError> {
    if !s.is_contained_in_cyclic() {
        return Err(PlsError::ContainmentViolated { n: s.n() });
    }
    Ok(shift_unchecked(s, sh))
}

/// Applies the shift to any partial square without the containment check.
/// Rows, columns, and symbols are each permuted by a rotation, so validity
/// is preserved unconditionally; only the "stays inside the cyclic square"
/// reading requires the checked variant.
pub fn shift_unchecked(s: &Pls, sh: Shift) -> Pls {
    let n = s.n();
    let mut triples: Vec<Triple> = s
        .iter()
        .map(|t| {
            Triple::new(
                add_mod(t.row, sh.rows, n),
                add_mod(t.col, sh.cols, n),
                add_mod(t.sym, sh.rows + sh.cols, n),
            )
        })
        .collect();
    triples.sort_unstable();
    Pls::from_sorted_unchecked(n, triples)
}

/// Swaps rows and columns: `{(j,i;k) : (i,j;k) in s}`. An involution.
pub fn transpose(s: &Pls) -> Pls {
    let mut triples: Vec<Triple> =
        s.iter().map(|t| Triple::new(t.col, t.row, t.sym)).collect();
    triples.sort_unstable();
    Pls::from_sorted_unchecked(s.n(), triples)
}

/// The i-th broken diagonal of the cyclic square:
/// `{(r, r+i; 2r+i mod n) : r in 0..n}`.
pub fn diagonal(n: usize, i: u16) -> Pls {
    assert!(n >= 1 && n <= MAX_ORDER, "order {n} out of range 1..={MAX_ORDER}");
    assert!((i as usize) < n, "diagonal index {i} out of range for order {n}");
    let mut triples: Vec<Triple> = (0..n as u16)
        .map(|r| {
            let col = ((r as usize + i as usize) % n) as u16;
            let sym = ((2 * r as usize + i as usize) % n) as u16;
            Triple::new(r, col, sym)
        })
        .collect();
    triples.sort_unstable();
    Pls::from_sorted_unchecked(n, triples)
}
