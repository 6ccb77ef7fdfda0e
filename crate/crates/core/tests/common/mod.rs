//! Frozen fixtures shared by the integration suites.

#![allow(dead_code)]

use kstrong::{Pls, Triple};

/// The published 12-cell order-11 trade: `(row, col, symbol, mate symbol)`.
pub const TWELVE_CELL_TRADE: [(u16, u16, u16, u16); 12] = [
    (0, 0, 0, 4),
    (0, 4, 4, 5),
    (0, 5, 5, 6),
    (0, 6, 6, 7),
    (0, 7, 7, 0),
    (1, 4, 5, 8),
    (1, 5, 6, 5),
    (1, 6, 7, 6),
    (1, 7, 8, 7),
    (4, 0, 4, 0),
    (4, 4, 8, 4),
    (4, 7, 0, 8),
];

/// The same trade translated three columns right: `(row, col, symbol, mate)`.
pub const TWELVE_CELL_TRADE_SHIFTED: [(u16, u16, u16, u16); 12] = [
    (0, 3, 3, 7),
    (0, 7, 7, 8),
    (0, 8, 8, 9),
    (0, 9, 9, 10),
    (0, 10, 10, 3),
    (1, 7, 8, 0),
    (1, 8, 9, 8),
    (1, 9, 10, 9),
    (1, 10, 0, 10),
    (4, 3, 7, 3),
    (4, 7, 0, 7),
    (4, 10, 3, 0),
];

/// A second published order-11 trade, built from the three-triangle corner
/// tiling and translated two columns right: `(row, col, symbol, mate)`.
pub const THREE_BLOCK_TRADE: [(u16, u16, u16, u16); 12] = [
    (0, 2, 2, 5),
    (0, 5, 5, 8),
    (0, 8, 8, 9),
    (0, 9, 9, 10),
    (0, 10, 10, 2),
    (1, 8, 9, 0),
    (1, 9, 10, 9),
    (1, 10, 0, 10),
    (3, 2, 5, 2),
    (3, 5, 8, 5),
    (3, 8, 0, 8),
    (3, 10, 2, 0),
];

/// The 12-triangle corner tiling of the order-11 triangle whose compiled
/// trade is [`TWELVE_CELL_TRADE`]: `(x, y, k)` per triangle.
pub const TWELVE_PIECE_TILING: [(i64, i64, i64); 12] = [
    (0, 0, 4),
    (4, 4, -4),
    (0, 4, 1),
    (1, 5, -1),
    (0, 5, 1),
    (1, 6, -1),
    (0, 6, 1),
    (1, 7, -1),
    (1, 4, 3),
    (4, 7, -3),
    (0, 7, 4),
    (4, 0, 7),
];

/// The published size-9 2-strong defining set of the order-5 cyclic square.
pub const NINE_CELL_SET: [(u16, u16, u16); 9] = [
    (0, 0, 0),
    (0, 1, 1),
    (1, 0, 1),
    (1, 3, 4),
    (2, 1, 3),
    (3, 2, 0),
    (3, 4, 2),
    (4, 3, 2),
    (4, 4, 3),
];

/// Published minimum k-strong defining set sizes of the cyclic square:
/// `(n, sizes)` with `sizes[k-1] = sds(B_n, k)` for `k = 1 ..= d_n`.
pub const MIN_SIZES: [(usize, &[usize]); 4] = [
    (2, &[1, 2, 3, 4]),
    (3, &[2, 3, 5, 6, 8, 9]),
    (4, &[4, 8, 12, 16]),
    (5, &[6, 9, 12, 15, 19, 20, 24, 25]),
];

pub fn nine_cell_set() -> Pls {
    Pls::from_triples(5, NINE_CELL_SET.map(|(r, c, s)| Triple::new(r, c, s))).unwrap()
}

pub fn trade_halves(n: usize, cells: &[(u16, u16, u16, u16)]) -> (Pls, Pls) {
    let t = cells.iter().map(|&(r, c, s, _)| Triple::new(r, c, s));
    let m = cells.iter().map(|&(r, c, _, s)| Triple::new(r, c, s));
    (
        Pls::from_triples(n, t).unwrap(),
        Pls::from_triples(n, m).unwrap(),
    )
}
