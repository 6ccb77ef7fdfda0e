//! Independent cross-checks of the library's counting, completion, geometry,
//! verification, and search results.
//!
//! Every oracle here is implemented from scratch against the public API only:
//! a row-permutation Latin-square counter, a propagation-free completion
//! counter, a half-cell rasterizer for triangle tilings, and brute-force
//! trade-hitting scans. Agreement is checked on frozen values and on
//! systematic or seeded input sweeps.

mod common;

use kstrong::tessellation::{
    doubletool_tessellation, tessellate_rectangle, tripletool_tessellation,
    validate_tessellation, GoodTriangle, Region, Tessellation,
};
use kstrong::{
    back_circulant, count_completions, enumerate_trades, is_defining_set, search_min_k_strong,
    verify_k_strong, CountClass, LatinSquare, Pls, SearchOptions, Triple,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Counts Latin squares of order `n` by extending one row permutation at a
/// time under column masks. No cell-level propagation, no library calls.
fn count_latin_squares(n: usize) -> u64 {
    fn rows(n: usize, col_used: &mut Vec<u32>, row_used: u32, col: usize, left: usize) -> u64 {
        if col == n {
            return if left == 1 { 1 } else { extend(n, col_used, left - 1) };
        }
        let mut total = 0;
        for s in 0..n {
            let bit = 1u32 << s;
            if row_used & bit == 0 && col_used[col] & bit == 0 {
                col_used[col] |= bit;
                total += rows(n, col_used, row_used | bit, col + 1, left);
                col_used[col] &= !bit;
            }
        }
        total
    }
    fn extend(n: usize, col_used: &mut Vec<u32>, left: usize) -> u64 {
        rows(n, col_used, 0, 0, left)
    }
    extend(n, &mut vec![0; n], n)
}

/// Counts completions of `p` by plain depth-first search over row-major
/// empty cells, capped at `cap`. Row and column sets are rescanned at every
/// step; deliberately nothing is shared with the library solver.
fn brute_completions(p: &Pls, cap: usize) -> usize {
    let n = p.n();
    let mut grid = vec![u16::MAX; n * n];
    for t in p.iter() {
        grid[t.row as usize * n + t.col as usize] = t.sym;
    }
    fn rec(grid: &mut Vec<u16>, n: usize, pos: usize, cap: usize, found: &mut usize) {
        if *found >= cap {
            return;
        }
        let Some(pos) = (pos..n * n).find(|&q| grid[q] == u16::MAX) else {
            *found += 1;
            return;
        };
        let (r, c) = (pos / n, pos % n);
        'sym: for s in 0..n as u16 {
            for i in 0..n {
                if grid[r * n + i] == s || grid[i * n + c] == s {
                    continue 'sym;
                }
            }
            grid[pos] = s;
            rec(grid, n, pos + 1, cap, found);
            grid[pos] = u16::MAX;
        }
    }
    let mut found = 0;
    rec(&mut grid, n, 0, cap, &mut found);
    found
}

fn class_of(count: usize) -> CountClass {
    match count {
        0 => CountClass::None,
        1 => CountClass::Unique,
        _ => CountClass::Multiple,
    }
}

#[test]
fn latin_square_counts_are_the_frozen_classics() {
    assert_eq!(count_latin_squares(1), 1);
    assert_eq!(count_latin_squares(2), 2);
    assert_eq!(count_latin_squares(3), 12);
    assert_eq!(count_latin_squares(4), 576);
    assert_eq!(count_latin_squares(5), 161280);
    // One difference trade per other square of the same order.
    for n in 2..=4 {
        let trades = enumerate_trades(&back_circulant(n), false).unwrap();
        assert_eq!(trades.len() as u64, count_latin_squares(n) - 1, "n={n}");
    }
}

#[test]
fn completion_classes_agree_with_plain_search() {
    // Every subset of the order-3 cyclic square.
    let b3 = back_circulant(3);
    let all: Vec<Triple> = b3.to_pls().triples().to_vec();
    for mask in 0u32..1 << 9 {
        let sub: Vec<Triple> =
            (0..9).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let p = Pls::from_triples(3, sub).unwrap();
        let out = count_completions(&p);
        assert_eq!(out.class, class_of(brute_completions(&p, 2)), "mask={mask:#b}");
        for w in &out.witnesses {
            assert!(p.is_subset_of(&w.to_pls()));
        }
    }

    // Seeded subsets of the order-4 square, plus a conflict-free non-subset
    // partial square with no completion.
    let b4 = back_circulant(4);
    let all: Vec<Triple> = b4.to_pls().triples().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let keep = rng.gen_range(0..=16);
        let mut idx: Vec<usize> = (0..16).collect();
        idx.shuffle(&mut rng);
        let p =
            Pls::from_triples(4, idx[..keep].iter().map(|&i| all[i])).unwrap();
        let out = count_completions(&p);
        assert_eq!(out.class, class_of(brute_completions(&p, 2)));
    }
    // Row 1 is forced to (2,1,0), after which row 2 needs symbol 1 in
    // column 0 twice over: no completion exists.
    let stuck = Pls::from_triples(
        3,
        [Triple::new(0, 0, 0), Triple::new(1, 1, 1), Triple::new(2, 2, 1)],
    )
    .unwrap();
    assert_eq!(brute_completions(&stuck, 2), 0);
    assert_eq!(count_completions(&stuck).class, CountClass::None);

    // Empty squares recover the full counts.
    assert_eq!(brute_completions(&Pls::empty(4).unwrap(), usize::MAX), 576);
}

/// Rasterizes a tiling into half-cells. Each unit cell `(a,b)` splits along
/// its gradient −1 diagonal into a lower half (toward `(a,b)`) and an upper
/// half (toward `(a+1,b+1)`). Returns `None` on any doubly covered half.
fn rasterize(triangles: &[GoodTriangle]) -> Option<HashMap<(i64, i64), (bool, bool)>> {
    let mut cells: HashMap<(i64, i64), (bool, bool)> = HashMap::new();
    let put = |cell: (i64, i64), upper: bool, cells: &mut HashMap<(i64, i64), (bool, bool)>| {
        let e = cells.entry(cell).or_insert((false, false));
        let slot = if upper { &mut e.1 } else { &mut e.0 };
        if *slot {
            return false;
        }
        *slot = true;
        true
    };
    for t in triangles {
        let [x, y] = t.rv;
        if t.k > 0 {
            for u in 0..t.k {
                for v in 0..t.k - u {
                    if !put((x + u, y + v), false, &mut cells) {
                        return None;
                    }
                    if u + v <= t.k - 2 && !put((x + u, y + v), true, &mut cells) {
                        return None;
                    }
                }
            }
        } else {
            let s = -t.k;
            for u in 0..s {
                for v in 0..s - u {
                    if !put((x - 1 - u, y - 1 - v), true, &mut cells) {
                        return None;
                    }
                    if u + v <= s - 2 && !put((x - 1 - u, y - 1 - v), false, &mut cells) {
                        return None;
                    }
                }
            }
        }
    }
    Some(cells)
}

/// Exact-cover check of a tiling against its region, half-cell by half-cell.
fn covers_exactly(t: &Tessellation) -> bool {
    let Some(cells) = rasterize(&t.triangles) else {
        return false;
    };
    let mut expected: HashMap<(i64, i64), (bool, bool)> = HashMap::new();
    match t.region {
        Region::Corner { n } => {
            for a in 0..n {
                for b in 0..n - a {
                    expected.insert((a, b), (true, a + b <= n - 2));
                }
            }
        }
        Region::Rect { x0, y0, x1, y1 } => {
            for a in x0..x1 {
                for b in y0..y1 {
                    expected.insert((a, b), (true, true));
                }
            }
        }
    }
    expected.retain(|_, &mut (l, u)| l || u);
    cells == expected
}

#[test]
fn tiling_validator_agrees_with_half_cell_rasterization() {
    for w in 1..=8i64 {
        for h in 1..=8i64 {
            let t = tessellate_rectangle(w as usize, h as usize);
            assert_eq!(validate_tessellation(&t), Ok(()));
            assert!(covers_exactly(&t), "rectangle {w}x{h}");
        }
    }
    for n in 4..=25 {
        for m in 1..=n {
            if 2 <= 2 * m && 2 * m < n && n < 3 * m {
                let t = doubletool_tessellation(m, n).unwrap();
                assert_eq!(validate_tessellation(&t), Ok(()));
                assert!(covers_exactly(&t), "double m={m} n={n}");
            }
            if n > 3 * m && 3 * m >= 3 {
                let t = tripletool_tessellation(m, n).unwrap();
                assert_eq!(validate_tessellation(&t), Ok(()));
                assert!(covers_exactly(&t), "triple m={m} n={n}");
            }
        }
    }
    let twelve = Tessellation {
        region: Region::Corner { n: 11 },
        triangles: common::TWELVE_PIECE_TILING
            .iter()
            .map(|&(x, y, k)| GoodTriangle::new(x, y, k))
            .collect(),
    };
    assert_eq!(validate_tessellation(&twelve), Ok(()));
    assert!(covers_exactly(&twelve));

    // Geometric defects must fail both ways.
    let bad = [
        Tessellation {
            region: Region::Corner { n: 2 },
            triangles: vec![GoodTriangle::new(0, 0, 2), GoodTriangle::new(0, 0, 2)],
        },
        Tessellation {
            region: Region::Corner { n: 2 },
            triangles: vec![GoodTriangle::new(0, 0, 3)],
        },
        Tessellation {
            region: Region::Corner { n: 2 },
            triangles: vec![GoodTriangle::new(0, 0, 1)],
        },
        Tessellation {
            region: Region::Rect { x0: 0, y0: 0, x1: 2, y1: 1 },
            triangles: vec![GoodTriangle::new(0, 0, 1), GoodTriangle::new(1, 1, -1)],
        },
    ];
    for (i, t) in bad.iter().enumerate() {
        assert!(validate_tessellation(t).is_err(), "bad fixture {i}");
        assert!(!covers_exactly(t), "bad fixture {i}");
    }
}

fn cell_mask(p: &Pls) -> u32 {
    let n = p.n() as u32;
    p.iter().fold(0, |m, t| m | 1 << (t.row as u32 * n + t.col as u32))
}

fn trade_masks(l: &LatinSquare) -> Vec<u32> {
    enumerate_trades(l, false).unwrap().iter().map(|b| cell_mask(b.t())).collect()
}

fn strong_by_scan(trades: &[u32], dmask: u32, k: u32) -> bool {
    trades.iter().all(|&t| (t & dmask).count_ones() >= k)
}

#[test]
fn strength_verdicts_agree_with_full_trade_scans() {
    let b3 = back_circulant(3);
    let all: Vec<Triple> = b3.to_pls().triples().to_vec();
    let trades = trade_masks(&b3);
    for mask in 0u32..1 << 9 {
        let sub: Vec<Triple> =
            (0..9).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        let d = Pls::from_triples(3, sub).unwrap();
        assert_eq!(
            is_defining_set(&d, &b3).unwrap(),
            strong_by_scan(&trades, mask, 1),
            "defining, mask={mask:#b}"
        );
        for k in 1..=4u32 {
            assert_eq!(
                verify_k_strong(&d, &b3, k as usize).unwrap().verdict,
                strong_by_scan(&trades, mask, k),
                "k={k}, mask={mask:#b}"
            );
        }
    }

    let b4 = back_circulant(4);
    let all: Vec<Triple> = b4.to_pls().triples().to_vec();
    let trades = trade_masks(&b4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let keep = rng.gen_range(0..=16);
        let mut idx: Vec<usize> = (0..16).collect();
        idx.shuffle(&mut rng);
        let d = Pls::from_triples(4, idx[..keep].iter().map(|&i| all[i])).unwrap();
        let dmask = cell_mask(&d);
        for k in 1..=4u32 {
            assert_eq!(
                verify_k_strong(&d, &b4, k as usize).unwrap().verdict,
                strong_by_scan(&trades, dmask, k),
                "k={k}"
            );
        }
    }
}

/// Minimum size of a cell set hitting every trade at least `k` times, by
/// exhausting subsets in ascending size.
fn brute_hitting_optimum(cells: usize, trades: &[u32], k: u32) -> usize {
    fn rec(trades: &[u32], k: u32, cells: usize, next: usize, left: usize, mask: u32) -> bool {
        if left == 0 {
            return strong_by_scan(trades, mask, k);
        }
        if cells - next < left {
            return false;
        }
        (next..cells).any(|i| rec(trades, k, cells, i + 1, left - 1, mask | 1 << i))
    }
    (0..=cells)
        .find(|&s| rec(trades, k, cells, 0, s, 0))
        .expect("the full cell set hits everything")
}

#[test]
fn search_optimum_agrees_with_brute_force_hitting() {
    for (n, kmax) in [(2usize, 4usize), (3, 6), (4, 4)] {
        let l = back_circulant(n);
        let trades = trade_masks(&l);
        for k in 1..=kmax {
            let cert = search_min_k_strong(&l, k, &SearchOptions::default()).unwrap();
            let brute = brute_hitting_optimum(n * n, &trades, k as u32);
            assert_eq!(cert.optimum, brute, "n={n} k={k}");
            assert!(cert.exact);
        }
    }

    // A non-cyclic square: two rows of the order-4 square exchanged.
    let rows =
        vec![vec![0u16, 1, 2, 3], vec![2, 3, 0, 1], vec![1, 2, 3, 0], vec![3, 0, 1, 2]];
    let swapped = LatinSquare::from_rows(rows).unwrap();
    let trades = trade_masks(&swapped);
    for k in 1..=2usize {
        let cert = search_min_k_strong(&swapped, k, &SearchOptions::default()).unwrap();
        assert_eq!(cert.optimum, brute_hitting_optimum(16, &trades, k as u32), "k={k}");
    }
}
