//! Frozen published artifacts: the two order-11 trades with their printed
//! mate symbols, the 12-piece corner tiling that compiles to the first of
//! them, the size-9 2-strong set of the order-5 square, and the shape facts
//! about the named constructions that those artifacts pin down.

mod common;

use kstrong::tessellation::{tessellation_to_trade, GoodTriangle, Region, Tessellation};
use kstrong::{
    back_circulant, build_c_partition, build_p, build_q, doubletool, intercalates_of_bn,
    is_defining_set, shift_unchecked, tripletool, validate_bitrade, verify_k_strong, witness_p,
    Pls, Shift, Triple,
};
use kstrong::tessellation::validate_tessellation;

fn assert_trade_frozen(t: &kstrong::Bitrade, frozen: &[(u16, u16, u16, u16)]) {
    assert_eq!(t.size(), frozen.len());
    let (want_t, want_mate) = common::trade_halves(t.n(), frozen);
    assert_eq!(t.t(), &want_t);
    assert_eq!(t.t_mate(), &want_mate);
}

#[test]
fn twelve_cell_trade_matches_the_printed_square() {
    let trade = doubletool(4, 11).unwrap();
    assert_trade_frozen(&trade, &common::TWELVE_CELL_TRADE);
    assert!(validate_bitrade(trade.t(), trade.t_mate()).is_ok());
    assert!(trade.t().is_subset_of(&back_circulant(11).to_pls()));

    // The printed translate three columns to the right, which is exactly the
    // witness trade the diagonal band assigns to cell (0,3).
    let shifted = trade.shifted(Shift::new(0, 3));
    assert_trade_frozen(&shifted, &common::TWELVE_CELL_TRADE_SHIFTED);
    let witness = witness_p(11, Triple::new(0, 3, 3)).unwrap();
    assert_eq!(witness.t(), shifted.t());
    assert_eq!(witness.t_mate(), shifted.t_mate());
}

#[test]
fn three_block_trade_matches_the_printed_square() {
    let trade = tripletool(3, 11).unwrap().shifted(Shift::new(0, 2));
    assert_trade_frozen(&trade, &common::THREE_BLOCK_TRADE);
    assert!(validate_bitrade(trade.t(), trade.t_mate()).is_ok());

    let witness = witness_p(11, Triple::new(0, 2, 2)).unwrap();
    assert_eq!(witness.t(), trade.t());
    assert_eq!(witness.t_mate(), trade.t_mate());
}

#[test]
fn both_printed_trades_meet_the_diagonal_band_twice() {
    let p = build_p(11);
    for frozen in [&common::TWELVE_CELL_TRADE_SHIFTED, &common::THREE_BLOCK_TRADE] {
        let (t, _) = common::trade_halves(11, frozen);
        assert_eq!(t.intersection(&p).len(), 2);
    }
}

#[test]
fn twelve_piece_tiling_compiles_to_the_twelve_cell_trade() {
    let tess = Tessellation {
        region: Region::Corner { n: 11 },
        triangles: common::TWELVE_PIECE_TILING
            .iter()
            .map(|&(x, y, k)| GoodTriangle::new(x, y, k))
            .collect(),
    };
    assert_eq!(validate_tessellation(&tess), Ok(()));
    let trade = tessellation_to_trade(&tess).unwrap();
    assert_trade_frozen(&trade, &common::TWELVE_CELL_TRADE);
    assert_eq!(trade.t().get(0, 0), Some(0));
    assert_eq!(trade.t_mate().get(0, 0), Some(4));
}

#[test]
fn nine_cell_set_shape() {
    let d = common::nine_cell_set();
    let b5 = back_circulant(5);
    assert_eq!(d.len(), 9);
    assert!(d.is_subset_of(&b5.to_pls()));
    assert!(is_defining_set(&d, &b5).unwrap());
    assert!(verify_k_strong(&d, &b5, 2).unwrap().verdict);
}

#[test]
fn banded_critical_set_sits_strictly_inside_the_band() {
    let q11 = build_q(11).unwrap();
    assert_eq!(q11.len(), 40);
    // Row 1 holds columns 1..=5, symbols 2..=6.
    let row1: Vec<Triple> = q11.iter().filter(|t| t.row == 1).collect();
    assert_eq!(
        row1,
        (1..=5).map(|c| Triple::new(1, c, c + 1)).collect::<Vec<_>>()
    );
    for n in 3..=50 {
        let q = build_q(n).unwrap();
        let p = build_p(n);
        assert!(q.is_subset_of(&p), "n={n}");
        assert!(q.len() < p.len(), "n={n}");
    }
}

#[test]
fn quarter_partition_shape_through_order_twenty() {
    for n in (2..=20).step_by(2) {
        let parts = build_c_partition(n).unwrap();
        let m = n / 2;
        let mut union = Pls::empty(n).unwrap();
        for part in &parts {
            assert_eq!(part.len(), n * n / 4, "n={n}");
            for t in part.iter() {
                union.insert(t).expect("parts are disjoint");
            }
        }
        assert_eq!(union, back_circulant(n).to_pls(), "n={n}");
        // The other three parts are translates of the first.
        let c1 = &parts[0];
        assert_eq!(&shift_unchecked(c1, Shift::new(0, m as i64)), &parts[1], "n={n}");
        assert_eq!(&shift_unchecked(c1, Shift::new(m as i64, 0)), &parts[2], "n={n}");
        assert_eq!(
            &shift_unchecked(c1, Shift::new(m as i64, m as i64)),
            &parts[3],
            "n={n}"
        );
        // Every 2x2 subsquare meets every part exactly once.
        for ic in intercalates_of_bn(n).unwrap() {
            let cells = Pls::from_triples(n, ic.triples()).unwrap();
            for (idx, part) in parts.iter().enumerate() {
                assert_eq!(cells.intersection(part).len(), 1, "n={n} part={idx}");
            }
        }
    }
}

#[test]
fn whole_square_strength_terminates_at_the_smallest_trade_size() {
    for (n, d) in [(2usize, 4usize), (3, 6), (4, 4), (5, 8)] {
        let l = back_circulant(n);
        assert_eq!(kstrong::smallest_trade_size(&l).unwrap(), d, "n={n}");
        let full = l.to_pls();
        assert!(verify_k_strong(&full, &l, d).unwrap().verdict, "n={n}");
        assert!(!verify_k_strong(&full, &l, d + 1).unwrap().verdict, "n={n}");
    }
}
