//! Strength verification and minimization: a defining set is `k`-strong
//! when every trade of the square meets it in at least `k` cells, or
//! equivalently when it remains a defining set after any `k−1` deletions.

use crate::completion::{count_completions, CountClass};
use crate::pls::{LatinSquare, Pls};
use crate::trades::{
    cell_mask, extract_difference, intercalates_of_bn, smallest_trade_size, trade_list_for,
    trade_through, Bitrade, Intercalate, TradeError, MAX_ENUM_ORDER,
};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StrengthError {
    #[error("the candidate set is not a subset of the square")]
    NotASubset,
    #[error("the set is not {k}-strong, as this operation requires")]
    NotKStrong { k: usize },
    #[error("order {n} exceeds the limit {max} for this operation")]
    OrderTooLarge { n: usize, max: usize },
    #[error("order {n} is odd, the subsquare packing bound needs an even order")]
    OddOrder { n: usize },
    #[error("strength {k} is outside the supported range 1..={max}")]
    KRange { k: usize, max: usize },
}

/// Outcome of a `k`-strength check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrengthReport {
    pub k: usize,
    /// Whether the set stays a defining set after every `k−1` deletions.
    pub verdict: bool,
    /// When the verdict is false, a trade meeting the set fewer than `k`
    /// times.
    pub violating_trade: Option<Bitrade>,
    /// Deletion subsets completed, or trades scanned on the small-order
    /// fast path.
    pub checked_subsets: u64,
}

fn require_subset(d: &Pls, l: &LatinSquare) -> Result<(), StrengthError> {
    if d.n() != l.n() {
        return Err(StrengthError::NotASubset);
    }
    for t in d.iter() {
        if l.get(t.row, t.col) != t.sym {
            return Err(StrengthError::NotASubset);
        }
    }
    Ok(())
}

/// Advances `idx` to the next lexicographic index combination below `len`.
/// Returns false after the last combination.
fn next_combination(idx: &mut [usize], len: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if idx[i] < len - (r - i) {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
}

/// Decides whether `d` is a `k`-strong defining set of `l`: whether
/// removing any `k−1` of its entries leaves a uniquely completable set.
///
/// At order ≤ 5 every trade of the square is available, so the check scans
/// the minimal trades for one meeting `d` fewer than `k` times. At larger
/// orders each deletion subset is checked with the completion oracle, and
/// a second completion of a failing subset yields the violating trade.
pub fn verify_k_strong(d: &Pls, l: &LatinSquare, k: usize) -> Result<StrengthReport, StrengthError> {
    assert!(k >= 1, "strength must be at least 1");
    require_subset(d, l)?;
    let n = l.n();

    if n <= MAX_ENUM_ORDER {
        let list = trade_list_for(l).expect("order is within the enumeration limit");
        let dmask = cell_mask(d);
        let mut checked = 0u64;
        for &idx in list.minimal_indices() {
            let r = &list.refs[idx as usize];
            checked += 1;
            if (r.mask & dmask).count_ones() < k as u32 {
                return Ok(StrengthReport {
                    k,
                    verdict: false,
                    violating_trade: Some(list.materialize(r)),
                    checked_subsets: checked,
                });
            }
        }
        return Ok(StrengthReport { k, verdict: true, violating_trade: None, checked_subsets: checked });
    }

    let triples = d.triples();
    let r = (k - 1).min(triples.len());
    let mut idx: Vec<usize> = (0..r).collect();
    let mut checked = 0u64;
    loop {
        let retained = Pls::from_triples(
            n,
            triples
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx.contains(i))
                .map(|(_, t)| *t),
        )
        .expect("subset of a valid partial square");
        checked += 1;
        let out = count_completions(&retained);
        if out.class == CountClass::Multiple {
            let other = out
                .witnesses
                .iter()
                .find(|w| *w != l)
                .expect("two distinct completions include one other than the square");
            return Ok(StrengthReport {
                k,
                verdict: false,
                violating_trade: Some(extract_difference(l, other)),
                checked_subsets: checked,
            });
        }
        if !next_combination(&mut idx, triples.len()) {
            break;
        }
    }
    Ok(StrengthReport { k, verdict: true, violating_trade: None, checked_subsets: checked })
}

/// Decides whether a `k`-strong set is minimally so: whether every entry
/// lies on some trade meeting the set in exactly `k` cells, so that no
/// entry can be dropped.
pub fn verify_minimal_k_strong(d: &Pls, l: &LatinSquare, k: usize) -> Result<bool, StrengthError> {
    let report = verify_k_strong(d, l, k)?;
    if !report.verdict {
        return Err(StrengthError::NotKStrong { k });
    }
    for &e in d.triples() {
        if trade_through(l, d, k, Some(e)).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedily shrinks a `k`-strong set to a minimally `k`-strong subset,
/// scanning entries once in row-major order and dropping each whose
/// removal preserves `k`-strength.
///
/// One pass suffices: when an entry must stay, some trade meets the then
/// current set at most `k` times through it, and later removals only
/// shrink that intersection further.
pub fn minimize_k_strong(d: &Pls, l: &LatinSquare, k: usize) -> Result<Pls, StrengthError> {
    let report = verify_k_strong(d, l, k)?;
    if !report.verdict {
        return Err(StrengthError::NotKStrong { k });
    }
    let mut cur = d.clone();
    for &e in d.triples() {
        let mut candidate = cur.clone();
        candidate.remove(e.row, e.col).expect("iterating over current entries");
        if verify_k_strong(&candidate, l, k)?.verdict {
            cur = candidate;
        }
    }
    Ok(cur)
}

/// A nested family of minimally `t`-strong defining sets, one per strength
/// from 1 up to the size of the square's smallest trade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    /// `levels[t-1]` is minimally `t`-strong, and each level strictly
    /// contains the previous one.
    pub levels: Vec<Pls>,
}

impl Chain {
    /// The largest strength in the chain, equal to the size of the
    /// square's smallest trade.
    pub fn max_strength(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, t: usize) -> &Pls {
        &self.levels[t - 1]
    }
}

/// Builds a full nested chain of minimally `t`-strong defining sets for
/// `t` from the size of the smallest trade down to 1, by repeatedly
/// dropping one entry and re-minimizing at the next lower strength.
pub fn extract_chain(l: &LatinSquare) -> Result<Chain, StrengthError> {
    let n = l.n();
    if n > MAX_ENUM_ORDER {
        return Err(StrengthError::OrderTooLarge { n, max: MAX_ENUM_ORDER });
    }
    let d = match smallest_trade_size(l) {
        Ok(d) => d,
        Err(TradeError::OrderTooLarge { n, max }) => {
            return Err(StrengthError::OrderTooLarge { n, max })
        }
        Err(err) => unreachable!("size query only fails on order: {err}"),
    };

    // The full square is d-strong: every trade keeps at least as many cells
    // as the smallest trade has.
    let mut levels = vec![Pls::empty(n).expect("order already validated"); d];
    let mut cur = minimize_k_strong(&l.to_pls(), l, d)?;
    levels[d - 1] = cur.clone();
    for t in (1..d).rev() {
        let first = cur.triples()[0];
        cur.remove(first.row, first.col).expect("chain levels are nonempty");
        cur = minimize_k_strong(&cur, l, t)?;
        levels[t - 1] = cur.clone();
    }
    for w in levels.windows(2) {
        debug_assert!(w[0].is_subset_of(&w[1]) && w[0].len() < w[1].len());
    }
    Ok(Chain { levels })
}

/// A packing lower bound with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntercalateBound {
    /// Every `k`-strong defining set has at least this many entries.
    pub bound: usize,
    /// Pairwise disjoint 2×2 subsquares; each must contribute `k` distinct
    /// entries.
    pub intercalates: Vec<Intercalate>,
}

/// The packing lower bound `k·n²/4` for `k`-strong defining sets of the
/// even-order cyclic square: its cells split into `(n/2)²` disjoint 2×2
/// subsquares, each a trade that must be met `k` times.
pub fn intercalate_lower_bound(n: usize, k: usize) -> Result<IntercalateBound, StrengthError> {
    if n % 2 != 0 || n == 0 {
        return Err(StrengthError::OddOrder { n });
    }
    if !(1..=4).contains(&k) {
        return Err(StrengthError::KRange { k, max: 4 });
    }
    let intercalates = intercalates_of_bn(n).expect("order is even");
    Ok(IntercalateBound { bound: k * n * n / 4, intercalates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_c_partition, build_p, build_q};
    use crate::pls::{back_circulant, Triple};

    /// A 9-entry 2-strong defining set of the order-5 cyclic square.
    pub(crate) fn two_strong_nine() -> Pls {
        Pls::from_triples(
            5,
            [
                Triple::new(0, 0, 0),
                Triple::new(0, 1, 1),
                Triple::new(1, 0, 1),
                Triple::new(1, 3, 4),
                Triple::new(2, 1, 3),
                Triple::new(3, 2, 0),
                Triple::new(3, 4, 2),
                Triple::new(4, 3, 2),
                Triple::new(4, 4, 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn nine_entry_set_is_two_strong_but_not_three_strong() {
        let l = back_circulant(5);
        let d = two_strong_nine();
        let ok = verify_k_strong(&d, &l, 2).unwrap();
        assert!(ok.verdict);
        assert!(ok.violating_trade.is_none());

        let bad = verify_k_strong(&d, &l, 3).unwrap();
        assert!(!bad.verdict);
        let t = bad.violating_trade.unwrap();
        assert!(t.t().intersection(&d).len() < 3);
        assert!(t.t().is_subset_of(&l.to_pls()));
    }

    #[test]
    fn verify_rejects_foreign_triples() {
        let l = back_circulant(4);
        let d = Pls::from_triples(4, [Triple::new(0, 0, 1)]).unwrap();
        assert_eq!(verify_k_strong(&d, &l, 1), Err(StrengthError::NotASubset));
    }

    #[test]
    fn strength_one_is_the_defining_set_property() {
        let l = back_circulant(3);
        let q = build_q(3).unwrap();
        assert!(verify_k_strong(&q, &l, 1).unwrap().verdict);

        let mut smaller = q.clone();
        smaller.remove(1, 1).unwrap();
        let report = verify_k_strong(&smaller, &l, 1).unwrap();
        assert!(!report.verdict);
        let t = report.violating_trade.unwrap();
        assert!(t.t().intersection(&smaller).is_empty());
    }

    #[test]
    fn diagonal_band_is_minimally_two_strong() {
        let l = back_circulant(5);
        let p = build_p(5);
        assert!(verify_k_strong(&p, &l, 2).unwrap().verdict);
        assert!(verify_minimal_k_strong(&p, &l, 2).unwrap());

        // With an extra cell the set stays 2-strong but loses minimality.
        let mut padded = p.clone();
        padded.insert(Triple::new(1, 0, 1)).unwrap();
        assert!(verify_k_strong(&padded, &l, 2).unwrap().verdict);
        assert!(!verify_minimal_k_strong(&padded, &l, 2).unwrap());
    }

    #[test]
    fn minimality_check_requires_strength() {
        let l = back_circulant(5);
        let p = build_p(5);
        // A minimally 2-strong set has a trade meeting it exactly twice, so
        // it is never 3-strong.
        assert_eq!(
            verify_minimal_k_strong(&p, &l, 3),
            Err(StrengthError::NotKStrong { k: 3 })
        );
        assert_eq!(
            minimize_k_strong(&p, &l, 3),
            Err(StrengthError::NotKStrong { k: 3 })
        );
    }

    #[test]
    fn whole_square_minimizes_to_itself_at_top_strength() {
        let l = back_circulant(4);
        let full = l.to_pls();
        let min = minimize_k_strong(&full, &l, 4).unwrap();
        assert_eq!(min, full);
    }

    #[test]
    fn minimized_sets_are_minimal() {
        let l = back_circulant(4);
        for k in 1..=4 {
            let min = minimize_k_strong(&l.to_pls(), &l, k).unwrap();
            assert!(verify_k_strong(&min, &l, k).unwrap().verdict, "k={k}");
            assert!(verify_minimal_k_strong(&min, &l, k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn order_two_chain_has_all_sizes() {
        let chain = extract_chain(&back_circulant(2)).unwrap();
        let sizes: Vec<usize> = chain.levels.iter().map(Pls::len).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
        assert_eq!(chain.max_strength(), 4);
    }

    #[test]
    fn chain_levels_nest_strictly_and_are_minimal() {
        let l = back_circulant(4);
        let chain = extract_chain(&l).unwrap();
        assert_eq!(chain.max_strength(), 4);
        for t in 1..=4 {
            assert!(verify_minimal_k_strong(chain.level(t), &l, t).unwrap(), "t={t}");
        }
        for w in chain.levels.windows(2) {
            assert!(w[0].is_subset_of(&w[1]));
            assert!(w[0].len() < w[1].len());
        }
        assert_eq!(extract_chain(&back_circulant(6)), Err(StrengthError::OrderTooLarge { n: 6, max: 5 }));
    }

    #[test]
    fn packing_bound_counts_disjoint_subsquares() {
        let b = intercalate_lower_bound(6, 2).unwrap();
        assert_eq!(b.bound, 18);
        assert_eq!(b.intercalates.len(), 9);
        let mut seen = Pls::empty(6).unwrap();
        for ic in &b.intercalates {
            for t in ic.triples() {
                seen.insert(t).expect("certificate subsquares are disjoint");
            }
        }
        assert_eq!(seen.len(), 36);

        assert_eq!(intercalate_lower_bound(5, 2), Err(StrengthError::OddOrder { n: 5 }));
        assert_eq!(intercalate_lower_bound(6, 5), Err(StrengthError::KRange { k: 5, max: 4 }));
        assert_eq!(intercalate_lower_bound(6, 0), Err(StrengthError::KRange { k: 0, max: 4 }));
    }

    #[test]
    fn general_path_verifies_partition_pieces() {
        let l = back_circulant(6);
        let [c1, c2, ..] = build_c_partition(6).unwrap();
        let union = c1.union(&c2).unwrap();
        let report = verify_k_strong(&union, &l, 2).unwrap();
        assert!(report.verdict);

        // A single piece is a critical set: removing any cell already
        // breaks unique completion, so it is not 2-strong.
        let report = verify_k_strong(&c1, &l, 2).unwrap();
        assert!(!report.verdict);
        let t = report.violating_trade.unwrap();
        assert!(t.t().intersection(&c1).len() < 2);
    }
}
