//! The unique-completion oracle: counts completions of a partial square to
//! 0, 1, or at least 2 Latin squares, decides the defining-set property, and
//! replays forced-completion sequences.

use crate::pls::{LatinSquare, Pls};
use thiserror::Error;

/// Largest order the completion solver accepts (symbol sets are tracked in
/// 128-bit masks).
pub const MAX_SOLVER_ORDER: usize = 128;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("the candidate set is not a subset of the target square")]
    NotASubset,
}

/// Truncated completion count.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CountClass {
    /// No Latin square contains the input.
    None,
    /// Exactly one Latin square contains the input.
    Unique,
    /// At least two Latin squares contain the input.
    Multiple,
}

/// Result of [`count_completions`]: the truncated count plus up to two
/// completions as witnesses.
#[derive(Clone, Debug)]
pub struct CompletionOutcome {
    pub class: CountClass,
    /// Empty for `None`, one square for `Unique`, two distinct squares for
    /// `Multiple`. Every witness contains the input.
    pub witnesses: Vec<LatinSquare>,
}

#[derive(Clone)]
struct SolveState {
    n: usize,
    grid: Vec<u16>, // u16::MAX marks an empty cell
    row_used: Vec<u128>,
    col_used: Vec<u128>,
    empties: usize,
}

const EMPTY: u16 = u16::MAX;

impl SolveState {
    fn new(p: &Pls) -> SolveState {
        let n = p.n();
        let mut st = SolveState {
            n,
            grid: vec![EMPTY; n * n],
            row_used: vec![0; n],
            col_used: vec![0; n],
            empties: n * n,
        };
        for t in p.iter() {
            st.fill(t.row as usize, t.col as usize, t.sym);
        }
        st
    }

    fn fill(&mut self, r: usize, c: usize, s: u16) {
        debug_assert_eq!(self.grid[r * self.n + c], EMPTY);
        self.grid[r * self.n + c] = s;
        self.row_used[r] |= 1u128 << s;
        self.col_used[c] |= 1u128 << s;
        self.empties -= 1;
    }

    fn candidates(&self, r: usize, c: usize) -> u128 {
        let full = if self.n == 128 { u128::MAX } else { (1u128 << self.n) - 1 };
        !(self.row_used[r] | self.col_used[c]) & full
    }

    /// Fills all forced cells. Returns false on contradiction.
    ///
    /// Two rules run to a fixpoint: a cell with a single admissible symbol,
    /// and a (row, symbol) or (column, symbol) pair with a single admissible
    /// cell.
    fn propagate(&mut self) -> bool {
        let n = self.n;
        loop {
            let mut progressed = false;
            for r in 0..n {
                for c in 0..n {
                    if self.grid[r * n + c] != EMPTY {
                        continue;
                    }
                    let cand = self.candidates(r, c);
                    if cand == 0 {
                        return false;
                    }
                    if cand.count_ones() == 1 {
                        self.fill(r, c, cand.trailing_zeros() as u16);
                        progressed = true;
                    }
                }
            }
            for r in 0..n {
                let missing = self.candidates_row(r);
                let mut rest = missing;
                while rest != 0 {
                    let s = rest.trailing_zeros() as u16;
                    rest &= rest - 1;
                    let mut spot = None;
                    let mut count = 0;
                    for c in 0..n {
                        if self.grid[r * n + c] == EMPTY
                            && self.col_used[c] & (1u128 << s) == 0
                        {
                            count += 1;
                            spot = Some(c);
                            if count > 1 {
                                break;
                            }
                        }
                    }
                    match (count, spot) {
                        (0, _) => return false,
                        (1, Some(c)) => {
                            self.fill(r, c, s);
                            progressed = true;
                        }
                        _ => {}
                    }
                }
            }
            for c in 0..n {
                let missing = self.candidates_col(c);
                let mut rest = missing;
                while rest != 0 {
                    let s = rest.trailing_zeros() as u16;
                    rest &= rest - 1;
                    let mut spot = None;
                    let mut count = 0;
                    for r in 0..n {
                        if self.grid[r * n + c] == EMPTY
                            && self.row_used[r] & (1u128 << s) == 0
                        {
                            count += 1;
                            spot = Some(r);
                            if count > 1 {
                                break;
                            }
                        }
                    }
                    match (count, spot) {
                        (0, _) => return false,
                        (1, Some(r)) => {
                            self.fill(r, c, s);
                            progressed = true;
                        }
                        _ => {}
                    }
                }
            }
            if !progressed {
                return true;
            }
        }
    }

    fn candidates_row(&self, r: usize) -> u128 {
        let full = if self.n == 128 { u128::MAX } else { (1u128 << self.n) - 1 };
        !self.row_used[r] & full
    }

    fn candidates_col(&self, c: usize) -> u128 {
        let full = if self.n == 128 { u128::MAX } else { (1u128 << self.n) - 1 };
        !self.col_used[c] & full
    }

    /// Most-constrained empty cell, lowest `(row, col)` on ties.
    fn branch_cell(&self) -> Option<(usize, usize)> {
        let n = self.n;
        let mut best: Option<(u32, usize, usize)> = None;
        for r in 0..n {
            for c in 0..n {
                if self.grid[r * n + c] != EMPTY {
                    continue;
                }
                let k = self.candidates(r, c).count_ones();
                match best {
                    Some((bk, _, _)) if bk <= k => {}
                    _ => best = Some((k, r, c)),
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn to_square(&self) -> LatinSquare {
        debug_assert_eq!(self.empties, 0);
        LatinSquare::from_cells_unchecked(self.n, self.grid.clone())
    }
}

fn search(st: &mut SolveState, out: &mut Vec<LatinSquare>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    if !st.propagate() {
        return;
    }
    if st.empties == 0 {
        out.push(st.to_square());
        return;
    }
    let (r, c) = st.branch_cell().expect("empties > 0");
    let mut cand = st.candidates(r, c);
    while cand != 0 {
        let s = cand.trailing_zeros() as u16;
        cand &= cand - 1;
        let mut child = st.clone();
        child.fill(r, c, s);
        search(&mut child, out, limit);
        if out.len() >= limit {
            return;
        }
    }
}

/// Completions of `p`, in the deterministic branching order, truncated to
/// `limit` squares.
pub(crate) fn complete_up_to(p: &Pls, limit: usize) -> Vec<LatinSquare> {
    assert!(
        p.n() <= MAX_SOLVER_ORDER,
        "completion solver supports order <= {MAX_SOLVER_ORDER}"
    );
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    let mut st = SolveState::new(p);
    search(&mut st, &mut out, limit);
    out
}

/// Counts the Latin squares of order `n` containing `p`, truncated at 2,
/// returning the found squares as verified witnesses.
pub fn count_completions(p: &Pls) -> CompletionOutcome {
    let witnesses = complete_up_to(p, 2);
    let class = match witnesses.len() {
        0 => CountClass::None,
        1 => CountClass::Unique,
        _ => CountClass::Multiple,
    };
    CompletionOutcome { class, witnesses }
}

/// Whether `d` has a unique completion. The subset check against `l` makes
/// the unique witness necessarily equal to `l`.
pub fn is_defining_set(d: &Pls, l: &LatinSquare) -> Result<bool, CompletionError> {
    if !d.is_subset_of(&l.to_pls()) {
        return Err(CompletionError::NotASubset);
    }
    Ok(count_completions(d).class == CountClass::Unique)
}

/// All Latin squares of order `n`, sorted by their row-major cell vectors.
pub(crate) fn all_latin_squares(n: usize) -> Vec<LatinSquare> {
    let empty = Pls::empty(n).expect("valid order");
    let mut all = complete_up_to(&empty, usize::MAX);
    all.sort_unstable_by(|a, b| a.cells().cmp(b.cells()));
    all
}

/// Why a forced replay failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReplayFailure {
    /// The sequence does not list exactly the empty cells of the start
    /// position, each once.
    CoverageMismatch,
    /// At this index the cell admitted zero or several symbols.
    NonForced { index: usize },
    /// Every step was forced but the result differs from the target.
    TargetMismatch,
}

/// Outcome of [`replay_forced`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReplayReport {
    pub ok: bool,
    pub failure: Option<ReplayFailure>,
}

impl ReplayReport {
    fn pass() -> ReplayReport {
        ReplayReport { ok: true, failure: None }
    }
    fn fail(f: ReplayFailure) -> ReplayReport {
        ReplayReport { ok: false, failure: Some(f) }
    }
}

/// Replays a claimed forced-completion sequence: filling the listed cells in
/// order must leave exactly one symbol absent from both the cell's row and
/// column at every step, and the filled square must equal `target`.
pub fn replay_forced(p: &Pls, seq: &[(u16, u16)], target: &LatinSquare) -> ReplayReport {
    let n = p.n();
    if n != target.n() || n > MAX_SOLVER_ORDER {
        return ReplayReport::fail(ReplayFailure::CoverageMismatch);
    }
    let mut listed: Vec<(u16, u16)> = seq.to_vec();
    listed.sort_unstable();
    listed.dedup();
    if listed.len() != seq.len() || listed.len() != n * n - p.len() {
        return ReplayReport::fail(ReplayFailure::CoverageMismatch);
    }
    if listed.iter().any(|&(r, c)| p.contains_cell(r, c))
        || listed.iter().any(|&(r, c)| (r as usize) >= n || (c as usize) >= n)
    {
        return ReplayReport::fail(ReplayFailure::CoverageMismatch);
    }

    let mut st = SolveState::new(p);
    for (index, &(r, c)) in seq.iter().enumerate() {
        let cand = st.candidates(r as usize, c as usize);
        if cand.count_ones() != 1 {
            return ReplayReport::fail(ReplayFailure::NonForced { index });
        }
        st.fill(r as usize, c as usize, cand.trailing_zeros() as u16);
    }
    if st.grid == target.cells() {
        ReplayReport::pass()
    } else {
        ReplayReport::fail(ReplayFailure::TargetMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{back_circulant, Triple};

    #[test]
    fn near_complete_square_is_unique() {
        let mut p = back_circulant(5).to_pls();
        p.remove(2, 3).unwrap();
        let out = count_completions(&p);
        assert_eq!(out.class, CountClass::Unique);
        assert_eq!(out.witnesses[0], back_circulant(5));
    }

    #[test]
    fn empty_order_2_has_two_completions() {
        let out = count_completions(&Pls::empty(2).unwrap());
        assert_eq!(out.class, CountClass::Multiple);
        assert_eq!(out.witnesses.len(), 2);
        assert_ne!(out.witnesses[0], out.witnesses[1]);
    }

    #[test]
    fn order_1_is_trivially_unique() {
        let out = count_completions(&Pls::empty(1).unwrap());
        assert_eq!(out.class, CountClass::Unique);
    }

    #[test]
    fn unfillable_partial_square_has_no_completion() {
        // (0,0;0) and (1,1;1) leave no symbol for cell (0,1) at order 2.
        let p = Pls::from_triples(2, [Triple::new(0, 0, 0), Triple::new(1, 1, 1)]).unwrap();
        let out = count_completions(&p);
        assert_eq!(out.class, CountClass::None);
    }

    #[test]
    fn defining_set_basics() {
        let b2 = back_circulant(2);
        assert!(is_defining_set(&b2.to_pls(), &b2).unwrap());
        assert!(!is_defining_set(&Pls::empty(2).unwrap(), &b2).unwrap());
        let stray = Pls::from_triples(2, [Triple::new(0, 0, 1)]).unwrap();
        assert_eq!(is_defining_set(&stray, &b2), Err(CompletionError::NotASubset));
    }

    #[test]
    fn witnesses_contain_input() {
        let p = Pls::from_triples(4, [Triple::new(0, 0, 0), Triple::new(1, 1, 2)]).unwrap();
        let out = count_completions(&p);
        assert_eq!(out.class, CountClass::Multiple);
        for w in &out.witnesses {
            assert!(p.is_subset_of(&w.to_pls()));
        }
    }

    #[test]
    fn replay_single_missing_cell() {
        let mut p = back_circulant(3).to_pls();
        p.remove(2, 2).unwrap();
        let rep = replay_forced(&p, &[(2, 2)], &back_circulant(3));
        assert!(rep.ok, "{:?}", rep.failure);
    }

    #[test]
    fn replay_rejects_non_forced_and_bad_coverage() {
        let p = Pls::empty(2).unwrap();
        let seq = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let rep = replay_forced(&p, &seq, &back_circulant(2));
        assert_eq!(rep.failure, Some(ReplayFailure::NonForced { index: 0 }));

        let mut q = back_circulant(3).to_pls();
        q.remove(2, 2).unwrap();
        let rep = replay_forced(&q, &[(2, 2), (2, 2)], &back_circulant(3));
        assert_eq!(rep.failure, Some(ReplayFailure::CoverageMismatch));
        let rep = replay_forced(&q, &[], &back_circulant(3));
        assert_eq!(rep.failure, Some(ReplayFailure::CoverageMismatch));
    }

    #[test]
    fn replay_detects_target_mismatch() {
        // Order 1: the single empty cell is forced to 0, so a target claim
        // can only fail via a different square, which does not exist at
        // order 1; craft the mismatch at order 3 instead by removing one
        // cell and pointing at a row-swapped square.
        let rows = vec![vec![0u16, 1, 2], vec![2, 0, 1], vec![1, 2, 0]];
        let other = LatinSquare::from_rows(rows).unwrap();
        let mut p = back_circulant(3).to_pls();
        p.remove(2, 2).unwrap();
        let rep = replay_forced(&p, &[(2, 2)], &other);
        assert_eq!(rep.failure, Some(ReplayFailure::TargetMismatch));
    }

    #[test]
    fn order_4_square_count() {
        assert_eq!(all_latin_squares(4).len(), 576);
    }
}
