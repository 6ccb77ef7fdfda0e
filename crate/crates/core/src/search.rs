//! Exact minimization of `k`-strong defining sets by branch and bound over
//! a lazily grown pool of trades.
//!
//! A set is `k`-strong exactly when it meets every trade of the square in
//! at least `k` cells, so the minimum size is the optimum of a covering
//! problem with one constraint per trade. The search keeps a small pool of
//! known trades, finds an optimal pool-hitting set exactly, and asks the
//! completion oracle whether that set is already `k`-strong; each failure
//! contributes new violated trades to the pool, and each round's optimum
//! is a certified lower bound on the true answer.

use crate::completion::{count_completions, CountClass};
use crate::pls::{back_circulant, LatinSquare, Pls, Shift, Triple};
use crate::trades::{
    cell_mask, extract_difference, intercalates_of_bn, row_swap_trade, trade_list_for, Bitrade,
    MAX_ENUM_ORDER,
};
use thiserror::Error;

/// Largest order whose cells fit the 128-bit masks the solver uses.
pub const MAX_SEARCH_ORDER: usize = 11;

/// How many violated trades one verification round may add to the pool.
const VIOLATION_BATCH: usize = 24;

/// Fixed verification block size, so results do not depend on the worker
/// count.
const VERIFY_BLOCK: u64 = 8192;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("order {n} exceeds the search limit {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("no {k}-strong defining set exists: the square has a trade of size {trade_size}")]
    Infeasible { k: usize, trade_size: usize },
    #[error("search budget exhausted; certified bounds {lower_bound}..={upper_bound:?}")]
    BudgetExceeded { lower_bound: usize, upper_bound: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Alternate exact pool optimization with oracle verification until the
    /// optimum is a verified `k`-strong set.
    Exact,
    /// Optimize over the seed pool once and report the certified lower
    /// bound without verification.
    PoolOnly,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// Cap on completion-oracle calls across all verification rounds.
    pub budget_subsets: u64,
    /// Cap on branch-and-bound nodes across all rounds.
    pub budget_nodes: u64,
    /// Worker threads for the verification sweep. The sweep is chunked on
    /// fixed block boundaries, so the outcome is worker-count independent.
    pub workers: usize,
    /// Fix one cell of the answer in advance. Sound only for squares with
    /// a transitive translation symmetry, so it is applied just to cyclic
    /// squares, where the pool is kept closed under translation.
    pub symmetry_breaking: bool,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            mode: SearchMode::Exact,
            budget_subsets: 2_000_000,
            budget_nodes: 50_000_000,
            workers: 1,
            symmetry_breaking: false,
        }
    }
}

/// One optimize-verify round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrace {
    pub round: usize,
    /// Pool size the round optimized over.
    pub pool_size: usize,
    /// Size of the optimal pool-hitting set of the round.
    pub candidate_size: usize,
    /// Violated trades the verification added; 0 on the final round.
    pub violations_added: usize,
}

/// The result of a search, carrying everything needed to re-check it: the
/// witness, the final trade pool (over which no smaller set meets every
/// trade `k` times), and the per-round trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCertificate {
    pub square: LatinSquare,
    pub k: usize,
    /// In exact mode, the minimum size of a `k`-strong defining set. In
    /// pool-only mode, the pool optimum: a certified lower bound.
    pub optimum: usize,
    /// In exact mode, a verified minimally-sized `k`-strong defining set.
    /// In pool-only mode, an optimal pool-hitting set, not verified.
    pub witness: Pls,
    pub pool: Vec<Bitrade>,
    pub exact: bool,
    pub symmetry_broken: bool,
    pub rounds: Vec<RoundTrace>,
}

fn bitrade_cell_mask(b: &Bitrade, n: usize) -> u128 {
    let mut mask = 0u128;
    for t in b.t().iter() {
        mask |= 1u128 << (t.row as usize * n + t.col as usize);
    }
    mask
}

fn pls_from_mask(l: &LatinSquare, mask: u128) -> Pls {
    let n = l.n();
    let mut triples = Vec::new();
    let mut m = mask;
    while m != 0 {
        let pos = m.trailing_zeros() as usize;
        m &= m - 1;
        let (r, c) = ((pos / n) as u16, (pos % n) as u16);
        triples.push(l.triple_at(r, c));
    }
    Pls::from_triples(n, triples).expect("cells of a Latin square")
}

fn canonical_key(b: &Bitrade) -> (usize, Vec<Triple>, Vec<Triple>) {
    (b.size(), b.t().triples().to_vec(), b.t_mate().triples().to_vec())
}

fn sort_pool(pool: &mut Vec<Bitrade>) {
    pool.sort_by_cached_key(canonical_key);
    pool.dedup();
}

/// Exact branch and bound for the smallest cell set meeting every
/// constraint mask in at least `k` cells.
struct Bnb {
    constraints: Vec<u128>,
    k: u32,
    num_cells: usize,
    best_mask: u128,
    best_size: u32,
    nodes_left: u64,
    aborted: bool,
}

struct BnbResult {
    best_mask: u128,
    best_size: u32,
    root_lower: u32,
    optimal: bool,
    nodes_used: u64,
}

impl Bnb {
    fn solve(
        constraints: Vec<u128>,
        k: u32,
        num_cells: usize,
        forced: u128,
        incumbent_hint: Option<u128>,
        node_budget: u64,
    ) -> BnbResult {
        let mut bnb = Bnb {
            constraints,
            k,
            num_cells,
            best_mask: 0,
            best_size: u32::MAX,
            nodes_left: node_budget,
            aborted: false,
        };
        let greedy = bnb.greedy_cover(forced);
        bnb.best_mask = greedy;
        bnb.best_size = greedy.count_ones();
        if let Some(hint) = incumbent_hint {
            if hint & forced == forced
                && hint.count_ones() < bnb.best_size
                && bnb.constraints.iter().all(|&m| (m & hint).count_ones() >= k)
            {
                bnb.best_mask = hint;
                bnb.best_size = hint.count_ones();
            }
        }
        let root_lower = bnb.packing_bound(forced, 0);
        let active: Vec<u32> = (0..bnb.constraints.len() as u32).collect();
        bnb.dfs(forced, 0, &active);
        BnbResult {
            best_mask: bnb.best_mask,
            best_size: bnb.best_size,
            root_lower,
            optimal: !bnb.aborted,
            nodes_used: node_budget - bnb.nodes_left,
        }
    }

    /// A feasible cover: repeatedly take the cell lying in the most
    /// still-deficient constraints, lowest cell index on ties.
    fn greedy_cover(&self, forced: u128) -> u128 {
        let mut chosen = forced;
        loop {
            let mut counts = vec![0u32; self.num_cells];
            let mut any = false;
            for &m in &self.constraints {
                if (m & chosen).count_ones() >= self.k {
                    continue;
                }
                any = true;
                let mut free = m & !chosen;
                while free != 0 {
                    let pos = free.trailing_zeros() as usize;
                    free &= free - 1;
                    counts[pos] += 1;
                }
            }
            if !any {
                return chosen;
            }
            let best = counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .map(|(pos, _)| pos)
                .expect("a deficient constraint has free cells");
            chosen |= 1u128 << best;
        }
    }

    /// Lower bound: chosen cells plus deficits of constraints whose free
    /// cells are pairwise disjoint.
    fn packing_bound(&self, chosen: u128, excluded: u128) -> u32 {
        let mut used = 0u128;
        let mut lb = chosen.count_ones();
        for &m in &self.constraints {
            let hits = (m & chosen).count_ones();
            if hits >= self.k {
                continue;
            }
            let free = m & !excluded & !chosen;
            if free & used == 0 {
                used |= free;
                lb += self.k - hits;
            }
        }
        lb
    }

    fn dfs(&mut self, chosen0: u128, excluded: u128, active: &[u32]) {
        if self.aborted {
            return;
        }
        if self.nodes_left == 0 {
            self.aborted = true;
            return;
        }
        self.nodes_left -= 1;

        // Forced-include fixpoint: a constraint whose free cells just cover
        // its deficit pins them all; one short of that is infeasible.
        let mut chosen = chosen0;
        let mut still: Vec<u32> = Vec::with_capacity(active.len());
        'fixpoint: loop {
            still.clear();
            for &ci in active {
                let m = self.constraints[ci as usize];
                let deficit = self.k.saturating_sub((m & chosen).count_ones());
                if deficit == 0 {
                    continue;
                }
                let free = m & !excluded & !chosen;
                let avail = free.count_ones();
                if avail < deficit {
                    return;
                }
                if avail == deficit {
                    chosen |= free;
                    continue 'fixpoint;
                }
                still.push(ci);
            }
            break;
        }

        if chosen.count_ones() >= self.best_size {
            return;
        }
        if still.is_empty() {
            self.best_mask = chosen;
            self.best_size = chosen.count_ones();
            return;
        }

        // Disjoint-deficit packing bound over the remaining constraints.
        let mut used = 0u128;
        let mut lb = chosen.count_ones();
        for &ci in &still {
            let m = self.constraints[ci as usize];
            let free = m & !excluded & !chosen;
            if free & used == 0 {
                used |= free;
                lb += self.k - (m & chosen).count_ones();
            }
        }
        if lb >= self.best_size {
            return;
        }

        // Branch on the free cell lying in the most deficient constraints.
        let mut counts = vec![0u32; self.num_cells];
        for &ci in &still {
            let m = self.constraints[ci as usize];
            let mut free = m & !excluded & !chosen;
            while free != 0 {
                let pos = free.trailing_zeros() as usize;
                free &= free - 1;
                counts[pos] += 1;
            }
        }
        let cell = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(pos, _)| pos)
            .expect("unsatisfied constraints have free cells");
        let bit = 1u128 << cell;

        self.dfs(chosen | bit, excluded, &still);
        self.dfs(chosen, excluded | bit, &still);
    }
}

fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The lexicographic rank-`rank` combination of `r` indices below `len`.
fn unrank_combination(mut rank: u64, len: usize, r: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(r);
    let mut a = 0usize;
    for i in 0..r {
        loop {
            let with_a = binomial(len - a - 1, r - i - 1);
            if rank < with_a {
                idx.push(a);
                a += 1;
                break;
            }
            rank -= with_a;
            a += 1;
        }
    }
    idx
}

/// Advances to the next lexicographic combination; false after the last.
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

enum VerifyOutcome {
    Verified,
    Violations(Vec<Bitrade>),
    BudgetExhausted,
}

/// Checks a candidate for `k`-strength, returning a canonical batch of
/// violated trades on failure.
///
/// Small orders scan the complete minimal-trade list. Larger orders sweep
/// the `k−1`-deletion subsets with the completion oracle in fixed-size
/// blocks; a block is split across workers, every subset of a block is
/// always checked, and violations are reported in subset-rank order, so
/// the outcome does not depend on the worker count.
fn verify_candidate(
    l: &LatinSquare,
    d: &Pls,
    k: usize,
    workers: usize,
    budget: &mut u64,
) -> VerifyOutcome {
    let n = l.n();
    if n <= MAX_ENUM_ORDER {
        let list = trade_list_for(l).expect("order within the enumeration limit");
        let dmask = cell_mask(d);
        let mut out = Vec::new();
        for &idx in list.minimal_indices() {
            let r = &list.refs[idx as usize];
            if (r.mask & dmask).count_ones() < k as u32 {
                out.push(list.materialize(r));
                if out.len() == VIOLATION_BATCH {
                    break;
                }
            }
        }
        return if out.is_empty() { VerifyOutcome::Verified } else { VerifyOutcome::Violations(out) };
    }

    let triples = d.triples().to_vec();
    let len = triples.len();
    let r = (k - 1).min(len);
    let total = binomial(len, r);
    let workers = workers.max(1);

    let mut start = 0u64;
    while start < total {
        let mut end = total.min(start + VERIFY_BLOCK);
        if end - start > *budget {
            end = start + *budget;
        }
        if end == start {
            return VerifyOutcome::BudgetExhausted;
        }
        *budget -= end - start;

        let block = end - start;
        let chunk = block.div_ceil(workers as u64);
        let mut found: Vec<(u64, LatinSquare)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers as u64 {
                let c_start = start + w * chunk;
                let c_end = end.min(c_start + chunk);
                if c_start >= c_end {
                    break;
                }
                let triples = &triples;
                handles.push(scope.spawn(move || {
                    let mut hits = Vec::new();
                    let mut idx = unrank_combination(c_start, len, r);
                    for rank in c_start..c_end {
                        if rank > c_start {
                            next_combination(&mut idx, len);
                        }
                        let retained = Pls::from_triples(
                            n,
                            triples
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| !idx.contains(i))
                                .map(|(_, t)| *t),
                        )
                        .expect("subset of a valid partial square");
                        let out = count_completions(&retained);
                        if out.class == CountClass::Multiple {
                            let other = out
                                .witnesses
                                .into_iter()
                                .find(|w| w != l)
                                .expect("a second completion differs from the square");
                            hits.push((rank, other));
                        }
                    }
                    hits
                }));
            }
            handles.into_iter().flat_map(|h| h.join().expect("verification worker")).collect()
        });

        if !found.is_empty() {
            found.sort_by_key(|(rank, _)| *rank);
            let mut out: Vec<Bitrade> = Vec::new();
            for (_, other) in found {
                let t = extract_difference(l, &other);
                if !out.contains(&t) {
                    out.push(t);
                }
                if out.len() == VIOLATION_BATCH {
                    break;
                }
            }
            return VerifyOutcome::Violations(out);
        }
        start = end;
    }
    VerifyOutcome::Verified
}

/// Finds the minimum size of a `k`-strong defining set of `l`, with a
/// witness and a re-checkable certificate.
///
/// Exact mode alternates an exact branch-and-bound optimization over the
/// current trade pool with oracle verification of the optimum, growing the
/// pool by violated trades until the optimum verifies; the candidates never
/// repeat, so the loop terminates. Orders up to 5 seed the pool with the
/// complete minimal-trade list, which makes the first optimum final;
/// larger orders seed with row-swap trades plus, for even cyclic squares,
/// the disjoint 2×2 subsquares. Pool-only mode stops after one
/// optimization and reports the certified lower bound.
pub fn search_min_k_strong(
    l: &LatinSquare,
    k: usize,
    opts: &SearchOptions,
) -> Result<SearchCertificate, SearchError> {
    let n = l.n();
    assert!(k >= 1, "strength must be at least 1");
    assert!(n >= 2, "an order-1 square has no trades to be strong against");
    if n > MAX_SEARCH_ORDER {
        return Err(SearchError::OrderTooLarge { n, max: MAX_SEARCH_ORDER });
    }

    let is_cyclic = *l == back_circulant(n);
    let symmetry = opts.symmetry_breaking && is_cyclic;

    let mut pool: Vec<Bitrade> = Vec::new();
    if opts.mode == SearchMode::Exact && n <= MAX_ENUM_ORDER {
        let list = trade_list_for(l).expect("order within the enumeration limit");
        for &idx in list.minimal_indices() {
            pool.push(list.materialize(&list.refs[idx as usize]));
        }
    } else {
        for r1 in 0..n {
            for r2 in r1 + 1..n {
                pool.push(row_swap_trade(l, r1, r2));
            }
        }
        if is_cyclic && n % 2 == 0 {
            for ic in intercalates_of_bn(n).expect("order is even") {
                pool.push(ic.bitrade());
            }
        }
    }
    sort_pool(&mut pool);

    // For the even cyclic square the union of the first k partition pieces
    // is k-strong of the packing-bound size, so it closes the root when
    // the disjoint subsquares are in the pool.
    let incumbent_hint = if is_cyclic && n % 2 == 0 && (1..=4).contains(&k) {
        let parts = crate::constructions::build_c_partition(n).expect("order is even");
        let mut mask = 0u128;
        for part in parts.iter().take(k) {
            for t in part.iter() {
                mask |= 1u128 << (t.row as usize * n + t.col as usize);
            }
        }
        Some(mask)
    } else {
        None
    };

    let forced = if symmetry { 1u128 } else { 0 };
    let mut nodes_left = opts.budget_nodes;
    let mut subsets_left = opts.budget_subsets;
    let mut best_lower = 0usize;
    let mut rounds = Vec::new();

    for round in 1.. {
        if let Some(small) = pool.iter().map(Bitrade::size).min() {
            if small < k {
                return Err(SearchError::Infeasible { k, trade_size: small });
            }
        }

        let mut constraints: Vec<u128> =
            pool.iter().map(|b| bitrade_cell_mask(b, n)).collect();
        constraints.sort_by_key(|m| (m.count_ones(), *m));
        constraints.dedup();

        let result =
            Bnb::solve(constraints, k as u32, n * n, forced, incumbent_hint, nodes_left);
        nodes_left -= result.nodes_used;
        if !result.optimal {
            return Err(SearchError::BudgetExceeded {
                lower_bound: best_lower.max(result.root_lower as usize),
                upper_bound: None,
            });
        }
        best_lower = best_lower.max(result.best_size as usize);
        let candidate = pls_from_mask(l, result.best_mask);

        if opts.mode == SearchMode::PoolOnly {
            rounds.push(RoundTrace {
                round,
                pool_size: pool.len(),
                candidate_size: candidate.len(),
                violations_added: 0,
            });
            return Ok(SearchCertificate {
                square: l.clone(),
                k,
                optimum: candidate.len(),
                witness: candidate,
                pool,
                exact: false,
                symmetry_broken: symmetry,
                rounds,
            });
        }

        match verify_candidate(l, &candidate, k, opts.workers, &mut subsets_left) {
            VerifyOutcome::Verified => {
                rounds.push(RoundTrace {
                    round,
                    pool_size: pool.len(),
                    candidate_size: candidate.len(),
                    violations_added: 0,
                });
                return Ok(SearchCertificate {
                    square: l.clone(),
                    k,
                    optimum: candidate.len(),
                    witness: candidate,
                    pool,
                    exact: true,
                    symmetry_broken: symmetry,
                    rounds,
                });
            }
            VerifyOutcome::Violations(ts) => {
                let before = pool.len();
                for t in ts {
                    if symmetry {
                        for dr in 0..n as i64 {
                            for dc in 0..n as i64 {
                                let shifted = t.shifted(Shift::new(dr, dc));
                                if !pool.contains(&shifted) {
                                    pool.push(shifted);
                                }
                            }
                        }
                    } else if !pool.contains(&t) {
                        pool.push(t);
                    }
                }
                sort_pool(&mut pool);
                let added = pool.len() - before;
                assert!(added > 0, "a violated trade is never already in the pool");
                rounds.push(RoundTrace {
                    round,
                    pool_size: pool.len(),
                    candidate_size: candidate.len(),
                    violations_added: added,
                });
            }
            VerifyOutcome::BudgetExhausted => {
                return Err(SearchError::BudgetExceeded {
                    lower_bound: best_lower,
                    upper_bound: None,
                });
            }
        }
    }
    unreachable!("the round loop returns from within");
}
