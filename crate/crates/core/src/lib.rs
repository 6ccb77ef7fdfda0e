//! Partial Latin squares, Latin bitrades, and k-strong defining sets,
//! specialized to the cyclic (back-circulant) square.
//!
//! The crate provides:
//!
//! - core types for partial Latin squares and the cyclic square, with its
//!   translation and transposition symmetries ([`pls`]);
//! - an exact completion oracle deciding unique completability ([`completion`]);
//! - bitrade validation, enumeration at small order, and trade extraction
//!   ([`trades`]);
//! - an integer-exact geometry kernel compiling triangle tessellations into
//!   bitrades of the cyclic square ([`tessellation`]);
//! - the named diagonal-band and quarter-partition constructions together
//!   with their per-element witness trades ([`constructions`]);
//! - k-strong verification, minimization, chain extraction, and an exact
//!   branch-and-bound search with lazy constraint generation ([`strength`],
//!   [`search`]);
//! - text, JSON, and SVG serialization ([`io`], [`svg`]).

pub mod completion;
pub mod constructions;
pub mod io;
pub mod pls;
pub mod search;
pub mod strength;
pub mod svg;
pub mod tessellation;
pub mod trades;

pub use completion::{
    count_completions, is_defining_set, replay_forced, CompletionError, CompletionOutcome,
    CountClass, ReplayFailure, ReplayReport,
};
pub use constructions::{
    anti_transpose, build_c_partition, build_p, build_q, build_qk, qn_completion_sequence,
    witness_p, witness_q, ConstructError,
};
pub use pls::{
    back_circulant, diagonal, shift, shift_unchecked, transpose, LatinSquare, Pls, PlsError,
    Shift, Triple, MAX_ORDER,
};
pub use search::{
    search_min_k_strong, RoundTrace, SearchCertificate, SearchError, SearchMode, SearchOptions,
};
pub use strength::{
    extract_chain, intercalate_lower_bound, minimize_k_strong, verify_k_strong,
    verify_minimal_k_strong, Chain, IntercalateBound, StrengthError, StrengthReport,
};
pub use tessellation::{
    doubletool, doubletool_tessellation, sparse_trade, tessellate_rectangle,
    tessellation_to_trade, tripletool, tripletool_tessellation, validate_tessellation,
    GoodTriangle, Region, TessError, Tessellation,
};
pub use trades::{
    difference_trade, enumerate_trades, intercalates_of_bn, row_swap_trade, smallest_trade_size,
    trade_through, validate_bitrade, Bitrade, BitradeAxiom, Intercalate, TradeError,
};
