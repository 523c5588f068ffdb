//! Tournament structure analysis.
//!
//! Formats are modelled as destination-coded match graphs (single and double
//! elimination) or round-robin schedules, then measured three ways:
//!
//! * conduction cost: how many matches the format needs;
//! * competitiveness development: per-participant progress trees whose nodes
//!   carry stability values, checked for win/loss ordering, for prizes
//!   dropping out least valuable first, and for throwaway matches;
//! * ranking precision: exhaustive enumeration of strength assignments under
//!   a stronger-always-wins comparator, tallied per placement class.

pub mod bracket;
pub mod error;
pub mod generators;
pub mod precision;
pub mod progress;
pub mod report;

pub use bracket::{
    conduction_cost, BracketGraph, CompiledBracket, Destination, Format, MatchNode, Outcome,
    PlacementClass, PrizeVector, RoundSchedule, Source, ValidationReport, Violation, ViolationKind,
};
pub use error::{Error, Result};
pub use generators::{
    gen_double_elim, gen_double_elim_with, gen_round_robin, gen_single_elim, DropWiring,
};
