//! Symbolic TCTL∞ model checking of timed automata over unions of
//! difference-bound matrices, with exact and successively
//! under-approximated evaluation of non-Zeno fair cycles.

pub mod benchmarks;
pub mod cli;
pub mod engine;
pub mod formula;
pub mod model;
pub mod region_oracle;
pub mod syntax;
pub mod zone;

pub use engine::{ApproxMode, CheckResult, Checker, EngineConfig, EngineError, Stats, Verdict};
pub use formula::{parse_formula, Formula};
pub use model::{parse_model, StateSet, TimedAutomaton};
pub use zone::{Bound, BoundRel, Ceiling, ClockIndex, CmpOp, Zone};
