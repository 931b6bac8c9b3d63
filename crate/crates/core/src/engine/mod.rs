//! Symbolic evaluation of TCTL∞ formulas over zone-based state sets:
//! backward reachability, non-Zeno fair cycles (exact and successively
//! under-approximated), and the verdict rule.

mod nzf;
mod reach;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Formula;
use crate::model::{Pred, StateSet, System, TimedAutomaton};
use crate::zone::{Ceiling, ClockIndex, CmpOp};

/// Direction of approximation requested from the fair-cycle computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxMode {
    Under,
    Exact,
    Over,
}

impl ApproxMode {
    /// The flag value used by the recursive evaluator: -1, 0 or +1.
    pub fn flag(self) -> i8 {
        match self {
            ApproxMode::Under => -1,
            ApproxMode::Exact => 0,
            ApproxMode::Over => 1,
        }
    }

    /// Mode for the operand of a negation.
    pub fn flip(self) -> ApproxMode {
        match self {
            ApproxMode::Under => ApproxMode::Over,
            ApproxMode::Exact => ApproxMode::Exact,
            ApproxMode::Over => ApproxMode::Under,
        }
    }
}

impl fmt::Display for ApproxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApproxMode::Under => "under",
            ApproxMode::Exact => "exact",
            ApproxMode::Over => "over",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    /// Number of zone-search rounds in under-approximation.
    pub level: usize,
    /// Prune the search space by whole backward closures.
    pub big_chunks: bool,
    /// Restrict `∃U` targets to states that start a divergent run.
    pub non_zeno: bool,
    /// Normalization ceiling; derived from the model and formula if unset.
    pub ceiling: Option<Ceiling>,
    /// Minimum time per lap of a fair cycle, measured on the auxiliary clock.
    pub cycle_threshold: i64,
    /// Hard cap on fixpoint iterations per check.
    pub max_iterations: u64,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig {
            level: 1,
            big_chunks: true,
            non_zeno: true,
            ceiling: None,
            cycle_threshold: 1,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("fixpoint iteration limit of {0} exceeded")]
    IterationLimit(u64),
    #[error("ceiling {given} is below the largest constant {required}")]
    CeilingTooSmall { given: i64, required: i64 },
    #[error("cycle threshold must be positive, got {0}")]
    BadThreshold(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Satisfied,
    Refuted,
    Inconclusive,
}

impl Verdict {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Satisfied => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "SATISFIED",
            Verdict::Refuted => "REFUTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Counters accumulated over a checker's lifetime.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub fixpoint_iterations: u64,
    pub peak_zone_count: usize,
    /// Largest number of zone-search rounds actually performed by one
    /// under-approximation.
    pub level_used: usize,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub mode: ApproxMode,
    /// Initial states satisfying the negated property (as computed).
    pub witness: StateSet,
    /// Zone count of the evaluated negation.
    pub final_zone_count: usize,
    pub stats: Stats,
}

/// Evaluator bound to one automaton (including formula clocks) plus the
/// auxiliary cycle-time clock, appended as the last clock.
pub struct Checker {
    sys: System,
    z: ClockIndex,
    cfg: EngineConfig,
    stats: Stats,
    divergent: HashMap<ApproxMode, StateSet>,
}

impl Checker {
    /// Builds a checker whose ceiling covers the automaton, `formulas`, and
    /// the cycle threshold. Formula clocks must already be registered in `ta`.
    pub fn new(ta: &TimedAutomaton, formulas: &[&Formula], cfg: EngineConfig) -> Result<Checker, EngineError> {
        if cfg.cycle_threshold <= 0 {
            return Err(EngineError::BadThreshold(cfg.cycle_threshold));
        }
        let required = formulas
            .iter()
            .map(|f| f.max_constant())
            .fold(ta.max_constant(), i64::max)
            .max(cfg.cycle_threshold)
            .max(1);
        let ceiling = match cfg.ceiling {
            Some(c) if c.0 < required => return Err(EngineError::CeilingTooSmall { given: c.0, required }),
            Some(c) => c,
            None => Ceiling(required),
        };
        let sys = System::new(ta.clone(), 1, ceiling);
        let z = sys.dim() - 1;
        Ok(Checker { sys, z, cfg, stats: Stats::default(), divergent: HashMap::new() })
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn config_mut(&mut self) -> &mut EngineConfig {
        &mut self.cfg
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = Stats::default();
    }

    /// Index of the auxiliary cycle-time clock.
    pub fn aux_clock(&self) -> ClockIndex {
        self.z
    }

    pub fn ceiling(&self) -> Ceiling {
        self.sys.ceiling()
    }

    pub fn sat(&self, p: &Pred) -> StateSet {
        self.sys.sat(p)
    }

    pub fn all_states(&self) -> StateSet {
        self.sys.all_states()
    }

    fn tick(&mut self, current: &StateSet) -> Result<(), EngineError> {
        self.stats.fixpoint_iterations += 1;
        self.stats.peak_zone_count = self.stats.peak_zone_count.max(current.zone_count());
        if self.stats.fixpoint_iterations > self.cfg.max_iterations {
            return Err(EngineError::IterationLimit(self.cfg.max_iterations));
        }
        Ok(())
    }

    /// Fair-cycle states under the requested approximation.
    pub fn nzf(&mut self, s0: &StateSet, s1: &StateSet, s2: &StateSet, mode: ApproxMode) -> Result<StateSet, EngineError> {
        match mode {
            ApproxMode::Under => {
                let level = self.cfg.level;
                if self.cfg.big_chunks {
                    self.nzf_under_big_chunks(s0, s1, s2, level)
                } else {
                    self.nzf_under(s0, s1, s2, level)
                }
            }
            ApproxMode::Exact | ApproxMode::Over => self.nzf_exact(s0, s1, s2),
        }
    }

    /// States that start a time-divergent run, cached per mode.
    fn divergent_states(&mut self, mode: ApproxMode) -> Result<StateSet, EngineError> {
        if let Some(s) = self.divergent.get(&mode) {
            return Ok(s.clone());
        }
        let all = self.all_states();
        let s = self.nzf(&all, &all, &all, mode)?;
        self.divergent.insert(mode, s.clone());
        Ok(s)
    }

    /// Structural evaluation of a core-grammar formula.
    pub fn eval(&mut self, f: &Formula, mode: ApproxMode) -> Result<StateSet, EngineError> {
        let c = f.max_constant();
        if c > self.ceiling().0 {
            return Err(EngineError::CeilingTooSmall { given: self.ceiling().0, required: c });
        }
        self.eval_rec(f, mode)
    }

    fn eval_rec(&mut self, f: &Formula, mode: ApproxMode) -> Result<StateSet, EngineError> {
        Ok(match f {
            Formula::Mode(q) => self.sys.sat(&Pred::Mode(*q)),
            Formula::Clock(c) => self.sys.sat(&Pred::Clock(*c)),
            Formula::Or(a, b) => {
                let a = self.eval_rec(a, mode)?;
                a.union(&self.eval_rec(b, mode)?)
            }
            Formula::Not(a) => {
                let a = self.eval_rec(a, mode.flip())?;
                self.sys.negate(&a)
            }
            Formula::Freeze(x, a) => {
                let inner = self.eval_rec(a, mode)?;
                let zero = self.sys.atom_zone(*x, CmpOp::Eq, 0);
                inner.intersect_zone(&zero).map_zones(|z| z.free(*x)).intersect(&self.all_states())
            }
            Formula::ExistsUntil(a, b) => {
                let y1 = self.eval_rec(a, mode)?;
                let mut y2 = self.eval_rec(b, mode)?;
                if self.cfg.non_zeno {
                    y2 = y2.intersect(&self.divergent_states(mode)?);
                }
                self.rch_bck(&y1, &y2)?
            }
            Formula::ExistsAlways(a) => {
                let w = self.eval_rec(a, mode)?;
                let all = self.all_states();
                self.nzf(&w, &w, &all, mode)?
            }
            Formula::ExistsAlwaysEventually(a) => {
                let w = self.eval_rec(a, mode)?;
                let all = self.all_states();
                self.nzf(&all, &all, &w, mode)?
            }
            Formula::ExistsEventuallyAlways(a) => {
                let w = self.eval_rec(a, mode)?;
                let all = self.all_states();
                self.nzf(&all, &w, &all, mode)?
            }
        })
    }

    /// Checks `f` against the initial condition. The negation of `f` is
    /// evaluated in `mode`; an under-approximation can only refute and an
    /// over-approximation can only confirm. A vacuous initial condition is
    /// satisfied in every mode.
    pub fn check(&mut self, f: &Formula, mode: ApproxMode) -> Result<CheckResult, EngineError> {
        let neg = self.eval(&Formula::not(f.clone()), mode)?;
        let init = self.sys.sat(&self.sys.automaton().initial.clone());
        let witness = init.intersect(&neg);
        // An empty initial set leaves nothing for an approximation to miss.
        let verdict = match (mode, witness.is_empty()) {
            _ if init.is_empty() => Verdict::Satisfied,
            (ApproxMode::Exact, true) | (ApproxMode::Over, true) => Verdict::Satisfied,
            (ApproxMode::Exact, false) | (ApproxMode::Under, false) => Verdict::Refuted,
            (ApproxMode::Under, true) | (ApproxMode::Over, false) => Verdict::Inconclusive,
        };
        Ok(CheckResult {
            verdict,
            mode,
            witness,
            final_zone_count: neg.zone_count(),
            stats: self.stats.clone(),
        })
    }
}
