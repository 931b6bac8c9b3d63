//! Timed automata, state predicates, and symbolic state sets.

pub(crate) mod parse;
mod state_set;
mod system;

use std::fmt;

use thiserror::Error;

use crate::syntax::SyntaxError;
use crate::zone::{ClockIndex, CmpOp};

pub use parse::parse_model;
pub use state_set::StateSet;
pub use system::System;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Atomic clock constraint `x ∼ c`; `x = 0` denotes the reference clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClockConstraint {
    pub clock: ClockIndex,
    pub op: CmpOp,
    pub value: i64,
}

impl ClockConstraint {
    pub fn new(clock: ClockIndex, op: CmpOp, value: i64) -> ClockConstraint {
        ClockConstraint { clock, op, value }
    }
}

/// Boolean combination of mode and clock atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    True,
    False,
    Mode(usize),
    Clock(ClockConstraint),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Pred {
    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Pred) -> Pred {
        Pred::Not(Box::new(a))
    }

    pub fn any(preds: impl IntoIterator<Item = Pred>) -> Pred {
        preds.into_iter().reduce(Pred::or).unwrap_or(Pred::False)
    }

    pub fn all(preds: impl IntoIterator<Item = Pred>) -> Pred {
        preds.into_iter().reduce(Pred::and).unwrap_or(Pred::True)
    }

    /// Largest absolute constant.
    pub fn max_constant(&self) -> i64 {
        match self {
            Pred::True | Pred::False | Pred::Mode(_) => 0,
            Pred::Clock(c) => c.value.abs(),
            Pred::Not(a) => a.max_constant(),
            Pred::And(a, b) | Pred::Or(a, b) => a.max_constant().max(b.max_constant()),
        }
    }

    /// Evaluates the predicate at a concrete state `(mode, point / denom)`.
    pub fn holds_scaled(&self, mode: usize, point: &[i64], denom: i64) -> bool {
        match self {
            Pred::True => true,
            Pred::False => false,
            Pred::Mode(q) => *q == mode,
            Pred::Clock(c) => holds_scaled(c, point, denom),
            Pred::Not(a) => !a.holds_scaled(mode, point, denom),
            Pred::And(a, b) => a.holds_scaled(mode, point, denom) && b.holds_scaled(mode, point, denom),
            Pred::Or(a, b) => a.holds_scaled(mode, point, denom) || b.holds_scaled(mode, point, denom),
        }
    }
}

/// Whether `point[c.clock] / denom ∼ c.value`.
pub fn holds_scaled(c: &ClockConstraint, point: &[i64], denom: i64) -> bool {
    let v = if c.clock == 0 { 0 } else { point[c.clock] };
    let rhs = c.value * denom;
    c.op.holds(v, rhs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mode {
    pub name: String,
    pub invariant: Vec<ClockConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    pub guard: Vec<ClockConstraint>,
    pub resets: Vec<ClockIndex>,
}

/// `⟨X, Q, I, μ, E, γ, τ, π⟩`: clocks, modes with conjunctive invariants,
/// guarded transitions with resets, and an initial state predicate.
///
/// `clocks[k]` is clock index `k + 1`. The first `model_clocks` entries
/// belong to the automaton; the remainder are formula (freeze) clocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub clocks: Vec<String>,
    pub model_clocks: usize,
    pub modes: Vec<Mode>,
    pub transitions: Vec<Transition>,
    pub initial: Pred,
    /// Named state predicates usable in formulas and the initial condition.
    pub props: Vec<(String, Pred)>,
}

impl TimedAutomaton {
    pub fn new(clocks: Vec<String>) -> TimedAutomaton {
        let model_clocks = clocks.len();
        TimedAutomaton {
            clocks,
            model_clocks,
            modes: Vec::new(),
            transitions: Vec::new(),
            initial: Pred::True,
            props: Vec::new(),
        }
    }

    pub fn add_mode(&mut self, name: impl Into<String>, invariant: Vec<ClockConstraint>) -> usize {
        self.modes.push(Mode { name: name.into(), invariant });
        self.modes.len() - 1
    }

    pub fn add_transition(
        &mut self,
        source: usize,
        target: usize,
        guard: Vec<ClockConstraint>,
        resets: Vec<ClockIndex>,
    ) -> usize {
        let id = self.transitions.len();
        self.transitions.push(Transition { id, source, target, guard, resets });
        id
    }

    /// Number of clocks including formula clocks (excluding the reference).
    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn clock_index(&self, name: &str) -> Option<ClockIndex> {
        self.clocks.iter().position(|c| c == name).map(|i| i + 1)
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.name == name)
    }

    pub fn prop(&self, name: &str) -> Option<&Pred> {
        self.props.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// Appends a formula clock and returns its index.
    pub fn add_formula_clock(&mut self, name: impl Into<String>) -> ClockIndex {
        self.clocks.push(name.into());
        self.clocks.len()
    }

    pub fn clock_name(&self, x: ClockIndex) -> &str {
        if x == 0 {
            "0"
        } else {
            &self.clocks[x - 1]
        }
    }

    /// Largest absolute timing constant in invariants, guards, initial
    /// condition, and named predicates.
    pub fn max_constant(&self) -> i64 {
        let conj = |cs: &[ClockConstraint]| cs.iter().map(|c| c.value.abs()).max().unwrap_or(0);
        let modes = self.modes.iter().map(|m| conj(&m.invariant)).max().unwrap_or(0);
        let trans = self.transitions.iter().map(|t| conj(&t.guard)).max().unwrap_or(0);
        let props = self.props.iter().map(|(_, p)| p.max_constant()).max().unwrap_or(0);
        modes.max(trans).max(props).max(self.initial.max_constant())
    }

    /// Checks that every reference resolves and constants are non-negative.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.clock_count();
        let check_cc = |c: &ClockConstraint, ctx: &str| -> Result<(), ModelError> {
            if c.clock > n {
                return Err(ModelError::Invalid(format!("{ctx}: clock index {} out of range", c.clock)));
            }
            if c.clock > self.model_clocks {
                return Err(ModelError::Invalid(format!(
                    "{ctx}: formula clock `{}` used in the automaton",
                    self.clock_name(c.clock)
                )));
            }
            if c.value < 0 {
                return Err(ModelError::Invalid(format!("{ctx}: negative constant {}", c.value)));
            }
            Ok(())
        };
        if self.modes.is_empty() {
            return Err(ModelError::Invalid("no modes declared".into()));
        }
        for (i, m) in self.modes.iter().enumerate() {
            if self.modes[..i].iter().any(|o| o.name == m.name) {
                return Err(ModelError::Duplicate(m.name.clone()));
            }
            for c in &m.invariant {
                check_cc(c, &format!("invariant of `{}`", m.name))?;
            }
        }
        for (i, c) in self.clocks.iter().enumerate() {
            if self.clocks[..i].contains(c) {
                return Err(ModelError::Duplicate(c.clone()));
            }
        }
        for t in &self.transitions {
            if t.source >= self.modes.len() || t.target >= self.modes.len() {
                return Err(ModelError::Invalid(format!("transition {} refers to a missing mode", t.id)));
            }
            let ctx = format!("transition {}", t.id);
            for c in &t.guard {
                check_cc(c, &ctx)?;
            }
            if t.resets.iter().any(|&x| x == 0 || x > self.model_clocks) {
                return Err(ModelError::Invalid(format!("{ctx}: bad reset clock")));
            }
        }
        self.check_pred(&self.initial)?;
        for (_, p) in &self.props {
            self.check_pred(p)?;
        }
        Ok(())
    }

    fn check_pred(&self, p: &Pred) -> Result<(), ModelError> {
        match p {
            Pred::True | Pred::False => Ok(()),
            Pred::Mode(q) if *q < self.modes.len() => Ok(()),
            Pred::Mode(q) => Err(ModelError::Invalid(format!("mode index {q} out of range"))),
            Pred::Clock(c) if c.clock <= self.clock_count() && c.value >= 0 => Ok(()),
            Pred::Clock(c) => Err(ModelError::Invalid(format!("bad clock atom {c:?}"))),
            Pred::Not(a) => self.check_pred(a),
            Pred::And(a, b) | Pred::Or(a, b) => {
                self.check_pred(a)?;
                self.check_pred(b)
            }
        }
    }

    /// Renders the automaton in the model text format accepted by
    /// [`parse_model`].
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let model_clocks = &self.clocks[..self.model_clocks];
        if !model_clocks.is_empty() {
            writeln!(s, "clocks {};", model_clocks.join(" ")).unwrap();
        }
        for m in &self.modes {
            writeln!(s, "mode {} {{ inv: {}; }}", m.name, self.conj_text(&m.invariant)).unwrap();
        }
        for t in &self.transitions {
            write!(
                s,
                "trans {} -> {} {{ guard: {};",
                self.modes[t.source].name,
                self.modes[t.target].name,
                self.conj_text(&t.guard)
            )
            .unwrap();
            if !t.resets.is_empty() {
                let names: Vec<&str> = t.resets.iter().map(|&x| self.clock_name(x)).collect();
                write!(s, " reset: {};", names.join(", ")).unwrap();
            }
            writeln!(s, " }}").unwrap();
        }
        for (name, p) in &self.props {
            writeln!(s, "prop {name}: {};", self.pred_text(p)).unwrap();
        }
        writeln!(s, "init {};", self.pred_text(&self.initial)).unwrap();
        s
    }

    pub fn constraint_text(&self, c: &ClockConstraint) -> String {
        format!("{} {} {}", self.clock_name(c.clock), c.op.symbol(), c.value)
    }

    fn conj_text(&self, cs: &[ClockConstraint]) -> String {
        if cs.is_empty() {
            "true".to_string()
        } else {
            cs.iter().map(|c| self.constraint_text(c)).collect::<Vec<_>>().join(" and ")
        }
    }

    pub fn pred_text(&self, p: &Pred) -> String {
        match p {
            Pred::True => "true".into(),
            Pred::False => "false".into(),
            Pred::Mode(q) => self.modes[*q].name.clone(),
            Pred::Clock(c) => self.constraint_text(c),
            Pred::Not(a) => format!("not {}", self.pred_text_atomic(a)),
            Pred::And(a, b) => format!("{} and {}", self.pred_text_atomic(a), self.pred_text_atomic(b)),
            Pred::Or(a, b) => format!("({} or {})", self.pred_text(a), self.pred_text(b)),
        }
    }

    fn pred_text_atomic(&self, p: &Pred) -> String {
        match p {
            Pred::And(..) => format!("({})", self.pred_text(p)),
            _ => self.pred_text(p),
        }
    }
}

impl fmt::Display for TimedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
