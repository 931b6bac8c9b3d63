//! Parametric benchmark families, emitted as product automata.
//!
//! Each generator explores the untimed product of its components from the
//! initial configuration and keeps only the discretely reachable modes, in
//! breadth-first discovery order.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{parse_formula, Formula};
use crate::model::{ClockConstraint, Pred, TimedAutomaton};
use crate::zone::{ClockIndex, CmpOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Fischer,
    FischerBug,
    Csma,
    CsmaBug,
    Pathos,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Fischer, Family::FischerBug, Family::Csma, Family::CsmaBug, Family::Pathos];

    pub fn name(self) -> &'static str {
        match self {
            Family::Fischer => "fischer",
            Family::FischerBug => "fischer-bug",
            Family::Csma => "csma",
            Family::CsmaBug => "csma-bug",
            Family::Pathos => "pathos",
        }
    }

    /// Inclusive range of supported process counts.
    pub fn range(self) -> (usize, usize) {
        match self {
            Family::Fischer | Family::FischerBug => (2, 5),
            Family::Csma | Family::CsmaBug => (2, 4),
            Family::Pathos => (2, 6),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Family, BenchError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| BenchError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown benchmark family `{0}`")]
    UnknownFamily(String),
    #[error("{family} supports {min}..={max} processes, got {n}")]
    OutOfRange { family: Family, n: usize, min: usize, max: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A generated instance: product automaton, property text, and a comment
/// describing the model.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub family: Family,
    pub n: usize,
    pub automaton: TimedAutomaton,
    pub property: String,
    pub notes: Vec<String>,
}

impl Benchmark {
    /// The model in the text format, preceded by `//` comments.
    pub fn model_text(&self) -> String {
        let mut s = String::new();
        for line in &self.notes {
            s += &format!("// {line}\n");
        }
        s + &self.automaton.to_text()
    }

    /// The automaton with formula clocks registered, and the parsed property.
    pub fn formula(&self) -> (TimedAutomaton, Formula) {
        let mut ta = self.automaton.clone();
        let f = parse_formula(&self.property, &mut ta).expect("generated properties parse");
        (ta, f)
    }

    /// Writes `<family>-<n>.ta` and `<family>-<n>.tctl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf), BenchError> {
        std::fs::create_dir_all(dir)?;
        let stem = format!("{}-{}", self.family, self.n);
        let model = dir.join(format!("{stem}.ta"));
        let prop = dir.join(format!("{stem}.tctl"));
        std::fs::write(&model, self.model_text())?;
        std::fs::write(&prop, format!("{}\n", self.property))?;
        Ok((model, prop))
    }
}

pub fn generate(family: Family, n: usize) -> Result<Benchmark, BenchError> {
    let (min, max) = family.range();
    if n < min || n > max {
        return Err(BenchError::OutOfRange { family, n, min, max });
    }
    Ok(match family {
        Family::Fischer => gen_fischer(n, false),
        Family::FischerBug => gen_fischer(n, true),
        Family::Csma => gen_csma(n, false),
        Family::CsmaBug => gen_csma(n, true),
        Family::Pathos => gen_pathos(n),
    })
}

struct Edge<S> {
    guard: Vec<ClockConstraint>,
    resets: Vec<ClockIndex>,
    target: S,
}

fn cc(clock: ClockIndex, op: CmpOp, value: i64) -> ClockConstraint {
    ClockConstraint::new(clock, op, value)
}

/// Breadth-first product construction. Returns the automaton and the global
/// state of every mode, indexed like `ta.modes`.
fn explore<S: Clone + Eq + Hash>(
    clocks: Vec<String>,
    init: S,
    name: impl Fn(&S) -> String,
    invariant: impl Fn(&S) -> Vec<ClockConstraint>,
    successors: impl Fn(&S) -> Vec<Edge<S>>,
) -> (TimedAutomaton, Vec<S>) {
    let mut ta = TimedAutomaton::new(clocks);
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init.clone(), ta.add_mode(name(&init), invariant(&init)))]);
    let mut queue = VecDeque::from([init]);
    let mut edges = Vec::new();
    while let Some(s) = queue.pop_front() {
        let src = index[&s];
        for e in successors(&s) {
            let dst = *index.entry(e.target.clone()).or_insert_with(|| {
                states.push(e.target.clone());
                queue.push_back(e.target.clone());
                ta.add_mode(name(&e.target), invariant(&e.target))
            });
            edges.push((src, dst, e.guard, e.resets));
        }
    }
    for (src, dst, guard, resets) in edges {
        ta.add_transition(src, dst, guard, resets);
    }
    (ta, states)
}

fn modes_where<S>(states: &[S], f: impl Fn(&S) -> bool) -> Pred {
    Pred::any(states.iter().enumerate().filter(|(_, s)| f(s)).map(|(q, _)| Pred::Mode(q)))
}

fn all_clocks_zero(ta: &TimedAutomaton) -> Pred {
    Pred::all((1..=ta.clock_count()).map(|x| Pred::Clock(cc(x, CmpOp::Eq, 0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Fp {
    Idle,
    Ready,
    Wait,
    Critical,
}

/// Write deadline and read delay of Fischer's protocol.
pub const FISCHER_WRITE: i64 = 1;
pub const FISCHER_DELAY: i64 = 2;
/// Upper bound on the time a process may spend in `wait`.
pub const FISCHER_WAIT_BOUND: i64 = 3;

/// Fischer's mutual exclusion protocol with a shared lock pointer.
///
/// Process `i` (clock `xi`): `idle -> ready` when the lock is free,
/// `ready -> wait` within 1 time unit setting the lock to `i`, then enters
/// `critical` after more than 2 time units if the lock is still `i`, or gives
/// up once another process holds it. The buggy variant retries from `ready` instead of giving up,
/// so processes can keep overwriting each other's claim forever.
pub fn gen_fischer(n: usize, bug: bool) -> Benchmark {
    type S = (Vec<Fp>, usize);
    let clocks = (1..=n).map(|i| format!("x{i}")).collect();
    let name = |s: &S| {
        let locals: String = s
            .0
            .iter()
            .map(|p| match p {
                Fp::Idle => 'I',
                Fp::Ready => 'R',
                Fp::Wait => 'W',
                Fp::Critical => 'C',
            })
            .collect();
        format!("f_{locals}_{}", s.1)
    };
    let invariant = |s: &S| {
        s.0.iter()
            .enumerate()
            .filter_map(|(k, p)| match p {
                Fp::Ready => Some(cc(k + 1, CmpOp::Le, FISCHER_WRITE)),
                Fp::Wait => Some(cc(k + 1, CmpOp::Le, FISCHER_WAIT_BOUND)),
                _ => None,
            })
            .collect()
    };
    let successors = |s: &S| {
        let (locals, lock) = s;
        let mut out = Vec::new();
        for (k, p) in locals.iter().enumerate() {
            let (x, id) = (k + 1, k + 1);
            let mut go = |next: Fp, lock: usize, guard: Vec<ClockConstraint>, reset: bool| {
                let mut l = locals.clone();
                l[k] = next;
                out.push(Edge { guard, resets: if reset { vec![x] } else { vec![] }, target: (l, lock) });
            };
            match p {
                Fp::Idle if *lock == 0 => go(Fp::Ready, 0, vec![], true),
                Fp::Idle => {}
                Fp::Ready => go(Fp::Wait, id, vec![cc(x, CmpOp::Le, FISCHER_WRITE)], true),
                Fp::Wait if *lock == id => go(Fp::Critical, id, vec![cc(x, CmpOp::Gt, FISCHER_DELAY)], false),
                Fp::Wait if bug => go(Fp::Ready, *lock, vec![], true),
                Fp::Wait => go(Fp::Idle, *lock, vec![], false),
                Fp::Critical => go(Fp::Idle, 0, vec![], false),
            }
        }
        out
    };
    let (mut ta, states) = explore(clocks, (vec![Fp::Idle; n], 0), name, invariant, successors);
    for i in 1..=n {
        ta.props.push((format!("ready{i}"), modes_where(&states, |s| s.0[i - 1] == Fp::Ready)));
        ta.props.push((format!("critical{i}"), modes_where(&states, |s| s.0[i - 1] == Fp::Critical)));
    }
    ta.initial = Pred::and(Pred::Mode(0), all_clocks_zero(&ta));
    let property = if bug {
        let any: Vec<String> = (1..=n).map(|i| format!("critical{i}")).collect();
        format!("AG (ready1 -> AF ({}))", any.join(" or "))
    } else {
        "AG (ready1 -> AF critical1)".to_string()
    };
    let family = if bug { Family::FischerBug } else { Family::Fischer };
    let mut notes = vec![
        format!("Fischer's protocol, {n} processes; modes f_<locals>_<lock> with I/R/W/C = idle/ready/wait/critical."),
        format!("ready: x <= {FISCHER_WRITE}; wait: x <= {FISCHER_WAIT_BOUND}; enter critical when x > {FISCHER_DELAY} and lock == i."),
    ];
    if bug {
        notes.push("Injected bug: a process that loses the lock goes back to ready instead of idle,".into());
        notes.push("so processes can keep overwriting the lock forever without anyone entering critical.".into());
    }
    Benchmark { family, n, automaton: ta, property, notes }
}

/// Frame transmission time and collision-detection window.
pub const CSMA_FRAME: i64 = 808;
pub const CSMA_SIGMA: i64 = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Bus {
    Idle,
    Active,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sender {
    Wait,
    Transm,
    Retry,
    Error,
}

/// CSMA/CD: one bus (clock `y`) and `n` senders (clocks `xi`).
///
/// A sender begins on a free bus, or on a bus that started less than 26
/// units ago (causing a collision). A collision is broadcast within 26
/// units and every sender retries, beginning again within 52 units.
/// Transmission ends at exactly 808 units. The buggy variant lets a
/// retrying sender fall into a sink mode without any guard.
pub fn gen_csma(n: usize, bug: bool) -> Benchmark {
    type S = (Bus, Vec<Sender>);
    let y = 1;
    let x = |k: usize| k + 2;
    let mut clocks = vec!["y".to_string()];
    clocks.extend((1..=n).map(|i| format!("x{i}")));
    let name = |s: &S| {
        let bus = match s.0 {
            Bus::Idle => 'I',
            Bus::Active => 'A',
            Bus::Collision => 'C',
        };
        let senders: String = s
            .1
            .iter()
            .map(|p| match p {
                Sender::Wait => 'W',
                Sender::Transm => 'T',
                Sender::Retry => 'R',
                Sender::Error => 'E',
            })
            .collect();
        format!("c_{bus}_{senders}")
    };
    let invariant = |s: &S| {
        let mut inv = Vec::new();
        if s.0 == Bus::Collision {
            inv.push(cc(y, CmpOp::Lt, CSMA_SIGMA));
        }
        for (k, p) in s.1.iter().enumerate() {
            match p {
                Sender::Transm => inv.push(cc(x(k), CmpOp::Le, CSMA_FRAME)),
                Sender::Retry => inv.push(cc(x(k), CmpOp::Lt, 2 * CSMA_SIGMA)),
                _ => {}
            }
        }
        inv
    };
    let successors = |s: &S| {
        let (bus, senders) = s;
        let mut out = Vec::new();
        let with = |k: usize, p: Sender| {
            let mut v = senders.clone();
            v[k] = p;
            v
        };
        for (k, p) in senders.iter().enumerate() {
            let begin_guard = if *p == Sender::Retry { vec![cc(x(k), CmpOp::Lt, 2 * CSMA_SIGMA)] } else { vec![] };
            match (p, bus) {
                (Sender::Wait | Sender::Retry, Bus::Idle) => out.push(Edge {
                    guard: begin_guard,
                    resets: vec![y, x(k)],
                    target: (Bus::Active, with(k, Sender::Transm)),
                }),
                (Sender::Wait | Sender::Retry, Bus::Active) => {
                    let mut g = begin_guard;
                    g.push(cc(y, CmpOp::Lt, CSMA_SIGMA));
                    out.push(Edge { guard: g, resets: vec![y, x(k)], target: (Bus::Collision, with(k, Sender::Transm)) });
                    out.push(Edge {
                        guard: vec![cc(y, CmpOp::Ge, CSMA_SIGMA)],
                        resets: vec![x(k)],
                        target: (Bus::Active, with(k, Sender::Retry)),
                    });
                }
                (Sender::Transm, Bus::Active) => out.push(Edge {
                    guard: vec![cc(x(k), CmpOp::Eq, CSMA_FRAME)],
                    resets: vec![y, x(k)],
                    target: (Bus::Idle, with(k, Sender::Wait)),
                }),
                _ => {}
            }
            if bug && *p == Sender::Retry {
                out.push(Edge { guard: vec![], resets: vec![], target: (*bus, with(k, Sender::Error)) });
            }
        }
        if *bus == Bus::Collision {
            let next = senders
                .iter()
                .map(|p| if *p == Sender::Error { Sender::Error } else { Sender::Retry })
                .collect();
            let mut resets = vec![y];
            resets.extend((0..n).filter(|&k| senders[k] != Sender::Error).map(x));
            out.push(Edge { guard: vec![cc(y, CmpOp::Lt, CSMA_SIGMA)], resets, target: (Bus::Idle, next) });
        }
        out
    };
    let (mut ta, states) = explore(clocks, (Bus::Idle, vec![Sender::Wait; n]), name, invariant, successors);
    for i in 1..=n {
        ta.props.push((format!("transm{i}"), modes_where(&states, |s| s.1[i - 1] == Sender::Transm)));
        ta.props.push((format!("retry{i}"), modes_where(&states, |s| s.1[i - 1] == Sender::Retry)));
    }
    ta.initial = Pred::and(Pred::Mode(0), all_clocks_zero(&ta));
    let property = if bug {
        let any: Vec<String> = (1..=n).map(|i| format!("transm{i}")).collect();
        format!("AG (retry1 -> AF ({}))", any.join(" or "))
    } else {
        format!("AG (transm1 -> AF (transm1 and x1 >= {}))", 2 * CSMA_SIGMA)
    };
    let family = if bug { Family::CsmaBug } else { Family::Csma };
    let mut notes = vec![
        format!("CSMA/CD, {n} senders; modes c_<bus>_<senders>, bus I/A/C = idle/active/collision,"),
        "senders W/T/R/E = wait/transm/retry/error. Collisions are broadcast to every sender.".into(),
        format!("frame time {CSMA_FRAME}, collision window {CSMA_SIGMA}, retry deadline {}.", 2 * CSMA_SIGMA),
    ];
    if bug {
        notes.push("Injected bug: an unguarded transition from retry into the sink mode error.".into());
    }
    Benchmark { family, n, automaton: ta, property, notes }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Task {
    Idle,
    Ready,
    Run,
}

/// Priority scheduling of `n` periodic tasks on one processor; task 1 has
/// the highest priority.
///
/// A task becomes ready at least `n` units after its last start, runs for
/// at most 1 unit when the processor is free and no higher-priority task is
/// ready, then goes idle. Nothing forces a ready task to be scheduled, so
/// the lowest-priority task can starve.
pub fn gen_pathos(n: usize) -> Benchmark {
    let period = n as i64;
    let clocks = (1..=n).map(|i| format!("x{i}")).collect();
    let name = |s: &Vec<Task>| {
        let tasks: String = s
            .iter()
            .map(|t| match t {
                Task::Idle => 'I',
                Task::Ready => 'R',
                Task::Run => 'X',
            })
            .collect();
        format!("p_{tasks}")
    };
    let invariant = |s: &Vec<Task>| {
        s.iter()
            .enumerate()
            .filter(|(_, t)| **t == Task::Run)
            .map(|(k, _)| cc(k + 1, CmpOp::Le, 1))
            .collect()
    };
    let successors = |s: &Vec<Task>| {
        let mut out = Vec::new();
        let busy = s.contains(&Task::Run);
        for (k, t) in s.iter().enumerate() {
            let mut next = s.clone();
            let x = k + 1;
            match t {
                Task::Idle => {
                    next[k] = Task::Ready;
                    out.push(Edge { guard: vec![cc(x, CmpOp::Ge, period)], resets: vec![], target: next });
                }
                Task::Ready if !busy && !s[..k].contains(&Task::Ready) => {
                    next[k] = Task::Run;
                    out.push(Edge { guard: vec![], resets: vec![x], target: next });
                }
                Task::Ready => {}
                Task::Run => {
                    next[k] = Task::Idle;
                    out.push(Edge { guard: vec![], resets: vec![], target: next });
                }
            }
        }
        out
    };
    let (mut ta, states) = explore(clocks, vec![Task::Idle; n], name, invariant, successors);
    for i in 1..=n {
        ta.props.push((format!("run{i}"), modes_where(&states, |s| s[i - 1] == Task::Run)));
    }
    ta.initial = Pred::and(Pred::Mode(0), all_clocks_zero(&ta));
    let notes = vec![
        format!("Priority scheduling of {n} tasks (task 1 highest); modes p_<tasks> with I/R/X = idle/ready/running."),
        format!("A task is released {period} units after its last start and runs for at most 1 unit."),
        "Reconstructed from a one-sentence description; ready tasks are not forced to run.".into(),
    ];
    Benchmark { family: Family::Pathos, n, automaton: ta, property: format!("AGF run{n}"), notes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    #[test]
    fn generated_models_parse_back() {
        for family in Family::ALL {
            let (min, max) = family.range();
            for n in min..=max.min(3) {
                let b = generate(family, n).unwrap();
                let again = parse_model(&b.model_text()).unwrap();
                assert_eq!(again, b.automaton, "{family} {n}");
                b.formula();
            }
        }
    }

    #[test]
    fn range_is_enforced() {
        assert!(matches!(generate(Family::Fischer, 1), Err(BenchError::OutOfRange { .. })));
        assert!(matches!(generate(Family::Csma, 5), Err(BenchError::OutOfRange { .. })));
        assert!("token-ring".parse::<Family>().is_err());
        assert_eq!("csma-bug".parse::<Family>().unwrap(), Family::CsmaBug);
    }

    #[test]
    fn mode_counts_grow_with_n() {
        for family in Family::ALL {
            let a = generate(family, 2).unwrap().automaton.modes.len();
            let b = generate(family, 3).unwrap().automaton.modes.len();
            assert!(a < b, "{family}: {a} vs {b}");
        }
    }

    #[test]
    fn collision_window_appears_in_guards() {
        let b = gen_csma(2, false);
        assert!(b.model_text().contains("x1 < 52"));
        assert!(b.property.contains("x1 >= 52"));
    }
}
