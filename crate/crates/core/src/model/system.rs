use super::{ClockConstraint, Pred, StateSet, TimedAutomaton, Transition};
use crate::zone::{Ceiling, ClockIndex, CmpOp, Zone};

/// A timed automaton prepared for symbolic analysis: invariant and guard
/// zones, a fixed zone dimension (possibly with auxiliary clocks appended
/// after the automaton and formula clocks), and the normalization ceiling.
#[derive(Debug, Clone)]
pub struct System {
    ta: TimedAutomaton,
    dim: usize,
    ceiling: Ceiling,
    invariants: Vec<Zone>,
    guards: Vec<Zone>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl System {
    /// `aux_clocks` extra clocks are appended after `ta.clock_count()`.
    pub fn new(ta: TimedAutomaton, aux_clocks: usize, ceiling: Ceiling) -> System {
        let dim = 1 + ta.clock_count() + aux_clocks;
        let conj = |cs: &[ClockConstraint]| {
            let mut z = Zone::universal(dim);
            for c in cs {
                z.constrain_atom(c.clock, c.op, c.value);
            }
            z
        };
        let invariants = ta.modes.iter().map(|m| conj(&m.invariant)).collect();
        let guards = ta.transitions.iter().map(|t| conj(&t.guard)).collect();
        let mut incoming = vec![Vec::new(); ta.modes.len()];
        let mut outgoing = vec![Vec::new(); ta.modes.len()];
        for t in &ta.transitions {
            incoming[t.target].push(t.id);
            outgoing[t.source].push(t.id);
        }
        System { ta, dim, ceiling, invariants, guards, incoming, outgoing }
    }

    pub fn automaton(&self) -> &TimedAutomaton {
        &self.ta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ceiling(&self) -> Ceiling {
        self.ceiling
    }

    pub fn mode_count(&self) -> usize {
        self.ta.modes.len()
    }

    pub fn invariant(&self, mode: usize) -> &Zone {
        &self.invariants[mode]
    }

    pub fn transition(&self, e: usize) -> &Transition {
        &self.ta.transitions[e]
    }

    pub fn incoming(&self, mode: usize) -> &[usize] {
        &self.incoming[mode]
    }

    pub fn outgoing(&self, mode: usize) -> &[usize] {
        &self.outgoing[mode]
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.mode_count(), self.dim, self.ceiling)
    }

    /// All invariant-satisfying states.
    pub fn all_states(&self) -> StateSet {
        let mut s = self.empty_set();
        for (q, z) in self.invariants.iter().enumerate() {
            s.insert(q, z.clone());
        }
        s
    }

    pub fn singleton(&self, mode: usize, zone: Zone) -> StateSet {
        let mut s = self.empty_set();
        s.insert(mode, zone.intersect(&self.invariants[mode]));
        s
    }

    pub fn atom_zone(&self, x: ClockIndex, op: CmpOp, c: i64) -> Zone {
        Zone::atom(self.dim, x, op, c)
    }

    /// States satisfying `p`, restricted to mode invariants.
    pub fn sat(&self, p: &Pred) -> StateSet {
        match p {
            Pred::True => self.all_states(),
            Pred::False => self.empty_set(),
            Pred::Mode(q) => {
                let mut s = self.empty_set();
                s.insert(*q, self.invariants[*q].clone());
                s
            }
            Pred::Clock(c) => self.all_states().intersect_zone(&self.atom_zone(c.clock, c.op, c.value)),
            Pred::Not(a) => self.negate(&self.sat(a)),
            Pred::And(a, b) => self.sat(a).intersect(&self.sat(b)),
            Pred::Or(a, b) => self.sat(a).union(&self.sat(b)),
        }
    }

    /// Complement within the invariant-satisfying state space.
    pub fn negate(&self, s: &StateSet) -> StateSet {
        self.all_states().subtract(s)
    }

    /// Weakest precondition of `s` through transition `e`.
    pub fn xtion_bck(&self, s: &StateSet, e: usize) -> StateSet {
        let t = &self.ta.transitions[e];
        let mut out = self.empty_set();
        for z in s.zones(t.target) {
            out.insert(t.source, self.xtion_bck_zone(z, e));
        }
        out
    }

    /// Weakest precondition of one target-mode zone through `e`, as a zone in
    /// the source mode.
    pub fn xtion_bck_zone(&self, z: &Zone, e: usize) -> Zone {
        let t = &self.ta.transitions[e];
        let pre = z.intersect(&self.invariants[t.target]).reset_pre(&t.resets);
        pre.intersect(&self.guards[e]).intersect(&self.invariants[t.source])
    }

    /// States that reach `s` by letting time pass inside the current mode's
    /// invariant.
    pub fn time_bck(&self, s: &StateSet) -> StateSet {
        let mut out = self.empty_set();
        for (q, z) in s.iter() {
            out.insert(q, z.time_down().intersect(&self.invariants[q]));
        }
        out
    }

    /// Forward time closure within invariants.
    pub fn post_time(&self, s: &StateSet) -> StateSet {
        let mut out = self.empty_set();
        for (q, z) in s.iter() {
            out.insert(q, self.post_time_zone(q, z));
        }
        out
    }

    pub fn post_time_zone(&self, q: usize, z: &Zone) -> Zone {
        z.intersect(&self.invariants[q]).time_up().intersect(&self.invariants[q])
    }

    /// Discrete successors of `s` through `e`.
    pub fn post_disc(&self, s: &StateSet, e: usize) -> StateSet {
        let t = &self.ta.transitions[e];
        let mut out = self.empty_set();
        for z in s.zones(t.source) {
            out.insert(t.target, self.post_disc_zone(z, e));
        }
        out
    }

    pub fn post_disc_zone(&self, z: &Zone, e: usize) -> Zone {
        let t = &self.ta.transitions[e];
        let mut img = z.intersect(&self.invariants[t.source]).intersect(&self.guards[e]);
        for &x in &t.resets {
            img = img.reset(x);
        }
        img.intersect(&self.invariants[t.target])
    }

    pub fn mode_names(&self) -> Vec<String> {
        self.ta.modes.iter().map(|m| m.name.clone()).collect()
    }
}
