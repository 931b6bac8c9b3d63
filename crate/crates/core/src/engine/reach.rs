use super::{Checker, EngineError};
use crate::model::StateSet;
use crate::zone::Zone;

impl Checker {
    /// States with a run that stays in `s1` until it reaches `s2`.
    ///
    /// Least fixpoint of `F = s2 ∪ safe_pre(s1 ∩ ⋃ₑ xtion_bck(F, e))`, where
    /// the time step only passes through `s1 ∪ s2`. Evaluated semi-naively:
    /// each round only pushes zones not covered by a single known zone
    /// through the transitions. No zone is added twice, so the finite
    /// normalized zone space bounds the iteration.
    pub fn rch_bck(&mut self, s1: &StateSet, s2: &StateSet) -> Result<StateSet, EngineError> {
        let all = self.sys.all_states();
        let s1 = s1.intersect(&all);
        let s2 = s2.intersect(&all);
        let safe = s1.union(&s2);
        let bad: Vec<Vec<Zone>> = (0..self.sys.mode_count())
            .map(|q| all.restrict_to_mode(q).subtract(&safe.restrict_to_mode(q)).zones(q).to_vec())
            .collect();
        let mut reached = s2.empty_like();
        let mut targets = s2;
        loop {
            let found = self.time_pre(&targets, &bad, &safe);
            let mut delta = found.empty_like();
            for (q, z) in found.iter() {
                if reached.insert(q, z.clone()) {
                    delta.insert(q, z.clone());
                }
            }
            if delta.is_empty() {
                return Ok(reached);
            }
            self.tick(&reached)?;
            let mut pre = delta.empty_like();
            for e in 0..self.sys.automaton().transitions.len() {
                if !delta.zones(self.sys.transition(e).target).is_empty() {
                    pre.union_with(&self.sys.xtion_bck(&delta, e));
                }
            }
            targets = pre.intersect(&s1);
        }
    }

    /// States from which time can pass into `targets` while avoiding `bad`
    /// strictly before arrival.
    fn time_pre(&self, targets: &StateSet, bad: &[Vec<Zone>], safe: &StateSet) -> StateSet {
        let mut out = targets.empty_like();
        for (q, t) in targets.iter() {
            let inv = self.sys.invariant(q);
            let down = t.time_down().intersect(inv);
            if bad[q].is_empty() {
                out.insert(q, down);
                continue;
            }
            if let [g] = safe.zones(q) {
                out.insert(q, down.intersect(g));
                continue;
            }
            for piece in safe_past(t, &down, &bad[q]) {
                out.insert(q, piece);
            }
        }
        out
    }
}

/// `{ν ∈ down | ∃δ. ν + δ ∈ t ∧ ∀δ' < δ. ν + δ' ∉ ⋃ bad}` for a convex target.
fn safe_past(t: &Zone, down: &Zone, bad: &[Zone]) -> Vec<Zone> {
    let mut acc = vec![down.clone()];
    for b in bad {
        if !b.intersects(down) {
            continue;
        }
        let b_down = b.time_down();
        let mut allowed = down.subtract(&b_down);
        let hit = t.intersect(&b_down);
        for piece in hit.subtract(b) {
            allowed.push(piece.time_down());
        }
        let mut next = Vec::new();
        for a in &acc {
            for p in &allowed {
                let z = a.intersect(p);
                if !z.is_empty() {
                    next.push(z);
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}
