use std::fmt;

use crate::zone::{Ceiling, Zone};

/// A finite union of `(mode, zone)` pairs.
///
/// Zones are canonical, non-empty and ceiling-normalized. Within a mode no
/// listed zone is included in another listed zone; beyond that the list is
/// not minimized, so semantic comparisons go through subtraction.
#[derive(Clone, PartialEq, Eq)]
pub struct StateSet {
    dim: usize,
    ceiling: Ceiling,
    zones: Vec<Vec<Zone>>,
}

impl StateSet {
    pub fn empty(modes: usize, dim: usize, ceiling: Ceiling) -> StateSet {
        StateSet { dim, ceiling, zones: vec![Vec::new(); modes] }
    }

    /// Empty set with the same shape as `self`.
    pub fn empty_like(&self) -> StateSet {
        StateSet::empty(self.zones.len(), self.dim, self.ceiling)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ceiling(&self) -> Ceiling {
        self.ceiling
    }

    pub fn mode_count(&self) -> usize {
        self.zones.len()
    }

    pub fn zones(&self, mode: usize) -> &[Zone] {
        &self.zones[mode]
    }

    /// `(mode, zone)` pairs in mode order, then list order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Zone)> {
        self.zones.iter().enumerate().flat_map(|(q, zs)| zs.iter().map(move |z| (q, z)))
    }

    pub fn zone_count(&self) -> usize {
        self.zones.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.iter().all(Vec::is_empty)
    }

    /// Adds a zone after normalizing it. Returns `false` when the zone is
    /// empty or already covered by a single listed zone.
    pub fn insert(&mut self, mode: usize, zone: Zone) -> bool {
        if zone.is_empty() {
            return false;
        }
        let zone = zone.normalize(self.ceiling);
        let list = &mut self.zones[mode];
        if list.iter().any(|z| z.includes(&zone)) {
            return false;
        }
        list.retain(|z| !zone.includes(z));
        list.push(zone);
        true
    }

    pub fn singleton(modes: usize, dim: usize, ceiling: Ceiling, mode: usize, zone: Zone) -> StateSet {
        let mut s = StateSet::empty(modes, dim, ceiling);
        s.insert(mode, zone);
        s
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (q, z) in other.iter() {
            self.insert(q, z.clone());
        }
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        let mut out = self.empty_like();
        for (q, (a, b)) in self.zones.iter().zip(&other.zones).enumerate() {
            for za in a {
                for zb in b {
                    out.insert(q, za.intersect(zb));
                }
            }
        }
        out
    }

    /// Intersects every listed zone with `zone`, in every mode.
    pub fn intersect_zone(&self, zone: &Zone) -> StateSet {
        let mut out = self.empty_like();
        for (q, z) in self.iter() {
            out.insert(q, z.intersect(zone));
        }
        out
    }

    /// `self \ other`.
    pub fn subtract(&self, other: &StateSet) -> StateSet {
        let mut out = self.empty_like();
        for q in 0..self.zones.len() {
            for piece in subtract_list(&self.zones[q], &other.zones[q]) {
                out.insert(q, piece);
            }
        }
        out
    }

    /// `self ⊇ other` as sets of states.
    pub fn includes(&self, other: &StateSet) -> bool {
        (0..self.zones.len()).all(|q| {
            other.zones[q]
                .iter()
                .all(|z| self.zones[q].iter().any(|y| y.includes(z)) || subtract_list(std::slice::from_ref(z), &self.zones[q]).is_empty())
        })
    }

    /// Semantic equality (mutual inclusion).
    pub fn equals(&self, other: &StateSet) -> bool {
        self.includes(other) && other.includes(self)
    }

    /// Restriction to a single mode.
    pub fn restrict_to_mode(&self, mode: usize) -> StateSet {
        let mut out = self.empty_like();
        out.zones[mode] = self.zones[mode].clone();
        out
    }

    /// Applies `f` to every zone, keeping the mode.
    pub fn map_zones(&self, mut f: impl FnMut(&Zone) -> Zone) -> StateSet {
        let mut out = self.empty_like();
        for (q, z) in self.iter() {
            out.insert(q, f(z));
        }
        out
    }

    /// Membership of the concrete state `(mode, point / denom)`.
    pub fn contains_scaled(&self, mode: usize, point: &[i64], denom: i64) -> bool {
        self.zones[mode].iter().any(|z| z.contains_scaled(point, denom))
    }

    /// Renders the set with mode and clock names.
    pub fn display_with<'a>(&'a self, modes: &'a [String], clocks: &'a [String]) -> impl fmt::Display + 'a {
        SetDisplay { set: self, modes, clocks }
    }
}

/// Pieces of `zones \ ⋃ minus`.
fn subtract_list(zones: &[Zone], minus: &[Zone]) -> Vec<Zone> {
    let mut pieces: Vec<Zone> = zones.to_vec();
    for m in minus {
        if pieces.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(pieces.len());
        for p in &pieces {
            if !p.intersects(m) {
                next.push(p.clone());
            } else {
                next.extend(p.subtract(m));
            }
        }
        pieces = next;
    }
    pieces
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for (q, zs) in self.zones.iter().enumerate() {
            if !zs.is_empty() {
                d.entry(&q, zs);
            }
        }
        d.finish()
    }
}

struct SetDisplay<'a> {
    set: &'a StateSet,
    modes: &'a [String],
    clocks: &'a [String],
}

impl fmt::Display for SetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.set.is_empty() {
            return writeln!(f, "false");
        }
        let mut names = vec!["0".to_string()];
        names.extend(self.clocks.iter().cloned());
        while names.len() < self.set.dim {
            names.push(format!("aux{}", names.len()));
        }
        for (q, z) in self.set.iter() {
            writeln!(f, "{}: {}", self.modes[q], z.display_with(&names))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zone::CmpOp;

    const C: Ceiling = Ceiling(5);

    fn atom(op: CmpOp, c: i64) -> Zone {
        Zone::atom(2, 1, op, c)
    }

    #[test]
    fn insert_drops_redundant_zones() {
        let mut s = StateSet::empty(1, 2, C);
        assert!(s.insert(0, atom(CmpOp::Le, 2)));
        assert!(!s.insert(0, atom(CmpOp::Le, 1)));
        assert!(s.insert(0, atom(CmpOp::Le, 3)));
        assert_eq!(s.zone_count(), 1);
        assert!(!s.insert(0, Zone::empty(2)));
    }

    #[test]
    fn union_with_empty_is_identity() {
        let s = StateSet::singleton(2, 2, C, 1, atom(CmpOp::Ge, 1));
        assert_eq!(s.union(&s.empty_like()), s);
    }

    #[test]
    fn semantic_equality_ignores_fragmentation() {
        let mut a = StateSet::empty(1, 2, C);
        a.insert(0, atom(CmpOp::Le, 2));
        a.insert(0, atom(CmpOp::Gt, 2));
        let b = StateSet::singleton(1, 2, C, 0, Zone::universal(2));
        assert!(a.equals(&b));
        assert_ne!(a, b);
        assert!(b.subtract(&a).is_empty());
        assert!(!a.equals(&a.empty_like()));
    }
}
