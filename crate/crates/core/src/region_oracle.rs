//! Explicit region-graph ground truth for small automata.
//!
//! Regions range over every clock of the automaton, its formula clocks, and
//! one extra "tick" clock appended last (the same layout the checker uses for
//! its cycle-time clock). Time divergence is detected through tick edges:
//! from any region where the tick clock is at least 1, a stuttering edge
//! resets it. A strongly connected set of regions containing a tick edge
//! therefore spends at least one time unit per lap.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::formula::Formula;
use crate::model::{Pred, StateSet, TimedAutomaton};
use crate::zone::{Bound, Ceiling, ClockIndex, Zone};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("region graph too large: {clocks} automaton clocks, {total} clocks in all, ceiling {ceiling}")]
    TooLarge { clocks: usize, total: usize, ceiling: i64 },
}

/// A mode together with a region of clock valuations.
///
/// `ints[k]` is the integer part of clock `k + 1`, with `ceiling + 1`
/// standing for "above the ceiling". `ranks[k]` orders fractional parts of
/// the clocks at or below the ceiling: 0 means a zero fraction, and equal
/// ranks mean equal fractions. Clocks above the ceiling have rank 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub mode: usize,
    pub ints: Vec<u8>,
    pub ranks: Vec<u8>,
}

impl Region {
    fn max_rank(&self) -> u8 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// A concrete valuation inside the region, scaled by the returned
    /// denominator. Entry 0 is the reference clock.
    pub fn representative(&self) -> (Vec<i64>, i64) {
        let denom = i64::from(self.max_rank()) + 1;
        let mut point = vec![0];
        point.extend(self.ints.iter().zip(&self.ranks).map(|(&i, &r)| i64::from(i) * denom + i64::from(r)));
        (point, denom)
    }
}

/// Regions with their successor relations.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    ceiling: Ceiling,
    tick_clock: ClockIndex,
    regions: Vec<Region>,
    index: HashMap<Region, usize>,
    time_succ: Vec<Option<usize>>,
    disc_succ: Vec<Vec<usize>>,
    tick_succ: Vec<Option<usize>>,
}

const MAX_MODEL_CLOCKS: usize = 3;
const MAX_TOTAL_CLOCKS: usize = 5;
const MAX_CEILING: i64 = 4;

impl RegionGraph {
    /// Builds the complete region graph of `ta` plus a trailing tick clock.
    pub fn build(ta: &TimedAutomaton, ceiling: Ceiling) -> Result<RegionGraph, RegionError> {
        let n = ta.clock_count() + 1;
        if ta.model_clocks > MAX_MODEL_CLOCKS || n > MAX_TOTAL_CLOCKS || ceiling.0 > MAX_CEILING {
            return Err(RegionError::TooLarge { clocks: ta.model_clocks, total: n, ceiling: ceiling.0 });
        }
        let c = ceiling.0 as u8;
        let mut regions = Vec::new();
        for (q, m) in ta.modes.iter().enumerate() {
            for shape in all_shapes(n, c) {
                let r = Region { mode: q, ints: shape.0, ranks: shape.1 };
                let inv = Pred::all(m.invariant.iter().map(|cc| Pred::Clock(*cc)));
                if holds(&inv, &r) {
                    regions.push(r);
                }
            }
        }
        let index: HashMap<Region, usize> = regions.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let lookup = |r: &Region| index.get(r).copied();
        let time_succ = regions.iter().map(|r| lookup(&time_successor(r, c))).collect();
        let disc_succ = regions
            .iter()
            .map(|r| {
                let mut out = Vec::new();
                for t in ta.transitions.iter().filter(|t| t.source == r.mode) {
                    if !t.guard.iter().all(|g| holds(&Pred::Clock(*g), r)) {
                        continue;
                    }
                    let mut next = r.clone();
                    next.mode = t.target;
                    for &x in &t.resets {
                        next = reset(&next, x);
                    }
                    if let Some(i) = lookup(&next) {
                        if !out.contains(&i) {
                            out.push(i);
                        }
                    }
                }
                out
            })
            .collect();
        let tick_clock = n;
        let tick_succ = regions
            .iter()
            .map(|r| if r.ints[n - 1] >= 1 { lookup(&reset(r, tick_clock)) } else { None })
            .collect();
        Ok(RegionGraph { ceiling, tick_clock, regions, index, time_succ, disc_succ, tick_succ })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn ceiling(&self) -> Ceiling {
        self.ceiling
    }

    pub fn tick_clock(&self) -> ClockIndex {
        self.tick_clock
    }

    pub fn time_successor(&self, r: usize) -> Option<usize> {
        self.time_succ[r]
    }

    pub fn discrete_successors(&self, r: usize) -> &[usize] {
        &self.disc_succ[r]
    }

    pub fn edge_count(&self) -> usize {
        self.time_succ.iter().flatten().count() + self.disc_succ.iter().map(Vec::len).sum::<usize>()
    }

    pub fn position(&self, r: &Region) -> Option<usize> {
        self.index.get(r).copied()
    }

    /// Regions whose state-predicate membership holds.
    pub fn sat(&self, p: &Pred) -> Vec<bool> {
        self.regions.iter().map(|r| holds(p, r)).collect()
    }

    /// Regions whose representative lies in `s`.
    pub fn from_state_set(&self, s: &StateSet) -> Vec<bool> {
        self.regions
            .iter()
            .map(|r| {
                let (p, d) = r.representative();
                s.contains_scaled(r.mode, &p, d)
            })
            .collect()
    }

    /// Regions that can reach `s2` through `s1`, via time and discrete steps.
    pub fn eu(&self, s1: &[bool], s2: &[bool]) -> Vec<bool> {
        let mut res = s2.to_vec();
        let mut changed = true;
        while changed {
            changed = false;
            for r in 0..self.regions.len() {
                if res[r] || !s1[r] {
                    continue;
                }
                let via_time = self.time_succ[r].is_some_and(|t| res[t]);
                if via_time || self.disc_succ[r].iter().any(|&t| res[t]) {
                    res[r] = true;
                    changed = true;
                }
            }
        }
        res
    }

    /// Strongly connected components of the subgraph induced by `within`,
    /// including tick edges. Trivial components without a self-loop are
    /// dropped.
    pub fn components(&self, within: &[bool]) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..self.regions.len()).map(|r| g.add_node(r)).collect();
        for r in 0..self.regions.len() {
            if !within[r] {
                continue;
            }
            for t in self.successors(r) {
                if within[t] {
                    g.add_edge(nodes[r], nodes[t], ());
                }
            }
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| c.into_iter().map(|n| g[n]).collect::<Vec<_>>())
            .filter(|c: &Vec<usize>| within[c[0]] && (c.len() > 1 || self.successors(c[0]).any(|t| t == c[0])))
            .collect()
    }

    fn successors(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.time_succ[r].into_iter().chain(self.disc_succ[r].iter().copied()).chain(self.tick_succ[r])
    }

    /// Components inside `s1` that spend time and touch `s2`.
    pub fn fair_components(&self, s1: &[bool], s2: &[bool]) -> Vec<Vec<usize>> {
        self.components(s1)
            .into_iter()
            .filter(|c| {
                let inside = |r: usize| c.contains(&r);
                c.iter().any(|&r| s2[r]) && c.iter().any(|&r| self.tick_succ[r].is_some_and(inside))
            })
            .collect()
    }

    /// Regions starting a divergent run through `s0` into `s1` that stays
    /// in `s1` and visits `s2` infinitely often.
    pub fn nzf(&self, s0: &[bool], s1: &[bool], s2: &[bool]) -> Vec<bool> {
        let mut good = vec![false; self.regions.len()];
        for c in self.fair_components(s1, s2) {
            for r in c {
                good[r] = true;
            }
        }
        self.eu(s0, &self.eu(s1, &good))
    }

    /// Region-level evaluation of a core formula. `non_zeno` restricts
    /// until-targets to divergent states.
    pub fn eval(&self, f: &Formula, non_zeno: bool) -> Vec<bool> {
        let all = vec![true; self.regions.len()];
        match f {
            Formula::Mode(q) => self.sat(&Pred::Mode(*q)),
            Formula::Clock(c) => self.sat(&Pred::Clock(*c)),
            Formula::Or(a, b) => zip(&self.eval(a, non_zeno), &self.eval(b, non_zeno), |x, y| x || y),
            Formula::Not(a) => self.eval(a, non_zeno).iter().map(|b| !b).collect(),
            Formula::Freeze(x, a) => {
                let inner = self.eval(a, non_zeno);
                self.regions.iter().map(|r| self.position(&reset(r, *x)).is_some_and(|i| inner[i])).collect()
            }
            Formula::ExistsUntil(a, b) => {
                let mut s2 = self.eval(b, non_zeno);
                if non_zeno {
                    s2 = zip(&s2, &self.nzf(&all, &all, &all), |x, y| x && y);
                }
                self.eu(&self.eval(a, non_zeno), &s2)
            }
            Formula::ExistsAlways(a) => {
                let w = self.eval(a, non_zeno);
                self.nzf(&w, &w, &all)
            }
            Formula::ExistsAlwaysEventually(a) => self.nzf(&all, &all, &self.eval(a, non_zeno)),
            Formula::ExistsEventuallyAlways(a) => self.nzf(&all, &self.eval(a, non_zeno), &all),
        }
    }

    /// Regions where the membership of `set` disagrees with `expected`.
    pub fn disagreements(&self, set: &StateSet, expected: &[bool]) -> Vec<&Region> {
        self.from_state_set(set)
            .iter()
            .zip(expected)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| &self.regions[i])
            .collect()
    }

    /// The zone of valuations in region `r` (dimension includes the tick
    /// clock).
    pub fn region_zone(&self, r: &Region) -> Zone {
        let n = r.ints.len();
        let c = self.ceiling.0 as u8;
        let bounded = |k: usize| r.ints[k] <= c;
        let mut cs = Vec::new();
        for k in 0..n {
            let x = k + 1;
            let v = i64::from(r.ints[k]);
            if !bounded(k) {
                cs.push((0, x, Bound::strict(-self.ceiling.0)));
            } else if r.ranks[k] == 0 {
                cs.push((x, 0, Bound::weak(v)));
                cs.push((0, x, Bound::weak(-v)));
            } else {
                cs.push((x, 0, Bound::strict(v + 1)));
                cs.push((0, x, Bound::strict(-v)));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a == b || !bounded(a) || !bounded(b) || r.ranks[a] == 0 || r.ranks[b] == 0 {
                    continue;
                }
                let d = i64::from(r.ints[a]) - i64::from(r.ints[b]);
                let (xa, xb) = (a + 1, b + 1);
                match r.ranks[a].cmp(&r.ranks[b]) {
                    std::cmp::Ordering::Equal => cs.push((xa, xb, Bound::weak(d))),
                    std::cmp::Ordering::Less => cs.push((xa, xb, Bound::strict(d))),
                    std::cmp::Ordering::Greater => cs.push((xa, xb, Bound::strict(d + 1))),
                }
            }
        }
        Zone::from_constraints(n + 1, &cs)
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn holds(p: &Pred, r: &Region) -> bool {
    let (point, denom) = r.representative();
    p.holds_scaled(r.mode, &point, denom)
}

/// Every well-formed `(ints, ranks)` pair for `n` clocks and ceiling `c`.
fn all_shapes(n: usize, c: u8) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut out = Vec::new();
    let mut ints = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&k| ints[k] < c).collect();
        let mut ranks = vec![0u8; n];
        enumerate_ranks(&free, 0, &mut ranks, &mut |ranks| {
            if dense(ranks) {
                out.push((ints.clone(), ranks.to_vec()));
            }
        });
        let mut k = 0;
        while k < n && ints[k] == c + 1 {
            ints[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        ints[k] += 1;
    }
    out
}

fn enumerate_ranks(free: &[usize], at: usize, ranks: &mut [u8], emit: &mut impl FnMut(&[u8])) {
    if at == free.len() {
        emit(ranks);
        return;
    }
    for v in 0..=free.len() as u8 {
        ranks[free[at]] = v;
        enumerate_ranks(free, at + 1, ranks, emit);
    }
    ranks[free[at]] = 0;
}

/// Non-zero ranks form `1..=k` without gaps.
fn dense(ranks: &[u8]) -> bool {
    let k = ranks.iter().copied().max().unwrap_or(0);
    (1..=k).all(|v| ranks.contains(&v))
}

/// Renumbers non-zero ranks to `1..=k`.
fn densify(ranks: &mut [u8]) {
    let mut used: Vec<u8> = ranks.iter().copied().filter(|&v| v > 0).collect();
    used.sort_unstable();
    used.dedup();
    for v in ranks.iter_mut() {
        if *v > 0 {
            *v = used.iter().position(|u| u == v).unwrap() as u8 + 1;
        }
    }
}

fn reset(r: &Region, x: ClockIndex) -> Region {
    let mut next = r.clone();
    next.ints[x - 1] = 0;
    next.ranks[x - 1] = 0;
    densify(&mut next.ranks);
    next
}

/// The region entered first when time elapses from `r`.
fn time_successor(r: &Region, c: u8) -> Region {
    let n = r.ints.len();
    let bounded: Vec<usize> = (0..n).filter(|&k| r.ints[k] <= c).collect();
    let mut next = r.clone();
    if bounded.is_empty() {
        return next;
    }
    if bounded.iter().any(|&k| r.ranks[k] == 0) {
        for &k in &bounded {
            if r.ranks[k] == 0 {
                if r.ints[k] == c {
                    next.ints[k] = c + 1;
                } else {
                    next.ranks[k] = 1;
                }
            } else {
                next.ranks[k] += 1;
            }
        }
    } else {
        let top = r.max_rank();
        for &k in &bounded {
            if r.ranks[k] == top {
                next.ints[k] += 1;
                next.ranks[k] = 0;
            }
        }
    }
    densify(&mut next.ranks);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn graph(src: &str, c: i64) -> RegionGraph {
        RegionGraph::build(&parse_model(src).unwrap(), Ceiling(c)).unwrap()
    }

    #[test]
    fn one_clock_region_count() {
        // One automaton clock plus the tick clock, ceiling 1: 11 regions in
        // the unit square (4 corners, 4 edges, the diagonal, 2 triangles)
        // and 7 with some clock above 1.
        let g = graph("clocks x; mode q; init q;", 1);
        assert_eq!(g.len(), 18);
    }

    #[test]
    fn no_transitions_means_only_time_edges() {
        let g = graph("clocks x; mode q; init q;", 2);
        assert!((0..g.len()).all(|r| g.discrete_successors(r).is_empty()));
        assert!(g.edge_count() > 0);
    }

    #[test]
    fn empty_invariant_mode_has_no_regions() {
        let g = graph("clocks x; mode q { inv: x < 0; } mode r; init r;", 1);
        assert!(g.regions().iter().all(|r| r.mode == 1));
    }

    #[test]
    fn time_successor_walks_the_line() {
        let c = 1;
        let mut r = Region { mode: 0, ints: vec![0], ranks: vec![0] };
        let mut seen = vec![r.clone()];
        for _ in 0..4 {
            r = time_successor(&r, c);
            seen.push(r.clone());
        }
        let ints: Vec<u8> = seen.iter().map(|r| r.ints[0]).collect();
        let ranks: Vec<u8> = seen.iter().map(|r| r.ranks[0]).collect();
        assert_eq!(ints, vec![0, 0, 1, 2, 2]);
        assert_eq!(ranks, vec![0, 1, 0, 0, 0]);
    }

    #[test]
    fn bounded_invariant_has_no_divergence() {
        let g = graph("clocks x; mode q { inv: x <= 2; } init q;", 2);
        let all = vec![true; g.len()];
        assert!(g.nzf(&all, &all, &all).iter().all(|b| !b));
        let g = graph("clocks x; mode q; init q;", 2);
        let all = vec![true; g.len()];
        assert!(g.nzf(&all, &all, &all).iter().all(|&b| b));
    }

    #[test]
    fn region_zone_contains_its_representative() {
        let g = graph("clocks x y; mode q; init q;", 2);
        for r in g.regions() {
            let (p, d) = r.representative();
            assert!(g.region_zone(r).contains_scaled(&p, d), "{r:?}");
        }
    }

    #[test]
    fn size_guard() {
        let ta = parse_model("clocks a b c d; mode q; init q;").unwrap();
        assert!(RegionGraph::build(&ta, Ceiling(1)).is_err());
    }
}
