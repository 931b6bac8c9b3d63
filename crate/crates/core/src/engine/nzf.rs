use super::{Checker, EngineError};
use crate::model::StateSet;
use crate::zone::CmpOp;

impl Checker {
    /// `z ≥ threshold ∧ s`
    fn lap_done(&self, s: &StateSet) -> StateSet {
        s.intersect_zone(&self.sys.atom_zone(self.z, CmpOp::Ge, self.cfg.cycle_threshold))
    }

    /// `∃z. z = 0 ∧ s`
    fn lap_start(&self, s: &StateSet) -> StateSet {
        let z = self.z;
        s.intersect_zone(&self.sys.atom_zone(z, CmpOp::Eq, 0)).map_zones(|zone| zone.free(z))
    }

    /// Largest `G ⊆ start` whose states reach `G` again through `s1` after at
    /// least one lap of time: `G = start ∩ ∃z.(z = 0 ∧ rch_bck(s1, z ≥ 1 ∧ G))`.
    fn cycle_core(&mut self, s1: &StateSet, start: StateSet) -> Result<StateSet, EngineError> {
        let mut g = start;
        loop {
            if g.is_empty() {
                return Ok(g);
            }
            let target = self.lap_done(&g);
            let back = self.rch_bck(s1, &target)?;
            let next = g.intersect(&self.lap_start(&back));
            self.tick(&next)?;
            if next.equals(&g) {
                return Ok(g);
            }
            g = next;
        }
    }

    /// Exact fair-cycle states: runs through `s0` into `s1`, staying in `s1`
    /// forever and visiting `s2` infinitely often with divergent time.
    pub fn nzf_exact(&mut self, s0: &StateSet, s1: &StateSet, s2: &StateSet) -> Result<StateSet, EngineError> {
        let all = self.sys.all_states();
        let s1 = s1.intersect(&all);
        let fair = s1.intersect(s2);
        let g = self.cycle_core(&s1, fair)?;
        let inner = self.rch_bck(&s1, &g)?;
        self.rch_bck(s0, &inner)
    }

    /// Zones of `s1 ∧ s2` with no upper bound on any clock that are closed
    /// under time passage.
    pub fn zones_without_upper_bounds(&self, s1: &StateSet, s2: &StateSet) -> StateSet {
        let inter = s1.intersect(s2).intersect(&self.sys.all_states());
        let mut out = inter.empty_like();
        for (q, zone) in inter.iter() {
            if zone.has_no_upper_bounds() && zone.includes(&zone.time_up()) {
                out.insert(q, zone.clone());
            }
        }
        out
    }

    /// Searches the zones of `s1 ∧ s2` in mode order, then list order, for one
    /// that contains a fair cycle inside `s1`. Returns the certified part of
    /// the first such zone, or `None` when every zone has been ruled out.
    pub fn find_cycle_zone(&mut self, s1: &StateSet, s2: &StateSet) -> Result<Option<StateSet>, EngineError> {
        let mut local = s1.intersect(&self.sys.all_states());
        loop {
            let candidates = local.intersect(s2);
            let Some((q, zone)) = candidates.iter().next() else {
                return Ok(None);
            };
            let start = self.sys.singleton(q, zone.clone());
            let core = self.cycle_core(&local, start.clone())?;
            if !core.is_empty() {
                return Ok(Some(core));
            }
            local = local.subtract(&start);
        }
    }

    /// Successive under-approximation: seeds from unbounded fair zones, then
    /// up to `level` rounds of zone search, each removing the found zone.
    pub fn nzf_under(&mut self, s0: &StateSet, s1: &StateSet, s2: &StateSet, level: usize) -> Result<StateSet, EngineError> {
        let mut eta1 = s1.intersect(&self.sys.all_states());
        let seeds = self.zones_without_upper_bounds(&eta1, s2);
        let inner = self.rch_bck(&eta1, &seeds)?;
        let mut eta = self.rch_bck(s0, &inner)?;
        eta1 = eta1.subtract(&eta);
        let mut used = 0;
        while used < level {
            let Some(zeta) = self.find_cycle_zone(&eta1, s2)? else { break };
            used += 1;
            let inner = self.rch_bck(&eta1, &zeta)?;
            eta.union_with(&self.rch_bck(s0, &inner)?);
            eta1 = eta1.subtract(&zeta);
        }
        self.stats.level_used = self.stats.level_used.max(used);
        Ok(eta)
    }

    /// Like [`Checker::nzf_under`], but each round removes the whole backward
    /// closure of the found zone from the search space.
    pub fn nzf_under_big_chunks(
        &mut self,
        s0: &StateSet,
        s1: &StateSet,
        s2: &StateSet,
        level: usize,
    ) -> Result<StateSet, EngineError> {
        let mut eta1 = s1.intersect(&self.sys.all_states());
        let seeds = self.zones_without_upper_bounds(&eta1, s2);
        let chunk = self.rch_bck(&eta1, &seeds)?;
        eta1 = eta1.subtract(&chunk);
        let mut eta = self.rch_bck(s0, &chunk)?;
        let mut used = 0;
        while used < level {
            let Some(found) = self.find_cycle_zone(&eta1, s2)? else { break };
            used += 1;
            let chunk = self.rch_bck(&eta1, &found)?;
            eta1 = eta1.subtract(&chunk);
            eta.union_with(&self.rch_bck(s0, &chunk)?);
        }
        self.stats.level_used = self.stats.level_used.max(used);
        Ok(eta)
    }
}
