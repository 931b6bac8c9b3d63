//! Difference-bound matrices over `clocks ∪ {0}`.
//!
//! A [`Zone`] stores one [`Bound`] per ordered clock pair `(i, j)`, read as
//! `x_i - x_j ≺ c`. Index 0 is the constant-zero reference clock. Every
//! public constructor and operation returns a zone in canonical (closed)
//! form, and empty zones carry a dedicated flag so that all operations
//! accept them uniformly.

use std::cmp::Ordering;
use std::fmt;

/// Strictness of a difference bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundRel {
    Strict,
    Weak,
}

/// A bound `(≺, c)` packed into one integer: `2c + 1` for `≤ c`, `2c` for
/// `< c`, and `i64::MAX` for `< ∞`. The packing makes the integer order
/// coincide with the bound order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bound(i64);

impl Bound {
    pub const INFINITY: Bound = Bound(i64::MAX);
    pub const LE_ZERO: Bound = Bound(1);
    pub const LT_ZERO: Bound = Bound(0);

    pub fn weak(c: i64) -> Bound {
        Bound((c << 1) | 1)
    }

    pub fn strict(c: i64) -> Bound {
        Bound(c << 1)
    }

    pub fn new(rel: BoundRel, c: i64) -> Bound {
        match rel {
            BoundRel::Weak => Bound::weak(c),
            BoundRel::Strict => Bound::strict(c),
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == i64::MAX
    }

    /// The constant, or `None` for `∞`.
    pub fn value(self) -> Option<i64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0 >> 1)
        }
    }

    pub fn rel(self) -> BoundRel {
        if self.is_infinite() || self.0 & 1 == 0 {
            BoundRel::Strict
        } else {
            BoundRel::Weak
        }
    }

    pub fn is_weak(self) -> bool {
        self.rel() == BoundRel::Weak
    }

    /// The bound of the negated constraint, read on the transposed pair:
    /// `¬(x_i - x_j ≤ c)` is `x_j - x_i < -c`, `¬(x_i - x_j < c)` is
    /// `x_j - x_i ≤ -c`. Undefined for `∞`.
    pub fn negated(self) -> Bound {
        debug_assert!(!self.is_infinite());
        let c = self.0 >> 1;
        if self.is_weak() {
            Bound::strict(-c)
        } else {
            Bound::weak(-c)
        }
    }

    /// Whether a difference `num / denom` satisfies this bound.
    pub fn admits_scaled(self, num: i64, denom: i64) -> bool {
        match self.value() {
            None => true,
            Some(c) => {
                let rhs = c * denom;
                if self.is_weak() {
                    num <= rhs
                } else {
                    num < rhs
                }
            }
        }
    }
}

/// `(r1,d1) + (r2,d2) = (weak iff both weak, d1 + d2)`, `∞` absorbing.
impl std::ops::Add for Bound {
    type Output = Bound;

    #[inline]
    fn add(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            Bound::INFINITY
        } else {
            Bound((((self.0 >> 1) + (other.0 >> 1)) << 1) | (self.0 & other.0 & 1))
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "<∞"),
            Some(c) if self.is_weak() => write!(f, "<={c}"),
            Some(c) => write!(f, "<{c}"),
        }
    }
}

/// Index into `clocks ∪ {0}`; index 0 is the reference clock.
pub type ClockIndex = usize;

/// Largest timing constant relevant to a check; bounds the normalized
/// zone space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ceiling(pub i64);

/// Comparison operators admitted in atomic clock constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Canonical difference-bound matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Zone {
    dim: usize,
    m: Vec<Bound>,
    empty: bool,
}

impl Zone {
    /// All non-negative valuations.
    pub fn universal(dim: usize) -> Zone {
        assert!(dim >= 1, "a zone needs at least the reference clock");
        let mut m = vec![Bound::INFINITY; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
            m[i] = Bound::LE_ZERO; // row 0: 0 - x_i <= 0
        }
        Zone { dim, m, empty: false }
    }

    /// The single valuation with every clock at 0.
    pub fn zero(dim: usize) -> Zone {
        Zone {
            dim,
            m: vec![Bound::LE_ZERO; dim * dim],
            empty: false,
        }
    }

    pub fn empty(dim: usize) -> Zone {
        Zone {
            dim,
            m: vec![Bound::LT_ZERO; dim * dim],
            empty: true,
        }
    }

    /// Builds a zone from an arbitrary bound matrix (row-major) and closes it.
    pub fn from_matrix(dim: usize, m: Vec<Bound>) -> Zone {
        assert_eq!(m.len(), dim * dim, "matrix size must be dim²");
        let mut z = Zone { dim, m, empty: false };
        z.close();
        z
    }

    /// Universal zone restricted by a list of `x_i - x_j ≺ c` constraints.
    pub fn from_constraints(dim: usize, constraints: &[(ClockIndex, ClockIndex, Bound)]) -> Zone {
        let mut z = Zone::universal(dim);
        for &(i, j, b) in constraints {
            z.constrain(i, j, b);
        }
        z
    }

    /// Zone of the atomic constraint `x ∼ c` (`x` may be the reference clock).
    pub fn atom(dim: usize, x: ClockIndex, op: CmpOp, c: i64) -> Zone {
        let mut z = Zone::universal(dim);
        z.constrain_atom(x, op, c);
        z
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    #[inline]
    pub fn get(&self, i: ClockIndex, j: ClockIndex) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: ClockIndex, j: ClockIndex, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    fn mark_empty(&mut self) {
        self.empty = true;
        self.m.iter_mut().for_each(|b| *b = Bound::LT_ZERO);
    }

    /// Floyd–Warshall closure; marks the zone empty on a negative cycle.
    fn close(&mut self) {
        if self.empty {
            return;
        }
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.m[i * n + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let cand = ik + self.m[k * n + j];
                    if cand < self.m[i * n + j] {
                        self.m[i * n + j] = cand;
                    }
                }
            }
            if self.m[k * n + k] < Bound::LE_ZERO {
                self.mark_empty();
                return;
            }
        }
        if (0..n).any(|i| self.m[i * n + i] < Bound::LE_ZERO) {
            self.mark_empty();
        }
    }

    /// Returns the tightest equivalent zone. Idempotent.
    pub fn canonicalize(&self) -> Zone {
        let mut z = self.clone();
        z.close();
        z
    }

    /// Adds `x_i - x_j ≺ c` and restores canonical form in `O(dim²)`.
    /// Returns `false` when the zone became empty.
    pub fn constrain(&mut self, i: ClockIndex, j: ClockIndex, b: Bound) -> bool {
        if self.empty {
            return false;
        }
        if b >= self.get(i, j) {
            return true;
        }
        if self.get(j, i) + b < Bound::LE_ZERO {
            self.mark_empty();
            return false;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.m[k * n + i];
            if ki.is_infinite() {
                continue;
            }
            let kij = ki + b;
            for l in 0..n {
                let cand = kij + self.m[j * n + l];
                if cand < self.m[k * n + l] {
                    self.m[k * n + l] = cand;
                }
            }
        }
        true
    }

    pub fn constrain_atom(&mut self, x: ClockIndex, op: CmpOp, c: i64) -> bool {
        match op {
            CmpOp::Lt => self.constrain(x, 0, Bound::strict(c)),
            CmpOp::Le => self.constrain(x, 0, Bound::weak(c)),
            CmpOp::Eq => self.constrain(x, 0, Bound::weak(c)) && self.constrain(0, x, Bound::weak(-c)),
            CmpOp::Ge => self.constrain(0, x, Bound::weak(-c)),
            CmpOp::Gt => self.constrain(0, x, Bound::strict(-c)),
        }
    }

    pub fn intersect(&self, other: &Zone) -> Zone {
        debug_assert_eq!(self.dim, other.dim);
        if self.empty || other.empty {
            return Zone::empty(self.dim);
        }
        let mut z = self.clone();
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                if i != j && !z.constrain(i, j, other.get(i, j)) {
                    return z;
                }
            }
        }
        z
    }

    /// `true` iff every valuation of `other` lies in `self`.
    pub fn includes(&self, other: &Zone) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| b <= a)
    }

    /// Whether the two zones share a valuation.
    pub fn intersects(&self, other: &Zone) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Past closure `{ν | ∃δ ≥ 0. ν + δ ∈ z}`.
    pub fn time_down(&self) -> Zone {
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        let n = self.dim;
        for i in 1..n {
            let mut b = Bound::LE_ZERO;
            for j in 1..n {
                let ji = z.get(j, i);
                if ji < b {
                    b = ji;
                }
            }
            z.set(0, i, b);
        }
        z
    }

    /// Future closure `{ν + δ | ν ∈ z, δ ≥ 0}`.
    pub fn time_up(&self) -> Zone {
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        for i in 1..self.dim {
            z.set(i, 0, Bound::INFINITY);
        }
        z
    }

    /// Existentially eliminates clock `x` (keeping `x ≥ 0`).
    pub fn free(&self, x: ClockIndex) -> Zone {
        assert!(x != 0, "the reference clock cannot be freed");
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        for j in 0..self.dim {
            if j != x {
                z.set(x, j, Bound::INFINITY);
                let j0 = z.get(j, 0);
                z.set(j, x, j0);
            }
        }
        z
    }

    /// Forward reset of `x` to 0.
    pub fn reset(&self, x: ClockIndex) -> Zone {
        assert!(x != 0, "the reference clock cannot be reset");
        if self.empty {
            return self.clone();
        }
        let mut z = self.clone();
        for j in 0..self.dim {
            if j != x {
                let zj = z.get(0, j);
                z.set(x, j, zj);
                let j0 = z.get(j, 0);
                z.set(j, x, j0);
            }
        }
        z
    }

    /// Weakest precondition of resetting `clocks`: `{ν | ν[R := 0] ∈ z}`.
    pub fn reset_pre(&self, clocks: &[ClockIndex]) -> Zone {
        let mut z = self.clone();
        for &x in clocks {
            assert!(x != 0, "the reference clock cannot be reset");
            if !z.constrain_atom(x, CmpOp::Eq, 0) {
                return z;
            }
        }
        for &x in clocks {
            z = z.free(x);
        }
        z
    }

    /// Finite non-diagonal entries in row-major order.
    fn finite_entries(&self) -> impl Iterator<Item = (usize, usize, Bound)> + '_ {
        let n = self.dim;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter_map(move |(i, j)| {
            let b = self.get(i, j);
            (i != j && !b.is_infinite()).then_some((i, j, b))
        })
    }

    /// Pairwise-disjoint zones covering `self \ other`.
    ///
    /// Constraints of `other` are visited in row-major order; those already
    /// implied by the pieces' common prefix are skipped, so each piece
    /// satisfies the earlier effective constraints and violates exactly one.
    pub fn subtract(&self, other: &Zone) -> Vec<Zone> {
        if self.empty {
            return Vec::new();
        }
        if other.empty {
            return vec![self.clone()];
        }
        let mut prefix = self.clone();
        let mut pieces = Vec::new();
        for (i, j, b) in other.finite_entries() {
            if prefix.get(i, j) <= b {
                continue;
            }
            let mut piece = prefix.clone();
            if piece.constrain(j, i, b.negated()) {
                pieces.push(piece);
            }
            if !prefix.constrain(i, j, b) {
                break;
            }
        }
        pieces
    }

    /// Disjoint zones whose union is the set of valuations outside `self`.
    pub fn complement(&self) -> Vec<Zone> {
        Zone::universal(self.dim).subtract(self)
    }

    /// Uniform-ceiling extrapolation, iterated with closure to a fixpoint.
    pub fn normalize(&self, c: Ceiling) -> Zone {
        if self.empty {
            return self.clone();
        }
        let ceil = c.0;
        let mut cur = self.clone();
        loop {
            let mut next = cur.clone();
            let n = self.dim;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let b = next.get(i, j);
                    if let Some(v) = b.value() {
                        if v > ceil {
                            next.set(i, j, Bound::INFINITY);
                        } else if v < -ceil {
                            next.set(i, j, Bound::strict(-ceil));
                        }
                    }
                }
            }
            if next == cur {
                return cur;
            }
            next.close();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Every clock is unbounded from above.
    pub fn has_no_upper_bounds(&self) -> bool {
        !self.empty && (1..self.dim).all(|i| self.get(i, 0).is_infinite())
    }

    /// Membership of the valuation `point[i] / denom` (`point[0]` must be 0).
    pub fn contains_scaled(&self, point: &[i64], denom: i64) -> bool {
        if self.empty {
            return false;
        }
        debug_assert_eq!(point.len(), self.dim);
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.get(i, j).admits_scaled(point[i] - point[j], denom) {
                    return false;
                }
            }
        }
        true
    }

    /// Renders the zone with the given clock names (index 0 is omitted).
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ZoneDisplay { zone: self, names }
    }
}

impl PartialOrd for Zone {
    /// Set inclusion.
    fn partial_cmp(&self, other: &Zone) -> Option<Ordering> {
        match (self.includes(other), other.includes(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }
}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        let shown = ZoneDisplay { zone: self, names: &names }.to_string();
        write!(f, "Zone({shown})")
    }
}

struct ZoneDisplay<'a> {
    zone: &'a Zone,
    names: &'a [String],
}

impl fmt::Display for ZoneDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.zone;
        if z.empty {
            return write!(f, "false");
        }
        let name = |i: usize| self.names.get(i).map(String::as_str).unwrap_or("?");
        let mut parts = Vec::new();
        for (i, j, b) in z.finite_entries() {
            let c = b.value().unwrap();
            let op = if b.is_weak() { "<=" } else { "<" };
            match (i, j) {
                // trivial non-negativity
                (0, _) if b == Bound::LE_ZERO => {}
                (0, j) => parts.push(format!("{} {} {}", name(j), if b.is_weak() { ">=" } else { ">" }, -c)),
                (i, 0) => parts.push(format!("{} {op} {c}", name(i))),
                (i, j) => parts.push(format!("{} - {} {op} {c}", name(i), name(j))),
            }
        }
        if parts.is_empty() {
            write!(f, "true")
        } else {
            write!(f, "{}", parts.join(" and "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: usize = 1;
    const Y: usize = 2;

    fn zone(cs: &[(usize, usize, Bound)]) -> Zone {
        Zone::from_constraints(3, cs)
    }

    #[test]
    fn bound_order_and_addition() {
        assert!(Bound::strict(3) < Bound::weak(3));
        assert!(Bound::weak(2) < Bound::strict(3));
        assert!(Bound::weak(100) < Bound::INFINITY);
        assert_eq!(Bound::weak(2) + Bound::weak(3), Bound::weak(5));
        assert_eq!(Bound::weak(2) + Bound::strict(3), Bound::strict(5));
        assert_eq!(Bound::weak(-2) + Bound::weak(-3), Bound::weak(-5));
        assert_eq!(Bound::INFINITY + Bound::weak(-3), Bound::INFINITY);
        assert_eq!(Bound::weak(-4).value(), Some(-4));
        assert_eq!(Bound::strict(-4).rel(), BoundRel::Strict);
        assert_eq!(Bound::INFINITY.rel(), BoundRel::Strict);
    }

    #[test]
    fn canonicalize_examples() {
        let z = zone(&[(X, 0, Bound::weak(5))]);
        assert_eq!(z.canonicalize(), z);

        let mut m = vec![Bound::INFINITY; 9];
        for i in 0..3 {
            m[i * 3 + i] = Bound::LE_ZERO;
        }
        m[X * 3 + Y] = Bound::weak(1);
        m[Y * 3] = Bound::weak(2);
        let z = Zone::from_matrix(3, m);
        assert_eq!(z.get(X, 0), Bound::weak(3));

        let z = zone(&[(X, 0, Bound::strict(1)), (0, X, Bound::weak(-1))]);
        assert!(z.is_empty());
    }

    #[test]
    fn intersect_examples() {
        let z = zone(&[(X, 0, Bound::weak(4)), (X, Y, Bound::strict(1))]);
        assert_eq!(z.intersect(&Zone::universal(3)), z);
        let a = Zone::atom(3, X, CmpOp::Le, 2);
        let b = Zone::atom(3, X, CmpOp::Ge, 3);
        assert!(a.intersect(&b).is_empty());
    }

    #[test]
    fn includes_examples() {
        let z = Zone::atom(3, X, CmpOp::Le, 5);
        assert!(z.includes(&z));
        assert!(z.includes(&Zone::atom(3, X, CmpOp::Le, 2)));
        assert!(!Zone::atom(3, X, CmpOp::Le, 2).includes(&z));
        assert!(Zone::empty(3).includes(&Zone::empty(3)));
        assert!(z.includes(&Zone::empty(3)));
    }

    #[test]
    fn time_down_examples() {
        let z = Zone::atom(3, X, CmpOp::Eq, 3);
        let d = z.time_down();
        assert_eq!(d, Zone::atom(3, X, CmpOp::Le, 3));
        assert_eq!(Zone::universal(3).time_down(), Zone::universal(3));
        let z = zone(&[(X, Y, Bound::weak(1)), (Y, X, Bound::weak(0)), (X, 0, Bound::weak(4))]);
        let d = z.time_down();
        assert_eq!(d.get(X, Y), Bound::weak(1));
        assert_eq!(d.get(Y, X), Bound::weak(0));
        assert_eq!(d.get(0, X), Bound::LE_ZERO);
    }

    #[test]
    fn time_up_examples() {
        let z = Zone::atom(3, X, CmpOp::Eq, 0).intersect(&Zone::atom(3, Y, CmpOp::Eq, 0));
        let u = z.time_up();
        assert_eq!(u.get(X, 0), Bound::INFINITY);
        assert_eq!(u.get(X, Y), Bound::LE_ZERO);
        assert!(Zone::empty(3).time_up().is_empty());
        let z = zone(&[(X, Y, Bound::weak(1)), (Y, X, Bound::weak(-1)), (X, 0, Bound::weak(2))]);
        let u = z.time_up();
        assert_eq!(u.get(X, Y), Bound::weak(1));
        assert_eq!(u.get(Y, X), Bound::weak(-1));
        assert_eq!(u.get(0, X), z.get(0, X));
        assert!(u.get(X, 0).is_infinite());
    }

    #[test]
    fn free_examples() {
        let z = Zone::atom(3, X, CmpOp::Eq, 3).intersect(&zone(&[(Y, X, Bound::weak(1))]));
        assert_eq!(z.free(X), Zone::atom(3, Y, CmpOp::Le, 4));
        assert!(Zone::empty(3).free(X).is_empty());
        assert_eq!(Zone::universal(3).free(X), Zone::universal(3));
    }

    #[test]
    #[should_panic]
    fn free_rejects_reference_clock() {
        Zone::universal(3).free(0);
    }

    #[test]
    fn reset_pre_examples() {
        assert_eq!(Zone::atom(3, X, CmpOp::Eq, 0).reset_pre(&[X]), Zone::universal(3));
        assert!(Zone::atom(3, X, CmpOp::Ge, 1).reset_pre(&[X]).is_empty());
        let z = Zone::atom(3, X, CmpOp::Eq, 0).intersect(&Zone::atom(3, Y, CmpOp::Ge, 2));
        assert_eq!(z.reset_pre(&[X]), Zone::atom(3, Y, CmpOp::Ge, 2));
    }

    #[test]
    fn complement_examples() {
        assert!(Zone::universal(3).complement().is_empty());
        let c = Zone::atom(3, X, CmpOp::Le, 2).complement();
        assert_eq!(c, vec![Zone::atom(3, X, CmpOp::Gt, 2)]);
        assert_eq!(Zone::empty(3).complement(), vec![Zone::universal(3)]);
    }

    #[test]
    fn normalize_examples() {
        let c = Ceiling(5);
        let z = Zone::atom(3, X, CmpOp::Le, 7).normalize(c);
        assert!(z.get(X, 0).is_infinite());
        let z = Zone::atom(3, X, CmpOp::Ge, 7).normalize(c);
        assert_eq!(z.get(0, X), Bound::strict(-5));
        assert_eq!(z.normalize(c), z);
    }

    #[test]
    fn upper_bound_detection() {
        assert!(Zone::universal(3).has_no_upper_bounds());
        assert!(!Zone::atom(3, X, CmpOp::Le, 5).has_no_upper_bounds());
        assert!(zone(&[(X, Y, Bound::weak(2))]).has_no_upper_bounds());
    }

    #[test]
    fn scaled_membership() {
        let z = zone(&[(X, 0, Bound::strict(2)), (X, Y, Bound::weak(1))]);
        assert!(z.contains_scaled(&[0, 3, 2], 2)); // x = 1.5, y = 1
        assert!(!z.contains_scaled(&[0, 4, 0], 2)); // x = 2
        assert!(!z.contains_scaled(&[0, 3, 0], 2)); // x - y = 1.5
    }
}
