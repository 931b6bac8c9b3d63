use nzfcheck::{Bound, Ceiling, Zone};
use proptest::prelude::*;

const DIM: usize = 3;
const DENOM: i64 = 3;
const HI: i64 = 2 * 5;

fn bound() -> impl Strategy<Value = Bound> {
    (-4i64..=4, any::<bool>()).prop_map(|(c, weak)| if weak { Bound::weak(c) } else { Bound::strict(c) })
}

fn zone() -> impl Strategy<Value = Zone> {
    prop::collection::vec((0..DIM, 0..DIM, bound()), 0..5).prop_map(|cs| {
        let cs: Vec<_> = cs.into_iter().filter(|(i, j, _)| i != j).collect();
        Zone::from_constraints(DIM, &cs)
    })
}

fn points() -> impl Iterator<Item = [i64; DIM]> {
    (0..=HI * DENOM).flat_map(|x| (0..=HI * DENOM).map(move |y| [0, x, y]))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(300) })]

    #[test]
    fn intersection_is_pointwise(a in zone(), b in zone()) {
        let c = a.intersect(&b);
        for p in points() {
            prop_assert_eq!(c.contains_scaled(&p, DENOM), a.contains_scaled(&p, DENOM) && b.contains_scaled(&p, DENOM));
        }
        prop_assert_eq!(c, b.intersect(&a));
    }

    #[test]
    fn difference_and_intersection_partition(a in zone(), b in zone()) {
        let diff = a.subtract(&b);
        let both = a.intersect(&b);
        for p in points() {
            let hits = diff.iter().filter(|z| z.contains_scaled(&p, DENOM)).count()
                + usize::from(both.contains_scaled(&p, DENOM));
            prop_assert_eq!(hits, usize::from(a.contains_scaled(&p, DENOM)));
        }
    }

    #[test]
    fn inclusion_is_a_preorder(a in zone(), b in zone()) {
        prop_assert!(a.includes(&a));
        prop_assert!(a.includes(&a.intersect(&b)));
        prop_assert_eq!(a.includes(&b) && b.includes(&a), a == b);
    }

    #[test]
    fn time_closures(a in zone()) {
        let up = a.time_up();
        let down = a.time_down();
        for p in points() {
            if a.contains_scaled(&p, DENOM) {
                let later = [0, p[1] + 1, p[2] + 1];
                prop_assert!(up.contains_scaled(&later, DENOM));
            }
            if down.contains_scaled(&p, DENOM) {
                // Delays are sampled at half the grid step to hit open intervals.
                let reach = (0..=2 * HI * DENOM).any(|d| a.contains_scaled(&[0, 2 * p[1] + d, 2 * p[2] + d], 2 * DENOM));
                prop_assert!(reach, "{:?} in the past closure has no future in the zone", p);
            }
        }
    }

    #[test]
    fn reset_then_precondition(a in zone()) {
        for x in 1..DIM {
            let img = a.reset(x);
            prop_assert!(img.reset_pre(&[x]).includes(&a));
            for p in points() {
                let mut q = p;
                q[x] = 0;
                prop_assert_eq!(a.reset_pre(&[x]).contains_scaled(&p, DENOM), a.contains_scaled(&q, DENOM));
            }
        }
    }

    #[test]
    fn normalization_only_grows(a in zone(), c in 1i64..=4) {
        let n = a.normalize(Ceiling(c));
        prop_assert!(n.includes(&a));
        prop_assert_eq!(n.normalize(Ceiling(c)), n.clone());
        for p in points().filter(|p| p.iter().all(|&v| v <= c * DENOM)) {
            prop_assert_eq!(n.contains_scaled(&p, DENOM), a.contains_scaled(&p, DENOM));
        }
    }
}
