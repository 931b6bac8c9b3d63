#![allow(dead_code)]

use nzfcheck::engine::Checker;
use nzfcheck::region_oracle::RegionGraph;
use nzfcheck::{parse_formula, parse_model, EngineConfig, Formula, TimedAutomaton};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub const FORMULAS: [&str; 5] = ["EF p", "E (p U q)", "EG p", "EGF p", "EFG p"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn atom(rng: &mut impl Rng, clocks: &[&str], max_c: i64, ops: &[&str]) -> String {
    let x = clocks.choose(rng).unwrap();
    let op = ops.choose(rng).unwrap();
    format!("{x} {op} {}", rng.gen_range(0..=max_c))
}

fn state_pred(rng: &mut impl Rng, modes: usize, clocks: &[&str]) -> String {
    let all_ops = ["<", "<=", "==", ">=", ">"];
    let m = format!("m{}", rng.gen_range(0..modes));
    match rng.gen_range(0..5) {
        0 => m,
        1 => atom(rng, clocks, 3, &all_ops),
        2 => format!("{m} and {}", atom(rng, clocks, 3, &all_ops)),
        3 => format!("{m} or {}", atom(rng, clocks, 3, &all_ops)),
        _ => format!("not {m}"),
    }
}

/// A random automaton text with at most 3 modes, 2 clocks, constants up to
/// 3, and two propositions `p` and `q`.
pub fn random_model(rng: &mut impl Rng) -> String {
    let nclocks = rng.gen_range(1..=2);
    let clocks: Vec<&str> = ["x", "y"][..nclocks].to_vec();
    let modes = rng.gen_range(1..=3);
    let mut s = format!("clocks {};\n", clocks.join(" "));
    for q in 0..modes {
        if rng.gen_bool(0.5) {
            let inv = atom(rng, &clocks, 3, &["<", "<="]);
            s += &format!("mode m{q} {{ inv: {inv}; }}\n");
        } else {
            s += &format!("mode m{q};\n");
        }
    }
    for _ in 0..rng.gen_range(0..=4) {
        let a = rng.gen_range(0..modes);
        let b = rng.gen_range(0..modes);
        let mut body = String::new();
        let guards: Vec<String> = (0..rng.gen_range(0..=2))
            .map(|_| atom(rng, &clocks, 3, &["<", "<=", "==", ">=", ">"]))
            .collect();
        if !guards.is_empty() {
            body += &format!(" guard: {};", guards.join(" and "));
        }
        let resets: Vec<&str> = clocks.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !resets.is_empty() {
            body += &format!(" reset: {};", resets.join(", "));
        }
        s += &format!("trans m{a} -> m{b} {{{body} }}\n");
    }
    s += &format!("prop p: {};\n", state_pred(rng, modes, &clocks));
    s += &format!("prop q: {};\n", state_pred(rng, modes, &clocks));
    s += "init m0;\n";
    s
}

/// Parses a model and a formula and builds a checker plus the matching
/// region graph sharing one ceiling.
pub fn instance(model: &str, formula: &str, cfg: EngineConfig) -> (TimedAutomaton, Formula, Checker, RegionGraph) {
    let mut ta = parse_model(model).unwrap_or_else(|e| panic!("{e}\n{model}"));
    let f = parse_formula(formula, &mut ta).unwrap();
    let checker = Checker::new(&ta, &[&f], cfg).unwrap();
    let graph = RegionGraph::build(&ta, checker.ceiling()).unwrap();
    (ta, f, checker, graph)
}

/// The first `n` random models of the shared pool.
pub fn pool(n: usize) -> Vec<String> {
    let mut r = rng(0x5eed);
    (0..n).map(|_| random_model(&mut r)).collect()
}

use nzfcheck::{Bound, Zone};

/// A raw difference constraint `x_i - x_j ≺ c`, kept alongside the zone so
/// membership can be decided without the matrix.
pub type Raw = (usize, usize, Bound);

/// Random constraints over `dim - 1` clocks with constants in `-max..=max`.
pub fn random_constraints(rng: &mut impl Rng, dim: usize, max: i64) -> Vec<Raw> {
    (0..rng.gen_range(0..=4))
        .map(|_| {
            let i = rng.gen_range(0..dim);
            let mut j = rng.gen_range(0..dim);
            while j == i {
                j = rng.gen_range(0..dim);
            }
            let c = rng.gen_range(-max..=max);
            (i, j, if rng.gen_bool(0.5) { Bound::weak(c) } else { Bound::strict(c) })
        })
        .collect()
}

/// Direct evaluation of raw constraints at `point / denom`.
pub fn raw_holds(cs: &[Raw], point: &[i64], denom: i64) -> bool {
    point.iter().all(|&v| v >= 0)
        && cs.iter().all(|&(i, j, b)| {
            let diff = point[i] - point[j];
            let c = b.value().expect("finite") * denom;
            if b.is_weak() { diff <= c } else { diff < c }
        })
}

/// Every valuation with coordinates in `{0, 1/denom, ..., hi}` (scaled).
pub fn grid(dim: usize, hi: i64, denom: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0]];
    for _ in 1..dim {
        out = out
            .into_iter()
            .flat_map(|p| (0..=hi * denom).map(move |v| {
                let mut q = p.clone();
                q.push(v);
                q
            }))
            .collect();
    }
    out
}

pub fn zone_of(dim: usize, cs: &[Raw]) -> Zone {
    Zone::from_constraints(dim, cs)
}
