mod common;

use nzfcheck::{parse_formula, parse_model, ApproxMode, EngineConfig};
use rand::seq::SliceRandom;
use rand::Rng;

fn random_text(rng: &mut impl Rng, depth: u32) -> String {
    let leaves = ["p", "q", "m0", "x <= 2", "x > 1", "true", "false"];
    if depth == 0 || rng.gen_bool(0.3) {
        return leaves.choose(rng).unwrap().to_string();
    }
    let a = random_text(rng, depth - 1);
    let b = random_text(rng, depth - 1);
    match rng.gen_range(0..14) {
        0 => format!("not ({a})"),
        1 => format!("({a}) or ({b})"),
        2 => format!("({a}) and ({b})"),
        3 => format!("({a}) -> ({b})"),
        4 => format!("E (({a}) U ({b}))"),
        5 => format!("A (({a}) U ({b}))"),
        6 => format!("EF ({a})"),
        7 => format!("AF ({a})"),
        8 => format!("EG ({a})"),
        9 => format!("AG ({a})"),
        10 => format!("EGF ({a})"),
        11 => format!("AFG ({a})"),
        12 => format!("EFG ({a})"),
        _ => format!("freeze t{depth}: ({a})"),
    }
}

#[test]
fn printing_then_parsing_is_identity() {
    let mut rng = common::rng(21);
    let model = "clocks x;\nmode m0;\nmode m1;\nprop p: m0 and x < 1;\nprop q: m1;\ninit m0;\n";
    let base = parse_model(model).unwrap();
    for _ in 0..500 {
        let text = random_text(&mut rng, 4);
        let mut ta = base.clone();
        let f = parse_formula(&text, &mut ta).unwrap_or_else(|e| panic!("`{text}`: {e}"));
        let printed = f.display(&ta).to_string();
        // Formula clocks are numbered by first appearance, so the printed
        // text is read back with the clocks it already declared.
        let clocks = ta.clocks.clone();
        let g = parse_formula(&printed, &mut ta).unwrap_or_else(|e| panic!("`{printed}`: {e}"));
        assert_eq!(f, g, "`{text}` printed as `{printed}`");
        assert_eq!(ta.clocks, clocks);
    }
}

/// Derived operators, nesting and formula clocks agree with the region graph.
#[test]
fn derived_operators_match_region_graph() {
    let texts = [
        "A (p U q)",
        "AF q",
        "AG p",
        "AGF p",
        "AFG q",
        "AG (p -> AF q)",
        "EF (p and EG q)",
        "freeze t: EF (q and t <= 2)",
        "freeze t: AG (p -> t < 3)",
    ];
    for (i, model) in common::pool(80).iter().enumerate() {
        for text in texts {
            let (_, f, mut checker, graph) = common::instance(model, text, EngineConfig::default());
            let engine = checker.eval(&f, ApproxMode::Exact).unwrap();
            let bad = graph.disagreements(&engine, &graph.eval(&f, true));
            assert!(bad.is_empty(), "model #{i} `{text}`: {} regions differ\n{model}", bad.len());
        }
    }
}

/// Every state satisfying `q` satisfies `A (p U q)`, which in turn implies `AF q`.
#[test]
fn universal_until_sits_between_its_bounds() {
    for model in common::pool(80) {
        let (mut ta, au, mut checker, _) = common::instance(&model, "A (p U q)", EngineConfig::default());
        let af = parse_formula("AF q", &mut ta).unwrap();
        let q = parse_formula("q", &mut ta).unwrap();
        let div = parse_formula("EG true", &mut ta).unwrap();
        let au = checker.eval(&au, ApproxMode::Exact).unwrap();
        let af = checker.eval(&af, ApproxMode::Exact).unwrap();
        let q = checker.eval(&q, ApproxMode::Exact).unwrap();
        let div = checker.eval(&div, ApproxMode::Exact).unwrap();
        assert!(af.includes(&au), "{model}");
        assert!(au.includes(&q.intersect(&div)), "{model}");
    }
}
