mod common;

use nzfcheck::{ApproxMode, EngineConfig};

#[test]
fn exact_evaluation_matches_region_graph() {
    for (i, model) in common::pool(200).iter().enumerate() {
        for text in common::FORMULAS {
            let (_, f, mut checker, graph) = common::instance(model, text, EngineConfig::default());
            let engine = checker.eval(&f, ApproxMode::Exact).unwrap();
            let oracle = graph.eval(&f, true);
            let bad = graph.disagreements(&engine, &oracle);
            assert!(bad.is_empty(), "model #{i} `{text}`: {} regions differ, e.g. {:?}\n{model}\nengine {engine:?}", bad.len(), &bad[..bad.len().min(3)]);
        }
    }
}
