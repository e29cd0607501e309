use std::collections::BTreeSet;

use apirefine::analyzer::{Action, Analyzer, FailureRecord, RequestSnapshot};
use apirefine::engine::ExecParams;
use apirefine::metrics::compute_metrics;
use apirefine::model::{make_param_id, Constraint, ConstraintCategory, Location};
use apirefine::pipeline::{run_pipeline, PipelineConfig, PipelineOutcome, StopReason};
use apirefine_fixtures::{catalog, fixture, ground_truth_check, learned_constraints, serve_fixture, FixtureError};
use serde_json::json;

fn run(name: &str, tweak: impl FnOnce(&mut ExecParams)) -> PipelineOutcome {
    let f = fixture(name).unwrap();
    let model = f.model();
    let h = serve_fixture(f, 0).unwrap();
    let mut p = ExecParams::new(h.base_url());
    tweak(&mut p);
    run_pipeline(model, &PipelineConfig::new(p))
}

#[test]
fn every_fixture_builds_and_loads() {
    let names = catalog();
    assert_eq!(names.len(), 21);
    for name in names {
        let f = fixture(name).unwrap();
        let model = f.model();
        assert!(!model.operations.is_empty(), "{name}");
        assert!(model.warnings.is_empty(), "{name}: {:?}", model.warnings);
        assert!(!f.router.is_empty());
    }
    assert!(fixture("nope").is_none());
}

#[test]
fn declared_messages_classify_to_their_categories() {
    let an = Analyzer::rule_based();
    let mut wrong = Vec::new();
    for name in catalog() {
        let f = fixture(name).unwrap();
        let model = f.model();
        let op = &model.operations[0];
        for (status, msg, cat) in &f.messages {
            let got = an.classify(msg, *status, op);
            if got != *cat {
                wrong.push(format!("{name}: {msg:?} got {got}, want {cat}"));
            }
        }
    }
    assert!(wrong.is_empty(), "{wrong:#?}");
}

#[test]
fn messages_cover_all_fourteen_categories() {
    let covered: BTreeSet<ConstraintCategory> =
        catalog().into_iter().flat_map(|n| fixture(n).unwrap().messages).map(|(_, _, c)| c).collect();
    let all: BTreeSet<ConstraintCategory> = ConstraintCategory::ALL.into_iter().collect();
    assert_eq!(covered, all);
}

#[test]
fn every_fixture_with_ground_truth_is_learned_exactly() {
    for name in catalog() {
        let truth = fixture(name).unwrap().ground_truth;
        if truth.is_empty() {
            continue;
        }
        let out = run(name, |_| {});
        let m = ground_truth_check(&learned_constraints(&out.model), &truth);
        assert!(m.complete(), "{name} missing {:?}", m.missing);
        assert!(m.extra.is_empty(), "{name} extra {:?}", m.extra);
        assert_eq!(out.stop, StopReason::Converged, "{name}");
    }
}

#[test]
fn ground_truth_check_ignores_argument_order() {
    let id = |n| make_param_id("check", Location::FormData, n);
    let learned = vec![Constraint::One { params: vec![id("data"), id("text")] }];
    let truth = vec![Constraint::One { params: vec![id("text"), id("data")] }];
    let m = ground_truth_check(&learned, &truth);
    assert_eq!((m.equivalent.len(), m.missing.len(), m.extra.len()), (1, 0, 0));

    let m = ground_truth_check(&[], &truth);
    assert_eq!(m.missing, truth);
    assert!(!m.complete());

    let or = vec![Constraint::Or { params: vec![id("text"), id("data")] }];
    let m = ground_truth_check(&or, &truth);
    assert_eq!((m.missing.len(), m.extra.len()), (1, 1));
}

#[test]
fn reset_makes_runs_repeatable() {
    let f = fixture("staged").unwrap();
    let model = f.model();
    let h = serve_fixture(f, 0).unwrap();
    let config = PipelineConfig::new(ExecParams::new(h.base_url()));
    let trace = |o: &PipelineOutcome| -> Vec<(String, u16, String)> {
        o.reports
            .iter()
            .flat_map(|r| r.requests.iter())
            .map(|q| (q.url.split_once("/users").unwrap().1.to_string(), q.status, q.body.clone()))
            .collect()
    };
    let first = run_pipeline(model.clone(), &config);
    assert_eq!(h.hits(), first.total_hits());
    h.reset();
    assert_eq!(h.hits(), 0);
    let second = run_pipeline(model, &config);
    assert_eq!(trace(&first), trace(&second));
}

#[test]
fn binding_a_taken_port_fails() {
    let a = serve_fixture(fixture("all-ok").unwrap(), 0).unwrap();
    match serve_fixture(fixture("all-ok").unwrap(), a.port()) {
        Err(FixtureError::Bind(p, _)) => assert_eq!(p, a.port()),
        other => panic!("expected a bind error, got {:?}", other.map(|h| h.base_url().to_string())),
    }
}

#[test]
fn chaos_never_repeats_a_message() {
    let out = run("chaos", |p| p.max_iterations = 4);
    let bodies: BTreeSet<&str> = out.reports.iter().flat_map(|r| &r.requests).map(|q| q.body.as_str()).collect();
    assert_eq!(bodies.len(), out.total_hits());
    assert_eq!(out.stop, StopReason::MaxIterations);
    assert_eq!(out.iterations.len(), 4);
}

#[test]
fn action_only_fixtures_change_the_model() {
    let auth = run("auth", |_| {});
    assert!(auth.model.operation("getReports").unwrap().needs_user_input);
    assert!(auth.verdicts.iter().any(|v| v.action == Action::RequestUserInput));
    assert_eq!(auth.iterations.last().unwrap().counts.s4xx, 0);

    let unsupported = run("unsupported", |_| {});
    assert!(unsupported.model.operation("patchThing").is_none());
    assert_eq!(unsupported.model.removed_operations, vec!["patchThing".to_string()]);

    let unknown = run("unknown-param", |_| {});
    let url = make_param_id("fetchPage", Location::Query, "url");
    assert!(!unknown.model.operation("fetchPage").unwrap().input(&url).unwrap().is_live());
    assert_eq!(unknown.iterations.last().unwrap().counts.s4xx, 0);
}

#[test]
fn stack_traces_are_reported_as_defects() {
    let out = run("defects", |_| {});
    let m = compute_metrics(&out.reports, &out.model);
    assert_eq!(m.defects.len(), 1);
    assert!(m.defects[0].has_stack_trace);
    assert_eq!(m.defects[0].op_id, "renderReport");
    assert!(out.verdicts.iter().all(|v| v.action == Action::ReportDefect));
}

#[test]
fn the_api_key_header_unlocks_the_guarded_operation() {
    let out = run("auth", |p| {
        p.headers.insert("X-Api-Key".into(), apirefine_fixtures::catalog::API_KEY.into());
    });
    assert_eq!(out.iterations.len(), 1);
    assert_eq!(out.iterations[0].counts.s4xx, 0);
}

#[test]
fn blank_not_found_needs_an_identifier_input() {
    let f = fixture("blank-404").unwrap();
    let model = f.model();
    let an = Analyzer::rule_based();
    let v = an.analyze(&FailureRecord::new("getItem", 404, "", RequestSnapshot::default()), &model);
    assert_eq!(v.action, Action::AddConstraint);
    assert_eq!(v.constraint, Some(f.ground_truth[0].clone()));
    let v = an.analyze(&FailureRecord::new("createItem", 404, "", RequestSnapshot::default()), &model);
    assert_eq!(v.action, Action::RegenerateData);
    let v = an.analyze(&FailureRecord::new("createItem", 400, json!(null).to_string(), RequestSnapshot::default()), &model);
    assert_eq!(v.action, Action::RegenerateData);
}
