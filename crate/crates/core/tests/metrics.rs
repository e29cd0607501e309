use apirefine::analyzer::RequestSnapshot;
use apirefine::engine::{ExecutionReport, RequestRecord, StatusCounts};
use apirefine::metrics::{compute_metrics, emit_report, has_stack_trace, Metrics, ReportFormat, REPORT_VERSION};
use apirefine::model::SpecModel;

fn record(iteration: usize, op: &str, status: u16, body: &str) -> RequestRecord {
    RequestRecord {
        iteration,
        test: 0,
        op_id: op.into(),
        method: "GET".into(),
        url: format!("http://h/{op}"),
        status,
        latency_ms: 1.0,
        body: body.into(),
        checks_passed: (200..400).contains(&status),
        injected: vec![],
        request: RequestSnapshot::default(),
    }
}

fn report(iteration: usize, requests: Vec<RequestRecord>) -> ExecutionReport {
    let mut counts = StatusCounts::default();
    requests.iter().for_each(|r| counts.add(r.status));
    ExecutionReport { iteration, issued: requests.len(), requests, counts, ..Default::default() }
}

fn model_with(n: usize) -> SpecModel {
    let mut m = SpecModel::empty();
    m.original_operation_count = n;
    m
}

#[test]
fn twenty_operations_two_only_fail() {
    let mut reqs: Vec<RequestRecord> = (1..=18).map(|i| record(1, &format!("op{i}"), 200, "{}")).collect();
    reqs.push(record(1, "op19", 500, "Internal Server Error"));
    reqs.push(record(1, "op20", 503, "Service Unavailable"));
    reqs.push(record(1, "op20", 400, "{\"message\":\"bad\"}"));
    let reports = vec![report(1, reqs)];
    let m = compute_metrics(&reports, &model_with(20));
    assert_eq!((m.operations, m.oc, m.oc_2xx), (20, 100.0, 90.0));
    assert_eq!(m.total_hits, 21);
    assert_eq!(m.defects.len(), 2);
    assert!(m.check(&reports).is_ok());
}

#[test]
fn a_4xx_alone_does_not_count_as_covered() {
    let reports = vec![report(1, vec![record(1, "a", 200, ""), record(1, "b", 404, ""), record(1, "c", 302, "")])];
    let m = compute_metrics(&reports, &model_with(4));
    assert_eq!((m.oc, m.oc_2xx), (25.0, 25.0));
}

#[test]
fn no_requests_means_zero_coverage() {
    let m = compute_metrics(&[], &model_with(5));
    assert_eq!((m.oc, m.oc_2xx, m.total_hits), (0.0, 0.0, 0));
    assert!(m.iterations.is_empty() && m.defects.is_empty());
    let m = compute_metrics(&[], &model_with(0));
    assert_eq!(m.oc, 0.0);
}

#[test]
fn repeated_defects_are_listed_once() {
    let trace = "java.lang.IllegalStateException\n\tat a.B.c(B.java:1)\n\tat a.B.d(B.java:2)";
    let reports = vec![
        report(1, vec![record(1, "x", 500, trace), record(1, "x", 500, trace)]),
        report(2, vec![record(2, "x", 500, trace), record(2, "y", 500, "oops")]),
    ];
    let m = compute_metrics(&reports, &model_with(2));
    assert_eq!(m.defects.len(), 2);
    assert!(m.defects.iter().find(|d| d.op_id == "x").unwrap().has_stack_trace);
    assert!(!m.defects.iter().find(|d| d.op_id == "y").unwrap().has_stack_trace);
    assert_eq!(m.iterations.len(), 2);
    assert_eq!(m.iterations[1].counts.s5xx, 2);
}

#[test]
fn json_report_round_trips() {
    let reports = vec![report(1, vec![record(1, "a", 200, ""), record(1, "b", 500, "boom")])];
    let m = compute_metrics(&reports, &model_with(2));
    let text = emit_report(&m, ReportFormat::Json);
    let back: Metrics = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.report_version, REPORT_VERSION);
}

#[test]
fn text_report_has_a_row_per_iteration() {
    let reports = vec![
        report(1, vec![record(1, "a", 404, ""), record(1, "a", 0, "transport error: timed out")]),
        report(2, vec![record(2, "a", 200, "")]),
    ];
    let text = emit_report(&compute_metrics(&reports, &model_with(1)), ReportFormat::Text);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|w| w.len() == 6 && w[0].parse::<usize>().is_ok())
        .collect();
    assert_eq!(rows, vec![vec!["1", "0", "0", "1", "0", "1"], vec!["2", "1", "0", "0", "0", "0"]]);
    assert!(text.contains("oc          100.0%"));
    assert!(text.contains("defects     0"));
}

#[test]
fn inconsistent_reports_fail_the_check() {
    let mut r = report(1, vec![record(1, "a", 200, "")]);
    let m = compute_metrics(std::slice::from_ref(&r), &model_with(1));
    r.issued = 2;
    assert!(m.check(&[r]).is_err());
}

#[test]
fn stack_trace_shapes() {
    assert!(has_stack_trace("Traceback (most recent call last):\n  File \"app.py\", line 3"));
    assert!(has_stack_trace("System.NullReferenceException: Object reference not set"));
    assert!(!has_stack_trace("Internal Server Error"));
    assert!(!has_stack_trace("at most 3 items (per page)"));
}
