//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use apirefine::analyzer::{Action, Analyzer};
use apirefine::engine::ExecParams;
use apirefine::metrics::compute_metrics;
use apirefine::model::{Constraint, ConstraintCategory as Cat, ProducerConsumer};
use apirefine::pipeline::{run_pipeline, IterationReport, PipelineConfig, PipelineOutcome, StopReason};
use apirefine::scenario::{encode_selection_constraints, solve_parameter_scenarios, ScenarioError, ScenarioKind};
use apirefine_fixtures::oracle::{self, bare_operation, query_param};
use apirefine_fixtures::{catalog, fixture, ground_truth_check, learned_constraints, serve_fixture};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Run a fixture through the loop; also returns the server-side hit count.
fn run(name: &str, tweak: impl FnOnce(&mut ExecParams)) -> (PipelineOutcome, usize, Duration) {
    let f = fixture(name).unwrap_or_else(|| panic!("no fixture {name}"));
    let model = f.model();
    let h = serve_fixture(f, 0).expect("fixture binds");
    let mut p = ExecParams::new(h.base_url());
    tweak(&mut p);
    let started = Instant::now();
    let out = run_pipeline(model, &PipelineConfig::new(p));
    (out, h.hits(), started.elapsed())
}

fn last(out: &PipelineOutcome) -> &IterationReport {
    out.iterations.last().expect("at least one iteration")
}

fn inter_parameter() -> Outcome {
    let truth = fixture("langtool").unwrap().ground_truth;
    let (out, _, took) = run("langtool", |_| {});
    let m = ground_truth_check(&learned_constraints(&out.model), &truth);
    ensure(out.stop == StopReason::Converged, || format!("stopped with {:?}", out.stop))?;
    ensure(out.iterations.len() <= 3, || format!("{} iterations", out.iterations.len()))?;
    ensure(m.missing.is_empty(), || format!("missing {:?}", m.missing))?;
    ensure(last(&out).counts.s4xx == 0, || format!("final 4xx {}", last(&out).counts.s4xx))?;
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{} iterations, 0 missing, final 4xx 0, {:.2}s", out.iterations.len(), took.as_secs_f64()))
}

fn producer_consumer() -> Outcome {
    let (out, _, took) = run("petstore", |_| {});
    let expected = Constraint::ProducerConsumer(ProducerConsumer {
        producer_op: "placeOrder".into(),
        producer_param: "placeOrder.200.id".into(),
        consumer_op: "deleteOrder".into(),
        consumer_param: "deleteorder.path.orderId".into(),
    });
    ensure(learned_constraints(&out.model).contains(&expected), || "delete pair not learned exactly".into())?;
    let injected_ok = out.reports.iter().flat_map(|r| &r.requests).any(|q| {
        q.op_id == "deleteOrder" && (200..300).contains(&q.status) && q.injected.contains(&"deleteorder.path.orderId".into())
    });
    ensure(injected_ok, || "deleteOrder never reached 2xx with an injected id".into())?;
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("pair learned, deleteOrder 2xx via injected id, {:.2}s", took.as_secs_f64()))
}

/// a/b <= c/d without rounding.
fn share_le(a: usize, b: usize, c: usize, d: usize) -> bool {
    a * d <= c * b
}

fn monotone() -> Outcome {
    let multi: Vec<&str> =
        catalog().into_iter().filter(|n| fixture(n).map(|f| f.ground_truth.len() >= 2).unwrap_or(false)).collect();
    for name in &multi {
        let (out, _, _) = run(name, |_| {});
        for w in out.iterations.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            ensure(share_le(b.counts.s4xx, b.issued, a.counts.s4xx, a.issued), || {
                format!("{name}: 4xx share rose at iteration {}", b.index)
            })?;
            ensure(share_le(a.counts.s2xx, a.issued, b.counts.s2xx, b.issued), || {
                format!("{name}: 2xx share fell at iteration {}", b.index)
            })?;
        }
    }
    Ok(format!("{} multi-constraint fixtures: {}", multi.len(), multi.join(", ")))
}

fn solver_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut infeasible = 0;
    for case in 0..200 {
        let op = oracle::random_operation(&mut rng, 12);
        let expected = oracle::scenarios(&op);
        match solve_parameter_scenarios(&encode_selection_constraints(&op), false) {
            Ok(got) => {
                let got: Vec<_> = got.into_iter().map(|s| (s.selected, s.kind)).collect();
                ensure(got == expected, || format!("case {case} differs: {:?}", op.local_constraints))?;
            }
            Err(ScenarioError::InfeasibleMandatory(_)) => {
                infeasible += 1;
                ensure(expected.is_empty(), || format!("case {case}: solver infeasible, oracle not"))?;
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    let took = started.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("200/200 equal ({infeasible} infeasible), {:.2}s", took.as_secs_f64()))
}

fn encoding_example() -> Outcome {
    let inputs = ["p1", "p2", "p3"].map(|n| query_param("o", n, false)).to_vec();
    let ids: Vec<String> = inputs.iter().map(|p| p.id.clone()).collect();
    let op = bare_operation("o", inputs, vec![Constraint::One { params: vec![ids[0].clone(), ids[2].clone()] }]);
    let s = solve_parameter_scenarios(&encode_selection_constraints(&op), false).map_err(|e| e.to_string())?;
    let maximal: Vec<Vec<&str>> = s
        .iter()
        .filter(|x| x.kind == ScenarioKind::Maximal)
        .map(|x| x.selected.iter().map(|p| p.rsplit('.').next().unwrap()).collect())
        .collect();
    ensure(maximal == vec![vec!["p1", "p2"], vec!["p2", "p3"]], || format!("maximal {maximal:?}"))?;
    Ok("maximal {p1,p2} and {p2,p3}".into())
}

const SAMPLES: [(u16, &str, Cat); 14] = [
    (401, "API key not valid. Please pass a valid API key.", Cat::ConfigurationAuthentication),
    (404, "playlistNotFound: The playlist with the ID `playlist456' could not be found.", Cat::ProducerConsumer),
    (405, "Method Not Allowed Request method `POST' not supported", Cat::UnsupportedOperation),
    (400, "\"points\" is a required parameter.", Cat::AdditionalMandatory),
    (400, "You must specify either the `source' or `destination' parameter.", Cat::Or),
    (400, "Either city or zipcode is required, not both.", Cat::One),
    (400, "Address should be specified with street, city and pincode.", Cat::AllOrNone),
    (400, "If longitude specified then latitude should be too", Cat::ConditionalParameterRequired),
    (400, "Received unknown parameter: url", Cat::ParameterUnknown),
    (400, "afterTimestamp must be greater than beforeTimestamp", Cat::DataArithmetic),
    (400, "`PL' is not a valid gender. Supported values are `Male' , `Female', `Other'.", Cat::DataNonArithmetic),
    (400, "If type is 'audio', only one of the other two parameters is required", Cat::DataInfluencedParamSelection),
    (400, "If thumbnail is present, type must be `link'.", Cat::ParameterInfluencedDataValues),
    (500, "Internal Server Error", Cat::Unhandled),
];

fn classifier_corpus() -> Outcome {
    let an = Analyzer::rule_based();
    let op = bare_operation("o", vec![], vec![]);
    let wrong: Vec<String> = SAMPLES
        .iter()
        .filter_map(|(status, msg, cat)| {
            let got = an.classify(msg, *status, &op);
            (got != *cat).then(|| format!("{msg:?} -> {got}"))
        })
        .collect();
    ensure(wrong.is_empty(), || wrong.join("; "))?;
    ensure(SAMPLES.iter().map(|s| s.2).collect::<Vec<_>>() == Cat::ALL.to_vec(), || "rows out of order".into())?;
    Ok("14/14 samples".into())
}

/// Staged fixture by hand: ops createUser (2 scenarios), listUsers (1),
/// getUser (1), updateUser (2), deleteUser (1) give 7 requests; after the
/// three producer pairs the three consumers each gain a createUser step
/// (2+1+2+2*2+2 = 11); after One(city, zipcode) updateUser has 3 scenarios
/// (2+1+2+3*2+2 = 13).
const STAGED_REQUESTS: usize = 7 + 11 + 13;
const STAGED_BOUND: usize = 60;

fn budget() -> Outcome {
    for name in catalog() {
        for b in [1, 5, 13] {
            let (out, served, _) = run(name, |p| p.hit_budget = Some(b));
            ensure(out.total_hits() <= b && served <= b, || {
                format!("{name} with budget {b}: issued {} served {served}", out.total_hits())
            })?;
        }
    }
    let (out, served, _) = run("staged", |_| {});
    ensure(served == out.total_hits(), || format!("served {served} issued {}", out.total_hits()))?;
    ensure(out.total_hits() <= STAGED_BOUND, || format!("staged used {}", out.total_hits()))?;
    ensure(out.total_hits() == STAGED_REQUESTS, || format!("staged used {}, expected {STAGED_REQUESTS}", out.total_hits()))?;
    Ok(format!("every fixture within budgets 1/5/13; staged {} <= {STAGED_BOUND}", out.total_hits()))
}

fn convergence() -> Outcome {
    let (ok, _, _) = run("all-ok", |_| {});
    ensure(ok.iterations.len() == 1 && ok.stop == StopReason::Converged, || {
        format!("all-ok: {} iterations, {:?}", ok.iterations.len(), ok.stop)
    })?;
    let (chaos, _, _) = run("chaos", |_| {});
    let cap = ExecParams::new("http://x").max_iterations;
    ensure(chaos.stop == StopReason::MaxIterations && chaos.iterations.len() == cap, || {
        format!("chaos: {} iterations, {:?}", chaos.iterations.len(), chaos.stop)
    })?;
    Ok(format!("all-ok 1 iteration; chaos stopped at the cap of {cap}"))
}

fn metrics() -> Outcome {
    let (out, _, _) = run("metrics-20", |_| {});
    let m = compute_metrics(&out.reports, &out.model);
    m.check(&out.reports)?;
    ensure(m.operations == 20, || format!("{} operations", m.operations))?;
    ensure(m.oc == 100.0 && m.oc_2xx == 90.0, || format!("oc {} oc_2xx {}", m.oc, m.oc_2xx))?;
    Ok(format!("oc {} oc_2xx {}", m.oc, m.oc_2xx))
}

fn blank_responses() -> Outcome {
    let truth = fixture("blank-404").unwrap().ground_truth;
    let (out, _, _) = run("blank-404", |_| {});
    let pc = out.verdicts.iter().find(|v| v.op_id == "getItem").ok_or("no verdict for getItem")?;
    ensure(pc.category == Some(Cat::ProducerConsumer) && pc.constraint.as_ref() == truth.first(), || {
        format!("getItem verdict {pc:?}")
    })?;
    let later_2xx = out.reports.iter().skip(1).flat_map(|r| &r.requests).any(|q| q.op_id == "getItem" && q.status == 200);
    ensure(later_2xx, || "getItem never reached 2xx".into())?;

    let (out, _, _) = run("blank-400", |_| {});
    let v = out.verdicts.first().ok_or("no verdict for blank-400")?;
    ensure(v.action == Action::RegenerateData && v.constraint.is_none(), || format!("verdict {v:?}"))?;
    ensure(learned_constraints(&out.model).is_empty(), || "a constraint was added".into())?;
    let data: Vec<_> = out.reports.iter().filter_map(|r| r.requests.first()).map(|q| &q.request.data).collect();
    ensure(data.len() >= 2 && data[0] != data[1], || "data was not regenerated".into())?;
    Ok("blank 404 gives a producer pair then 2xx; blank 400 regenerates data only".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("end-to-end learning, inter-parameter", inter_parameter),
        ("end-to-end learning, producer-consumer", producer_consumer),
        ("monotone refinement", monotone),
        ("solver oracle equivalence", solver_oracle),
        ("encoding spot-check", encoding_example),
        ("classifier corpus", classifier_corpus),
        ("budget discipline", budget),
        ("convergence semantics", convergence),
        ("metrics fidelity", metrics),
        ("blank-response handling", blank_responses),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
