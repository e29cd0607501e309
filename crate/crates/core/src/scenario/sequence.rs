//! Operation sequences from producer-consumer dependencies.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{ProducerConsumer, SpecModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceScenario {
    pub target_op: String,
    /// Prerequisites in topological order, ending with `target_op`.
    pub ops: Vec<String>,
    pub deps: Vec<ProducerConsumer>,
}

impl SequenceScenario {
    pub fn prerequisites(&self) -> &[String] {
        &self.ops[..self.ops.len() - 1]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sequences {
    pub scenarios: Vec<SequenceScenario>,
    /// Edges dropped because they closed a cycle.
    pub dropped: Vec<ProducerConsumer>,
    pub warnings: Vec<String>,
}

fn testable(model: &SpecModel, opname: &str) -> bool {
    model.operation(opname).is_some_and(|o| !o.needs_user_input)
}

/// One producer per consumed resource: single-resource producers win over
/// collection producers, then the earliest learned edge.
fn choose_producers<'a>(deps: &'a [ProducerConsumer], model: &SpecModel) -> Vec<&'a ProducerConsumer> {
    let mut chosen: BTreeMap<(&str, &str), (usize, &ProducerConsumer)> = BTreeMap::new();
    for (i, d) in deps.iter().enumerate() {
        let key = (d.consumer_op.as_str(), d.consumer_param.as_str());
        let collection = |pc: &ProducerConsumer| model.operation(&pc.producer_op).is_some_and(|o| o.produces_collection);
        match chosen.get(&key) {
            Some((_, cur)) if !(collection(cur) && !collection(d)) => {}
            _ => {
                chosen.insert(key, (i, d));
            }
        }
    }
    let mut out: Vec<(usize, &ProducerConsumer)> = chosen.into_values().collect();
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, d)| d).collect()
}

fn reaches(graph: &BTreeMap<&str, BTreeSet<&str>>, from: &str, to: &str) -> bool {
    let mut stack = vec![from];
    let mut seen = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if n == to {
            return true;
        }
        if seen.insert(n) {
            if let Some(next) = graph.get(n) {
                stack.extend(next.iter().copied());
            }
        }
    }
    false
}

/// One sequence per testable operation. Edges are admitted in learning
/// order; an edge closing a cycle is the most recent edge on it and is
/// dropped with a warning.
pub fn generate_sequences(deps: &[ProducerConsumer], model: &SpecModel) -> Sequences {
    let mut result = Sequences::default();
    let usable: Vec<ProducerConsumer> = deps
        .iter()
        .filter(|d| testable(model, &d.producer_op) && testable(model, &d.consumer_op))
        .cloned()
        .collect();

    // producer -> consumers
    let mut graph: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut accepted: Vec<&ProducerConsumer> = Vec::new();
    for d in choose_producers(&usable, model) {
        if d.producer_op == d.consumer_op || reaches(&graph, &d.consumer_op, &d.producer_op) {
            result.warnings.push(format!(
                "cyclic dependency: dropped {} -> {} ({})",
                d.producer_op, d.consumer_op, d.consumer_param
            ));
            result.dropped.push(d.clone());
            continue;
        }
        graph.entry(&d.producer_op).or_default().insert(&d.consumer_op);
        accepted.push(d);
    }

    let position: BTreeMap<&str, usize> =
        model.operations.iter().enumerate().map(|(i, o)| (o.opname.as_str(), i)).collect();
    for target in model.operations.iter().filter(|o| !o.needs_user_input) {
        let mut members: BTreeSet<&str> = BTreeSet::from([target.opname.as_str()]);
        let mut frontier = vec![target.opname.as_str()];
        while let Some(consumer) = frontier.pop() {
            for d in accepted.iter().filter(|d| d.consumer_op == consumer) {
                if members.insert(&d.producer_op) {
                    frontier.push(&d.producer_op);
                }
            }
        }
        let used: Vec<ProducerConsumer> =
            accepted.iter().filter(|d| members.contains(d.consumer_op.as_str())).map(|d| (*d).clone()).collect();
        let ops = topological(&members, &used, &position, &target.opname);
        result.scenarios.push(SequenceScenario { target_op: target.opname.clone(), ops, deps: used });
    }
    result
}

/// Kahn's algorithm; ties resolved by model order, target forced last.
fn topological(
    members: &BTreeSet<&str>,
    edges: &[ProducerConsumer],
    position: &BTreeMap<&str, usize>,
    target: &str,
) -> Vec<String> {
    let mut indegree: BTreeMap<&str, usize> = members.iter().map(|m| (*m, 0)).collect();
    let mut seen_edges = BTreeSet::new();
    for e in edges {
        if seen_edges.insert((e.producer_op.as_str(), e.consumer_op.as_str())) {
            *indegree.get_mut(e.consumer_op.as_str()).expect("member") += 1;
        }
    }
    let mut out = Vec::with_capacity(members.len());
    while out.len() < members.len() {
        let next = indegree
            .iter()
            .filter(|(n, d)| **d == 0 && (**n != target || indegree.len() == 1))
            .min_by_key(|(n, _)| position.get(*n).copied().unwrap_or(usize::MAX))
            .map(|(n, _)| *n)
            .expect("admitted edges are acyclic");
        indegree.remove(next);
        for (p, c) in &seen_edges {
            if *p == next {
                if let Some(d) = indegree.get_mut(c) {
                    *d -= 1;
                }
            }
        }
        out.push(next.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Method, Operation};

    fn op(name: &str, collection: bool) -> Operation {
        Operation {
            opname: name.into(),
            path: format!("/{name}"),
            tag: vec![],
            method: Method::Post,
            inputs: vec![],
            outputs: vec![],
            local_constraints: vec![],
            request_media_type: None,
            produces_collection: collection,
            needs_user_input: false,
        }
    }

    fn model(names: &[&str]) -> SpecModel {
        let mut m = SpecModel::empty();
        m.operations = names.iter().map(|n| op(n, false)).collect();
        m
    }

    fn edge(p: &str, c: &str, param: &str) -> ProducerConsumer {
        ProducerConsumer {
            producer_op: p.into(),
            producer_param: format!("{p}.200.id"),
            consumer_op: c.into(),
            consumer_param: param.into(),
        }
    }

    #[test]
    fn no_dependencies_gives_singletons() {
        let s = generate_sequences(&[], &model(&["a", "b", "c"]));
        assert_eq!(s.scenarios.len(), 3);
        assert!(s.scenarios.iter().all(|q| q.ops == vec![q.target_op.clone()]));
    }

    #[test]
    fn cycle_drops_latest_edge() {
        let m = model(&["a", "b"]);
        let s = generate_sequences(&[edge("a", "b", "b.x"), edge("b", "a", "a.y")], &m);
        assert_eq!(s.dropped, vec![edge("b", "a", "a.y")]);
        assert_eq!(s.warnings.len(), 1);
        assert_eq!(s.scenarios[1].ops, vec!["a", "b"]);
        assert_eq!(s.scenarios[0].ops, vec!["a"]);
    }

    #[test]
    fn single_resource_producer_preferred() {
        let mut m = model(&["listMaker", "maker", "user"]);
        m.operations[0].produces_collection = true;
        let s = generate_sequences(&[edge("listMaker", "user", "u.id"), edge("maker", "user", "u.id")], &m);
        assert_eq!(s.scenarios[2].ops, vec!["maker", "user"]);
    }
}
