use super::entities::mention_score;
use super::text::{singular, split_identifier};
use super::AnalyzerError;
use crate::model::{InputParameter, Location, Method, Operation, ParamId, ProducerConsumer, SpecModel};

const MARKERS: &[&[&str]] = &[
    &["could", "not", "be", "found"],
    &["can", "not", "be", "found"],
    &["cannot", "be", "found"],
    &["does", "not", "exist"],
    &["doesn", "t", "exist"],
    &["do", "not", "exist"],
    &["not", "found"],
    &["not", "exist"],
    &["notfound"],
    &["no", "such"],
    &["missing"],
];

const NOISE: &[&str] = &[
    "the", "a", "an", "with", "id", "ids", "identifier", "given", "specified", "requested",
    "provided", "no", "such", "of", "for", "this", "that", "is", "was", "were", "could", "be",
    "been", "not", "found", "does", "do", "doesn", "exist", "exists", "cannot", "can", "t",
    "resource", "object", "entity", "record", "error", "code", "message", "status", "http",
    "and", "or", "in", "on", "by", "any", "missing", "unknown", "notfound", "key", "number",
];

fn words_of(text: &str) -> Vec<String> {
    let mut stripped = String::new();
    let mut last = 0;
    for q in super::text::quoted_literals(text) {
        stripped.push_str(&text[last..q.start]);
        stripped.push(' ');
        last = q.end;
    }
    stripped.push_str(&text[last..]);
    super::text::words(&stripped)
}

/// Candidate resource nouns, nearest to the not-found marker first.
pub fn resource_nouns(message: &str) -> Vec<String> {
    let words = words_of(message);
    let at = (0..words.len()).find_map(|i| {
        MARKERS.iter().find(|m| words[i..].starts_with(&m.iter().map(|s| s.to_string()).collect::<Vec<_>>())).map(|m| (i, m.len()))
    });
    let (before, after): (Vec<&String>, Vec<&String>) = match at {
        Some((i, len)) => (words[..i].iter().rev().collect(), words[i + len..].iter().collect()),
        None => (Vec::new(), words.iter().collect()),
    };
    let mut out: Vec<String> = Vec::new();
    for w in before.into_iter().chain(after) {
        if NOISE.contains(&w.as_str()) || w.chars().all(|c| c.is_ascii_digit()) || w.len() < 2 {
            continue;
        }
        let s = singular(w);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn op_words(op: &Operation) -> Vec<String> {
    split_identifier(&op.opname).iter().map(|w| singular(w)).collect()
}

fn static_segments(op: &Operation) -> Vec<String> {
    op.path
        .split('/')
        .filter(|s| !s.is_empty() && !s.starts_with('{'))
        .map(|s| s.to_lowercase())
        .collect()
}

fn producer_score(op: &Operation, noun: &str) -> f64 {
    let mut score = 0.0;
    if op_words(op).iter().any(|w| w == noun) {
        score += 3.0;
    }
    let segments = static_segments(op);
    let seg_words: Vec<String> = segments.iter().flat_map(|s| split_identifier(s)).map(|w| singular(&w)).collect();
    if segments.iter().any(|s| singular(s) == noun) || seg_words.iter().any(|w| w == noun) {
        score += 2.0;
    }
    if segments.last().is_some_and(|s| singular(s) == noun) {
        score += 1.0;
    }
    if op.outputs.iter().any(|o| split_identifier(&o.name).iter().any(|w| singular(w) == noun)) {
        score += 0.5;
    }
    score
}

/// The POST operation that most plausibly creates `noun` resources.
pub fn find_producer<'a>(model: &'a SpecModel, noun: &str, consumer: &str) -> Option<&'a Operation> {
    let mut best: Option<(f64, &Operation)> = None;
    for op in &model.operations {
        if op.method != Method::Post || op.opname == consumer || op.needs_user_input {
            continue;
        }
        let score = producer_score(op, noun);
        if score <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bs, bo)) => {
                score > bs
                    || (score == bs
                        && (op.produces_collection, op.path_placeholders().len())
                            < (bo.produces_collection, bo.path_placeholders().len()))
            }
        };
        if better {
            best = Some((score, op));
        }
    }
    best.map(|(_, op)| op)
}

fn consumer_score(p: &InputParameter, noun: &str, message: &str) -> f64 {
    let leaf = p.leaf_name().to_lowercase().replace(['_', '-'], "");
    let path_bonus = if p.loc == Location::Path { 0.5 } else { 0.0 };
    let score = if leaf == format!("{noun}id") {
        5.0
    } else if p.is_identifier_like() && leaf.contains(noun) {
        4.0
    } else if p.is_identifier_like() && mention_score(message, p) >= 2.0 {
        3.0
    } else if leaf == "id" {
        2.0
    } else if p.is_identifier_like() {
        1.0
    } else if p.loc == Location::Path && (leaf.contains(noun) || mention_score(message, p) >= 2.0) {
        1.5
    } else if p.loc == Location::Path {
        0.25
    } else {
        0.0
    };
    if score > 0.0 {
        score + path_bonus
    } else {
        0.0
    }
}

/// The consumer input most associated with `noun`.
pub fn consumer_param(consumer: &Operation, noun: &str, message: &str) -> Option<ParamId> {
    let mut scored: Vec<(f64, &InputParameter)> = consumer
        .live_inputs()
        .map(|p| (consumer_score(p, noun, message), p))
        .filter(|(s, _)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
    scored.first().map(|(_, p)| p.id.clone())
}

fn is_success(code: &str) -> bool {
    code.starts_with('2')
}

/// Producer field carrying the created resource's identifier.
pub fn producer_param(producer: &Operation, noun: &str, consumer_leaf: &str) -> Option<String> {
    let mut codes: Vec<&str> =
        producer.outputs.iter().map(|o| o.responsecode.as_str()).filter(|c| is_success(c)).collect();
    codes.sort();
    codes.dedup();
    let consumer_leaf = consumer_leaf.to_lowercase();
    for code in codes {
        let outs: Vec<_> = producer.outputs.iter().filter(|o| o.responsecode == code).collect();
        let leaf = |name: &str| name.rsplit('.').next().unwrap_or(name).to_lowercase();
        let ranks: [&dyn Fn(&str) -> bool; 5] = [
            &|n| n == "id",
            &|n| leaf(n) == format!("{noun}id") || leaf(n) == format!("{noun}_id"),
            &|n| !n.contains('.') && leaf(n) == consumer_leaf,
            &|n| !n.contains('.') && (leaf(n).ends_with("id")),
            &|n| leaf(n) == "id" || leaf(n) == consumer_leaf,
        ];
        for rank in ranks {
            if let Some(o) = outs.iter().find(|o| rank(&o.name)) {
                return Some(o.id.clone());
            }
        }
    }
    let inputs: Vec<&InputParameter> = producer.live_inputs().collect();
    inputs
        .iter()
        .find(|p| p.leaf_name().to_lowercase() == consumer_leaf)
        .or_else(|| inputs.iter().find(|p| p.leaf_name().eq_ignore_ascii_case("id")))
        .map(|p| p.id.clone())
}

/// Noun of an identifier parameter: `petId` → `pet`; bare `id` uses the
/// path segment before the placeholder.
pub fn noun_of_param(op: &Operation, p: &InputParameter) -> Option<String> {
    let mut words = split_identifier(p.leaf_name());
    if words.last().is_some_and(|w| w == "id") {
        words.pop();
    }
    if let Some(w) = words.last() {
        return Some(singular(w));
    }
    let placeholder = format!("{{{}}}", p.name);
    let segments: Vec<&str> = op.path.split('/').filter(|s| !s.is_empty()).collect();
    let idx = segments.iter().position(|s| *s == placeholder)?;
    segments[..idx].iter().rev().find(|s| !s.starts_with('{')).map(|s| singular(s))
}

fn pair_for(
    nouns: &[String],
    consumer: &Operation,
    model: &SpecModel,
    message: &str,
) -> Result<ProducerConsumer, AnalyzerError> {
    for noun in nouns {
        let Some(producer) = find_producer(model, noun, &consumer.opname) else { continue };
        let Some(cparam) = consumer_param(consumer, noun, message) else { continue };
        let leaf = consumer.input(&cparam).map(|p| p.leaf_name().to_string()).unwrap_or_default();
        let Some(pparam) = producer_param(producer, noun, &leaf) else { continue };
        return Ok(ProducerConsumer {
            producer_op: producer.opname.clone(),
            producer_param: pparam,
            consumer_op: consumer.opname.clone(),
            consumer_param: cparam,
        });
    }
    Err(AnalyzerError::NoProducerFound(format!("{}: {message}", consumer.opname)))
}

/// Producer-consumer pair for a not-found message on `consumer`.
pub fn infer_producer_consumer(
    message: &str,
    consumer: &Operation,
    model: &SpecModel,
) -> Result<ProducerConsumer, AnalyzerError> {
    let mut nouns = resource_nouns(message);
    for p in consumer.live_inputs().filter(|p| p.is_identifier_like()) {
        if let Some(n) = noun_of_param(consumer, p) {
            if !nouns.contains(&n) {
                nouns.push(n);
            }
        }
    }
    pair_for(&nouns, consumer, model, message)
}

/// Blank-404 variant: nouns come from identifier-like inputs only.
pub fn infer_from_identifiers(consumer: &Operation, model: &SpecModel) -> Result<ProducerConsumer, AnalyzerError> {
    let mut ids: Vec<&InputParameter> = consumer.live_inputs().filter(|p| p.is_identifier_like()).collect();
    ids.sort_by_key(|p| (p.loc != Location::Path, p.id.clone()));
    let mut nouns = Vec::new();
    for p in ids {
        if let Some(n) = noun_of_param(consumer, p) {
            if !nouns.contains(&n) {
                nouns.push(n);
            }
        }
    }
    pair_for(&nouns, consumer, model, "")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nouns_nearest_to_marker() {
        assert_eq!(resource_nouns("Order Not Found")[0], "order");
        assert_eq!(
            resource_nouns("playlistNotFound: The playlist with the ID `playlist456' could not be found.")[0],
            "playlist"
        );
        assert_eq!(resource_nouns("No such user")[0], "user");
        assert_eq!(resource_nouns("Pets not found")[0], "pet");
    }
}
