use super::text::{fold, name_similarity, raw_tokens, singular, split_identifier, words, words_match, STOPWORDS};
use super::AnalyzerError;
use crate::model::{InputParameter, ParamId};

/// Minimum token-overlap score for a similarity match.
pub const SIMILARITY_THRESHOLD: f64 = 0.6;

const EXACT: f64 = 3.0;
const FOLDED: f64 = 2.0;

/// How strongly `message` refers to parameter `p` (0 when it does not).
pub fn mention_score(message: &str, p: &InputParameter) -> f64 {
    let leaf = p.leaf_name();
    let tokens = raw_tokens(message);
    if tokens.iter().any(|(_, t)| *t == leaf || *t == p.name) {
        return EXACT;
    }
    let target = fold(leaf);
    let folded: Vec<String> = tokens.iter().map(|(_, t)| fold(t)).collect();
    if folded.iter().any(|t| *t == target || *t == fold(&p.name)) {
        return FOLDED;
    }
    for width in 2..=3 {
        if folded.windows(width).any(|w| w.concat() == target) {
            return FOLDED;
        }
    }
    let sim = name_similarity(leaf, &words(message));
    if sim >= SIMILARITY_THRESHOLD {
        sim
    } else {
        0.0
    }
}

/// Candidate ids mentioned by `message`, best match first; ties broken by id.
pub fn identify_target_parameters(
    message: &str,
    candidates: &[&InputParameter],
) -> Result<Vec<ParamId>, AnalyzerError> {
    let mut scored: Vec<(f64, &ParamId)> = candidates
        .iter()
        .filter(|p| p.is_live())
        .map(|p| (mention_score(message, p), &p.id))
        .filter(|(s, _)| *s > 0.0)
        .collect();
    if scored.is_empty() {
        return Err(AnalyzerError::NoTargetFound(message.to_string()));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let mut out: Vec<ParamId> = Vec::new();
    for (_, id) in scored {
        if !out.contains(id) {
            out.push(id.clone());
        }
    }
    Ok(out)
}

/// Byte offset of the first mention of `p` in `text`.
pub fn locate(text: &str, p: &InputParameter) -> Option<usize> {
    let leaf = p.leaf_name();
    let tokens = raw_tokens(text);
    if let Some((i, _)) = tokens.iter().find(|(_, t)| *t == leaf || *t == p.name) {
        return Some(*i);
    }
    let target = fold(leaf);
    let folded: Vec<String> = tokens.iter().map(|(_, t)| fold(t)).collect();
    if let Some(i) = folded.iter().position(|t| *t == target) {
        return Some(tokens[i].0);
    }
    for width in 2..=3 {
        if let Some(i) = folded.windows(width).position(|w| w.concat() == target) {
            return Some(tokens[i].0);
        }
    }
    let param_words: Vec<String> = split_identifier(leaf)
        .iter()
        .map(|w| singular(w))
        .filter(|w| !["id", "ids", "key", "no", "num", "val"].contains(&w.as_str()))
        .collect();
    for (offset, token) in &tokens {
        for w in split_identifier(token) {
            if STOPWORDS.contains(&w.as_str()) {
                continue;
            }
            let w = singular(&w);
            if param_words.iter().any(|pw| words_match(pw, &w)) {
                return Some(*offset);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Location, ParamType, ValueConstraints};

    fn p(name: &str) -> InputParameter {
        InputParameter {
            id: format!("op.query.{name}"),
            name: name.into(),
            ptype: ParamType::String,
            is_required: false,
            loc: Location::Query,
            pc: ValueConstraints::default(),
            examples: vec![],
            locally_required: false,
            recursive: false,
            body_root: false,
            removed: false,
        }
    }

    fn ids(message: &str, names: &[&str]) -> Result<Vec<String>, AnalyzerError> {
        let params: Vec<InputParameter> = names.iter().map(|n| p(n)).collect();
        let refs: Vec<&InputParameter> = params.iter().collect();
        identify_target_parameters(message, &refs)
            .map(|v| v.into_iter().map(|id| id.trim_start_matches("op.query.").to_string()).collect())
    }

    #[test]
    fn picks_email_id() {
        let names = ["gender", "linkedin", "password", "firstName", "lastName", "emailId", "country"];
        assert_eq!(ids("This email beulalingo@yahoo.com is already in use.", &names).unwrap(), vec!["emailId"]);
    }

    #[test]
    fn picks_abbreviated_name() {
        assert_eq!(ids("Storage capacity cannot be less than zero", &["storageCap", "name"]).unwrap(), vec!["storageCap"]);
    }

    #[test]
    fn exact_beats_similarity() {
        assert_eq!(ids("\"points\" is a required parameter.", &["points", "score"]).unwrap(), vec!["points"]);
        assert_eq!(ids("Either city or zipcode is required, not both.", &["zipcode", "city", "street"]).unwrap(), vec!["city", "zipcode"]);
        assert_eq!(ids("zip code is invalid", &["zipCode", "city"]).unwrap(), vec!["zipCode"]);
    }

    #[test]
    fn no_target() {
        assert!(matches!(ids("Something odd happened", &["alpha", "beta"]), Err(AnalyzerError::NoTargetFound(_))));
    }

    #[test]
    fn locate_orders_mentions() {
        let text = "afterTimestamp must be greater than beforeTimestamp";
        assert!(locate(text, &p("afterTimestamp")).unwrap() < locate(text, &p("beforeTimestamp")).unwrap());
        assert_eq!(locate("Storage capacity cannot be less than zero", &p("storageCap")), Some(0));
    }
}
