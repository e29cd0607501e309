//! Conditional messages: split into antecedent and consequent, classify each
//! half, then assemble categories 8, 12 and 13.

use std::sync::OnceLock;

use regex::Regex;
use serde_json::Value;

use super::entities::identify_target_parameters;
use super::relation::{equality_relation, extract_relational_constraint, find_relop, typed_constant};
use super::text::quoted_literals;
use super::AnalyzerError;
use crate::model::{
    Constraint, ConstraintCategory, DataProperty, InputParameter, Operand, Operation, ParamId, RelOp,
    Relation, Selection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Or,
    One,
    AllOrNone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Presence(bool),
    Group(Group),
    Data,
}

fn leading_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"(?is)^\s*(?:if|when|whenever|in\s+case|once)\s+(.+?)(?:\s*,\s*then\s+|\s+then\s+|\s*,\s*|\s*:\s*)(.+?)[.!\s]*$")
            .unwrap()
    })
}

fn trailing_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"(?is)^\s*(.+?)\s*,?\s+(?:if|when|whenever)\s+(.+?)[.!\s]*$").unwrap())
}

/// `(antecedent, consequent)` of a conditional sentence.
pub fn split_conditional(message: &str) -> Option<(String, String)> {
    if let Some(c) = leading_re().captures(message) {
        return Some((c[1].trim().to_string(), c[2].trim().to_string()));
    }
    trailing_re().captures(message).map(|c| (c[2].trim().to_string(), c[1].trim().to_string()))
}

fn absence_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(concat!(
            r"\b(?:not\s+(?:be\s+)?(?:present|specified|provided|given|set|supplied|included|used|passed|sent)",
            r"|absent|omitted|missing|is\s+not\s+allowed|must\s+be\s+empty",
            r"|(?:cannot|can't|must\s+not|should\s+not)\s+be\s+(?:specified|provided|used|set|present|given|sent))\b"
        ))
        .unwrap()
    })
}

fn presence_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"\b(?:present|specified|provided|given|set|supplied|included|used|passed|sent|too|also|as\s+well|required|mandatory|defined)\b")
            .unwrap()
    })
}

fn group_of(lower: &str) -> Option<Group> {
    let any = |ps: &[&str]| ps.iter().any(|p| lower.contains(p));
    if any(&["only one", "exactly one", "not both", "mutually exclusive", "at most one"]) {
        Some(Group::One)
    } else if any(&["all of", "together", "along with", "specified with"]) {
        Some(Group::AllOrNone)
    } else if any(&["at least one", "either", "one of"]) {
        Some(Group::Or)
    } else {
        None
    }
}

fn is_data(text: &str, lower: &str) -> bool {
    !quoted_literals(text).is_empty()
        || lower.chars().any(|c| c.is_ascii_digit())
        || find_relop(lower).is_some()
        || bare_equality(lower)
}

fn bare_equality(lower: &str) -> bool {
    static R: OnceLock<Regex> = OnceLock::new();
    let re = R.get_or_init(|| Regex::new(r"\b(?:is|be|equals)\s+([a-z0-9_\-]+)").unwrap());
    const VOCAB: &[&str] = &[
        "a", "an", "the", "not", "present", "specified", "provided", "given", "set", "supplied",
        "included", "used", "passed", "sent", "too", "also", "required", "mandatory", "defined",
        "missing", "absent", "omitted", "empty", "allowed", "as",
    ];
    re.captures_iter(lower).any(|c| !VOCAB.contains(&&c[1]))
}

/// Kind of one half of a conditional sentence.
pub fn half_kind(text: &str) -> Option<Half> {
    let lower = text.to_ascii_lowercase();
    if let Some(g) = group_of(&lower) {
        return Some(Half::Group(g));
    }
    if is_data(text, &lower) {
        return Some(Half::Data);
    }
    if absence_re().is_match(&lower) {
        return Some(Half::Presence(false));
    }
    if presence_re().is_match(&lower) {
        return Some(Half::Presence(true));
    }
    None
}

/// Category of a conditional message, if it is one.
pub fn nested_category(message: &str) -> Option<ConstraintCategory> {
    let (ante, cons) = split_conditional(message)?;
    match (half_kind(&ante)?, half_kind(&cons)?) {
        (Half::Presence(_), Half::Presence(_)) => Some(ConstraintCategory::ConditionalParameterRequired),
        (Half::Data, Half::Group(_) | Half::Presence(_)) => Some(ConstraintCategory::DataInfluencedParamSelection),
        (Half::Presence(_) | Half::Group(_), Half::Data) => Some(ConstraintCategory::ParameterInfluencedDataValues),
        _ => None,
    }
}

fn candidates<'a>(op: &'a Operation, exclude: &[ParamId]) -> Vec<&'a InputParameter> {
    op.live_inputs().filter(|p| !exclude.contains(&p.id)).collect()
}

fn presence_param(text: &str, op: &Operation, exclude: &[ParamId]) -> Result<ParamId, AnalyzerError> {
    let found = identify_target_parameters(text, &candidates(op, exclude))?;
    Ok(found[0].clone())
}

fn data_half(text: &str, op: &Operation) -> Result<Relation, AnalyzerError> {
    let cands = candidates(op, &[]);
    let targets = identify_target_parameters(text, &cands)?;
    match extract_relational_constraint(text, &targets, op) {
        Ok(Constraint::DataArithmetic(r)) => return Ok(r),
        Ok(Constraint::DataNonArithmetic { param, property: DataProperty::Categorical, values }) => {
            return Ok(Relation::new(param, RelOp::Eq, list_or_single(values)));
        }
        _ => {}
    }
    let params: Vec<&InputParameter> = targets.iter().filter_map(|t| op.input(t)).collect();
    equality_relation(text, &params, true).ok_or_else(|| AnalyzerError::AmbiguousRelation(text.to_string()))
}

fn list_or_single(mut values: Vec<Value>) -> Operand {
    if values.len() == 1 {
        Operand::Const(values.remove(0))
    } else {
        Operand::List(values)
    }
}

fn mentions_rest(lower: &str) -> bool {
    ["other", "remaining", "rest of", "others"].iter().any(|w| lower.contains(w))
}

fn selection_half(text: &str, kind: Half, op: &Operation, exclude: &[ParamId]) -> Result<Selection, AnalyzerError> {
    match kind {
        Half::Presence(true) => Ok(Selection::Present { param: presence_param(text, op, exclude)? }),
        Half::Presence(false) => Ok(Selection::Absent { param: presence_param(text, op, exclude)? }),
        Half::Group(g) => {
            let lower = text.to_ascii_lowercase();
            let params: Vec<ParamId> = if mentions_rest(&lower) {
                candidates(op, exclude).into_iter().filter(|p| !p.is_required).map(|p| p.id.clone()).collect()
            } else {
                identify_target_parameters(text, &candidates(op, exclude))?
            };
            if params.len() < 2 {
                return Err(AnalyzerError::NoTargetFound(text.to_string()));
            }
            Ok(match g {
                Group::Or => Selection::Or { params },
                Group::One => Selection::One { params },
                Group::AllOrNone => Selection::AllOrNone { params },
            })
        }
        Half::Data => Err(AnalyzerError::AmbiguousRelation(text.to_string())),
    }
}

/// Assemble the nested constraint expressed by a conditional `message`.
pub fn split_nested_constraint(message: &str, op: &Operation) -> Result<Constraint, AnalyzerError> {
    let (ante, cons) =
        split_conditional(message).ok_or_else(|| AnalyzerError::NoConditionalMarker(message.to_string()))?;
    let no_marker = || AnalyzerError::NoConditionalMarker(message.to_string());
    let ak = half_kind(&ante).ok_or_else(no_marker)?;
    let ck = half_kind(&cons).ok_or_else(no_marker)?;
    match (ak, ck) {
        (Half::Presence(b2), Half::Presence(b1)) => {
            let p2 = presence_param(&ante, op, &[])?;
            let p1 = presence_param(&cons, op, std::slice::from_ref(&p2))?;
            Ok(Constraint::ConditionalParameterRequired { p1, p1_present: b1, p2, p2_present: b2 })
        }
        (Half::Data, Half::Group(_) | Half::Presence(_)) => {
            let antecedent = data_half(&ante, op)?;
            let exclude: Vec<ParamId> = antecedent.params().iter().map(|s| s.to_string()).collect();
            let consequent = selection_half(&cons, ck, op, &exclude)?;
            Ok(Constraint::DataInfluencedParamSelection { antecedent, consequent })
        }
        (Half::Presence(_) | Half::Group(_), Half::Data) => {
            let consequent = data_half(&cons, op)?;
            let exclude: Vec<ParamId> = consequent.params().iter().map(|s| s.to_string()).collect();
            let antecedent = selection_half(&ante, ak, op, &exclude)?;
            Ok(Constraint::ParameterInfluencedDataValues { antecedent, consequent })
        }
        _ => Err(no_marker()),
    }
}

/// Typed `param = value` helper used by the fixture catalog and tests.
pub fn equals(op: &Operation, param: &str, raw: &str) -> Option<Relation> {
    let p = op.input(param)?;
    Some(Relation::new(p.id.clone(), RelOp::Eq, Operand::Const(typed_constant(raw, p))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Location, Method, ParamType, ValueConstraints};
    use serde_json::json;

    fn op(params: &[(&str, bool)]) -> Operation {
        Operation {
            opname: "op".into(),
            path: "/x".into(),
            tag: vec![],
            method: Method::Post,
            inputs: params
                .iter()
                .map(|(n, req)| InputParameter {
                    id: format!("op.query.{n}"),
                    name: n.to_string(),
                    ptype: ParamType::String,
                    is_required: *req,
                    loc: Location::Query,
                    pc: ValueConstraints::default(),
                    examples: vec![],
                    locally_required: *req,
                    recursive: false,
                    body_root: false,
                    removed: false,
                })
                .collect(),
            outputs: vec![],
            local_constraints: vec![],
            request_media_type: None,
            produces_collection: false,
            needs_user_input: false,
        }
    }

    fn id(n: &str) -> String {
        format!("op.query.{n}")
    }

    #[test]
    fn splits() {
        assert_eq!(
            split_conditional("If type is 'audio', only one of the other two parameters is required"),
            Some(("type is 'audio'".into(), "only one of the other two parameters is required".into()))
        );
        assert_eq!(
            split_conditional("If longitude specified then latitude should be too"),
            Some(("longitude specified".into(), "latitude should be too".into()))
        );
        assert_eq!(
            split_conditional("latitude is required when longitude is present."),
            Some(("longitude is present".into(), "latitude is required".into()))
        );
        assert_eq!(split_conditional("Either city or zipcode is required, not both."), None);
    }

    #[test]
    fn conditional_presence() {
        let o = op(&[("longitude", false), ("latitude", false), ("placeId", false)]);
        let c = split_nested_constraint("If longitude specified then latitude should be too", &o).unwrap();
        assert_eq!(
            c,
            Constraint::ConditionalParameterRequired { p1: id("latitude"), p1_present: true, p2: id("longitude"), p2_present: true }
        );
    }

    #[test]
    fn data_influenced_selection() {
        let o = op(&[("type", true), ("url", false), ("file", false)]);
        let c = split_nested_constraint("If type is 'audio', only one of the other two parameters is required", &o).unwrap();
        assert_eq!(
            c,
            Constraint::DataInfluencedParamSelection {
                antecedent: Relation::new(id("type"), RelOp::Eq, Operand::Const(json!("audio"))),
                consequent: Selection::One { params: vec![id("url"), id("file")] },
            }
        );
    }

    #[test]
    fn parameter_influenced_data() {
        let o = op(&[("thumbnail", false), ("type", false), ("title", false)]);
        let c = split_nested_constraint("If thumbnail is present, type must be `link'.", &o).unwrap();
        assert_eq!(
            c,
            Constraint::ParameterInfluencedDataValues {
                antecedent: Selection::Present { param: id("thumbnail") },
                consequent: Relation::new(id("type"), RelOp::Eq, Operand::Const(json!("link"))),
            }
        );
    }

    #[test]
    fn no_marker() {
        let o = op(&[("a", false)]);
        assert!(matches!(split_nested_constraint("a is bad", &o), Err(AnalyzerError::NoConditionalMarker(_))));
    }
}
