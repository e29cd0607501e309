use std::sync::OnceLock;

use regex::Regex;
use serde_json::{json, Value};

use super::entities::locate;
use super::rules::{is_unique_marker, CATEGORICAL_MARKERS};
use super::text::{number_word, quoted_literals};
use super::AnalyzerError;
use crate::model::{
    Constraint, DataProperty, InputParameter, Operand, Operation, ParamId, ParamType, RelOp, Relation,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RelopMatch {
    pub start: usize,
    pub end: usize,
    pub op: RelOp,
    /// Right operand fixed by the phrase itself ("must be positive", "5 or more").
    pub rhs: Option<String>,
}

struct Entry {
    re: Regex,
    op: RelOp,
    fixed: Option<&'static str>,
}

const LEXICON: &[(&str, RelOp)] = &[
    ("cannot be less than", RelOp::Ge),
    ("can't be less than", RelOp::Ge),
    ("can not be less than", RelOp::Ge),
    ("must not be less than", RelOp::Ge),
    ("should not be less than", RelOp::Ge),
    ("may not be less than", RelOp::Ge),
    ("cannot be smaller than", RelOp::Ge),
    ("cannot be lower than", RelOp::Ge),
    ("cannot be before", RelOp::Ge),
    ("must not be before", RelOp::Ge),
    ("cannot be earlier than", RelOp::Ge),
    ("no less than", RelOp::Ge),
    ("not less than", RelOp::Ge),
    ("no earlier than", RelOp::Ge),
    ("greater than or equal to", RelOp::Ge),
    ("greater than or equal", RelOp::Ge),
    ("greater or equal to", RelOp::Ge),
    ("more than or equal to", RelOp::Ge),
    ("at least", RelOp::Ge),
    ("minimum of", RelOp::Ge),
    ("cannot be greater than", RelOp::Le),
    ("can't be greater than", RelOp::Le),
    ("must not be greater than", RelOp::Le),
    ("should not be greater than", RelOp::Le),
    ("cannot be more than", RelOp::Le),
    ("must not be more than", RelOp::Le),
    ("cannot be larger than", RelOp::Le),
    ("cannot be higher than", RelOp::Le),
    ("cannot be after", RelOp::Le),
    ("must not be after", RelOp::Le),
    ("cannot be later than", RelOp::Le),
    ("cannot exceed", RelOp::Le),
    ("can't exceed", RelOp::Le),
    ("can not exceed", RelOp::Le),
    ("must not exceed", RelOp::Le),
    ("should not exceed", RelOp::Le),
    ("may not exceed", RelOp::Le),
    ("no more than", RelOp::Le),
    ("not more than", RelOp::Le),
    ("not greater than", RelOp::Le),
    ("no later than", RelOp::Le),
    ("less than or equal to", RelOp::Le),
    ("less than or equal", RelOp::Le),
    ("less or equal to", RelOp::Le),
    ("at most", RelOp::Le),
    ("maximum of", RelOp::Le),
    ("up to", RelOp::Le),
    ("greater than", RelOp::Gt),
    ("more than", RelOp::Gt),
    ("larger than", RelOp::Gt),
    ("higher than", RelOp::Gt),
    ("bigger than", RelOp::Gt),
    ("later than", RelOp::Gt),
    ("after", RelOp::Gt),
    ("surpass", RelOp::Gt),
    ("exceed", RelOp::Gt),
    ("above", RelOp::Gt),
    ("greater", RelOp::Gt),
    ("less than", RelOp::Lt),
    ("fewer than", RelOp::Lt),
    ("smaller than", RelOp::Lt),
    ("lower than", RelOp::Lt),
    ("earlier than", RelOp::Lt),
    ("before", RelOp::Lt),
    ("below", RelOp::Lt),
    ("cannot be equal to", RelOp::Ne),
    ("must not be equal to", RelOp::Ne),
    ("cannot be the same as", RelOp::Ne),
    ("must not be the same as", RelOp::Ne),
    ("must be different from", RelOp::Ne),
    ("must differ from", RelOp::Ne),
    ("different from", RelOp::Ne),
    ("not equal to", RelOp::Ne),
    ("must not equal", RelOp::Ne),
    ("must be equal to", RelOp::Eq),
    ("should be equal to", RelOp::Eq),
    ("equal to", RelOp::Eq),
    ("must equal", RelOp::Eq),
    ("should equal", RelOp::Eq),
    ("same as", RelOp::Eq),
    ("equals", RelOp::Eq),
];

const SIGNS: &[(&str, RelOp, &str)] = &[
    (r"(?:must|should)\s+be\s+(?:a\s+)?positive", RelOp::Gt, "0"),
    (r"(?:must|should)\s+be\s+(?:a\s+)?negative", RelOp::Lt, "0"),
    (r"(?:cannot|can't|can\s+not|must\s+not|should\s+not)\s+be\s+negative", RelOp::Ge, "0"),
    (r"non-?negative", RelOp::Ge, "0"),
    (r"(?:cannot|can't|must\s+not)\s+be\s+zero", RelOp::Ne, "0"),
];

fn lexicon() -> &'static [Entry] {
    static L: OnceLock<Vec<Entry>> = OnceLock::new();
    L.get_or_init(|| {
        let mut out: Vec<Entry> = SIGNS
            .iter()
            .map(|(p, op, v)| Entry { re: Regex::new(&format!(r"\b{p}\b")).unwrap(), op: *op, fixed: Some(v) })
            .collect();
        for (phrase, op) in LEXICON {
            let body: Vec<String> = phrase.split(' ').map(regex::escape).collect();
            let pattern = format!(r"\b{}(?:s|es|ed|ing)?\b", body.join(r"\s+"));
            out.push(Entry { re: Regex::new(&pattern).unwrap(), op: *op, fixed: None });
        }
        out
    })
}

fn or_more_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"(-?\d+(?:\.\d+)?)\s+or\s+(more|greater|higher|above|larger|less|fewer|lower|below|smaller)\b").unwrap()
    })
}

/// Earliest relational phrase in lowercase `text`; the longest wins at equal offsets.
pub fn find_relop(text: &str) -> Option<RelopMatch> {
    let mut best: Option<RelopMatch> = None;
    let mut consider = |m: RelopMatch| {
        let better = match &best {
            None => true,
            Some(b) => m.start < b.start || (m.start == b.start && m.end > b.end),
        };
        if better {
            best = Some(m);
        }
    };
    for e in lexicon() {
        if let Some(m) = e.re.find(text) {
            consider(RelopMatch { start: m.start(), end: m.end(), op: e.op, rhs: e.fixed.map(str::to_string) });
        }
    }
    if let Some(c) = or_more_re().captures(text) {
        let whole = c.get(0).unwrap();
        let op = match &c[2] {
            "more" | "greater" | "higher" | "above" | "larger" => RelOp::Ge,
            _ => RelOp::Le,
        };
        consider(RelopMatch { start: whole.start(), end: whole.end(), op, rhs: Some(c[1].to_string()) });
    }
    best
}

fn number_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"(?i)-?\b\d+(?:\.\d+)?\b|\b[a-z]+\b").unwrap())
}

fn date_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"\b\d{4}-\d{2}-\d{2}(?:[T ][0-9:.]+(?:Z|[+-]\d{2}:?\d{2})?)?").unwrap())
}

/// First constant after byte offset `from`: quoted literal, date, number or number word.
fn constant_after(text: &str, from: usize) -> Option<(usize, String)> {
    let rest = &text[from..];
    let quoted = quoted_literals(rest).into_iter().next().map(|q| (q.start, q.inner));
    let date = date_re().find(rest).map(|m| (m.start(), m.as_str().to_string()));
    let number = number_re().find_iter(rest).find_map(|m| {
        let s = m.as_str();
        if s.parse::<f64>().is_ok() {
            Some((m.start(), s.to_string()))
        } else {
            number_word(s).map(|n| (m.start(), n.to_string()))
        }
    });
    [quoted, date, number].into_iter().flatten().min_by_key(|(i, _)| *i).map(|(i, s)| (from + i, s))
}

/// Typed constant for comparison with parameter `p`.
pub fn typed_constant(raw: &str, p: &InputParameter) -> Value {
    let trimmed = raw.trim();
    match &p.ptype {
        ParamType::Integer => trimmed
            .parse::<i64>()
            .map(Value::from)
            .or_else(|_| trimmed.parse::<f64>().map(|f| json!(f)))
            .unwrap_or_else(|_| Value::String(trimmed.into())),
        ParamType::Number => trimmed.parse::<f64>().map(|f| json!(f)).unwrap_or_else(|_| Value::String(trimmed.into())),
        ParamType::Boolean => match trimmed.to_ascii_lowercase().as_str() {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => Value::String(trimmed.into()),
        },
        _ => Value::String(trimmed.into()),
    }
}

const NOT_VALUES: &[&str] = &[
    "a", "an", "the", "not", "present", "specified", "provided", "given", "set", "supplied",
    "included", "used", "passed", "sent", "too", "also", "required", "mandatory", "defined",
    "missing", "absent", "omitted", "empty", "null", "blank", "valid", "invalid", "one", "unique",
    "greater", "less", "more", "equal", "different", "same", "positive", "negative", "at",
    "before", "after", "either", "both", "provide", "specify", "in", "of", "used",
];

fn equality_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"\b(?:must|should|has\s+to|needs\s+to|shall)\s+be\s+|\b(?:is|equals)\s+").unwrap()
    })
}

fn bare_word_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^([A-Za-z0-9_\-]+)").unwrap())
}

/// `X must be 'v'` / `X is v` equality with a literal.
fn equality(text: &str, lower: &str, bare: bool) -> Option<(usize, String)> {
    for m in equality_re().find_iter(lower) {
        let rest = &text[m.end()..];
        if let Some(q) = quoted_literals(rest).into_iter().next().filter(|q| q.start == 0) {
            return Some((m.start(), q.inner));
        }
        if !bare {
            continue;
        }
        if let Some(c) = bare_word_re().captures(rest) {
            let w = c[1].to_string();
            if !NOT_VALUES.contains(&w.to_ascii_lowercase().as_str()) {
                return Some((m.start(), w));
            }
        }
    }
    None
}

const FORMATS: &[(&str, &str)] = &[
    ("e-mail", "email"),
    ("email", "email"),
    ("date-time", "date-time"),
    ("datetime", "date-time"),
    ("timestamp", "date-time"),
    ("date", "date"),
    ("uuid", "uuid"),
    ("url", "uri"),
    ("uri", "uri"),
    ("ipv4", "ipv4"),
    ("ipv6", "ipv6"),
    ("ip address", "ipv4"),
    ("phone number", "phone"),
    ("hostname", "hostname"),
    ("integer", "integer"),
    ("number", "number"),
    ("boolean", "boolean"),
];

fn format_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        let names: Vec<String> = FORMATS.iter().map(|(n, _)| regex::escape(n)).collect();
        let alt = names.join("|");
        Regex::new(&format!(
            r"(?:valid|invalid|malformed|wrong|bad)\s+(?:an?\s+)?({alt})\b|\b({alt})\s+format\b|must\s+be\s+an?\s+({alt})\b"
        ))
        .unwrap()
    })
}

fn categorical_values(text: &str, lower: &str) -> Option<Vec<Value>> {
    let (_, end) = CATEGORICAL_MARKERS
        .iter()
        .filter_map(|m| lower.find(m).map(|i| (i, i + m.len())))
        .min()?;
    let rest = &text[end..];
    let quoted: Vec<Value> = quoted_literals(rest).into_iter().map(|q| Value::String(q.inner)).collect();
    if !quoted.is_empty() {
        return Some(quoted);
    }
    let sentence_end = rest.find(". ").unwrap_or(rest.len());
    let mut list = rest[..sentence_end].trim().trim_end_matches('.').trim();
    for lead in ["are:", "are", "is:", "is", "include:", "include", ":"] {
        if let Some(stripped) = list.strip_prefix(lead) {
            list = stripped.trim();
            break;
        }
    }
    let list = list.trim_start_matches(['[', '(', '{']).trim_end_matches([']', ')', '}']);
    let values: Vec<Value> = list
        .replace(" or ", ",")
        .replace(" and ", ",")
        .split([',', ';', '|', '/'])
        .map(|s| s.trim().trim_matches(['"', '\'', '`']).trim())
        .filter(|s| !s.is_empty() && !s.contains(' '))
        .map(|s| Value::String(s.to_string()))
        .collect();
    (!values.is_empty()).then_some(values)
}

fn offending_literals(text: &str) -> Vec<Value> {
    static EMAIL: OnceLock<Regex> = OnceLock::new();
    let email = EMAIL.get_or_init(|| Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap());
    let mut out: Vec<Value> = quoted_literals(text).into_iter().map(|q| Value::String(q.inner)).collect();
    out.extend(email.find_iter(text).map(|m| Value::String(m.as_str().to_string())));
    out.dedup();
    out
}

/// Data constraint expressed by `message` over `targets` (ids of `op` inputs).
pub fn extract_relational_constraint(
    message: &str,
    targets: &[ParamId],
    op: &Operation,
) -> Result<Constraint, AnalyzerError> {
    let params: Vec<&InputParameter> = targets.iter().filter_map(|t| op.input(t)).filter(|p| p.is_live()).collect();
    let first = *params.first().ok_or_else(|| AnalyzerError::NoTargetFound(message.to_string()))?;
    let lower = message.to_ascii_lowercase();

    if is_unique_marker(message) {
        return Ok(Constraint::DataNonArithmetic {
            param: first.id.clone(),
            property: DataProperty::Unique,
            values: offending_literals(message),
        });
    }
    if let Some(values) = categorical_values(message, &lower) {
        return Ok(Constraint::DataNonArithmetic { param: first.id.clone(), property: DataProperty::Categorical, values });
    }
    if let Some(m) = find_relop(&lower) {
        return arithmetic(message, &m, &params).map(Constraint::DataArithmetic);
    }
    if let Some(c) = format_re().captures(&lower) {
        let word = c.get(1).or(c.get(2)).or(c.get(3)).unwrap().as_str();
        let canonical = FORMATS.iter().find(|(n, _)| *n == word).map(|(_, f)| *f).unwrap_or(word);
        return Ok(Constraint::DataNonArithmetic {
            param: first.id.clone(),
            property: DataProperty::Format,
            values: vec![Value::String(canonical.into())],
        });
    }
    if let Some(rel) = equality_relation(message, &params, false) {
        return Ok(Constraint::DataArithmetic(rel));
    }
    Err(AnalyzerError::AmbiguousRelation(message.to_string()))
}

/// `X must be 'v'` as `X = v`, the subject being the target nearest before
/// the verb. Unquoted values are accepted only when `bare` is set.
pub fn equality_relation(message: &str, params: &[&InputParameter], bare: bool) -> Option<Relation> {
    let lower = message.to_ascii_lowercase();
    let (at, raw) = equality(message, &lower, bare)?;
    let located = located_params(message, params);
    let lhs = located.iter().rfind(|(i, _)| *i < at).map(|(_, p)| *p).or_else(|| {
        (params.len() == 1).then_some(params[0])
    })?;
    Some(Relation::new(lhs.id.clone(), RelOp::Eq, Operand::Const(typed_constant(&raw, lhs))))
}

fn located_params<'a>(message: &str, params: &[&'a InputParameter]) -> Vec<(usize, &'a InputParameter)> {
    let mut located: Vec<(usize, &InputParameter)> =
        params.iter().filter_map(|p| locate(message, p).map(|i| (i, *p))).collect();
    located.sort_by_key(|(i, p)| (*i, p.id.clone()));
    located
}

fn arithmetic(message: &str, m: &RelopMatch, params: &[&InputParameter]) -> Result<Relation, AnalyzerError> {
    let ambiguous = || AnalyzerError::AmbiguousRelation(message.to_string());
    let located = located_params(message, params);
    let before = located.iter().rfind(|(i, _)| *i < m.start).map(|(_, p)| *p);
    let after = located.iter().find(|(i, _)| *i >= m.end).map(|(i, p)| (*i, *p));

    let lhs = match before {
        Some(p) => p,
        None if located.len() == 1 && m.rhs.is_some() => located[0].1,
        None if params.len() == 1 && after.is_none() => params[0],
        None => return Err(ambiguous()),
    };
    if let Some(raw) = &m.rhs {
        return Ok(Relation::new(lhs.id.clone(), m.op, Operand::Const(typed_constant(raw, lhs))));
    }
    let constant = constant_after(message, m.end);
    let rhs_param = after.filter(|(_, p)| p.id != lhs.id);
    let rhs = match (rhs_param, constant) {
        (Some((pi, p)), Some((ci, _))) if pi <= ci => Operand::Param(p.id.clone()),
        (_, Some((_, raw))) => Operand::Const(typed_constant(&raw, lhs)),
        (Some((_, p)), None) => Operand::Param(p.id.clone()),
        (None, None) => return Err(ambiguous()),
    };
    Ok(Relation::new(lhs.id.clone(), m.op, rhs))
}
