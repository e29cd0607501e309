//! Tokenization helpers shared by the rule-based analyzer.

/// A quoted literal found in a message: byte range including quotes, and the
/// inner text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quoted {
    pub start: usize,
    pub end: usize,
    pub inner: String,
}

fn closing_for(open: char) -> &'static [char] {
    match open {
        '\'' => &['\''],
        '"' => &['"'],
        '`' => &['`', '\''],
        '‘' => &['’', '\''],
        '“' => &['”', '"'],
        _ => &[],
    }
}

/// Quoted literals. An opening quote must not follow an alphanumeric
/// character and a closing quote must not precede one, so apostrophes in
/// words such as "can't" are left alone.
pub fn quoted_literals(text: &str) -> Vec<Quoted> {
    // Mask brackets count as word characters so masking stays idempotent.
    let wordy = |c: char| c.is_alphanumeric() || c == '⟨' || c == '⟩';
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let closers = closing_for(c);
        let prev_ok = i == 0 || !wordy(chars[i - 1].1);
        if closers.is_empty() || !prev_ok {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        let mut found = None;
        while j < chars.len() && chars[j].1 != '\n' {
            let next_ok = j + 1 >= chars.len() || !wordy(chars[j + 1].1);
            if closers.contains(&chars[j].1) && next_ok {
                found = Some(j);
                break;
            }
            j += 1;
        }
        match found {
            Some(j) => {
                let end = chars[j].0 + chars[j].1.len_utf8();
                let inner = text[chars[i].0 + c.len_utf8()..chars[j].0].to_string();
                out.push(Quoted { start, end, inner });
                i = j + 1;
            }
            None => i += 1,
        }
    }
    out
}

/// Split an identifier into lowercase words: `afterTimestamp` → `after`,
/// `timestamp`; `HTTPServer_id` → `http`, `server`, `id`.
pub fn split_identifier(s: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = s.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let boundary = if cur.is_empty() {
            false
        } else {
            let prev = chars[i - 1];
            let next = chars.get(i + 1).copied();
            (c.is_uppercase() && prev.is_lowercase())
                || (c.is_uppercase() && prev.is_uppercase() && next.is_some_and(|n| n.is_lowercase()))
                || (c.is_ascii_digit() != prev.is_ascii_digit())
        };
        if boundary {
            words.push(std::mem::take(&mut cur));
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// Crude English singular form.
pub fn singular(word: &str) -> String {
    let w = word.to_lowercase();
    if w.len() > 4 && w.ends_with("ies") {
        return format!("{}y", &w[..w.len() - 3]);
    }
    if w.len() > 4 && (w.ends_with("sses") || w.ends_with("xes") || w.ends_with("ches") || w.ends_with("shes")) {
        return w[..w.len() - 2].to_string();
    }
    if w.len() > 3 && w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
        return w[..w.len() - 1].to_string();
    }
    w
}

/// Lowercase word tokens of free text, identifiers split.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric() && c != '_')
        .filter(|t| !t.is_empty())
        .flat_map(split_identifier)
        .collect()
}

/// Raw tokens (identifier-like runs) with byte offsets.
pub fn raw_tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        let part = c.is_alphanumeric() || c == '_' || c == '-' || c == '.';
        match (part, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, text[s..i].trim_end_matches(['.', '-'])));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, text[s..].trim_end_matches(['.', '-'])));
    }
    out.retain(|(_, t)| !t.is_empty());
    out
}

/// Lowercase with `_`/`-` removed.
pub fn fold(s: &str) -> String {
    s.chars().filter(|c| *c != '_' && *c != '-').flat_map(char::to_lowercase).collect()
}

pub const STOPWORDS: &[&str] = &[
    "the", "a", "an", "is", "are", "be", "been", "was", "were", "must", "should", "of", "or", "and",
    "not", "in", "to", "for", "with", "this", "that", "it", "on", "at", "by", "as", "can", "cannot",
    "value", "values", "parameter", "parameters", "param", "field", "fields", "required", "valid",
    "invalid", "please", "only", "one", "either", "both", "if", "then", "when", "also", "too", "no",
    "has", "have", "given", "provided", "specified", "request", "error", "your", "you", "t",
];

/// Words that say nothing about which parameter is meant.
const GENERIC_PARAM_WORDS: &[&str] = &["id", "ids", "key", "no", "num", "val"];

pub(crate) fn words_match(param_word: &str, message_word: &str) -> bool {
    param_word == message_word
        || (param_word.len() >= 3 && message_word.starts_with(param_word))
        || (message_word.len() >= 5 && param_word.starts_with(message_word))
}

/// Fraction of the parameter's significant words found in the message.
pub fn name_similarity(param_name: &str, message_words: &[String]) -> f64 {
    let all: Vec<String> = split_identifier(param_name).iter().map(|w| singular(w)).collect();
    let significant: Vec<&String> =
        all.iter().filter(|w| !GENERIC_PARAM_WORDS.contains(&w.as_str())).collect();
    let considered: Vec<&String> = if significant.is_empty() { all.iter().collect() } else { significant };
    if considered.is_empty() {
        return 0.0;
    }
    let message: Vec<String> = message_words
        .iter()
        .filter(|w| !STOPWORDS.contains(&w.as_str()))
        .map(|w| singular(w))
        .collect();
    let hits = considered.iter().filter(|pw| message.iter().any(|mw| words_match(pw, mw))).count();
    hits as f64 / considered.len() as f64
}

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty",
];

pub fn number_word(w: &str) -> Option<i64> {
    NUMBER_WORDS.iter().position(|n| n.eq_ignore_ascii_case(w)).map(|i| i as i64)
}
