use std::sync::OnceLock;

use regex::Regex;
use serde_json::Value;

use super::text::quoted_literals;

pub const EMAIL: &str = "⟨EMAIL⟩";
pub const UUID: &str = "⟨UUID⟩";
pub const STR: &str = "⟨STR⟩";
pub const NUM: &str = "⟨NUM⟩";

struct Patterns {
    tag: Regex,
    space: Regex,
    email: Regex,
    uuid: Regex,
    number: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| Patterns {
        tag: Regex::new(r"(?s)<[^<>]*>").unwrap(),
        space: Regex::new(r"\s+").unwrap(),
        email: Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}").unwrap(),
        uuid: Regex::new(
            r"\b[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}\b",
        )
        .unwrap(),
        number: Regex::new(r"\b\d+(?:\.\d+)?\b").unwrap(),
    })
}

fn looks_like_html(body: &str) -> bool {
    let t = body.trim_start().to_ascii_lowercase();
    t.starts_with("<!doctype") || t.starts_with("<html") || t.contains("</")
}

/// Strip markup and collapse whitespace.
pub fn plain_text(body: &str) -> String {
    let p = patterns();
    let stripped = if looks_like_html(body) {
        let no_head = Regex::new(r"(?is)<(script|style|head)[^>]*>.*?</(script|style|head)>")
            .unwrap()
            .replace_all(body, " ");
        p.tag.replace_all(&no_head, " ").into_owned()
    } else {
        body.to_string()
    };
    p.space.replace_all(stripped.trim(), " ").into_owned()
}

const MESSAGE_KEYS: &[&str] =
    &["message", "error_description", "detail", "error", "errors", "title", "description", "msg", "reason"];

fn collect_json_text(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) if !s.trim().is_empty() => out.push(s.trim().to_string()),
        Value::Array(items) => items.iter().for_each(|i| collect_json_text(i, out)),
        Value::Object(map) => {
            let before = out.len();
            for key in MESSAGE_KEYS {
                if let Some(inner) = map.get(*key) {
                    collect_json_text(inner, out);
                }
            }
            if out.len() == before {
                map.values().filter(|v| v.is_object() || v.is_array()).for_each(|i| collect_json_text(i, out));
            }
        }
        _ => {}
    }
}

/// Human-readable message carried by a response body: JSON message fields
/// when the body is JSON, tag-stripped text otherwise.
pub fn message_text(body: &str) -> String {
    if let Ok(v) = serde_json::from_str::<Value>(body) {
        let mut parts = Vec::new();
        collect_json_text(&v, &mut parts);
        let mut seen = Vec::new();
        for p in parts {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        if !seen.is_empty() {
            return plain_text(&seen.join(" "));
        }
        let empty = match &v {
            Value::Null => true,
            Value::Object(m) => m.is_empty(),
            Value::Array(a) => a.is_empty(),
            _ => false,
        };
        if empty {
            return String::new();
        }
        if !matches!(v, Value::String(_)) {
            return plain_text(body);
        }
    }
    plain_text(body)
}

/// Template of a message with literals masked. Idempotent.
pub fn normalize_message(message: &str) -> String {
    let p = patterns();
    let text = plain_text(message);
    let text = p.email.replace_all(&text, EMAIL);
    let text = p.uuid.replace_all(&text, UUID).into_owned();
    let mut masked = String::with_capacity(text.len());
    let mut last = 0;
    for q in quoted_literals(&text) {
        masked.push_str(&text[last..q.start]);
        masked.push_str(STR);
        last = q.end;
    }
    masked.push_str(&text[last..]);
    p.number.replace_all(&masked, NUM).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_literals() {
        assert_eq!(
            normalize_message("This email beulalingo@yahoo.com is already in use."),
            "This email ⟨EMAIL⟩ is already in use."
        );
        assert_eq!(normalize_message("Order Not Found"), "Order Not Found");
        assert_eq!(
            normalize_message("'PL' is not a valid gender. Supported values are 'Male' , 'Female', 'Other'."),
            "⟨STR⟩ is not a valid gender. Supported values are ⟨STR⟩ , ⟨STR⟩, ⟨STR⟩."
        );
        assert_eq!(
            normalize_message("Order 42 of 3f2504e0-4f89-11d3-9a0c-0305e82c3301 costs 1.5"),
            "Order ⟨NUM⟩ of ⟨UUID⟩ costs ⟨NUM⟩"
        );
        assert_eq!(normalize_message("playlist456 missing"), "playlist456 missing");
    }

    #[test]
    fn idempotent() {
        for m in [
            "This email beulalingo@yahoo.com is already in use.",
            "playlistNotFound: The playlist with the ID `playlist456' could not be found.",
            "<html><body><h1>Error 500</h1> at  foo(Bar.java:12)</body></html>",
            "value \"x\" and 'y' and 12 and -3.5",
        ] {
            let once = normalize_message(m);
            assert_eq!(normalize_message(&once), once);
        }
    }

    #[test]
    fn message_text_reads_json_and_html() {
        assert_eq!(message_text(r#"{"code":400,"message":"Order Not Found"}"#), "Order Not Found");
        assert_eq!(message_text(r#"{"errors":[{"msg":"a"},{"msg":"b"}]}"#), "a b");
        assert_eq!(message_text("<html><head><title>t</title></head><body><p>Bad   thing</p></body></html>"), "Bad thing");
        assert_eq!(message_text("  plain\n text "), "plain text");
        assert_eq!(message_text(""), "");
    }
}
