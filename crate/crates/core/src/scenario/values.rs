//! Value providers: a deterministic realistic generator and an adapter for
//! the external inference service.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::analyzer::text::split_identifier;
use crate::analyzer::InferenceService;
use crate::model::{InputParameter, Operation, ParamId, ParamType};

pub trait ValueProvider: Send + Sync {
    fn name(&self) -> &str;

    /// Up to `count` rows of values; parameters missing from a row fall
    /// through to the next source.
    fn provide(
        &self,
        op: &Operation,
        params: &[&InputParameter],
        constraints: &[String],
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<BTreeMap<ParamId, Value>>;
}

const FIRST_NAMES: &[&str] = &["Alice", "Bruno", "Chen", "Dana", "Emeka", "Farah", "Goran", "Hana"];
const LAST_NAMES: &[&str] = &["Smith", "Okafor", "Larsen", "Nakamura", "Silva", "Novak", "Haddad"];
const CITIES: &[&str] = &["Berlin", "Lagos", "Toronto", "Osaka", "Lima", "Lyon", "Austin"];
const COUNTRIES: &[&str] = &["Germany", "Nigeria", "Canada", "Japan", "Peru", "France"];
const STREETS: &[&str] = &["12 Elm Street", "5 Harbour Road", "88 King Avenue", "301 Lake Drive"];
const WORDS: &[&str] = &["alpha", "river", "maple", "copper", "signal", "harbor", "quartz", "meadow"];
const COLORS: &[&str] = &["red", "green", "blue", "black", "white"];
const CURRENCIES: &[&str] = &["USD", "EUR", "GBP", "JPY"];
const SENTENCES: &[&str] = &[
    "The quick brown fox jumps over the lazy dog.",
    "Please deliver before noon.",
    "A short note for testing.",
];

pub(crate) fn email(rng: &mut ChaCha8Rng) -> String {
    let first = FIRST_NAMES.choose(rng).unwrap().to_lowercase();
    let last = LAST_NAMES.choose(rng).unwrap().to_lowercase();
    format!("{first}.{last}{}@example.com", rng.gen_range(1..100_000))
}

pub(crate) fn uuid(rng: &mut ChaCha8Rng) -> String {
    let b: [u8; 16] = rng.gen();
    let h: String = b.iter().map(|x| format!("{x:02x}")).collect();
    format!("{}-{}-4{}-a{}-{}", &h[0..8], &h[8..12], &h[13..16], &h[17..20], &h[20..32])
}

pub(crate) fn random_datetime(rng: &mut ChaCha8Rng) -> String {
    let secs = rng.gen_range(1_577_836_800i64..1_735_689_600);
    format_datetime(secs)
}

pub(crate) fn format_datetime(secs: i64) -> String {
    DateTime::from_timestamp(secs, 0).unwrap_or_default().format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub(crate) fn format_date(days: i64) -> String {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
    (epoch + Duration::days(days)).format("%Y-%m-%d").to_string()
}

pub(crate) fn by_format(format: &str, rng: &mut ChaCha8Rng) -> Option<Value> {
    let s = match format {
        "email" => email(rng),
        "date-time" => random_datetime(rng),
        "date" => format_date(rng.gen_range(18_262..20_089)),
        "uuid" => uuid(rng),
        "ipv4" => format!("192.168.{}.{}", rng.gen_range(0..255), rng.gen_range(1..255)),
        "ipv6" => format!("2001:db8::{:x}", rng.gen_range(1..0xffff)),
        "uri" | "url" => format!("https://example.com/{}/{}", WORDS.choose(rng).unwrap(), rng.gen_range(1..1000)),
        "hostname" => format!("{}.example.com", WORDS.choose(rng).unwrap()),
        "phone" => format!("+1-555-01{:02}", rng.gen_range(0..100)),
        "password" => format!("S3cure!{}", rng.gen_range(1000..9999)),
        "byte" => "aGVsbG8=".to_string(),
        _ => return None,
    };
    Some(Value::String(s))
}

fn pick(list: &[&str], rng: &mut ChaCha8Rng) -> Value {
    Value::String(list.choose(rng).unwrap().to_string())
}

/// Name-keyed string values, matched on identifier words.
fn by_name(leaf: &str, rng: &mut ChaCha8Rng) -> Option<Value> {
    let w = split_identifier(leaf);
    let has = |ks: &[&str]| w.iter().any(|x| ks.contains(&x.as_str()));
    let v = if has(&["email", "mail"]) {
        Value::String(email(rng))
    } else if has(&["firstname", "given"]) || has(&["first"]) && has(&["name"]) {
        pick(FIRST_NAMES, rng)
    } else if has(&["lastname", "surname", "family"]) || has(&["last"]) && has(&["name"]) {
        pick(LAST_NAMES, rng)
    } else if has(&["username", "login"]) || has(&["user"]) && has(&["name"]) {
        Value::String(format!("{}{}", FIRST_NAMES.choose(rng).unwrap().to_lowercase(), rng.gen_range(1..1000)))
    } else if has(&["password", "pwd", "passwd"]) {
        by_format("password", rng)?
    } else if has(&["phone", "mobile", "tel", "telephone"]) {
        by_format("phone", rng)?
    } else if has(&["city", "town"]) {
        pick(CITIES, rng)
    } else if has(&["country"]) {
        pick(COUNTRIES, rng)
    } else if has(&["zip", "zipcode", "postcode", "postal", "pincode"]) {
        Value::String(format!("{:05}", rng.gen_range(10_000..99_999)))
    } else if has(&["street", "address"]) {
        pick(STREETS, rng)
    } else if has(&["url", "uri", "link", "website", "homepage", "href"]) {
        by_format("uri", rng)?
    } else if has(&["timestamp", "datetime", "time"]) || w.len() > 1 && w.last().is_some_and(|x| x == "at") {
        Value::String(random_datetime(rng))
    } else if has(&["date", "birthday", "dob"]) {
        by_format("date", rng)?
    } else if has(&["uuid", "guid"]) {
        Value::String(uuid(rng))
    } else if has(&["ip", "ipv4"]) {
        by_format("ipv4", rng)?
    } else if has(&["color", "colour"]) {
        pick(COLORS, rng)
    } else if has(&["currency"]) {
        pick(CURRENCIES, rng)
    } else if has(&["description", "comment", "note", "notes", "message", "text", "body", "content"]) {
        pick(SENTENCES, rng)
    } else if has(&["title", "subject"]) {
        Value::String(format!("{} {}", WORDS.choose(rng).unwrap(), WORDS.choose(rng).unwrap()))
    } else if has(&["name"]) {
        pick(FIRST_NAMES, rng)
    } else if has(&["tag", "tags", "category", "keyword"]) {
        pick(WORDS, rng)
    } else {
        return None;
    };
    Some(v)
}

fn bounded_number(p: &InputParameter, rng: &mut ChaCha8Rng, integer: bool) -> Value {
    let leaf = p.leaf_name().to_ascii_lowercase();
    let (mut lo, mut hi): (f64, f64) = if leaf == "lat" || leaf.contains("latitude") {
        (-90.0, 90.0)
    } else if ["lon", "lng"].contains(&leaf.as_str()) || leaf.contains("longitude") {
        (-180.0, 180.0)
    } else if p.is_identifier_like() {
        (1.0, 100.0)
    } else {
        (0.0, 1000.0)
    };
    if let Some(min) = p.pc.minimum {
        lo = if p.pc.exclusive_minimum { min + 1.0 } else { min };
        hi = hi.max(lo + 1000.0);
    }
    if let Some(max) = p.pc.maximum {
        hi = if p.pc.exclusive_maximum { max - 1.0 } else { max };
        lo = lo.min(hi - 1000.0).max(p.pc.minimum.unwrap_or(f64::MIN));
    }
    if hi < lo {
        hi = lo;
    }
    if integer {
        json!(rng.gen_range(lo.ceil() as i64..=hi.floor().max(lo.ceil()) as i64))
    } else {
        let x: f64 = rng.gen_range(lo..=hi);
        json!((x * 100.0).round() / 100.0)
    }
}

/// Deterministic generator keyed on enumeration, format, name and type.
/// Plain strings it has no dictionary for are left to the random source.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealisticValues;

impl RealisticValues {
    pub fn value(&self, p: &InputParameter, rng: &mut ChaCha8Rng) -> Option<Value> {
        if !p.pc.enumeration.is_empty() {
            return p.pc.enumeration.choose(rng).cloned();
        }
        scalar(&p.ptype, p, rng)
    }
}

fn scalar(t: &ParamType, p: &InputParameter, rng: &mut ChaCha8Rng) -> Option<Value> {
    match t {
        ParamType::Integer => Some(bounded_number(p, rng, true)),
        ParamType::Number => Some(bounded_number(p, rng, false)),
        ParamType::Boolean => Some(Value::Bool(rng.gen())),
        ParamType::String => p
            .pc
            .format
            .as_deref()
            .and_then(|f| by_format(f, rng))
            .or_else(|| by_name(p.leaf_name(), rng)),
        ParamType::Array(inner) => scalar(inner, p, rng).map(|v| Value::Array(vec![v])),
        ParamType::Schema(_) => None,
    }
}

impl ValueProvider for RealisticValues {
    fn name(&self) -> &str {
        "realistic"
    }

    fn provide(
        &self,
        _op: &Operation,
        params: &[&InputParameter],
        _constraints: &[String],
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<BTreeMap<ParamId, Value>> {
        (0..count)
            .map(|_| params.iter().filter_map(|p| self.value(p, rng).map(|v| (p.id.clone(), v))).collect())
            .collect()
    }
}

/// Random values of the right shape; the last resort before the solver.
pub fn random_value(p: &InputParameter, rng: &mut ChaCha8Rng) -> Value {
    fn of(t: &ParamType, p: &InputParameter, rng: &mut ChaCha8Rng) -> Value {
        match t {
            ParamType::String => {
                let min = p.pc.min_length.unwrap_or(1).max(1);
                let max = p.pc.max_length.unwrap_or(12).max(min);
                let len = rng.gen_range(min..=max.min(min.max(8)));
                let s: String =
                    (0..len).map(|_| *b"abcdefghijklmnopqrstuvwxyz0123456789".choose(rng).unwrap() as char).collect();
                Value::String(s)
            }
            ParamType::Array(inner) => Value::Array(vec![of(inner, p, rng)]),
            ParamType::Schema(_) => json!({}),
            other => scalar(other, p, rng).unwrap_or(Value::Null),
        }
    }
    of(&p.ptype, p, rng)
}

/// Values from the inference service's `generate_values` task.
pub struct InferenceValues {
    service: InferenceService,
}

impl InferenceValues {
    pub fn new(service: InferenceService) -> Self {
        InferenceValues { service }
    }
}

impl ValueProvider for InferenceValues {
    fn name(&self) -> &str {
        "inference-service"
    }

    fn provide(
        &self,
        _op: &Operation,
        params: &[&InputParameter],
        constraints: &[String],
        count: usize,
        _rng: &mut ChaCha8Rng,
    ) -> Vec<BTreeMap<ParamId, Value>> {
        let described: Vec<Value> = params
            .iter()
            .map(|p| json!({"id": p.id, "name": p.name, "type": format!("{:?}", p.ptype), "format": p.pc.format}))
            .collect();
        match self.service.generate_values(Value::Array(described), constraints, count) {
            Ok(rows) => rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .filter_map(|(k, v)| {
                            params.iter().find(|p| p.id == k || p.name == k).map(|p| (p.id.clone(), v))
                        })
                        .collect()
                })
                .collect(),
            Err(e) => {
                log::warn!("value generation service unavailable: {e}");
                Vec::new()
            }
        }
    }
}
