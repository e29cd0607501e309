//! Deterministic message classification.

use std::sync::OnceLock;

use regex::Regex;

use super::nested;
use super::relation::find_relop;
use crate::model::ConstraintCategory;

const AUTH: &[&str] = &[
    "api key", "apikey", "api_key", "api-key", "access token", "unauthorized", "unauthorised",
    "authentication", "not authenticated", "credentials", "forbidden", "invalid token",
    "token expired", "token has expired", "permission denied", "not authorized", "not authorised",
    "bearer token", "login required", "access denied",
];

const UNSUPPORTED: &[&str] = &[
    "method not allowed", "unsupported operation", "operation not supported", "not implemented",
    "no longer supported", "endpoint is deprecated", "operation is not available",
    "endpoint does not exist", "unsupported method",
];

const ONE: &[&str] = &[
    "not both", "only one of", "exactly one", "mutually exclusive", "cannot be used together",
    "can not be used together", "cannot both", "can't both", "one and only one",
    "cannot be combined", "can't be combined", "cannot be specified together",
    "not allowed together", "at most one of", "only one parameter", "but not both",
    "cannot be provided together", "cannot be supplied together",
];

const ALL_OR_NONE: &[&str] = &[
    "specified with", "specified together", "provided together", "all or none",
    "together with", "along with", "required together", "used together", "given together",
    "require each other", "requires all of", "all of them",
];

const OR: &[&str] = &[
    "either", "at least one of", "at least one parameter", "one of the following",
    "must specify one of", "must provide one of", "one of these",
];

const NOT_FOUND: &[&str] = &[
    "not found", "notfound", "could not be found", "cannot be found", "can't be found",
    "does not exist", "doesn't exist", "do not exist", "no such", "not exist", "unknown id",
];

const NON_ARITH_STRONG: &[&str] = &[
    "already in use", "already exists", "already exist", "already taken", "already registered",
    "already been taken", "must be unique", "not unique", "duplicate", "supported values",
    "allowed values", "valid values", "possible values", "accepted values", "permitted values",
    "valid options", "must be one of", "should be one of", "is not one of", "expected one of",
    "one of the following values",
];

const NON_ARITH_WEAK: &[&str] = &[
    "not a valid", "is invalid", "invalid value", "invalid format", "must be a valid",
    "should be a valid", "malformed", "not supported", "unsupported value", "does not match",
    "must match", "wrong format", "bad format", "too long", "too short", "must be a number",
    "must be an integer", "must be a string", "must be a boolean", "type mismatch", "is not valid",
    "not in the list", "invalid date", "invalid email",
];

const MANDATORY: &[&str] = &[
    "is required", "are required", "is a required", "required parameter", "required field",
    "is missing", "missing required", "missing parameter", "missing field", "must be provided",
    "must be specified", "must be supplied", "must be present", "must not be empty",
    "cannot be empty", "can't be empty", "cannot be null", "must not be null", "cannot be blank",
    "should not be empty", "is mandatory", "was not provided", "not provided", "please provide",
    "please specify", "must be set", "needs to be provided", "missing",
];

fn has_any(text: &str, phrases: &[&str]) -> bool {
    phrases.iter().any(|p| text.contains(p))
}

fn lower(message: &str) -> String {
    let collapsed: Vec<&str> = message.split_whitespace().collect();
    collapsed.join(" ").to_lowercase().replace(['‘', '’', '`'], "'")
}

fn unknown_parameter_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(concat!(
            r"(unknown|unrecognized|unrecognised|unexpected|unsupported|undefined|extra)\s+",
            r"(query\s+|body\s+|header\s+)?(parameter|field|argument|property|key)s?\b",
            r"|not\s+a\s+(recognized|recognised|known)\s+(parameter|field|argument)",
            r"|additional properties are not allowed",
            r"|parameter\s+\S+\s+is\s+not\s+(allowed|permitted|recognized|recognised|expected)",
            r"|(parameter|field)s?\s+not\s+(allowed|permitted|recognized|recognised)"
        ))
        .unwrap()
    })
}

fn method_not_supported_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"(method|operation|endpoint|verb)\b.{0,40}\bnot\s+(supported|allowed|available)").unwrap()
    })
}

fn no_resource_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"\bno\s+\w+\s+(found|with\s+(the\s+)?(id|identifier))\b").unwrap())
}

fn or_required_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| {
        Regex::new(r"\S+\s+or\s+\S+.{0,30}\b(is|are)\s+required|(specify|provide|supply)\s+\S+\s+or\s+\S+").unwrap()
    })
}

fn is_auth(m: &str) -> bool {
    has_any(m, AUTH)
}

fn is_data_arithmetic(m: &str) -> bool {
    find_relop(m).is_some()
}

/// Category for `(message, status)` under the fixed rule order. Total.
pub fn classify(message: &str, status: u16) -> ConstraintCategory {
    use ConstraintCategory::*;
    let m = lower(message);
    if status == 401 || status == 403 || is_auth(&m) {
        return ConfigurationAuthentication;
    }
    if m.trim().is_empty() {
        return Unhandled;
    }
    if status >= 500 {
        return if has_any(&m, NON_ARITH_STRONG) {
            DataNonArithmetic
        } else if is_data_arithmetic(&m) {
            DataArithmetic
        } else {
            Unhandled
        };
    }
    if status == 405 || has_any(&m, UNSUPPORTED) || method_not_supported_re().is_match(&m) {
        return UnsupportedOperation;
    }
    if unknown_parameter_re().is_match(&m) {
        return ParameterUnknown;
    }
    if let Some(cat) = nested::nested_category(message) {
        return cat;
    }
    if has_any(&m, ONE) {
        return One;
    }
    if has_any(&m, ALL_OR_NONE) {
        return AllOrNone;
    }
    if has_any(&m, OR) || or_required_re().is_match(&m) {
        return Or;
    }
    if has_any(&m, NOT_FOUND) || no_resource_re().is_match(&m) {
        return ProducerConsumer;
    }
    if has_any(&m, NON_ARITH_STRONG) {
        return DataNonArithmetic;
    }
    if is_data_arithmetic(&m) {
        return DataArithmetic;
    }
    if has_any(&m, NON_ARITH_WEAK) {
        return DataNonArithmetic;
    }
    if has_any(&m, MANDATORY) {
        return AdditionalMandatory;
    }
    if status == 404 {
        return ProducerConsumer;
    }
    Unhandled
}

pub(crate) fn is_unique_marker(m: &str) -> bool {
    has_any(
        &lower(m),
        &["already in use", "already exists", "already exist", "already taken", "already registered",
          "already been taken", "must be unique", "not unique", "duplicate"],
    )
}

pub(crate) const CATEGORICAL_MARKERS: &[&str] = &[
    "supported values", "allowed values", "valid values", "possible values", "accepted values",
    "permitted values", "valid options", "must be one of", "should be one of", "is not one of",
    "expected one of", "one of the following values",
];

#[cfg(test)]
mod tests {
    use super::*;
    use ConstraintCategory::*;

    #[test]
    fn table_samples() {
        let cases = [
            ("API key not valid. Please pass a valid API key.", 401, ConfigurationAuthentication),
            ("playlistNotFound: The playlist with the ID `playlist456' could not be found.", 404, ProducerConsumer),
            ("Method Not Allowed Request method `POST' not supported", 405, UnsupportedOperation),
            ("\"points\" is a required parameter.", 400, AdditionalMandatory),
            ("You must specify either the `source' or `destination' parameter.", 400, Or),
            ("Either city or zipcode is required, not both.", 400, One),
            ("Address should be specified with street, city and pincode.", 400, AllOrNone),
            ("If longitude specified then latitude should be too", 400, ConditionalParameterRequired),
            ("Received unknown parameter: url", 400, ParameterUnknown),
            ("afterTimestamp must be greater than beforeTimestamp", 400, DataArithmetic),
            ("`PL' is not a valid gender. Supported values are `Male' , `Female', `Other'.", 400, DataNonArithmetic),
            ("If type is 'audio', only one of the other two parameters is required", 400, DataInfluencedParamSelection),
            ("If thumbnail is present, type must be `link'.", 400, ParameterInfluencedDataValues),
            ("Internal Server Error", 500, Unhandled),
        ];
        for (m, s, want) in cases {
            assert_eq!(classify(m, s), want, "{m}");
        }
    }

    #[test]
    fn status_overrides() {
        assert_eq!(classify("anything", 403), ConfigurationAuthentication);
        assert_eq!(classify("", 400), Unhandled);
        assert_eq!(classify("Internal Server Error: This email a@b.com is already in use.", 500), DataNonArithmetic);
        assert_eq!(classify("java.lang.NullPointerException", 500), Unhandled);
        assert_eq!(classify("Order Not Found", 404), ProducerConsumer);
        assert_eq!(classify("gain should surpass expenditure", 400), DataArithmetic);
        assert_eq!(classify("Storage capacity cannot be less than zero", 400), DataArithmetic);
        assert_eq!(classify("This email beulalingo@yahoo.com is already in use.", 409), DataNonArithmetic);
    }
}
