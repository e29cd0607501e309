use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::constraint::Constraint;

/// Unique parameter identifier: `opname.loc.pname` for inputs.
pub type ParamId = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Get,
    Post,
    Put,
    Patch,
    Delete,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "get" => Some(Self::Get),
            "post" => Some(Self::Post),
            "put" => Some(Self::Put),
            "patch" => Some(Self::Patch),
            "delete" => Some(Self::Delete),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Get => "GET",
            Self::Post => "POST",
            Self::Put => "PUT",
            Self::Patch => "PATCH",
            Self::Delete => "DELETE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Location {
    Body,
    Path,
    Query,
    Header,
    FormData,
}

impl Location {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "body" => Some(Self::Body),
            "path" => Some(Self::Path),
            "query" => Some(Self::Query),
            "header" => Some(Self::Header),
            "formdata" => Some(Self::FormData),
            _ => None,
        }
    }

    /// Lowercase form used inside parameter ids.
    pub fn id_segment(self) -> &'static str {
        match self {
            Self::Body => "body",
            Self::Path => "path",
            Self::Query => "query",
            Self::Header => "header",
            Self::FormData => "formdata",
        }
    }
}

/// Type of a (flattened) parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "of", rename_all = "snake_case")]
pub enum ParamType {
    Integer,
    Number,
    Boolean,
    String,
    Array(Box<ParamType>),
    /// A schema reference left unexpanded (recursion cut-off or free-form object).
    Schema(String),
}

impl ParamType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Self::Integer | Self::Number)
    }
}

/// Parameter-level value constraints taken from the document (`pc`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValueConstraints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximum: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exclusive_minimum: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exclusive_maximum: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub enumeration: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputParameter {
    pub id: ParamId,
    /// Dotted path for unrolled body fields (`address.city`).
    pub name: String,
    pub ptype: ParamType,
    pub is_required: bool,
    pub loc: Location,
    #[serde(default)]
    pub pc: ValueConstraints,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<Value>,
    /// Required flag of the field within its immediate parent object.
    #[serde(default)]
    pub locally_required: bool,
    /// Unroll stopped here because of a schema cycle.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub recursive: bool,
    /// The parameter is the entire request body (non-object body).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub body_root: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub removed: bool,
}

impl InputParameter {
    pub fn is_live(&self) -> bool {
        !self.removed
    }

    /// Last segment of the dotted name.
    pub fn leaf_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// Parent object path within the body (`""` for top-level fields).
    pub fn parent_path(&self) -> &str {
        match self.name.rfind('.') {
            Some(i) => &self.name[..i],
            None => "",
        }
    }

    /// Name ends in `id`/`Id`, or the whole name is `id`.
    pub fn is_identifier_like(&self) -> bool {
        let leaf = self.leaf_name();
        leaf.eq_ignore_ascii_case("id")
            || leaf.ends_with("Id")
            || leaf.ends_with("ID")
            || leaf.ends_with("_id")
            || (leaf.len() > 2 && {
                let lower = leaf.to_ascii_lowercase();
                lower.ends_with("id") && !NOT_IDENTIFIERS.contains(&lower.as_str())
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputParameter {
    /// `opname.responsecode.field.path`
    pub id: String,
    pub name: String,
    pub ptype: ParamType,
    pub is_required: bool,
    pub responsecode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub opname: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tag: Vec<String>,
    pub method: Method,
    pub inputs: Vec<InputParameter>,
    pub outputs: Vec<OutputParameter>,
    #[serde(default)]
    pub local_constraints: Vec<Constraint>,
    /// Media type for BODY/FORMDATA parameters, when declared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_media_type: Option<String>,
    /// The success response body is an array (a collection producer).
    #[serde(default)]
    pub produces_collection: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_user_input: bool,
}

impl Operation {
    pub fn input(&self, id: &str) -> Option<&InputParameter> {
        self.inputs.iter().find(|p| p.id == id)
    }

    pub fn input_mut(&mut self, id: &str) -> Option<&mut InputParameter> {
        self.inputs.iter_mut().find(|p| p.id == id)
    }

    pub fn live_inputs(&self) -> impl Iterator<Item = &InputParameter> {
        self.inputs.iter().filter(|p| p.is_live())
    }

    /// Placeholder names in `path`, e.g. `orderId` for `/store/order/{orderId}`.
    pub fn path_placeholders(&self) -> Vec<String> {
        path_placeholders(&self.path)
    }

    pub fn param_id(&self, loc: Location, name: &str) -> ParamId {
        make_param_id(&self.opname, loc, name)
    }
}

const NOT_IDENTIFIERS: &[&str] = &[
    "paid", "valid", "invalid", "void", "avoid", "android", "grid", "fluid", "liquid", "rapid",
    "solid", "acid", "hybrid", "humid", "vivid", "squid",
];

pub fn make_param_id(opname: &str, loc: Location, name: &str) -> ParamId {
    format!("{}.{}.{}", opname.to_lowercase(), loc.id_segment(), name)
}

pub fn path_placeholders(path: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = path;
    while let Some(start) = rest.find('{') {
        let Some(len) = rest[start..].find('}') else { break };
        out.push(rest[start + 1..start + len].to_string());
        rest = &rest[start + len + 1..];
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaField {
    pub fname: String,
    pub ftype: FieldType,
    pub is_required: bool,
    #[serde(default)]
    pub fieldconstraint: ValueConstraints,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<Value>,
}

/// Field type before unrolling: primitives, arrays, named refs or inline objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "of", rename_all = "snake_case")]
pub enum FieldType {
    Integer,
    Number,
    Boolean,
    String,
    Array(Box<FieldType>),
    Ref(String),
    Object(Vec<SchemaField>),
    /// Object without declared properties.
    FreeForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub sname: String,
    pub fields: Vec<SchemaField>,
}
