use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::Value;

use super::types::*;
use super::{ModelError, SpecModel};

/// Default number of times a schema may recur along one unroll path.
pub const DEFAULT_UNROLL_DEPTH: usize = 3;

const MAX_NESTING: usize = 32;
const HTTP_METHODS: [&str; 8] = ["get", "put", "post", "delete", "options", "head", "patch", "trace"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentFormat {
    Json,
    Yaml,
}

impl DocumentFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("yaml" | "yml") => Self::Yaml,
            _ => Self::Json,
        }
    }
}

pub fn load_spec_file(path: &Path) -> Result<SpecModel, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
    load_spec(&text, DocumentFormat::from_path(path))
}

/// Parse an OpenAPI 2.0 or 3.x document into a fresh model.
///
/// Learned constraints stored under the vendor extension keys by
/// [`export_spec`](super::export_spec) are re-applied.
pub fn load_spec(document: &str, format: DocumentFormat) -> Result<SpecModel, ModelError> {
    load_spec_with_depth(document, format, DEFAULT_UNROLL_DEPTH)
}

pub fn load_spec_with_depth(
    document: &str,
    format: DocumentFormat,
    depth_limit: usize,
) -> Result<SpecModel, ModelError> {
    let doc: Value = match format {
        DocumentFormat::Json => {
            serde_json::from_str(document).map_err(|e| ModelError::Parse(e.to_string()))?
        }
        DocumentFormat::Yaml => {
            serde_yaml::from_str(document).map_err(|e| ModelError::Parse(e.to_string()))?
        }
    };
    if !doc.is_object() {
        return Err(ModelError::Parse("document root is not an object".into()));
    }
    let version = if doc.get("swagger").is_some() {
        Version::Swagger2
    } else if doc.get("openapi").is_some() {
        Version::OpenApi3
    } else {
        return Err(ModelError::Parse("missing `swagger` or `openapi` version field".into()));
    };
    let loader = Loader::new(&doc, version, depth_limit.max(1));
    let mut model = loader.build()?;
    model.warnings.extend(loader.warnings.take());
    let source = doc.clone();
    super::export::apply_extensions(&mut model, &source)?;
    model.source = strip_extensions(source);
    Ok(model)
}

fn strip_extensions(mut doc: Value) -> Value {
    if let Some(obj) = doc.as_object_mut() {
        obj.remove(super::export::LEARNED_CONSTRAINTS_KEY);
        obj.remove(super::export::REMOVED_OPERATIONS_KEY);
        obj.remove(super::export::REMOVED_PARAMETERS_KEY);
    }
    doc
}

/// Flatten a schema into dotted-path parameters, recurring schemas cut at
/// `depth_limit` occurrences on a path.
pub fn unroll_schema(schema: &Schema, model: &SpecModel, depth_limit: usize) -> Vec<InputParameter> {
    let prefix = lower_first(&schema.sname);
    let ctx = UnrollCtx { opname: None, loc: Location::Body, depth_limit: depth_limit.max(1) };
    let mut out = Vec::new();
    let mut stack = vec![schema.sname.clone()];
    unroll_fields(&schema.fields, &model.schemas, &ctx, &prefix, true, &mut stack, &mut out);
    out
}

fn lower_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_lowercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

struct UnrollCtx<'a> {
    opname: Option<&'a str>,
    loc: Location,
    depth_limit: usize,
}

impl UnrollCtx<'_> {
    fn id(&self, name: &str) -> ParamId {
        match self.opname {
            Some(op) => make_param_id(op, self.loc, name),
            None => name.to_string(),
        }
    }

    fn leaf(&self, name: String, ptype: ParamType, field: &SchemaField, required: bool) -> InputParameter {
        InputParameter {
            id: self.id(&name),
            name,
            ptype,
            is_required: required,
            loc: self.loc,
            pc: field.fieldconstraint.clone(),
            examples: field.examples.clone(),
            locally_required: field.is_required,
            recursive: false,
            body_root: false,
            removed: false,
        }
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn primitive(ft: &FieldType) -> ParamType {
    match ft {
        FieldType::Integer => ParamType::Integer,
        FieldType::Number => ParamType::Number,
        FieldType::Boolean => ParamType::Boolean,
        FieldType::String => ParamType::String,
        FieldType::Array(inner) => ParamType::Array(Box::new(primitive(inner))),
        FieldType::Ref(s) => ParamType::Schema(s.clone()),
        FieldType::Object(_) | FieldType::FreeForm => ParamType::Schema("object".into()),
    }
}

fn unroll_fields(
    fields: &[SchemaField],
    schemas: &[Schema],
    ctx: &UnrollCtx<'_>,
    prefix: &str,
    parent_required: bool,
    stack: &mut Vec<String>,
    out: &mut Vec<InputParameter>,
) {
    for field in fields {
        let name = join(prefix, &field.fname);
        let required = parent_required && field.is_required;
        let nesting = name.matches('.').count();
        match &field.ftype {
            FieldType::Ref(sname) => {
                let seen = stack.iter().filter(|s| *s == sname).count();
                let target = schemas.iter().find(|s| &s.sname == sname);
                match target {
                    Some(t) if seen < ctx.depth_limit && nesting < MAX_NESTING && !t.fields.is_empty() => {
                        stack.push(sname.clone());
                        unroll_fields(&t.fields, schemas, ctx, &name, required, stack, out);
                        stack.pop();
                    }
                    _ => {
                        let mut p = ctx.leaf(name, ParamType::Schema(sname.clone()), field, required);
                        p.recursive = seen >= ctx.depth_limit;
                        out.push(p);
                    }
                }
            }
            FieldType::Object(inner) if !inner.is_empty() && nesting < MAX_NESTING => {
                unroll_fields(inner, schemas, ctx, &name, required, stack, out);
            }
            other => out.push(ctx.leaf(name, primitive(other), field, required)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Version {
    Swagger2,
    OpenApi3,
}

struct Loader<'a> {
    doc: &'a Value,
    version: Version,
    depth_limit: usize,
    raw_schemas: BTreeMap<String, &'a Value>,
    warnings: RefCell<Vec<String>>,
}

fn value_examples(v: &Value) -> Vec<Value> {
    let mut out = Vec::new();
    if let Some(e) = v.get("example") {
        out.push(e.clone());
    }
    if let Some(e) = v.get("x-example") {
        out.push(e.clone());
    }
    match v.get("examples") {
        Some(Value::Array(items)) => out.extend(items.iter().cloned()),
        Some(Value::Object(map)) => {
            for ex in map.values() {
                match ex.get("value") {
                    Some(val) => out.push(val.clone()),
                    None => out.push(ex.clone()),
                }
            }
        }
        _ => {}
    }
    out
}

fn value_constraints(v: &Value) -> ValueConstraints {
    let num = |k: &str| v.get(k).and_then(Value::as_f64);
    let usize_of = |k: &str| v.get(k).and_then(Value::as_u64).map(|n| n as usize);
    let mut pc = ValueConstraints {
        minimum: num("minimum"),
        maximum: num("maximum"),
        min_length: usize_of("minLength"),
        max_length: usize_of("maxLength"),
        pattern: v.get("pattern").and_then(Value::as_str).map(str::to_string),
        format: v.get("format").and_then(Value::as_str).map(str::to_string),
        enumeration: v.get("enum").and_then(Value::as_array).cloned().unwrap_or_default(),
        ..Default::default()
    };
    // 2.0/3.0 use booleans, 3.1 uses numbers
    match v.get("exclusiveMinimum") {
        Some(Value::Bool(b)) => pc.exclusive_minimum = *b,
        Some(n) if n.is_number() => {
            pc.minimum = n.as_f64();
            pc.exclusive_minimum = true;
        }
        _ => {}
    }
    match v.get("exclusiveMaximum") {
        Some(Value::Bool(b)) => pc.exclusive_maximum = *b,
        Some(n) if n.is_number() => {
            pc.maximum = n.as_f64();
            pc.exclusive_maximum = true;
        }
        _ => {}
    }
    pc
}

fn lookup_path<'v>(v: &'v Value, dotted: &str) -> Option<&'v Value> {
    let mut cur = v;
    for seg in dotted.split('.') {
        cur = match cur {
            Value::Object(m) => m.get(seg)?,
            Value::Array(items) => items.first()?.get(seg)?,
            _ => return None,
        };
    }
    Some(cur)
}

fn synthesize_opname(method: &str, path: &str) -> String {
    let mut name = method.to_lowercase();
    for seg in path.split('/').filter(|s| !s.is_empty()) {
        let cleaned: String = seg
            .chars()
            .filter(|c| *c != '{' && *c != '}')
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        name.push('_');
        name.push_str(&cleaned);
    }
    name
}

impl<'a> Loader<'a> {
    fn new(doc: &'a Value, version: Version, depth_limit: usize) -> Self {
        let defs = match version {
            Version::Swagger2 => doc.get("definitions"),
            Version::OpenApi3 => doc.pointer("/components/schemas"),
        };
        let raw_schemas = defs
            .and_then(Value::as_object)
            .map(|m| m.iter().map(|(k, v)| (k.clone(), v)).collect())
            .unwrap_or_default();
        Self { doc, version, depth_limit, raw_schemas, warnings: RefCell::new(Vec::new()) }
    }

    fn deref(&self, v: &'a Value) -> &'a Value {
        let mut cur = v;
        for _ in 0..MAX_NESTING {
            match cur.get("$ref").and_then(Value::as_str) {
                Some(r) if r.starts_with('#') => match self.doc.pointer(&r[1..]) {
                    Some(target) => cur = target,
                    None => return cur,
                },
                _ => return cur,
            }
        }
        cur
    }

    fn ref_name(v: &Value) -> Option<&str> {
        let r = v.get("$ref")?.as_str()?;
        let is_schema = r.starts_with("#/definitions/") || r.starts_with("#/components/schemas/");
        if is_schema {
            r.rsplit('/').next()
        } else {
            None
        }
    }

    fn is_object_like(&self, v: &Value) -> bool {
        let v = self.deref(v);
        v.get("properties").is_some()
            || v.get("allOf").is_some()
            || v.get("type").and_then(Value::as_str) == Some("object")
    }

    fn field_type(&self, schema: &'a Value, guard: usize) -> FieldType {
        if guard > MAX_NESTING {
            return FieldType::FreeForm;
        }
        if let Some(name) = Self::ref_name(schema) {
            if let Some(target) = self.raw_schemas.get(name) {
                if self.is_object_like(target) {
                    return FieldType::Ref(name.to_string());
                }
                return self.field_type(target, guard + 1);
            }
            self.warn(format!("unresolved schema reference `{name}`"));
            return FieldType::FreeForm;
        }
        let schema = self.deref(schema);
        if schema.get("allOf").is_some() || schema.get("properties").is_some() {
            let fields = self.object_fields(schema, guard + 1);
            return if fields.is_empty() { FieldType::FreeForm } else { FieldType::Object(fields) };
        }
        for key in ["oneOf", "anyOf"] {
            if let Some(first) = schema.get(key).and_then(Value::as_array).and_then(|a| a.first()) {
                return self.field_type(first, guard + 1);
            }
        }
        let ty = match schema.get("type") {
            Some(Value::String(t)) => t.as_str(),
            // 3.1 type arrays such as ["string", "null"]
            Some(Value::Array(ts)) => ts.iter().filter_map(Value::as_str).find(|t| *t != "null").unwrap_or("string"),
            _ => "",
        };
        match ty {
            "integer" => FieldType::Integer,
            "number" => FieldType::Number,
            "boolean" => FieldType::Boolean,
            "string" | "file" => FieldType::String,
            "array" => {
                let items = schema.get("items").map(|i| self.field_type(i, guard + 1)).unwrap_or(FieldType::String);
                FieldType::Array(Box::new(items))
            }
            "object" => FieldType::FreeForm,
            _ if schema.get("enum").is_some() => FieldType::String,
            _ if schema.get("additionalProperties").is_some() => FieldType::FreeForm,
            _ => FieldType::String,
        }
    }

    fn object_fields(&self, schema: &'a Value, guard: usize) -> Vec<SchemaField> {
        let schema = self.deref(schema);
        let mut fields: Vec<SchemaField> = Vec::new();
        if let Some(parts) = schema.get("allOf").and_then(Value::as_array) {
            for part in parts {
                for f in self.object_fields(part, guard + 1) {
                    if !fields.iter().any(|g| g.fname == f.fname) {
                        fields.push(f);
                    }
                }
            }
        }
        let required: BTreeSet<&str> = schema
            .get("required")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            for (fname, prop) in props {
                let resolved = self.deref(prop);
                let mut examples = value_examples(prop);
                if examples.is_empty() && !std::ptr::eq(resolved, prop) && !self.is_object_like(resolved) {
                    examples = value_examples(resolved);
                }
                let field = SchemaField {
                    fname: fname.clone(),
                    ftype: self.field_type(prop, guard + 1),
                    is_required: required.contains(fname.as_str()),
                    fieldconstraint: value_constraints(resolved),
                    examples,
                };
                fields.retain(|g| g.fname != field.fname);
                fields.push(field);
            }
        }
        // required names may come from an allOf sibling
        for f in &mut fields {
            if required.contains(f.fname.as_str()) {
                f.is_required = true;
            }
        }
        fields
    }

    fn warn(&self, msg: String) {
        let mut w = self.warnings.borrow_mut();
        if !w.contains(&msg) {
            w.push(msg);
        }
    }

    fn build(&self) -> Result<SpecModel, ModelError> {
        let mut schemas = Vec::new();
        for (name, raw) in &self.raw_schemas {
            if self.is_object_like(raw) {
                schemas.push(Schema { sname: name.clone(), fields: self.object_fields(raw, 0) });
            }
        }
        if self.doc.get("webhooks").is_some() {
            self.warn("unsupported feature: webhooks (skipped)".into());
        }

        let mut operations: Vec<Operation> = Vec::new();
        let doc: &'a Value = self.doc;
        let paths: Vec<(&'a String, &'a Value)> = match doc.get("paths") {
            Some(Value::Object(p)) => p.iter().collect(),
            Some(Value::Null) | None => Vec::new(),
            Some(_) => return Err(ModelError::Parse("`paths` is not an object".into())),
        };
        let mut used_names: BTreeSet<String> = BTreeSet::new();
        for (path, item) in paths {
            let item = self.deref(item);
            let Some(item_obj) = item.as_object() else { continue };
            let shared_params: Vec<&Value> =
                item.get("parameters").and_then(Value::as_array).map(|a| a.iter().collect()).unwrap_or_default();
            for (key, raw_op) in item_obj {
                let key_lower = key.to_ascii_lowercase();
                if !HTTP_METHODS.contains(&key_lower.as_str()) {
                    continue;
                }
                let Some(method) = Method::parse(&key_lower) else {
                    self.warn(format!("unsupported method {} {path} (skipped)", key.to_uppercase()));
                    continue;
                };
                if raw_op.get("callbacks").is_some() {
                    self.warn(format!("unsupported feature: callbacks on {key} {path} (skipped)"));
                }
                let mut opname = raw_op
                    .get("operationId")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .unwrap_or_else(|| synthesize_opname(key, path));
                if used_names.contains(&opname.to_lowercase()) {
                    let base = opname.clone();
                    let mut n = 2;
                    while used_names.contains(&format!("{base}_{n}").to_lowercase()) {
                        n += 1;
                    }
                    opname = format!("{base}_{n}");
                    self.warn(format!("duplicate operation name `{base}` renamed to `{opname}`"));
                }
                used_names.insert(opname.to_lowercase());
                let op = self.build_operation(opname, method, path, raw_op, &shared_params, &schemas);
                operations.push(op);
            }
        }

        let mut model = SpecModel::empty();
        model.original_operation_count = operations.len();
        model.operations = operations;
        model.schemas = schemas;
        Ok(model)
    }

    fn build_operation(
        &self,
        opname: String,
        method: Method,
        path: &str,
        raw: &'a Value,
        shared: &[&'a Value],
        schemas: &[Schema],
    ) -> Operation {
        let tag = raw
            .get("tags")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
            .unwrap_or_default();
        let mut op = Operation {
            opname,
            path: path.to_string(),
            tag,
            method,
            inputs: Vec::new(),
            outputs: Vec::new(),
            local_constraints: Vec::new(),
            request_media_type: None,
            produces_collection: false,
            needs_user_input: false,
        };

        // operation-level parameters override path-level ones with the same (name, in)
        let mut params: Vec<&'a Value> = Vec::new();
        let own: Vec<&'a Value> = raw.get("parameters").and_then(Value::as_array).map(|a| a.iter().collect()).unwrap_or_default();
        for p in shared.iter().chain(own.iter()) {
            let p = self.deref(p);
            let key = (p.get("name").cloned(), p.get("in").cloned());
            params.retain(|q| (q.get("name").cloned(), q.get("in").cloned()) != key);
            params.push(p);
        }
        let consumes = raw
            .get("consumes")
            .or_else(|| self.doc.get("consumes"))
            .and_then(Value::as_array)
            .and_then(|a| a.first())
            .and_then(Value::as_str)
            .map(str::to_string);

        for p in params {
            let Some(name) = p.get("name").and_then(Value::as_str) else { continue };
            let Some(loc_raw) = p.get("in").and_then(Value::as_str) else { continue };
            let Some(loc) = Location::parse(loc_raw) else {
                self.warn(format!(
                    "{}: unsupported parameter location `{loc_raw}` for `{name}` (skipped)",
                    op.opname
                ));
                continue;
            };
            let required = p.get("required").and_then(Value::as_bool).unwrap_or(false) || loc == Location::Path;
            if loc == Location::Body {
                let schema = p.get("schema").unwrap_or(&Value::Null);
                op.request_media_type = Some(consumes.clone().unwrap_or_else(|| "application/json".into()));
                self.add_body(&mut op, Location::Body, name, schema, required, value_examples(p), schemas);
                continue;
            }
            if loc == Location::FormData {
                op.request_media_type =
                    Some(consumes.clone().unwrap_or_else(|| "application/x-www-form-urlencoded".into()));
            }
            let schema: &Value = p.get("schema").unwrap_or(p);
            let ftype = self.field_type(schema, 0);
            let mut examples = value_examples(p);
            if examples.is_empty() {
                examples = value_examples(self.deref(schema));
            }
            let field = SchemaField {
                fname: name.to_string(),
                ftype,
                is_required: required,
                fieldconstraint: value_constraints(self.deref(schema)),
                examples,
            };
            let ctx = UnrollCtx { opname: Some(&op.opname), loc, depth_limit: self.depth_limit };
            let mut stack = Vec::new();
            unroll_fields(std::slice::from_ref(&field), schemas, &ctx, "", true, &mut stack, &mut op.inputs);
        }

        if let Some(body) = raw.get("requestBody") {
            let body = self.deref(body);
            let required = body.get("required").and_then(Value::as_bool).unwrap_or(false);
            if let Some(content) = body.get("content").and_then(Value::as_object) {
                let preferred = ["application/json", "application/x-www-form-urlencoded", "multipart/form-data"];
                let media = preferred
                    .iter()
                    .find(|m| content.contains_key(**m))
                    .map(|m| m.to_string())
                    .or_else(|| content.keys().find(|k| k.contains("json")).cloned())
                    .or_else(|| content.keys().next().cloned());
                if let Some(media) = media {
                    let entry = &content[&media];
                    if media.contains("xml") {
                        self.warn(format!("{}: XML request bodies are not supported", op.opname));
                    }
                    let loc = if media.contains("form") { Location::FormData } else { Location::Body };
                    let schema = entry.get("schema").unwrap_or(&Value::Null);
                    let mut examples = value_examples(entry);
                    examples.extend(value_examples(body));
                    op.request_media_type = Some(media);
                    self.add_body(&mut op, loc, "body", schema, required, examples, schemas);
                }
            }
        }

        // every path placeholder has exactly one PATH parameter
        for placeholder in op.path_placeholders() {
            let present = op.inputs.iter().any(|p| p.loc == Location::Path && p.name == placeholder);
            if !present {
                self.warn(format!("{}: path placeholder `{placeholder}` undeclared; synthesized", op.opname));
                op.inputs.push(InputParameter {
                    id: op.param_id(Location::Path, &placeholder),
                    name: placeholder,
                    ptype: ParamType::String,
                    is_required: true,
                    loc: Location::Path,
                    pc: ValueConstraints::default(),
                    examples: vec![],
                    locally_required: true,
                    recursive: false,
                    body_root: false,
                    removed: false,
                });
            }
        }

        self.add_outputs(&mut op, raw, schemas);
        op
    }

    #[allow(clippy::too_many_arguments)]
    fn add_body(
        &self,
        op: &mut Operation,
        loc: Location,
        name: &str,
        schema: &'a Value,
        required: bool,
        examples: Vec<Value>,
        schemas: &[Schema],
    ) {
        let ctx = UnrollCtx { opname: Some(&op.opname), loc, depth_limit: self.depth_limit };
        let ftype = self.field_type(schema, 0);
        let start = op.inputs.len();
        let mut stack = Vec::new();
        match &ftype {
            FieldType::Ref(sname) => {
                let fields = schemas.iter().find(|s| &s.sname == sname).map(|s| s.fields.clone()).unwrap_or_default();
                stack.push(sname.clone());
                unroll_fields(&fields, schemas, &ctx, "", required, &mut stack, &mut op.inputs);
            }
            FieldType::Object(fields) => {
                unroll_fields(fields, schemas, &ctx, "", required, &mut stack, &mut op.inputs);
            }
            other => {
                let field = SchemaField {
                    fname: name.to_string(),
                    ftype: other.clone(),
                    is_required: required,
                    fieldconstraint: value_constraints(self.deref(schema)),
                    examples: examples.clone(),
                };
                let mut p = ctx.leaf(name.to_string(), primitive(other), &field, required);
                p.body_root = true;
                op.inputs.push(p);
                return;
            }
        }
        // body-level examples are distributed to fields by dotted path
        let mut body_examples = examples;
        body_examples.extend(value_examples(self.deref(schema)));
        for p in &mut op.inputs[start..] {
            for ex in &body_examples {
                if let Some(v) = lookup_path(ex, &p.name) {
                    if !p.examples.contains(v) {
                        p.examples.push(v.clone());
                    }
                }
            }
        }
    }

    fn add_outputs(&self, op: &mut Operation, raw: &'a Value, schemas: &[Schema]) {
        let Some(responses) = raw.get("responses").and_then(Value::as_object) else { return };
        let success = responses
            .keys()
            .filter(|k| k.starts_with('2'))
            .min()
            .cloned();
        for (code, resp) in responses {
            let resp = self.deref(resp);
            let schema = match self.version {
                Version::Swagger2 => resp.get("schema"),
                Version::OpenApi3 => resp.get("content").and_then(Value::as_object).and_then(|c| {
                    c.iter()
                        .find(|(k, _)| k.contains("json"))
                        .or_else(|| c.iter().next())
                        .and_then(|(_, v)| v.get("schema"))
                }),
            };
            let Some(schema) = schema else { continue };
            let mut ftype = self.field_type(schema, 0);
            if let FieldType::Array(inner) = ftype {
                if Some(code) == success.as_ref() {
                    op.produces_collection = true;
                }
                ftype = *inner;
            }
            let fields = match ftype {
                FieldType::Ref(sname) => schemas.iter().find(|s| s.sname == sname).map(|s| s.fields.clone()).unwrap_or_default(),
                FieldType::Object(fields) => fields,
                _ => continue,
            };
            let ctx = UnrollCtx { opname: None, loc: Location::Body, depth_limit: self.depth_limit };
            let mut flat = Vec::new();
            unroll_fields(&fields, schemas, &ctx, "", true, &mut Vec::new(), &mut flat);
            for p in flat {
                op.outputs.push(OutputParameter {
                    id: format!("{}.{}.{}", op.opname, code, p.name),
                    name: p.name,
                    ptype: p.ptype,
                    is_required: p.is_required,
                    responsecode: code.clone(),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema_field(name: &str, ftype: FieldType, required: bool) -> SchemaField {
        SchemaField { fname: name.into(), ftype, is_required: required, fieldconstraint: Default::default(), examples: vec![] }
    }

    #[test]
    fn two_level_composition_uses_dotted_names() {
        let mut model = SpecModel::empty();
        model.schemas.push(Schema { sname: "Address".into(), fields: vec![schema_field("city", FieldType::String, true)] });
        let order = Schema {
            sname: "Order".into(),
            fields: vec![
                schema_field("id", FieldType::Integer, true),
                schema_field("ship", FieldType::Ref("Address".into()), true),
            ],
        };
        model.schemas.push(order.clone());
        let flat = unroll_schema(&order, &model, 3);
        let names: Vec<(&str, bool)> = flat.iter().map(|p| (p.name.as_str(), p.is_required)).collect();
        assert_eq!(names, vec![("order.id", true), ("order.ship.city", true)]);
    }

    #[test]
    fn optional_parent_makes_child_optional() {
        let mut model = SpecModel::empty();
        model.schemas.push(Schema { sname: "Address".into(), fields: vec![schema_field("city", FieldType::String, true)] });
        let order = Schema { sname: "Order".into(), fields: vec![schema_field("ship", FieldType::Ref("Address".into()), false)] };
        let flat = unroll_schema(&order, &model, 3);
        assert_eq!(flat.len(), 1);
        assert!(!flat[0].is_required);
        assert!(flat[0].locally_required);
    }

    #[test]
    fn self_reference_truncates_at_depth_limit() {
        let node = Schema {
            sname: "Node".into(),
            fields: vec![
                schema_field("value", FieldType::Integer, true),
                schema_field("next", FieldType::Ref("Node".into()), false),
            ],
        };
        let mut model = SpecModel::empty();
        model.schemas.push(node.clone());
        for limit in 1..=4 {
            let flat = unroll_schema(&node, &model, limit);
            // hand expansion: one `value` per level plus the cut-off `next` at the last level
            let values = flat.iter().filter(|p| p.leaf_name() == "value").count();
            assert_eq!(values, limit);
            let cut: Vec<_> = flat.iter().filter(|p| p.recursive).collect();
            assert_eq!(cut.len(), 1);
            assert_eq!(cut[0].name.matches("next").count(), limit);
        }
    }

    #[test]
    fn synthesized_names_for_missing_operation_ids() {
        assert_eq!(synthesize_opname("get", "/store/order/{orderId}"), "get_store_order_orderId");
    }
}
