//! The fixture catalog. Each entry scripts one service whose error messages
//! follow the canonical category samples.

use apirefine::model::{
    make_param_id, Constraint, ConstraintCategory as Cat, DataProperty, Location, Operand, ProducerConsumer, RelOp,
    Relation, Selection,
};
use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::http::{Reply, Router, State};
use crate::FixtureSpec;

type Builder = fn() -> FixtureSpec;

const ENTRIES: &[(&str, Builder)] = &[
    ("langtool", langtool),
    ("petstore", petstore),
    ("staged", staged),
    ("all-ok", all_ok),
    ("chaos", chaos),
    ("blank-404", blank_404),
    ("blank-400", blank_400),
    ("metrics-20", metrics_20),
    ("auth", auth),
    ("unsupported", unsupported),
    ("mandatory", mandatory),
    ("or", or_group),
    ("all-or-none", all_or_none),
    ("geo", geo),
    ("unknown-param", unknown_param),
    ("arithmetic", arithmetic),
    ("gender", gender),
    ("media", media),
    ("posts", posts),
    ("defects", defects),
    ("paraphrase", paraphrase),
];

/// Names of every fixture, in catalog order.
pub fn catalog() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// A fresh instance of the named fixture.
pub fn fixture(name: &str) -> Option<FixtureSpec> {
    ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, b)| b())
}

fn id(op: &str, loc: Location, name: &str) -> String {
    make_param_id(op, loc, name)
}

fn pc(producer: &str, code: &str, field: &str, consumer: &str, param: &str) -> Constraint {
    Constraint::ProducerConsumer(ProducerConsumer {
        producer_op: producer.into(),
        producer_param: format!("{producer}.{code}.{field}"),
        consumer_op: consumer.into(),
        consumer_param: id(consumer, Location::Path, param),
    })
}

fn categorical(param: String, values: &[&str]) -> Constraint {
    Constraint::DataNonArithmetic {
        param,
        property: DataProperty::Categorical,
        values: values.iter().map(|v| json!(v)).collect(),
    }
}

fn doc(title: &str, paths: &str) -> String {
    format!("openapi: 3.0.0\ninfo: {{title: {title}, version: \"1.0\"}}\npaths:\n{paths}")
}

const CATEGORY_ONE_LANGUAGE: &str = "Either text or data is required, not both.";

fn langtool() -> FixtureSpec {
    let paths = r#"
  /v2/check:
    post:
      operationId: check
      requestBody:
        required: true
        content:
          application/x-www-form-urlencoded:
            schema:
              type: object
              required: [language]
              properties:
                text: {type: string}
                data: {type: string}
                language: {type: string}
      responses:
        "200":
          description: matches
          content:
            application/json:
              schema:
                type: object
                properties:
                  matches: {type: array, items: {type: string}}
"#;
    let router = Router::new().route("POST", "/v2/check", |_, r| {
        if r.has("text") && r.has("data") {
            return Reply::error(400, CATEGORY_ONE_LANGUAGE);
        }
        let lang = r.text("language").unwrap_or_default();
        if !["en", "de", "fr"].contains(&lang.as_str()) {
            return Reply::error(400, format!("'{lang}' is not a supported language. Supported values are: en, de, fr."));
        }
        Reply::ok(json!({"matches": []}))
    });
    let f = |n| id("check", Location::FormData, n);
    FixtureSpec {
        name: "langtool",
        summary: "text/data exclusivity and a categorical language",
        document: doc("langtool", paths),
        router,
        ground_truth: vec![
            Constraint::One { params: vec![f("text"), f("data")] },
            categorical(f("language"), &["en", "de", "fr"]),
        ],
        messages: vec![
            (400, CATEGORY_ONE_LANGUAGE.into(), Cat::One),
            (400, "'zz' is not a supported language. Supported values are: en, de, fr.".into(), Cat::DataNonArithmetic),
        ],
    }
}

fn petstore() -> FixtureSpec {
    let paths = r##"
  /store/order:
    post:
      operationId: placeOrder
      requestBody:
        required: true
        content:
          application/json:
            schema: {$ref: "#/components/schemas/Order"}
      responses:
        "200":
          description: placed
          content:
            application/json:
              schema: {$ref: "#/components/schemas/Order"}
  /store/order/{orderId}:
    get:
      operationId: getOrderById
      parameters:
        - {name: orderId, in: path, required: true, schema: {type: integer}}
      responses:
        "200":
          description: found
          content:
            application/json:
              schema: {$ref: "#/components/schemas/Order"}
    delete:
      operationId: deleteOrder
      parameters:
        - {name: orderId, in: path, required: true, schema: {type: integer}}
      responses:
        "200": {description: deleted}
components:
  schemas:
    Order:
      type: object
      required: [petId]
      properties:
        id: {type: integer}
        petId: {type: integer}
        quantity: {type: integer}
"##;
    let router = Router::new()
        .route("POST", "/store/order", |s, r| {
            let order = json!({"petId": r.param("petId"), "quantity": r.param("quantity")});
            Reply::ok(s.create("order", order))
        })
        .route("GET", "/store/order/{orderId}", |s, r| match s.get("order", r.arg("orderId").unwrap_or("")) {
            Some(o) => Reply::ok(o.clone()),
            None => Reply::error(404, "Order Not Found"),
        })
        .route("DELETE", "/store/order/{orderId}", |s, r| match s.remove("order", r.arg("orderId").unwrap_or("")) {
            Some(_) => Reply::ok(json!({"deleted": true})),
            None => Reply::error(404, "Order Not Found"),
        });
    FixtureSpec {
        name: "petstore",
        summary: "orders must exist before they are read or deleted",
        document: doc("petstore", paths),
        router,
        ground_truth: vec![
            pc("placeOrder", "200", "id", "getOrderById", "orderId"),
            pc("placeOrder", "200", "id", "deleteOrder", "orderId"),
        ],
        messages: vec![(404, "Order Not Found".into(), Cat::ProducerConsumer)],
    }
}

const USER_MISSING: &str = "The requested user does not exist.";
const CITY_OR_ZIP: &str = "Either city or zipcode is required, not both.";

fn staged() -> FixtureSpec {
    let paths = r##"
  /users:
    post:
      operationId: createUser
      requestBody:
        required: true
        content:
          application/json:
            schema: {$ref: "#/components/schemas/User"}
      responses:
        "200":
          description: created
          content:
            application/json:
              schema: {$ref: "#/components/schemas/User"}
    get:
      operationId: listUsers
      responses:
        "200":
          description: all users
          content:
            application/json:
              schema: {type: array, items: {$ref: "#/components/schemas/User"}}
  /users/{userId}:
    get:
      operationId: getUser
      parameters:
        - {name: userId, in: path, required: true, schema: {type: integer}}
      responses:
        "200":
          description: found
          content:
            application/json:
              schema: {$ref: "#/components/schemas/User"}
    put:
      operationId: updateUser
      parameters:
        - {name: userId, in: path, required: true, schema: {type: integer}}
      requestBody:
        required: true
        content:
          application/json:
            schema:
              type: object
              required: [language]
              properties:
                language: {type: string}
                city: {type: string}
                zipcode: {type: string}
      responses:
        "200": {description: updated}
    delete:
      operationId: deleteUser
      parameters:
        - {name: userId, in: path, required: true, schema: {type: integer}}
      responses:
        "200": {description: deleted}
components:
  schemas:
    User:
      type: object
      required: [name]
      properties:
        id: {type: integer}
        name: {type: string}
"##;
    let router = Router::new()
        .route("POST", "/users", |s, r| Reply::ok(s.create("user", json!({"name": r.param("name")}))))
        .route("GET", "/users", |s, _| Reply::ok(Value::Array(s.all("user"))))
        .route("GET", "/users/{userId}", |s, r| match s.get("user", r.arg("userId").unwrap_or("")) {
            Some(u) => Reply::ok(u.clone()),
            None => Reply::error(404, USER_MISSING),
        })
        .route("PUT", "/users/{userId}", |s, r| {
            if s.get("user", r.arg("userId").unwrap_or("")).is_none() {
                return Reply::error(404, USER_MISSING);
            }
            if r.has("city") && r.has("zipcode") {
                return Reply::error(400, CITY_OR_ZIP);
            }
            let lang = r.text("language").unwrap_or_default();
            if !["en", "de", "fr"].contains(&lang.as_str()) {
                return Reply::error(400, format!("'{lang}' is not a supported language. Supported values are: en, de, fr."));
            }
            Reply::ok(json!({"updated": true}))
        })
        .route("DELETE", "/users/{userId}", |s, r| match s.remove("user", r.arg("userId").unwrap_or("")) {
            Some(_) => Reply::ok(json!({"deleted": true})),
            None => Reply::error(404, USER_MISSING),
        });
    let b = |n| id("updateUser", Location::Body, n);
    FixtureSpec {
        name: "staged",
        summary: "users: existence first, then exclusivity and a categorical value",
        document: doc("staged", paths),
        router,
        ground_truth: vec![
            pc("createUser", "200", "id", "getUser", "userId"),
            pc("createUser", "200", "id", "updateUser", "userId"),
            pc("createUser", "200", "id", "deleteUser", "userId"),
            Constraint::One { params: vec![b("city"), b("zipcode")] },
            categorical(b("language"), &["en", "de", "fr"]),
        ],
        messages: vec![
            (404, USER_MISSING.into(), Cat::ProducerConsumer),
            (400, CITY_OR_ZIP.into(), Cat::One),
            (400, "'xx' is not a supported language. Supported values are: en, de, fr.".into(), Cat::DataNonArithmetic),
        ],
    }
}

fn all_ok() -> FixtureSpec {
    let paths = r#"
  /status:
    get:
      operationId: getStatus
      responses:
        "200": {description: ok}
  /search:
    get:
      operationId: search
      parameters:
        - {name: q, in: query, required: true, schema: {type: string}}
        - {name: limit, in: query, schema: {type: integer}}
      responses:
        "200": {description: ok}
  /notes:
    post:
      operationId: addNote
      requestBody:
        content:
          application/json:
            schema:
              type: object
              properties:
                title: {type: string}
                body: {type: string}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new()
        .route("GET", "/status", |_, _| Reply::ok(json!({"up": true})))
        .route("GET", "/search", |_, _| Reply::ok(json!([])))
        .route("POST", "/notes", |_, _| Reply::ok(json!({"saved": true})));
    FixtureSpec {
        name: "all-ok",
        summary: "every request succeeds",
        document: doc("all-ok", paths),
        router,
        ground_truth: vec![],
        messages: vec![],
    }
}

const SYLLABLES: &[&str] = &["ka", "lo", "mi", "zu", "ver", "tan", "quo", "bri", "sel", "dra", "fen", "gor"];

fn chaos() -> FixtureSpec {
    let paths = r#"
  /noise:
    get:
      operationId: getNoise
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/noise", |s: &mut State, _| {
        s.counter += 1;
        let word = |s: &mut State| -> String { (0..3).map(|_| *SYLLABLES.choose(&mut s.rng).unwrap()).collect() };
        let (a, b, c) = (word(s), word(s), word(s));
        Reply::error(400, format!("Unexpected condition {a} {b} {c}"))
    });
    FixtureSpec {
        name: "chaos",
        summary: "a new error message on every request",
        document: doc("chaos", paths),
        router,
        ground_truth: vec![],
        messages: vec![(400, "Unexpected condition kalomi zuvertan quobrisel".into(), Cat::Unhandled)],
    }
}

fn blank_404() -> FixtureSpec {
    let paths = r#"
  /items:
    post:
      operationId: createItem
      requestBody:
        required: true
        content:
          application/json:
            schema:
              type: object
              required: [name]
              properties:
                name: {type: string}
      responses:
        "200":
          description: created
          content:
            application/json:
              schema:
                type: object
                properties:
                  id: {type: integer}
                  name: {type: string}
  /items/{itemId}:
    get:
      operationId: getItem
      parameters:
        - {name: itemId, in: path, required: true, schema: {type: integer}}
      responses:
        "200": {description: found}
"#;
    let router = Router::new()
        .route("POST", "/items", |s, r| Reply::ok(s.create("item", json!({"name": r.param("name")}))))
        .route("GET", "/items/{itemId}", |s, r| match s.get("item", r.arg("itemId").unwrap_or("")) {
            Some(i) => Reply::ok(i.clone()),
            None => Reply::blank(404),
        });
    FixtureSpec {
        name: "blank-404",
        summary: "missing items answer 404 with an empty body",
        document: doc("blank-404", paths),
        router,
        ground_truth: vec![pc("createItem", "200", "id", "getItem", "itemId")],
        messages: vec![],
    }
}

fn blank_400() -> FixtureSpec {
    let paths = r#"
  /batches:
    post:
      operationId: createBatch
      requestBody:
        required: true
        content:
          application/json:
            schema:
              type: object
              required: [label, size]
              properties:
                label: {type: string}
                size: {type: integer}
      responses:
        "200": {description: created}
"#;
    // undocumented rule: only multiples of 7 are accepted, others get an empty 400
    let router = Router::new().route("POST", "/batches", |_, r| match r.number("size") {
        Some(n) if n as i64 % 7 == 0 => Reply::ok(json!({"accepted": true})),
        _ => Reply::blank(400),
    });
    FixtureSpec {
        name: "blank-400",
        summary: "bad data answers 400 with an empty body",
        document: doc("blank-400", paths),
        router,
        ground_truth: vec![],
        messages: vec![],
    }
}

fn metrics_20() -> FixtureSpec {
    let mut paths = String::new();
    let mut router = Router::new();
    for i in 1..=20 {
        paths.push_str(&format!(
            "  /r{i:02}:\n    get:\n      operationId: getR{i:02}\n      responses:\n        \"200\": {{description: ok}}\n"
        ));
        router = router.route("GET", &format!("/r{i:02}"), move |_, _| {
            if i > 18 {
                Reply::error(500, "Internal Server Error")
            } else {
                Reply::ok(json!({"n": i}))
            }
        });
    }
    FixtureSpec {
        name: "metrics-20",
        summary: "20 operations; two always fail with 500",
        document: doc("metrics-20", &paths),
        router,
        ground_truth: vec![],
        messages: vec![(500, "Internal Server Error".into(), Cat::Unhandled)],
    }
}

const BAD_KEY: &str = "API key not valid. Please pass a valid API key.";
pub const API_KEY: &str = "letmein";

fn auth() -> FixtureSpec {
    let paths = r#"
  /reports:
    get:
      operationId: getReports
      parameters:
        - {name: limit, in: query, schema: {type: integer}}
      responses:
        "200": {description: ok}
  /health:
    get:
      operationId: getHealth
      responses:
        "200": {description: ok}
"#;
    let router = Router::new()
        .route("GET", "/reports", |_, r| {
            if r.header("X-Api-Key") == Some(API_KEY) {
                Reply::ok(json!([]))
            } else {
                Reply::error(401, BAD_KEY)
            }
        })
        .route("GET", "/health", |_, _| Reply::ok(json!({"up": true})));
    FixtureSpec {
        name: "auth",
        summary: "a static API key guards one operation",
        document: doc("auth", paths),
        router,
        ground_truth: vec![],
        messages: vec![(401, BAD_KEY.into(), Cat::ConfigurationAuthentication)],
    }
}

fn unsupported() -> FixtureSpec {
    let paths = r#"
  /things:
    get:
      operationId: listThings
      responses:
        "200": {description: ok}
  /things/{thingId}:
    patch:
      operationId: patchThing
      parameters:
        - {name: thingId, in: path, required: true, schema: {type: integer}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/things", |_, _| Reply::ok(json!([]))).route(
        "PUT",
        "/things/{thingId}",
        |_, _| Reply::ok(json!({})),
    );
    FixtureSpec {
        name: "unsupported",
        summary: "one documented method is not implemented",
        document: doc("unsupported", paths),
        router,
        ground_truth: vec![],
        messages: vec![(405, "Method Not Allowed Request method `PATCH' not supported".into(), Cat::UnsupportedOperation)],
    }
}

fn mandatory() -> FixtureSpec {
    let paths = r#"
  /weather:
    get:
      operationId: getWeather
      parameters:
        - {name: city, in: query, required: true, schema: {type: string}}
        - {name: points, in: query, schema: {type: integer}}
        - {name: units, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/weather", |_, r| {
        if !r.has("points") {
            Reply::error(400, "\"points\" is a required parameter.")
        } else {
            Reply::ok(json!({"temp": 21}))
        }
    });
    FixtureSpec {
        name: "mandatory",
        summary: "an optional-looking parameter is required",
        document: doc("mandatory", paths),
        router,
        ground_truth: vec![Constraint::AdditionalMandatory { param: id("getWeather", Location::Query, "points") }],
        messages: vec![(400, "\"points\" is a required parameter.".into(), Cat::AdditionalMandatory)],
    }
}

const SOURCE_OR_DEST: &str = "You must specify either the `source' or `destination' parameter.";

fn or_group() -> FixtureSpec {
    let paths = r#"
  /routes:
    get:
      operationId: getRoutes
      parameters:
        - {name: source, in: query, schema: {type: string}}
        - {name: destination, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/routes", |_, r| {
        if r.has("source") || r.has("destination") {
            Reply::ok(json!([]))
        } else {
            Reply::error(400, SOURCE_OR_DEST)
        }
    });
    let q = |n| id("getRoutes", Location::Query, n);
    FixtureSpec {
        name: "or",
        summary: "at least one of two parameters",
        document: doc("or", paths),
        router,
        ground_truth: vec![Constraint::Or { params: vec![q("source"), q("destination")] }],
        messages: vec![(400, SOURCE_OR_DEST.into(), Cat::Or)],
    }
}

const ADDRESS: &str = "Address should be specified with street, city and pincode.";
const PIN_OR_CODE: &str = "Parameters 'pincode' and 'storeCode' are mutually exclusive.";

fn all_or_none() -> FixtureSpec {
    let paths = r#"
  /stores:
    get:
      operationId: findStores
      parameters:
        - {name: street, in: query, schema: {type: string}}
        - {name: city, in: query, schema: {type: string}}
        - {name: pincode, in: query, schema: {type: string}}
        - {name: storeCode, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/stores", |_, r| {
        if r.has("pincode") && r.has("storeCode") {
            return Reply::error(400, PIN_OR_CODE);
        }
        let n = ["street", "city", "pincode"].iter().filter(|p| r.has(p)).count();
        if n != 0 && n != 3 {
            return Reply::error(400, ADDRESS);
        }
        Reply::ok(json!([]))
    });
    let q = |n| id("findStores", Location::Query, n);
    FixtureSpec {
        name: "all-or-none",
        summary: "an address group plus an exclusive alternative",
        document: doc("all-or-none", paths),
        router,
        ground_truth: vec![
            Constraint::One { params: vec![q("pincode"), q("storeCode")] },
            Constraint::AllOrNone { params: vec![q("street"), q("city"), q("pincode")] },
        ],
        messages: vec![(400, PIN_OR_CODE.into(), Cat::One), (400, ADDRESS.into(), Cat::AllOrNone)],
    }
}

const LAT_OR_PLACE: &str = "Only one of latitude and placeId may be given.";
const LON_NEEDS_LAT: &str = "If longitude specified then latitude should be too";

fn geo() -> FixtureSpec {
    let paths = r#"
  /places:
    get:
      operationId: findPlaces
      parameters:
        - {name: latitude, in: query, schema: {type: number}}
        - {name: longitude, in: query, schema: {type: number}}
        - {name: placeId, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/places", |_, r| {
        if r.has("latitude") && r.has("placeId") {
            return Reply::error(400, LAT_OR_PLACE);
        }
        if r.has("longitude") && !r.has("latitude") {
            return Reply::error(400, LON_NEEDS_LAT);
        }
        Reply::ok(json!([]))
    });
    let q = |n| id("findPlaces", Location::Query, n);
    FixtureSpec {
        name: "geo",
        summary: "exclusive location forms and a conditional requirement",
        document: doc("geo", paths),
        router,
        ground_truth: vec![
            Constraint::One { params: vec![q("latitude"), q("placeId")] },
            Constraint::ConditionalParameterRequired {
                p1: q("latitude"),
                p1_present: true,
                p2: q("longitude"),
                p2_present: true,
            },
        ],
        messages: vec![(400, LAT_OR_PLACE.into(), Cat::One), (400, LON_NEEDS_LAT.into(), Cat::ConditionalParameterRequired)],
    }
}

fn unknown_param() -> FixtureSpec {
    let paths = r#"
  /fetch:
    get:
      operationId: fetchPage
      parameters:
        - {name: q, in: query, required: true, schema: {type: string}}
        - {name: url, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/fetch", |_, r| {
        if r.has("url") {
            Reply::error(400, "Received unknown parameter: url")
        } else {
            Reply::ok(json!({}))
        }
    });
    FixtureSpec {
        name: "unknown-param",
        summary: "a documented parameter the service rejects",
        document: doc("unknown-param", paths),
        router,
        ground_truth: vec![],
        messages: vec![(400, "Received unknown parameter: url".into(), Cat::ParameterUnknown)],
    }
}

const AFTER_BEFORE: &str = "afterTimestamp must be greater than beforeTimestamp";

fn arithmetic() -> FixtureSpec {
    let paths = r#"
  /events:
    get:
      operationId: listEvents
      parameters:
        - name: afterTimestamp
          in: query
          required: true
          schema: {type: string, format: date-time}
          example: "2020-01-01T00:00:00Z"
        - name: beforeTimestamp
          in: query
          required: true
          schema: {type: string, format: date-time}
          example: "2024-01-01T00:00:00Z"
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/events", |_, r| {
        let t = |n| r.text(n).and_then(|s| chrono::DateTime::parse_from_rfc3339(&s).ok());
        match (t("afterTimestamp"), t("beforeTimestamp")) {
            (Some(a), Some(b)) if a > b => Reply::ok(json!([])),
            _ => Reply::error(400, AFTER_BEFORE),
        }
    });
    let q = |n| id("listEvents", Location::Query, n);
    FixtureSpec {
        name: "arithmetic",
        summary: "an ordering between two timestamps",
        document: doc("arithmetic", paths),
        router,
        ground_truth: vec![Constraint::DataArithmetic(Relation::new(
            q("afterTimestamp"),
            RelOp::Gt,
            Operand::Param(q("beforeTimestamp")),
        ))],
        messages: vec![(400, AFTER_BEFORE.into(), Cat::DataArithmetic)],
    }
}

fn gender() -> FixtureSpec {
    let paths = r#"
  /people:
    post:
      operationId: addPerson
      requestBody:
        required: true
        content:
          application/json:
            schema:
              type: object
              required: [name, gender]
              properties:
                name: {type: string}
                gender: {type: string}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("POST", "/people", |s, r| {
        let g = r.text("gender").unwrap_or_default();
        if ["Male", "Female", "Other"].contains(&g.as_str()) {
            Reply::ok(s.create("person", json!({"name": r.param("name"), "gender": g})))
        } else {
            Reply::error(400, format!("`{g}' is not a valid gender. Supported values are `Male' , `Female', `Other'."))
        }
    });
    FixtureSpec {
        name: "gender",
        summary: "a categorical body field",
        document: doc("gender", paths),
        router,
        ground_truth: vec![categorical(id("addPerson", Location::Body, "gender"), &["Male", "Female", "Other"])],
        messages: vec![(
            400,
            "`PL' is not a valid gender. Supported values are `Male' , `Female', `Other'.".into(),
            Cat::DataNonArithmetic,
        )],
    }
}

const AUDIO: &str = "If type is 'audio', only one of the other two parameters is required";

fn media() -> FixtureSpec {
    let paths = r#"
  /media:
    get:
      operationId: findMedia
      parameters:
        - {name: type, in: query, schema: {type: string}, example: audio}
        - {name: title, in: query, schema: {type: string}}
        - {name: url, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/media", |_, r| {
        if r.text("type").as_deref() == Some("audio") && r.has("title") && r.has("url") {
            Reply::error(400, AUDIO)
        } else {
            Reply::ok(json!([]))
        }
    });
    let q = |n| id("findMedia", Location::Query, n);
    FixtureSpec {
        name: "media",
        summary: "a value that restricts which parameters may be selected",
        document: doc("media", paths),
        router,
        ground_truth: vec![Constraint::DataInfluencedParamSelection {
            antecedent: Relation::new(q("type"), RelOp::Eq, Operand::Const(json!("audio"))),
            consequent: Selection::One { params: vec![q("title"), q("url")] },
        }],
        messages: vec![(400, AUDIO.into(), Cat::DataInfluencedParamSelection)],
    }
}

const THUMBNAIL: &str = "If thumbnail is present, type must be `link'.";

fn posts() -> FixtureSpec {
    let paths = r#"
  /posts:
    post:
      operationId: createPost
      requestBody:
        required: true
        content:
          application/json:
            schema:
              type: object
              required: [text]
              properties:
                text: {type: string}
                type: {type: string}
                thumbnail: {type: string}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("POST", "/posts", |s, r| {
        if r.has("thumbnail") && r.text("type").as_deref() != Some("link") {
            Reply::error(400, THUMBNAIL)
        } else {
            Reply::ok(s.create("post", json!({"text": r.param("text")})))
        }
    });
    let b = |n| id("createPost", Location::Body, n);
    FixtureSpec {
        name: "posts",
        summary: "a parameter whose presence fixes another's value",
        document: doc("posts", paths),
        router,
        ground_truth: vec![Constraint::ParameterInfluencedDataValues {
            antecedent: Selection::Present { param: b("thumbnail") },
            consequent: Relation::new(b("type"), RelOp::Eq, Operand::Const(json!("link"))),
        }],
        messages: vec![(400, THUMBNAIL.into(), Cat::ParameterInfluencedDataValues)],
    }
}

pub const TRACE: &str = "java.lang.NullPointerException\n\tat com.example.ReportService.render(ReportService.java:42)\n\tat com.example.ReportController.get(ReportController.java:17)";

fn defects() -> FixtureSpec {
    let paths = r#"
  /render:
    get:
      operationId: renderReport
      parameters:
        - {name: format, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
  /ping:
    get:
      operationId: ping
      responses:
        "200": {description: ok}
"#;
    let router = Router::new()
        .route("GET", "/render", |_, _| Reply { status: 500, body: TRACE.into() })
        .route("GET", "/ping", |_, _| Reply::ok(json!({"pong": true})));
    FixtureSpec {
        name: "defects",
        summary: "a server error carrying a stack trace",
        document: doc("defects", paths),
        router,
        ground_truth: vec![],
        messages: vec![(500, TRACE.into(), Cat::Unhandled)],
    }
}

const EMAIL_OR_PHONE: &str = "Please provide email or phone.";

fn paraphrase() -> FixtureSpec {
    let paths = r#"
  /contacts:
    get:
      operationId: findContacts
      parameters:
        - {name: email, in: query, schema: {type: string}}
        - {name: phone, in: query, schema: {type: string}}
      responses:
        "200": {description: ok}
"#;
    let router = Router::new().route("GET", "/contacts", |_, r| {
        if r.has("email") || r.has("phone") {
            Reply::ok(json!([]))
        } else {
            Reply::error(400, EMAIL_OR_PHONE)
        }
    });
    let q = |n| id("findContacts", Location::Query, n);
    FixtureSpec {
        name: "paraphrase",
        summary: "an at-least-one group worded differently from the samples",
        document: doc("paraphrase", paths),
        router,
        ground_truth: vec![Constraint::Or { params: vec![q("email"), q("phone")] }],
        messages: vec![(400, EMAIL_OR_PHONE.into(), Cat::Or)],
    }
}
