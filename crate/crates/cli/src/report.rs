use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure carried to `main`, already mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_UNKNOWN: i32 = 4;
pub const EXIT_SOLVER: i32 = 5;

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<ctxkit_core::Error> for Failure {
    fn from(e: ctxkit_core::Error) -> Self {
        use ctxkit_core::ErrorKind;
        let code = match e.kind() {
            ErrorKind::Parse => EXIT_PARSE,
            ErrorKind::Validation => EXIT_VALIDATION,
            ErrorKind::UnknownResource => EXIT_UNKNOWN,
            ErrorKind::Solver => EXIT_SOLVER,
        };
        Failure { code, message: e.to_string() }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Where the inputs of a command came from; hashed into the report.
pub enum Input {
    Preset(String),
    File { path: String, bytes: Vec<u8> },
    Args(String),
}

impl Input {
    pub fn describe(&self) -> String {
        match self {
            Input::Preset(p) => format!("preset:{p}"),
            Input::File { path, .. } => format!("file:{path}"),
            Input::Args(a) => format!("args:{a}"),
        }
    }

    pub fn digest(&self) -> String {
        let bytes: Vec<u8> = match self {
            Input::File { bytes, .. } => bytes.clone(),
            other => other.describe().into_bytes(),
        };
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }
}

pub struct Report {
    pub command: Vec<String>,
    pub inputs: Vec<Input>,
    pub seed: u64,
    pub tolerances: Vec<(&'static str, f64)>,
    pub results: Value,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(0.0));
            // -0 prints as "-0.0"
            let x = if x == 0.0 { 0.0 } else { x };
            json!(x)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut tol = Map::new();
        for (k, v) in &self.tolerances {
            tol.insert((*k).to_string(), json!(v));
        }
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|i| json!({ "source": i.describe(), "digest": i.digest() }))
            .collect();
        round_value(json!({
            "command": self.command,
            "version": VERSION,
            "seed": self.seed,
            "inputs": inputs,
            "tolerances": tol,
            "results": self.results,
        }))
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let j = self.to_json();
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command.join(" ")));
        out.push_str(&format!("version: {VERSION}\n"));
        out.push_str(&format!("seed: {}\n", self.seed));
        for i in &self.inputs {
            out.push_str(&format!("input: {} {}\n", i.describe(), i.digest()));
        }
        for (k, v) in &j["tolerances"].as_object().cloned().unwrap_or_default() {
            out.push_str(&format!("tolerance {k}: {v}\n"));
        }
        flatten("", &j["results"], &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(_) | Value::Bool(_) | Value::Null => Some(v.to_string()),
        Value::Array(a) if a.iter().all(|x| matches!(x, Value::Number(_) | Value::Bool(_) | Value::Null)) => {
            let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{prefix}: {s}\n"));
        return;
    }
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        _ => {}
    }
}
