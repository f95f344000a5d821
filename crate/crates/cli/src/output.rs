//! Rendering helpers shared by the subcommands.

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "genuslab/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Fixed 12-significant-digit rendering for text and CSV output.
pub fn fmt_f(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_sig(x);
    let s = r.to_string();
    if s.len() <= 20 {
        s
    } else {
        format!("{r:.11e}")
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with `"schema"` and `"command"` first and every float rounded.
pub fn to_json<T: Serialize>(command: &str, body: &T) -> String {
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), Value::from(SCHEMA));
    out.insert("command".into(), Value::from(command));
    match serde_json::to_value(body).expect("report serializes") {
        Value::Object(map) => out.extend(map),
        other => {
            out.insert("result".into(), other);
        }
    }
    let mut value = Value::Object(out);
    round_floats(&mut value);
    serde_json::to_string_pretty(&value).expect("report serializes")
}

/// CSV with a header row; fields containing commas or quotes are quoted.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let quote = |s: &str| {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
