use serde::Serialize;
use serde_json::{Map, Value};

pub const VERSION: &str = concat!("hypercount ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    result: &'a T,
}

/// JSON document `{version, command, result}`, or CSV: the objects of a
/// `rows` array as a table, else one row of the top-level fields.
pub fn render<T: Serialize>(command: &str, result: &T, format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let env = Envelope { version: VERSION, command, result };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let v = serde_json::to_value(result).map_err(|e| e.to_string())?;
            to_csv(&v)
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn to_csv(v: &Value) -> Result<String, String> {
    let obj = v.as_object().ok_or("result is not an object")?;
    let rows: Vec<&Map<String, Value>> = match obj.get("rows") {
        Some(Value::Array(a)) if a.iter().all(Value::is_object) && !a.is_empty() => a.iter().filter_map(Value::as_object).collect(),
        _ => vec![obj],
    };
    let header: Vec<&String> = rows[0].keys().collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|k| k.as_str())).map_err(|e| e.to_string())?;
    for r in &rows {
        w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default())).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}
