use serde_json::Value;

use super::{Instance, InstanceError};

/// How strictly object keys are checked when reading an instance document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Unknown keys are a syntax error.
    #[default]
    Strict,
    /// Unknown keys are dropped before decoding.
    Lenient,
}

const TOP_KEYS: &[&str] = &["multicast_bound", "users", "servers"];
const USER_KEYS: &[&str] = &["demand", "budget", "service_level"];
const SERVER_KEYS: &[&str] = &["unit_cost", "capacity", "availability"];

/// Reads an instance document and validates every invariant.
pub fn parse_instance(text: &str, mode: ParseMode) -> Result<Instance, InstanceError> {
    parse_instance_unvalidated(text, mode)?.validated()
}

/// Reads an instance document, checking only its shape and field types.
///
/// Domain invariants (probabilities inside (0,1), the multicast bound, ...)
/// are left to [`super::validate`], so callers can report all of them at once.
pub fn parse_instance_unvalidated(text: &str, mode: ParseMode) -> Result<Instance, InstanceError> {
    match mode {
        ParseMode::Strict => {
            let mut de = serde_json::Deserializer::from_str(text);
            let inst: Instance = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
            de.end().map_err(|e| syntax(String::new(), &e))?;
            Ok(inst)
        }
        ParseMode::Lenient => {
            let mut value: Value =
                serde_json::from_str(text).map_err(|e| syntax(String::new(), &e))?;
            strip_unknown(&mut value);
            serde_path_to_error::deserialize(value).map_err(path_error)
        }
    }
}

/// Renders `inst` as a pretty-printed JSON document.
///
/// Reals are written with the shortest representation that reads back to the
/// same `f64`, so `parse_instance(serialize_instance(x)) == x`.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(inst).expect("instance fields are serializable");
    text.push('\n');
    text
}

fn path_error(err: serde_path_to_error::Error<serde_json::Error>) -> InstanceError {
    let path = err.path().to_string();
    syntax(path, err.inner())
}

fn syntax(path: String, err: &serde_json::Error) -> InstanceError {
    let path = if path.is_empty() || path == "." {
        "<document>".to_string()
    } else {
        path
    };
    InstanceError::Syntax {
        path,
        line: err.line(),
        column: err.column(),
        message: strip_position(&err.to_string()),
    }
}

// serde_json appends " at line X column Y"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn strip_unknown(value: &mut Value) {
    let Value::Object(top) = value else { return };
    top.retain(|k, _| TOP_KEYS.contains(&k.as_str()));
    for (key, allowed) in [("users", USER_KEYS), ("servers", SERVER_KEYS)] {
        if let Some(Value::Array(items)) = top.get_mut(key) {
            for item in items {
                if let Value::Object(obj) = item {
                    obj.retain(|k, _| allowed.contains(&k.as_str()));
                }
            }
        }
    }
}
