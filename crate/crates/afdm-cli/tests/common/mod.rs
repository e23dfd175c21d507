#![allow(dead_code)]

//! Shared helpers for the CLI test suites: binary invocation, scratch
//! directories, and a small JSON-Schema checker covering the subset used by
//! the shipped schema files (type, enum, required, properties,
//! additionalProperties, items, $ref, bounds).

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn afdm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_afdm"))
}

pub fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn afdm")
}

pub fn assert_success(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn assert_failure(out: &Output) -> String {
    assert!(!out.status.success(), "command unexpectedly succeeded");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(
        stderr.contains("afdm: error:") || stderr.contains("error:"),
        "stderr lacks the error prefix: {stderr}"
    );
    stderr
}

/// Fresh scratch directory per test.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("afdm-test-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

/// All shipped schemas, keyed by $id.
pub fn load_schemas() -> HashMap<String, Value> {
    let mut out = HashMap::new();
    for entry in std::fs::read_dir(schema_dir()).expect("docs/schemas exists") {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let schema: Value =
                serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let id = schema["$id"].as_str().expect("$id present").to_string();
            out.insert(id, schema);
        }
    }
    assert!(out.len() >= 5, "expected the shipped schema set");
    out
}

pub fn validate_against(id: &str, value: &Value, schemas: &HashMap<String, Value>) {
    let schema = schemas.get(id).unwrap_or_else(|| panic!("schema {id} missing"));
    let mut errors = Vec::new();
    check(schema, value, id, schemas, &mut errors);
    assert!(errors.is_empty(), "schema violations for {id}:\n{}", errors.join("\n"));
}

fn check(
    schema: &Value,
    value: &Value,
    path: &str,
    schemas: &HashMap<String, Value>,
    errors: &mut Vec<String>,
) {
    if let Some(reference) = schema["$ref"].as_str() {
        match schemas.get(reference) {
            Some(target) => check(target, value, path, schemas, errors),
            None => errors.push(format!("{path}: unresolved $ref {reference}")),
        }
        return;
    }

    if let Some(type_spec) = schema.get("type") {
        let names: Vec<&str> = match type_spec {
            Value::String(s) => vec![s.as_str()],
            Value::Array(parts) => parts.iter().filter_map(|p| p.as_str()).collect(),
            _ => vec![],
        };
        if !names.is_empty() && !names.iter().any(|n| type_matches(n, value)) {
            errors.push(format!("{path}: expected type {names:?}, got {value}"));
            return;
        }
    }

    if let Some(allowed) = schema["enum"].as_array() {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} not in enum {allowed:?}"));
        }
    }

    if let Some(n) = value.as_f64() {
        if let Some(min) = schema["minimum"].as_f64() {
            if n < min {
                errors.push(format!("{path}: {n} below minimum {min}"));
            }
        }
        if let Some(max) = schema["maximum"].as_f64() {
            if n > max {
                errors.push(format!("{path}: {n} above maximum {max}"));
            }
        }
        if let Some(min) = schema["exclusiveMinimum"].as_f64() {
            if n <= min {
                errors.push(format!("{path}: {n} not above {min}"));
            }
        }
    }

    if let Some(object) = value.as_object() {
        if let Some(required) = schema["required"].as_array() {
            for key in required.iter().filter_map(|k| k.as_str()) {
                if !object.contains_key(key) {
                    errors.push(format!("{path}: missing required key `{key}`"));
                }
            }
        }
        let properties = schema["properties"].as_object();
        if let Some(props) = properties {
            for (key, sub) in object {
                match props.get(key) {
                    Some(subschema) => {
                        check(subschema, sub, &format!("{path}.{key}"), schemas, errors)
                    }
                    None => {
                        if schema["additionalProperties"] == Value::Bool(false) {
                            errors.push(format!("{path}: unexpected key `{key}`"));
                        }
                    }
                }
            }
        }
    }

    if let Some(items) = value.as_array() {
        if let Some(min) = schema["minItems"].as_u64() {
            if (items.len() as u64) < min {
                errors.push(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = schema["maxItems"].as_u64() {
            if (items.len() as u64) > max {
                errors.push(format!("{path}: more than {max} items"));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            if item_schema.is_object() {
                for (i, item) in items.iter().enumerate() {
                    check(item_schema, item, &format!("{path}[{i}]"), schemas, errors);
                }
            }
        }
    }
}

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "number" => value.is_number(),
        "integer" => {
            value.is_i64() || value.is_u64() || value.as_f64().is_some_and(|f| f.fract() == 0.0)
        }
        _ => false,
    }
}
