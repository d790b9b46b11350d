use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Render every number as a decimal string; object keys are already sorted
/// because `serde_json::Map` is ordered.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// The full JSON document: tool, version, command, config echo, result and
/// the fingerprint of the canonical result.
pub fn json_document(command: &str, config: Value, result: Value) -> String {
    let result = canonicalize(result);
    let payload = serde_json::to_string(&result).expect("values serialize");
    let mut doc = Map::new();
    doc.insert("tool".into(), Value::String("geogt".into()));
    doc.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    doc.insert("command".into(), Value::String(command.into()));
    doc.insert("config".into(), canonicalize(config));
    doc.insert("fingerprint".into(), Value::String(fingerprint(payload.as_bytes())));
    doc.insert("result".into(), result);
    let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("values serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn numbers_become_strings_and_keys_sort() {
        let v = canonicalize(json!({"b": 1, "a": [2, {"z": -3, "y": true}]}));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":["2",{"y":true,"z":"-3"}],"b":"1"}"#);
    }

    #[test]
    fn fingerprint_is_sha256() {
        assert_eq!(
            fingerprint(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
