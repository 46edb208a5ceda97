//! JSON report assembly: every report echoes the configuration that
//! produced it, and the timestamp is omitted under --no-timestamp so
//! repeated runs are byte-identical.

use serde_json::{json, Value};
use std::time::{SystemTime, UNIX_EPOCH};

pub fn envelope(command: &str, config: Value, body: Value, no_timestamp: bool) -> Value {
    let mut obj = json!({
        "command": command,
        "config": config,
        "report": body,
    });
    if !no_timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        obj["timestamp_unix"] = json!(now);
    }
    obj
}

pub fn emit(report: &Value, path: Option<&std::path::Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match path {
        Some(p) => std::fs::write(p, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
