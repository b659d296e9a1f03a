//! JSON config files. A config is a flat object with a `command` key and the
//! same keys as the subcommand's flags; flags given on the command line win.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{MODEL_KEYS, PHYSICAL_KEYS};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

fn to_map<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args).expect("argument structs serialize") {
        Value::Object(m) => m,
        _ => unreachable!("argument structs are objects"),
    }
}

pub fn read_config(path: &Path, command: &str) -> CliResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut map = match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => m,
        Ok(_) => return Err(CliError::param(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => return Err(CliError::param(format!("{}: {e}", path.display()))),
    };
    match map.remove("command") {
        None => {}
        Some(Value::String(c)) if c == command => {}
        Some(other) => {
            return Err(CliError::param(format!("config is for command {other}, not \"{command}\"")));
        }
    }
    Ok(map)
}

/// Overlay the flags on the config. Giving either parameter group on the
/// command line replaces the other group from the config.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<Map<String, Value>>) -> CliResult<T> {
    let Some(mut merged) = config else {
        return Ok(serde_json::from_value(Value::Object(to_map(flags))).expect("round trip"));
    };
    let given = to_map(flags);
    let has = |keys: &[&str]| keys.iter().any(|k| given.contains_key(*k));
    if has(&PHYSICAL_KEYS) {
        MODEL_KEYS.iter().for_each(|k| drop(merged.remove(*k)));
    }
    if has(&MODEL_KEYS) {
        PHYSICAL_KEYS.iter().for_each(|k| drop(merged.remove(*k)));
    }
    merged.extend(given);
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::param(format!("config: {e}")))
}

pub fn write_config<T: Serialize>(path: &Path, command: &str, args: &T) -> CliResult<()> {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    map.extend(to_map(args));
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("config serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
