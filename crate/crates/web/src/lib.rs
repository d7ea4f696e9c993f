//! Browser bindings: correlation curves, bound curves and truncation
//! certificates, each taking a JSON run configuration and returning JSON.

use serde_json::{json, Value};
use specbound::cli::{cmd_bound, cmd_eval_correlation, cmd_heom_cert};
use specbound::config::RunConfig;
use specbound::table::ResultTable;
use wasm_bindgen::prelude::*;

fn table_json(t: &ResultTable) -> Value {
    let columns: Vec<Value> = t
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "name": c.name, "certified": c.certified, "values": t.rows.iter().map(|r| r[i]).collect::<Vec<_>>() }))
        .collect();
    let meta: serde_json::Map<String, Value> = t.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({ "columns": columns, "metadata": meta })
}

fn run(config: &str, cmd: fn(&RunConfig) -> specbound::Result<specbound::cli::Output>) -> Result<String, String> {
    let cfg = RunConfig::from_json(config).map_err(|e| e.to_string())?;
    let out = cmd(&cfg).map_err(|e| e.to_string())?;
    let value = json!({
        "table": out.table.as_ref().map(table_json),
        "document": out.document,
        "messages": out.messages,
    });
    Ok(value.to_string())
}

/// ξ(t) on the configured time grid.
pub fn correlation_curve_json(config: &str) -> Result<String, String> {
    run(config, |c| cmd_eval_correlation(c, 1))
}

/// General, weak and strong bound curves for the configured variation.
pub fn bound_curves_json(config: &str) -> Result<String, String> {
    run(config, cmd_bound)
}

/// Truncation certificate for the configured Lorentzian bath.
pub fn heom_certificate_json(config: &str) -> Result<String, String> {
    run(config, cmd_heom_cert)
}

#[wasm_bindgen]
pub fn correlation_curve(config: &str) -> Result<String, JsValue> {
    correlation_curve_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bound_curves(config: &str) -> Result<String, JsValue> {
    bound_curves_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn heom_certificate(config: &str) -> Result<String, JsValue> {
    heom_certificate_json(config).map_err(|e| JsValue::from_str(&e))
}
