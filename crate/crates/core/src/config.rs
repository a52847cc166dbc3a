//! JSON model configuration files.
//!
//! ```json
//! {"type": "linear", "params": {"m": 1, "omega": 1, "gamma": "1/2", "epsilon": 1, "s": 1, "z": 0}}
//! {"type": "dho", "params": {"m": 1, "omega": 1, "gamma": "9/16", "zScale": 2}}
//! {"type": "example1", "hamiltonian": "1/2*p^2 + 1/2*q^2", "params": {"alphas": [1], "betas": [2]}}
//! {"type": "custom", "hamiltonian": "...", "channels": [{"F": "...", "G": "..."}], "s": "1"}
//! ```
//!
//! Numbers may be JSON numbers (read through their decimal text, so `0.1`
//! is exactly 1/10) or rational strings. An optional `x0: [q, p]` gives the
//! initial state for simulations. Unknown keys are rejected.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{parse_rational, rat, ModelError, ModelSpec, NoiseChannel, Polynomial, Rational};
use crate::catalog::{build_dho_model, build_example1_model, build_linear_model, CatalogError, LinearModelParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unknown key `{key}` in {context}")]
    UnknownKey { key: String, context: &'static str },
    #[error("missing key `{key}` in {context}")]
    MissingKey { key: &'static str, context: &'static str },
    #[error("invalid value for `{key}`: {msg}")]
    InvalidValue { key: String, msg: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Linear,
    Dho,
    Example1,
    Custom,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Dho => "dho",
            ModelKind::Example1 => "example1",
            ModelKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub model: ModelSpec,
    /// Present for `type: linear`.
    pub linear_params: Option<LinearModelParams>,
    pub x0: [f64; 2],
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], context: &'static str) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::UnknownKey {
            key: k.clone(),
            context,
        }),
        None => Ok(()),
    }
}

fn required<'a>(
    obj: &'a Map<String, Value>,
    key: &'static str,
    context: &'static str,
) -> Result<&'a Value, ConfigError> {
    obj.get(key).ok_or(ConfigError::MissingKey { key, context })
}

fn as_object<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object().ok_or_else(|| ConfigError::InvalidValue {
        key: key.into(),
        msg: "expected an object".into(),
    })
}

fn rational_value(v: &Value, key: &str) -> Result<Rational, ConfigError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => {
            return Err(ConfigError::InvalidValue {
                key: key.into(),
                msg: "expected a number or a rational string".into(),
            })
        }
    };
    parse_rational(&text).map_err(|e| ConfigError::InvalidValue {
        key: key.into(),
        msg: e.to_string(),
    })
}

fn rational_list(v: &Value, key: &str) -> Result<Vec<Rational>, ConfigError> {
    v.as_array()
        .ok_or_else(|| ConfigError::InvalidValue {
            key: key.into(),
            msg: "expected a list".into(),
        })?
        .iter()
        .map(|x| rational_value(x, key))
        .collect()
}

fn polynomial_value(v: &Value, key: &str) -> Result<Polynomial, ConfigError> {
    let s = v.as_str().ok_or_else(|| ConfigError::InvalidValue {
        key: key.into(),
        msg: "expected a polynomial string".into(),
    })?;
    s.parse()
        .map_err(|e: crate::algebra::PolyParseError| ConfigError::InvalidValue {
            key: key.into(),
            msg: e.to_string(),
        })
}

fn x0_value(v: Option<&Value>) -> Result<[f64; 2], ConfigError> {
    let Some(v) = v else { return Ok([0.0, 0.0]) };
    let xs = rational_list(v, "x0")?;
    match xs.as_slice() {
        [q, p] => Ok([crate::algebra::rational_to_f64(q), crate::algebra::rational_to_f64(p)]),
        _ => Err(ConfigError::InvalidValue {
            key: "x0".into(),
            msg: format!("expected [q, p], got {} values", xs.len()),
        }),
    }
}

pub fn parse_model_config(text: &str) -> Result<ModelConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    let root = as_object(&root, "<root>")?;
    let kind = match required(root, "type", "model config")?.as_str() {
        Some("linear") => ModelKind::Linear,
        Some("dho") => ModelKind::Dho,
        Some("example1") => ModelKind::Example1,
        Some("custom") => ModelKind::Custom,
        other => {
            return Err(ConfigError::InvalidValue {
                key: "type".into(),
                msg: format!("expected linear, dho, example1 or custom, got {other:?}"),
            })
        }
    };
    let x0 = x0_value(root.get("x0"))?;
    let mut linear_params = None;
    let model = match kind {
        ModelKind::Linear => {
            check_keys(root, &["type", "params", "x0"], "model config")?;
            let p = as_object(required(root, "params", "model config")?, "params")?;
            check_keys(p, &["m", "omega", "gamma", "epsilon", "s", "z"], "linear params")?;
            let get = |k: &'static str| rational_value(required(p, k, "linear params")?, k);
            let z = match p.get("z") {
                Some(v) => rational_value(v, "z")?,
                None => rat(0, 1),
            };
            let params = LinearModelParams::new(get("m")?, get("omega")?, get("gamma")?, get("epsilon")?, get("s")?, z);
            let model = build_linear_model(&params)?;
            linear_params = Some(params);
            model
        }
        ModelKind::Dho => {
            check_keys(root, &["type", "params", "x0"], "model config")?;
            let p = as_object(required(root, "params", "model config")?, "params")?;
            check_keys(p, &["m", "omega", "gamma", "zScale"], "dho params")?;
            let get = |k: &'static str| rational_value(required(p, k, "dho params")?, k);
            build_dho_model(&get("m")?, &get("omega")?, &get("gamma")?, &get("zScale")?)?
        }
        ModelKind::Example1 => {
            check_keys(root, &["type", "hamiltonian", "params", "x0"], "model config")?;
            let h = polynomial_value(required(root, "hamiltonian", "model config")?, "hamiltonian")?;
            let p = as_object(required(root, "params", "model config")?, "params")?;
            check_keys(p, &["alphas", "betas"], "example1 params")?;
            let alphas = rational_list(required(p, "alphas", "example1 params")?, "alphas")?;
            let betas = rational_list(required(p, "betas", "example1 params")?, "betas")?;
            build_example1_model(h, &alphas, &betas)?
        }
        ModelKind::Custom => {
            check_keys(root, &["type", "hamiltonian", "channels", "s", "x0"], "model config")?;
            let h = polynomial_value(required(root, "hamiltonian", "model config")?, "hamiltonian")?;
            let s = match root.get("s") {
                Some(v) => rational_value(v, "s")?,
                None => rat(1, 1),
            };
            let mut channels = Vec::new();
            if let Some(list) = root.get("channels") {
                let list = list.as_array().ok_or_else(|| ConfigError::InvalidValue {
                    key: "channels".into(),
                    msg: "expected a list".into(),
                })?;
                for ch in list {
                    let ch = as_object(ch, "channels")?;
                    check_keys(ch, &["F", "G"], "channel")?;
                    let f = polynomial_value(required(ch, "F", "channel")?, "F")?;
                    channels.push(match ch.get("G") {
                        Some(g) => NoiseChannel::pair(f, polynomial_value(g, "G")?),
                        None => NoiseChannel::plain(f),
                    });
                }
            }
            ModelSpec::new(h, channels, s)?
        }
    };
    Ok(ModelConfig {
        kind,
        model,
        linear_params,
        x0,
    })
}

/// The `custom` form of `model`; parsing it gives back an identical model.
pub fn model_to_config_json(model: &ModelSpec) -> String {
    let channels: Vec<Value> = model
        .channels()
        .iter()
        .map(|ch| match ch {
            NoiseChannel::Plain { f } => json!({ "F": f.to_string() }),
            NoiseChannel::ConjugatePair { f, g } => json!({ "F": f.to_string(), "G": g.to_string() }),
        })
        .collect();
    let v = json!({
        "type": "custom",
        "hamiltonian": model.hamiltonian().to_string(),
        "channels": channels,
        "s": model.action_scale().to_string(),
    });
    serde_json::to_string_pretty(&v).expect("serializable")
}
