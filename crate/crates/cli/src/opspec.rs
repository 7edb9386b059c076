//! The operator-spec mini-grammar and the sweep grammar.
//!
//! Operators: `translation:h=<r>`, `dilation:q=<r>`,
//! `power:lambda=<r>,k=<int>`, `twoparam:lambda=<r>,mu=<r>`.
//! Sweeps: `x=<start>:<stop>:<count>` with inclusive endpoints.

use omega_calc::OmegaOperator;
use std::collections::BTreeMap;

pub fn parse_operator(spec: &str) -> Result<OmegaOperator, String> {
    let (name, params) = spec
        .split_once(':')
        .ok_or_else(|| format!("operator spec '{spec}' must look like name:key=value[,key=value]"))?;
    let mut fields = BTreeMap::new();
    for pair in params.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("operator parameter '{pair}' must look like key=value"))?;
        if fields.insert(key.trim(), value.trim()).is_some() {
            return Err(format!("duplicate operator parameter '{key}'"));
        }
    }
    let real = |fields: &BTreeMap<&str, &str>, key: &str| -> Result<f64, String> {
        fields
            .get(key)
            .ok_or_else(|| format!("operator '{name}' needs parameter '{key}'"))?
            .parse::<f64>()
            .map_err(|_| format!("parameter '{key}' of '{spec}' is not a number"))
    };
    let expect_keys = |fields: &BTreeMap<&str, &str>, keys: &[&str]| -> Result<(), String> {
        for key in fields.keys() {
            if !keys.contains(key) {
                return Err(format!("operator '{name}' does not take parameter '{key}'"));
            }
        }
        Ok(())
    };
    let op = match name {
        "translation" => {
            expect_keys(&fields, &["h"])?;
            OmegaOperator::translation(real(&fields, "h")?)
        }
        "dilation" => {
            expect_keys(&fields, &["q"])?;
            OmegaOperator::dilation(real(&fields, "q")?)
        }
        "power" => {
            expect_keys(&fields, &["lambda", "k"])?;
            let k: u32 = fields
                .get("k")
                .ok_or_else(|| "operator 'power' needs parameter 'k'".to_string())?
                .parse()
                .map_err(|_| format!("parameter 'k' of '{spec}' is not a positive integer"))?;
            OmegaOperator::power_deformation(real(&fields, "lambda")?, k)
        }
        "twoparam" => {
            expect_keys(&fields, &["lambda", "mu"])?;
            OmegaOperator::two_parameter(real(&fields, "lambda")?, real(&fields, "mu")?)
        }
        other => {
            return Err(format!(
                "unknown operator '{other}' (expected translation, dilation, power, twoparam)"
            ))
        }
    };
    op.map_err(|e| e.to_string())
}

/// Parses `x=a:b:n` into `n` evenly spaced points from `a` to `b`.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>, String> {
    let rest = spec
        .strip_prefix("x=")
        .ok_or_else(|| format!("sweep '{spec}' must look like x=start:stop:count"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("sweep '{spec}' must look like x=start:stop:count"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("sweep start '{}' is not a number", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("sweep stop '{}' is not a number", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("sweep count '{}' is not a positive integer", parts[2]))?;
    if count == 0 {
        return Err("sweep count must be at least 1".into());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}
