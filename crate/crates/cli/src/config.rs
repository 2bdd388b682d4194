//! Flat JSON parameter files.
//!
//! A config file is a single JSON object whose keys are the long CLI flag
//! names (`"p-plus"`, `"gamma"`, `"y-max"`, ...). A flag given on the command
//! line always wins over the file; keys a subcommand does not know are
//! ignored, so one file can serve several subcommands.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::Failure;

#[derive(Debug, Default)]
pub struct Config {
    entries: Map<String, Value>,
}

impl Config {
    /// Load a config file if a path was given; an absent path is an empty
    /// config so command code can resolve parameters uniformly.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::input(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            Value::Object(entries) => Ok(Config { entries }),
            other => Err(Failure::input(format!(
                "config {} must be a JSON object of flag-name keys, got {other}",
                path.display()
            ))),
        }
    }

    #[cfg(test)]
    fn from_value(value: Value) -> Self {
        match value {
            Value::Object(entries) => Config { entries },
            _ => panic!("test config must be an object"),
        }
    }

    /// Optional float: CLI flag first, then the config key.
    pub fn f64(&self, key: &str, cli: Option<f64>) -> Result<Option<f64>, Failure> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_f64() {
                Some(v) => Ok(Some(v)),
                None => Err(Failure::input(format!("config key {key:?} is out of range for a float"))),
            },
            Some(other) => Err(Failure::input(format!(
                "config key {key:?} must be a number, got {other}"
            ))),
        }
    }

    /// Required float: missing everywhere is an input error naming both the
    /// flag and the config key.
    pub fn require_f64(&self, key: &str, cli: Option<f64>) -> Result<f64, Failure> {
        self.f64(key, cli)?.ok_or_else(|| {
            Failure::input(format!(
                "missing required parameter: pass --{key} or set {key:?} in the config file"
            ))
        })
    }

    /// Optional unsigned integer (seeds, case counts).
    pub fn u64(&self, key: &str, cli: Option<u64>) -> Result<Option<u64>, Failure> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_u64() {
                Some(v) => Ok(Some(v)),
                None => Err(Failure::input(format!(
                    "config key {key:?} must be a non-negative integer"
                ))),
            },
            Some(other) => Err(Failure::input(format!(
                "config key {key:?} must be an integer, got {other}"
            ))),
        }
    }

    /// Optional string (output directory, format, viscosity model).
    pub fn string(&self, key: &str, cli: Option<&str>) -> Result<Option<String>, Failure> {
        if let Some(v) = cli {
            return Ok(Some(v.to_string()));
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(Failure::input(format!(
                "config key {key:?} must be a string, got {other}"
            ))),
        }
    }
}
