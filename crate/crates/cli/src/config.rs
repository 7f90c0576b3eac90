//! `--config` support: JSON keys are flag names, values fill in every flag
//! not given on the command line.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::parser::ValueSource;
use clap::{CommandFactory, FromArgMatches, Parser};
use serde_json::Value;

use crate::args::Cli;

pub fn parse(argv: Vec<OsString>) -> Result<Cli> {
    let mut command = Cli::command();
    let matches = command.try_get_matches_from_mut(&argv)?;
    let Some((name, sub_matches)) = matches.subcommand() else {
        return Ok(Cli::from_arg_matches(&matches)?);
    };
    let Some(path) = sub_matches.get_one::<PathBuf>("config") else {
        return Ok(Cli::from_arg_matches(&matches)?);
    };

    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let doc: Value =
        serde_json::from_str(&text).with_context(|| format!("config {} is not valid JSON", path.display()))?;
    let Value::Object(entries) = doc else {
        anyhow::bail!("config {} must be a JSON object", path.display());
    };

    let sub = command.find_subcommand_mut(name).expect("matched subcommand exists");
    let usage = |msg: String| -> anyhow::Error { sub.clone().error(ErrorKind::UnknownArgument, msg).into() };
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &entries {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str()) && key != "config") else {
            return Err(usage(format!("config key {key:?} is not a flag of `{name}`")));
        };
        if value.is_null() || sub_matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = format!("--{key}");
        if !arg.get_action().takes_values() {
            match value {
                Value::Bool(true) => extra.push(flag.into()),
                Value::Bool(false) => {}
                _ => return Err(usage(format!("config key {key:?} must be true or false"))),
            }
            continue;
        }
        let items = match value {
            Value::Array(items) => items.iter().map(scalar).collect::<Option<Vec<_>>>(),
            other => scalar(other).map(|s| vec![s]),
        }
        .ok_or_else(|| usage(format!("config key {key:?} has an unsupported value")))?;
        if arg.get_value_delimiter().is_some() {
            extra.push(format!("{flag}={}", items.join(",")).into());
        } else {
            extra.extend(items.into_iter().map(|v| OsString::from(format!("{flag}={v}"))));
        }
    }

    let at = argv.iter().position(|a| a == name).expect("subcommand token present");
    let merged: Vec<OsString> = argv[..=at].iter().cloned().chain(extra).chain(argv[at + 1..].iter().cloned()).collect();
    Ok(Cli::try_parse_from(merged)?)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}
