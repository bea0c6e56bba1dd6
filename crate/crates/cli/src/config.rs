//! Flat `key = value` config files.
//!
//! A config file supplies defaults for the flags of a subcommand. Keys are
//! flag names (`N`, `gamma`, `n_traj` or `n-traj`, ...); `#` starts a
//! comment. A key that no subcommand knows is an error; a key known to
//! some other subcommand is skipped so one file can serve several runs.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::Cli;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {}: expected key = value, got {raw:?}", k + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError(format!("line {}: empty key or value", k + 1)));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(ConfigError(format!("line {}: duplicate key {key:?}", k + 1)));
        }
    }
    Ok(out)
}

fn long_flags(cmd: &clap::Command) -> Vec<String> {
    cmd.get_arguments()
        .filter_map(|a| a.get_long().map(str::to_string))
        .filter(|l| l != "config" && l != "help")
        .collect()
}

/// Splices config entries in front of the user's own flags so that the
/// flags win (the parser lets a later occurrence override an earlier one).
pub fn splice_config(argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| ConfigError("--config needs a path".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", Path::new(&path).display())))?;
    let entries = parse_config(&text)?;

    let root = Cli::command();
    let global = long_flags(&root);
    let sub_pos = rest.iter().position(|a| {
        let s = a.to_string_lossy();
        root.get_subcommands().any(|c| c.get_name() == s)
    });
    let Some(sub_pos) = sub_pos else { return Ok(rest) };
    let sub_name = rest[sub_pos].to_string_lossy().into_owned();
    let sub = root.find_subcommand(&sub_name).expect("found above");
    let local = long_flags(sub);
    let known: Vec<String> = root.get_subcommands().flat_map(long_flags).chain(global.iter().cloned()).collect();

    let mut before = Vec::new();
    let mut after = Vec::new();
    for (key, value) in entries {
        if !known.contains(&key) {
            return Err(ConfigError(format!("unknown config key {key:?}")));
        }
        let pair = [OsString::from(format!("--{key}")), OsString::from(value)];
        if global.contains(&key) {
            before.extend(pair);
        } else if local.contains(&key) {
            after.extend(pair);
        }
    }
    let mut out = Vec::with_capacity(rest.len() + before.len() + after.len());
    out.push(rest[0].clone());
    out.extend(before);
    out.extend(rest[1..=sub_pos].iter().cloned());
    out.extend(after);
    out.extend(rest[sub_pos + 1..].iter().cloned());
    Ok(out)
}
