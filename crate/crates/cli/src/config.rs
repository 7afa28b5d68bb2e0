//! Flat `key = value` config files.
//!
//! Keys are long flag names (`n-shots` or `n_shots`). The file's entries are
//! spliced in as `--key=value` right after the subcommand, ahead of the real
//! command-line flags, and clap keeps the last occurrence of each flag.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, Result};

/// Flags that clap treats as mutually exclusive. A file entry is dropped when
/// the command line sets the other member of its pair.
const EXCLUSIVE: &[(&str, &str)] = &[("c0", "state"), ("psi0", "thetas")];

/// Keys accepted in a file but never turned into flags.
const IGNORED: &[&str] = &["config", "version"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub entries: Vec<(String, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            if key.is_empty() {
                return Err(CliError::config(format!("config line {}: empty key", lineno + 1)));
            }
            let value = v.trim().to_string();
            match entries.iter_mut().find(|(k, _)| *k == key) {
                Some(slot) => slot.1 = value,
                None => entries.push((key, value)),
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Returns the value of `--config` if present after the subcommand.
fn find_config(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn sets_flag(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&format!("{flag}="))
    })
}

/// Expands `--config FILE` into explicit flags. `args[0]` is the program
/// name and `args[1]` the subcommand.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    if args.len() < 2 {
        return Ok(args);
    }
    let rest = &args[2..];
    let Some(path) = find_config(rest) else {
        return Ok(args);
    };
    let file = ConfigFile::load(Path::new(&path))?;
    let command = args[1].to_string_lossy().into_owned();

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in &file.entries {
        if key == "command" {
            if *value != command {
                return Err(CliError::config(format!(
                    "config is for '{value}' but the command is '{command}'"
                )));
            }
            continue;
        }
        if IGNORED.contains(&key.as_str()) {
            continue;
        }
        let shadowed = EXCLUSIVE.iter().any(|&(a, b)| {
            (key == a && sets_flag(rest, b)) || (key == b && sets_flag(rest, a))
        });
        if shadowed {
            continue;
        }
        injected.push(format!("--{key}={value}").into());
    }

    let mut out = Vec::with_capacity(args.len() + injected.len());
    out.extend_from_slice(&args[..2]);
    out.extend(injected);
    out.extend_from_slice(rest);
    Ok(out)
}
