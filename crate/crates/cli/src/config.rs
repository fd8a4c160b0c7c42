//! `--config FILE`: each `key=value` line becomes `--key value` in front of
//! the real arguments, so anything given on the command line wins.
//!
//! Blank lines and `#` comments are skipped. `_` in keys reads as `-`.
//! Switches take `true`/`false`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::CommandFactory;

use crate::cli::Cli;
use crate::error::CliError;

pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(sub_idx) = argv
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
    else {
        return Ok(argv);
    };
    let root = Cli::command();
    let Some(sub) = root.find_subcommand(argv[sub_idx].to_string_lossy().as_ref()) else {
        return Ok(argv);
    };
    let Some(path) = config_path(&argv[sub_idx + 1..]) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let injected = to_flags(&text, sub, &path)?;

    let mut out = argv[..=sub_idx].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[sub_idx + 1..]);
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

pub fn to_flags(text: &str, cmd: &clap::Command, path: &Path) -> Result<Vec<OsString>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(err("config files cannot include other config files".into()));
        }
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| err(format!("unknown key `{key}` for `{}`", cmd.get_name())))?;
        if arg.get_action().takes_values() {
            out.push(OsString::from(format!("--{key}")));
            out.push(OsString::from(value));
        } else {
            match value {
                "true" | "yes" | "1" => out.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => return Err(err(format!("`{key}` is a switch; expected true or false, got `{value}`"))),
            }
        }
    }
    Ok(out)
}
