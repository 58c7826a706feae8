//! `--config FILE`: `key=value` lines turned into `--key=value` flags placed
//! ahead of the command line, so explicit flags override the file.
//!
//! Blank lines and lines starting with `#` are ignored. `key=true` becomes
//! the bare switch `--key` and `key=false` is dropped.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::CliError;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--" {
            return None;
        }
        if text == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = text.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

pub fn parse_config(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::input(format!(
                "{}:{}: expected key=value, found {line:?}",
                path.display(),
                i + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key == "config" {
            return Err(CliError::input(format!(
                "{}:{}: invalid key {key:?}",
                path.display(),
                i + 1
            )));
        }
        match value {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            // an empty list has no flag spelling; leave the default in place
            "" => {}
            _ => flags.push(format!("--{key}={value}").into()),
        }
    }
    Ok(flags)
}

/// `argv` with the config flags spliced in after the subcommand.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let flags = parse_config(Path::new(&path))?;
    let split = argv.len().min(2);
    let mut out: Vec<OsString> = argv[..split].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[split..]);
    Ok(out)
}
