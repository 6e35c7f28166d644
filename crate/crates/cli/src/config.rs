//! Flat `key = value` config files. Keys are long flag names; list values are
//! whitespace separated. File values come first, so flags on the command line win.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const COMMANDS: [&str; 5] = ["moments", "expansion", "mellin", "simulate", "verify"];

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub entries: Vec<(String, String)>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile {
        command: None,
        entries: Vec::new(),
    };
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got '{line}'", no + 1);
        };
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if k.is_empty() {
            bail!("config line {}: empty key", no + 1);
        }
        if k == "command" {
            if !COMMANDS.contains(&v) {
                bail!("config line {}: unknown command '{v}'", no + 1);
            }
            cfg.command = Some(v.to_string());
        } else {
            cfg.entries.push((k.to_string(), v.to_string()));
        }
    }
    Ok(cfg)
}

impl ConfigFile {
    fn flags(&self) -> Vec<OsString> {
        let mut out = Vec::new();
        for (k, v) in &self.entries {
            match v.as_str() {
                "true" => out.push(format!("--{k}").into()),
                "false" => {}
                _ => {
                    out.push(format!("--{k}").into());
                    out.extend(v.split_whitespace().map(OsString::from));
                }
            }
        }
        out
    }
}

/// Splice `--config FILE` into the argument list: program, subcommand, file flags, remaining flags.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::new();
    let mut path = None;
    let mut it = args.into_iter();
    let program = it.next().unwrap_or_else(|| "gmc".into());
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().context("--config needs a file")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .with_context(|| format!("reading config {}", Path::new(&path).display()))?;
    let cfg = parse_config(&text)?;

    let pos = rest.iter().position(|a| COMMANDS.contains(&a.to_string_lossy().as_ref()));
    let command: OsString = match (pos, &cfg.command) {
        (Some(i), _) => rest.remove(i),
        (None, Some(c)) => c.into(),
        (None, None) => bail!("no subcommand on the command line or in the config file"),
    };
    let mut out = vec![program, command];
    out.extend(cfg.flags());
    out.extend(rest);
    Ok(out)
}
