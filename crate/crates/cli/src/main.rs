mod args;
mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command};
use commands::Outcome;

fn finite(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        _ => Value::Null,
    }
}

/// The subcommand flags as `key = value` lines; feeding them back through `--config` repeats the run.
fn config_lines(command: &Command) -> Result<Vec<String>> {
    let v = serde_json::to_value(command)?;
    let (name, fields) = v
        .as_object()
        .and_then(|o| o.iter().next())
        .context("unexpected argument layout")?;
    let mut lines = vec![format!("command = {name}")];
    for (k, v) in fields.as_object().context("unexpected argument layout")? {
        let value = match v {
            Value::Null => continue,
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().map(Value::to_string).collect::<Vec<_>>().join(" "),
            other => other.to_string(),
        };
        lines.push(format!("{} = {value}", k.replace('_', "-")));
    }
    Ok(lines)
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_outputs(cli: &Cli, out: &Outcome, threads: usize) -> Result<()> {
    let Some(path) = &cli.output else {
        let stdout = std::io::stdout();
        out.table.emit(cli.format, stdout.lock())?;
        return Ok(());
    };
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    out.table.emit(cli.format, &mut w)?;
    w.flush()?;

    let meta = json!({
        "command": cli.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "args": serde_json::to_value(&cli.command)?,
        "config": config_lines(&cli.command)?,
        "format": cli.format,
        "threads": threads,
        "mu": finite(out.mu),
        "tau": finite(out.tau),
        "achieved_tolerance": finite(out.achieved),
        "rows": out.table.rows.len(),
        "all_rows_ok": out.table.all_ok(),
        "passed": out.passed,
    });
    let side = sidecar_path(path);
    std::fs::write(&side, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", side.display()))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Moments(a) => commands::moments(a),
        Command::Expansion(a) => commands::expansion(a),
        Command::Mellin(a) => commands::mellin(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: threads: {e}");
            return ExitCode::from(1);
        }
    }
    let threads = rayon::current_num_threads();
    let result = run(&cli).and_then(|out| {
        write_outputs(&cli, &out, threads)?;
        Ok(out)
    });
    match result {
        Ok(out) if out.passed == Some(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
