//! Config files: TOML with top-level keys and one table per subcommand.
//!
//! ```toml
//! seed = 42
//!
//! [verify]
//! theorems = "t2.1,t2.3"
//! samples = 10000
//! rho-range = "0.1:0.9"
//! strict-feasibility = true
//! ```
//!
//! Every key is a flag name (`_` and `-` are interchangeable). The entries
//! are spliced into the argument list right after the subcommand, so flags
//! given on the command line override them.

use std::ffi::OsString;
use std::path::Path;

use revineq_core::error::{Error, Result};
use toml::{Table, Value};

/// Removes `--config PATH` (or `--config=PATH`) from `argv` and splices the
/// file's entries in after the subcommand.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let value = iter
                .next()
                .ok_or_else(|| Error::Usage("--config needs a path".into()))?;
            path = Some(value);
        } else if let Some(v) = s.strip_prefix("--config=") {
            path = Some(OsString::from(v));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    // argv[0] is the program; the subcommand is the first non-flag after it
    let Some(pos) = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1)
    else {
        return Err(Error::Usage("--config given without a subcommand".into()));
    };
    let sub = rest[pos].to_string_lossy().into_owned();
    let injected = load(Path::new(&path), &sub)?;
    rest.splice(pos + 1..pos + 1, injected.into_iter().map(OsString::from));
    Ok(rest)
}

fn load(path: &Path, subcommand: &str) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let table: Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    to_args(&table, subcommand)
}

/// Top-level scalars first, then the subcommand's table. Other tables are
/// ignored so one file can serve several subcommands.
pub fn to_args(table: &Table, subcommand: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    for (key, value) in table {
        if !value.is_table() {
            push_flag(&mut args, key, value)?;
        }
    }
    if let Some(section) = table.get(subcommand) {
        let section = section
            .as_table()
            .ok_or_else(|| Error::Parse(format!("`{subcommand}` must be a table")))?;
        for (key, value) in section {
            push_flag(&mut args, key, value)?;
        }
    }
    Ok(args)
}

fn push_flag(args: &mut Vec<String>, key: &str, value: &Value) -> Result<()> {
    let flag = format!("--{}", key.replace('_', "-"));
    let text = match value {
        Value::Boolean(true) => {
            args.push(flag);
            return Ok(());
        }
        Value::Boolean(false) => return Ok(()),
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => Ok(s.clone()),
                Value::Integer(i) => Ok(i.to_string()),
                Value::Float(f) => Ok(f.to_string()),
                _ => Err(Error::Parse(format!("`{key}`: unsupported list entry {v}"))),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        other => return Err(Error::Parse(format!("`{key}`: unsupported value {other}"))),
    };
    args.push(flag);
    args.push(text);
    Ok(())
}
