//! Flat `key = value` config files, spliced into argv ahead of the command-line flags.

use std::path::Path;

use walklab::{Error, Result};

pub const SUBCOMMANDS: [&str; 7] = ["walk", "inverted-orbit", "lamplighter", "liouville", "spectral", "ball", "verify"];

/// `key = value` lines as `--key=value` flags; `#` starts a comment, `_` and `-` are interchangeable.
pub fn config_flags(text: &str) -> Result<(Option<String>, Vec<String>)> {
    let mut command = None;
    let mut flags = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", ln + 1)))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", ln + 1)));
        }
        match key.as_str() {
            "command" => command = Some(value.to_string()),
            "config" => return Err(Error::Parse(format!("config line {}: nested config files are not supported", ln + 1))),
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    Ok((command, flags))
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
        if a == "--config" {
            return it.next().cloned();
        }
    }
    None
}

/// Inserts config flags right after the subcommand so that later command-line flags override them.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| Error::Config(format!("cannot read config file {path:?}: {e}")))?;
    let (command, flags) = config_flags(&text)?;
    let pos = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str()));
    let mut out = args;
    let at = match pos {
        Some(p) => p + 1,
        None => {
            let cmd = command.ok_or_else(|| Error::Config("no subcommand given on the command line or as `command` in the config".into()))?;
            out.insert(1, cmd);
            2
        }
    };
    out.splice(at..at, flags);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_flags_and_comments() {
        let (c, f) = config_flags("# run\ncommand = walk\nn = 5 # steps\nmeasure_file=a.txt\n\n").unwrap();
        assert_eq!(c.as_deref(), Some("walk"));
        assert_eq!(f, s(&["--n=5", "--measure-file=a.txt"]));
        assert!(config_flags("n 5").is_err());
    }

    #[test]
    fn config_flags_precede_user_flags() {
        let dir = std::env::temp_dir().join(format!("walklab-config-{}", std::process::id()));
        std::fs::write(&dir, "n = 5\nseed = 3\n").unwrap();
        let p = dir.to_string_lossy().to_string();
        let out = expand_args(s(&["walklab", "walk", "--config", &p, "--n", "7"])).unwrap();
        assert_eq!(out, s(&["walklab", "walk", "--n=5", "--seed=3", "--config", &p, "--n", "7"]));
        std::fs::remove_file(dir).unwrap();
    }
}
