//! Flat `key = value` config files with `[section]` headers.
//!
//! Keys are long flag names. Sections only group keys for readers; the
//! `[meta]` section is informational and skipped on input, so a `run.meta`
//! file is itself a valid config for its subcommand.

use std::fmt::Write as _;

use clap::{ArgAction, ArgMatches, Command};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub section: String,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut section = String::new();
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| format!("line {}: unterminated section", i + 1))?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if section != "meta" {
            if let Some(prev) = out.iter().find(|e| e.section != "meta" && e.key == key) {
                return Err(format!("line {}: key '{key}' already set on line {}", i + 1, prev.line));
            }
        }
        out.push(Entry { line: i + 1, section: section.clone(), key, value: v.trim().to_string() });
    }
    Ok(out)
}

/// Position of the subcommand token and the config path, if any.
fn locate(argv: &[String]) -> (Option<usize>, Option<String>) {
    let sub = argv.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1);
    let mut path = None;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    (sub, path)
}

/// Splices config entries in front of the command-line flags so that later
/// (command-line) occurrences override them.
pub fn expand_argv(root: &Command, argv: Vec<String>) -> Result<Vec<String>, String> {
    let (Some(sub_at), Some(path)) = locate(&argv) else {
        return Ok(argv);
    };
    let Some(sub) = root.find_subcommand(&argv[sub_at]) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
    let entries = parse(&text).map_err(|e| format!("config {path}: {e}"))?;
    let mut injected = Vec::new();
    for e in entries.iter().filter(|e| e.section != "meta") {
        if e.key == "config" {
            return Err(format!("config {path}: line {}: nested config files are not supported", e.line));
        }
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(e.key.as_str()))
            .ok_or_else(|| format!("config {path}: line {}: unknown key '{}' for {}", e.line, e.key, sub.get_name()))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match e.value.as_str() {
                "true" => injected.push(format!("--{}", e.key)),
                "false" => {}
                v => return Err(format!("config {path}: line {}: '{}' expects true or false, got '{v}'", e.line, e.key)),
            }
        } else {
            let parts: Vec<&str> = e.value.split_whitespace().collect();
            if parts.len() == 1 {
                // `--key=value` keeps negative scalars unambiguous
                injected.push(format!("--{}={}", e.key, parts[0]));
            } else {
                injected.push(format!("--{}", e.key));
                injected.extend(parts.iter().map(|s| s.to_string()));
            }
        }
    }
    let mut out = argv[..=sub_at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[sub_at + 1..]);
    Ok(out)
}

/// Effective parameters of a parsed run, grouped by section, in a form
/// [`expand_argv`] accepts back.
pub fn render_meta(sub: &Command, m: &ArgMatches, seed: u64) -> String {
    let mut s = String::new();
    s.push_str("# gevrey-nse run metadata; reusable as --config for the same subcommand\n");
    s.push_str("[meta]\n");
    let _ = writeln!(s, "subcommand = {}", sub.get_name());
    let _ = writeln!(s, "cli_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "core_version = {}", gevrey_nse::VERSION);
    let _ = writeln!(s, "seed = {seed}");
    let threads = std::env::var(crate::THREADS_ENV).unwrap_or_else(|_| "unset".into());
    let _ = writeln!(s, "threads_cap = {threads}");

    let mut sections: Vec<(String, Vec<(String, String)>)> = Vec::new();
    for arg in sub.get_arguments() {
        let Some(long) = arg.get_long() else { continue };
        if long == "config" || !matches!(arg.get_action(), ArgAction::Set | ArgAction::Append | ArgAction::SetTrue) {
            continue;
        }
        let Ok(Some(raw)) = m.try_get_raw(arg.get_id().as_str()) else { continue };
        let value = raw.map(|v| v.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
        let heading = arg.get_help_heading().unwrap_or("general").to_string();
        match sections.iter_mut().find(|(h, _)| *h == heading) {
            Some((_, v)) => v.push((long.to_string(), value)),
            None => sections.push((heading, vec![(long.to_string(), value)])),
        }
    }
    for (h, kv) in sections {
        let _ = writeln!(s, "\n[{h}]");
        for (k, v) in kv {
            let _ = writeln!(s, "{k} = {v}");
        }
    }
    s
}
