//! INI-style configuration: one section per subcommand, flat `key = value`
//! pairs, comma-separated lists. Unknown keys and sections are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::error::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

/// Sections a config file may contain. `manifest` carries provenance and is
/// ignored on input.
pub const SECTIONS: [&str; 5] = ["boundary", "detect", "simulate", "matrix", "manifest"];

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    sections: Vec<(String, Vec<Entry>)>,
    base_dir: PathBuf,
}

impl Config {
    /// Reads `path`, or returns an empty config when there is none.
    /// Relative paths inside the file resolve against its directory.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cwd = std::env::current_dir().map_err(|e| CliError::io(Path::new("."), e))?;
        match path {
            None => Ok(Config {
                sections: Vec::new(),
                base_dir: cwd,
            }),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let dir = path.parent().map(|p| cwd.join(p)).unwrap_or(cwd);
                Self::parse(&text, &path.display().to_string(), dir)
            }
        }
    }

    pub fn parse(text: &str, label: &str, base_dir: PathBuf) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Syntax {
            path: label.to_string(),
            line: e.line,
            col: e.col,
            message: e.msg.to_string(),
        })?;
        let mut sections = Vec::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::Config {
                        section: String::new(),
                        key: key.to_string(),
                        line: locate(text, None, key),
                        message: "key outside any section".into(),
                    });
                }
                continue;
            };
            if !SECTIONS.contains(&name) {
                return Err(CliError::Syntax {
                    path: label.to_string(),
                    line: locate_section(text, name).unwrap_or(0),
                    col: 1,
                    message: format!(
                        "unknown section [{name}] (expected one of {})",
                        SECTIONS.join(", ")
                    ),
                });
            }
            let mut entries: Vec<Entry> = Vec::new();
            for (key, value) in props.iter() {
                let line = locate(text, Some(name), key);
                if entries.iter().any(|e| e.key == key) {
                    return Err(CliError::Config {
                        section: name.to_string(),
                        key: key.to_string(),
                        line,
                        message: "duplicate key".into(),
                    });
                }
                entries.push(Entry {
                    key: key.to_string(),
                    value: value.trim().to_string(),
                    line,
                });
            }
            sections.push((name.to_string(), entries));
        }
        Ok(Config { sections, base_dir })
    }

    /// Keys of section `name`; empty when the section is absent.
    pub fn section(&self, name: &str) -> Section {
        let entries = self
            .sections
            .iter()
            .filter(|(n, _)| n == name)
            .flat_map(|(_, e)| e.iter().cloned())
            .collect::<Vec<_>>();
        Section {
            name: name.to_string(),
            used: vec![false; entries.len()],
            entries,
            base_dir: self.base_dir.clone(),
        }
    }
}

fn header_name(line: &str) -> Option<&str> {
    let t = line.trim();
    t.strip_prefix('[')?.strip_suffix(']').map(str::trim)
}

fn locate_section(text: &str, name: &str) -> Option<usize> {
    text.lines()
        .position(|l| header_name(l) == Some(name))
        .map(|i| i + 1)
}

/// 1-based line of `key` inside `section` (`None` for the leading keys).
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<&str> = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(name) = header_name(line) {
            current = Some(name);
            continue;
        }
        if current != section {
            continue;
        }
        if let Some((k, _)) = line.split_once(['=', ':']) {
            if k.trim() == key {
                return Some(i + 1);
            }
        }
    }
    None
}

/// The keys of one section, consumed as they are read.
#[derive(Debug)]
pub struct Section {
    name: String,
    entries: Vec<Entry>,
    used: Vec<bool>,
    base_dir: PathBuf,
}

impl Section {
    fn line(&self, key: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .and_then(|e| e.line)
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            section: self.name.clone(),
            key: key.to_string(),
            line: self.line(key),
            message: message.into(),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    pub fn str(&mut self, key: &str) -> Option<String> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        self.used[i] = true;
        Some(self.entries[i].value.clone())
    }

    pub fn parse<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| self.error(key, format!("invalid {what} `{v}`"))),
        }
    }

    pub fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.parse::<f64>(key, "number")? {
            Some(v) if !v.is_finite() => Err(self.error(key, format!("{v} is not finite"))),
            other => Ok(other),
        }
    }

    pub fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.parse(key, "non-negative integer")
    }

    pub fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.parse(key, "non-negative integer")
    }

    pub fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.list(key, "number")?
            .map(|items| {
                if let Some(bad) = items.iter().find(|v: &&f64| !v.is_finite()) {
                    return Err(self.error(key, format!("{bad} is not finite")));
                }
                Ok(items)
            })
            .transpose()
    }

    pub fn list<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<Vec<T>>> {
        let Some(raw) = self.str(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse()
                    .map_err(|_| self.error(key, format!("invalid {what} `{item}` in list")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// A path resolved against the config file's directory.
    pub fn path(&mut self, key: &str) -> Option<PathBuf> {
        self.str(key).map(|p| self.base_dir.join(p))
    }

    pub fn require<T>(&self, key: &str, value: Option<T>) -> Result<T> {
        value.ok_or_else(|| self.error(key, "required key is missing"))
    }

    /// Fails on the first key nobody read.
    pub fn finish(&self) -> Result<()> {
        match self.entries.iter().zip(&self.used).find(|(_, &u)| !u) {
            None => Ok(()),
            Some((e, _)) => Err(self.error(&e.key, "unknown or unused key")),
        }
    }
}
