//! `<out>.manifest.ini`: the resolved settings of a run in config form, so
//! `--config <manifest>` reproduces the output.

use std::path::{Path, PathBuf};
use std::time::SystemTime;

use ini::Ini;

use crate::error::CliError;

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.ini");
    s.into()
}

pub fn write(
    out: &Path,
    subcommand: &str,
    resolved: &[(String, String)],
) -> Result<PathBuf, CliError> {
    let mut ini = Ini::new();
    ini.with_section(Some("manifest"))
        .set("subcommand", subcommand)
        .set("version", env!("CARGO_PKG_VERSION"))
        .set(
            "timestamp",
            humantime::format_rfc3339_seconds(SystemTime::now()).to_string(),
        );
    let mut section = ini.with_section(Some(subcommand));
    for (k, v) in resolved {
        section.set(k.as_str(), v.as_str());
    }
    let path = manifest_path(out);
    ini.write_to_file(&path)
        .map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
