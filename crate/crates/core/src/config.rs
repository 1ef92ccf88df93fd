//! Run configuration from a flat `key = value` file, later overridden by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::TruncationPolicy;

/// Largest genus accepted without `allow_high_genus`.
pub const GENUS_GUARD: u32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub genus_max: u32,
    pub t_count_max: u32,
    pub t_index_max: u32,
    pub x_degree_max: u32,
    pub aux_order: u32,
    pub cache: Option<PathBuf>,
    pub format: OutputFormat,
    pub allow_high_genus: bool,
}

impl Default for RunConfig {
    /// Sized so `verify main` finishes in well under a minute.
    fn default() -> Self {
        RunConfig {
            genus_max: 2,
            t_count_max: 3,
            t_index_max: 2,
            x_degree_max: 5,
            aux_order: 8,
            cache: None,
            format: OutputFormat::Markdown,
            allow_high_genus: false,
        }
    }
}

fn parse_u32(key: &str, v: &str) -> Result<u32> {
    v.parse().map_err(|_| Error::Parse(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

impl RunConfig {
    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(mut self, text: &str) -> Result<Self> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "genus_max" => self.genus_max = parse_u32(k, v)?,
                "t_count_max" => self.t_count_max = parse_u32(k, v)?,
                "t_index_max" => self.t_index_max = parse_u32(k, v)?,
                "x_degree_max" => self.x_degree_max = parse_u32(k, v)?,
                "aux_order" => self.aux_order = parse_u32(k, v)?,
                "cache" => self.cache = Some(PathBuf::from(v)),
                "format" => self.format = v.parse()?,
                "allow_high_genus" => self.allow_high_genus = parse_bool(k, v)?,
                _ => return Err(Error::Parse(format!("line {}: unknown key {k:?}", n + 1))),
            }
        }
        Ok(self)
    }

    pub fn apply_file(self, path: &Path) -> Result<Self> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.genus_max > GENUS_GUARD && !self.allow_high_genus {
            return Err(Error::Precondition(format!(
                "genus_max {} exceeds {GENUS_GUARD}; pass --allow-high-genus to run anyway",
                self.genus_max
            )));
        }
        if self.t_count_max > 12 || self.t_index_max > 12 || self.x_degree_max > 40 || self.aux_order > 64 {
            return Err(Error::Precondition("truncation bound out of range".into()));
        }
        Ok(())
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy::new(self.genus_max, self.t_count_max, self.t_index_max, self.x_degree_max, self.aux_order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_guard() {
        let c = RunConfig::default().apply_text("# run\ngenus_max = 5\nformat = csv\n\nt_count_max=1 # short\n").unwrap();
        assert_eq!((c.genus_max, c.t_count_max, c.format), (5, 1, OutputFormat::Csv));
        assert!(c.validate().is_err());
        assert!(RunConfig { allow_high_genus: true, ..c }.validate().is_ok());
        assert!(RunConfig::default().apply_text("depth = 3").is_err());
        assert!(RunConfig::default().apply_text("genus_max = -1").is_err());
    }
}
