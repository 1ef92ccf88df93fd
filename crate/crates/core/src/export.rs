//! Correlator tables and reports rendered as JSON, CSV or Markdown.
//! Rationals are always strings.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::cache::{Cache, CacheKind, CacheRecord};
use crate::config::OutputFormat;
use crate::error::Result;
use crate::gbgw::GbgwCorrelators;
use crate::hodge::{hodge_correlator, lambda_degree};
use crate::report::VerificationReport;
use crate::util::multisets_with_sum;
use crate::wk::wk_correlator;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let objs: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| self.columns.iter().cloned().zip(r.iter().map(|v| v.clone().into())).collect())
                    .collect();
                serde_json::to_string_pretty(&objs).expect("strings serialize") + "\n"
            }
            OutputFormat::Csv => {
                let mut s = String::new();
                for line in std::iter::once(&self.columns).chain(&self.rows) {
                    let f: Vec<String> = line.iter().map(|x| csv_field(x)).collect();
                    s.push_str(&f.join(","));
                    s.push('\n');
                }
                s
            }
            OutputFormat::Markdown => {
                let mut s = format!("| {} |\n", self.columns.join(" | "));
                s.push_str(&format!("|{}\n", "---|".repeat(self.columns.len())));
                for r in &self.rows {
                    s.push_str(&format!("| {} |\n", r.join(" | ")));
                }
                s
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelatorKind {
    Wk,
    Hodge,
    Gbgw,
}

fn index_str(a: &[u32]) -> String {
    a.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// Nonzero correlators of one kind.
///
/// `wk`, `hodge`: every sorted insertion list of length `1..=n_max` with
/// entries at most `a_max` that the dimension rule allows.
/// `gbgw`: `c_g(a)` for lists of length `1..=n_max`, entries at most `a_max`.
/// Every value is also recorded in `cache`.
pub fn correlator_table(
    kind: CorrelatorKind,
    genera: RangeInclusive<u32>,
    a_max: u32,
    n_max: u32,
    cache: &mut Cache,
) -> Result<Table> {
    let mut t = Table::new(&["kind", "g", "indices", "value"]);
    if genera.is_empty() || n_max == 0 {
        return Ok(t);
    }
    let gb = match kind {
        CorrelatorKind::Gbgw => Some(GbgwCorrelators::new(n_max, a_max)),
        _ => None,
    };
    for g in genera {
        for n in 1..=n_max as usize {
            let lists: Vec<Vec<u32>> = match kind {
                CorrelatorKind::Wk => {
                    let s = 3 * g as i64 - 3 + n as i64;
                    if s < 0 {
                        continue;
                    }
                    multisets_with_sum(n, s as u32, 0)
                }
                CorrelatorKind::Hodge => {
                    let top = 3 * g as i64 - 3 + n as i64;
                    (0..=top.max(-1)).flat_map(|s| multisets_with_sum(n, s as u32, 0)).collect()
                }
                CorrelatorKind::Gbgw => (0..=n as u32 * a_max).flat_map(|s| multisets_with_sum(n, s, 0)).collect(),
            };
            for a in lists.into_iter().filter(|a| a.iter().all(|&i| i <= a_max)) {
                let (name, ck, v) = match kind {
                    CorrelatorKind::Wk => ("wk", CacheKind::Wk, wk_correlator(g, &a)),
                    CorrelatorKind::Hodge => {
                        if lambda_degree(g, &a) > 3 * g as i64 {
                            continue;
                        }
                        ("hodge", CacheKind::Hodge, hodge_correlator(g, &a))
                    }
                    CorrelatorKind::Gbgw => ("gbgw-c", CacheKind::GbgwC, gb.as_ref().unwrap().correlator(g, &a)?),
                };
                if v == num_traits::Zero::zero() {
                    continue;
                }
                t.rows.push(vec![name.into(), g.to_string(), index_str(&a), v.to_string()]);
                cache.insert(CacheRecord::new(ck, g, &a, v));
            }
        }
    }
    Ok(t)
}

/// Report summary plus mismatch rows.
pub fn render_report(rep: &VerificationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rep).expect("strings serialize") + "\n",
        _ => {
            let mut t = Table::new(&["target", "status", "checked", "mismatch", "lhs", "rhs"]);
            let status = if rep.passed() { "pass" } else { "fail" };
            t.rows.push(vec![rep.name.clone(), status.into(), rep.checked.to_string(), String::new(), String::new(), String::new()]);
            for m in &rep.failures {
                t.rows.push(vec![
                    rep.name.clone(),
                    "fail".into(),
                    String::new(),
                    m.monomial.clone(),
                    m.lhs.to_string(),
                    m.rhs.to_string(),
                ]);
            }
            let mut out = t.render(format);
            if format == OutputFormat::Markdown {
                for n in &rep.notes {
                    out.push_str(&format!("\n{n}\n"));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::q;

    #[test]
    fn wk_genus_one() {
        let mut c = Cache::new();
        let t = correlator_table(CorrelatorKind::Wk, 1..=1, 3, 1, &mut c).unwrap();
        assert_eq!(t.rows, vec![vec!["wk", "1", "1", "1/24"]]);
        assert_eq!(c.get(CacheKind::Wk, 1, &[1]), Some(&q(1, 24)));
    }

    #[test]
    fn formats() {
        let mut t = Table::new(&["a", "b"]);
        t.rows.push(vec!["0,1".into(), "-1/3".into()]);
        assert_eq!(t.render(OutputFormat::Csv), "a,b\n\"0,1\",-1/3\n");
        assert_eq!(t.render(OutputFormat::Markdown), "| a | b |\n|---|---|\n| 0,1 | -1/3 |\n");
        let v: serde_json::Value = serde_json::from_str(&t.render(OutputFormat::Json)).unwrap();
        assert_eq!(v[0]["b"], "-1/3");
    }

    #[test]
    fn empty_range() {
        #[allow(clippy::reversed_empty_ranges)]
        let t = correlator_table(CorrelatorKind::Gbgw, 1..=0, 2, 1, &mut Cache::new()).unwrap();
        assert!(t.rows.is_empty());
    }
}
