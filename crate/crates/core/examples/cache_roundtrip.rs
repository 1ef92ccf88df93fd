//! Persisting correlator tables and auditing them.

use hodge_bgw::cache::Cache;
use hodge_bgw::config::OutputFormat;
use hodge_bgw::export::{correlator_table, CorrelatorKind};

fn main() -> hodge_bgw::Result<()> {
    let mut cache = Cache::new();
    let t = correlator_table(CorrelatorKind::Gbgw, 0..=1, 2, 1, &mut cache)?;
    print!("{}", t.render(OutputFormat::Csv));
    let path = std::env::temp_dir().join(format!("hbgw-example-{}.cache", std::process::id()));
    cache.store(&path)?;
    let back = Cache::load(&path)?;
    println!("stored {} records, reloaded identical: {}", cache.len(), back == cache);
    println!("audit: {}", if back.audit()?.passed() { "pass" } else { "fail" });
    std::fs::remove_file(&path)?;
    Ok(())
}
