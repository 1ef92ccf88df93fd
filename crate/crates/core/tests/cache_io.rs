//! Cache files: round trip, rejection and audit.

use hodge_bgw::cache::{Cache, CacheKind, CacheRecord};
use hodge_bgw::export::{correlator_table, CorrelatorKind};
use hodge_bgw::hodge::hodge_correlator;
use hodge_bgw::util::q;

fn sample() -> Cache {
    let mut c = Cache::new();
    correlator_table(CorrelatorKind::Wk, 0..=2, 4, 2, &mut c).unwrap();
    correlator_table(CorrelatorKind::Gbgw, 0..=2, 1, 2, &mut c).unwrap();
    c.insert(CacheRecord::new(CacheKind::Hodge, 2, &[], hodge_correlator(2, &[])));
    c
}

#[test]
fn store_then_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    let c = sample();
    c.store(&path).unwrap();
    assert_eq!(Cache::load(&path).unwrap(), c);
    assert_eq!(c.get(CacheKind::Wk, 1, &[1]), Some(&q(1, 24)));
    assert_eq!(c.get(CacheKind::GbgwC, 1, &[0]), Some(&q(1, 8)));
}

#[test]
fn truncated_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    sample().store(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    for cut in [text.len() - 1, text.len() - 3, 5, 0] {
        std::fs::write(&path, &text[..cut]).unwrap();
        assert!(Cache::load(&path).is_err(), "cut at {cut}");
    }
}

#[test]
fn one_bad_line_rejects_everything() {
    let text = sample().to_text();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = "wk;1;;";
    assert!(Cache::from_text(&(lines.join("\n") + "\n")).is_err());
    let bumped = text.replacen("hbgw-cache 1", "hbgw-cache 9", 1);
    assert!(Cache::from_text(&bumped).is_err());
}

#[test]
fn failed_store_leaves_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.cache");
    let c = sample();
    c.store(&path).unwrap();
    let before = std::fs::read(&path).unwrap();
    // the temporary sibling cannot be created
    std::fs::create_dir(dir.path().join("t.cache.tmp")).unwrap();
    let mut bigger = c.clone();
    bigger.insert(CacheRecord::new(CacheKind::Wk, 3, &[7], q(1, 82944)));
    assert!(bigger.store(&path).is_err());
    assert_eq!(std::fs::read(&path).unwrap(), before);
}

#[test]
fn audit_recomputes() {
    let c = sample();
    let rep = c.audit().unwrap();
    assert!(rep.passed());
    assert_eq!(rep.checked, c.len());
    let mut bad = c.clone();
    bad.insert(CacheRecord::new(CacheKind::GbgwC, 0, &[1], q(1, 95)));
    let rep = bad.audit().unwrap();
    assert_eq!(rep.failures.len(), 1);
    assert_eq!(rep.failures[0].rhs, q(1, 96));
}
