//! Line-oriented persistent store for correlator tables.
//!
//! ```text
//! hbgw-cache 1
//! wk;1;1;1/24
//! gbgw-c;0;0,0,0;1/4
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gbgw::correlator_c;
use crate::hodge::HodgeTable;
use crate::report::VerificationReport;
use crate::series::Rational;
use crate::wk::{WkKey, WkTable};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "hbgw-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CacheKind {
    Wk,
    Hodge,
    GbgwC,
}

impl fmt::Display for CacheKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CacheKind::Wk => "wk",
            CacheKind::Hodge => "hodge",
            CacheKind::GbgwC => "gbgw-c",
        })
    }
}

impl FromStr for CacheKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wk" => Ok(CacheKind::Wk),
            "hodge" => Ok(CacheKind::Hodge),
            "gbgw-c" => Ok(CacheKind::GbgwC),
            _ => Err(Error::Parse(format!("unknown record kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheRecord {
    pub kind: CacheKind,
    pub g: u32,
    /// Sorted.
    pub indices: Vec<u32>,
    pub value: Rational,
}

impl CacheRecord {
    pub fn new(kind: CacheKind, g: u32, indices: &[u32], value: Rational) -> Self {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        CacheRecord { kind, g, indices, value }
    }

    /// Value recomputed with a fresh memo table for its own kind.
    pub fn recompute(&self) -> Result<Rational> {
        Ok(match self.kind {
            CacheKind::Wk => WkTable::new().correlator(self.g, &self.indices),
            CacheKind::Hodge => HodgeTable::new().correlator(self.g, &self.indices),
            CacheKind::GbgwC => correlator_c(self.g, &self.indices)?,
        })
    }
}

impl fmt::Display for CacheRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{};{};{};{}/{}", self.kind, self.g, idx.join(","), self.value.numer(), self.value.denom())
    }
}

impl FromStr for CacheRecord {
    type Err = Error;
    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed cache line {line:?}"));
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let kind = fields[0].parse()?;
        let g = fields[1].parse().map_err(|_| bad())?;
        let indices = if fields[2].is_empty() {
            Vec::new()
        } else {
            fields[2].split(',').map(|s| s.parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
        };
        if !fields[3].contains('/') {
            return Err(bad());
        }
        let value = Rational::from_str(fields[3]).map_err(|_| bad())?;
        Ok(CacheRecord::new(kind, g, &indices, value))
    }
}

type Key = (CacheKind, u32, Vec<u32>);

/// An in-memory set of records keyed by kind, genus and sorted indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cache {
    records: BTreeMap<Key, Rational>,
}

impl Cache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn insert(&mut self, r: CacheRecord) {
        self.records.insert((r.kind, r.g, r.indices), r.value);
    }

    pub fn get(&self, kind: CacheKind, g: u32, indices: &[u32]) -> Option<&Rational> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        self.records.get(&(kind, g, idx))
    }

    pub fn records(&self) -> impl Iterator<Item = CacheRecord> + '_ {
        self.records.iter().map(|((k, g, i), v)| CacheRecord { kind: *k, g: *g, indices: i.clone(), value: v.clone() })
    }

    /// Everything currently memoized in the process-wide tables.
    pub fn snapshot_globals() -> Self {
        let mut c = Cache::new();
        for (k, v) in WkTable::global().entries() {
            c.insert(CacheRecord::new(CacheKind::Wk, k.g, &k.indices, v));
        }
        for (k, v) in HodgeTable::global().entries() {
            c.insert(CacheRecord::new(CacheKind::Hodge, k.g, &k.indices, v));
        }
        c
    }

    /// Seeds the process-wide memo tables. `gbgw-c` records have no global
    /// table and are left in the cache.
    pub fn install_globals(&self) {
        for r in self.records() {
            match r.kind {
                CacheKind::Wk => WkTable::global().insert(WkKey::new(r.g, &r.indices), r.value),
                CacheKind::Hodge => HodgeTable::global().insert(WkKey::new(r.g, &r.indices), r.value),
                CacheKind::GbgwC => {}
            }
        }
    }

    pub fn merge(&mut self, other: &Cache) {
        for r in other.records() {
            self.insert(r);
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MAGIC} {FORMAT_VERSION}\n");
        for r in self.records() {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses a whole file; any bad line rejects all of it.
    pub fn from_text(text: &str) -> Result<Self> {
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(Error::Parse("cache file truncated (no final newline)".into()));
        }
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty cache file".into()))?;
        match header.split_once(' ') {
            Some((MAGIC, v)) => {
                let v: u32 = v.parse().map_err(|_| Error::Parse(format!("bad header {header:?}")))?;
                if v != FORMAT_VERSION {
                    return Err(Error::Parse(format!("cache format version {v}, expected {FORMAT_VERSION}")));
                }
            }
            _ => return Err(Error::Parse(format!("bad header {header:?}"))),
        }
        let mut c = Cache::new();
        for line in lines {
            c.insert(line.parse()?);
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Cache::from_text(&fs::read_to_string(path)?)
    }

    /// Writes to a sibling temporary file and renames it over `path`, so a
    /// failed store leaves the old file untouched.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        let res = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.to_text().as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, path)
        })();
        if res.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        Ok(res?)
    }

    /// Recomputes every record from scratch and compares.
    pub fn audit(&self) -> Result<VerificationReport> {
        let mut rep = VerificationReport::new("cache-audit", None);
        for r in self.records() {
            let fresh = r.recompute()?;
            rep.check(format!("{};{};{:?}", r.kind, r.g, r.indices), r.value, fresh);
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::q;

    #[test]
    fn line_round_trip() {
        let r = CacheRecord::new(CacheKind::GbgwC, 0, &[1, 0, 0], q(-3, 7));
        assert_eq!(r.to_string(), "gbgw-c;0;0,0,1;-3/7");
        assert_eq!(r.to_string().parse::<CacheRecord>().unwrap(), r);
        let e = CacheRecord::new(CacheKind::Wk, 0, &[], q(0, 1));
        assert_eq!(e.to_string().parse::<CacheRecord>().unwrap(), e);
    }

    #[test]
    fn rejects() {
        assert!(Cache::from_text("hbgw-cache 2\n").is_err());
        assert!(Cache::from_text("other 1\n").is_err());
        assert!(Cache::from_text("hbgw-cache 1\nwk;1;1;1/24\nwk;1;1").is_err());
        assert!(Cache::from_text("hbgw-cache 1\nwk;1;1;0.5\n").is_err());
        assert!(Cache::from_text("hbgw-cache 1\nwk;1;1;1/24;x\n").is_err());
        assert_eq!(Cache::from_text("hbgw-cache 1\n").unwrap().len(), 0);
    }
}
