//! Verification reports with exact rationals serialized as strings.

use serde::{Serialize, Serializer};

use crate::series::{Rational, Series, TruncationPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

fn rational_str<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub monomial: String,
    #[serde(serialize_with = "rational_str")]
    pub lhs: Rational,
    #[serde(serialize_with = "rational_str")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub policy: Option<TruncationPolicy>,
    pub status: Status,
    pub checked: usize,
    pub failures: Vec<Mismatch>,
    /// Free-form lines such as computed values worth showing on a pass.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: &str, policy: Option<TruncationPolicy>) -> Self {
        VerificationReport { name: name.to_string(), policy, status: Status::Pass, checked: 0, failures: Vec::new(), notes: Vec::new() }
    }

    /// Records one comparison.
    pub fn check(&mut self, what: impl Into<String>, lhs: Rational, rhs: Rational) {
        self.checked += 1;
        if lhs != rhs {
            self.failures.push(Mismatch { monomial: what.into(), lhs, rhs });
            self.status = Status::Fail;
        }
    }

    /// Compares two series monomial by monomial over the union of supports
    /// restricted to `keep`.
    pub fn compare_series(&mut self, lhs: &Series, rhs: &Series, keep: impl Fn(&crate::series::Monomial) -> bool) {
        let mut keys: Vec<_> = lhs.terms().keys().chain(rhs.terms().keys()).filter(|m| keep(m)).cloned().collect();
        keys.sort();
        keys.dedup();
        for m in keys {
            self.check(m.to_string(), lhs.get(&m), rhs.get(&m));
        }
    }

    /// Requires `residual` to vanish, counting one check per monomial of
    /// `support` or `residual` inside `keep`.
    pub fn compare_residual(&mut self, residual: &Series, support: &Series, keep: impl Fn(&crate::series::Monomial) -> bool) {
        let zero = Rational::from_integer(0.into());
        let mut keys: Vec<_> = residual.terms().keys().chain(support.terms().keys()).filter(|m| keep(m)).cloned().collect();
        keys.sort();
        keys.dedup();
        for m in keys {
            self.check(m.to_string(), residual.get(&m), zero.clone());
        }
    }

    /// Marks the report failed without a coefficient pair.
    pub fn fail(&mut self, what: impl Into<String>) {
        self.failures.push(Mismatch { monomial: what.into(), lhs: Rational::from_integer(0.into()), rhs: Rational::from_integer(0.into()) });
        self.status = Status::Fail;
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        if other.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
