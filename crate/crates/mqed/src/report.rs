use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::Complex;

/// Uniform record of one identity check.
///
/// `pass` is `rel_err <= tol`, except when the reference value vanishes, in
/// which case the absolute error is compared against the tolerance instead.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Short machine-friendly check name, e.g. `"kramers-kronig"`.
    pub name: String,
    /// Which identity family the check certifies (used by report consumers
    /// to group rows; descriptive, not positional).
    pub anchor: String,
    /// Input parameters of this particular evaluation.
    pub params: Value,
    /// Absolute error |lhs − rhs| (complex modulus where applicable).
    pub abs_err: f64,
    /// Relative error abs_err / max(|rhs|, floor).
    pub rel_err: f64,
    /// Tolerance the check was held to.
    pub tol: f64,
    /// Whether the check passed.
    pub pass: bool,
    /// Free-form diagnostics (quadrature statistics, budgets, slopes, ...).
    pub metadata: Value,
}

impl CheckReport {
    /// Builds a report comparing a computed value against a reference.
    pub fn compare(
        name: &str,
        anchor: &str,
        params: Value,
        lhs: Complex,
        rhs: Complex,
        tol: f64,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = rhs.norm();
        let (rel_err, pass) = if scale > 0.0 {
            (abs_err / scale, abs_err / scale <= tol)
        } else {
            (abs_err, abs_err <= tol)
        };
        CheckReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            params,
            abs_err,
            rel_err,
            tol,
            pass,
            metadata: json!({
                "lhs": [lhs.re, lhs.im],
                "rhs": [rhs.re, rhs.im],
            }),
        }
    }

    /// Builds a report from a precomputed error against a scalar scale.
    pub fn from_error(
        name: &str,
        anchor: &str,
        params: Value,
        abs_err: f64,
        scale: f64,
        tol: f64,
    ) -> Self {
        let (rel_err, pass) = if scale > 0.0 {
            (abs_err / scale, abs_err / scale <= tol)
        } else {
            (abs_err, abs_err <= tol)
        };
        CheckReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            params,
            abs_err,
            rel_err,
            tol,
            pass,
            metadata: Value::Object(Map::new()),
        }
    }

    /// Marks the report as failed with a diagnostic, preserving errors.
    pub fn failed(name: &str, anchor: &str, params: Value, why: &str) -> Self {
        CheckReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            params,
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            tol: 0.0,
            pass: false,
            metadata: json!({ "error": why }),
        }
    }

    /// Attaches extra metadata under the given key.
    pub fn with_meta(mut self, key: &str, value: Value) -> Self {
        match &mut self.metadata {
            Value::Object(map) => {
                map.insert(key.to_string(), value);
            }
            other => {
                let mut map = Map::new();
                map.insert("inner".into(), other.take());
                map.insert(key.to_string(), value);
                self.metadata = Value::Object(map);
            }
        }
        self
    }

    /// One-line JSON rendering (JSONL row).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}
