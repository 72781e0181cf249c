//! Flat key/value view of result types, shared by the `key=value` and CSV writers.

use std::fmt::Write;

pub trait Record {
    fn fields(&self) -> Vec<(&'static str, String)>;

    /// One `key=value` line per field.
    fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Shortest round-tripping decimal; infinities print as `inf` and `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "unknown".into(), fmt_f64)
}
