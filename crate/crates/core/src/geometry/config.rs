//! Manifold definition files.
//!
//! ```json
//! {
//!   "id": "hyperbolic2",
//!   "dim": 2,
//!   "metric": "hyperbolic:1",
//!   "chart_domain": { "ball": { "center": [0, 0], "radius": 0.95 } },
//!   "inj_radius_bound": 1e9,
//!   "sec_lower": -1,
//!   "ric_lower": -1
//! }
//! ```
//!
//! `metric` is one of `"euclidean"`, `"hyperbolic:{kappa}"`,
//! `"sphere:{radius}"`, `"conformal:{expression in x1..xn}"`, or an `n x n`
//! array of coefficient expressions (strings or numbers). For the builtin
//! space forms the curvature bounds and injectivity radius default to their
//! exact values; for expression metrics they are required.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::manifold::{ChartDomain, ChartManifold, MetricSource};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// The raw contents of a manifold file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default)]
    pub id: Option<String>,
    pub dim: usize,
    pub metric: Value,
    pub chart_domain: DomainSpec,
    #[serde(default)]
    pub inj_radius_bound: Option<f64>,
    #[serde(default)]
    pub sec_lower: Option<f64>,
    #[serde(default)]
    pub ric_lower: Option<f64>,
}

impl ManifoldSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Builds the manifold; `text` (the file contents) is only used to
    /// locate expression errors.
    pub fn build(&self, text: Option<&str>, default_id: &str) -> Result<ChartManifold> {
        let n = self.dim;
        let id = self.id.clone().unwrap_or_else(|| default_id.to_string());
        let domain = match &self.chart_domain {
            DomainSpec::Ball { center, radius } => ChartDomain::Ball {
                center: center.clone(),
                radius: *radius,
            },
            DomainSpec::Box { lo, hi } => ChartDomain::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
        };
        let compile = |src: &str| -> Result<Expr> {
            Expr::in_coordinates(src, n).map_err(|e| locate(e, src, text))
        };
        let (metric, defaults) = match &self.metric {
            Value::String(tag) => {
                let (name, arg) = match tag.split_once(':') {
                    Some((a, b)) => (a.trim(), Some(b.trim())),
                    None => (tag.trim(), None),
                };
                let number = |what: &str| -> Result<f64> {
                    let s = arg.ok_or_else(|| Error::Config(format!("metric '{name}' needs a {what}")))?;
                    compile(s).map(|e| e.eval(&vec![0.0; n]))
                };
                match name {
                    "euclidean" => (MetricSource::Euclidean, Some((f64::INFINITY, 0.0, 0.0))),
                    "hyperbolic" => {
                        let kappa = number("curvature scale kappa")?;
                        if !(kappa > 0.0) {
                            return Err(Error::Config("kappa must be positive".into()));
                        }
                        let k = -kappa * kappa;
                        (MetricSource::Hyperbolic { kappa }, Some((f64::INFINITY, k, k)))
                    }
                    "sphere" => {
                        let radius = number("radius")?;
                        if !(radius > 0.0) {
                            return Err(Error::Config("sphere radius must be positive".into()));
                        }
                        let k = 1.0 / (radius * radius);
                        (
                            MetricSource::Sphere { radius },
                            Some((std::f64::consts::PI * radius, k, k)),
                        )
                    }
                    "conformal" => {
                        let src = arg.ok_or_else(|| Error::Config("conformal metric needs an expression".into()))?;
                        (MetricSource::Conformal { factor: compile(src)? }, None)
                    }
                    other => return Err(Error::Config(format!("unknown metric tag '{other}'"))),
                }
            }
            Value::Array(rows) => {
                if rows.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: rows.len(),
                    });
                }
                let mut entries = Vec::with_capacity(n * n);
                for row in rows {
                    let row = row
                        .as_array()
                        .ok_or_else(|| Error::Config("metric rows must be arrays".into()))?;
                    if row.len() != n {
                        return Err(Error::Dimension {
                            expected: n,
                            got: row.len(),
                        });
                    }
                    for entry in row {
                        let src = match entry {
                            Value::String(s) => s.clone(),
                            Value::Number(v) => v.to_string(),
                            _ => return Err(Error::Config("metric entries must be strings or numbers".into())),
                        };
                        entries.push(compile(&src)?);
                    }
                }
                (MetricSource::Components { entries }, None)
            }
            _ => return Err(Error::Config("metric must be a tag string or a coefficient array".into())),
        };
        let field = |v: Option<f64>, default: Option<f64>, name: &str| -> Result<f64> {
            v.or(default)
                .ok_or_else(|| Error::Config(format!("'{name}' is required for expression metrics")))
        };
        let inj = field(self.inj_radius_bound, defaults.map(|d| d.0), "inj_radius_bound")?;
        let sec = field(self.sec_lower, defaults.map(|d| d.1), "sec_lower")?;
        let ric = field(self.ric_lower, defaults.map(|d| d.2), "ric_lower")?;
        let m = ChartManifold::new(id, n, metric, domain, inj, sec, ric)?;
        let center = match &m.domain {
            ChartDomain::Ball { center, .. } => center.clone(),
            ChartDomain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
        };
        m.check_metric(&center)?;
        Ok(m)
    }
}

/// Turns an expression-relative parse error into a file-relative one when
/// the expression text can be found in the file.
fn locate(err: Error, src: &str, text: Option<&str>) -> Error {
    let (Error::Parse { column, message, .. }, Some(text)) = (&err, text) else {
        return err;
    };
    let Some(offset) = text.find(src) else {
        return err;
    };
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
    Error::Parse {
        line,
        column: offset - line_start + column,
        message: message.clone(),
    }
}

/// Reads and builds a manifold from a definition file. The file stem is the
/// default id.
pub fn load_manifold(path: impl AsRef<Path>) -> Result<ChartManifold> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("manifold");
    ManifoldSpec::parse(&text)?.build(Some(&text), stem)
}

/// Builds a manifold from definition text.
pub fn manifold_from_str(text: &str, default_id: &str) -> Result<ChartManifold> {
    ManifoldSpec::parse(text)?.build(Some(text), default_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_hyperbolic_defaults() {
        let m = manifold_from_str(
            r#"{"dim": 2, "metric": "hyperbolic:1", "chart_domain": {"ball": {"center": [0,0], "radius": 0.9}}}"#,
            "h2",
        )
        .unwrap();
        assert_eq!(m.id, "h2");
        assert_eq!(m.sec_lower, -1.0);
        assert!(m.inj_radius_bound.is_infinite());
        assert!(matches!(m.metric, MetricSource::Hyperbolic { kappa } if kappa == 1.0));
    }

    #[test]
    fn declared_bounds_override_defaults() {
        let m = manifold_from_str(
            r#"{"id": "flat", "dim": 2, "metric": "euclidean", "sec_lower": -1, "ric_lower": -1,
                "chart_domain": {"box": {"lo": [-1,-1], "hi": [1,1]}}}"#,
            "x",
        )
        .unwrap();
        assert_eq!(m.id, "flat");
        assert_eq!(m.sec_lower, -1.0);
    }

    #[test]
    fn component_metric() {
        let m = manifold_from_str(
            r#"{"dim": 2, "metric": [["1 + x1^2", 0], [0, 1]],
                "chart_domain": {"box": {"lo": [-1,-1], "hi": [1,1]}},
                "inj_radius_bound": 10, "sec_lower": 0, "ric_lower": 0}"#,
            "c",
        )
        .unwrap();
        let g = m.metric_at(&[0.5, 0.0]);
        assert_eq!(g[(0, 0)], 1.25);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = manifold_from_str("{\n  \"dim\": 2,\n  \"metric\" \"euclidean\"\n}", "x").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_expression_is_located_in_file() {
        let text = "{\"dim\": 2,\n \"metric\": \"conformal:1 + x3\",\n \"chart_domain\": {\"ball\": {\"center\": [0,0], \"radius\": 1}},\n \"inj_radius_bound\": 1, \"sec_lower\": 0, \"ric_lower\": 0}";
        match manifold_from_str(text, "x").unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 27);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn expression_metric_requires_bounds() {
        let err = manifold_from_str(
            r#"{"dim": 1, "metric": "conformal:1", "chart_domain": {"ball": {"center": [0], "radius": 1}}}"#,
            "x",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
