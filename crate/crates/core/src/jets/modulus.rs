use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A modulus of continuity `omega: [0, inf) -> [0, inf]`.
///
/// Text forms: `zero`, `constant:C`, `power:C,A` (`C r^A`), and
/// `tabulated:r0,w0;r1,w1;...` (piecewise linear, constant past the last
/// node).
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus {
    Zero,
    Constant(f64),
    Power { c: f64, a: f64 },
    Tabulated { r: Vec<f64>, w: Vec<f64> },
}

impl Modulus {
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match self {
            Modulus::Zero => 0.0,
            Modulus::Constant(c) => *c,
            Modulus::Power { c, a } => {
                if r == 0.0 {
                    0.0
                } else {
                    c * r.powf(*a)
                }
            }
            Modulus::Tabulated { r: rs, w } => {
                if r <= rs[0] {
                    return w[0];
                }
                for k in 1..rs.len() {
                    if r <= rs[k] {
                        let s = (r - rs[k - 1]) / (rs[k] - rs[k - 1]);
                        return w[k - 1] + s * (w[k] - w[k - 1]);
                    }
                }
                *w.last().expect("non-empty table")
            }
        }
    }

    /// Whether `omega(0+) = 0`.
    pub fn vanishes_at_zero(&self) -> bool {
        match self {
            Modulus::Zero => true,
            Modulus::Constant(c) => *c == 0.0,
            Modulus::Power { c, a } => *c == 0.0 || *a > 0.0,
            Modulus::Tabulated { r, w } => r[0] == 0.0 && w[0] == 0.0,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Zero => write!(f, "zero"),
            Modulus::Constant(c) => write!(f, "constant:{c}"),
            Modulus::Power { c, a } => write!(f, "power:{c},{a}"),
            Modulus::Tabulated { r, w } => {
                let nodes: Vec<String> = r.iter().zip(w).map(|(a, b)| format!("{a},{b}")).collect();
                write!(f, "tabulated:{}", nodes.join(";"))
            }
        }
    }
}

impl FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("modulus '{s}': {msg}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("malformed number"));
        let s_trim = s.trim();
        let (kind, arg) = s_trim.split_once(':').unwrap_or((s_trim, ""));
        match kind.trim() {
            "zero" => Ok(Modulus::Zero),
            "constant" => {
                let c = num(arg)?;
                if c < 0.0 {
                    return Err(bad("must be nonnegative"));
                }
                Ok(Modulus::Constant(c))
            }
            "power" => {
                let (c, a) = arg.split_once(',').ok_or_else(|| bad("expected power:C,A"))?;
                let (c, a) = (num(c)?, num(a)?);
                if c < 0.0 || a < 0.0 {
                    return Err(bad("coefficients must be nonnegative"));
                }
                Ok(Modulus::Power { c, a })
            }
            "tabulated" => {
                let mut r = Vec::new();
                let mut w = Vec::new();
                for node in arg.split(';').filter(|t| !t.trim().is_empty()) {
                    let (a, b) = node.split_once(',').ok_or_else(|| bad("expected r,w pairs"))?;
                    r.push(num(a)?);
                    w.push(num(b)?);
                }
                if r.is_empty() {
                    return Err(bad("empty table"));
                }
                if r.windows(2).any(|p| p[1] <= p[0]) || w.windows(2).any(|p| p[1] < p[0]) {
                    return Err(bad("table must be increasing in r and nondecreasing in w"));
                }
                Ok(Modulus::Tabulated { r, w })
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

impl Serialize for Modulus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
