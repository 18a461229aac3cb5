//! Scalar functions known only through samples.
//!
//! File format: `#`-prefixed header lines `key: value` (keys `manifold`,
//! `modulus`, `kind` with `space` or `space-time`), then one CSV row per
//! sample, `x1,...,xn,value` or `t,x1,...,xn,value`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use super::modulus::Modulus;
use crate::error::{Error, Result};
use crate::geometry::{distance, ChartDomain, ChartManifold, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub manifold_id: String,
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    /// Sample times for space-time data.
    pub times: Option<Vec<f64>>,
    pub modulus: Option<Modulus>,
}

impl SampledFunction {
    pub fn new(manifold_id: impl Into<String>, points: Vec<Point>, values: Vec<f64>) -> Self {
        assert_eq!(points.len(), values.len());
        Self {
            manifold_id: manifold_id.into(),
            points,
            values,
            times: None,
            modulus: None,
        }
    }

    /// Samples `f` at every point.
    pub fn from_fn(m: &ChartManifold, points: Vec<Point>, f: impl Fn(&Point) -> f64) -> Self {
        let values = points.iter().map(&f).collect();
        Self::new(m.id.clone(), points, values)
    }

    pub fn with_modulus(mut self, modulus: Modulus) -> Self {
        self.modulus = Some(modulus);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(|p| p.len()).unwrap_or(0)
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = -*v;
        }
        out
    }

    /// Index of the sample at exactly `x`, if any.
    pub fn index_of(&self, x: &Point) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }

    pub fn max(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    pub fn min(&self) -> Option<(usize, f64)> {
        self.negated().max().map(|(i, v)| (i, -v))
    }

    /// Largest violation of `|u(x) - u(y)| <= omega(d(x, y))` over all
    /// sampled pairs (zero when admissible). Quadratic in the sample count.
    pub fn modulus_violation(&self, m: &ChartManifold) -> Result<f64> {
        let Some(omega) = &self.modulus else {
            return Ok(0.0);
        };
        let mut worst = 0.0_f64;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = distance(m, &self.points[i], &self.points[j])?;
                let gap = (self.values[i] - self.values[j]).abs() - omega.eval(d);
                worst = worst.max(gap);
            }
        }
        Ok(worst)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut manifold_id = String::new();
        let mut modulus = None;
        let mut space_time = false;
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut times = Vec::new();
        let mut width: Option<usize> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = header.split_once(':') {
                    let value = value.trim();
                    match key.trim() {
                        "manifold" => manifold_id = value.to_string(),
                        "modulus" => {
                            modulus = Some(value.parse::<Modulus>().map_err(|e| Error::Parse {
                                line: line_no,
                                column: line.find(value).unwrap_or(0) + 1,
                                message: e.to_string(),
                            })?)
                        }
                        "kind" => {
                            space_time = match value {
                                "space" => false,
                                "space-time" => true,
                                other => {
                                    return Err(Error::Parse {
                                        line: line_no,
                                        column: line.find(other).unwrap_or(0) + 1,
                                        message: format!("unknown kind '{other}'"),
                                    })
                                }
                            }
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let mut row = Vec::new();
            let mut column = 1;
            for field in line.split(',') {
                let v = field.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    column,
                    message: format!("malformed number '{}'", field.trim()),
                })?;
                row.push(v);
                column += field.len() + 1;
            }
            let min = if space_time { 3 } else { 2 };
            if row.len() < min {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("expected at least {min} columns"),
                });
            }
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        column: 1,
                        message: format!("expected {w} columns, found {}", row.len()),
                    })
                }
                _ => {}
            }
            let value = row.pop().expect("non-empty row");
            if space_time {
                times.push(row.remove(0));
            }
            points.push(DVector::from_vec(row));
            values.push(value);
        }
        Ok(Self {
            manifold_id,
            points,
            values,
            times: space_time.then_some(times),
            modulus,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# manifold: {}", self.manifold_id);
        if let Some(m) = &self.modulus {
            let _ = writeln!(out, "# modulus: {m}");
        }
        if self.times.is_some() {
            let _ = writeln!(out, "# kind: space-time");
        }
        for (k, (p, v)) in self.points.iter().zip(&self.values).enumerate() {
            let mut fields: Vec<String> = Vec::with_capacity(p.len() + 2);
            if let Some(t) = &self.times {
                fields.push(format!("{:e}", t[k]));
            }
            fields.extend(p.iter().map(|c| format!("{c:e}")));
            fields.push(format!("{v:e}"));
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Lattice points with spacing `h` inside the chart domain, anchored at the
/// domain center so that the center is always a sample.
pub fn grid_points(domain: &ChartDomain, h: f64) -> Vec<Point> {
    let (center, half): (Vec<f64>, Vec<f64>) = match domain {
        ChartDomain::Box { lo, hi } => (
            lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect(),
        ),
        ChartDomain::Ball { center, radius } => (center.clone(), vec![*radius; center.len()]),
    };
    let n = center.len();
    let counts: Vec<i64> = half.iter().map(|w| (w / h + 1e-9).floor() as i64).collect();
    let mut out = Vec::new();
    let mut idx: Vec<i64> = counts.iter().map(|c| -c).collect();
    loop {
        // pull boundary nodes in by a relative 1e-12 so rounding never drops them
        let p = DVector::from_fn(n, |i, _| center[i] + idx[i] as f64 * h * (1.0 - 1e-12));
        if domain.contains(p.as_slice()) {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            idx[i] += 1;
            if idx[i] <= counts[i] {
                break;
            }
            idx[i] = -counts[i];
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let mut u = SampledFunction::new(
            "euclidean2",
            vec![DVector::from_vec(vec![0.0, 0.5]), DVector::from_vec(vec![-1.0, 0.25])],
            vec![1.5, -2.0],
        )
        .with_modulus("power:1,1".parse().unwrap());
        let back = SampledFunction::parse(&u.to_text()).unwrap();
        assert_eq!(back, u);
        u.times = Some(vec![0.0, 0.5]);
        let back = SampledFunction::parse(&u.to_text()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn parse_errors_carry_position() {
        match SampledFunction::parse("# manifold: a\n0.1,0.2,1\n0.1,zz,1\n") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 5);
            }
            other => panic!("{other:?}"),
        }
        assert!(SampledFunction::parse("1,2,3\n1,2\n").is_err());
    }

    #[test]
    fn grid_contains_center_and_respects_domain() {
        let g = grid_points(&ChartDomain::cube(2, 1.0), 0.02);
        assert_eq!(g.len(), 101 * 101);
        let b = grid_points(&ChartDomain::ball(2, 1.0), 0.1);
        assert!(b.iter().any(|p| p.norm() == 0.0));
        assert!(b.iter().all(|p| p.norm() <= 1.0));
    }
}
