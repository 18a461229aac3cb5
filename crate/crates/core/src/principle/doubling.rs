//! Penalized maximization of `u(x) - v(y) - (alpha/2) d(x, y)^2` over
//! sampled pairs, and the ladder diagnostics for its limits.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, exp_map, ChartManifold, Frame, Point};
use crate::jets::SampledFunction;

/// Distance used by the pair sweeps: closed forms for the builtin space
/// forms, shooting otherwise.
pub fn pair_distance(m: &ChartManifold, x: &Point, y: &Point) -> Result<f64> {
    match m.closed_form_distance(x.as_slice(), y.as_slice()) {
        Some(d) => Ok(d),
        None if x == y => Ok(0.0),
        None => distance(m, x, y),
    }
}

/// The anchor term `(lambda/2) d(anchor, x)^2 + (lambda/2) d(anchor, y)^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Penalty {
    pub lambda: f64,
    pub anchor: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingState {
    pub alpha: f64,
    pub x_index: usize,
    pub y_index: usize,
    pub x_alpha: Vec<f64>,
    pub y_alpha: Vec<f64>,
    /// The penalized supremum (`mu_alpha`, or `sigma_alpha` with a penalty).
    pub mu_alpha: f64,
    pub d: f64,
    /// `mu_alpha - (u(x) - v(y) - (alpha/2) d^2 - penalty)` at the reported
    /// pair; zero for the exact sample argmax, negative after a refinement
    /// that improved on the samples.
    pub gap: f64,
    pub u_x: f64,
    pub v_y: f64,
    /// `(lambda/2)(d(anchor, x)^2 + d(anchor, y)^2)`.
    pub penalty_value: f64,
    pub penalty: Option<Penalty>,
    pub excluded_pairs: usize,
    pub refined: bool,
}

impl DoublingState {
    pub fn alpha_d2(&self) -> f64 {
        self.alpha * self.d * self.d
    }

    pub fn x_point(&self) -> Point {
        DVector::from_column_slice(&self.x_alpha)
    }

    pub fn y_point(&self) -> Point {
        DVector::from_column_slice(&self.y_alpha)
    }
}

fn check_common(u: &SampledFunction, v: &SampledFunction) -> Result<()> {
    if u.len() != v.len() || u.points.iter().zip(&v.points).any(|(a, b)| a != b) {
        return Err(Error::GridMismatch("u and v must be sampled on the same points".into()));
    }
    if u.is_empty() {
        return Err(Error::NoAdmissiblePairs);
    }
    Ok(())
}

/// Exhaustive maximization over all sampled pairs. Ties go to the
/// lexicographically smallest `(x_index, y_index)`. Pairs at distance
/// `>= inj_radius_bound` are skipped and counted.
pub fn maximize_doubled(
    m: &ChartManifold,
    u: &SampledFunction,
    v: &SampledFunction,
    alpha: f64,
    penalty: Option<&Penalty>,
) -> Result<DoublingState> {
    check_common(u, v)?;
    let n = u.len();
    let (lambda, anchor_d2) = match penalty {
        Some(p) if p.lambda > 0.0 => {
            let a = DVector::from_column_slice(&p.anchor);
            let d2 = u
                .points
                .iter()
                .map(|x| Ok(pair_distance(m, &a, x)?.powi(2)))
                .collect::<Result<Vec<f64>>>()?;
            (p.lambda, d2)
        }
        _ => (0.0, vec![0.0; n]),
    };
    // per-point parts: a_i = u_i - (lambda/2) d(anchor, x_i)^2, b_j = v_j + (lambda/2) d(anchor, y_j)^2
    let a: Vec<f64> = (0..n).map(|i| u.values[i] - 0.5 * lambda * anchor_d2[i]).collect();
    let b: Vec<f64> = (0..n).map(|j| v.values[j] + 0.5 * lambda * anchor_d2[j]).collect();
    let mut by_a: Vec<usize> = (0..n).collect();
    by_a.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    let mut by_b: Vec<usize> = (0..n).collect();
    by_b.sort_by(|&i, &j| b[i].total_cmp(&b[j]).then(i.cmp(&j)));
    let b_min = b[by_b[0]];
    let inj = m.inj_radius_bound;
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let mut excluded = 0usize;
    let better = |val: f64, i: usize, j: usize, best: &Option<(f64, usize, usize, f64)>| match best {
        None => true,
        Some((bv, bi, bj, _)) => val > *bv || (val == *bv && (i, j) < (*bi, *bj)),
    };
    for &i in &by_a {
        if let Some((bv, ..)) = best {
            if a[i] - b_min < bv {
                break;
            }
        }
        for &j in &by_b {
            if let Some((bv, ..)) = best {
                if a[i] - b[j] < bv {
                    break;
                }
            }
            let d = if i == j { 0.0 } else { pair_distance(m, &u.points[i], &u.points[j])? };
            if d >= inj {
                excluded += 1;
                continue;
            }
            let val = a[i] - b[j] - 0.5 * alpha * d * d;
            if better(val, i, j, &best) {
                best = Some((val, i, j, d));
            }
        }
    }
    let (mu, i, j, d) = best.ok_or(Error::NoAdmissiblePairs)?;
    Ok(DoublingState {
        alpha,
        x_index: i,
        y_index: j,
        x_alpha: u.points[i].as_slice().to_vec(),
        y_alpha: u.points[j].as_slice().to_vec(),
        mu_alpha: mu,
        d,
        gap: 0.0,
        u_x: u.values[i],
        v_y: v.values[j],
        penalty_value: 0.5 * lambda * (anchor_d2[i] + anchor_d2[j]),
        penalty: penalty.cloned(),
        excluded_pairs: excluded,
        refined: false,
    })
}

/// Objective of the doubled problem for continuous `u`, `v`.
pub fn doubled_objective(
    m: &ChartManifold,
    u: &dyn Fn(&Point) -> f64,
    v: &dyn Fn(&Point) -> f64,
    alpha: f64,
    penalty: Option<&Penalty>,
    x: &Point,
    y: &Point,
) -> Result<f64> {
    let d = pair_distance(m, x, y)?;
    let mut val = u(x) - v(y) - 0.5 * alpha * d * d;
    if let Some(p) = penalty {
        if p.lambda > 0.0 {
            let a = DVector::from_column_slice(&p.anchor);
            val -= 0.5 * p.lambda * (pair_distance(m, &a, x)?.powi(2) + pair_distance(m, &a, y)?.powi(2));
        }
    }
    Ok(val)
}

/// Coordinate ascent from a sample argmax for continuous `u`, `v`: moves
/// `x` or `y` along `exp` of orthonormal frame directions, halving the
/// step from `step` until it drops below `min_step`. Moves leaving the
/// chart are rejected.
pub fn refine_doubled(
    m: &ChartManifold,
    u: &dyn Fn(&Point) -> f64,
    v: &dyn Fn(&Point) -> f64,
    state: &DoublingState,
    step: f64,
    min_step: f64,
) -> Result<DoublingState> {
    let pen = state.penalty.as_ref();
    let mut x = state.x_point();
    let mut y = state.y_point();
    let mut best = doubled_objective(m, u, v, state.alpha, pen, &x, &y)?;
    let mut s = step;
    let n = m.dim;
    while s >= min_step {
        let mut improved = false;
        // side 0 moves x, side 1 moves y, side 2 moves both by the same frame components
        for side in 0..3 {
            for k in 0..n {
                for sign in [1.0, -1.0] {
                    let step_from = |base: &Point| -> Result<Option<Point>> {
                        let frame = Frame::orthonormal(m, base, None)?;
                        let dir = frame.vector(k) * (sign * s);
                        Ok(exp_map(m, base, &dir).ok().filter(|p| m.domain.contains(p.as_slice())))
                    };
                    let cx = if side == 1 { Some(x.clone()) } else { step_from(&x)? };
                    let cy = if side == 0 { Some(y.clone()) } else { step_from(&y)? };
                    let (Some(cx), Some(cy)) = (cx, cy) else { continue };
                    let val = doubled_objective(m, u, v, state.alpha, pen, &cx, &cy)?;
                    if val > best {
                        best = val;
                        x = cx;
                        y = cy;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            s *= 0.5;
        }
    }
    let d = pair_distance(m, &x, &y)?;
    let penalty_value = match pen {
        Some(p) if p.lambda > 0.0 => {
            let a = DVector::from_column_slice(&p.anchor);
            0.5 * p.lambda * (pair_distance(m, &a, &x)?.powi(2) + pair_distance(m, &a, &y)?.powi(2))
        }
        _ => 0.0,
    };
    Ok(DoublingState {
        x_alpha: x.as_slice().to_vec(),
        y_alpha: y.as_slice().to_vec(),
        d,
        gap: state.mu_alpha - best,
        mu_alpha: best.max(state.mu_alpha),
        u_x: u(&x),
        v_y: v(&y),
        penalty_value,
        refined: true,
        ..state.clone()
    })
}

/// Runs [`maximize_doubled`] for every `alpha` in the ladder.
pub fn doubling_ladder(m: &ChartManifold, u: &SampledFunction, v: &SampledFunction, alphas: &[f64]) -> Result<Vec<DoublingState>> {
    alphas.iter().map(|&a| maximize_doubled(m, u, v, a, None)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyLadderRow {
    pub alpha: f64,
    pub alpha_d2: f64,
    pub mu_alpha: f64,
    /// `mu_alpha - sup(u - v)`.
    pub mu_excess: f64,
    /// `alpha h^2`: below this `alpha d^2` is at sample resolution.
    pub floor: f64,
    pub at_floor: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyLadderReport {
    pub rows: Vec<PenaltyLadderRow>,
    pub sup_diagonal: f64,
    pub spacing: f64,
    /// Every rung multiplies `alpha` by at least 4.
    pub ladder_ok: bool,
    /// `alpha d^2` never increases between rungs above the floor.
    pub alpha_d2_nonincreasing: bool,
    pub mu_nonincreasing: bool,
    /// Rungs where `alpha d^2` increased while above the floor.
    pub stalls: Vec<usize>,
    pub top_alpha_d2: f64,
    pub top_mu_excess: f64,
}

/// Diagnostics for a ladder computed on identical samples: `alpha d^2` per
/// rung against the resolution floor `alpha h^2`, and `mu_alpha` against
/// `sup(u - v)` on the diagonal.
pub fn ladder_diagnostics(states: &[DoublingState], u: &SampledFunction, v: &SampledFunction, spacing: f64) -> Result<PenaltyLadderReport> {
    check_common(u, v)?;
    let sup_diag = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    let rows: Vec<PenaltyLadderRow> = states
        .iter()
        .map(|s| {
            let floor = s.alpha * spacing * spacing;
            PenaltyLadderRow {
                alpha: s.alpha,
                alpha_d2: s.alpha_d2(),
                mu_alpha: s.mu_alpha,
                mu_excess: s.mu_alpha - sup_diag,
                floor,
                at_floor: s.alpha_d2() <= floor,
            }
        })
        .collect();
    let ladder_ok = rows.windows(2).all(|w| w[1].alpha >= 4.0 * w[0].alpha);
    let mut stalls = Vec::new();
    for k in 1..rows.len() {
        if rows[k].alpha_d2 > rows[k - 1].alpha_d2 && !rows[k].at_floor {
            stalls.push(k);
        }
    }
    let mu_nonincreasing = rows.windows(2).all(|w| w[1].mu_alpha <= w[0].mu_alpha + 1e-12 * (1.0 + w[0].mu_alpha.abs()));
    let top = rows.last();
    Ok(PenaltyLadderReport {
        top_alpha_d2: top.map(|r| r.alpha_d2).unwrap_or(f64::NAN),
        top_mu_excess: top.map(|r| r.mu_excess).unwrap_or(f64::NAN),
        alpha_d2_nonincreasing: stalls.is_empty(),
        mu_nonincreasing,
        stalls,
        ladder_ok,
        sup_diagonal: sup_diag,
        spacing,
        rows,
    })
}
