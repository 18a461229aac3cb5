//! Closed-form comparison quantities for a sectional (or Ricci) lower bound
//! `K`. Negative `K = -kappa^2` gives the hyperbolic functions, positive
//! `K = k^2` the trigonometric continuation (`kappa = i k`), and `K = 0` the
//! flat limits.

use crate::error::{Error, Result};

/// Below this `|K| l^2` the flat formulas are used.
const FLAT_THRESHOLD: f64 = 1e-14;

fn is_flat(k: f64, l: f64) -> bool {
    k.abs() * l * l < FLAT_THRESHOLD
}

fn check_trig(k: f64, l: f64) -> Result<()> {
    if k > 0.0 && !is_flat(k, l) {
        let kl = k.sqrt() * l;
        if kl >= std::f64::consts::PI - 1e-12 {
            return Err(Error::ComparisonDegenerate { kl });
        }
    }
    Ok(())
}

/// `kappa coth(kappa l)`, `1/l`, or `k cot(k l)`.
pub fn ct(k: f64, l: f64) -> Result<f64> {
    check_trig(k, l)?;
    Ok(if is_flat(k, l) {
        1.0 / l
    } else if k < 0.0 {
        let kappa = (-k).sqrt();
        kappa / (kappa * l).tanh()
    } else {
        let s = k.sqrt();
        s / (s * l).tan()
    })
}

/// `kappa / sinh(kappa l)`, `1/l`, or `k / sin(k l)`.
pub fn cs(k: f64, l: f64) -> Result<f64> {
    check_trig(k, l)?;
    Ok(if is_flat(k, l) {
        1.0 / l
    } else if k < 0.0 {
        let kappa = (-k).sqrt();
        kappa / (kappa * l).sinh()
    } else {
        let s = k.sqrt();
        s / (s * l).sin()
    })
}

/// Upper bound for the Hessian of `d^2` in the direction `(V1, V2)` with
/// `V1`, `V2` normal to the geodesic:
/// `2 l [ct(l) (|V1|^2 + |V2|^2) - 2 cs(l) <V2, P V1>]`.
pub fn hessian_bound(k: f64, l: f64, v1_sq: f64, v2_sq: f64, inner: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Config("geodesic length must be positive".into()));
    }
    Ok(2.0 * l * (ct(k, l)? * (v1_sq + v2_sq) - 2.0 * cs(k, l)? * inner))
}

/// The bound for `(V, P V)` with `|V| = 1`: `4 kappa l tanh(kappa l / 2)`
/// for `K < 0`, `-4 k l tan(k l / 2)` for `K > 0`.
pub fn parallel_direction_bound(k: f64, l: f64) -> Result<f64> {
    check_trig(k, l)?;
    Ok(if is_flat(k, l) {
        0.0
    } else if k < 0.0 {
        let kappa = (-k).sqrt();
        4.0 * kappa * l * (0.5 * kappa * l).tanh()
    } else {
        let s = k.sqrt();
        -4.0 * s * l * (0.5 * s * l).tan()
    })
}

/// Bound for the trace of the Hessian of `d^2` over `(e_i, P e_i)`,
/// `i = 2..n`, given `Ric >= (n - 1) K`.
pub fn laplacian_bound(n: usize, k: f64, l: f64) -> Result<f64> {
    Ok((n.saturating_sub(1)) as f64 * parallel_direction_bound(k, l)?)
}

/// Coefficients `(a(t), b(t))` of the comparison field
/// `X(t) = a(t) V1(t) + b(t) V2(t)`: for `K = -kappa^2`,
/// `a = cosh(kappa t) - coth(kappa l) sinh(kappa t)`,
/// `b = sinh(kappa t) / sinh(kappa l)`; linear interpolation when flat.
pub fn comparison_coefficients(k: f64, l: f64, t: f64) -> Result<(f64, f64)> {
    check_trig(k, l)?;
    if is_flat(k, l) {
        return Ok((1.0 - t / l, t / l));
    }
    if k < 0.0 {
        let kappa = (-k).sqrt();
        let (st, sl) = ((kappa * t).sinh(), (kappa * l).sinh());
        // cosh(kt) - coth(kl) sinh(kt) = sinh(k(l - t)) / sinh(kl)
        Ok(((kappa * (l - t)).sinh() / sl, st / sl))
    } else {
        let s = k.sqrt();
        let sl = (s * l).sin();
        Ok(((s * (l - t)).sin() / sl, (s * t).sin() / sl))
    }
}

/// `psi(t) = a(t) + b(t)`, the scalar profile of the comparison field for
/// `V2 = P V1`.
pub fn comparison_profile(k: f64, l: f64, t: f64) -> Result<f64> {
    let (a, b) = comparison_coefficients(k, l, t)?;
    Ok(a + b)
}
