//! Classic fixed-step fourth-order Runge-Kutta.
//!
//! Every geodesic-type ODE in the crate goes through [`rk4_step`] so that a
//! given step count always reproduces the same trajectory bit for bit.

/// One RK4 step of `y' = f(t, y)` of size `h`, writing the result into `y`.
///
/// `work` must hold four scratch buffers of `y.len()`; keeping them outside
/// lets long integrations avoid reallocating per step.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &mut [f64], h: f64, work: &mut Rk4Work)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    work.ensure(n);
    let Rk4Work { k1, k2, k3, k4, tmp } = work;

    f(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(t + 0.5 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(t + h, tmp, k4);
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

#[derive(Debug, Default, Clone)]
pub struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    pub fn new(n: usize) -> Self {
        let mut w = Self::default();
        w.ensure(n);
        w
    }

    fn ensure(&mut self, n: usize) {
        if self.k1.len() != n {
            for b in [
                &mut self.k1,
                &mut self.k2,
                &mut self.k3,
                &mut self.k4,
                &mut self.tmp,
            ] {
                b.clear();
                b.resize(n, 0.0);
            }
        }
    }
}

/// Local error estimate of one step of size `h` by step doubling.
pub fn step_doubling_error<F>(f: &mut F, t: f64, y: &[f64], h: f64) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut work = Rk4Work::new(y.len());
    let mut big = y.to_vec();
    rk4_step(f, t, &mut big, h, &mut work);
    let mut small = y.to_vec();
    rk4_step(f, t, &mut small, 0.5 * h, &mut work);
    rk4_step(f, t + 0.5 * h, &mut small, 0.5 * h, &mut work);
    big.iter()
        .zip(&small)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / 15.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut y = [1.0, 0.0];
        let steps = 1000;
        let h = 2.0 * std::f64::consts::PI / steps as f64;
        let mut work = Rk4Work::new(2);
        for k in 0..steps {
            rk4_step(&mut f, k as f64 * h, &mut y, h, &mut work);
        }
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn fourth_order_convergence() {
        // y' = y, y(0) = 1 on [0, 1]
        let run = |steps: usize| {
            let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
            let mut y = [1.0];
            let h = 1.0 / steps as f64;
            let mut work = Rk4Work::new(1);
            for k in 0..steps {
                rk4_step(&mut f, k as f64 * h, &mut y, h, &mut work);
            }
            (y[0] - std::f64::consts::E).abs()
        };
        let ratio = run(20) / run(40);
        assert!((ratio.log2() - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn doubling_estimate_scales_like_h5() {
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let e1 = step_doubling_error(&mut f, 0.0, &[1.0], 0.2);
        let e2 = step_doubling_error(&mut f, 0.0, &[1.0], 0.1);
        assert!((e1 / e2).log2() > 4.5);
    }
}
