//! Property tests for structural invariants.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use riemann_viscosity::distance::{hessian_bound, parallel_direction_bound};
use riemann_viscosity::geometry::{ChartManifold, Point};
use riemann_viscosity::jets::{fit_quadratic, Modulus, Neighborhood, SampledFunction};
use riemann_viscosity::principle::{doubling_ladder, maximize_doubled, PenaltyConfig};
use riemann_viscosity::report::TraceTable;

fn point_in_disk(r: f64) -> impl Strategy<Value = Vec<f64>> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(rho, th)| vec![rho * th.cos(), rho * th.sin()])
}

fn samples(n: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), n),
        prop::collection::vec(-1.0..1.0f64, n),
        prop::collection::vec(-1.0..1.0f64, n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hyperbolic_distance_is_a_metric(x in point_in_disk(0.9), y in point_in_disk(0.9), z in point_in_disk(0.9)) {
        let m = ChartManifold::hyperbolic(2, 1.0, 0.95);
        let d = |a: &[f64], b: &[f64]| m.closed_form_distance(a, b).unwrap();
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12 * (1.0 + d(&x, &y)));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
        prop_assert!(d(&x, &x).abs() <= 1e-7);
    }

    #[test]
    fn doubled_maximum_matches_brute_force((pts, uv, vv) in samples(40), alpha in 0.1..1e3f64) {
        let m = ChartManifold::euclidean(2, 1.0);
        let points: Vec<Point> = pts.iter().map(|p| DVector::from_column_slice(p)).collect();
        let u = SampledFunction::new("euclidean2", points.clone(), uv.clone());
        let v = SampledFunction::new("euclidean2", points.clone(), vv.clone());
        let st = maximize_doubled(&m, &u, &v, alpha, None).unwrap();
        let mut best = f64::NEG_INFINITY;
        for i in 0..points.len() {
            for j in 0..points.len() {
                let d2 = (&points[i] - &points[j]).norm_squared();
                best = best.max(uv[i] - vv[j] - 0.5 * alpha * d2);
            }
        }
        prop_assert!((st.mu_alpha - best).abs() <= 1e-12);
        prop_assert!(st.gap.abs() <= 1e-12);
        // the penalized maximum dominates the diagonal
        let diag = uv.iter().zip(&vv).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(st.mu_alpha >= diag - 1e-12);
    }

    #[test]
    fn penalized_maximum_is_nonincreasing_in_alpha((pts, uv, vv) in samples(30)) {
        let m = ChartManifold::euclidean(2, 1.0);
        let points: Vec<Point> = pts.iter().map(|p| DVector::from_column_slice(p)).collect();
        let u = SampledFunction::new("euclidean2", points.clone(), uv);
        let v = SampledFunction::new("euclidean2", points, vv);
        let alphas: Vec<f64> = (0..6).map(|k| 10f64.powi(k)).collect();
        let ladder = doubling_ladder(&m, &u, &v, &alphas).unwrap();
        for w in ladder.windows(2) {
            prop_assert!(w[1].mu_alpha <= w[0].mu_alpha + 1e-12);
        }
    }

    #[test]
    fn lambda_rule(w in 0.0..2.0f64) {
        let l = PenaltyConfig::lambda(w);
        prop_assert!((0.0..=1.0).contains(&l));
        if w >= (-1.0f64).exp() {
            prop_assert_eq!(l, 1.0);
        } else if w > 0.0 {
            prop_assert!((l * w.ln() + 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn comparison_bound_structure(k in -4.0..0.5f64, l in 0.01..2.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        // symmetric under swapping the endpoints
        let ab = hessian_bound(k, l, a * a, b * b, a * b).unwrap();
        let ba = hessian_bound(k, l, b * b, a * a, a * b).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        // (V, PV) is the diagonal case of the general bound
        let par = parallel_direction_bound(k, l).unwrap();
        let diag = hessian_bound(k, l, 1.0, 1.0, 1.0).unwrap();
        prop_assert!((par - diag).abs() <= 1e-9 * (1.0 + par.abs()));
        let sign_ok = if k < 0.0 { par >= 0.0 } else { par <= 1e-12 };
        prop_assert!(sign_ok);
    }

    #[test]
    fn quadratic_fit_is_exact_on_quadratics(
        c in -1.0..1.0f64,
        p in prop::collection::vec(-2.0..2.0f64, 2),
        h in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        let m = ChartManifold::euclidean(2, 1.0);
        let x0 = DVector::from_vec(vec![0.1, -0.2]);
        let q = |x: &Point| {
            let (a, b) = (x[0] - 0.1, x[1] + 0.2);
            c + p[0] * a + p[1] * b + 0.5 * (h[0] * a * a + 2.0 * h[1] * a * b + h[2] * b * b)
        };
        let offsets: Vec<DVector<f64>> = (-2..=2)
            .flat_map(|i| (-2..=2).map(move |j| DVector::from_vec(vec![i as f64 * 0.01, j as f64 * 0.01])))
            .filter(|o| o.norm() > 0.0)
            .collect();
        let nb = Neighborhood::from_function(&m, &x0, &offsets, q).unwrap();
        let fit = fit_quadratic(&nb, 1e-3).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[h[0], h[1], h[1], h[2]]);
        prop_assert!((&fit.jet.p - DVector::from_column_slice(&p)).amax() <= 1e-8);
        prop_assert!((&fit.jet.x - expect).amax() <= 1e-6);
    }

    #[test]
    fn power_modulus_is_nondecreasing(c in 0.0..10.0f64, a in 0.1..2.0f64, r in 0.0..5.0f64, dr in 0.0..1.0f64) {
        let w = Modulus::Power { c, a };
        prop_assert!(w.eval(r + dr) >= w.eval(r));
        prop_assert_eq!(w.eval(0.0), 0.0);
    }

    #[test]
    fn trace_csv_round_trips(cells in prop::collection::vec(prop::collection::vec("[ -~]{0,12}", 3), 0..8)) {
        let mut t = TraceTable::new(&["a", "b", "c"]);
        for r in &cells {
            t.push(r.clone());
        }
        let text = t.to_csv_string().unwrap();
        let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let back: Vec<Vec<String>> = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
        prop_assert_eq!(back, cells);
    }
}
