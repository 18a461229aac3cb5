//! One function per subcommand: build inputs, dispatch to the owning
//! module, and assemble a [`Report`].

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use super::suite::{run_suite, suite_trace, SuiteConfig};
use super::{num, resolve_manifold, Report, TraceTable, Verdict};
use crate::distance::verify::{hessian_trials, laplacian_trial};
use crate::distance::SecondVariation;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{ChartManifold, Point};
use crate::jets::{
    check_condition_h, check_proper, check_solution_side, grid_points, Modulus, OperatorF, ProperSpec, SampledFunction,
    SolutionOptions, SolutionSide,
};
use crate::principle::{
    boundary_indices, dirichlet_comparison, omori_yau_search, pair_distance, parabolic_boundary, parabolic_comparison,
    revalidate, space_time_samples, transform_check, yau_points, DirichletOptions, DirichletStatus, OmoriYauOptions,
    OyMode, ParabolicOptions, WindowLadder,
};
use crate::random::{pair_at_distance, shrink, stream, tag};

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Manifold definition file, or a bundled name (hyperbolic2, hyperbolic3,
    /// euclidean, sphere2, perturbed2, disk, line).
    #[arg(long)]
    pub manifold: Option<String>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory for report.json and trace.csv.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_ladder: Vec<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Window ladder `r0,count,spacing`.
    #[arg(long, value_delimiter = ',')]
    pub window: Vec<f64>,
}

impl Common {
    fn manifold(&self, default: &str) -> Result<ChartManifold> {
        resolve_manifold(self.manifold.as_deref().unwrap_or(default))
    }

    fn tol(&self, default: f64) -> Result<f64> {
        let t = self.tol.unwrap_or(default);
        if t > 0.0 {
            Ok(t)
        } else {
            Err(Error::Config(format!("--tol must be positive, got {t}")))
        }
    }

    fn windows(&self, center: Vec<f64>, default: [f64; 3]) -> Result<WindowLadder> {
        let w = if self.window.is_empty() { default.to_vec() } else { self.window.clone() };
        if w.len() != 3 || w[0] <= 0.0 || w[1] < 1.0 || w[2] <= 0.0 {
            return Err(Error::Config("--window expects r0,count,spacing with positive entries".into()));
        }
        Ok(WindowLadder::doubling(center, w[0], w[1] as usize, w[2]))
    }
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn coords(x: &Point) -> String {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComparisonArgs {
    #[command(flatten)]
    pub common: Common,
    /// Pair lengths, used in turn by successive trials. Defaults to
    /// 0.1,0.5,1,2, keeping those below pi/(2 sqrt K) when `sec_lower` = K > 0.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Vec<f64>,
}

fn comparison_rows(args: &ComparisonArgs, laplacian: bool) -> Result<Report> {
    let m = args.common.manifold("hyperbolic2")?;
    let tol = args.common.tol(1e-4)?;
    let trials = args.common.trials.unwrap_or(100);
    let lengths: Vec<f64> = if args.lengths.is_empty() {
        let cap = if m.sec_lower > 0.0 { std::f64::consts::FRAC_PI_2 / m.sec_lower.sqrt() } else { f64::INFINITY };
        let mut ls: Vec<f64> = [0.1, 0.5, 1.0, 2.0].into_iter().filter(|l| *l < 0.9 * cap).collect();
        if ls.is_empty() {
            ls.push(0.5 * cap);
        }
        ls
    } else {
        args.lengths.clone()
    };
    let domain = if laplacian { tag::LAPLACIAN } else { tag::HESSIAN };
    let mut t = TraceTable::new(&["trial", "l", "x", "y", "lhs", "rhs", "slack", "kappa", "pass"]);
    let mut all = true;
    let mut max_slack = f64::NEG_INFINITY;
    let mut min_slack = f64::INFINITY;
    for k in 0..trials {
        let l = lengths[k % lengths.len()];
        let mut rng = stream(args.common.seed, domain, k as u32);
        let (x, y) = pair_at_distance(&mut rng, &m, l, 0.9)
            .ok_or_else(|| Error::Config(format!("no pair at distance {l} inside the chart")))?;
        let sv = SecondVariation::new(&m, &x, &y)?;
        let r = if laplacian {
            laplacian_trial(&m, &sv, tol)?
        } else {
            hessian_trials(&m, &sv, 1, tol, &mut rng)?.remove(0)
        };
        all &= r.pass;
        max_slack = max_slack.max(r.slack);
        min_slack = min_slack.min(r.slack);
        t.push(vec![
            k.to_string(),
            num(r.l),
            coords(&x),
            coords(&y),
            num(r.lhs),
            num(r.rhs),
            num(r.slack),
            r.kappa_label(),
            r.pass.to_string(),
        ]);
    }
    let name = if laplacian { "verify-laplacian" } else { "verify-hessian" };
    Ok(Report::new(
        name,
        args,
        verdict(all),
        format!("{trials} trials on {}: slack in [{min_slack:.3e}, {max_slack:.3e}], tol {tol:e}", m.id),
        json!({ "manifold": m.id, "sec_lower": m.sec_lower, "ric_lower": m.ric_lower, "min_slack": min_slack, "max_slack": max_slack }),
        t,
    ))
}

pub fn verify_hessian(args: &ComparisonArgs) -> Result<Report> {
    comparison_rows(args, false)
}

pub fn verify_laplacian(args: &ComparisonArgs) -> Result<Report> {
    comparison_rows(args, true)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OperatorArgs {
    #[command(flatten)]
    pub common: Common,
    /// `linear_elliptic:{beta}`, `eikonal`, or `user[:beta]`.
    #[arg(long, default_value = "linear_elliptic:1")]
    pub operator: String,
    /// Source term `f(x)` for linear_elliptic, or the full expression for user.
    #[arg(long)]
    pub expr: Option<String>,
    /// Modulus for condition (H), e.g. `power:2,1`.
    #[arg(long)]
    pub omega: Option<String>,
}

impl OperatorArgs {
    fn build(&self, dim: usize) -> Result<OperatorF> {
        let mut op = OperatorF::from_tag(&self.operator, self.expr.as_deref(), dim)?;
        if let Some(w) = &self.omega {
            op = op.with_omega_h(w.parse::<Modulus>()?);
        }
        Ok(op)
    }
}

pub fn check_operator(args: &OperatorArgs) -> Result<Report> {
    let m = args.common.manifold("euclidean")?;
    let op = args.build(m.dim)?;
    let spec = ProperSpec {
        points: args.common.trials.unwrap_or(20),
        tol: args.common.tol(1e-9)?,
        ..ProperSpec::default()
    };
    let cert = check_proper(&op, &m, &spec, &mut stream(args.common.seed, tag::OPERATOR, 0));
    let mut t = TraceTable::new(&["check", "samples", "worst", "pass"]);
    let names = ["degenerate_elliptic", "monotone_in_r", "beta_monotone"];
    let flags = [cert.degenerate_elliptic, cert.monotone_in_r, cert.beta_monotone];
    for i in 0..3 {
        t.push(vec![names[i].into(), cert.samples.to_string(), num(cert.worst[i]), flags[i].to_string()]);
    }
    let mut pass = cert.proper;
    let mut h = None;
    if let Some(omega) = &op.omega_h {
        let mut rng = stream(args.common.seed, tag::CONDITION_H, 0);
        let mut pairs = Vec::new();
        for l in [0.05, 0.2, 0.5] {
            for _ in 0..3 {
                pairs.extend(pair_at_distance(&mut rng, &m, l, 0.9));
            }
        }
        let alphas = if args.common.alpha_ladder.is_empty() { vec![1.0, 10.0, 100.0] } else { args.common.alpha_ladder.clone() };
        let c = check_condition_h(&op, &m, &pairs, &alphas, omega, 3, 1e-12, &mut rng)?;
        t.push(vec!["condition_h".into(), c.rows.len().to_string(), num(c.max_ratio), c.pass.to_string()]);
        pass &= c.pass;
        h = Some(c);
    }
    Ok(Report::new(
        "check-operator",
        args,
        verdict(pass),
        format!("{}: proper {}, beta-monotone {} (beta {})", op.name, cert.proper, cert.beta_monotone, op.beta),
        json!({ "proper": cert, "condition_h": h }),
        t,
    ))
}

/// A sampled function from a file, or `expr:<expression in x1..xn>`
/// sampled on the chart lattice of the given spacing.
pub fn load_function(m: &ChartManifold, spec: &str, spacing: f64) -> Result<SampledFunction> {
    if let Some(src) = spec.strip_prefix("expr:") {
        let e = Expr::in_coordinates(src, m.dim)?;
        return Ok(SampledFunction::from_fn(m, grid_points(&m.domain, spacing), |x| e.eval(x.as_slice())));
    }
    let f = SampledFunction::load(spec)?;
    if f.dim() != m.dim {
        return Err(Error::Dimension {
            expected: m.dim,
            got: f.dim(),
        });
    }
    Ok(f)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolutionArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Function file or `expr:...`.
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value = "sub")]
    pub side: String,
    /// Jet fit radius.
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    /// Lattice spacing for `expr:` functions.
    #[arg(long, default_value_t = 0.02)]
    pub spacing: f64,
    /// Spacing of the check points (inside 80% of the chart).
    #[arg(long, default_value_t = 0.25)]
    pub check_spacing: f64,
}

pub fn check_solution(args: &SolutionArgs) -> Result<Report> {
    let m = args.op.common.manifold("euclidean")?;
    let op = args.op.build(m.dim)?;
    let side = match args.side.as_str() {
        "sub" => SolutionSide::Sub,
        "super" => SolutionSide::Super,
        other => return Err(Error::Config(format!("--side must be sub or super, got `{other}`"))),
    };
    let u = load_function(&m, &args.function, args.spacing)?;
    let mut opts = SolutionOptions::new(args.radius);
    if let Some(t) = args.op.common.tol {
        opts.f_tol = t;
    }
    let grid = grid_points(&shrink(&m.domain, 0.8), args.check_spacing);
    let rep = check_solution_side(&op, &m, &u, &grid, side, &opts);
    let mut t = TraceTable::new(&["point", "value", "jets", "vacuous", "worst", "pass", "error"]);
    for p in &rep.points {
        t.push(vec![
            p.point.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "),
            num(p.value),
            p.jets.len().to_string(),
            p.vacuous.to_string(),
            num(p.worst),
            p.pass.to_string(),
            p.error.clone().unwrap_or_default(),
        ]);
    }
    Ok(Report::new(
        "check-solution",
        args,
        verdict(rep.pass),
        format!("{} points, {} vacuous, {} failed fits, worst {:.3e}", rep.points.len(), rep.vacuous, rep.failed_fits, rep.worst),
        serde_json::to_value(&rep).unwrap_or_default(),
        t,
    ))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DirichletArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long)]
    pub u1: String,
    #[arg(long)]
    pub u2: String,
    #[arg(long, default_value_t = 0.06)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.025)]
    pub spacing: f64,
    /// Samples this close to the chart boundary carry the boundary data.
    #[arg(long, default_value_t = 0.03)]
    pub boundary_width: f64,
    #[arg(long, default_value_t = 0.25)]
    pub check_spacing: f64,
}

pub fn compare_dirichlet(args: &DirichletArgs) -> Result<Report> {
    let c = &args.op.common;
    let m = c.manifold("disk")?;
    let op = args.op.build(m.dim)?;
    let u1 = load_function(&m, &args.u1, args.spacing)?;
    let u2 = load_function(&m, &args.u2, args.spacing)?;
    let boundary = boundary_indices(&m.domain, &u1.points, args.boundary_width);
    let checks = grid_points(&shrink(&m.domain, 0.75), args.check_spacing);
    let mut opts = DirichletOptions::new(boundary, checks, args.radius);
    opts.tol = c.tol(1e-6)?;
    if !c.alpha_ladder.is_empty() {
        opts.alpha_ladder = c.alpha_ladder.clone();
    }
    let v = dirichlet_comparison(&op, &m, &u1, &u2, &opts, &mut stream(c.seed, tag::OPERATOR, 0))?;
    let mut t = TraceTable::new(&["alpha", "mu_alpha", "d", "alpha_d2", "x_alpha", "y_alpha"]);
    for s in &v.ladder {
        t.push(vec![
            num(s.alpha),
            num(s.mu_alpha),
            num(s.d),
            num(s.alpha_d2()),
            coords(&s.x_point()),
            coords(&s.y_point()),
        ]);
    }
    let status = match v.status {
        DirichletStatus::Pass => Verdict::Pass,
        DirichletStatus::Fail => Verdict::Fail,
        DirichletStatus::Rejected => Verdict::Rejected,
    };
    let summary = match v.status {
        DirichletStatus::Rejected => format!("rejected: {}", v.certification.reasons.join("; ")),
        _ => format!("max(u1 - u2) = {:.3e} (tol {:e})", v.max_gap, v.tol),
    };
    Ok(Report::new("compare-dirichlet", args, status, summary, serde_json::to_value(&v).unwrap_or_default(), t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OmoriYauArgs {
    #[command(flatten)]
    pub common: Common,
    /// `u` as an expression in x1..xn and d0 (distance to the window center).
    #[arg(long, default_value = "0")]
    pub u: String,
    #[arg(long)]
    pub v: String,
    #[arg(long, default_value = "hessian")]
    pub mode: String,
    /// Modulus driving the penalty schedule.
    #[arg(long, default_value = "power:1,1")]
    pub omega: String,
    /// Window center (defaults to the origin).
    #[arg(long, value_delimiter = ',')]
    pub center: Vec<f64>,
    /// Stencil radius of the independent re-fit.
    #[arg(long, default_value_t = 0.05)]
    pub refit_radius: f64,
}

/// Compiles an expression in `x1..xn` and `d0`, the distance to `center`.
fn point_function(m: &ChartManifold, src: &str, center: &Point) -> Result<impl Fn(&Point) -> f64> {
    let mut names: Vec<String> = (1..=m.dim).map(|i| format!("x{i}")).collect();
    names.push("d0".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let e = Expr::compile(src, &refs)?;
    let uses_d0 = src.contains("d0");
    let m = m.clone();
    let center = center.clone();
    Ok(move |x: &Point| {
        let mut vars = x.as_slice().to_vec();
        vars.push(if uses_d0 { pair_distance(&m, &center, x).unwrap_or(f64::NAN) } else { 0.0 });
        e.eval(&vars)
    })
}

pub fn omori_yau(args: &OmoriYauArgs) -> Result<Report> {
    let c = &args.common;
    let m = c.manifold("hyperbolic2")?;
    let center = if args.center.is_empty() { vec![0.0; m.dim] } else { args.center.clone() };
    let cp = Point::from_column_slice(&center);
    let u = point_function(&m, &args.u, &cp)?;
    let v = point_function(&m, &args.v, &cp)?;
    let mode: OyMode = args.mode.parse()?;
    let mut opts = OmoriYauOptions::new(c.epsilon.unwrap_or(0.1), mode, c.windows(center, [0.2, 3.0, 0.01])?, args.omega.parse()?);
    if !c.alpha_ladder.is_empty() {
        opts.penalty.alpha_ladder = c.alpha_ladder.clone();
    }
    let rep = omori_yau_search(&m, &u, &v, &opts)?;
    let mut t = TraceTable::new(&[
        "window", "alpha", "mu0", "sigma", "d", "alpha_d2", "lambda", "omega_alpha", "value_gap", "p_minus_q", "second_order", "invariants", "pass",
    ]);
    for r in &rep.rows {
        t.push(vec![
            num(r.window_radius),
            num(r.alpha),
            num(r.mu0),
            num(r.sigma),
            num(r.d),
            num(r.alpha_d2),
            num(r.lambda),
            num(r.omega_alpha),
            num(r.value_gap),
            num(r.p_minus_q),
            num(r.second_order),
            (r.sigma_floor && r.penalty_bound && r.anchor_decay).to_string(),
            r.pass.to_string(),
        ]);
    }
    let re = match &rep.certificate {
        Some(cert) => Some(revalidate(&m, cert, &u, &v, args.refit_radius)?),
        None => None,
    };
    let pass = rep.certificate.is_some() && re.as_ref().is_some_and(|r| r.pass);
    let summary = match &rep.certificate {
        Some(cert) => format!(
            "certificate at x = {:?}, y = {:?} (window {}, alpha {:e}); revalidated: {}",
            cert.x_eps,
            cert.y_eps,
            cert.window_radius,
            cert.alpha,
            re.as_ref().is_some_and(|r| r.pass)
        ),
        None => format!("no certificate: {}", rep.diagnosis.clone().unwrap_or_default()),
    };
    Ok(Report::new("omori-yau", args, verdict(pass), summary, json!({ "search": rep, "revalidation": re }), t))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct YauArgs {
    #[command(flatten)]
    pub common: Common,
    /// `f` as an expression in x1..xn and d0.
    #[arg(long)]
    pub f: String,
    #[arg(long, value_delimiter = ',')]
    pub center: Vec<f64>,
}

pub fn yau(args: &YauArgs) -> Result<Report> {
    let c = &args.common;
    let m = c.manifold("line")?;
    let center = if args.center.is_empty() { vec![0.0; m.dim] } else { args.center.clone() };
    let f = point_function(&m, &args.f, &Point::from_column_slice(&center))?;
    let eps = c.epsilon.unwrap_or(0.1);
    let y = yau_points(&m, &f, eps, c.windows(center, [1.0, 3.0, 0.005])?)?;
    let mut t = TraceTable::new(&["check", "value", "relation", "bound", "pass"]);
    for ch in &y.checks {
        t.push(vec![ch.name.clone(), num(ch.value), ch.relation.clone(), num(ch.bound), ch.pass.to_string()]);
    }
    Ok(Report::new(
        "yau-points",
        args,
        verdict(y.pass),
        format!("x = {:?}, f = {:.6}, |grad f| = {:.3e}, laplacian = {:.4}", y.x, y.f, y.grad_norm, y.laplacian),
        serde_json::to_value(&y).unwrap_or_default(),
        t,
    ))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParabolicArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    /// Subsolution candidate, an expression in t, x1..xn.
    #[arg(long)]
    pub u: String,
    /// Supersolution candidate.
    #[arg(long)]
    pub v: String,
    /// Horizon `T` of the `eps/(T - t)` transform.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.02)]
    pub spacing: f64,
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
}

fn space_time_function(m: &ChartManifold, src: &str) -> Result<impl Fn(f64, &Point) -> f64> {
    let mut names = vec!["t".to_string()];
    names.extend((1..=m.dim).map(|i| format!("x{i}")));
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let e = Expr::compile(src, &refs)?;
    Ok(move |t: f64, x: &Point| {
        let mut vars = vec![t];
        vars.extend_from_slice(x.as_slice());
        e.eval(&vars)
    })
}

pub fn compare_parabolic(args: &ParabolicArgs) -> Result<Report> {
    let c = &args.op.common;
    let m = c.manifold("line")?;
    let op = args.op.build(m.dim)?;
    if !(args.dt > 0.0 && args.t_end > 0.0) {
        return Err(Error::Config("--dt and --t-end must be positive".into()));
    }
    let steps = (args.t_end / args.dt).round() as usize;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * args.dt).collect();
    let space = grid_points(&m.domain, args.spacing);
    let uf = space_time_function(&m, &args.u)?;
    let vf = space_time_function(&m, &args.v)?;
    let u = space_time_samples(&m, &space, &times, &uf);
    let v = space_time_samples(&m, &space, &times, &vf);
    let probes: Vec<Point> = grid_points(&shrink(&m.domain, 0.6), 0.3 * m.domain.scale());
    let mut checks = Vec::new();
    for frac in [0.25, 0.5, 0.75] {
        let t = (frac * args.t_end / args.dt).round() * args.dt;
        checks.extend(probes.iter().map(|x| (t, x.clone())));
    }
    let tol = c.tol(1e-6)?;
    let opts = ParabolicOptions {
        tol,
        boundary: parabolic_boundary(&u, &m.domain, 0.5 * args.spacing)?,
        check_points: checks.clone(),
        radius: args.radius,
        time_radius: 2.0 * args.dt,
        f_tol: 1e-2,
    };
    let verdict_cmp = parabolic_comparison(&op, &m, &u, &v, &opts)?;
    let eps = c.epsilon.unwrap_or(0.1);
    let tr = transform_check(&op, &m, &u, args.horizon, eps, &checks, args.radius, 2.0 * args.dt, 1e-6)?;
    let mut t = TraceTable::new(&["t", "x", "a_u", "a_tilde", "required", "slope_error", "decrease", "pass"]);
    for r in &tr.rows {
        t.push(vec![
            num(r.t),
            r.x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" "),
            num(r.a_u),
            num(r.a_tilde),
            num(r.required),
            num(r.slope_error),
            num(r.decrease),
            r.pass.to_string(),
        ]);
    }
    let status = match verdict_cmp.status {
        DirichletStatus::Pass if tr.pass => Verdict::Pass,
        DirichletStatus::Rejected => Verdict::Rejected,
        _ => Verdict::Fail,
    };
    Ok(Report::new(
        "compare-parabolic",
        args,
        status,
        format!(
            "comparison {:?} (max interior gap {:.3e}); transform max slope error {:.2e}",
            verdict_cmp.status, verdict_cmp.max_interior_gap, tr.max_slope_error
        ),
        json!({ "comparison": verdict_cmp, "transform": tr }),
        t,
    ))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub common: Common,
    /// Criterion keys or numbers to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

pub fn suite(args: &SuiteArgs) -> Result<Report> {
    let cfg = SuiteConfig {
        seed: args.common.seed,
        only: args.only.clone(),
        sharpness_tol: args.common.tol(1e-4)?,
    };
    let results = run_suite(&cfg)?;
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| format!("{} ({})", r.key, r.id)).collect();
    let summary = if failed.is_empty() {
        format!("{} criteria passed", results.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Ok(Report::new(
        "suite",
        args,
        verdict(failed.is_empty()),
        summary,
        serde_json::to_value(&results).unwrap_or_default(),
        suite_trace(&results),
    ))
}
