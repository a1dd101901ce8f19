//! Experiment implementations behind the CLI subcommands. Each composes
//! library calls at a configured resolution, writes CSV/SVG artifacts into
//! the output directory, and returns a report whose indicators decide the
//! exit code.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use viscolab::dbar::{self, DVar, QuadSpec};
use viscolab::domain::Domain;
use viscolab::equivalence::{self, PlateCauchyDatum};
use viscolab::first_order;
use viscolab::lab::{self, Equation};
use viscolab::plate;
use viscolab::stokes::{self, loglog_slope, NseOptions, Viscosity};

use crate::config::Config;
use crate::report::{write_table, Indicator, Report};
use crate::svg::{line_plot, Series};
use crate::Failure;

pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub out: &'a Path,
    pub seed: u64,
    pub res_override: Option<(usize, usize)>,
}

impl Ctx<'_> {
    fn resolution(&self, default: (usize, usize)) -> Result<(usize, usize), Failure> {
        if let Some(r) = self.res_override {
            return Ok(r);
        }
        Ok(self.cfg.resolution_override()?.unwrap_or(default))
    }
}

const EXPERIMENT_KEYS: (&str, &[&str]) = ("experiment", &["resolution", "seed"]);
const VISCOSITY_KEYS: (&str, &[&str]) = ("viscosity", &["family", "value", "a", "b", "c"]);

/// Named analytic viscosity families used across experiments.
fn build_viscosity(d: &Domain, cfg: &Config, default_family: &str) -> Result<Viscosity, Failure> {
    let family = cfg.str("viscosity", "family", default_family);
    let a = cfg.f64("viscosity", "a", 0.3)?;
    let b = cfg.f64("viscosity", "b", 0.0)?;
    let c = cfg.f64("viscosity", "c", 0.3)?;
    let value = cfg.f64("viscosity", "value", 1.0)?;
    let mu = match family.as_str() {
        "constant" => Viscosity::constant(d, value),
        "affine" => Viscosity::from_fn(d, |x, y| 1.0 + a * x + b * y),
        "quadratic-x" => Viscosity::from_fn(d, |x, _| 1.0 + x * x),
        "exp-linear" => Viscosity::from_fn(d, |x, _| (a * x).exp()),
        "bump" => Viscosity::from_fn(d, |x, y| {
            let w = 1.0 - x * x - y * y;
            1.0 + c * w * w
        }),
        other => {
            return Err(Failure::Usage(format!(
                "unknown viscosity family {other:?} (expected constant, affine, \
                 quadratic-x, exp-linear, or bump)"
            )))
        }
    }?;
    Ok(mu)
}

fn sup_rel(values: &[f64], exact: &[f64]) -> f64 {
    let scale = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    values
        .iter()
        .zip(exact)
        .fold(0.0f64, |m, (a, e)| m.max((a - e).abs()))
        / scale
}

/// Relative L2 distance between boundary trace pairs, components combined.
fn trace_pair_dist(a: (&[f64], &[f64]), b: (&[f64], &[f64])) -> f64 {
    let num: f64 = a
        .0
        .iter()
        .zip(b.0)
        .chain(a.1.iter().zip(b.1))
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let den: f64 = b.0.iter().chain(b.1).map(|v| v * v).sum();
    (num / den.max(1e-300)).sqrt()
}

/// Relative interior L2 distance of complex fields (boundary ring excluded,
/// where solid-transform kernels lose an order).
fn rel_l2_interior_c(d: &Domain, a: &[Complex64], b: &[Complex64]) -> f64 {
    let w = d.quad_weights();
    let nb = d.n_theta();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in nb..d.n_nodes() {
        num += w[i] * (a[i] - b[i]).norm_sqr();
        den += w[i] * b[i].norm_sqr();
    }
    (num / den.max(1e-300)).sqrt()
}

fn sup_interior_c(d: &Domain, f: &[Complex64]) -> f64 {
    f[d.n_theta()..]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.norm()))
}

fn det_small<const N: usize>(mut a: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for k in 0..N {
        let piv = (k..N)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .unwrap();
        if piv != k {
            a.swap(k, piv);
            det = -det;
        }
        if a[k][k] == 0.0 {
            return 0.0;
        }
        det *= a[k][k];
        for r in k + 1..N {
            let f = a[r][k] / a[k][k];
            for c in k..N {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    det
}

fn fnum(v: f64) -> String {
    format!("{v:.12e}")
}

// ---------------------------------------------------------------------------
// forward-stokes: manufactured flows, rigid rotation, rigid traction pair
// ---------------------------------------------------------------------------

pub fn forward_stokes(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        (
            "forward-stokes",
            &["cases", "tol", "rigid_tol", "time_limit"],
        ),
    ])?;
    let (nr, nt) = ctx.resolution((16, 64))?;
    let tol = ctx.cfg.f64("forward-stokes", "tol", 1e-6)?;
    let rigid_tol = ctx.cfg.f64("forward-stokes", "rigid_tol", 1e-8)?;
    let budget = ctx.cfg.f64("forward-stokes", "time_limit", 30.0)?;
    let cases = ctx
        .cfg
        .str_list("forward-stokes", "cases", "variable,constant,rigid,rigid-pair");

    let d = Domain::new(nr, nt)?;
    let mut rep = Report::new("forward-stokes", (nr, nt), ctx.seed);
    let mut rows = Vec::new();

    let run_case = |rep: &mut Report,
                        rows: &mut Vec<String>,
                        name: &str,
                        mu: &Viscosity,
                        exact_u: (&dyn Fn(f64, f64) -> f64, &dyn Fn(f64, f64) -> f64),
                        exact_p: &dyn Fn(f64, f64) -> f64|
     -> Result<(), Failure> {
        let e1 = d.sample(exact_u.0);
        let e2 = d.sample(exact_u.1);
        let ep = d.sample(exact_p);
        let g1 = d.boundary_trace(&e1);
        let g2 = d.boundary_trace(&e2);
        let t0 = Instant::now();
        let state = stokes::solve_stokes(&d, mu, &g1, &g2)?;
        let dt = t0.elapsed().as_secs_f64();
        let err_u = sup_rel(&state.u1, &e1).max(sup_rel(&state.u2, &e2));
        let err_p = sup_rel(&state.p, &ep);
        rows.push(format!("{name},{},{},{dt:.3}", fnum(err_u), fnum(err_p)));
        rep.push(Indicator::lt(&format!("{name}_velocity_error"), err_u, tol));
        rep.scalar(&format!("{name}_pressure_error"), err_p);
        rep.timing(&format!("{name}_solve"), dt, Some(budget));
        Ok(())
    };

    for case in &cases {
        match case.as_str() {
            // u = (x, -y), p = 2x^2 under mu = 1 + x^2; zero-mean gauge
            // shifts the pressure by its disk average 1/2
            "variable" => {
                let mu = Viscosity::from_fn(&d, |x, _| 1.0 + x * x)?;
                run_case(
                    &mut rep,
                    &mut rows,
                    "variable",
                    &mu,
                    (&|x, _| x, &|_, y| -y),
                    &|x, _| 2.0 * x * x - 0.5,
                )?;
            }
            // u = (y^2, 0), p = 2 mu0 x at constant viscosity mu0 = 2
            "constant" => {
                let mu = Viscosity::constant(&d, 2.0)?;
                run_case(
                    &mut rep,
                    &mut rows,
                    "constant",
                    &mu,
                    (&|_, y| y * y, &|_, _| 0.0),
                    &|x, _| 4.0 * x,
                )?;
            }
            // rigid rotation is strain-free, so any viscosity gives u exactly
            "rigid" => {
                let mu = Viscosity::from_fn(&d, |x, y| {
                    let w = 1.0 - x * x - y * y;
                    1.0 + 0.3 * w * w
                })?;
                run_case(
                    &mut rep,
                    &mut rows,
                    "rigid",
                    &mu,
                    (&|_, y| -y, &|x, _| x),
                    &|_, _| 0.0,
                )?;
            }
            // the traction of rigid data must vanish identically under any
            // viscosity, hence cannot distinguish viscosities
            "rigid-pair" => {
                let g1: Vec<f64> = d.angles().iter().map(|t| -t.sin()).collect();
                let g2: Vec<f64> = d.angles().iter().map(|t| t.cos()).collect();
                let mu_a = Viscosity::from_fn(&d, |x, y| {
                    let w = 1.0 - x * x - y * y;
                    1.0 + 0.3 * w * w
                })?;
                let mu_b = Viscosity::from_fn(&d, |x, _| (0.5 * x).exp())?;
                let mut sups = Vec::new();
                let mut tractions = Vec::new();
                for mu in [&mu_a, &mu_b] {
                    let state = stokes::solve_stokes(&d, mu, &g1, &g2)?;
                    let (t1, t2) = stokes::traction(&d, mu, &state);
                    sups.push(
                        t1.iter()
                            .chain(&t2)
                            .fold(0.0f64, |m, v| m.max(v.abs())),
                    );
                    tractions.push((t1, t2));
                }
                let cross = tractions[0]
                    .0
                    .iter()
                    .zip(&tractions[1].0)
                    .chain(tractions[0].1.iter().zip(&tractions[1].1))
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                rep.push(Indicator::lt("rigid_traction_sup_a", sups[0], rigid_tol));
                rep.push(Indicator::lt("rigid_traction_sup_b", sups[1], rigid_tol));
                rep.push(Indicator::lt("rigid_traction_cross_gap", cross, rigid_tol));
                rows.push(format!("rigid-pair,{},{},0", fnum(sups[0]), fnum(cross)));
            }
            other => {
                return Err(Failure::Usage(format!(
                    "unknown forward-stokes case {other:?}"
                )))
            }
        }
    }

    write_table(
        &ctx.out.join("forward-stokes.csv"),
        "case,err_velocity,err_pressure,seconds",
        &rows,
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// forward-plate: clamped fourth-order solves against closed-form potentials
// ---------------------------------------------------------------------------

pub fn forward_plate(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg
        .validate(&[EXPERIMENT_KEYS, ("forward-plate", &["tol"])])?;
    let (nr, nt) = ctx.resolution((12, 48))?;
    let tol = ctx.cfg.f64("forward-plate", "tol", 1e-6)?;
    let d = Domain::new(nr, nt)?;
    let mut rep = Report::new("forward-plate", (nr, nt), ctx.seed);
    let mut rows = Vec::new();

    // (name, viscosity, exact potential); the second potential encodes the
    // stress of the flow u = (x, -y), p = 2x^2 with mu = 1 + x^2
    let cases: Vec<(&str, Viscosity, Vec<f64>)> = vec![
        (
            "biharmonic",
            Viscosity::constant(&d, 1.0)?,
            d.sample(|x, _| x * x * x),
        ),
        (
            "variable",
            Viscosity::from_fn(&d, |x, _| 1.0 + x * x)?,
            d.sample(|x, y| y * y - x * x - x * x * x * x / 3.0),
        ),
    ];

    for (name, mu, exact) in &cases {
        let g0 = d.boundary_trace(exact);
        let g1 = d.normal_derivative_trace(exact);
        let t0 = Instant::now();
        let phi = plate::solve_plate(&d, mu, &g0, &g1)?;
        let dt = t0.elapsed().as_secs_f64();
        let err = d.rel_l2(&phi, exact);
        rows.push(format!("{name},{},{dt:.3}", fnum(err)));
        rep.push(Indicator::lt(&format!("{name}_field_error"), err, tol));
        rep.timing(&format!("{name}_solve"), dt, None);
    }

    write_table(
        &ctx.out.join("forward-plate.csv"),
        "case,err_field,seconds",
        &rows,
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// equivalence-roundtrip: flow data -> potential data -> plate solve -> back
// ---------------------------------------------------------------------------

pub fn equivalence_roundtrip(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        VISCOSITY_KEYS,
        ("equivalence-roundtrip", &["ladder", "tol", "close_tol"]),
    ])?;
    let tol = ctx.cfg.f64("equivalence-roundtrip", "tol", 1e-4)?;
    // closure defects of integrated boundary densities are discretization
    // error; the coarsest rung needs headroom well above the final accuracy
    let close_tol = ctx.cfg.f64("equivalence-roundtrip", "close_tol", 1e-2)?;
    let ladder = match ctx.res_override {
        Some(r) => vec![r],
        None => ctx
            .cfg
            .resolutions("equivalence-roundtrip", "ladder", "8x32,12x48,16x64")?,
    };

    let mut rows = Vec::new();
    let mut errs_neu = Vec::new();
    let mut errs_trac = Vec::new();
    let mut errs_vel = Vec::new();
    for &(nr, nt) in &ladder {
        let d = Domain::new(nr, nt)?;
        let mu = build_viscosity(&d, ctx.cfg, "quadratic-x")?;
        let g1: Vec<f64> = d.angles().iter().map(|t| (2.0 * t).cos()).collect();
        let g2: Vec<f64> = d.angles().iter().map(|t| (2.0 * t).sin()).collect();

        let state = stokes::solve_stokes(&d, &mu, &g1, &g2)?;
        let datum = PlateCauchyDatum::from_flow(&d, &mu, &state, close_tol)?;
        let sol = plate::PlateSystem::new(&d, &mu)?.solve_full(&datum.g0, &datum.g1)?;
        let neu = plate::neumann_from_deviator(&d, &sol.s11, &sol.s12);
        let err_neu = trace_pair_dist(
            (&neu.m_n, &neu.m_t_t),
            (&datum.m_n, &datum.m_t_t),
        );

        let (t1, t2) = stokes::traction(&d, &mu, &state);
        let (r1, r2) = equivalence::dirichlet_to_traction(&d, &datum.g0, &datum.g1);
        let err_trac = trace_pair_dist((&r1, &r2), (&t1, &t2));

        // rigid anchors for the reverse velocity chain come from the data
        let du1 = d.trace_deriv(&g1);
        let du2 = d.trace_deriv(&g2);
        let (nrm, _) = d.frame();
        let mt0 = -(nrm[0].0 * du1[0] + nrm[0].1 * du2[0]);
        let (v1, v2) = equivalence::neumann_to_velocity(&d, &neu, mt0, (g1[0], g2[0]), close_tol)?;
        let err_vel = trace_pair_dist((&v1, &v2), (&g1, &g2));

        rows.push(format!(
            "{nr},{nt},{},{},{}",
            fnum(err_neu),
            fnum(err_trac),
            fnum(err_vel)
        ));
        errs_neu.push(err_neu);
        errs_trac.push(err_trac);
        errs_vel.push(err_vel);
    }

    let (fr, ft) = *ladder.last().unwrap();
    let mut rep = Report::new("equivalence-roundtrip", (fr, ft), ctx.seed);
    rep.push(Indicator::lt(
        "neumann_roundtrip_error",
        *errs_neu.last().unwrap(),
        tol,
    ));
    rep.push(Indicator::lt(
        "traction_reverse_error",
        *errs_trac.last().unwrap(),
        tol,
    ));
    rep.push(Indicator::lt(
        "velocity_reverse_error",
        *errs_vel.last().unwrap(),
        tol,
    ));
    if errs_neu.len() >= 2 {
        // the finest rungs sit at the rounding floor where consecutive
        // ratios jitter, so require decrease across the whole ladder
        let ratio = errs_neu.last().unwrap() / errs_neu[0].max(1e-300);
        rep.push(Indicator::lt("neumann_error_refinement_ratio", ratio, 1.0));
    }

    write_table(
        &ctx.out.join("equivalence-roundtrip.csv"),
        "n_r,n_theta,err_neumann,err_traction,err_velocity",
        &rows,
    )
    .map_err(Failure::io)?;
    let nrs: Vec<f64> = ladder.iter().map(|&(nr, _)| nr as f64).collect();
    line_plot(
        &ctx.out.join("equivalence-roundtrip.svg"),
        "Round-trip errors under refinement",
        "radial rings",
        "relative L2 error",
        false,
        true,
        &[
            Series {
                label: "Neumann pair".into(),
                points: nrs.iter().copied().zip(errs_neu).collect(),
                dashed: false,
            },
            Series {
                label: "traction".into(),
                points: nrs.iter().copied().zip(errs_trac).collect(),
                dashed: false,
            },
            Series {
                label: "velocity".into(),
                points: nrs.iter().copied().zip(errs_vel).collect(),
                dashed: false,
            },
        ],
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// first-order-residual: coefficient identity, 4x4 system consistency,
// transport discrepancy
// ---------------------------------------------------------------------------

pub fn first_order_residual(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        (
            "first-order-residual",
            &[
                "parts",
                "identity_tol",
                "cubic_tol",
                "slope_min",
                "discrepancy_tol",
                "ladder",
            ],
        ),
    ])?;
    let (nr, nt) = ctx.resolution((16, 64))?;
    let identity_tol = ctx.cfg.f64("first-order-residual", "identity_tol", 1e-8)?;
    let cubic_tol = ctx.cfg.f64("first-order-residual", "cubic_tol", 1e-8)?;
    let slope_min = ctx.cfg.f64("first-order-residual", "slope_min", 1.0)?;
    let disc_tol = ctx.cfg.f64("first-order-residual", "discrepancy_tol", 1e-6)?;
    let parts = ctx
        .cfg
        .str_list("first-order-residual", "parts", "identity,dv,discrepancy");
    let ladder = ctx
        .cfg
        .resolutions("first-order-residual", "ladder", "8x32,10x40,12x48")?;

    let d = Domain::new(nr, nt)?;
    let mut rep = Report::new("first-order-residual", (nr, nt), ctx.seed);
    let mut rows = Vec::new();

    for part in &parts {
        match part.as_str() {
            // sup over interior nodes of |2 beta - dzbar alpha - alpha^2|
            "identity" => {
                let families: [(&str, Box<dyn Fn(f64, f64) -> f64>); 3] = [
                    ("exp_linear", Box::new(|x: f64, _| (2.0 * x).exp())),
                    ("quadratic", Box::new(|x: f64, _| 1.0 + x * x)),
                    (
                        "bump",
                        Box::new(|x: f64, y: f64| {
                            let w = 1.0 - x * x - y * y;
                            1.0 + 0.3 * w * w
                        }),
                    ),
                ];
                for (name, f) in &families {
                    let mu = Viscosity::from_fn(&d, f)?;
                    let (alpha, beta) = first_order::alpha_beta(&d, &mu);
                    let da = dbar::dzbar(&d, &alpha);
                    let res: Vec<Complex64> = (0..d.n_nodes())
                        .map(|k| 2.0 * beta[k] - da[k] - alpha[k] * alpha[k])
                        .collect();
                    let sup = sup_interior_c(&d, &res);
                    rows.push(format!("identity_{name},{}", fnum(sup)));
                    rep.push(Indicator::lt(
                        &format!("identity_{name}"),
                        sup,
                        identity_tol,
                    ));
                }
            }
            // lift a solved plate field into the 4-vector and check the
            // first-order system annihilates it, with order under refinement
            "dv" => {
                let mut residuals = Vec::new();
                for &(lr, lt) in &ladder {
                    let dl = Domain::new(lr, lt)?;
                    let mu = Viscosity::from_fn(&dl, |x, _| 1.0 + x * x)?;
                    let seed_field = dl.sample(|x, y| x.exp() * y.sin());
                    let g0 = dl.boundary_trace(&seed_field);
                    let g1 = dl.normal_derivative_trace(&seed_field);
                    let phi = plate::solve_plate(&dl, &mu, &g0, &g1)?;
                    let u = first_order::lift_to_u(&dl, &phi);
                    let res = first_order::dv_residual_norm(&dl, &mu, &u);
                    residuals.push(res);
                    rows.push(format!("dv_{lr}x{lt},{}", fnum(res)));
                }
                let nrs: Vec<f64> = ladder.iter().map(|&(a, _)| a as f64).collect();
                let slope = -loglog_slope(&nrs, &residuals);
                rep.scalar("dv_decay_slope", slope);
                rep.push(Indicator::gt("dv_decay_slope", slope, slope_min));
                line_plot(
                    &ctx.out.join("dv-consistency.svg"),
                    "First-order system residual under refinement",
                    "radial rings",
                    "relative residual",
                    true,
                    true,
                    &[Series {
                        label: "lifted plate solution".into(),
                        points: nrs.iter().copied().zip(residuals.clone()).collect(),
                        dashed: false,
                    }],
                )
                .map_err(Failure::io)?;

                // cubic potential with constant viscosity is annihilated to
                // differentiation accuracy
                let dc = Domain::new(10, 40)?;
                let mu = Viscosity::constant(&dc, 2.0)?;
                let cubic = dc.sample(|x, y| x * x * x - 3.0 * x * y * y);
                let u = first_order::lift_to_u(&dc, &cubic);
                let res = first_order::dv_residual_norm(&dc, &mu, &u);
                rows.push(format!("dv_cubic,{}", fnum(res)));
                rep.push(Indicator::lt("dv_cubic_residual", res, cubic_tol));
            }
            // for the pair (e^{2x}, 1) the transport obstruction must be the
            // constant 1/2
            "discrepancy" => {
                let mu1 = Viscosity::from_fn(&d, |x, _| (2.0 * x).exp())?;
                let mu2 = Viscosity::constant(&d, 1.0)?;
                let (a1, b1) = first_order::alpha_beta(&d, &mu1);
                let (a2, b2) = first_order::alpha_beta(&d, &mu2);
                let tf =
                    first_order::transport_factor(&d, &a1, &b1, &a2, &b2, &QuadSpec::default());
                let half = Complex64::new(0.5, 0.0);
                let dev: Vec<Complex64> =
                    tf.discrepancy.iter().map(|v| v - half).collect();
                let sup = sup_interior_c(&d, &dev);
                rows.push(format!("discrepancy_sup_deviation,{}", fnum(sup)));
                rep.push(Indicator::lt("discrepancy_sup_deviation", sup, disc_tol));
                rep.scalar("transport_r1_residual", tf.r1_residual);
                rep.scalar("transport_identity_residual", tf.identity_residual);
            }
            other => {
                return Err(Failure::Usage(format!(
                    "unknown first-order-residual part {other:?}"
                )))
            }
        }
    }

    write_table(
        &ctx.out.join("first-order-residual.csv"),
        "case,value",
        &rows,
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// dbar-residual: solid-transform operators and the second-order constructor
// ---------------------------------------------------------------------------

pub fn dbar_residual(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        ("dbar-residual", &["parts", "tol", "densities"]),
    ])?;
    let (nr, nt) = ctx.resolution((12, 48))?;
    let tol = ctx.cfg.f64("dbar-residual", "tol", 1e-3)?;
    let densities = ctx.cfg.f64_list("dbar-residual", "densities", &[2.0, 4.0, 8.0])?;
    let parts = ctx
        .cfg
        .str_list("dbar-residual", "parts", "order2,transform,constructor");

    let d = Domain::new(nr, nt)?;
    let mut rep = Report::new("dbar-residual", (nr, nt), ctx.seed);
    let mut rows = Vec::new();
    let zs = d.nodes_complex();

    for part in &parts {
        match part.as_str() {
            "order2" => {
                let res_of = |f: &[Complex64], q: &QuadSpec| -> Result<f64, Failure> {
                    let w = dbar::solve_dbar(&d, f, DVar::Zbar, 2, q)?;
                    let back = dbar::wirtinger(&d, &w, DVar::Zbar, 2);
                    Ok(rel_l2_interior_c(&d, &back, f))
                };
                let fields: [(&str, Vec<Complex64>); 4] = [
                    ("one", vec![Complex64::new(1.0, 0.0); d.n_nodes()]),
                    ("z", zs.clone()),
                    ("zbar", zs.iter().map(|z| z.conj()).collect()),
                    (
                        "bump",
                        d.sample_complex(|z| Complex64::new((-3.0 * z.norm_sqr()).exp(), 0.0)),
                    ),
                ];
                let default_q = QuadSpec::default();
                for (name, f) in &fields {
                    let res = res_of(f, &default_q)?;
                    rows.push(format!(
                        "order2_{name},{},{}",
                        default_q.panel_points,
                        fnum(res)
                    ));
                    rep.push(Indicator::lt(&format!("order2_{name}"), res, tol));
                }
                // radially symmetric data never touches the graded panels, so
                // the density sweep modulates the bump onto angular mode 3
                let mode_bump =
                    d.sample_complex(|z| z.powu(3) * (-3.0 * z.norm_sqr()).exp());
                let mut curve = Vec::new();
                for &density in &densities {
                    let q = QuadSpec {
                        panel_points: density as usize,
                        efolds: 12.0,
                    };
                    let res = res_of(&mode_bump, &q)?;
                    rows.push(format!("order2_mode3_bump,{density},{}", fnum(res)));
                    curve.push((density, res));
                }
                if curve.len() >= 2 {
                    let xs: Vec<f64> = curve.iter().map(|&(x, _)| x).collect();
                    let ys: Vec<f64> = curve.iter().map(|&(_, y)| y).collect();
                    let slope = -loglog_slope(&xs, &ys);
                    rep.scalar("order2_density_slope", slope);
                    rep.push(Indicator::gt("order2_density_slope", slope, 0.0));
                    line_plot(
                        &ctx.out.join("dbar-density.svg"),
                        "Second-order solver residual vs quadrature density",
                        "points per panel",
                        "relative residual",
                        true,
                        true,
                        &[Series {
                            label: "angular mode-3 bump".into(),
                            points: curve,
                            dashed: false,
                        }],
                    )
                    .map_err(Failure::io)?;
                }
            }
            // the solid transform of 1 is zbar on the disk
            "transform" => {
                let ones = vec![Complex64::new(1.0, 0.0); d.n_nodes()];
                let cau = dbar::cauchy_transform(&d, &ones, &QuadSpec::default());
                let zbar: Vec<Complex64> = zs.iter().map(|z| z.conj()).collect();
                let res = rel_l2_interior_c(&d, &cau, &zbar);
                rows.push(format!("transform_of_one,16,{}", fnum(res)));
                rep.push(Indicator::lt("transform_of_one", res, tol));
            }
            "constructor" => {
                let f: Vec<Complex64> = zs.iter().map(|z| z.conj() * z.conj()).collect();
                let g: Vec<Complex64> = zs.iter().map(|z| z * z).collect();
                let sol = dbar::solve_bi_dbar(&d, &f, &g, &QuadSpec::default(), 1e-6)?;
                rows.push(format!("constructor_res_f,16,{}", fnum(sol.res_f)));
                rows.push(format!("constructor_res_g,16,{}", fnum(sol.res_g)));
                rep.push(Indicator::lt("constructor_res_f", sol.res_f, tol));
                rep.push(Indicator::lt("constructor_res_g", sol.res_g, tol));
                let zero = vec![Complex64::new(0.0, 0.0); d.n_nodes()];
                let rejected = matches!(
                    dbar::solve_bi_dbar(&d, &f, &zero, &QuadSpec::default(), 1e-6),
                    Err(viscolab::Error::Incompatible(_))
                );
                rep.push(Indicator::check(
                    "constructor_rejects_incompatible",
                    rejected,
                    "incompatible pair rejected",
                ));
            }
            other => {
                return Err(Failure::Usage(format!(
                    "unknown dbar-residual part {other:?}"
                )))
            }
        }
    }

    write_table(
        &ctx.out.join("dbar-residual.csv"),
        "case,density,residual",
        &rows,
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// nse-scaling: advective solutions at shrinking data approach the linear one
// ---------------------------------------------------------------------------

pub fn nse_scaling(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        VISCOSITY_KEYS,
        ("nse-scaling", &["eps", "slope_tol", "time_limit"]),
    ])?;
    let (nr, nt) = ctx.resolution((12, 48))?;
    let default_eps = [1e-1, 10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3];
    let eps = ctx.cfg.f64_list("nse-scaling", "eps", &default_eps)?;
    let slope_tol = ctx.cfg.f64("nse-scaling", "slope_tol", 0.2)?;
    let budget = ctx.cfg.f64("nse-scaling", "time_limit", 600.0)?;

    let d = Domain::new(nr, nt)?;
    let mu = build_viscosity(&d, ctx.cfg, "affine")?;
    // generic smooth data mixing two angular frequencies, flux-projected
    let raw1: Vec<f64> = d
        .angles()
        .iter()
        .map(|t| t.cos() + 0.3 * (2.0 * t).sin())
        .collect();
    let raw2: Vec<f64> = d
        .angles()
        .iter()
        .map(|t| 0.7 * (2.0 * t).cos() - 0.2 * t.sin())
        .collect();
    let (g1, g2) = lab::flux_project(&d, &raw1, &raw2);

    let t0 = Instant::now();
    let report = stokes::linearization_experiment(&d, &mu, &g1, &g2, &eps, &NseOptions::default())?;
    let dt = t0.elapsed().as_secs_f64();

    let mut rep = Report::new("nse-scaling", (nr, nt), ctx.seed);
    rep.scalar("slope_velocity", report.slope_velocity);
    rep.scalar("slope_traction", report.slope_traction);
    rep.push(Indicator::within(
        "slope_velocity",
        report.slope_velocity,
        1.0,
        slope_tol,
    ));
    rep.push(Indicator::within(
        "slope_traction",
        report.slope_traction,
        1.0,
        slope_tol,
    ));
    rep.timing("experiment", dt, Some(budget));

    let rows: Vec<String> = (0..report.eps.len())
        .map(|k| {
            format!(
                "{},{},{}",
                fnum(report.eps[k]),
                fnum(report.err_velocity[k]),
                fnum(report.err_traction[k])
            )
        })
        .collect();
    write_table(
        &ctx.out.join("nse-scaling.csv"),
        "eps,err_velocity,err_traction",
        &rows,
    )
    .map_err(Failure::io)?;

    // fitted power laws drawn alongside the measured curves
    let fitted = |slope: f64, ys: &[f64]| -> Vec<(f64, f64)> {
        let mlx = report.eps.iter().map(|v| v.ln()).sum::<f64>() / report.eps.len() as f64;
        let mly = ys.iter().map(|v| v.ln()).sum::<f64>() / ys.len() as f64;
        report
            .eps
            .iter()
            .map(|&x| (x, (mly + slope * (x.ln() - mlx)).exp()))
            .collect()
    };
    line_plot(
        &ctx.out.join("nse-scaling.svg"),
        "Deviation of scaled advective data from the linear limit",
        "data scale",
        "relative error",
        true,
        true,
        &[
            Series {
                label: "velocity".into(),
                points: report.eps.iter().copied().zip(report.err_velocity.clone()).collect(),
                dashed: false,
            },
            Series {
                label: "traction".into(),
                points: report.eps.iter().copied().zip(report.err_traction.clone()).collect(),
                dashed: false,
            },
            Series {
                label: "velocity fit".into(),
                points: fitted(report.slope_velocity, &report.err_velocity),
                dashed: true,
            },
            Series {
                label: "traction fit".into(),
                points: fitted(report.slope_traction, &report.err_traction),
                dashed: true,
            },
        ],
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// boundary-jets: derivative traces recovered from potential Cauchy data
// ---------------------------------------------------------------------------

pub fn boundary_jets(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg
        .validate(&[EXPERIMENT_KEYS, ("boundary-jets", &["tol"])])?;
    let (nr, nt) = ctx.resolution((12, 48))?;
    let tol = ctx.cfg.f64("boundary-jets", "tol", 1e-4)?;
    let d = Domain::new(nr, nt)?;
    let mut rep = Report::new("boundary-jets", (nr, nt), ctx.seed);

    let mu = Viscosity::from_fn(&d, |x, _| 1.0 + 0.2 * x)?;
    let phi = d.sample(|x, y| x * x * x + x * x * y);
    let neu = plate::plate_neumann(&d, &mu, &phi);
    let datum = PlateCauchyDatum {
        g0: d.boundary_trace(&phi),
        g1: d.normal_derivative_trace(&phi),
        m_n: neu.m_n,
        m_t_t: neu.m_t_t,
    };
    let dmx = d.sample(|_, _| 0.2);
    let dmy = vec![0.0; d.n_nodes()];
    let jets = equivalence::recover_boundary_jets(
        &d,
        &d.boundary_trace(mu.values()),
        (&d.boundary_trace(&dmx), &d.boundary_trace(&dmy)),
        &datum,
    )?;

    let bd = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { d.boundary_trace(&d.sample(f)) };
    let rel = |got: &[f64], want: &[f64]| -> f64 {
        let num: f64 = got
            .iter()
            .zip(want)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        num / den
    };

    let grad_err = rel(&jets.grad.0, &bd(&|x, y| 3.0 * x * x + 2.0 * x * y))
        .max(rel(&jets.grad.1, &bd(&|x, _| x * x)));
    let hess_err = rel(&jets.hess.0, &bd(&|x, y| 6.0 * x + 2.0 * y))
        .max(rel(&jets.hess.1, &bd(&|x, _| 2.0 * x)))
        .max(rel(&jets.hess.2, &bd(&|_, _| 0.0)));
    let third_err = rel(&jets.third.0, &bd(&|_, _| 6.0))
        .max(rel(&jets.third.1, &bd(&|_, _| 2.0)))
        .max(rel(&jets.third.2, &bd(&|_, _| 0.0)))
        .max(rel(&jets.third.3, &bd(&|_, _| 0.0)));

    rep.push(Indicator::lt("gradient_trace_error", grad_err, tol));
    rep.push(Indicator::lt("hessian_trace_error", hess_err, tol));
    rep.push(Indicator::lt("third_order_trace_error", third_err, tol));

    let det2 = det_small(equivalence::second_jet_matrix((1.0, 0.0)));
    let det3 = det_small(equivalence::third_jet_matrix((1.0, 0.0)));
    rep.push(Indicator::within("second_jet_det", det2, 1.0, 1e-15));
    rep.push(Indicator::within("third_jet_det", det3, -1.0, 1e-15));

    write_table(
        &ctx.out.join("boundary-jets.csv"),
        "group,rel_error",
        &[
            format!("gradient,{}", fnum(grad_err)),
            format!("hessian,{}", fnum(hess_err)),
            format!("third,{}", fnum(third_err)),
        ],
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// uniqueness-probe: forward gaps vs the refinement noise floor
// ---------------------------------------------------------------------------

pub fn uniqueness_probe(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        (
            "uniqueness-probe",
            &[
                "c",
                "inputs",
                "nse_scale",
                "floor_factor",
                "ratio_tol",
                "jet_tol",
            ],
        ),
    ])?;
    let (nr, nt) = ctx.resolution((10, 40))?;
    let c = ctx.cfg.f64("uniqueness-probe", "c", 0.3)?;
    let count = ctx.cfg.usize("uniqueness-probe", "inputs", 8)?;
    let nse_scale = ctx.cfg.f64("uniqueness-probe", "nse_scale", 0.1)?;
    let floor_factor = ctx.cfg.f64("uniqueness-probe", "floor_factor", 10.0)?;
    let ratio_tol = ctx.cfg.f64("uniqueness-probe", "ratio_tol", 0.5)?;
    let jet_tol = ctx.cfg.f64("uniqueness-probe", "jet_tol", 1e-8)?;

    let d = Domain::new(nr, nt)?;
    let bump = move |x: f64, y: f64| {
        let w = 1.0 - x * x - y * y;
        1.0 + c * w * w
    };
    let mu1 = Viscosity::constant(&d, 1.0)?;
    let mu2 = Viscosity::from_fn(&d, bump)?;

    let t0 = Instant::now();
    let probe = lab::uniqueness_probe(&d, &mu1, &mu2, count, Some(nse_scale), jet_tol)?;

    // same-viscosity floor from a refined forward solve of the bump
    let fine = Domain::new((nr + 4).min(24), (2 * nt).min(96))?;
    let mu2_fine = Viscosity::from_fn(&fine, bump)?;
    let floor =
        lab::refinement_noise_floor(&d, &mu2, &fine, &mu2_fine, count, Equation::Stokes)?;
    let dt = t0.elapsed().as_secs_f64();

    let mut rep = Report::new("uniqueness-probe", (nr, nt), ctx.seed);
    let gap_nse = probe.gap_nse.unwrap();
    rep.scalar("gap_stokes", probe.gap_stokes);
    rep.scalar("gap_nse", gap_nse);
    rep.scalar("noise_floor", floor);
    rep.scalar("discrepancy_norm", probe.discrepancy);
    rep.scalar("sup_mu_diff", probe.sup_mu_diff);
    rep.push(Indicator::gt(
        "gap_over_floor",
        probe.gap_stokes / floor.max(1e-300),
        floor_factor,
    ));
    rep.push(Indicator::within(
        "nse_to_stokes_gap_ratio",
        gap_nse / probe.gap_stokes.max(1e-300),
        1.0,
        ratio_tol,
    ));
    rep.push(Indicator::gt("discrepancy_norm", probe.discrepancy, 1e-6));
    rep.timing("experiment", dt, None);

    write_table(
        &ctx.out.join("uniqueness-probe.csv"),
        "quantity,value",
        &[
            format!("gap_stokes,{}", fnum(probe.gap_stokes)),
            format!("gap_nse,{}", fnum(gap_nse)),
            format!("noise_floor,{}", fnum(floor)),
            format!("discrepancy_norm,{}", fnum(probe.discrepancy)),
            format!("sup_mu_diff,{}", fnum(probe.sup_mu_diff)),
        ],
    )
    .map_err(Failure::io)?;
    Ok(rep)
}

// ---------------------------------------------------------------------------
// reconstruct: parametric least squares against a synthetic dataset
// ---------------------------------------------------------------------------

pub fn reconstruct(ctx: &Ctx) -> Result<Report, Failure> {
    ctx.cfg.validate(&[
        EXPERIMENT_KEYS,
        (
            "reconstruct",
            &[
                "c",
                "noise",
                "inputs",
                "reg_weight",
                "tol_rel",
                "honest",
                "max_iter",
            ],
        ),
    ])?;
    let (nr, nt) = ctx.resolution((10, 40))?;
    let c = ctx.cfg.f64("reconstruct", "c", 0.3)?;
    let noise = ctx.cfg.f64("reconstruct", "noise", 0.0)?;
    let count = ctx.cfg.usize("reconstruct", "inputs", 8)?;
    let reg_weight = ctx.cfg.f64("reconstruct", "reg_weight", 0.0)?;
    let tol_rel = ctx.cfg.f64("reconstruct", "tol_rel", 0.01)?;
    let honest = ctx.cfg.bool("reconstruct", "honest", false)?;
    let max_iter = ctx.cfg.usize("reconstruct", "max_iter", 60)?;

    let d = Domain::new(nr, nt)?;
    let bump = move |x: f64, y: f64| {
        let w = 1.0 - x * x - y * y;
        1.0 + c * w * w
    };

    let t0 = Instant::now();
    // honest mode synthesizes the data on a finer grid and restricts it,
    // avoiding the inverse crime of sharing one discretization
    let data = if honest {
        let fine = Domain::new((nr + 4).min(24), (2 * nt).min(96))?;
        let truth = Viscosity::from_fn(&fine, bump)?;
        let ds = lab::synth_dataset(
            &fine,
            &truth,
            "bump",
            &lab::standard_inputs(&fine, count),
            Equation::Stokes,
            noise,
            ctx.seed,
        )?;
        lab::restrict_to_coarse(&ds, nt)?
    } else {
        let truth = Viscosity::from_fn(&d, bump)?;
        lab::synth_dataset(
            &d,
            &truth,
            "bump",
            &lab::standard_inputs(&d, count),
            Equation::Stokes,
            noise,
            ctx.seed,
        )?
    };
    if let Some((i, msg)) = data.failures.first() {
        return Err(Failure::Run(format!(
            "forward synthesis failed for input {i}: {msg}"
        )));
    }

    let opts = lab::ReconstructOptions {
        reg_weight,
        max_iter,
        ..Default::default()
    };
    let res = lab::reconstruct_mu(&d, &data, &lab::bump_basis(&d, 1), &vec![1.0; d.n_nodes()], &opts)?;
    let dt = t0.elapsed().as_secs_f64();

    let rel_err = (res.params[0] - c).abs() / c.abs().max(1e-300);
    let monotone = res
        .objective_history
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));

    let mut rep = Report::new("reconstruct", (nr, nt), ctx.seed);
    rep.scalar("c_truth", c);
    rep.scalar("c_estimate", res.params[0]);
    rep.scalar("final_misfit", res.misfit);
    rep.scalar("iterations", res.iterations as f64);
    rep.push(Indicator::lt("amplitude_relative_error", rel_err, tol_rel));
    rep.push(Indicator::check(
        "converged",
        res.converged,
        "optimizer reached gradient tolerance or exhausted progress",
    ));
    rep.push(Indicator::check(
        "objective_monotone",
        monotone,
        "accepted objective values never increase",
    ));
    rep.timing("experiment", dt, None);

    let rows: Vec<String> = res
        .objective_history
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{k},{}", fnum(*v)))
        .collect();
    write_table(
        &ctx.out.join("reconstruct.csv"),
        "iteration,objective",
        &rows,
    )
    .map_err(Failure::io)?;
    line_plot(
        &ctx.out.join("reconstruct.svg"),
        "Objective decay during reconstruction",
        "accepted step",
        "objective",
        false,
        true,
        &[Series {
            label: "misfit + regularization".into(),
            points: res
                .objective_history
                .iter()
                .enumerate()
                .map(|(k, v)| (k as f64, *v))
                .collect(),
            dashed: false,
        }],
    )
    .map_err(Failure::io)?;
    Ok(rep)
}
