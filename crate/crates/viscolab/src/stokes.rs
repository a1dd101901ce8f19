//! Variable-viscosity Stokes and Navier-Stokes flow solvers.
//!
//! Velocity, pressure, and one scalar multiplier are collocated on the full
//! grid: momentum rows at interior nodes, Dirichlet rows on the boundary
//! ring, the continuity equation everywhere (relaxed by the multiplier,
//! which absorbs the one-dimensional incompatibility of tiny nonzero flux),
//! and an area-mean gauge row pinning the pressure.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{self, LuSolver};
use faer::Mat;

/// Pointwise positive viscosity samples on a grid.
#[derive(Debug, Clone)]
pub struct Viscosity {
    values: Vec<f64>,
}

impl Viscosity {
    /// Wraps raw samples, rejecting non-positive or non-finite values.
    pub fn new(d: &Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != d.n_nodes() {
            return Err(Error::Invalid(format!(
                "viscosity has {} samples for {} nodes",
                values.len(),
                d.n_nodes()
            )));
        }
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !min.is_finite() || min <= 0.0 {
            return Err(Error::Invalid(format!(
                "viscosity must be positive and finite, min sample {min}"
            )));
        }
        Ok(Self { values })
    }

    pub fn from_fn(d: &Domain, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::new(d, d.sample(f))
    }

    pub fn constant(d: &Domain, c: f64) -> Result<Self> {
        Self::new(d, vec![c; d.n_nodes()])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Velocity, pressure, and the continuity multiplier of one solve. The
/// pressure carries the zero-area-mean gauge; `multiplier` stays at roundoff
/// size whenever the boundary data have zero flux.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub p: Vec<f64>,
    pub multiplier: f64,
}

/// Net volume flux of a boundary velocity through the circle.
pub fn check_flux(d: &Domain, g1: &[f64], g2: &[f64]) -> f64 {
    let (n, _) = d.frame();
    let vals: Vec<f64> = (0..d.n_theta())
        .map(|j| g1[j] * n[j].0 + g2[j] * n[j].1)
        .collect();
    d.boundary_integral(&vals)
}

/// Assembled and factored Stokes operator for one (grid, viscosity) pair;
/// the factorization is reused across right-hand sides, Picard iterations,
/// and data sweeps.
pub struct StokesSystem<'a> {
    domain: &'a Domain,
    lu: LuSolver,
    filt_u: Mat<f64>,
    filt_p: Mat<f64>,
    size: usize,
}

impl<'a> StokesSystem<'a> {
    pub fn new(d: &'a Domain, mu: &Viscosity) -> Result<Self> {
        let n = d.n_nodes();
        let nb = d.n_theta();
        let m = mu.values();
        let dx = d.dx_mat();
        let dy = d.dy_mat();

        // diag(mu) . D, i.e. differentiate first and scale the result
        let scale_rows = |mat: &Mat<f64>, s: &[f64], factor: f64| -> Mat<f64> {
            Mat::from_fn(n, n, |i, j| mat[(i, j)] * s[i] * factor)
        };
        // (div sigma)_1 = Dx 2mu Dx u1 + Dy mu Dy u1 + Dy mu Dx u2 - Dx p
        // (div sigma)_2 = Dx mu Dy u1 + Dx mu Dx u2 + Dy 2mu Dy u2 - Dy p
        let mu_dx = scale_rows(dx, m, 1.0);
        let mu_dy = scale_rows(dy, m, 1.0);
        let mu2_dx = scale_rows(dx, m, 2.0);
        let mu2_dy = scale_rows(dy, m, 2.0);
        let a11 = dx * &mu2_dx + dy * &mu_dy;
        let a12 = dy * &mu_dx;
        let a21 = dx * &mu_dy;
        let a22 = dx * &mu_dx + dy * &mu2_dy;
        drop(mu_dx);
        drop(mu_dy);
        drop(mu2_dx);
        drop(mu2_dy);

        let size = 3 * n + 1;
        let mut a = Mat::<f64>::zeros(size, size);
        for r in 0..n {
            if r < nb {
                // velocity data rows
                a[(r, r)] = 1.0;
                a[(n + r, n + r)] = 1.0;
            } else {
                for c in 0..n {
                    a[(r, c)] = a11[(r, c)];
                    a[(r, n + c)] = a12[(r, c)];
                    a[(n + r, c)] = a21[(r, c)];
                    a[(n + r, n + c)] = a22[(r, c)];
                }
                for c in 0..n {
                    a[(r, 2 * n + c)] = -dx[(r, c)];
                    a[(n + r, 2 * n + c)] = -dy[(r, c)];
                }
            }
        }
        for r in 0..n {
            for c in 0..n {
                a[(2 * n + r, c)] = dx[(r, c)];
                a[(2 * n + r, n + c)] = dy[(r, c)];
            }
            a[(2 * n + r, 3 * n)] = -1.0;
        }
        let w = d.quad_weights();
        for c in 0..n {
            a[(3 * n, 2 * n + c)] = w[c];
        }

        // The raw collocated system is rank deficient: the even-length
        // Fourier differentiation matrix annihilates the angular Nyquist
        // mode, which lets checkerboard-flavored pressures (and, paired with
        // them, spurious near-Nyquist velocity modes) slip through every
        // momentum row. Dealias in the classical way, with the pressure two
        // angular modes short of the velocity: solve P A P + (I - P) against
        // P rhs, where P drops the top velocity mode and the top two
        // pressure modes on every ring. Smooth fields only carry
        // aliasing-floor energy there, and the filtered system is
        // uniformly invertible.
        let filt_u = linalg::angular_lowpass(nb, nb / 2 - 1);
        let filt_p = linalg::angular_lowpass(nb, nb / 2 - 2);
        for blk in 0..3 {
            let f = if blk == 2 { &filt_p } else { &filt_u };
            linalg::filter_block_rows(&mut a, f, blk * n, d.n_r());
        }
        for blk in 0..3 {
            let f = if blk == 2 { &filt_p } else { &filt_u };
            linalg::filter_block_cols(&mut a, f, blk * n, d.n_r());
        }
        for blk in 0..3 {
            let f = if blk == 2 { &filt_p } else { &filt_u };
            linalg::add_filter_complement(&mut a, f, blk * n, d.n_r());
        }

        Ok(Self {
            domain: d,
            lu: LuSolver::new(a),
            filt_u,
            filt_p,
            size,
        })
    }

    /// Solves with Dirichlet data `(g1, g2)` and zero body force.
    pub fn solve(&self, g1: &[f64], g2: &[f64]) -> Result<FlowState> {
        self.solve_forced(g1, g2, None)
    }

    /// Solves with Dirichlet data and a body force sampled on the grid
    /// (`div sigma = force` at interior nodes).
    pub fn solve_forced(
        &self,
        g1: &[f64],
        g2: &[f64],
        force: Option<(&[f64], &[f64])>,
    ) -> Result<FlowState> {
        let d = self.domain;
        let n = d.n_nodes();
        let nb = d.n_theta();
        assert_eq!(g1.len(), nb);
        assert_eq!(g2.len(), nb);

        let gscale = g1
            .iter()
            .chain(g2)
            .fold(0.0f64, |a, v| a.max(v.abs()))
            .max(1.0);
        let flux = check_flux(d, g1, g2);
        if flux.abs() > 1e-6 * gscale * 2.0 * std::f64::consts::PI {
            return Err(Error::Incompatible(format!(
                "boundary data pump net flux {flux:.3e} through the circle"
            )));
        }

        let mut rhs = vec![0.0; self.size];
        for j in 0..nb {
            rhs[j] = g1[j];
            rhs[n + j] = g2[j];
        }
        if let Some((f1, f2)) = force {
            assert_eq!(f1.len(), n);
            assert_eq!(f2.len(), n);
            for r in nb..n {
                rhs[r] = f1[r];
                rhs[n + r] = f2[r];
            }
        }
        for blk in 0..3 {
            let f = if blk == 2 { &self.filt_p } else { &self.filt_u };
            linalg::filter_vec(&mut rhs, f, blk * n, d.n_r());
        }
        let x = self.lu.solve_vec(&rhs);
        let sol = FlowState {
            u1: x[..n].to_vec(),
            u2: x[n..2 * n].to_vec(),
            p: x[2 * n..3 * n].to_vec(),
            multiplier: x[3 * n],
        };
        if !sol.multiplier.is_finite() || !sol.p.iter().all(|v| v.is_finite()) {
            return Err(Error::Solver("factorization produced non-finite solution".into()));
        }
        Ok(sol)
    }
}

/// One-shot Stokes solve.
pub fn solve_stokes(d: &Domain, mu: &Viscosity, g1: &[f64], g2: &[f64]) -> Result<FlowState> {
    StokesSystem::new(d, mu)?.solve(g1, g2)
}

/// Cauchy stress tensor fields `(s11, s12, s22)` of a flow state.
pub fn stress(d: &Domain, mu: &Viscosity, s: &FlowState) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = mu.values();
    let u1x = d.dx_apply(&s.u1);
    let u1y = d.dy_apply(&s.u1);
    let u2x = d.dx_apply(&s.u2);
    let u2y = d.dy_apply(&s.u2);
    let n = d.n_nodes();
    let mut s11 = vec![0.0; n];
    let mut s12 = vec![0.0; n];
    let mut s22 = vec![0.0; n];
    for i in 0..n {
        s11[i] = 2.0 * m[i] * u1x[i] - s.p[i];
        s12[i] = m[i] * (u1y[i] + u2x[i]);
        s22[i] = 2.0 * m[i] * u2y[i] - s.p[i];
    }
    (s11, s12, s22)
}

/// Boundary traction `sigma . n` of a flow state.
pub fn traction(d: &Domain, mu: &Viscosity, s: &FlowState) -> (Vec<f64>, Vec<f64>) {
    let (s11, s12, s22) = stress(d, mu, s);
    let (nrm, _) = d.frame();
    let nb = d.n_theta();
    let mut t1 = vec![0.0; nb];
    let mut t2 = vec![0.0; nb];
    for j in 0..nb {
        t1[j] = s11[j] * nrm[j].0 + s12[j] * nrm[j].1;
        t2[j] = s12[j] * nrm[j].0 + s22[j] * nrm[j].1;
    }
    (t1, t2)
}

/// Controls for the Picard iteration of the stationary Navier-Stokes solve.
#[derive(Debug, Clone, Copy)]
pub struct NseOptions {
    pub max_iter: usize,
    /// Relative update below which the iteration is declared converged.
    pub tol: f64,
}

impl Default for NseOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-11,
        }
    }
}

/// Converged Navier-Stokes state with the update history of the iteration.
pub struct NseSolution {
    pub state: FlowState,
    pub iterations: usize,
    /// Relative update sizes per iteration.
    pub updates: Vec<f64>,
}

/// Stationary Navier-Stokes via Picard iteration on the advective term,
/// reusing one factorization. Fails with the update history when the
/// iteration is not contracting.
pub fn solve_nse(
    d: &Domain,
    mu: &Viscosity,
    g1: &[f64],
    g2: &[f64],
    opts: &NseOptions,
) -> Result<NseSolution> {
    let sys = StokesSystem::new(d, mu)?;
    solve_nse_with(d, &sys, g1, g2, opts)
}

/// Same as [`solve_nse`] but reusing an already factored system.
pub fn solve_nse_with(
    d: &Domain,
    sys: &StokesSystem,
    g1: &[f64],
    g2: &[f64],
    opts: &NseOptions,
) -> Result<NseSolution> {
    let n = d.n_nodes();
    let mut state = sys.solve(g1, g2)?;
    let mut updates = Vec::new();
    for it in 0..opts.max_iter {
        let u1x = d.dx_apply(&state.u1);
        let u1y = d.dy_apply(&state.u1);
        let u2x = d.dx_apply(&state.u2);
        let u2y = d.dy_apply(&state.u2);
        let mut f1 = vec![0.0; n];
        let mut f2 = vec![0.0; n];
        for i in 0..n {
            f1[i] = state.u1[i] * u1x[i] + state.u2[i] * u1y[i];
            f2[i] = state.u1[i] * u2x[i] + state.u2[i] * u2y[i];
        }
        let next = sys.solve_forced(g1, g2, Some((&f1, &f2)))?;
        let du: Vec<f64> = next
            .u1
            .iter()
            .zip(&state.u1)
            .map(|(a, b)| a - b)
            .chain(next.u2.iter().zip(&state.u2).map(|(a, b)| a - b))
            .collect();
        let nu: Vec<f64> = next.u1.iter().chain(&next.u2).cloned().collect();
        let wdup: Vec<f64> = d
            .quad_weights()
            .iter()
            .chain(d.quad_weights())
            .cloned()
            .collect();
        let norm = |v: &[f64]| -> f64 {
            v.iter()
                .zip(&wdup)
                .map(|(x, w)| w * x * x)
                .sum::<f64>()
                .sqrt()
        };
        let rel = norm(&du) / norm(&nu).max(1e-300);
        updates.push(rel);
        state = next;
        if rel < opts.tol {
            return Ok(NseSolution {
                state,
                iterations: it + 1,
                updates,
            });
        }
        if updates.len() >= 3 {
            let k = updates.len();
            let r1 = updates[k - 1] / updates[k - 2].max(1e-300);
            let r2 = updates[k - 2] / updates[k - 3].max(1e-300);
            if r1 > 0.9 && r2 > 0.9 {
                return Err(Error::Solver(format!(
                    "advective iteration is not contracting, updates [{}]",
                    fmt_updates(&updates)
                )));
            }
        }
    }
    Err(Error::Solver(format!(
        "advective iteration did not converge in {} steps, updates [{}]",
        opts.max_iter,
        fmt_updates(&updates)
    )))
}

/// Scaled errors of the Navier-Stokes Cauchy data against the Stokes
/// linearization, for a sweep of boundary-data amplitudes.
pub struct LinearizationReport {
    pub eps: Vec<f64>,
    /// Interior L2 distance between `u_eps/eps` and the Stokes velocity.
    pub err_velocity: Vec<f64>,
    /// Boundary L2 distance between the scaled tractions.
    pub err_traction: Vec<f64>,
    pub slope_velocity: f64,
    pub slope_traction: f64,
}

/// Drives the Navier-Stokes system at amplitudes `eps * (g1, g2)` and
/// measures how fast its rescaled Cauchy data approach the Stokes data.
pub fn linearization_experiment(
    d: &Domain,
    mu: &Viscosity,
    g1: &[f64],
    g2: &[f64],
    eps: &[f64],
    opts: &NseOptions,
) -> Result<LinearizationReport> {
    let sys = StokesSystem::new(d, mu)?;
    let base = sys.solve(g1, g2)?;
    let (bt1, bt2) = traction(d, mu, &base);

    let mut err_velocity = Vec::new();
    let mut err_traction = Vec::new();
    for &e in eps {
        let ge1: Vec<f64> = g1.iter().map(|v| e * v).collect();
        let ge2: Vec<f64> = g2.iter().map(|v| e * v).collect();
        let nse = solve_nse_with(d, &sys, &ge1, &ge2, opts)?;
        let dv: Vec<f64> = (0..d.n_nodes())
            .map(|i| nse.state.u1[i] / e - base.u1[i])
            .chain((0..d.n_nodes()).map(|i| nse.state.u2[i] / e - base.u2[i]))
            .collect();
        let vel_err = {
            let w = d.quad_weights();
            let s: f64 = dv[..d.n_nodes()]
                .iter()
                .zip(w)
                .map(|(x, wi)| wi * x * x)
                .sum::<f64>()
                + dv[d.n_nodes()..]
                    .iter()
                    .zip(w)
                    .map(|(x, wi)| wi * x * x)
                    .sum::<f64>();
            s.sqrt()
        };
        let (t1, t2) = traction(d, mu, &nse.state);
        let tr: Vec<f64> = (0..d.n_theta())
            .map(|j| t1[j] / e - bt1[j])
            .collect();
        let ti: Vec<f64> = (0..d.n_theta())
            .map(|j| t2[j] / e - bt2[j])
            .collect();
        let trac_err = (d.boundary_integral(&tr.iter().map(|v| v * v).collect::<Vec<_>>())
            + d.boundary_integral(&ti.iter().map(|v| v * v).collect::<Vec<_>>()))
        .sqrt();
        err_velocity.push(vel_err);
        err_traction.push(trac_err);
    }
    let slope_velocity = loglog_slope(eps, &err_velocity);
    let slope_traction = loglog_slope(eps, &err_traction);
    Ok(LinearizationReport {
        eps: eps.to_vec(),
        err_velocity,
        err_traction,
        slope_velocity,
        slope_traction,
    })
}

fn fmt_updates(u: &[f64]) -> String {
    u.iter()
        .map(|v| format!("{v:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
