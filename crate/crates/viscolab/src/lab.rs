//! Synthetic Cauchy-data experiments. A dataset samples the boundary
//! measurement map of one viscosity over a fixed family of Dirichlet inputs;
//! gaps between datasets probe identifiability, and a small parametric
//! least-squares loop inverts the map on low-dimensional viscosity families.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dbar;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::first_order::alpha_beta;
use crate::stokes::{self, check_flux, NseOptions, StokesSystem, Viscosity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Stokes,
    Nse,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Stokes => "stokes",
            Equation::Nse => "nse",
        })
    }
}

impl FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stokes" => Ok(Equation::Stokes),
            "nse" => Ok(Equation::Nse),
            other => Err(Error::Invalid(format!(
                "unknown equation tag {other:?} (expected stokes or nse)"
            ))),
        }
    }
}

/// One boundary measurement: a Dirichlet velocity trace and the traction it
/// produced.
#[derive(Debug, Clone)]
pub struct StokesCauchyDatum {
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CauchyDataset {
    pub tag: String,
    pub equation: Equation,
    pub noise: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub data: Vec<StokesCauchyDatum>,
    /// Inputs whose forward solve failed, with the reported reason; the
    /// dataset is still returned with the remaining data.
    pub failures: Vec<(usize, String)>,
}

/// Removes the net-flux component of a boundary velocity by subtracting the
/// matching multiple of the outward normal, so incompressible solvers accept
/// the trace.
pub fn flux_project(d: &Domain, g1: &[f64], g2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let lam = check_flux(d, g1, g2) / (2.0 * std::f64::consts::PI);
    let (nrm, _) = d.frame();
    let p1 = (0..d.n_theta()).map(|j| g1[j] - lam * nrm[j].0).collect();
    let p2 = (0..d.n_theta()).map(|j| g2[j] - lam * nrm[j].1).collect();
    (p1, p2)
}

/// First `count` members of the standard input family: coordinate unit
/// vectors carried by cos(k theta) and sin(k theta) for k = 1, 2, ..., each
/// flux-projected. Eight inputs cover both components of the first two
/// angular frequencies.
pub fn standard_inputs(d: &Domain, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let nb = d.n_theta();
    let zero = vec![0.0; nb];
    let mut out = Vec::with_capacity(count);
    let mut k = 1.0;
    while out.len() < count {
        let c: Vec<f64> = d.angles().iter().map(|t| (k * t).cos()).collect();
        let s: Vec<f64> = d.angles().iter().map(|t| (k * t).sin()).collect();
        let four = [
            (c.clone(), zero.clone()),
            (zero.clone(), c),
            (s.clone(), zero.clone()),
            (zero.clone(), s),
        ];
        for (a, b) in four {
            if out.len() < count {
                out.push(flux_project(d, &a, &b));
            }
        }
        k += 1.0;
    }
    out
}

fn perturb(t1: &mut [f64], t2: &mut [f64], noise: f64, rng: &mut ChaCha8Rng) {
    let n = (t1.len() + t2.len()) as f64;
    let ss: f64 = t1.iter().chain(t2.iter()).map(|v| v * v).sum();
    let rms = (ss / n).sqrt();
    for v in t1.iter_mut().chain(t2.iter_mut()) {
        let xi: f64 = StandardNormal.sample(rng);
        *v += noise * rms * xi;
    }
}

/// Solves the chosen equation for every input and records (input, traction)
/// pairs, optionally perturbed by relative Gaussian noise. Solve failures are
/// recorded per input instead of aborting the dataset.
pub fn synth_dataset(
    d: &Domain,
    mu: &Viscosity,
    tag: &str,
    inputs: &[(Vec<f64>, Vec<f64>)],
    equation: Equation,
    noise: f64,
    seed: u64,
) -> Result<CauchyDataset> {
    let sys = StokesSystem::new(d, mu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::new();
    let mut failures = Vec::new();
    for (i, (g1, g2)) in inputs.iter().enumerate() {
        let solved = match equation {
            Equation::Stokes => sys.solve(g1, g2),
            Equation::Nse => {
                stokes::solve_nse_with(d, &sys, g1, g2, &NseOptions::default()).map(|s| s.state)
            }
        };
        match solved {
            Ok(state) => {
                let (mut t1, mut t2) = stokes::traction(d, mu, &state);
                if noise > 0.0 {
                    perturb(&mut t1, &mut t2, noise, &mut rng);
                }
                data.push(StokesCauchyDatum {
                    g1: g1.clone(),
                    g2: g2.clone(),
                    t1,
                    t2,
                });
            }
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    Ok(CauchyDataset {
        tag: tag.into(),
        equation,
        noise,
        n_r: d.n_r(),
        n_theta: d.n_theta(),
        data,
        failures,
    })
}

fn trace_l2(t1: &[f64], t2: &[f64]) -> f64 {
    let w = 2.0 * std::f64::consts::PI / t1.len() as f64;
    (t1.iter().chain(t2.iter()).map(|v| v * v).sum::<f64>() * w).sqrt()
}

fn datum_distance(a: &StokesCauchyDatum, b: &StokesCauchyDatum) -> f64 {
    let w = 2.0 * std::f64::consts::PI / a.t1.len() as f64;
    let num: f64 = (0..a.t1.len())
        .map(|j| {
            let d1 = a.t1[j] - b.t1[j];
            let d2 = a.t2[j] - b.t2[j];
            d1 * d1 + d2 * d2
        })
        .sum::<f64>()
        * w;
    let den = 0.5 * (trace_l2(&a.t1, &a.t2) + trace_l2(&b.t1, &b.t2));
    num.sqrt() / den.max(1e-300)
}

/// Largest relative L2 distance between traction traces at matched inputs.
/// Symmetric in its arguments; zero exactly when every pair agrees.
pub fn cauchy_gap(a: &CauchyDataset, b: &CauchyDataset) -> Result<f64> {
    if a.n_theta != b.n_theta {
        return Err(Error::Invalid(format!(
            "datasets sample different boundary grids ({} vs {} nodes)",
            a.n_theta, b.n_theta
        )));
    }
    if a.data.len() != b.data.len() {
        return Err(Error::Invalid(format!(
            "datasets hold different input counts ({} vs {})",
            a.data.len(),
            b.data.len()
        )));
    }
    let mut gap = 0.0f64;
    for (i, (da, db)) in a.data.iter().zip(&b.data).enumerate() {
        let scale = da
            .g1
            .iter()
            .chain(&da.g2)
            .fold(1.0f64, |m, v| m.max(v.abs()));
        let mismatch = da
            .g1
            .iter()
            .zip(&db.g1)
            .chain(da.g2.iter().zip(&db.g2))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if mismatch > 1e-10 * scale {
            return Err(Error::Invalid(format!(
                "input {i} differs between datasets (sup gap {mismatch:.3e})"
            )));
        }
        gap = gap.max(datum_distance(da, db));
    }
    Ok(gap)
}

/// Restricts a dataset sampled on a finer angular grid to the nodes of a
/// coarser one; the fine node count must be a multiple of the coarse count.
pub fn restrict_to_coarse(fine: &CauchyDataset, n_theta: usize) -> Result<CauchyDataset> {
    if n_theta == 0 || fine.n_theta % n_theta != 0 {
        return Err(Error::Invalid(format!(
            "cannot restrict {} boundary nodes to {n_theta}",
            fine.n_theta
        )));
    }
    let stride = fine.n_theta / n_theta;
    let cut = |v: &[f64]| -> Vec<f64> { v.iter().step_by(stride).copied().collect() };
    Ok(CauchyDataset {
        tag: fine.tag.clone(),
        equation: fine.equation,
        noise: fine.noise,
        n_r: fine.n_r,
        n_theta,
        data: fine
            .data
            .iter()
            .map(|dm| StokesCauchyDatum {
                g1: cut(&dm.g1),
                g2: cut(&dm.g2),
                t1: cut(&dm.t1),
                t2: cut(&dm.t2),
            })
            .collect(),
        failures: fine.failures.clone(),
    })
}

/// Discretization noise floor for gap comparisons: the gap between one
/// viscosity's dataset on the working grid and the same viscosity solved on
/// a finer grid, restricted back to the working boundary nodes. Gaps between
/// genuinely different viscosities should clear this floor by a wide margin.
pub fn refinement_noise_floor(
    d: &Domain,
    mu: &Viscosity,
    fine: &Domain,
    mu_fine: &Viscosity,
    count: usize,
    equation: Equation,
) -> Result<f64> {
    let base = synth_dataset(d, mu, "base", &standard_inputs(d, count), equation, 0.0, 0)?;
    let refined = synth_dataset(
        fine,
        mu_fine,
        "refined",
        &standard_inputs(fine, count),
        equation,
        0.0,
        0,
    )?;
    cauchy_gap(&base, &restrict_to_coarse(&refined, d.n_theta())?)
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub gap_stokes: f64,
    pub gap_nse: Option<f64>,
    /// Interior L2 norm of the transport-identity discrepancy
    /// 2(b1 - b2) - a2(a1 - a2) - dzbar(a1 - a2) - (a1 - a2)^2/2.
    pub discrepancy: f64,
    pub sup_mu_diff: f64,
}

/// Probes identifiability for a viscosity pair with matching boundary jets:
/// forward Cauchy gaps plus the first-order discrepancy indicator. All
/// indicators vanish together exactly when the viscosities coincide; the
/// uniqueness theory predicts they are simultaneously positive otherwise.
pub fn uniqueness_probe(
    d: &Domain,
    mu1: &Viscosity,
    mu2: &Viscosity,
    count: usize,
    nse_scale: Option<f64>,
    jet_tol: f64,
) -> Result<UniquenessReport> {
    let b1 = d.boundary_trace(mu1.values());
    let b2 = d.boundary_trace(mu2.values());
    let scale = b1.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut jet_gap = b1
        .iter()
        .zip(&b2)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    for grad in [
        (d.dx_apply(mu1.values()), d.dx_apply(mu2.values())),
        (d.dy_apply(mu1.values()), d.dy_apply(mu2.values())),
    ] {
        let g1 = d.boundary_trace(&grad.0);
        let g2 = d.boundary_trace(&grad.1);
        jet_gap = g1
            .iter()
            .zip(&g2)
            .fold(jet_gap, |m, (x, y)| m.max((x - y).abs()));
    }
    if jet_gap > jet_tol * scale {
        return Err(Error::Invalid(format!(
            "viscosity boundary jets differ by {jet_gap:.3e}; the uniqueness \
             hypothesis needs matching value and gradient on the boundary"
        )));
    }

    let inputs = standard_inputs(d, count);
    let synth_pair = |eq: Equation, scl: f64| -> Result<(CauchyDataset, CauchyDataset)> {
        let scaled: Vec<(Vec<f64>, Vec<f64>)> = inputs
            .iter()
            .map(|(a, b)| {
                (
                    a.iter().map(|v| scl * v).collect(),
                    b.iter().map(|v| scl * v).collect(),
                )
            })
            .collect();
        let da = synth_dataset(d, mu1, "mu1", &scaled, eq, 0.0, 0)?;
        let db = synth_dataset(d, mu2, "mu2", &scaled, eq, 0.0, 0)?;
        for (ds, name) in [(&da, "first"), (&db, "second")] {
            if let Some((i, msg)) = ds.failures.first() {
                return Err(Error::Solver(format!(
                    "forward solve failed for input {i} of the {name} viscosity: {msg}"
                )));
            }
        }
        Ok((da, db))
    };

    let (sa, sb) = synth_pair(Equation::Stokes, 1.0)?;
    let gap_stokes = cauchy_gap(&sa, &sb)?;
    let gap_nse = match nse_scale {
        Some(scl) => {
            let (na, nb) = synth_pair(Equation::Nse, scl)?;
            Some(cauchy_gap(&na, &nb)?)
        }
        None => None,
    };

    let (a1, be1) = alpha_beta(d, mu1);
    let (a2, be2) = alpha_beta(d, mu2);
    let diff: Vec<_> = a1.iter().zip(&a2).map(|(x, y)| x - y).collect();
    let ddiff = dbar::dzbar(d, &diff);
    let disc: Vec<_> = (0..d.n_nodes())
        .map(|k| {
            2.0 * (be1[k] - be2[k]) - a2[k] * diff[k] - ddiff[k] - 0.5 * diff[k] * diff[k]
        })
        .collect();
    let discrepancy = dbar::norm_l2_c_interior(d, &disc);

    let sup_mu_diff = mu1
        .values()
        .iter()
        .zip(mu2.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));

    Ok(UniquenessReport {
        gap_stokes,
        gap_nse,
        discrepancy,
        sup_mu_diff,
    })
}

/// Bump-carried polynomial basis vanishing to first order on the boundary:
/// (1 - |z|^2)^2 times 1, x, y, x^2, xy, y^2.
pub fn bump_basis(d: &Domain, count: usize) -> Vec<Vec<f64>> {
    assert!(count <= 6, "bump basis provides at most six members");
    let monos: [fn(f64, f64) -> f64; 6] = [
        |_, _| 1.0,
        |x, _| x,
        |_, y| y,
        |x, _| x * x,
        |x, y| x * y,
        |_, y| y * y,
    ];
    monos[..count]
        .iter()
        .map(|m| {
            d.sample(|x, y| {
                let b = 1.0 - x * x - y * y;
                b * b * m(x, y)
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ReconstructOptions {
    pub reg_weight: f64,
    pub max_iter: usize,
    /// Sup-norm gradient threshold, relative to max(1, objective scale).
    pub grad_tol: f64,
    /// Central-difference step for the parameter gradient.
    pub fd_step: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            reg_weight: 0.0,
            max_iter: 60,
            grad_tol: 1e-7,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub params: Vec<f64>,
    /// Accepted objective values, starting with the initial point;
    /// non-increasing by line-search construction.
    pub objective_history: Vec<f64>,
    pub misfit: f64,
    pub mu_hat: Vec<f64>,
    pub iterations: usize,
    /// True when the gradient dropped below tolerance or the objective
    /// stopped decreasing to rounding precision.
    pub converged: bool,
}

struct Objective<'a> {
    domain: &'a Domain,
    data: &'a CauchyDataset,
    basis: &'a [Vec<f64>],
    background: &'a [f64],
    reg_weight: f64,
}

impl Objective<'_> {
    fn field(&self, params: &[f64]) -> Vec<f64> {
        let mut f = self.background.to_vec();
        for (c, b) in params.iter().zip(self.basis) {
            for (v, bv) in f.iter_mut().zip(b) {
                *v += c * bv;
            }
        }
        f
    }

    /// Objective and bare misfit; positivity violations and solver failures
    /// surface as errors so the line search can back away from them.
    fn eval(&self, params: &[f64]) -> Result<(f64, f64)> {
        let field = self.field(params);
        if field.iter().any(|&v| v <= 0.0) {
            return Err(Error::Invalid(
                "candidate viscosity loses positivity".into(),
            ));
        }
        let mu = Viscosity::new(self.domain, field)?;
        let sys = StokesSystem::new(self.domain, &mu)?;
        let mut misfit = 0.0;
        for datum in &self.data.data {
            let state = match self.data.equation {
                Equation::Stokes => sys.solve(&datum.g1, &datum.g2)?,
                Equation::Nse => stokes::solve_nse_with(
                    self.domain,
                    &sys,
                    &datum.g1,
                    &datum.g2,
                    &NseOptions::default(),
                )?
                .state,
            };
            let (t1, t2) = stokes::traction(self.domain, &mu, &state);
            let w = 2.0 * std::f64::consts::PI / t1.len() as f64;
            misfit += (0..t1.len())
                .map(|j| {
                    let d1 = t1[j] - datum.t1[j];
                    let d2 = t2[j] - datum.t2[j];
                    d1 * d1 + d2 * d2
                })
                .sum::<f64>()
                * w;
        }
        let reg: f64 = self.reg_weight * params.iter().map(|v| v * v).sum::<f64>();
        Ok((misfit + reg, misfit))
    }

    fn gradient(&self, params: &[f64], h: f64) -> Result<Vec<f64>> {
        let mut g = vec![0.0; params.len()];
        let mut probe = params.to_vec();
        for k in 0..params.len() {
            probe[k] = params[k] + h;
            let fp = self.eval(&probe)?.0;
            probe[k] = params[k] - h;
            let fm = self.eval(&probe)?.0;
            probe[k] = params[k];
            g[k] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }
}

/// Fits viscosity parameters to a Cauchy dataset by quasi-Newton descent on
/// the traction misfit, with finite-difference gradients. The candidate
/// viscosity is background + sum of parameter-weighted basis fields; the
/// basis must vanish to first order on the boundary so every candidate keeps
/// the true boundary jet. Minimizes misfit + reg_weight * |params|^2.
pub fn reconstruct_mu(
    d: &Domain,
    data: &CauchyDataset,
    basis: &[Vec<f64>],
    background: &[f64],
    opts: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    if data.n_theta != d.n_theta() {
        return Err(Error::Invalid(format!(
            "dataset boundary grid ({} nodes) does not match the domain ({})",
            data.n_theta,
            d.n_theta()
        )));
    }
    if basis.is_empty() {
        return Err(Error::Invalid("empty reconstruction basis".into()));
    }
    for b in basis {
        if b.len() != d.n_nodes() {
            return Err(Error::Invalid("basis field has wrong length".into()));
        }
    }
    let obj = Objective {
        domain: d,
        data,
        basis,
        background,
        reg_weight: opts.reg_weight,
    };

    let np = basis.len();
    let mut params = vec![0.0; np];
    let (mut f, mut misfit) = obj.eval(&params)?;
    let mut g = obj.gradient(&params, opts.fd_step)?;
    let mut history = vec![f];
    let mut hinv: Vec<Vec<f64>> = (0..np)
        .map(|i| (0..np).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut converged = false;
    let mut iterations = 0;
    let mut stalls = 0;

    for _ in 0..opts.max_iter {
        let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if gnorm <= opts.grad_tol * f.max(1.0) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir: Vec<f64> = (0..np)
            .map(|i| -(0..np).map(|j| hinv[i][j] * g[j]).sum::<f64>())
            .collect();
        let mut slope: f64 = dir.iter().zip(&g).map(|(p, q)| p * q).sum();
        if slope >= 0.0 {
            // curvature estimate went bad; restart from steepest descent
            for (i, row) in hinv.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 };
                }
            }
            dir = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }

        // Armijo backtracking; positivity or solver failures shrink the step
        let mut step = 1.0f64;
        let mut accepted = None;
        while step > 1e-12 {
            let cand: Vec<f64> = params
                .iter()
                .zip(&dir)
                .map(|(p, q)| p + step * q)
                .collect();
            match obj.eval(&cand) {
                Ok((fc, mc)) if fc <= f + 1e-4 * step * slope => {
                    accepted = Some((cand, fc, mc));
                    break;
                }
                _ => step *= 0.5,
            }
        }
        let Some((cand, fc, mc)) = accepted else {
            break; // no admissible decrease along this direction
        };

        let gc = obj.gradient(&cand, opts.fd_step)?;
        let s: Vec<f64> = cand.iter().zip(&params).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let snorm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * snorm * ynorm {
            // BFGS inverse update: (I - r s y')(H)(I - r y s') + r s s'
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..np)
                .map(|i| (0..np).map(|j| hinv[i][j] * y[j]).sum())
                .collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..np {
                for j in 0..np {
                    hinv[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                }
            }
        }

        // Progress test: with noisy data the gradient bottoms out at the
        // finite-difference floor, so two consecutive steps that change the
        // objective by less than rounding count as convergence.
        if f - fc <= 1e-12 * f.max(1.0) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        params = cand;
        f = fc;
        misfit = mc;
        g = gc;
        history.push(f);
        if stalls >= 2 {
            converged = true;
            break;
        }
    }

    if !converged {
        let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        converged = gnorm <= opts.grad_tol * f.max(1.0);
    }
    Ok(ReconstructionResult {
        mu_hat: obj.field(&params),
        params,
        objective_history: history,
        misfit,
        iterations,
        converged,
    })
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: u32,
    n_r: usize,
    n_theta: usize,
    tag: String,
    equation: Equation,
    noise: f64,
    count: usize,
    failures: Vec<(usize, String)>,
}

/// Writes a dataset as a directory bundle: `manifest.json` plus one
/// `datum_NNN.csv` per input with columns node, theta, g1, g2, t1, t2.
pub fn save_dataset(ds: &CauchyDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = Manifest {
        schema: 1,
        n_r: ds.n_r,
        n_theta: ds.n_theta,
        tag: ds.tag.clone(),
        equation: ds.equation,
        noise: ds.noise,
        count: ds.data.len(),
        failures: ds.failures.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    for (k, datum) in ds.data.iter().enumerate() {
        let mut s = String::from("node,theta,g1,g2,t1,t2\n");
        for j in 0..ds.n_theta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / ds.n_theta as f64;
            s.push_str(&format!(
                "{j},{theta:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                datum.g1[j], datum.g2[j], datum.t1[j], datum.t2[j]
            ));
        }
        fs::write(dir.join(format!("datum_{k:03}.csv")), s)?;
    }
    Ok(())
}

pub fn load_dataset(dir: &Path) -> Result<CauchyDataset> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("manifest: {e}")))?;
    if manifest.schema != 1 {
        return Err(Error::Malformed(format!(
            "unsupported dataset schema {}",
            manifest.schema
        )));
    }
    let mut data = Vec::with_capacity(manifest.count);
    for k in 0..manifest.count {
        let name = format!("datum_{k:03}.csv");
        let body = fs::read_to_string(dir.join(&name))?;
        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        for (ln, line) in body.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Malformed(format!(
                    "{name}:{}: expected 6 columns, found {}",
                    ln + 1,
                    cols.len()
                )));
            }
            let parse = |c: &str| -> Result<f64> {
                c.trim().parse().map_err(|e| {
                    Error::Malformed(format!("{name}:{}: bad number {c:?}: {e}", ln + 1))
                })
            };
            g1.push(parse(cols[2])?);
            g2.push(parse(cols[3])?);
            t1.push(parse(cols[4])?);
            t2.push(parse(cols[5])?);
        }
        if g1.len() != manifest.n_theta {
            return Err(Error::Malformed(format!(
                "{name}: {} rows, manifest says {}",
                g1.len(),
                manifest.n_theta
            )));
        }
        data.push(StokesCauchyDatum { g1, g2, t1, t2 });
    }
    Ok(CauchyDataset {
        tag: manifest.tag,
        equation: manifest.equation,
        noise: manifest.noise,
        n_r: manifest.n_r,
        n_theta: manifest.n_theta,
        data,
        failures: manifest.failures,
    })
}
