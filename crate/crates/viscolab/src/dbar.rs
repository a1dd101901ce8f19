//! Wirtinger calculus, the solid Cauchy transform, and d-bar solvers.
//!
//! The solid transform `Cau[f](z) = (1/pi) * integral of f(w)/(z-w) dA(w)`
//! is evaluated mode by mode: the angular Fourier mode `k` of `f` maps to
//! mode `k-1` of the output through one-dimensional radial integrals whose
//! kernels are powers bounded by one, so nothing amplifies roundoff. Inward
//! power kernels are polynomial and integrate exactly; outward ones get
//! composite Gauss panels graded toward the concentration radius.

use crate::domain::{
    bary_eval, dft, gauss_legendre, idft, signed_mode, Domain,
};
use crate::error::{Error, Result};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which Wirtinger variable an equation differentiates in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DVar {
    Z,
    Zbar,
}

/// Quadrature density for the radial integrals of the solid transform.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    /// Gauss points per panel.
    pub panel_points: usize,
    /// Maximum decay (in e-folds of the power kernel) per panel.
    pub efolds: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            panel_points: 16,
            efolds: 12.0,
        }
    }
}

/// `d/dz = (d/dx - i d/dy)/2`.
pub fn dz(d: &Domain, f: &[Complex64]) -> Vec<Complex64> {
    let fx = d.dx_apply_c(f);
    let fy = d.dy_apply_c(f);
    fx.iter()
        .zip(&fy)
        .map(|(a, b)| 0.5 * (a - I * b))
        .collect()
}

/// `d/dzbar = (d/dx + i d/dy)/2`.
pub fn dzbar(d: &Domain, f: &[Complex64]) -> Vec<Complex64> {
    let fx = d.dx_apply_c(f);
    let fy = d.dy_apply_c(f);
    fx.iter()
        .zip(&fy)
        .map(|(a, b)| 0.5 * (a + I * b))
        .collect()
}

/// Iterated Wirtinger derivative of the given order.
pub fn wirtinger(d: &Domain, f: &[Complex64], var: DVar, order: u32) -> Vec<Complex64> {
    let mut g = f.to_vec();
    for _ in 0..order {
        g = match var {
            DVar::Z => dz(d, &g),
            DVar::Zbar => dzbar(d, &g),
        };
    }
    g
}

/// Solid Cauchy transform `(1/pi) * integral of f(w)/(z-w) dA(w)` at every
/// grid node. Satisfies `dzbar(Cau[f]) = f`; `Cau[1] = zbar`.
pub fn cauchy_transform(d: &Domain, f: &[Complex64], q: &QuadSpec) -> Vec<Complex64> {
    let n = d.n_theta();
    let nr = d.n_r();
    let p = 2 * nr;
    let m_full = p - 1;
    assert_eq!(f.len(), d.n_nodes());

    let ring_modes: Vec<Vec<Complex64>> = (0..nr).map(|i| dft(&f[i * n..(i + 1) * n])).collect();

    let mut out_modes = vec![vec![ZERO; n]; nr];
    let mut gext_re = vec![0.0; p];
    let mut gext_im = vec![0.0; p];
    for m in 0..n {
        let k = signed_mode(m, n);
        // Extend the radial mode profile to the full diameter by parity.
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        for idx in 0..p {
            let g = if idx < nr {
                ring_modes[idx][m]
            } else {
                sign * ring_modes[m_full - idx][m]
            };
            gext_re[idx] = g.re;
            gext_im[idx] = g.im;
        }
        let prof = radial_profile(d, k, &gext_re, &gext_im, q);
        let slot = (k - 1).rem_euclid(n as i64) as usize;
        for i in 0..nr {
            out_modes[i][slot] += prof[i];
        }
    }

    let mut out = vec![ZERO; d.n_nodes()];
    for i in 0..nr {
        let vals = idft(&out_modes[i]);
        out[i * n..(i + 1) * n].copy_from_slice(&vals);
    }
    out
}

/// Radial factor of the transform for angular mode `k`, at every grid radius.
///
/// For `k <= 0` the integrand is `2 g(rho) (rho/r)^(1-k)` on `[0, r]`: a
/// polynomial (the interpolant times an integer power), integrated exactly by
/// one Gauss rule of sufficient degree. For `k >= 1` it is
/// `-2 g(rho) (r/rho)^(k-1)` on `[r, 1]`, integrated on panels graded
/// geometrically toward `rho = r` where the kernel concentrates.
fn radial_profile(
    d: &Domain,
    k: i64,
    g_re: &[f64],
    g_im: &[f64],
    q: &QuadSpec,
) -> Vec<Complex64> {
    let nodes = d.lobatto_nodes();
    let bw = d.bary_weights();
    let radii = d.radii();
    let p_full = nodes.len();
    let geval = |rho: f64| {
        Complex64::new(
            bary_eval(nodes, bw, g_re, rho),
            bary_eval(nodes, bw, g_im, rho),
        )
    };

    let mut out = Vec::with_capacity(radii.len());
    if k <= 0 {
        let a = (1 - k) as i32;
        let degree = (p_full - 1) as i32 + a;
        let ngl = (degree / 2 + 2) as usize;
        let (gx, gw) = gauss_legendre(ngl);
        for &r in radii {
            let mut s = ZERO;
            for (&xq, &wq) in gx.iter().zip(&gw) {
                let rho = 0.5 * r * (xq + 1.0);
                s += wq * geval(rho) * (rho / r).powi(a);
            }
            out.push(s * r); // jacobian r/2 times the prefactor 2
        }
    } else {
        let pow = (k - 1) as i32;
        let ppts = q.panel_points.max(2);
        let (gx, gw) = gauss_legendre(ppts);
        // Baseline panel width resolving the interpolant's degree.
        let base_w = 4.0 / p_full as f64;
        for &r in radii {
            let efolds_total = pow as f64 * (1.0 / r).ln();
            let n_geo = (efolds_total / q.efolds).ceil().max(1.0) as usize;
            let mut s = ZERO;
            let mut lo = r;
            for sidx in 1..=n_geo {
                let hi = r.powf((n_geo - sidx) as f64 / n_geo as f64);
                let n_sub = (((hi - lo) / base_w).ceil() as usize).max(1);
                for t in 0..n_sub {
                    let a0 = lo + (hi - lo) * t as f64 / n_sub as f64;
                    let b0 = lo + (hi - lo) * (t + 1) as f64 / n_sub as f64;
                    let half = 0.5 * (b0 - a0);
                    let mid = 0.5 * (a0 + b0);
                    for (&xq, &wq) in gx.iter().zip(&gw) {
                        let rho = mid + half * xq;
                        s += wq * half * geval(rho) * (r / rho).powi(pow);
                    }
                }
                lo = hi;
            }
            out.push(-2.0 * s);
        }
    }
    out
}

/// Signed-mode coefficient lookup with zero outside the resolved band.
fn coeff(c: &[Complex64], k: i64) -> Complex64 {
    let n = c.len() as i64;
    if k > n / 2 || k < -(n / 2) + 1 {
        ZERO
    } else {
        c[k.rem_euclid(n) as usize]
    }
}

/// Boundary Cauchy integral `(1/2 pi i) * contour integral of w/(s-z) ds`
/// evaluated off the contour via the analytic projection of the trace.
fn boundary_cauchy(d: &Domain, what: &[Complex64]) -> Vec<Complex64> {
    let n = d.n_theta();
    let zs = d.nodes_complex();
    zs.iter()
        .map(|&z| {
            let mut acc = ZERO;
            let mut zp = Complex64::new(1.0, 0.0);
            for k in 0..=(n / 2) as i64 {
                acc += coeff(what, k) * zp;
                zp *= z;
            }
            acc
        })
        .collect()
}

/// `sum over m >= 1 of what_m z^(m-1)`: the regularized part of the boundary
/// kernel `1/(s (s - z))`.
fn boundary_cauchy_shifted(d: &Domain, what: &[Complex64]) -> Vec<Complex64> {
    let n = d.n_theta();
    let zs = d.nodes_complex();
    zs.iter()
        .map(|&z| {
            let mut acc = ZERO;
            let mut zp = Complex64::new(1.0, 0.0);
            for k in 1..=(n / 2) as i64 {
                acc += coeff(what, k) * zp;
                zp *= z;
            }
            acc
        })
        .collect()
}

/// Integral identity linking an area integral of a Wirtinger derivative to a
/// boundary term; `residual` is the absolute gap between the two sides.
#[derive(Debug, Clone, Copy)]
pub struct GaussReport {
    pub area: Complex64,
    pub boundary: Complex64,
    pub residual: f64,
}

/// Checks `integral of dw/dzbar dA = (1/2i) * contour integral of w dz` (var
/// `Zbar`) or the conjugate identity (var `Z`).
pub fn gauss_residual(d: &Domain, w: &[Complex64], var: DVar) -> GaussReport {
    let n = d.n_theta();
    let deriv = wirtinger(d, w, var, 1);
    let area = d.integrate_complex(&deriv);
    let trace: Vec<Complex64> = w[..n].to_vec();
    let boundary = match var {
        DVar::Zbar => {
            // (1/2i) * integral of w dz with dz = i e^{i t} dt
            let vals: Vec<Complex64> = trace
                .iter()
                .zip(d.angles())
                .map(|(&v, &t)| v * Complex64::new(t.cos(), t.sin()))
                .collect();
            0.5 * d.boundary_integral_c(&vals)
        }
        DVar::Z => {
            let vals: Vec<Complex64> = trace
                .iter()
                .zip(d.angles())
                .map(|(&v, &t)| v * Complex64::new(t.cos(), -t.sin()))
                .collect();
            0.5 * d.boundary_integral_c(&vals)
        }
    };
    GaussReport {
        area,
        boundary,
        residual: (area - boundary).norm(),
    }
}

/// Outcome of a Pompeiu-type reconstruction of `w` from its boundary trace
/// and a Wirtinger derivative.
#[derive(Debug, Clone, Copy)]
pub struct PompeiuReport {
    pub boundary_norm: f64,
    pub area_norm: f64,
    /// Relative L2 error of the reconstruction against `w`, measured off the
    /// boundary ring.
    pub residual: f64,
}

/// Reconstructs `w` from its trace and `d^order w / d var^order`, and reports
/// how well the representation reproduces the field.
pub fn pompeiu_reconstruct(
    d: &Domain,
    w: &[Complex64],
    var: DVar,
    order: u32,
    q: &QuadSpec,
) -> Result<PompeiuReport> {
    if order != 1 && order != 2 {
        return Err(Error::Invalid(format!("pompeiu order {order}, need 1 or 2")));
    }
    let (target, rec) = match var {
        DVar::Zbar => (w.to_vec(), pompeiu_zbar(d, w, order, q)),
        DVar::Z => {
            // Mirror through conjugation: conj(w) satisfies the Zbar identity
            // with data conj(dw/dz).
            let wc: Vec<Complex64> = w.iter().map(|v| v.conj()).collect();
            let rec = pompeiu_zbar(d, &wc, order, q);
            (
                w.to_vec(),
                rec.map(|(b, a)| {
                    (
                        b.iter().map(|v| v.conj()).collect::<Vec<_>>(),
                        a.iter().map(|v| v.conj()).collect::<Vec<_>>(),
                    )
                }),
            )
        }
    };
    let (bpart, apart) = rec?;
    let total: Vec<Complex64> = bpart.iter().zip(&apart).map(|(b, a)| b + a).collect();
    Ok(PompeiuReport {
        boundary_norm: d.norm_l2_c(&bpart),
        area_norm: d.norm_l2_c(&apart),
        residual: rel_l2_interior(d, &total, &target),
    })
}

/// Boundary and area parts of the Zbar-side Pompeiu representation.
fn pompeiu_zbar(
    d: &Domain,
    w: &[Complex64],
    order: u32,
    q: &QuadSpec,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = d.n_theta();
    let what = dft(&w[..n]);
    let cbd = boundary_cauchy(d, &what);
    if order == 1 {
        let dw = dzbar(d, w);
        let area = cauchy_transform(d, &dw, q);
        Ok((cbd, area))
    } else {
        let dw = dzbar(d, w);
        let d2w = dzbar(d, &dw);
        // Extra boundary term (1/2 pi i) * contour integral of
        // dw/dzbar * conj(s - z)/(s - z) ds, reduced with conj(s) = 1/s.
        let hhat = dft(&dw[..n]);
        let s_part = boundary_cauchy_shifted(d, &hhat);
        let c_part = boundary_cauchy(d, &hhat);
        let zs = d.nodes_complex();
        let extra: Vec<Complex64> = (0..d.n_nodes())
            .map(|i| s_part[i] - zs[i].conj() * c_part[i])
            .collect();
        let area = k2_zbar(d, &d2w, q);
        let bpart: Vec<Complex64> = cbd
            .iter()
            .zip(&extra)
            .map(|(c, e)| c - e)
            .collect();
        Ok((bpart, area))
    }
}

/// `zbar Cau[h] - Cau[s h]`: solves `d^2 u / dzbar^2 = h`.
fn k2_zbar(d: &Domain, h: &[Complex64], q: &QuadSpec) -> Vec<Complex64> {
    let zs = d.nodes_complex();
    let c1 = cauchy_transform(d, h, q);
    let hz: Vec<Complex64> = h.iter().zip(&zs).map(|(v, z)| v * z.conj()).collect();
    let c2 = cauchy_transform(d, &hz, q);
    (0..d.n_nodes())
        .map(|i| zs[i].conj() * c1[i] - c2[i])
        .collect()
}

/// Conjugate-kernel companion of `k2_zbar`: solves `d^2 u / dz^2 = h`.
fn k2_z(d: &Domain, h: &[Complex64], q: &QuadSpec) -> Vec<Complex64> {
    let hc: Vec<Complex64> = h.iter().map(|v| v.conj()).collect();
    k2_zbar(d, &hc, q).iter().map(|v| v.conj()).collect()
}

/// Particular solution of `d^order u / d var^order = f` on the disk.
pub fn solve_dbar(
    d: &Domain,
    f: &[Complex64],
    var: DVar,
    order: u32,
    q: &QuadSpec,
) -> Result<Vec<Complex64>> {
    if order != 1 && order != 2 {
        return Err(Error::Invalid(format!(
            "d-bar solver order {order}, need 1 or 2"
        )));
    }
    Ok(match (var, order) {
        (DVar::Zbar, 1) => cauchy_transform(d, f, q),
        (DVar::Zbar, 2) => k2_zbar(d, f, q),
        (DVar::Z, 1) => {
            let fc: Vec<Complex64> = f.iter().map(|v| v.conj()).collect();
            cauchy_transform(d, &fc, q)
                .iter()
                .map(|v| v.conj())
                .collect()
        }
        (DVar::Z, 2) => k2_z(d, f, q),
        _ => unreachable!(),
    })
}

/// Solution of the coupled second-order system together with its residuals.
pub struct BiDbarSolution {
    pub w: Vec<Complex64>,
    /// Relative L2 size of the compatibility defect of the input pair.
    pub compat_residual: f64,
    /// Relative L2 residual of `d^2 w / dz^2 - f`, off the boundary ring.
    pub res_f: f64,
    /// Relative L2 residual of `d^2 w / dzbar^2 - g`, off the boundary ring.
    pub res_g: f64,
}

/// Solves `d^2 w/dz^2 = f`, `d^2 w/dzbar^2 = g` jointly. The data must agree
/// through `d^2 f/dzbar^2 = d^2 g/dz^2`; pairs violating this beyond
/// `compat_tol` (relative L2) are rejected.
pub fn solve_bi_dbar(
    d: &Domain,
    f: &[Complex64],
    g: &[Complex64],
    q: &QuadSpec,
    compat_tol: f64,
) -> Result<BiDbarSolution> {
    let n = d.n_theta();
    assert_eq!(f.len(), d.n_nodes());
    assert_eq!(g.len(), d.n_nodes());

    let dbf = dzbar(d, f);
    let d2bf = dzbar(d, &dbf);
    let d2zg = wirtinger(d, g, DVar::Z, 2);
    let defect: Vec<Complex64> = d2bf.iter().zip(&d2zg).map(|(a, b)| a - b).collect();
    let scale = norm_l2_c_interior(d, &d2bf)
        .max(norm_l2_c_interior(d, &d2zg))
        .max(1.0);
    let compat = norm_l2_c_interior(d, &defect) / scale;
    if compat > compat_tol {
        return Err(Error::Incompatible(format!(
            "d2f/dzbar2 != d2g/dz2: relative defect {compat:.3e} exceeds {compat_tol:.3e}"
        )));
    }

    let t1 = k2_zbar(d, g, q);
    let t2 = k2_z(d, f, q);
    let inner = k2_zbar(d, &d2bf, q);
    let t3 = k2_z(d, &inner, q);

    // Boundary corrections carrying log kernels; each reduces to Fourier
    // mode sums of smooth traces.
    let fb = dft(&f[..n]);
    let dbf_hat = dft(&dbf[..n]);
    let gb = dft(&g[..n]);
    let dzg = dz(d, g);
    let dzg_hat = dft(&dzg[..n]);

    // A1(s) = -cA/s with cA = i * integral of (df/dzbar) over the circle.
    let ca = I * 2.0 * std::f64::consts::PI * dbf_hat[0];
    let mut a1_hat = vec![ZERO; n];
    a1_hat[n - 1] = -ca; // the coefficient of e^{-i t}

    // A2 and A3 are traces of functions holomorphic inside the disk, so the
    // contour integrals mean interior limits: -2 pi i times the analytic
    // projection of the trace (not the principal value).
    let interior_limit = |hat: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![ZERO; n];
        for (m, o) in out.iter_mut().enumerate() {
            if signed_mode(m, n) >= 0 {
                *o = -2.0 * std::f64::consts::PI * I * hat[m];
            }
        }
        out
    };
    let a2_hat = interior_limit(&fb);
    let a3_hat = interior_limit(&dbf_hat);

    let ja1 = log_contour(d, &a1_hat, LogSide::Conj, LogWeight::Linear);
    let ja2 = log_contour(d, &a2_hat, LogSide::Conj, LogWeight::Linear);
    let jb3 = log_contour(d, &a3_hat, LogSide::Conj, LogWeight::Modulus);
    let jg1 = log_contour(d, &dzg_hat, LogSide::Plain, LogWeight::Modulus);
    let jg2 = log_contour(d, &gb, LogSide::Plain, LogWeight::Linear);

    let c_phi1 = Complex64::new(1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI), 0.0);
    let c_phi2 = I / (2.0 * std::f64::consts::PI);
    let w: Vec<Complex64> = (0..d.n_nodes())
        .map(|i| {
            t1[i] + t2[i] - t3[i]
                + c_phi1 * (ja1[i] + ja2[i] + jb3[i])
                + c_phi2 * (jg1[i] + jg2[i])
        })
        .collect();

    let res_f_field: Vec<Complex64> = wirtinger(d, &w, DVar::Z, 2)
        .iter()
        .zip(f)
        .map(|(a, b)| a - b)
        .collect();
    let res_g_field: Vec<Complex64> = wirtinger(d, &w, DVar::Zbar, 2)
        .iter()
        .zip(g)
        .map(|(a, b)| a - b)
        .collect();
    let nf = norm_l2_c_interior(d, f).max(1e-300);
    let ng = norm_l2_c_interior(d, g).max(1e-300);
    Ok(BiDbarSolution {
        res_f: norm_l2_c_interior(d, &res_f_field) / nf.max(1.0),
        res_g: norm_l2_c_interior(d, &res_g_field) / ng.max(1.0),
        w,
        compat_residual: compat,
    })
}

enum LogSide {
    /// `log(z - s)`, integrated against `d conj(s)`.
    Plain,
    /// `log(conj(z - s))`, integrated against `ds`.
    Conj,
}

enum LogWeight {
    /// `(z - s)` for the conj side, `conj(z - s)` for the plain side.
    Linear,
    /// `|z - s|^2`.
    Modulus,
}

/// Contour integrals of a trace against log kernels, expanded in boundary
/// Fourier modes; the angle-linear part of the log is integrated in closed
/// form, the series part truncates at the grid's resolved band.
fn log_contour(d: &Domain, hhat: &[Complex64], side: LogSide, weight: LogWeight) -> Vec<Complex64> {
    let n = d.n_theta();
    let pi = std::f64::consts::PI;
    let kmax = (n / 2) as i64;

    // sawtooth_moment(p) = integral of H(t) (t + pi) e^{i p t} dt
    let saw = |p: i64| -> Complex64 {
        let mut s = 4.0 * pi * pi * coeff(hhat, -p);
        for m in 0..n {
            let qm = signed_mode(m, n);
            if qm + p != 0 {
                s += hhat[m] * Complex64::new(0.0, -2.0 * pi / (qm + p) as f64);
            }
        }
        s
    };

    // G_m(conj z) or Gt_m(z): the angular integral against the log series.
    let series_coeffs = |m: i64, conj_side: bool| -> (Complex64, Vec<Complex64>) {
        let p0 = if conj_side { -I * saw(m) } else { I * saw(-m) };
        let mut cs = Vec::with_capacity(kmax as usize);
        for k in 1..=kmax {
            let c = if conj_side {
                coeff(hhat, -(m + k))
            } else {
                coeff(hhat, m + k)
            };
            cs.push(-2.0 * pi / k as f64 * c);
        }
        (p0, cs)
    };

    let conj_side = matches!(side, LogSide::Conj);
    let (p0, c0) = series_coeffs(0, conj_side);
    let (p1, c1) = series_coeffs(1, conj_side);
    let (p2, c2) = series_coeffs(2, conj_side);

    let zs = d.nodes_complex();
    zs.iter()
        .map(|&z| {
            let v = if conj_side { z.conj() } else { z };
            let mut g0 = p0;
            let mut g1 = p1;
            let mut g2 = p2;
            let mut vp = v;
            for k in 0..kmax as usize {
                g0 += c0[k] * vp;
                g1 += c1[k] * vp;
                g2 += c2[k] * vp;
                vp *= v;
            }
            let r2 = z.norm_sqr();
            match (&side, &weight) {
                (LogSide::Conj, LogWeight::Linear) => I * (z * g1 - g2),
                (LogSide::Conj, LogWeight::Modulus) => {
                    I * ((r2 + 1.0) * g1 - z * g0 - z.conj() * g2)
                }
                (LogSide::Plain, LogWeight::Linear) => I * (g2 - z.conj() * g1),
                (LogSide::Plain, LogWeight::Modulus) => {
                    I * (z * g2 + z.conj() * g0 - (r2 + 1.0) * g1)
                }
            }
        })
        .collect()
}

/// L2 norm over the rings strictly inside the disk.
pub(crate) fn norm_l2_c_interior(d: &Domain, f: &[Complex64]) -> f64 {
    let n = d.n_theta();
    let w = d.quad_weights();
    let mut s = 0.0;
    for i in n..d.n_nodes() {
        s += w[i] * f[i].norm_sqr();
    }
    s.sqrt()
}

/// Relative L2 distance off the boundary ring.
pub(crate) fn rel_l2_interior(d: &Domain, a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nb = norm_l2_c_interior(d, b);
    if nb > 0.0 {
        norm_l2_c_interior(d, &diff) / nb
    } else {
        norm_l2_c_interior(d, &diff)
    }
}
