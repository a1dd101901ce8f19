//! Doubled polar spectral grid on the closed unit disk.
//!
//! Radii are the positive Chebyshev-Lobatto points `r_i = cos(i*pi/(2*n_r-1))`
//! (no node at the origin), angles are uniform. Radial differentiation works
//! on full diameters: each ray is glued to the antipodal ray, so fields need
//! no pole condition and derivatives stay spectrally accurate through the
//! center of the disk.

use crate::error::{Error, Result};
use crate::linalg::{apply, apply_c, LuSolver};
use faer::Mat;
use num_complex::Complex64;

/// Spectral grid on the unit disk together with its differentiation matrices
/// and quadrature weights. Construction is `O(N^2)` in the node count; the
/// first-order derivative matrices are cached, higher orders are composed by
/// the solvers that need them.
pub struct Domain {
    n_r: usize,
    n_theta: usize,
    r: Vec<f64>,
    theta: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
    weights: Vec<f64>,
    dx: Mat<f64>,
    dy: Mat<f64>,
    /// Radial-derivative rows at the boundary ring (n_theta x N).
    dr_boundary: Mat<f64>,
    /// Full Lobatto nodes on [-1, 1] (length 2*n_r), `lobatto[i] = r_i` for
    /// `i < n_r` and `lobatto[2*n_r-1-i] = -r_i`.
    lobatto: Vec<f64>,
    /// Barycentric weights for interpolation on `lobatto`.
    bary_w: Vec<f64>,
}

impl Domain {
    /// Builds the grid. Requires `n_r >= 4` and even `n_theta >= 8`.
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 {
            return Err(Error::Invalid(format!("n_r = {n_r}, need at least 4")));
        }
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::Invalid(format!(
                "n_theta = {n_theta}, need an even count of at least 8"
            )));
        }
        let m = 2 * n_r - 1;
        let p = 2 * n_r;
        let n = n_r * n_theta;

        let lobatto: Vec<f64> = (0..p)
            .map(|k| (k as f64 * std::f64::consts::PI / m as f64).cos())
            .collect();
        let r: Vec<f64> = lobatto[..n_r].to_vec();
        let theta: Vec<f64> = (0..n_theta)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64)
            .collect();

        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n_r {
            for j in 0..n_theta {
                x[i * n_theta + j] = r[i] * theta[j].cos();
                y[i * n_theta + j] = r[i] * theta[j].sin();
            }
        }

        let d_cheb = cheb_diff_matrix(&lobatto);
        let d_four = fourier_diff_matrix(n_theta);

        // Radial derivative on the doubled grid: differentiate along each full
        // diameter, folding columns at negative radii onto the antipodal ray.
        let half = n_theta / 2;
        let mut d_r = Mat::<f64>::zeros(n, n);
        for j in 0..n_theta {
            let ja = (j + half) % n_theta;
            for i in 0..n_r {
                let row = i * n_theta + j;
                for k in 0..p {
                    let v = d_cheb[(i, k)];
                    if k < n_r {
                        d_r[(row, k * n_theta + j)] += v;
                    } else {
                        d_r[(row, (m - k) * n_theta + ja)] += v;
                    }
                }
            }
        }

        let mut dx = Mat::<f64>::zeros(n, n);
        let mut dy = Mat::<f64>::zeros(n, n);
        for i in 0..n_r {
            for j in 0..n_theta {
                let row = i * n_theta + j;
                let (c, s) = (theta[j].cos(), theta[j].sin());
                for col in 0..n {
                    dx[(row, col)] = c * d_r[(row, col)];
                    dy[(row, col)] = s * d_r[(row, col)];
                }
                // Angular part couples only nodes on the same ring.
                for k in 0..n_theta {
                    let col = i * n_theta + k;
                    let v = d_four[(j, k)] / r[i];
                    dx[(row, col)] -= s * v;
                    dy[(row, col)] += c * v;
                }
            }
        }

        let mut dr_boundary = Mat::<f64>::zeros(n_theta, n);
        for j in 0..n_theta {
            for col in 0..n {
                dr_boundary[(j, col)] = d_r[(j, col)];
            }
        }
        drop(d_r);

        let tilde = lobatto_area_weights(&lobatto)?;
        let mut weights = vec![0.0; n];
        for i in 0..n_r {
            let wi = std::f64::consts::PI / n_theta as f64 * (tilde[i] + tilde[m - i]);
            for j in 0..n_theta {
                weights[i * n_theta + j] = wi;
            }
        }

        let mut bary_w = vec![0.0; p];
        for (k, w) in bary_w.iter_mut().enumerate() {
            let mut v = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == p - 1 {
                v *= 0.5;
            }
            *w = v;
        }

        Ok(Self {
            n_r,
            n_theta,
            r,
            theta,
            x,
            y,
            weights,
            dx,
            dy,
            dr_boundary,
            lobatto,
            bary_w,
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Total node count `n_r * n_theta`; ring 0 is the boundary circle.
    pub fn n_nodes(&self) -> usize {
        self.r.len() * self.theta.len()
    }

    /// Flat index of the node on ring `i` at angle index `j`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_r && j < self.n_theta);
        i * self.n_theta + j
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    /// Area quadrature weights (one per node); they sum to pi.
    pub fn quad_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Full Lobatto diameter nodes, exposed for radial interpolation.
    pub(crate) fn lobatto_nodes(&self) -> &[f64] {
        &self.lobatto
    }

    pub(crate) fn bary_weights(&self) -> &[f64] {
        &self.bary_w
    }

    /// Samples a scalar field from Cartesian coordinates.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(&x, &y)| f(x, y)).collect()
    }

    /// Samples a complex field from the complex coordinate `z = x + iy`.
    pub fn sample_complex(&self, f: impl Fn(Complex64) -> Complex64) -> Vec<Complex64> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(&x, &y)| f(Complex64::new(x, y)))
            .collect()
    }

    /// Node positions as complex numbers.
    pub fn nodes_complex(&self) -> Vec<Complex64> {
        self.x
            .iter()
            .zip(&self.y)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect()
    }

    pub fn dx_mat(&self) -> &Mat<f64> {
        &self.dx
    }

    pub fn dy_mat(&self) -> &Mat<f64> {
        &self.dy
    }

    pub fn dx_apply(&self, f: &[f64]) -> Vec<f64> {
        apply(&self.dx, f)
    }

    pub fn dy_apply(&self, f: &[f64]) -> Vec<f64> {
        apply(&self.dy, f)
    }

    pub fn dx_apply_c(&self, f: &[Complex64]) -> Vec<Complex64> {
        apply_c(&self.dx, f)
    }

    pub fn dy_apply_c(&self, f: &[Complex64]) -> Vec<Complex64> {
        apply_c(&self.dy, f)
    }

    /// Mixed partial `d^(kx+ky) f / dx^kx dy^ky` by repeated application.
    pub fn diff(&self, f: &[f64], kx: u32, ky: u32) -> Vec<f64> {
        let mut g = f.to_vec();
        for _ in 0..kx {
            g = self.dx_apply(&g);
        }
        for _ in 0..ky {
            g = self.dy_apply(&g);
        }
        g
    }

    pub fn diff_c(&self, f: &[Complex64], kx: u32, ky: u32) -> Vec<Complex64> {
        let mut g = f.to_vec();
        for _ in 0..kx {
            g = self.dx_apply_c(&g);
        }
        for _ in 0..ky {
            g = self.dy_apply_c(&g);
        }
        g
    }

    /// Area integral over the disk.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n_nodes());
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_complex(&self, f: &[Complex64]) -> Complex64 {
        assert_eq!(f.len(), self.n_nodes());
        f.iter().zip(&self.weights).map(|(v, &w)| v * w).sum()
    }

    /// Area-weighted L2 norm.
    pub fn norm_l2(&self, f: &[f64]) -> f64 {
        self.integrate(&f.iter().map(|v| v * v).collect::<Vec<_>>())
            .sqrt()
    }

    pub fn norm_l2_c(&self, f: &[Complex64]) -> f64 {
        self.integrate(&f.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
            .sqrt()
    }

    /// Relative L2 distance `|a - b| / |b|` (absolute if `|b|` vanishes).
    pub fn rel_l2(&self, a: &[f64], b: &[f64]) -> f64 {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let nb = self.norm_l2(b);
        if nb > 0.0 {
            self.norm_l2(&d) / nb
        } else {
            self.norm_l2(&d)
        }
    }

    pub fn rel_l2_c(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let nb = self.norm_l2_c(b);
        if nb > 0.0 {
            self.norm_l2_c(&d) / nb
        } else {
            self.norm_l2_c(&d)
        }
    }

    /// Restriction of a field to the boundary ring.
    pub fn boundary_trace(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n_nodes());
        f[..self.n_theta].to_vec()
    }

    /// Outward normal and counterclockwise tangent at each boundary node.
    pub fn frame(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let n: Vec<(f64, f64)> = self.theta.iter().map(|t| (t.cos(), t.sin())).collect();
        let t: Vec<(f64, f64)> = self.theta.iter().map(|t| (-t.sin(), t.cos())).collect();
        (n, t)
    }

    /// Boundary line integral with respect to arclength.
    pub fn boundary_integral(&self, trace: &[f64]) -> f64 {
        assert_eq!(trace.len(), self.n_theta);
        trace.iter().sum::<f64>() * 2.0 * std::f64::consts::PI / self.n_theta as f64
    }

    pub fn boundary_integral_c(&self, trace: &[Complex64]) -> Complex64 {
        assert_eq!(trace.len(), self.n_theta);
        trace.iter().sum::<Complex64>() * 2.0 * std::f64::consts::PI / self.n_theta as f64
    }

    /// Arclength derivative of a boundary trace (Fourier differentiation).
    pub fn trace_deriv(&self, trace: &[f64]) -> Vec<f64> {
        assert_eq!(trace.len(), self.n_theta);
        let c: Vec<Complex64> = trace.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.trace_deriv_c(&c).iter().map(|z| z.re).collect()
    }

    pub fn trace_deriv_c(&self, trace: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(trace.len(), self.n_theta);
        let n = self.n_theta;
        let mut c = dft(trace);
        for (m, cm) in c.iter_mut().enumerate() {
            let k = signed_mode(m, n);
            // The Nyquist mode of a real signal is a pure cosine whose
            // derivative vanishes at the nodes.
            let fac = if k.unsigned_abs() as usize * 2 == n {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k as f64)
            };
            *cm *= fac;
        }
        idft(&c)
    }

    /// Antiderivative of a boundary trace with respect to arclength, anchored
    /// so the result takes `anchor_value` at angle index `anchor_j`. Fails if
    /// the mean (the circulation) exceeds `tol` relative to the trace size.
    pub fn integrate_trace(
        &self,
        trace: &[f64],
        anchor_j: usize,
        anchor_value: f64,
        tol: f64,
    ) -> Result<Vec<f64>> {
        assert_eq!(trace.len(), self.n_theta);
        let n = self.n_theta;
        let c: Vec<Complex64> = trace.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut ch = dft(&c);
        let circulation = ch[0].re * 2.0 * std::f64::consts::PI;
        let scale = trace.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        if circulation.abs() > tol * scale.max(1.0) * 2.0 * std::f64::consts::PI {
            return Err(Error::Multivalued {
                circulation,
                tol: tol * scale.max(1.0) * 2.0 * std::f64::consts::PI,
            });
        }
        ch[0] = Complex64::new(0.0, 0.0);
        for m in 1..n {
            let k = signed_mode(m, n);
            if k.unsigned_abs() as usize * 2 == n {
                // Nyquist cosine integrates to a sine vanishing at the nodes.
                ch[m] = Complex64::new(0.0, 0.0);
            } else {
                ch[m] /= Complex64::new(0.0, k as f64);
            }
        }
        let vals = idft(&ch);
        let mut out: Vec<f64> = vals.iter().map(|z| z.re).collect();
        let shift = anchor_value - out[anchor_j];
        for v in &mut out {
            *v += shift;
        }
        Ok(out)
    }

    /// Reconstructs `F` from its gradient `(fx, fy)` by integrating along the
    /// boundary and then along full diameters, anchored at boundary node 0.
    ///
    /// Preconditions checked: the curl of `(fx, fy)` is small relative to the
    /// gradient size, and the tangential boundary circulation vanishes.
    pub fn integrate_gradient(
        &self,
        fx: &[f64],
        fy: &[f64],
        anchor_value: f64,
        tol: f64,
    ) -> Result<Vec<f64>> {
        let n = self.n_nodes();
        assert_eq!(fx.len(), n);
        assert_eq!(fy.len(), n);

        // Circulation first: it is the cheaper check and catches multivalued
        // potentials (gradients of angle-like functions) informatively even
        // when an interior singularity also pollutes the discrete curl.
        let nt = self.n_theta;
        let f_s: Vec<f64> = (0..nt)
            .map(|j| -self.theta[j].sin() * fx[j] + self.theta[j].cos() * fy[j])
            .collect();
        let f_bd = self.integrate_trace(&f_s, 0, anchor_value, tol)?;

        let curl: Vec<f64> = self
            .dx_apply(fy)
            .iter()
            .zip(self.dy_apply(fx))
            .map(|(a, b)| a - b)
            .collect();
        let size = self.norm_l2(fx).max(self.norm_l2(fy)).max(1e-300);
        let rel_curl = self.norm_l2(&curl) / size.max(1.0);
        if rel_curl > tol {
            return Err(Error::Incompatible(format!(
                "field is not a gradient: relative curl {rel_curl:.3e} exceeds {tol:.3e}"
            )));
        }

        let p = 2 * self.n_r;
        let m = p - 1;
        let half = nt / 2;
        let mut out = vec![0.0; n];
        for j in 0..half {
            let ja = j + half;
            let (c, s) = (self.theta[j].cos(), self.theta[j].sin());
            let mut gp = vec![0.0; p];
            for k in 0..self.n_r {
                let id = self.idx(k, j);
                gp[k] = c * fx[id] + s * fy[id];
            }
            for k in self.n_r..p {
                let id = self.idx(m - k, ja);
                gp[k] = c * fx[id] + s * fy[id];
            }
            let a = cheb_coeffs(&gp);
            let b = cheb_antiderivative(&a);
            let g: Vec<f64> = self.lobatto.iter().map(|&xk| cheb_eval(&b, xk)).collect();
            for i in 0..self.n_r {
                out[self.idx(i, j)] = f_bd[j] + g[i] - g[0];
                out[self.idx(i, ja)] = f_bd[ja] + g[m - i] - g[m];
            }
        }
        Ok(out)
    }

    /// Outward normal derivative of a field, evaluated on the boundary ring.
    pub fn normal_derivative_trace(&self, f: &[f64]) -> Vec<f64> {
        apply(&self.dr_boundary, f)
    }

    /// Rows of the radial-derivative operator restricted to the boundary
    /// ring, for use as Neumann rows in bordered systems.
    pub fn dr_boundary_mat(&self) -> &Mat<f64> {
        &self.dr_boundary
    }
}

/// Chebyshev-Lobatto differentiation matrix on the given nodes
/// (`x_k = cos(k*pi/M)`, `k = 0..=M`), diagonal by the negative-sum trick.
fn cheb_diff_matrix(x: &[f64]) -> Mat<f64> {
    let p = x.len();
    let m = p - 1;
    let c = |k: usize| if k == 0 || k == m { 2.0 } else { 1.0 };
    let mut d = Mat::<f64>::zeros(p, p);
    for i in 0..p {
        let mut diag = 0.0;
        for j in 0..p {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Fourier differentiation matrix for an even number of equispaced points.
fn fourier_diff_matrix(n: usize) -> Mat<f64> {
    let mut d = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let m = (i + n - j) % n;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = 0.5 * sign / (m as f64 * std::f64::consts::PI / n as f64).tan();
            }
        }
    }
    d
}

/// Interpolatory quadrature weights on the full Lobatto grid against the
/// weight `|x|` on [-1, 1]: solve the Chebyshev moment system, which is a
/// well-conditioned DCT-like matrix.
fn lobatto_area_weights(x: &[f64]) -> Result<Vec<f64>> {
    let p = x.len();
    let m = p - 1;
    let mut a = Mat::<f64>::zeros(p, p);
    for row in 0..p {
        for k in 0..p {
            a[(row, k)] = (row as f64 * k as f64 * std::f64::consts::PI / m as f64).cos();
        }
    }
    // Moments of T_m against |x|: odd modes vanish, even by Gauss-Legendre.
    let (gx, gw) = gauss_legendre(p / 2 + 2);
    let mut mom = vec![0.0; p];
    for (row, mo) in mom.iter_mut().enumerate() {
        if row % 2 == 0 {
            let mut s = 0.0;
            for (&xi, &wi) in gx.iter().zip(&gw) {
                let t = 0.5 * (xi + 1.0); // map to [0, 1]
                s += wi * 0.5 * (row as f64 * t.acos()).cos() * t;
            }
            *mo = 2.0 * s;
        }
    }
    let solver = LuSolver::new(a);
    Ok(solver.solve_vec(&mom))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

/// Signed Fourier mode for storage index `m` (0, 1, ..., n/2, -n/2+1, ..., -1).
pub(crate) fn signed_mode(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Forward DFT with coefficients normalized by 1/n.
pub(crate) fn dft(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, &v) in f.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (m * j % n) as f64 / n as f64;
            s += v * Complex64::new(ang.cos(), ang.sin());
        }
        *o = s / n as f64;
    }
    out
}

pub(crate) fn idft(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, &v) in c.iter().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * (m * j % n) as f64 / n as f64;
            s += v * Complex64::new(ang.cos(), ang.sin());
        }
        *o = s;
    }
    out
}

/// Chebyshev coefficients of the Lobatto interpolant (direct DCT, O(P^2)).
pub(crate) fn cheb_coeffs(values: &[f64]) -> Vec<f64> {
    let p = values.len();
    let m = p - 1;
    let mut a = vec![0.0; p];
    for (mm, am) in a.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, &v) in values.iter().enumerate() {
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            s += w * v * (mm as f64 * k as f64 * std::f64::consts::PI / m as f64).cos();
        }
        let gamma = if mm == 0 || mm == m {
            m as f64
        } else {
            m as f64 / 2.0
        };
        *am = s / gamma;
    }
    a
}

/// Coefficients of the antiderivative (constant term zero).
pub(crate) fn cheb_antiderivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let get = |k: usize| if k < n { a[k] } else { 0.0 };
    let mut b = vec![0.0; n + 1];
    for m in 1..=n {
        let cm1 = if m == 1 { 2.0 } else { 1.0 };
        b[m] = (cm1 * get(m - 1) - get(m + 1)) / (2.0 * m as f64);
    }
    b
}

/// Clenshaw evaluation of a Chebyshev series at `x`.
pub(crate) fn cheb_eval(a: &[f64], x: f64) -> f64 {
    let mut d = 0.0;
    let mut dd = 0.0;
    let y = 2.0 * x;
    for &ak in a.iter().skip(1).rev() {
        let tmp = d;
        d = y * d - dd + ak;
        dd = tmp;
    }
    x * d - dd + a[0]
}

/// Barycentric interpolation from values on `nodes` (with weights `w`).
pub(crate) fn bary_eval(nodes: &[f64], w: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xk, &wk), &fk) in nodes.iter().zip(w).zip(values) {
        let dxk = x - xk;
        if dxk.abs() < 1e-14 {
            return fk;
        }
        let c = wk / dxk;
        num += c * fk;
        den += c;
    }
    num / den
}
