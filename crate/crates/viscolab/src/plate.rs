//! Fourth-order solver for the stress potential of incompressible
//! variable-viscosity flow, posed as a clamped-plate problem.
//!
//! The field equation is `div div((1/2mu)(H(phi) - (lap phi/2) I)) = 0`
//! with the potential and its normal derivative prescribed on the circle.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg::{self, LuSolver};
use crate::stokes::Viscosity;
use faer::Mat;
use num_complex::Complex64;

/// The trace-free tensor `(1/2mu)(H(phi) - (lap phi/2) I)`, returned as the
/// component fields `(s11, s12)`; `s22 = -s11`.
pub fn deviator(d: &Domain, mu: &Viscosity, phi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pxx = d.diff(phi, 2, 0);
    let pyy = d.diff(phi, 0, 2);
    let pxy = d.diff(phi, 1, 1);
    let m = mu.values();
    let n = d.n_nodes();
    let mut s11 = vec![0.0; n];
    let mut s12 = vec![0.0; n];
    for i in 0..n {
        s11[i] = (pxx[i] - pyy[i]) / (4.0 * m[i]);
        s12[i] = pxy[i] / (2.0 * m[i]);
    }
    (s11, s12)
}

/// Pointwise `div div((1/2mu)(H(phi) - (lap phi/2) I))`, the fourth-order
/// operator applied spectrally; meaningful at interior nodes.
pub fn plate_operator_apply(d: &Domain, mu: &Viscosity, phi: &[f64]) -> Vec<f64> {
    let (s11, s12) = deviator(d, mu, phi);
    let a = d.diff(&s11, 2, 0);
    let b = d.diff(&s11, 0, 2);
    let c = d.diff(&s12, 1, 1);
    (0..d.n_nodes()).map(|i| a[i] - b[i] + 2.0 * c[i]).collect()
}

/// Potential together with the deviator fields it was solved against.
#[derive(Debug, Clone)]
pub struct PlateSolution {
    pub phi: Vec<f64>,
    pub s11: Vec<f64>,
    pub s12: Vec<f64>,
}

/// Assembled and factored clamped-plate operator for one (grid, viscosity)
/// pair, in mixed form: the potential and both deviator components are
/// unknowns coupled through second-order blocks only. Composing the fourth
/// order directly squares the condition number and buries the deviator of
/// the solution under amplified rounding; the mixed system keeps both clean.
///
/// Row layout: potential rows on the boundary ring, normal-derivative rows
/// on the first interior ring, field-equation rows on deeper rings, then one
/// definition row per node and deviator component.
pub struct PlateSystem<'a> {
    domain: &'a Domain,
    lu: LuSolver,
    filt: Mat<f64>,
}

impl<'a> PlateSystem<'a> {
    pub fn new(d: &'a Domain, mu: &Viscosity) -> Result<Self> {
        if d.n_r() < 4 {
            return Err(Error::Invalid(
                "clamped-plate rows need at least four rings".into(),
            ));
        }
        let n = d.n_nodes();
        let nb = d.n_theta();
        let dx = d.dx_mat();
        let dy = d.dy_mat();
        let dxx = dx * dx;
        let dyy = dy * dy;
        let dxy = dx * dy;
        let b = &dxx - &dyy;
        let m = mu.values();

        let mut a = Mat::<f64>::zeros(3 * n, 3 * n);
        let dr = d.dr_boundary_mat();
        for j in 0..nb {
            a[(j, j)] = 1.0;
            for c in 0..n {
                a[(nb + j, c)] = dr[(j, c)];
            }
        }
        for r in 2 * nb..n {
            for c in 0..n {
                a[(r, n + c)] = b[(r, c)];
                a[(r, 2 * n + c)] = 2.0 * dxy[(r, c)];
            }
        }
        for i in 0..n {
            a[(n + i, n + i)] = 4.0 * m[i];
            a[(2 * n + i, 2 * n + i)] = 2.0 * m[i];
            for c in 0..n {
                a[(n + i, c)] = -b[(i, c)];
                a[(2 * n + i, c)] = -dxy[(i, c)];
            }
        }

        // The composed operator has a one-dimensional spurious kernel: a
        // radial profile times the angular Nyquist checkerboard, vanishing
        // together with its normal derivative on the boundary. Dropping the
        // Nyquist mode from the potential removes it; the deviator blocks are
        // diagonal in their own unknowns and need no repair. See the note on
        // `angular_lowpass`.
        let filt = linalg::angular_lowpass(nb, nb / 2 - 1);
        linalg::filter_block_rows(&mut a, &filt, 0, d.n_r());
        linalg::filter_block_cols(&mut a, &filt, 0, d.n_r());
        linalg::add_filter_complement(&mut a, &filt, 0, d.n_r());

        Ok(Self {
            domain: d,
            lu: LuSolver::new(a),
            filt,
        })
    }

    /// Solves for the potential with boundary values `g0` and outward normal
    /// derivative `g1`.
    pub fn solve(&self, g0: &[f64], g1: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve_forced_full(g0, g1, None)?.phi)
    }

    pub fn solve_full(&self, g0: &[f64], g1: &[f64]) -> Result<PlateSolution> {
        self.solve_forced_full(g0, g1, None)
    }

    /// Same with a prescribed field-equation right-hand side (sampled on the
    /// grid; only entries on rings two and deeper are used).
    pub fn solve_forced(&self, g0: &[f64], g1: &[f64], rhs: Option<&[f64]>) -> Result<Vec<f64>> {
        Ok(self.solve_forced_full(g0, g1, rhs)?.phi)
    }

    pub fn solve_forced_full(
        &self,
        g0: &[f64],
        g1: &[f64],
        rhs: Option<&[f64]>,
    ) -> Result<PlateSolution> {
        let d = self.domain;
        let n = d.n_nodes();
        let nb = d.n_theta();
        assert_eq!(g0.len(), nb);
        assert_eq!(g1.len(), nb);
        let mut b = vec![0.0; 3 * n];
        b[..nb].copy_from_slice(g0);
        b[nb..2 * nb].copy_from_slice(g1);
        if let Some(f) = rhs {
            assert_eq!(f.len(), n);
            b[2 * nb..n].copy_from_slice(&f[2 * nb..]);
        }
        linalg::filter_vec(&mut b, &self.filt, 0, d.n_r());
        let x = self.lu.solve_vec(&b);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Solver(
                "plate factorization produced non-finite potential".into(),
            ));
        }
        Ok(PlateSolution {
            phi: x[..n].to_vec(),
            s11: x[n..2 * n].to_vec(),
            s12: x[2 * n..].to_vec(),
        })
    }
}

/// One-shot clamped-plate solve.
pub fn solve_plate(
    d: &Domain,
    mu: &Viscosity,
    g0: &[f64],
    g1: &[f64],
) -> Result<Vec<f64>> {
    PlateSystem::new(d, mu)?.solve(g0, g1)
}

/// Neumann data of a potential: the normal-normal moment and the tangential
/// derivative of the twisting moment, both as boundary traces.
#[derive(Debug, Clone)]
pub struct PlateNeumann {
    pub m_n: Vec<f64>,
    pub m_t_t: Vec<f64>,
}

pub fn plate_neumann(d: &Domain, mu: &Viscosity, phi: &[f64]) -> PlateNeumann {
    let (s11, s12) = deviator(d, mu, phi);
    neumann_from_deviator(d, &s11, &s12)
}

/// Neumann data straight from deviator fields. With a mixed-form solution
/// this costs only one differentiation of solved second-order quantities,
/// instead of third derivatives of the potential.
pub fn neumann_from_deviator(d: &Domain, s11: &[f64], s12: &[f64]) -> PlateNeumann {
    let nb = d.n_theta();
    let (nrm, tan) = d.frame();

    // div of the deviator, using s22 = -s11
    let s11x = d.dx_apply(s11);
    let s11y = d.dy_apply(s11);
    let s12x = d.dx_apply(s12);
    let s12y = d.dy_apply(s12);

    let mut m_n = vec![0.0; nb];
    let mut div_n = vec![0.0; nb];
    let mut t_sn = vec![0.0; nb];
    for j in 0..nb {
        let (n1, n2) = nrm[j];
        let (t1, t2) = tan[j];
        let (a, b) = (s11[j], s12[j]);
        // n.Sn with S = [[a, b], [b, -a]]
        m_n[j] = a * (n1 * n1 - n2 * n2) + 2.0 * b * n1 * n2;
        let d1 = s11x[j] + s12y[j];
        let d2 = s12x[j] - s11y[j];
        div_n[j] = d1 * n1 + d2 * n2;
        let sn1 = a * n1 + b * n2;
        let sn2 = b * n1 - a * n2;
        t_sn[j] = t1 * sn1 + t2 * sn2;
    }
    let t_sn_t = d.trace_deriv(&t_sn);
    let m_t_t = (0..nb).map(|j| div_n[j] + t_sn_t[j]).collect();
    PlateNeumann { m_n, m_t_t }
}

/// Residual of the potential equation in its complex nondivergence form,
/// `dzz dzbarzbar phi + alpha dzz dzbar phi + beta dzz phi + conj terms`,
/// with `alpha = mu dzbar(1/mu)` and `beta = (mu/2) dzbarzbar(1/mu)`.
/// Vanishes at solutions; equals `(mu/4) div div((1/2mu)(H - lap/2 I))`
/// pointwise for any field.
pub fn nondiv_residual(d: &Domain, mu: &Viscosity, phi: &[f64]) -> Vec<Complex64> {
    let (alpha, beta) = crate::first_order::alpha_beta(d, mu);
    let u = crate::first_order::lift_to_u(d, phi);
    let lead = crate::dbar::dzbar(d, &u[0]);
    (0..d.n_nodes())
        .map(|i| {
            lead[i]
                + alpha[i] * u[0][i]
                + beta[i] * u[1][i]
                + alpha[i].conj() * u[2][i]
                + beta[i].conj() * u[3][i]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_potential_solves_for_any_viscosity() {
        // H(r^2) - (lap/2) I = 0, so r^2 + affine solves the field equation
        // no matter the viscosity.
        let d = Domain::new(8, 24).unwrap();
        let mu = Viscosity::from_fn(&d, |x, y| (0.3 * x - 0.4 * y).exp()).unwrap();
        let sys = PlateSystem::new(&d, &mu).unwrap();
        let phie = d.sample(|x, y| x * x + y * y + 0.5 * x - 0.2 * y + 1.0);
        let g0 = d.boundary_trace(&phie);
        let g1: Vec<f64> = (0..d.n_theta())
            .map(|j| 2.0 + 0.5 * d.xs()[j] - 0.2 * d.ys()[j])
            .collect();
        let phi = sys.solve(&g0, &g1).unwrap();
        // fourth-order conditioning costs ~7 digits at this size
        assert!(d.rel_l2(&phi, &phie) < 1e-8, "err {}", d.rel_l2(&phi, &phie));
    }

    #[test]
    fn constant_viscosity_biharmonic_oracle() {
        let d = Domain::new(8, 24).unwrap();
        let mu = Viscosity::constant(&d, 1.0).unwrap();
        let phie = d.sample(|x, y| x.powi(3) * y);
        let g0 = d.boundary_trace(&phie);
        let g1: Vec<f64> = (0..d.n_theta())
            .map(|j| {
                let (x, y) = (d.xs()[j], d.ys()[j]);
                // r d/dr of x^3 y on the unit circle is 4 x^3 y
                4.0 * x.powi(3) * y
            })
            .collect();
        let phi = solve_plate(&d, &mu, &g0, &g1).unwrap();
        assert!(d.rel_l2(&phi, &phie) < 1e-9, "err {}", d.rel_l2(&phi, &phie));
    }

    #[test]
    fn separable_viscosity_manufactured_potential() {
        // With mu = exp(-(x+y)) and phi = 2x^2 the deviator is
        // [[h, 0], [0, -h]] with h = exp(x + y), whose double divergence
        // h_xx - h_yy vanishes identically.
        let d = Domain::new(10, 32).unwrap();
        let mu = Viscosity::from_fn(&d, |x, y| (-(x + y)).exp()).unwrap();
        let phie = d.sample(|x, _| 2.0 * x * x);
        let g0 = d.boundary_trace(&phie);
        let g1: Vec<f64> = (0..d.n_theta())
            .map(|j| 4.0 * d.xs()[j] * d.xs()[j])
            .collect();
        let phi = solve_plate(&d, &mu, &g0, &g1).unwrap();
        assert!(d.rel_l2(&phi, &phie) < 1e-8, "err {}", d.rel_l2(&phi, &phie));
    }

    #[test]
    fn forced_biharmonic_radial_oracle() {
        // lap^2 r^4 = 64, so with mu = 1 the operator value is 16.
        let d = Domain::new(8, 24).unwrap();
        let mu = Viscosity::constant(&d, 1.0).unwrap();
        let sys = PlateSystem::new(&d, &mu).unwrap();
        let rhs = vec![16.0; d.n_nodes()];
        let g0 = vec![1.0; d.n_theta()];
        let g1 = vec![4.0; d.n_theta()];
        let phi = sys.solve_forced(&g0, &g1, Some(&rhs)).unwrap();
        let phie = d.sample(|x, y| (x * x + y * y).powi(2));
        assert!(d.rel_l2(&phi, &phie) < 1e-9, "err {}", d.rel_l2(&phi, &phie));
    }

    #[test]
    fn neumann_trace_oracle() {
        // phi = x^3, mu = 1: the deviator is diag(3x/2, -3x/2), so
        // M_n = (3/2) cos(t) cos(2t) and
        // (M_t)_t = (3/2)cos(t) - 3cos^3(t) + 6 cos(t) sin^2(t).
        let d = Domain::new(10, 32).unwrap();
        let mu = Viscosity::constant(&d, 1.0).unwrap();
        let phi = d.sample(|x, _| x.powi(3));
        let nd = plate_neumann(&d, &mu, &phi);
        for j in 0..d.n_theta() {
            let t = d.angles()[j];
            let mn = 1.5 * t.cos() * (2.0 * t).cos();
            let mtt = 1.5 * t.cos() - 3.0 * t.cos().powi(3) + 6.0 * t.cos() * t.sin().powi(2);
            assert!((nd.m_n[j] - mn).abs() < 1e-9, "m_n at {j}: {} vs {mn}", nd.m_n[j]);
            assert!(
                (nd.m_t_t[j] - mtt).abs() < 1e-8,
                "m_t_t at {j}: {} vs {mtt}",
                nd.m_t_t[j]
            );
        }
    }

    #[test]
    fn nondivergence_form_matches_operator() {
        let d = Domain::new(10, 40).unwrap();
        let mu = Viscosity::from_fn(&d, |x, y| 1.0 + 0.4 * x * x + 0.2 * y).unwrap();
        let phi = d.sample(|x, y| x.exp() * (1.3 * y).cos() + x * x * y * y);
        let lhs = nondiv_residual(&d, &mu, &phi);
        let rhs = plate_operator_apply(&d, &mu, &phi);
        let m = mu.values();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in d.n_theta()..d.n_nodes() {
            // compare away from the boundary ring where the high derivatives
            // of the interpolant are largest
            if d.radii()[i / d.n_theta()] > 0.95 {
                continue;
            }
            let want = Complex64::new(m[i] / 4.0 * rhs[i], 0.0);
            worst = worst.max((lhs[i] - want).norm());
            scale = scale.max(want.norm());
        }
        assert!(worst < 1e-6 * scale.max(1.0), "worst {worst} scale {scale}");
    }

    #[test]
    fn rejects_small_grids() {
        let d = Domain::new(4, 8).unwrap();
        let mu = Viscosity::constant(&d, 1.0).unwrap();
        // four rings is the minimum: boundary, normal-derivative, and at
        // least two field rows
        assert!(PlateSystem::new(&d, &mu).is_ok());
    }
}
