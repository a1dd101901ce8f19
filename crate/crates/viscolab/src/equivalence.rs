//! Bridges between the two descriptions of a slow viscous flow: the velocity,
//! pressure and traction picture on one side, and the scalar potential whose
//! quarter-turn conjugated Hessian is the stress on the other. Interior
//! fields convert by integrating gradients along diameters; boundary data
//! convert by integrating traces along the circle. All reconstructions are
//! anchored at boundary node 0, which pins the affine (for potentials) or
//! rigid (for velocities) gauge freedom.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::plate::{self, PlateNeumann};
use crate::stokes::{stress, FlowState, Viscosity};

/// Boundary Cauchy data of the potential formulation: the Dirichlet pair
/// (potential and normal derivative) and the Neumann pair (normal bending
/// density and arclength derivative of the twisting one).
#[derive(Debug, Clone)]
pub struct PlateCauchyDatum {
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
    pub m_n: Vec<f64>,
    pub m_t_t: Vec<f64>,
}

impl PlateCauchyDatum {
    /// Converts the boundary velocity and traction of a flow state into
    /// potential Cauchy data.
    pub fn from_flow(d: &Domain, mu: &Viscosity, state: &FlowState, tol: f64) -> Result<Self> {
        let (t1, t2) = crate::stokes::traction(d, mu, state);
        let (g0, g1) = traction_to_dirichlet(d, &t1, &t2, tol)?;
        let bu1 = d.boundary_trace(&state.u1);
        let bu2 = d.boundary_trace(&state.u2);
        let neu = velocity_to_neumann(d, &bu1, &bu2);
        Ok(Self {
            g0,
            g1,
            m_n: neu.m_n,
            m_t_t: neu.m_t_t,
        })
    }
}

/// Potential of a momentum-balanced stress field: sigma_11 = phi_yy,
/// sigma_12 = -phi_xy, sigma_22 = phi_xx. Gauge: phi and its gradient vanish
/// at boundary node 0. Fails when the stress is not divergence free, e.g.
/// when it came from an advective flow state.
pub fn airy_from_stress(
    d: &Domain,
    s11: &[f64],
    s12: &[f64],
    s22: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let neg12: Vec<f64> = s12.iter().map(|v| -v).collect();
    // Each row of the stress being divergence free is exactly the curl
    // condition for one component of the potential gradient.
    let px = d.integrate_gradient(s22, &neg12, 0.0, tol)?;
    let py = d.integrate_gradient(&neg12, s11, 0.0, tol)?;
    d.integrate_gradient(&px, &py, 0.0, tol)
}

pub fn airy_from_stokes(d: &Domain, mu: &Viscosity, s: &FlowState, tol: f64) -> Result<Vec<f64>> {
    let (s11, s12, s22) = stress(d, mu, s);
    airy_from_stress(d, &s11, &s12, &s22, tol)
}

/// Strain field encoded by a potential: the quarter-turn conjugate of the
/// scaled stress deviator, so e11 = (phi_yy - phi_xx)/(4 mu),
/// e12 = -phi_xy/(2 mu), e22 = -e11.
pub fn strain_from_potential(
    d: &Domain,
    mu: &Viscosity,
    phi: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (s11, s12) = plate::deviator(d, mu, phi);
    let e11: Vec<f64> = s11.iter().map(|v| -v).collect();
    let e12: Vec<f64> = s12.iter().map(|v| -v).collect();
    let e22 = s11;
    (e11, e12, e22)
}

/// Integrates a trace-free strain field back to a velocity. The rotation is
/// recovered first from the strain derivatives; its curl condition is the
/// fourth-order potential equation itself, so this only succeeds for strains
/// of equilibrium potentials. `u_anchor` and `rot_anchor` prescribe the
/// velocity and rotation at boundary node 0, fixing the rigid part.
pub fn velocity_from_strain(
    d: &Domain,
    e11: &[f64],
    e12: &[f64],
    e22: &[f64],
    u_anchor: (f64, f64),
    rot_anchor: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let wx: Vec<f64> = d
        .dx_apply(e12)
        .iter()
        .zip(d.dy_apply(e11))
        .map(|(a, b)| a - b)
        .collect();
    let wy: Vec<f64> = d
        .dx_apply(e22)
        .iter()
        .zip(d.dy_apply(e12))
        .map(|(a, b)| a - b)
        .collect();
    let w = d.integrate_gradient(&wx, &wy, rot_anchor, tol)?;
    let g12: Vec<f64> = e12.iter().zip(&w).map(|(e, w)| e - w).collect();
    let g21: Vec<f64> = e12.iter().zip(&w).map(|(e, w)| e + w).collect();
    let u1 = d.integrate_gradient(e11, &g12, u_anchor.0, tol)?;
    let u2 = d.integrate_gradient(&g21, e22, u_anchor.1, tol)?;
    Ok((u1, u2))
}

pub fn velocity_from_potential(
    d: &Domain,
    mu: &Viscosity,
    phi: &[f64],
    u_anchor: (f64, f64),
    rot_anchor: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (e11, e12, e22) = strain_from_potential(d, mu, phi);
    velocity_from_strain(d, &e11, &e12, &e22, u_anchor, rot_anchor, tol)
}

/// Dirichlet pair of the potential generated by a boundary traction.
/// The arclength derivative of the potential gradient is the quarter turn of
/// the traction, so three trace integrations produce (g0, g1). A net force
/// or torque in the traction shows up as a circulation error. Gauge matches
/// [`airy_from_stress`]: potential and gradient vanish at node 0.
pub fn traction_to_dirichlet(
    d: &Domain,
    t1: &[f64],
    t2: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nb = d.n_theta();
    assert_eq!(t1.len(), nb);
    assert_eq!(t2.len(), nb);
    let neg_t2: Vec<f64> = t2.iter().map(|v| -v).collect();
    let p1 = d.integrate_trace(&neg_t2, 0, 0.0, tol)?;
    let p2 = d.integrate_trace(t1, 0, 0.0, tol)?;
    let (nrm, tan) = d.frame();
    let g1: Vec<f64> = (0..nb)
        .map(|j| nrm[j].0 * p1[j] + nrm[j].1 * p2[j])
        .collect();
    let phi_t: Vec<f64> = (0..nb)
        .map(|j| tan[j].0 * p1[j] + tan[j].1 * p2[j])
        .collect();
    let g0 = d.integrate_trace(&phi_t, 0, 0.0, tol)?;
    Ok((g0, g1))
}

/// Traction encoded by a Dirichlet pair: rebuild the gradient trace from
/// (g0, g1), differentiate along the circle, and undo the quarter turn.
pub fn dirichlet_to_traction(d: &Domain, g0: &[f64], g1: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let nb = d.n_theta();
    assert_eq!(g0.len(), nb);
    assert_eq!(g1.len(), nb);
    let g0t = d.trace_deriv(g0);
    let (nrm, tan) = d.frame();
    let p1: Vec<f64> = (0..nb)
        .map(|j| g1[j] * nrm[j].0 + g0t[j] * tan[j].0)
        .collect();
    let p2: Vec<f64> = (0..nb)
        .map(|j| g1[j] * nrm[j].1 + g0t[j] * tan[j].1)
        .collect();
    let dp1 = d.trace_deriv(&p1);
    let dp2 = d.trace_deriv(&p2);
    (dp2, dp1.iter().map(|v| -v).collect())
}

/// Neumann pair read off a boundary velocity: differentiate along the circle
/// and split into tangential and normal parts.
pub fn velocity_to_neumann(d: &Domain, bu1: &[f64], bu2: &[f64]) -> PlateNeumann {
    let nb = d.n_theta();
    assert_eq!(bu1.len(), nb);
    assert_eq!(bu2.len(), nb);
    let du1 = d.trace_deriv(bu1);
    let du2 = d.trace_deriv(bu2);
    let (nrm, tan) = d.frame();
    let m_n: Vec<f64> = (0..nb)
        .map(|j| tan[j].0 * du1[j] + tan[j].1 * du2[j])
        .collect();
    let m_t: Vec<f64> = (0..nb)
        .map(|j| -(nrm[j].0 * du1[j] + nrm[j].1 * du2[j]))
        .collect();
    let m_t_t = d.trace_deriv(&m_t);
    PlateNeumann { m_n, m_t_t }
}

/// Boundary velocity encoded by a Neumann pair. The twisting density is only
/// given through its derivative, so `m_t_anchor` prescribes its value at node
/// 0; together with `u_anchor` this fixes the rigid part (a wrong twisting
/// constant tilts the result by a rotation flow). Non-closing data are
/// rejected as multivalued.
pub fn neumann_to_velocity(
    d: &Domain,
    neu: &PlateNeumann,
    m_t_anchor: f64,
    u_anchor: (f64, f64),
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nb = d.n_theta();
    assert_eq!(neu.m_n.len(), nb);
    assert_eq!(neu.m_t_t.len(), nb);
    let m_t = d.integrate_trace(&neu.m_t_t, 0, m_t_anchor, tol)?;
    let (nrm, tan) = d.frame();
    let ut1: Vec<f64> = (0..nb)
        .map(|j| -m_t[j] * nrm[j].0 + neu.m_n[j] * tan[j].0)
        .collect();
    let ut2: Vec<f64> = (0..nb)
        .map(|j| -m_t[j] * nrm[j].1 + neu.m_n[j] * tan[j].1)
        .collect();
    let bu1 = d.integrate_trace(&ut1, 0, u_anchor.0, tol)?;
    let bu2 = d.integrate_trace(&ut2, 0, u_anchor.1, tol)?;
    Ok((bu1, bu2))
}

/// Boundary jets of the potential up to third order, one trace per
/// derivative, all on the boundary ring.
#[derive(Debug, Clone)]
pub struct BoundaryJet {
    pub phi: Vec<f64>,
    pub grad: (Vec<f64>, Vec<f64>),
    pub hess: (Vec<f64>, Vec<f64>, Vec<f64>),
    pub third: (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>),
}

/// Pointwise system for the Hessian trace (phi_11, phi_12, phi_22): two
/// tangential-derivative rows and the normal bending row. Its determinant is
/// identically 1 on the unit circle.
pub fn second_jet_matrix(n: (f64, f64)) -> [[f64; 3]; 3] {
    let (a, b) = n;
    [
        [-b, a, 0.0],
        [0.0, -b, a],
        [a * a - b * b, 4.0 * a * b, b * b - a * a],
    ]
}

/// Pointwise system for the third derivatives (phi_111, phi_112, phi_122,
/// phi_222): three tangential rows and the normal derivative of the
/// Laplacian. Its determinant is identically -1 on the unit circle.
pub fn third_jet_matrix(n: (f64, f64)) -> [[f64; 4]; 4] {
    let (a, b) = n;
    [
        [-b, a, 0.0, 0.0],
        [0.0, -b, a, 0.0],
        [0.0, 0.0, -b, a],
        [a, b, a, b],
    ]
}

fn solve_small<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Result<[f64; N]> {
    for k in 0..N {
        let (piv, mag) = (k..N)
            .map(|r| (r, a[r][k].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag < 1e-13 {
            return Err(Error::Solver(format!(
                "jet system is singular at column {k} (pivot {mag:.3e})"
            )));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for r in k + 1..N {
            let f = a[r][k] / a[k][k];
            for c in k..N {
                a[r][c] -= f * a[k][c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = [0.0; N];
    for k in (0..N).rev() {
        let s: f64 = (k + 1..N).map(|c| a[k][c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

/// Recovers the boundary jets of the potential from its Cauchy data, the
/// viscosity trace and the viscosity gradient trace. Tangential derivatives
/// of already known traces supply most rows; the bending density closes the
/// second order and the twisting derivative, corrected by the tangential
/// shear transport and the viscosity-gradient coupling, closes the third.
pub fn recover_boundary_jets(
    d: &Domain,
    mu_trace: &[f64],
    dmu_trace: (&[f64], &[f64]),
    datum: &PlateCauchyDatum,
) -> Result<BoundaryJet> {
    let nb = d.n_theta();
    assert_eq!(mu_trace.len(), nb);
    assert_eq!(dmu_trace.0.len(), nb);
    assert_eq!(dmu_trace.1.len(), nb);
    assert_eq!(datum.g0.len(), nb);
    let (nrm, tan) = d.frame();

    let g0t = d.trace_deriv(&datum.g0);
    let p1: Vec<f64> = (0..nb)
        .map(|j| datum.g1[j] * nrm[j].0 + g0t[j] * tan[j].0)
        .collect();
    let p2: Vec<f64> = (0..nb)
        .map(|j| datum.g1[j] * nrm[j].1 + g0t[j] * tan[j].1)
        .collect();

    let p1s = d.trace_deriv(&p1);
    let p2s = d.trace_deriv(&p2);
    let mut h11 = vec![0.0; nb];
    let mut h12 = vec![0.0; nb];
    let mut h22 = vec![0.0; nb];
    for j in 0..nb {
        let h = solve_small(
            second_jet_matrix(nrm[j]),
            [p1s[j], p2s[j], 4.0 * mu_trace[j] * datum.m_n[j]],
        )?;
        h11[j] = h[0];
        h12[j] = h[1];
        h22[j] = h[2];
    }

    // Unscaled deviator of the Hessian and the transported shear t.(S/2mu).n.
    let tsn: Vec<f64> = (0..nb)
        .map(|j| {
            let s11 = 0.5 * (h11[j] - h22[j]);
            let s12 = h12[j];
            let (n1, n2) = nrm[j];
            let (t1, t2) = tan[j];
            (t1 * (s11 * n1 + s12 * n2) + t2 * (s12 * n1 - s11 * n2)) / (2.0 * mu_trace[j])
        })
        .collect();
    let tsn_s = d.trace_deriv(&tsn);

    let a_s = d.trace_deriv(&h11);
    let b_s = d.trace_deriv(&h12);
    let c_s = d.trace_deriv(&h22);
    let mut t111 = vec![0.0; nb];
    let mut t112 = vec![0.0; nb];
    let mut t122 = vec![0.0; nb];
    let mut t222 = vec![0.0; nb];
    for j in 0..nb {
        let m = mu_trace[j];
        let s11 = 0.5 * (h11[j] - h22[j]);
        let s12 = h12[j];
        // gradient of 1/(2 mu) from the viscosity gradient trace
        let gh1 = -dmu_trace.0[j] / (2.0 * m * m);
        let gh2 = -dmu_trace.1[j] / (2.0 * m * m);
        let (n1, n2) = nrm[j];
        let n_s_gh = n1 * (s11 * gh1 + s12 * gh2) + n2 * (s12 * gh1 - s11 * gh2);
        let rhs = 4.0 * m * (datum.m_t_t[j] - tsn_s[j] - n_s_gh);
        let t = solve_small(third_jet_matrix(nrm[j]), [a_s[j], b_s[j], c_s[j], rhs])?;
        t111[j] = t[0];
        t112[j] = t[1];
        t122[j] = t[2];
        t222[j] = t[3];
    }

    Ok(BoundaryJet {
        phi: datum.g0.clone(),
        grad: (p1, p2),
        hess: (h11, h12, h22),
        third: (t111, t112, t122, t222),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stokes;

    fn rel_trace(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1.0);
        num / den
    }

    fn det_small<const N: usize>(a: [[f64; N]; N]) -> f64 {
        let mut a = a;
        let mut det = 1.0;
        for k in 0..N {
            let piv = (k..N).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
            if piv != k {
                a.swap(k, piv);
                det = -det;
            }
            det *= a[k][k];
            if a[k][k] == 0.0 {
                return 0.0;
            }
            for r in k + 1..N {
                let f = a[r][k] / a[k][k];
                for c in k..N {
                    a[r][c] -= f * a[k][c];
                }
            }
        }
        det
    }

    /// Cubic stream test flow: u = (x^3, -3 x^2 y) with constant viscosity.
    fn cubic_state(d: &Domain, mu: f64) -> FlowState {
        FlowState {
            u1: d.sample(|x, _| x * x * x),
            u2: d.sample(|x, y| -3.0 * x * x * y),
            p: d.sample(|x, y| 3.0 * mu * (x * x - y * y)),
            multiplier: 0.0,
        }
    }

    #[test]
    fn airy_of_hydrostatic_state() {
        let d = Domain::new(10, 32).unwrap();
        let mu = Viscosity::constant(&d, 1.0).unwrap();
        let state = FlowState {
            u1: vec![0.0; d.n_nodes()],
            u2: vec![0.0; d.n_nodes()],
            p: vec![2.5; d.n_nodes()],
            multiplier: 0.0,
        };
        let phi = airy_from_stokes(&d, &mu, &state, 1e-8).unwrap();
        // gauge: phi and grad phi vanish at z = 1
        let exact = d.sample(|x, y| -2.5 * 0.5 * ((x - 1.0) * (x - 1.0) + y * y));
        assert!(d.rel_l2(&phi, &exact) < 1e-10);
    }

    #[test]
    fn potential_and_velocity_round_trip() {
        let d = Domain::new(12, 40).unwrap();
        let mu = Viscosity::constant(&d, 2.0).unwrap();
        let state = cubic_state(&d, 2.0);
        let phi = airy_from_stokes(&d, &mu, &state, 1e-8).unwrap();

        // the potential satisfies the equilibrium equation
        let resid = plate::plate_operator_apply(&d, &mu, &phi);
        let scale = d.norm_l2(&phi).max(1.0);
        assert!(d.norm_l2(&resid) / scale < 1e-7);

        // strain integration reproduces the velocity (anchors at z = 1)
        let rot = d.sample(|x, y| -3.0 * x * y); // (u2_x - u1_y)/2
        let (u1, u2) = velocity_from_potential(
            &d,
            &mu,
            &phi,
            (state.u1[0], state.u2[0]),
            rot[0],
            1e-7,
        )
        .unwrap();
        assert!(d.rel_l2(&u1, &state.u1) < 1e-8);
        assert!(d.rel_l2(&u2, &state.u2) < 1e-8);
    }

    #[test]
    fn boundary_bridges_match_field_data() {
        let d = Domain::new(12, 40).unwrap();
        let mu = Viscosity::constant(&d, 2.0).unwrap();
        let state = cubic_state(&d, 2.0);
        let phi = airy_from_stokes(&d, &mu, &state, 1e-8).unwrap();
        let (t1, t2) = stokes::traction(&d, &mu, &state);

        let (g0, g1) = traction_to_dirichlet(&d, &t1, &t2, 1e-8).unwrap();
        assert!(rel_trace(&g0, &d.boundary_trace(&phi)) < 1e-9);
        assert!(rel_trace(&g1, &d.normal_derivative_trace(&phi)) < 1e-9);

        let (r1, r2) = dirichlet_to_traction(&d, &g0, &g1);
        assert!(rel_trace(&r1, &t1) < 1e-9);
        assert!(rel_trace(&r2, &t2) < 1e-9);

        let bu1 = d.boundary_trace(&state.u1);
        let bu2 = d.boundary_trace(&state.u2);
        let neu = velocity_to_neumann(&d, &bu1, &bu2);
        let from_phi = plate::plate_neumann(&d, &mu, &phi);
        assert!(rel_trace(&neu.m_n, &from_phi.m_n) < 1e-9);
        assert!(rel_trace(&neu.m_t_t, &from_phi.m_t_t) < 1e-8);

        // invert the Neumann bridge; twisting anchor read off the true data
        let du1 = d.trace_deriv(&bu1);
        let du2 = d.trace_deriv(&bu2);
        let (nrm, _) = d.frame();
        let mt0 = -(nrm[0].0 * du1[0] + nrm[0].1 * du2[0]);
        let (v1, v2) = neumann_to_velocity(&d, &neu, mt0, (bu1[0], bu2[0]), 1e-8).unwrap();
        assert!(rel_trace(&v1, &bu1) < 1e-9);
        assert!(rel_trace(&v2, &bu2) < 1e-9);
    }

    #[test]
    fn advective_stress_has_no_potential() {
        let d = Domain::new(10, 32).unwrap();
        let mu = Viscosity::from_fn(&d, |x, _| 1.0 + 0.3 * x).unwrap();
        // rigid rotation with its advective pressure: stress divergence is
        // the centripetal term, so no potential exists
        let state = FlowState {
            u1: d.sample(|_, y| -y),
            u2: d.sample(|x, _| x),
            p: d.sample(|x, y| 0.5 * (x * x + y * y) - 0.25),
            multiplier: 0.0,
        };
        match airy_from_stokes(&d, &mu, &state, 1e-6) {
            Err(Error::Incompatible(_)) | Err(Error::Multivalued { .. }) => {}
            other => panic!("expected incompatibility, got {other:?}"),
        }
    }

    #[test]
    fn unbalanced_neumann_data_rejected() {
        let d = Domain::new(8, 24).unwrap();
        let nb = d.n_theta();
        let neu = PlateNeumann {
            m_n: d.angles().iter().map(|t| t.cos()).collect(),
            m_t_t: vec![0.0; nb],
        };
        // m_n = cos(theta) pumps a net second velocity component around the circle
        match neumann_to_velocity(&d, &neu, 0.0, (0.0, 0.0), 1e-10) {
            Err(Error::Multivalued { .. }) => {}
            other => panic!("expected multivalued rejection, got {other:?}"),
        }
    }

    #[test]
    fn jet_matrices_are_unimodular_on_the_circle() {
        let d = Domain::new(6, 32).unwrap();
        let (nrm, _) = d.frame();
        for &n in &nrm {
            assert!((det_small(second_jet_matrix(n)) - 1.0).abs() < 1e-12);
            assert!((det_small(third_jet_matrix(n)) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_polynomial_jets() {
        let d = Domain::new(12, 48).unwrap();
        let mu = Viscosity::from_fn(&d, |x, _| 1.0 + 0.2 * x).unwrap();
        let phi = d.sample(|x, y| x * x * x + x * x * y);
        let neu = plate::plate_neumann(&d, &mu, &phi);
        let datum = PlateCauchyDatum {
            g0: d.boundary_trace(&phi),
            g1: d.normal_derivative_trace(&phi),
            m_n: neu.m_n,
            m_t_t: neu.m_t_t,
        };
        let mu_b = d.boundary_trace(mu.values());
        let dmx = d.sample(|_, _| 0.2);
        let dmy = vec![0.0; d.n_nodes()];
        let jets = recover_boundary_jets(
            &d,
            &mu_b,
            (&d.boundary_trace(&dmx), &d.boundary_trace(&dmy)),
            &datum,
        )
        .unwrap();

        let exact = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { d.boundary_trace(&d.sample(f)) };
        assert!(rel_trace(&jets.grad.0, &exact(&|x, y| 3.0 * x * x + 2.0 * x * y)) < 1e-9);
        assert!(rel_trace(&jets.grad.1, &exact(&|x, _| x * x)) < 1e-9);
        assert!(rel_trace(&jets.hess.0, &exact(&|x, y| 6.0 * x + 2.0 * y)) < 1e-8);
        assert!(rel_trace(&jets.hess.1, &exact(&|x, _| 2.0 * x)) < 1e-8);
        assert!(rel_trace(&jets.hess.2, &exact(&|_, _| 0.0)) < 1e-8);
        assert!(rel_trace(&jets.third.0, &exact(&|_, _| 6.0)) < 1e-7);
        assert!(rel_trace(&jets.third.1, &exact(&|_, _| 2.0)) < 1e-7);
        assert!(rel_trace(&jets.third.2, &exact(&|_, _| 0.0)) < 1e-7);
        assert!(rel_trace(&jets.third.3, &exact(&|_, _| 0.0)) < 1e-7);
    }
}
