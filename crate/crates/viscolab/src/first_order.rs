//! First-order reduction of the fourth-order potential equation and the
//! transport identities that force uniqueness of the viscosity.
//!
//! The vector `U = (dzbar dzz phi, dzz phi, dz dzbarzbar phi, dzbarzbar phi)`
//! of a solution potential satisfies `(D + V)U = 0` with
//! `D = diag(dzbar, dzbar, dz, dz)` and a potential matrix `V` built from
//! `alpha = mu dzbar(1/mu)` and `beta = (mu/2) dzbarzbar(1/mu)`.

use crate::dbar::{self, cauchy_transform, dz, dzbar, QuadSpec};
use crate::domain::Domain;
use crate::error::Result;
use crate::stokes::Viscosity;
use num_complex::Complex64;

/// The two anisotropy coefficients of the reduced system.
pub fn alpha_beta(d: &Domain, mu: &Viscosity) -> (Vec<Complex64>, Vec<Complex64>) {
    let inv: Vec<Complex64> = mu
        .values()
        .iter()
        .map(|&v| Complex64::new(1.0 / v, 0.0))
        .collect();
    let d1 = dzbar(d, &inv);
    let d2 = dzbar(d, &d1);
    let m = mu.values();
    let alpha = (0..d.n_nodes()).map(|i| m[i] * d1[i]).collect();
    let beta = (0..d.n_nodes()).map(|i| 0.5 * m[i] * d2[i]).collect();
    (alpha, beta)
}

/// Relative interior defect of the structural identity
/// `2 beta = dzbar alpha + alpha^2`, which any coefficient pair derived from
/// an actual viscosity satisfies.
pub fn ab_identity_residual(d: &Domain, mu: &Viscosity) -> f64 {
    let (alpha, beta) = alpha_beta(d, mu);
    let da = dzbar(d, &alpha);
    let lhs: Vec<Complex64> = beta.iter().map(|b| 2.0 * b).collect();
    let rhs: Vec<Complex64> = (0..d.n_nodes())
        .map(|i| da[i] + alpha[i] * alpha[i])
        .collect();
    let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let scale = dbar::norm_l2_c_interior(d, &lhs).max(dbar::norm_l2_c_interior(d, &alpha));
    dbar::norm_l2_c_interior(d, &diff) / scale.max(1.0)
}

/// Second and third Wirtinger derivatives of a real potential, ordered as
/// the state vector of the reduced system.
pub fn lift_to_u(d: &Domain, phi: &[f64]) -> [Vec<Complex64>; 4] {
    let phic: Vec<Complex64> = phi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let pz = dz(d, &phic);
    let pzz = dz(d, &pz);
    let u1 = dzbar(d, &pzz);
    let pzb = dzbar(d, &phic);
    let pzbb = dzbar(d, &pzb);
    let u3 = dz(d, &pzbb);
    [u1, pzz, u3, pzbb]
}

/// The four residual fields of `(D + V)U` for a candidate state.
pub fn apply_dv(
    d: &Domain,
    mu: &Viscosity,
    u: &[Vec<Complex64>; 4],
) -> [Vec<Complex64>; 4] {
    let (alpha, beta) = alpha_beta(d, mu);
    let n = d.n_nodes();
    let coupling: Vec<Complex64> = (0..n)
        .map(|i| {
            alpha[i] * u[0][i]
                + beta[i] * u[1][i]
                + alpha[i].conj() * u[2][i]
                + beta[i].conj() * u[3][i]
        })
        .collect();
    let d1 = dzbar(d, &u[0]);
    let d2 = dzbar(d, &u[1]);
    let d3 = dz(d, &u[2]);
    let d4 = dz(d, &u[3]);
    let r1 = (0..n).map(|i| d1[i] + coupling[i]).collect();
    let r2 = (0..n).map(|i| d2[i] - u[0][i]).collect();
    let r3 = (0..n).map(|i| d3[i] + coupling[i]).collect();
    let r4 = (0..n).map(|i| d4[i] - u[2][i]).collect();
    [r1, r2, r3, r4]
}

/// Combined relative interior size of the system residual: the root sum of
/// squared component norms over the size of the state itself.
pub fn dv_residual_norm(d: &Domain, mu: &Viscosity, u: &[Vec<Complex64>; 4]) -> f64 {
    let res = apply_dv(d, mu, u);
    let num: f64 = res
        .iter()
        .map(|f| dbar::norm_l2_c_interior(d, f).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = u
        .iter()
        .map(|f| dbar::norm_l2_c_interior(d, f).powi(2))
        .sum::<f64>()
        .sqrt();
    num / den.max(1.0)
}

/// Reassembles a potential from the pure second derivatives of a state by
/// the coupled area-integral solver.
pub fn potential_from_u(
    d: &Domain,
    u: &[Vec<Complex64>; 4],
    q: &QuadSpec,
    compat_tol: f64,
) -> Result<dbar::BiDbarSolution> {
    dbar::solve_bi_dbar(d, &u[1], &u[3], q, compat_tol)
}

/// Recovers the viscosity from the first coefficient by integrating
/// `grad log mu = (-2 Re alpha, -2 Im alpha)`, anchored at the first
/// boundary node.
pub fn mu_from_alpha(
    d: &Domain,
    alpha: &[Complex64],
    mu_at_anchor: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let fx: Vec<f64> = alpha.iter().map(|a| -2.0 * a.re).collect();
    let fy: Vec<f64> = alpha.iter().map(|a| -2.0 * a.im).collect();
    let logmu = d.integrate_gradient(&fx, &fy, mu_at_anchor.ln(), tol)?;
    Ok(logmu.iter().map(|v| v.exp()).collect())
}

/// The gauge factor linking two coefficient pairs with shared Cauchy data,
/// together with the defects of the identities it must satisfy.
pub struct TransportFactor {
    /// Area-integral potential with `dzbar s = (alpha1 - alpha2)/2`.
    pub s: Vec<Complex64>,
    /// `exp(s)`, a nowhere-vanishing solution of the transport equation.
    pub r: Vec<Complex64>,
    /// Relative interior size of `2 dzbar r - (alpha1 - alpha2) r`.
    pub r1_residual: f64,
    /// The obstruction field: what remains of the curvature identity after
    /// eliminating the transport factor. Equals `(alpha1^2 - alpha2^2)/2`
    /// whenever both coefficient pairs obey the structural identity.
    pub discrepancy: Vec<Complex64>,
    /// Relative interior gap between the obstruction computed from the
    /// coefficients directly and `(alpha1^2 - alpha2^2)/2`.
    pub identity_residual: f64,
}

pub fn transport_factor(
    d: &Domain,
    alpha1: &[Complex64],
    beta1: &[Complex64],
    alpha2: &[Complex64],
    beta2: &[Complex64],
    q: &QuadSpec,
) -> TransportFactor {
    let n = d.n_nodes();
    let half_diff: Vec<Complex64> = (0..n).map(|i| 0.5 * (alpha1[i] - alpha2[i])).collect();
    let s = cauchy_transform(d, &half_diff, q);
    let r: Vec<Complex64> = s.iter().map(|v| v.exp()).collect();

    let dr = dzbar(d, &r);
    let r1_field: Vec<Complex64> = (0..n)
        .map(|i| 2.0 * dr[i] - (alpha1[i] - alpha2[i]) * r[i])
        .collect();
    let r1_residual =
        dbar::norm_l2_c_interior(d, &r1_field) / dbar::norm_l2_c_interior(d, &r).max(1e-300);

    // 2 b1 - 2 b2 - a2 (a1 - a2) - dzbar(a1 - a2) - (a1 - a2)^2 / 2
    let diff_a: Vec<Complex64> = (0..n).map(|i| alpha1[i] - alpha2[i]).collect();
    let d_diff = dzbar(d, &diff_a);
    let discrepancy: Vec<Complex64> = (0..n)
        .map(|i| {
            2.0 * beta1[i] - 2.0 * beta2[i] - alpha2[i] * diff_a[i]
                - d_diff[i]
                - 0.5 * diff_a[i] * diff_a[i]
        })
        .collect();
    let expected: Vec<Complex64> = (0..n)
        .map(|i| 0.5 * (alpha1[i] * alpha1[i] - alpha2[i] * alpha2[i]))
        .collect();
    let gap: Vec<Complex64> = discrepancy
        .iter()
        .zip(&expected)
        .map(|(a, b)| a - b)
        .collect();
    let identity_residual = dbar::norm_l2_c_interior(d, &gap)
        / dbar::norm_l2_c_interior(d, &expected).max(1.0);

    TransportFactor {
        s,
        r,
        r1_residual,
        discrepancy,
        identity_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Domain {
        Domain::new(12, 48).unwrap()
    }

    #[test]
    fn coefficients_of_exponential_viscosity_are_constant() {
        // mu = exp(2x): alpha = -dzbar log mu = -1, beta = 1/2
        let d = grid();
        let mu = Viscosity::from_fn(&d, |x, _| (2.0 * x).exp()).unwrap();
        let (alpha, beta) = alpha_beta(&d, &mu);
        for i in d.n_theta()..d.n_nodes() {
            assert!((alpha[i] - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
            assert!((beta[i] - Complex64::new(0.5, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn structural_identity_holds_for_smooth_viscosities() {
        // the bump has poles close enough to the disk that its reciprocal
        // needs the full production resolution to clear 1e-8
        let d = Domain::new(16, 64).unwrap();
        for mu in [
            Viscosity::from_fn(&d, |x, _| (2.0 * x).exp()).unwrap(),
            Viscosity::from_fn(&d, |x, _| 1.0 + x * x).unwrap(),
            Viscosity::from_fn(&d, |x, y| {
                let r2 = x * x + y * y;
                1.0 + 0.3 * (1.0 - r2) * (1.0 - r2)
            })
            .unwrap(),
        ] {
            let res = ab_identity_residual(&d, &mu);
            assert!(res < 1e-8, "identity residual {res}");
        }
    }

    #[test]
    fn cubic_harmonic_state_annihilates_system() {
        // phi = Re z^3 with constant viscosity: U = (0, 3z, 0, 3 zbar)
        let d = grid();
        let mu = Viscosity::constant(&d, 2.0).unwrap();
        let phi = d.sample(|x, y| x.powi(3) - 3.0 * x * y * y);
        let u = lift_to_u(&d, &phi);
        let res = dv_residual_norm(&d, &mu, &u);
        assert!(res < 1e-9, "residual {res}");
    }

    #[test]
    fn manufactured_variable_viscosity_state_annihilates_system() {
        // the clamped-plate pair mu = exp(-(x+y)), phi = 2x^2 solves the
        // potential equation, so its lift solves the first-order system
        let d = grid();
        let mu = Viscosity::from_fn(&d, |x, y| (-(x + y)).exp()).unwrap();
        let phi = d.sample(|x, _| 2.0 * x * x);
        let u = lift_to_u(&d, &phi);
        let res = dv_residual_norm(&d, &mu, &u);
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn viscosity_round_trips_through_alpha() {
        let d = grid();
        let mu = Viscosity::from_fn(&d, |x, y| 1.0 + 0.5 * x * x + 0.3 * y).unwrap();
        let (alpha, _) = alpha_beta(&d, &mu);
        let m0 = mu.values()[0];
        let rec = mu_from_alpha(&d, &alpha, m0, 1e-6).unwrap();
        assert!(d.rel_l2(&rec, mu.values()) < 1e-9);
    }

    #[test]
    fn transport_factor_solves_gauge_equation() {
        // mu1 = exp(2x), mu2 = 1: alpha1 = -1, alpha2 = 0, and the
        // obstruction field is identically 1/2.
        let d = grid();
        let mu1 = Viscosity::from_fn(&d, |x, _| (2.0 * x).exp()).unwrap();
        let mu2 = Viscosity::constant(&d, 1.0).unwrap();
        let (a1, b1) = alpha_beta(&d, &mu1);
        let (a2, b2) = alpha_beta(&d, &mu2);
        let t = transport_factor(&d, &a1, &b1, &a2, &b2, &QuadSpec::default());
        assert!(t.r1_residual < 1e-8, "transport residual {}", t.r1_residual);
        assert!(t.identity_residual < 1e-7, "identity gap {}", t.identity_residual);
        for i in d.n_theta()..d.n_nodes() {
            assert!(
                (t.discrepancy[i] - Complex64::new(0.5, 0.0)).norm() < 1e-6,
                "discrepancy at {i}: {}",
                t.discrepancy[i]
            );
        }
        // r = exp(-zbar/2) up to a multiplicative constant; check it is
        // nowhere vanishing and solves the equation, which the residual did.
        assert!(t.r.iter().all(|v| v.norm() > 1e-3));
    }
}
