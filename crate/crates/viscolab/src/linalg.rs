//! Thin wrappers over faer for the dense solves used by the solvers.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{ColRef, Mat};
use num_complex::Complex64;

/// Dense matrix-vector product returning a plain `Vec`.
pub(crate) fn apply(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), v.len());
    (m * ColRef::from_slice(v)).iter().copied().collect()
}

/// Real matrix applied to a complex vector (componentwise on re/im).
pub(crate) fn apply_c(m: &Mat<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let mre = apply(m, &re);
    let mim = apply(m, &im);
    mre.into_iter()
        .zip(mim)
        .map(|(a, b)| Complex64::new(a, b))
        .collect()
}

/// LU factorization kept around so one assembled system can serve many
/// right-hand sides (boundary data sweeps, Picard iterations).
pub(crate) struct LuSolver {
    lu: PartialPivLu<f64>,
    n: usize,
}

impl LuSolver {
    pub fn new(a: Mat<f64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        Self {
            lu: a.partial_piv_lu(),
            n,
        }
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let x = self.lu.solve(ColRef::from_slice(b));
        x.iter().copied().collect()
    }
}

/// Circulant projector keeping angular Fourier modes `|k| <= kmax` on one
/// ring of `nb` nodes. Collocated systems on the doubled polar grid need
/// their top angular modes filtered: the even-length Fourier differentiation
/// matrix annihilates the Nyquist checkerboard and treats the adjacent modes
/// through their aliases, which produces spurious null vectors.
pub(crate) fn angular_lowpass(nb: usize, kmax: usize) -> Mat<f64> {
    let tau = 2.0 * std::f64::consts::PI / nb as f64;
    Mat::from_fn(nb, nb, |j, jp| {
        let mut s = 1.0;
        for k in 1..=kmax {
            let w = if k == nb / 2 { 1.0 } else { 2.0 };
            s += w * ((k as f64) * tau * (j as f64 - jp as f64)).cos();
        }
        s / nb as f64
    })
}

/// Applies `f` to each ring-sized row block of `a` starting at `start`.
pub(crate) fn filter_block_rows(a: &mut Mat<f64>, f: &Mat<f64>, start: usize, rings: usize) {
    let nb = f.nrows();
    let size = a.ncols();
    for ring in 0..rings {
        let row = start + ring * nb;
        let sub = a.submatrix(row, 0, nb, size).to_owned();
        let fs = f * &sub;
        a.submatrix_mut(row, 0, nb, size).copy_from(&fs);
    }
}

/// Applies `f` to each ring-sized column block of `a` starting at `start`.
pub(crate) fn filter_block_cols(a: &mut Mat<f64>, f: &Mat<f64>, start: usize, rings: usize) {
    let nb = f.nrows();
    let size = a.nrows();
    for ring in 0..rings {
        let col = start + ring * nb;
        let sub = a.submatrix(0, col, size, nb).to_owned();
        let fs = &sub * f;
        a.submatrix_mut(0, col, size, nb).copy_from(&fs);
    }
}

/// Adds `I - f` on each diagonal ring block, pinning the filtered content
/// of the projected system to zero.
pub(crate) fn add_filter_complement(a: &mut Mat<f64>, f: &Mat<f64>, start: usize, rings: usize) {
    let nb = f.nrows();
    for ring in 0..rings {
        let at = start + ring * nb;
        for j in 0..nb {
            for jp in 0..nb {
                let id = if j == jp { 1.0 } else { 0.0 };
                a[(at + j, at + jp)] += id - f[(j, jp)];
            }
        }
    }
}

/// Applies `f` to each ring-sized slice of a vector, in place.
pub(crate) fn filter_vec(v: &mut [f64], f: &Mat<f64>, start: usize, rings: usize) {
    let nb = f.nrows();
    for ring in 0..rings {
        let at = start + ring * nb;
        let seg = apply(f, &v[at..at + nb]);
        v[at..at + nb].copy_from_slice(&seg);
    }
}
