//! Small dense complex linear-algebra helpers shared by the engines.

use nalgebra::DMatrix;

use crate::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

/// Matrix exponential by scaling and squaring with a Padé [6/6] approximant.
///
/// The matrices exponentiated here are generators of displacements, beam
/// splitters and phase rotations on truncated Fock spaces, so norms are
/// moderate; the [6/6] approximant with 1-norm based scaling is accurate to
/// machine precision for them.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    // Scale so the Padé argument has norm below 0.5.
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a.map(|x| x / C64::from(2f64.powi(s)));

    // Padé [6/6]: numerator and denominator share even/odd power structure.
    const B: [f64; 7] =
        [1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0];
    let id = CMat::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_even = &id * C64::from(B[0]) + &a2 * C64::from(B[2]) + &a4 * C64::from(B[4]) + &a6 * C64::from(B[6]);
    let u_odd = &scaled * (&id * C64::from(B[1]) + &a2 * C64::from(B[3]) + &a4 * C64::from(B[5]));
    let p = &u_even + &u_odd;
    let q = &u_even - &u_odd;

    let mut f = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is singular; matrix norm out of range for expm");
    for _ in 0..s {
        f = &f * &f;
    }
    f
}

/// Induced 1-norm (max absolute column sum).
pub fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_deviation(a: &CMat) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrised first so that tiny numerical anti-Hermitian
/// parts do not leak into the result.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    let h = (a + a.adjoint()).map(|x| x / C64::from(2.0));
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigenvalues(a)[0]
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn invsqrtm_hermitian(a: &CMat) -> CMat {
    let h = (a + a.adjoint()).map(|x| x / C64::from(2.0));
    let eig = nalgebra::SymmetricEigen::new(h);
    let n = a.nrows();
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        let ev = eig.eigenvalues[i];
        assert!(ev > 0.0, "invsqrtm requires a positive-definite matrix (eigenvalue {ev})");
        d[(i, i)] = C64::from(1.0 / ev.sqrt());
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
