use num_complex::Complex64;

use super::state::{hermitian_eigen, DensityMatrix, Matrix4c};

// Eigenvalues below this are rounding residue of rank-deficient states.
const EIGEN_FLOOR: f64 = 1e-13;

fn psd_sqrt(rho: &DensityMatrix) -> Matrix4c {
    let eig = hermitian_eigen(rho.elements());
    let v = &eig.eigenvectors;
    let mut d = Matrix4c::zeros();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = if lambda > EIGEN_FLOOR { lambda.sqrt() } else { 0.0 };
        d[(k, k)] = Complex64::new(root, 0.0);
    }
    v * d * v.adjoint()
}

/// Uhlmann fidelity `F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
///
/// The trace of the inner square root equals the trace norm of
/// `sqrt(rho) sqrt(sigma)`, which is evaluated from singular values. This
/// avoids taking square roots of near-zero eigenvalues of the product and
/// keeps the result symmetric in its arguments.
pub fn fidelity(rho: &DensityMatrix, target: &DensityMatrix) -> f64 {
    let product = psd_sqrt(rho) * psd_sqrt(target);
    let trace_norm: f64 = product.singular_values().iter().sum();
    (trace_norm * trace_norm).clamp(0.0, 1.0)
}
