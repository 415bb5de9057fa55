use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{QuantumError, Result};

pub type Matrix4c = Matrix4<Complex64>;

/// Index of `|HH>` in the two-photon basis.
pub const HH: usize = 0;
/// Index of `|HV>` in the two-photon basis.
pub const HV: usize = 1;
/// Index of `|VH>` in the two-photon basis.
pub const VH: usize = 2;
/// Index of `|VV>` in the two-photon basis.
pub const VV: usize = 3;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Two-photon polarization state in the ordered basis `(HH, HV, VH, VV)`.
///
/// Construction validates that the matrix is Hermitian, has unit trace and
/// is positive semidefinite, so every value of this type is a physical state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct DensityMatrix {
    elements: Matrix4c,
}

impl DensityMatrix {
    pub fn new(elements: Matrix4c) -> Result<Self> {
        if elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuantumError::NonFinite);
        }
        let mut asym = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                asym = asym.max((elements[(i, j)] - elements[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL {
            return Err(QuantumError::NotHermitian(asym));
        }
        let tr = elements.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(QuantumError::BadTrace(tr.re));
        }
        let min_eig = hermitian_eigen(&elements).eigenvalues.min();
        if min_eig < -PSD_TOL {
            return Err(QuantumError::NotPositive(min_eig));
        }
        Ok(Self { elements })
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() {
            return Err(QuantumError::NonFinite);
        }
        if norm == 0.0 {
            return Err(QuantumError::ZeroNorm);
        }
        let v = v.unscale(norm);
        Self::new(v * v.adjoint())
    }

    /// Convex combination `sum_k w_k rho_k`; weights are normalized to sum to one.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if !(total > 0.0) || components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(QuantumError::BadTrace(total));
        }
        let mut m = Matrix4c::zeros();
        for (w, rho) in components {
            m += rho.elements.scale(*w / total);
        }
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            elements: Matrix4c::identity().scale(0.25),
        }
    }

    /// `|Phi+><Phi+|` with `|Phi+> = (|HH> + |VV>)/sqrt(2)`.
    pub fn phi_plus() -> Self {
        bell_phi_plus(0.0).expect("zero phase is finite")
    }

    pub fn elements(&self) -> &Matrix4c {
        &self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = hermitian_eigen(&self.elements).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn purity(&self) -> f64 {
        (self.elements * self.elements).trace().re
    }

    /// Expectation value `Tr(rho O)` of a Hermitian observable (real part).
    pub fn expectation(&self, observable: &Matrix4c) -> f64 {
        (self.elements * observable).trace().re
    }
}

/// `(|HH> + e^{i phase}|VV>)/sqrt(2)` as a density matrix.
pub fn bell_phi_plus(phase_deg: f64) -> Result<DensityMatrix> {
    if !phase_deg.is_finite() {
        return Err(QuantumError::BadAngle(phase_deg));
    }
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    amps[HH] = Complex64::new(1.0, 0.0);
    amps[VV] = Complex64::from_polar(1.0, phase_deg.to_radians());
    // 1/2 factored out of the outer product so phase 0 gives exact 0.5 entries.
    let m = Matrix4c::from_fn(|i, j| amps[i] * amps[j].conj() * 0.5);
    DensityMatrix::new(m)
}

/// Werner state `V |Phi+><Phi+| + (1 - V) I/4`.
pub fn werner(visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(QuantumError::VisibilityOutOfRange(visibility));
    }
    let m = DensityMatrix::phi_plus().elements.scale(visibility)
        + Matrix4c::identity().scale((1.0 - visibility) / 4.0);
    DensityMatrix::new(m)
}

pub(crate) fn hermitian_eigen(m: &Matrix4c) -> SymmetricEigen<Complex64, nalgebra::U4> {
    // Symmetrize so the solver only ever sees an exactly Hermitian input.
    let h = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(h)
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    basis: [String; 4],
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
}

impl From<DensityMatrix> for MatrixRepr {
    fn from(rho: DensityMatrix) -> Self {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                re[i][j] = rho.elements[(i, j)].re;
                im[i][j] = rho.elements[(i, j)].im;
            }
        }
        MatrixRepr {
            basis: ["HH", "HV", "VH", "VV"].map(String::from),
            re,
            im,
        }
    }
}

impl TryFrom<MatrixRepr> for DensityMatrix {
    type Error = QuantumError;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let m = Matrix4c::from_fn(|i, j| Complex64::new(repr.re[i][j], repr.im[i][j]));
        DensityMatrix::new(m)
    }
}
