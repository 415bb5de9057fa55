//! Two-qubit state reconstruction by Pauli linear inversion.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{hermitian_eigen, DensityMatrix, Matrix4c};
use super::{QuantumError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Pauli matrix in the `(H, V)` basis, with `Z = diag(1, -1)`.
pub fn pauli(p: Pauli) -> Matrix2<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => Matrix2::new(one, o, o, one),
        Pauli::X => Matrix2::new(o, one, one, o),
        Pauli::Y => Matrix2::new(o, -i, i, o),
        Pauli::Z => Matrix2::new(one, o, o, -one),
    }
}

fn pauli_pair(a: Pauli, b: Pauli) -> Matrix4c {
    pauli(a).kronecker(&pauli(b))
}

/// The 16 two-qubit Pauli expectations `<sigma_i (x) sigma_j>`, indexed
/// `[i][j]` in the order `I, X, Y, Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliExpectations(pub [[f64; 4]; 4]);

impl PauliExpectations {
    pub fn get(&self, a: Pauli, b: Pauli) -> f64 {
        self.0[a.index()][b.index()]
    }

    pub fn set(&mut self, a: Pauli, b: Pauli, value: f64) {
        self.0[a.index()][b.index()] = value;
    }

    /// Row-major flattening (`II, IX, IY, IZ, XI, ...`).
    pub fn to_flat(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (k, v) in self.0.iter().flatten().enumerate() {
            out[k] = *v;
        }
        out
    }

    pub fn from_flat(values: &[f64]) -> Option<Self> {
        if values.len() != 16 {
            return None;
        }
        let mut m = [[0.0; 4]; 4];
        for (k, v) in values.iter().enumerate() {
            m[k / 4][k % 4] = *v;
        }
        Some(Self(m))
    }
}

/// Exact expectations `Tr(rho sigma_i (x) sigma_j)`.
pub fn pauli_expectations(rho: &DensityMatrix) -> PauliExpectations {
    let mut out = PauliExpectations([[0.0; 4]; 4]);
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            out.set(a, b, rho.expectation(&pauli_pair(a, b)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub state: DensityMatrix,
    /// Total weight of negative eigenvalues removed from the raw inversion.
    /// Zero when the linear estimate was already positive semidefinite.
    pub clipped_weight: f64,
}

const NORMALIZATION_TOL: f64 = 1e-6;
const RANGE_SLACK: f64 = 1e-6;
// Negative eigenvalues smaller than this are rounding residue, not noise.
const CLIP_TOL: f64 = 1e-12;

/// `rho = (1/4) sum_ij <sigma_i sigma_j> sigma_i (x) sigma_j`, followed by
/// clipping of negative eigenvalues and renormalization when finite-sample
/// noise makes the estimate unphysical.
pub fn tomo_reconstruct(expectations: &PauliExpectations) -> Result<Reconstruction> {
    let norm = expectations.get(Pauli::I, Pauli::I);
    if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(QuantumError::BadNormalization(norm));
    }
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let v = expectations.get(a, b);
            if !v.is_finite() || v.abs() > 1.0 + RANGE_SLACK {
                return Err(QuantumError::ExpectationOutOfRange {
                    label: format!("{}{}", a.label(), b.label()),
                    value: v,
                });
            }
        }
    }

    let mut raw = Matrix4c::zeros();
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            raw += pauli_pair(a, b).scale(expectations.get(a, b) / 4.0);
        }
    }
    let raw = (raw + raw.adjoint()).scale(0.5);
    let raw = raw.unscale(raw.trace().re);

    let eig = hermitian_eigen(&raw);
    let mut clipped_weight = 0.0;
    let elements = if eig.eigenvalues.min() < -CLIP_TOL {
        clipped_weight = eig.eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
        let kept: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        let mut d = Matrix4c::zeros();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            d[(k, k)] = Complex64::new(l.max(0.0) / kept, 0.0);
        }
        let v = &eig.eigenvectors;
        let m = v * d * v.adjoint();
        (m + m.adjoint()).scale(0.5)
    } else {
        raw
    };
    Ok(Reconstruction {
        state: DensityMatrix::new(elements)?,
        clipped_weight,
    })
}
