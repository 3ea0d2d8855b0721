//! Dense complex-operator algebra for Bell operators and quantum
//! expectations at desk scale.
//!
//! Site 1 is the leftmost tensor factor throughout. Observables enter as
//! already-integrated bounded Hermitian matrices with operator norm at most
//! one; spectra are unrestricted (dichotomic is not assumed).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Total tensor-product dimension ceiling.
pub const MATRIX_DIM_CAP: usize = 1 << 12;
/// Entrywise Hermiticity tolerance.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Slack on the norm-at-most-one check.
pub const NORM_TOL: f64 = 1e-9;
/// Largest imaginary part an expectation value may carry.
pub const IMAG_TOL: f64 = 1e-10;
/// State eigenvalues may undershoot zero by this much.
pub const STATE_EIG_TOL: f64 = 1e-10;

type CMatrix = DMatrix<Complex64>;

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
}

impl Operator {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "operators must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() > MATRIX_DIM_CAP {
            return Err(Error::MatrixCapExceeded {
                dim: mat.nrows(),
                cap: MATRIX_DIM_CAP,
            });
        }
        Ok(Operator { mat })
    }

    /// Builds from real and imaginary parts, row by row.
    pub fn from_re_im(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n
            || re.iter().any(|row| row.len() != n)
            || im.iter().any(|row| row.len() != n)
        {
            return Err(Error::DimensionMismatch(
                "re and im must be square matrices of the same size".into(),
            ));
        }
        let mat = CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j]));
        Operator::from_matrix(mat)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Operator::from_matrix(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - &adj)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(())
    }

    /// Operator norm of a Hermitian matrix: the largest absolute
    /// eigenvalue. The matrix is symmetrized first, so call
    /// `require_hermitian` to surface genuinely non-Hermitian input.
    pub fn operator_norm(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    pub fn pauli_x() -> Operator {
        Operator::from_re_im(
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
            &[vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap()
    }

    pub fn pauli_y() -> Operator {
        Operator::from_re_im(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            &[vec![0.0, -1.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    pub fn pauli_z() -> Operator {
        Operator::from_re_im(
            &[vec![1.0, 0.0], vec![0.0, -1.0]],
            &[vec![0.0; 2], vec![0.0; 2]],
        )
        .unwrap()
    }
}

/// Kronecker product; site order is left to right.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let dim = a.dim().saturating_mul(b.dim());
    if dim > MATRIX_DIM_CAP {
        return Err(Error::MatrixCapExceeded {
            dim,
            cap: MATRIX_DIM_CAP,
        });
    }
    Operator::from_matrix(a.mat.kronecker(&b.mat))
}

/// Density operator: Hermitian, unit trace, positive semidefinite within
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    mat: CMatrix,
}

impl State {
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let op = Operator::from_matrix(mat)?;
        op.require_hermitian()
            .map_err(|e| Error::InvalidState(e.to_string()))?;
        let trace = op.mat.trace();
        if (trace.re - 1.0).abs() > HERMITICITY_TOL || trace.im.abs() > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let min_eig = op
            .hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or_default();
        if min_eig < -STATE_EIG_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min_eig:.3e} is negative beyond tolerance"
            )));
        }
        Ok(State { mat: op.mat })
    }

    pub fn from_re_im(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        State::from_matrix(Operator::from_re_im(re, im)?.mat)
    }

    /// Normalized projector onto the given amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        let dim = amplitudes.len();
        let mat = CMatrix::from_fn(dim, dim, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / norm_sq
        });
        State::from_matrix(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        State::from_matrix(CMatrix::identity(dim, dim) * scale)
    }

    /// Product state, site order left to right.
    pub fn tensor(&self, other: &State) -> Result<Self> {
        let dim = self.dim().saturating_mul(other.dim());
        if dim > MATRIX_DIM_CAP {
            return Err(Error::MatrixCapExceeded {
                dim,
                cap: MATRIX_DIM_CAP,
            });
        }
        State::from_matrix(self.mat.kronecker(&other.mat))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }
}

/// The recursively assembled Bell operator together with its
/// all-settings-swapped companion.
#[derive(Debug, Clone)]
pub struct BellOperator {
    parties: usize,
    site_dims: Vec<usize>,
    matrix: Operator,
    swapped: Operator,
}

impl BellOperator {
    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// The companion built with the two observables of every site
    /// interchanged.
    pub fn swapped(&self) -> &Operator {
        &self.swapped
    }
}

/// Assembles the Bell operator from one observable pair per site by the
/// recursion B_n = B_{n-1} (x) (X_n1 + X_n2) + ~B_{n-1} (x) (X_n1 - X_n2)
/// with B_1 = X_11, ~B_1 = X_12. Inputs must be Hermitian with operator
/// norm at most one.
pub fn bell_operator(observables: &[(Operator, Operator)]) -> Result<BellOperator> {
    if observables.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one site is required".into(),
        ));
    }
    let mut site_dims = Vec::with_capacity(observables.len());
    let mut total_dim: usize = 1;
    for (site, (x1, x2)) in observables.iter().enumerate() {
        if x1.dim() != x2.dim() {
            return Err(Error::DimensionMismatch(format!(
                "site {}: the two observables have dims {} and {}",
                site + 1,
                x1.dim(),
                x2.dim()
            )));
        }
        for x in [x1, x2] {
            x.require_hermitian()?;
            let norm = x.operator_norm();
            if norm > 1.0 + NORM_TOL {
                return Err(Error::OperatorNormExceeded { norm });
            }
        }
        total_dim = total_dim.saturating_mul(x1.dim());
        if total_dim > MATRIX_DIM_CAP {
            return Err(Error::MatrixCapExceeded {
                dim: total_dim,
                cap: MATRIX_DIM_CAP,
            });
        }
        site_dims.push(x1.dim());
    }
    let mut b = observables[0].0.mat.clone();
    let mut b_swap = observables[0].1.mat.clone();
    for (x1, x2) in &observables[1..] {
        let sum = &x1.mat + &x2.mat;
        let diff = &x1.mat - &x2.mat;
        let next = b.kronecker(&sum) + b_swap.kronecker(&diff);
        let next_swap = b_swap.kronecker(&sum) - b.kronecker(&diff);
        b = next;
        b_swap = next_swap;
    }
    Ok(BellOperator {
        parties: observables.len(),
        site_dims,
        matrix: Operator::from_matrix(b)?,
        swapped: Operator::from_matrix(b_swap)?,
    })
}

/// Real part of tr(rho * op); errors if the imaginary part is not
/// negligible, which signals a non-Hermitian assembly.
pub fn expectation_operator(rho: &State, op: &Operator) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs operator dim {}",
            rho.dim(),
            op.dim()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += rho.mat[(i, j)] * op.mat[(j, i)];
        }
    }
    if acc.im.abs() > IMAG_TOL {
        return Err(Error::ComplexExpectation { imag: acc.im });
    }
    Ok(acc.re)
}

/// tr(rho * B_N).
pub fn expectation(rho: &State, bell: &BellOperator) -> Result<f64> {
    expectation_operator(rho, &bell.matrix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MkVerdict {
    Violates,
    Satisfies,
}

/// Quantum value against the LHV bound 2^(N-1).
#[derive(Debug, Clone, Serialize)]
pub struct MkViolationReport {
    pub parties: usize,
    pub value: f64,
    pub lhv_bound: f64,
    pub verdict: MkVerdict,
    /// `|value| - lhv_bound`; positive means the state with these
    /// observables admits no 2x...x2-setting LHV description.
    pub margin: f64,
}

pub fn mk_violation_report(
    rho: &State,
    observables: &[(Operator, Operator)],
) -> Result<MkViolationReport> {
    let bell = bell_operator(observables)?;
    let value = expectation(rho, &bell)?;
    let lhv_bound = (1u64 << (bell.parties() - 1)) as f64;
    let margin = value.abs() - lhv_bound;
    Ok(MkViolationReport {
        parties: bell.parties(),
        value,
        lhv_bound,
        verdict: if margin > 0.0 {
            MkVerdict::Violates
        } else {
            MkVerdict::Satisfies
        },
        margin,
    })
}
