//! Dense complex linear-algebra kernel.
//!
//! Everything downstream stores operators as [`CMatrix`] and states as
//! [`CVector`]. The kernel wraps the matrix backend behind a small surface:
//! Kronecker products with a size guard, commutators, Hermitian
//! eigendecomposition with mandatory symmetrization, and spectral
//! propagators exp(-iHt).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{PfError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hard cap on any constructed operator dimension. Large enough for the
/// counter-rotating model at the default headroom truncation, small enough
/// to catch runaway Kronecker chains.
pub const MAX_DIM: usize = 8192;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    a.norm()
}

/// Largest entry magnitude.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

fn check_finite(a: &CMatrix, what: &'static str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(PfError::NonFinite(what))
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.is_empty() || b.is_empty() {
        return Err(PfError::Shape("kron of empty matrix".into()));
    }
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    if rows.max(cols) > MAX_DIM {
        return Err(PfError::SizeLimit {
            dim: rows.max(cols),
            max: MAX_DIM,
        });
    }
    Ok(a.kronecker(b))
}

fn check_same_square(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || !b.is_square() || a.nrows() != b.nrows() {
        return Err(PfError::Shape(format!(
            "expected equal square matrices, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// `ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_same_square(a, b)?;
    Ok(a * b - b * a)
}

/// `ab + ba`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_same_square(a, b)?;
    Ok(a * b + b * a)
}

/// Relative Hermiticity residual ‖H - H†‖_F / ‖H‖_F (absolute when H = 0).
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    let norm = frobenius(h);
    let resid = frobenius(&(h - h.adjoint()));
    if norm > 0.0 {
        resid / norm
    } else {
        resid
    }
}

/// Result of [`eigh`]: eigenvalues ascending, eigenvectors as unitary
/// columns in matching order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// ‖VΛV† - H‖_F / ‖H‖_F against the matrix it came from.
    pub fn reconstruction_residual(&self, h: &CMatrix) -> f64 {
        let lam = CMatrix::from_diagonal(&self.eigenvalues.map(|w| c64(w, 0.0)));
        let rebuilt = &self.eigenvectors * lam * self.eigenvectors.adjoint();
        let norm = frobenius(h).max(1.0);
        frobenius(&(rebuilt - h)) / norm
    }
}

/// Hermitian eigendecomposition.
///
/// The input must be Hermitian within `tol_herm` (relative Frobenius); it is
/// then symmetrized as (H+H†)/2 before decomposing, so the result is exactly
/// the spectrum of the symmetrized matrix.
pub fn eigh(h: &CMatrix, tol_herm: f64) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(PfError::Shape(format!(
            "eigh needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    check_finite(h, "eigh input")?;
    let residual = hermiticity_residual(h);
    if residual > tol_herm {
        return Err(PfError::NonHermitian {
            residual,
            tol: tol_herm,
        });
    }
    log::debug!(
        "eigh: symmetrizing {}x{} input, relative Hermiticity residual {:.3e}",
        h.nrows(),
        h.ncols(),
        residual
    );
    let sym = (h + h.adjoint()) * c64(0.5, 0.0);
    let se = sym.symmetric_eigen();

    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Spectral propagator U(t) = V exp(-iΛt) V† for Hermitian `h`.
pub fn propagator(h: &CMatrix, t: f64, tol_herm: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(PfError::InvalidArgument(format!("non-finite time {t}")));
    }
    let eig = eigh(h, tol_herm)?;
    let u = propagator_from_eigen(&eig, t);
    check_finite(&u, "propagator output")?;
    Ok(u)
}

/// Propagator from a precomputed decomposition; reuse this when many times
/// share one Hamiltonian.
pub fn propagator_from_eigen(eig: &EigenDecomposition, t: f64) -> CMatrix {
    let phases = eig.eigenvalues.map(|w| c64(0.0, -w * t).exp());
    let lam = CMatrix::from_diagonal(&phases);
    &eig.eigenvectors * lam * eig.eigenvectors.adjoint()
}

/// ‖U†U - I‖_F, zero for exactly unitary U.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    frobenius(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., 1.), c64(0., -1.), c64(0., 0.)])
    }

    fn pauli_z() -> CMatrix {
        // (g, e) ordering: diag(-1, +1)
        CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-1., 0.), c64(1., 0.)]))
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2, 2);
        let k = kron(&i2, &i2).unwrap();
        assert_eq!(k, CMatrix::identity(4, 4));

        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        assert_eq!(&xx * &xx, CMatrix::identity(4, 4));

        let d1 = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1., 0.), c64(2., 0.)]));
        let d2 = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(3., 0.), c64(4., 0.)]));
        let d = kron(&d1, &d2).unwrap();
        let want = [3.0, 4.0, 6.0, 8.0];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(d[(i, i)], c64(*w, 0.0));
        }
    }

    #[test]
    fn kron_size_guard() {
        let big = CMatrix::identity(200, 200);
        let err = kron(&big, &big).unwrap_err();
        assert!(matches!(err, PfError::SizeLimit { .. }));
    }

    #[test]
    fn commutator_pauli() {
        // [sx, sy] = 2i sz holds regardless of whether index 0 is g or e.
        let c = commutator(&pauli_x(), &pauli_y()).unwrap();
        let want = pauli_z() * c64(0.0, 2.0);
        assert!(frobenius(&(c - want)) < 1e-15);

        let a = pauli_y();
        assert!(frobenius(&commutator(&a, &a).unwrap()) == 0.0);

        let ac = anticommutator(&pauli_x(), &pauli_x()).unwrap();
        assert!(frobenius(&(ac - CMatrix::identity(2, 2) * c64(2., 0.))) == 0.0);
    }

    #[test]
    fn shape_errors() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert!(matches!(commutator(&a, &b), Err(PfError::Shape(_))));
        assert!(matches!(anticommutator(&a, &b), Err(PfError::Shape(_))));
    }

    #[test]
    fn eigh_paulis_and_zero() {
        let e = eigh(&pauli_z(), 1e-10).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);

        let e = eigh(&pauli_x(), 1e-10).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        // eigenvectors are (|g> -+ |e>)/sqrt(2) up to phase
        for c in 0..2 {
            let col = e.eigenvectors.column(c);
            assert_abs_diff_eq!(col[0].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
            assert_abs_diff_eq!(col[1].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }

        let z = CMatrix::zeros(3, 3);
        let e = eigh(&z, 1e-10).unwrap();
        assert!(e.eigenvalues.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c64(1.0, 0.0);
        let err = eigh(&m, 1e-10).unwrap_err();
        assert!(matches!(err, PfError::NonHermitian { .. }));
    }

    #[test]
    fn propagator_basics() {
        let h = pauli_z();
        let u0 = propagator(&h, 0.0, 1e-10).unwrap();
        assert!(frobenius(&(u0 - CMatrix::identity(2, 2))) < 1e-14);

        let u = propagator(&h, std::f64::consts::FRAC_PI_2, 1e-10).unwrap();
        // exp(-i sz pi/2) = diag(e^{+i pi/2}, e^{-i pi/2}) for sz = diag(-1,+1)
        assert!((u[(0, 0)] - c64(0.0, 1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - c64(0.0, -1.0)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-15 && u[(1, 0)].norm() < 1e-15);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random Hermitian matrix with entries of order one.
        fn hermitian(dim: usize) -> impl Strategy<Value = CMatrix> {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(
                move |vals| {
                    let a = CMatrix::from_fn(dim, dim, |r, c| {
                        let (re, im) = vals[r * dim + c];
                        c64(re, im)
                    });
                    (&a + a.adjoint()) * c64(0.5, 0.0)
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn propagator_unitary_and_inverse(h in (2usize..9).prop_flat_map(hermitian),
                                              t in -50.0..50.0f64) {
                let u = propagator(&h, t, 1e-10).unwrap();
                prop_assert!(unitarity_residual(&u) < 1e-10);
                let v = propagator(&h, -t, 1e-10).unwrap();
                let n = u.nrows();
                prop_assert!(frobenius(&(u * v - CMatrix::identity(n, n))) < 1e-10);
            }

            #[test]
            fn eigh_reconstructs_and_sorts(h in (2usize..11).prop_flat_map(hermitian)) {
                let e = eigh(&h, 1e-10).unwrap();
                prop_assert!(e.reconstruction_residual(&h) < 1e-10);
                for i in 1..e.eigenvalues.len() {
                    prop_assert!(e.eigenvalues[i] >= e.eigenvalues[i - 1]);
                }
                prop_assert!(unitarity_residual(&e.eigenvectors) < 1e-12);
            }

            #[test]
            fn kron_associative(a in hermitian(2), b in hermitian(3), c in hermitian(2)) {
                let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
                let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
                prop_assert!(frobenius(&(left - right)) < 1e-13);
            }
        }
    }
}
