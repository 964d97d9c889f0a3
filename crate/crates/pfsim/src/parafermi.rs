//! Para-Fermi structure hosted in the two-mode parity blocks.
//!
//! The (2λ+1)-dimensional spin-like subspace spanned by |λ;m⟩,
//! m = -λ..λ, sits inside one parity block of the rotating-wave model. Its
//! basis states map onto two-mode Fock states through the half-occupation
//! rule n₁ = ⌊(λ+m)/2⌋, n₂ = ⌊(λ-m)/2⌋, and the ladder operators are built
//! by projecting explicit two-mode operators onto that span. Nothing here is
//! taken on faith: the module records projection leakage and exposes a full
//! algebra verification report.

use serde::Serialize;

use crate::fock::{annihilation, two_mode_parity, QubitLevel, SpaceConfig};
use crate::models::{derive, fg_blocks, DerivedParams, ModelParams};
use crate::numerics::{c64, commutator, anticommutator, frobenius, CMatrix, CVector};
use crate::{PfError, Result, Tolerances};

/// Fock occupation carried by k ladder steps: ⌊k/2⌋. Every second step
/// deposits a photon in the active mode.
pub fn occupation(k: u32) -> u32 {
    k / 2
}

/// One basis label of the spin-like subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PfLabel {
    pub lambda: u32,
    /// Weight, -lambda ..= +lambda.
    pub m: i32,
}

impl PfLabel {
    /// Two-mode Fock occupations (n1, n2) hosting this label.
    pub fn fock(&self) -> (usize, usize) {
        let l = self.lambda as i32;
        (
            occupation((l + self.m) as u32) as usize,
            occupation((l - self.m) as u32) as usize,
        )
    }

    /// Qubit level of the lab-frame embedding: the block-diagonalizing flip
    /// acts as a qubit flip on even two-mode parity, which lands this label
    /// on |e⟩ exactly when λ+m is odd.
    pub fn lab_qubit(&self) -> QubitLevel {
        if (self.lambda as i32 + self.m).rem_euclid(2) == 1 {
            QubitLevel::E
        } else {
            QubitLevel::G
        }
    }
}

/// The projected ladder algebra of one deformed-oscillator subspace,
/// together with its Hamiltonian restriction.
#[derive(Debug, Clone)]
pub struct PfSubspace {
    pub lambda: u32,
    /// 2λ+1.
    pub dim: usize,
    /// Weight operator I₃ = diag(m).
    pub i3: CMatrix,
    /// Raising operator, projection of (a₁†(1-sΠ) + a₂(1+sΠ))/√2 with
    /// s = (-1)^λ.
    pub i_plus: CMatrix,
    pub i_minus: CMatrix,
    /// Reflection R = diag((-1)^(λ+m)).
    pub r: CMatrix,
    /// Restriction of the hosting parity block to the subspace; this is the
    /// generator used for subspace dynamics.
    pub h_lambda: CMatrix,
    pub params: ModelParams,
    pub derived: DerivedParams,
    /// Largest norm by which applying a ladder operator or the block
    /// Hamiltonian to a subspace state leaves the subspace. Zero closure is
    /// part of the construction's claim.
    pub projection_leakage: f64,
}

/// Verification report for one subspace: every defining relation of the
/// deformed algebra as a numerical residual. `pass` covers the relations
/// that define the structure; the order-2λ variant of the trilinear
/// relation and the uncorrected Hamiltonian form are reported but do not
/// gate, because they fail for odd λ as constructed.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub lambda: u32,
    /// ‖[I₃,I₊] - I₊‖, ‖[I₃,I₋] + I₋‖.
    pub comm_i3_iplus: f64,
    pub comm_i3_iminus: f64,
    /// ‖{R,I₊}‖, ‖{R,I₋}‖.
    pub anticomm_r_iplus: f64,
    pub anticomm_r_iminus: f64,
    /// ‖I₋ - I₊†‖.
    pub adjointness: f64,
    /// ‖[I₊,I₋] - 2I₃(-1)^(I₃+p)‖ for order p = λ and p = 2λ.
    pub trilinear_p_lambda: f64,
    pub trilinear_p_2lambda: f64,
    /// Ladder structure: I₊ strictly raises m by one, annihilates the top
    /// state; I₋ annihilates the bottom state.
    pub ladder_structure: f64,
    /// ‖σ₃|_subspace + R‖: the lab qubit inversion restricted to the
    /// subspace equals -R.
    pub sigma_z_vs_r: f64,
    /// ‖H_restricted - [ε₊(λ - (1-R)/2) + ε₋I₃ + γ₊(I₊+I₋) - γ₋(I₊-I₋)R]‖.
    pub h_closed_form: f64,
    /// Same with the ε₊ reflection term carrying an extra (-1)^λ; kept as a
    /// record that this variant disagrees for odd λ off resonance.
    pub h_closed_form_alt_residual: f64,
    pub projection_leakage: f64,
    pub pass: bool,
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0_f64, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Build the order-2λ subspace hosted by the appropriate parity block of the
/// given model. The two-mode box is truncated at n_max = max(λ,1), which is
/// exact: the projectors inside the ladder operators annihilate every state
/// that could cross the edge.
pub fn build_subspace(lambda: u32, p: &ModelParams) -> Result<PfSubspace> {
    let derived = derive(p)?;
    let dim = 2 * lambda as usize + 1;
    let n_max = (lambda as usize).max(1);
    let cfg = SpaceConfig::two_mode(n_max, n_max)?;

    // embedding of the subspace basis into the two-mode box, ascending m
    let mut e = CMatrix::zeros(cfg.dim(), dim);
    for j in 0..dim {
        let m = j as i32 - lambda as i32;
        let (n1, n2) = PfLabel { lambda, m }.fock();
        let idx = cfg.flat_index(crate::fock::BasisLabel { n1, n2, q: None })?;
        e[(idx, j)] = c64(1.0, 0.0);
    }

    let s = if lambda % 2 == 0 { 1.0 } else { -1.0 };
    let pi = two_mode_parity(&cfg)?;
    let id = CMatrix::identity(cfg.dim(), cfg.dim());
    let a1 = annihilation(1, &cfg)?;
    let a2 = annihilation(2, &cfg)?;
    let i_plus_tm = (a1.adjoint() * (&id - &pi * c64(s, 0.0)) + &a2 * (&id + &pi * c64(s, 0.0)))
        * c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    let (hp, hm) = fg_blocks(p, &cfg)?;
    let h_block = if lambda % 2 == 0 { hp } else { hm };

    // closure: applying any generator to the span must stay in the span
    let project = |op: &CMatrix| -> CMatrix { e.adjoint() * op * &e };
    let leakage_of = |op: &CMatrix| -> f64 {
        let applied = op * &e;
        let retained = &e * (e.adjoint() * &applied);
        frobenius(&(applied - retained))
    };
    let projection_leakage = leakage_of(&i_plus_tm)
        .max(leakage_of(&i_plus_tm.adjoint()))
        .max(leakage_of(&h_block));

    let i_plus = project(&i_plus_tm);
    let i_minus = i_plus.adjoint();
    let h_lambda = project(&h_block);

    let mut i3 = CMatrix::zeros(dim, dim);
    let mut r = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let m = j as i32 - lambda as i32;
        i3[(j, j)] = c64(f64::from(m), 0.0);
        let par = if (lambda as i32 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        r[(j, j)] = c64(par, 0.0);
    }

    Ok(PfSubspace {
        lambda,
        dim,
        i3,
        i_plus,
        i_minus,
        r,
        h_lambda,
        params: *p,
        derived,
        projection_leakage,
    })
}

impl PfSubspace {
    pub fn label(&self, j: usize) -> Result<PfLabel> {
        if j >= self.dim {
            return Err(PfError::Shape(format!(
                "subspace index {j} out of range for dim {}",
                self.dim
            )));
        }
        Ok(PfLabel {
            lambda: self.lambda,
            m: j as i32 - self.lambda as i32,
        })
    }

    /// Lowest-weight state |λ;-λ⟩ as a subspace vector.
    pub fn lowest(&self) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[0] = c64(1.0, 0.0);
        v
    }

    /// Diagonals of the lab observables in the subspace basis:
    /// (n1, n2, m, σ₃).
    pub fn observable_diags(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut n1 = Vec::with_capacity(self.dim);
        let mut n2 = Vec::with_capacity(self.dim);
        let mut i3 = Vec::with_capacity(self.dim);
        let mut sz = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let l = self.label(j).expect("index in range");
            let (a, b) = l.fock();
            n1.push(a as f64);
            n2.push(b as f64);
            i3.push(f64::from(l.m));
            sz.push(match l.lab_qubit() {
                QubitLevel::E => 1.0,
                QubitLevel::G => -1.0,
            });
        }
        (n1, n2, i3, sz)
    }

    /// Embed a subspace vector into the full lab space (two modes plus
    /// qubit) through the Fock mapping and the parity rule for the qubit.
    pub fn embed_lab(&self, psi: &CVector, cfg: &SpaceConfig) -> Result<CVector> {
        cfg.require_qubit()?;
        if psi.len() != self.dim {
            return Err(PfError::Shape(format!(
                "subspace vector of length {} for dim {}",
                psi.len(),
                self.dim
            )));
        }
        let mut out = CVector::zeros(cfg.dim());
        for j in 0..self.dim {
            let l = self.label(j)?;
            let (n1, n2) = l.fock();
            let idx = cfg.flat_index(crate::fock::BasisLabel {
                n1,
                n2,
                q: Some(l.lab_qubit()),
            })?;
            out[idx] = psi[j];
        }
        Ok(out)
    }

    /// Closed Hamiltonian form built from the projected generators:
    /// ε₊(λ - (1-R)/2) + ε₋I₃ + γ₊(I₊+I₋) - γ₋(I₊-I₋)R. With
    /// `alt_reflection` the ε₊ term uses (-1)^λ R instead of R.
    pub fn h_closed_form(&self, alt_reflection: bool) -> CMatrix {
        let d = &self.derived;
        let id = CMatrix::identity(self.dim, self.dim);
        let refl = if alt_reflection && self.lambda % 2 == 1 {
            -self.r.clone()
        } else {
            self.r.clone()
        };
        let eps_term = (&id * c64(f64::from(self.lambda), 0.0)
            - (&id - refl) * c64(0.5, 0.0))
            * c64(d.eps_plus, 0.0);
        eps_term
            + &self.i3 * c64(d.eps_minus, 0.0)
            + (&self.i_plus + &self.i_minus) * c64(d.gamma_plus, 0.0)
            - (&self.i_plus - &self.i_minus) * &self.r * c64(d.gamma_minus, 0.0)
    }

    pub fn verify(&self, tol: &Tolerances) -> Result<AlgebraReport> {
        verify_algebra(self, tol)
    }
}

/// σ₃ restricted to the subspace: diagonal with entry +1 where the lab
/// embedding is excited and -1 where it is ground. Returns an error if the
/// resulting spectrum is not contained in {-1, +1}.
pub fn sigma_z_from_pf(s: &PfSubspace) -> Result<CMatrix> {
    let (_, _, _, sz) = s.observable_diags();
    let mut out = CMatrix::zeros(s.dim, s.dim);
    for (j, v) in sz.iter().enumerate() {
        if (v.abs() - 1.0).abs() > 0.0 {
            return Err(PfError::Verification(format!(
                "qubit inversion eigenvalue {v} at index {j} is not ±1"
            )));
        }
        out[(j, j)] = c64(*v, 0.0);
    }
    Ok(out)
}

pub fn verify_algebra(s: &PfSubspace, tol: &Tolerances) -> Result<AlgebraReport> {
    let comm_i3_iplus = frobenius(&(commutator(&s.i3, &s.i_plus)? - &s.i_plus));
    let comm_i3_iminus = frobenius(&(commutator(&s.i3, &s.i_minus)? + &s.i_minus));
    let anticomm_r_iplus = frobenius(&anticommutator(&s.r, &s.i_plus)?);
    let anticomm_r_iminus = frobenius(&anticommutator(&s.r, &s.i_minus)?);
    let adjointness = frobenius(&(&s.i_minus - s.i_plus.adjoint()));

    // [I₊,I₋] = 2I₃(-1)^(I₃+p), diagonal in m
    let trilinear_target = |p_order: i64| -> CMatrix {
        let mut d = CMatrix::zeros(s.dim, s.dim);
        for j in 0..s.dim {
            let m = j as i64 - i64::from(s.lambda);
            let sign = if (m + p_order).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            d[(j, j)] = c64(2.0 * m as f64 * sign, 0.0);
        }
        d
    };
    let lhs = commutator(&s.i_plus, &s.i_minus)?;
    let trilinear_p_lambda = frobenius(&(&lhs - trilinear_target(i64::from(s.lambda))));
    let trilinear_p_2lambda = frobenius(&(&lhs - trilinear_target(2 * i64::from(s.lambda))));

    // strict one-step raising plus annihilation at the ends
    let mut ladder_structure = 0.0f64;
    for i in 0..s.dim {
        for j in 0..s.dim {
            if i != j + 1 {
                ladder_structure = ladder_structure.max(s.i_plus[(i, j)].norm());
            }
        }
    }
    let top = s.dim - 1;
    let mut top_state = CVector::zeros(s.dim);
    top_state[top] = c64(1.0, 0.0);
    ladder_structure = ladder_structure
        .max((&s.i_plus * &top_state).norm())
        .max((&s.i_minus * s.lowest()).norm());

    let sigma_z_vs_r = frobenius(&(sigma_z_from_pf(s)? + &s.r));

    let h_closed_form = frobenius(&(&s.h_lambda - s.h_closed_form(false)));
    let h_closed_form_alt_residual = frobenius(&(&s.h_lambda - s.h_closed_form(true)));

    let t = tol.algebra;
    let pass = comm_i3_iplus < t
        && comm_i3_iminus < t
        && anticomm_r_iplus < t
        && anticomm_r_iminus < t
        && adjointness < t
        && trilinear_p_lambda < t
        && ladder_structure < t
        && sigma_z_vs_r < t
        && h_closed_form < t
        && s.projection_leakage < t;

    Ok(AlgebraReport {
        lambda: s.lambda,
        comm_i3_iplus,
        comm_i3_iminus,
        anticomm_r_iplus,
        anticomm_r_iminus,
        adjointness,
        trilinear_p_lambda,
        trilinear_p_2lambda,
        ladder_structure,
        sigma_z_vs_r,
        h_closed_form,
        h_closed_form_alt_residual,
        projection_leakage: s.projection_leakage,
        pass,
    })
}

/// Two-mode binomial state with the qubit in the ground level:
/// Σ_k √(C(λ,k)(1-η)^(λ-k) η^k) |λ-k, k⟩⊗|g⟩.
pub fn binomial_state(lambda: u32, eta: f64, cfg: &SpaceConfig) -> Result<CVector> {
    cfg.require_qubit()?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(PfError::InvalidArgument(format!(
            "binomial weight {eta} outside [0, 1]"
        )));
    }
    if cfg.n_max_1 < lambda as usize || cfg.n_max_2 < lambda as usize {
        return Err(PfError::InvalidArgument(format!(
            "truncation {}x{} cannot hold a binomial state of size {lambda}",
            cfg.n_max_1, cfg.n_max_2
        )));
    }
    let mut out = CVector::zeros(cfg.dim());
    for k in 0..=lambda {
        let amp = (binom(lambda, k)
            * (1.0 - eta).powi((lambda - k) as i32)
            * eta.powi(k as i32))
        .sqrt();
        let idx = cfg.flat_index(crate::fock::BasisLabel {
            n1: (lambda - k) as usize,
            n2: k as usize,
            q: Some(QubitLevel::G),
        })?;
        out[idx] = c64(amp, 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn resonant() -> ModelParams {
        ModelParams::default()
    }

    fn detuned() -> ModelParams {
        ModelParams {
            omega2: 1.001,
            ..ModelParams::default()
        }
    }

    fn asym() -> ModelParams {
        ModelParams {
            g1: 1e-3,
            g2: 5e-4,
            ..ModelParams::default()
        }
    }

    #[test]
    fn occupation_closed_form() {
        for k in 0..200u32 {
            let sign = if k % 2 == 0 { 1i64 } else { -1 };
            let closed = (2 * i64::from(k) - 1 + sign) / 4;
            assert_eq!(i64::from(occupation(k)), closed);
        }
        // pairs of steps deposit single photons
        for k in 0..100u32 {
            assert_eq!(occupation(k + 2), occupation(k) + 1);
        }
    }

    #[test]
    fn label_fock_mapping() {
        let l = PfLabel { lambda: 25, m: -25 };
        assert_eq!(l.fock(), (0, 25));
        assert_eq!(l.lab_qubit(), QubitLevel::G);
        let l = PfLabel { lambda: 25, m: 25 };
        assert_eq!(l.fock(), (25, 0));
        let l = PfLabel { lambda: 3, m: 0 };
        assert_eq!(l.fock(), (1, 1));
        assert_eq!(l.lab_qubit(), QubitLevel::E);
    }

    #[test]
    fn lambda_zero_is_inert_scalar() {
        let s = build_subspace(0, &resonant()).unwrap();
        assert_eq!(s.dim, 1);
        assert!(frobenius(&s.i_plus) == 0.0);
        assert!(frobenius(&s.h_lambda) < 1e-18);
        assert!(s.verify(&Tolerances::default()).unwrap().pass);
    }

    #[test]
    fn lambda_one_ladder_normalization() {
        let s = build_subspace(1, &resonant()).unwrap();
        // I₋I₊|λ;-λ⟩ = 2|λ;-λ⟩ for λ=1
        let v = &s.i_minus * (&s.i_plus * s.lowest());
        let dev = frobenius(&CMatrix::from_column_slice(3, 1, (v - s.lowest() * c64(2.0, 0.0)).as_slice()));
        assert!(dev < 1e-14);
    }

    #[test]
    fn algebra_report_passes_and_flags_variants() {
        let tol = Tolerances::default();
        for p in [resonant(), asym(), detuned()] {
            for lambda in [1u32, 2, 3, 4, 5] {
                let s = build_subspace(lambda, &p).unwrap();
                let rep = s.verify(&tol).unwrap();
                assert!(rep.pass, "{rep:?}");
                assert!(rep.trilinear_p_lambda < 1e-13, "{rep:?}");
                if lambda % 2 == 0 {
                    // the two order readings coincide for even λ
                    assert!(rep.trilinear_p_2lambda < 1e-13, "{rep:?}");
                } else {
                    // and disagree by an O(1) amount for odd λ
                    assert!(rep.trilinear_p_2lambda > 1.0, "{rep:?}");
                }
            }
        }
    }

    #[test]
    fn closed_form_reflection_variant_fails_detuned_odd() {
        let tol = Tolerances::default();
        let s = build_subspace(3, &detuned()).unwrap();
        let rep = s.verify(&tol).unwrap();
        assert!(rep.h_closed_form < 1e-15, "{rep:?}");
        // the alternate reflection sign disagrees at the scale of ε₊
        assert!(
            rep.h_closed_form_alt_residual > 1e-5,
            "{rep:?}"
        );
        // on resonance both collapse to the same operator
        let s = build_subspace(3, &resonant()).unwrap();
        let rep = s.verify(&tol).unwrap();
        assert!(rep.h_closed_form_alt_residual < 1e-15, "{rep:?}");
    }

    #[test]
    fn sigma_z_pattern_and_reflection() {
        let s = build_subspace(1, &resonant()).unwrap();
        let sz = sigma_z_from_pf(&s).unwrap();
        for (j, want) in [-1.0, 1.0, -1.0].iter().enumerate() {
            assert_eq!(sz[(j, j)], c64(*want, 0.0));
        }
        for lambda in 0..8u32 {
            let s = build_subspace(lambda, &resonant()).unwrap();
            let sz = sigma_z_from_pf(&s).unwrap();
            let tr: f64 = (0..s.dim).map(|j| sz[(j, j)].re).sum();
            assert_abs_diff_eq!(tr, -1.0, epsilon = 1e-15);
            // R is an exact involution
            let r2 = &s.r * &s.r;
            assert!(frobenius(&(r2 - CMatrix::identity(s.dim, s.dim))) == 0.0);
        }
    }

    #[test]
    fn embedding_preserves_norm_and_observables() {
        let p = resonant();
        let s = build_subspace(4, &p).unwrap();
        let cfg = SpaceConfig::with_qubit(4, 4).unwrap();
        // spread over all m
        let psi = CVector::from_fn(s.dim, |j, _| c64(1.0 / ((j + 1) as f64), 0.2));
        let psi = &psi / c64(psi.norm(), 0.0);
        let lab = s.embed_lab(&psi, &cfg).unwrap();
        assert_abs_diff_eq!(lab.norm(), 1.0, epsilon = 1e-14);

        let (n1d, ..) = s.observable_diags();
        let sub_n1 = crate::fock::expectation_diag(&n1d, &psi);
        let n1_lab = crate::fock::number(1, &cfg).unwrap();
        let lab_n1 = crate::fock::expectation(&n1_lab, &lab).re;
        assert_abs_diff_eq!(sub_n1, lab_n1, epsilon = 1e-13);
    }

    #[test]
    fn binomial_state_profile() {
        let cfg = SpaceConfig::with_qubit(4, 4).unwrap();
        let b = binomial_state(4, 0.5, &cfg).unwrap();
        assert_abs_diff_eq!(b.norm(), 1.0, epsilon = 1e-14);
        // η=0 concentrates everything on |λ,0⟩⊗|g⟩
        let b0 = binomial_state(4, 0.0, &cfg).unwrap();
        let idx = cfg
            .flat_index(crate::fock::BasisLabel { n1: 4, n2: 0, q: Some(QubitLevel::G) })
            .unwrap();
        assert_eq!(b0[idx], c64(1.0, 0.0));
        assert_abs_diff_eq!(b0.norm(), 1.0, epsilon = 1e-15);

        assert!(binomial_state(4, 1.5, &cfg).is_err());
        assert!(binomial_state(8, 0.5, &cfg).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = ModelParams> {
            (0.5..2.0f64, 0.5..2.0f64, 1e-4..1e-2f64, 1e-4..1e-2f64).prop_map(
                |(w1, w2, g1, g2)| ModelParams {
                    omega0: 1.0,
                    omega1: w1,
                    omega2: w2,
                    g1,
                    g2,
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn algebra_holds_for_random_models(p in params(), lambda in 0u32..6) {
                let s = build_subspace(lambda, &p).unwrap();
                let rep = s.verify(&Tolerances::default()).unwrap();
                prop_assert!(rep.pass, "{rep:?}");
            }

            #[test]
            fn ladder_nilpotency(lambda in 0u32..7) {
                let s = build_subspace(lambda, &resonant()).unwrap();
                let mut v = s.lowest();
                for _ in 0..2 * lambda {
                    v = &s.i_plus * v;
                    prop_assert!(v.norm() > 0.0);
                }
                v = &s.i_plus * v;
                prop_assert!(v.norm() == 0.0);
            }
        }
    }
}
