//! Hamiltonian builders and frame equivalences.
//!
//! Three frames of the same physics: the full two-cavity qubit model with
//! counter-rotating terms, its excitation-conserving rotating-wave limit,
//! and the rotated single-active-mode form obtained through a beam-splitter
//! change of modes. A parity-conditioned qubit flip block-diagonalizes the
//! rotating-wave model into two two-mode blocks; both the flip and the
//! beam-splitter map are applied as explicit unitaries and checked
//! numerically, never assumed.

use serde::Serialize;

use crate::fock::{
    annihilation, creation, identity, number, qubit_lower, qubit_pauli, qubit_raise,
    two_mode_parity, SpaceConfig,
};
use crate::numerics::{c64, dagger, eigh, max_abs, propagator, CMatrix, CVector};
use crate::{PfError, Result, Tolerances};

/// Physical inputs, all in units of the qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub g1: f64,
    pub g2: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            omega0: 1.0,
            omega1: 1.0,
            omega2: 1.0,
            g1: 1e-3,
            g2: 1e-3,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega0, self.omega1, self.omega2, self.g1, self.g2]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(PfError::InvalidArgument("non-finite model parameter".into()));
        }
        if self.omega0 <= 0.0 || self.omega1 <= 0.0 || self.omega2 <= 0.0 {
            return Err(PfError::InvalidArgument(
                "frequencies must be positive".into(),
            ));
        }
        if self.g1 < 0.0 || self.g2 < 0.0 {
            return Err(PfError::InvalidArgument(
                "couplings must be nonnegative".into(),
            ));
        }
        if self.g1 == 0.0 && self.g2 == 0.0 {
            return Err(PfError::InvalidArgument(
                "at least one coupling must be nonzero".into(),
            ));
        }
        Ok(())
    }
}

/// Quantities derived from [`ModelParams`]: detunings, the dressed-mode
/// frequencies and residual mode-mode coupling of the beam-splitter frame,
/// and the split detunings/couplings the subspace Hamiltonian is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Detunings delta_j = omega0 - omega_j.
    pub delta1: f64,
    pub delta2: f64,
    /// Dressed frequencies of the rotated modes.
    pub omega_d1: f64,
    pub omega_d2: f64,
    /// Residual beam-splitter coupling between the rotated modes.
    pub gamma: f64,
    /// Quadrature sum of the couplings, the single coupling of the rotated
    /// frame.
    pub g: f64,
    /// (delta1 ± delta2)/2.
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// (g1 ± g2)/2^(3/2).
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl DerivedParams {
    /// Effective coupling of the homogeneous closed-form solution,
    /// (g1+g2)/2. Fixed once by least-squares calibration against the
    /// propagator and frozen here.
    pub fn g_eff(&self) -> f64 {
        self.gamma_plus * std::f64::consts::SQRT_2
    }
}

pub fn derive(p: &ModelParams) -> Result<DerivedParams> {
    p.validate()?;
    let delta1 = p.omega0 - p.omega1;
    let delta2 = p.omega0 - p.omega2;
    let g2sum = p.g1 * p.g1 + p.g2 * p.g2;
    let g = g2sum.sqrt();
    Ok(DerivedParams {
        delta1,
        delta2,
        omega_d1: (delta1 * p.g1 * p.g1 + delta2 * p.g2 * p.g2) / g2sum,
        omega_d2: (delta1 * p.g2 * p.g2 + delta2 * p.g1 * p.g1) / g2sum,
        gamma: (p.omega2 - p.omega1) * p.g1 * p.g2 / g2sum,
        g,
        eps_plus: 0.5 * (delta1 + delta2),
        eps_minus: 0.5 * (delta1 - delta2),
        gamma_plus: (p.g1 + p.g2) / (2.0 * std::f64::consts::SQRT_2),
        gamma_minus: (p.g1 - p.g2) / (2.0 * std::f64::consts::SQRT_2),
    })
}

/// Full two-cavity qubit Hamiltonian with counter-rotating terms:
/// (ω₀/2)σ₃ + Σ_j ω_j a_j†a_j + g₁(a₁†+a₁)σ₁ + g₂(a₂†+a₂)σ₂.
/// Mode 1 couples through σ₁ and mode 2 through σ₂; total excitation is not
/// conserved.
pub fn build_ccqrm(p: &ModelParams, cfg: &SpaceConfig) -> Result<CMatrix> {
    p.validate()?;
    let s1 = qubit_pauli(1, cfg)?;
    let s2 = qubit_pauli(2, cfg)?;
    let s3 = qubit_pauli(3, cfg)?;
    let x1 = creation(1, cfg)? + annihilation(1, cfg)?;
    let x2 = creation(2, cfg)? + annihilation(2, cfg)?;
    Ok(s3 * c64(0.5 * p.omega0, 0.0)
        + number(1, cfg)? * c64(p.omega1, 0.0)
        + number(2, cfg)? * c64(p.omega2, 0.0)
        + x1 * s1 * c64(p.g1, 0.0)
        + x2 * s2 * c64(p.g2, 0.0))
}

/// Rotating-wave model in the frame rotating at the qubit frequency:
/// δ₁a₁†a₁ + δ₂a₂†a₂ + Σ_j g_j(a_j†σ₋ + a_jσ₊). Conserves the total
/// excitation exactly on any truncation.
pub fn build_ccjc(p: &ModelParams, cfg: &SpaceConfig) -> Result<CMatrix> {
    let d = derive(p)?;
    let sp = qubit_raise(cfg)?;
    let sm = qubit_lower(cfg)?;
    let mut h = number(1, cfg)? * c64(d.delta1, 0.0) + number(2, cfg)? * c64(d.delta2, 0.0);
    for (gj, mode) in [(p.g1, 1u8), (p.g2, 2u8)] {
        let a = annihilation(mode, cfg)?;
        h += (dagger(&a) * &sm + a * &sp) * c64(gj, 0.0);
    }
    Ok(h)
}

/// Beam-splitter frame: only the first rotated mode couples to the qubit,
/// Ω₁a₁†a₁ + Ω₂a₂†a₂ + g(a₁σ₊ + a₁†σ₋) + γ(a₁†a₂ + a₂†a₁).
pub fn build_schwinger(p: &ModelParams, cfg: &SpaceConfig) -> Result<CMatrix> {
    let d = derive(p)?;
    let sp = qubit_raise(cfg)?;
    let sm = qubit_lower(cfg)?;
    let a1 = annihilation(1, cfg)?;
    let a2 = annihilation(2, cfg)?;
    Ok(number(1, cfg)? * c64(d.omega_d1, 0.0)
        + number(2, cfg)? * c64(d.omega_d2, 0.0)
        + (&a1 * sp + dagger(&a1) * sm) * c64(d.g, 0.0)
        + (dagger(&a1) * &a2 + dagger(&a2) * &a1) * c64(d.gamma, 0.0))
}

/// The two parity blocks of the rotating-wave model on the bare two-mode
/// space (no qubit): H_± = Σ_j δ_j a_j†a_j + (g_j/2)[a_j†(1∓Π₁₂) + a_j(1±Π₁₂)].
/// Returns (H₊, H₋).
pub fn fg_blocks(p: &ModelParams, cfg: &SpaceConfig) -> Result<(CMatrix, CMatrix)> {
    if cfg.include_qubit {
        return Err(PfError::InvalidArgument(
            "parity blocks live on the two-mode space without the qubit".into(),
        ));
    }
    let d = derive(p)?;
    let pi = two_mode_parity(cfg)?;
    let id = identity(cfg);
    let free = number(1, cfg)? * c64(d.delta1, 0.0) + number(2, cfg)? * c64(d.delta2, 0.0);
    let mut out = Vec::with_capacity(2);
    for sign in [1.0f64, -1.0] {
        let mut h = free.clone();
        for (gj, mode) in [(p.g1, 1u8), (p.g2, 2u8)] {
            let a = annihilation(mode, cfg)?;
            let proj_minus = &id - &pi * c64(sign, 0.0);
            let proj_plus = &id + &pi * c64(sign, 0.0);
            h += (dagger(&a) * proj_minus + a * proj_plus) * c64(0.5 * gj, 0.0);
        }
        out.push(h);
    }
    let minus = out.pop().unwrap();
    let plus = out.pop().unwrap();
    Ok((plus, minus))
}

/// Conserved excitation of one parity block: N_± = a₁†a₁ + a₂†a₂ + (1∓Π₁₂)/2.
pub fn fg_block_excitation(sign_plus: bool, cfg: &SpaceConfig) -> Result<CMatrix> {
    let s = if sign_plus { 1.0 } else { -1.0 };
    let pi = two_mode_parity(cfg)?;
    let id = identity(cfg);
    Ok(number(1, cfg)? + number(2, cfg)? + (id - pi * c64(s, 0.0)) * c64(0.5, 0.0))
}

/// Parity-conditioned qubit flip U = ½[(1−Π₁₂)⊗1 + (1+Π₁₂)⊗σ₁]. Hermitian,
/// unitary, involutory: it flips the qubit on even two-mode parity and does
/// nothing on odd.
pub fn fg_unitary(cfg: &SpaceConfig) -> Result<CMatrix> {
    if !cfg.include_qubit {
        return Err(PfError::InvalidArgument(
            "the parity-conditioned flip acts on the qubit".into(),
        ));
    }
    let pi = two_mode_parity(cfg)?;
    let id = identity(cfg);
    let sx = qubit_pauli(1, cfg)?;
    Ok(((&id - &pi) + (&id + &pi) * sx) * c64(0.5, 0.0))
}

/// Qubit rotation exp(-iθσ₂/2) embedded in the full space.
pub fn qubit_ry(theta: f64, cfg: &SpaceConfig) -> Result<CMatrix> {
    if !cfg.include_qubit {
        return Err(PfError::InvalidArgument("rotation acts on the qubit".into()));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    // exp(-iθσ₂/2) with σ₂ = [[0, i], [-i, 0]] in (g, e) order
    let rot = CMatrix::from_row_slice(2, 2, &[c64(c, 0.), c64(s, 0.), c64(-s, 0.), c64(c, 0.)]);
    let i1 = CMatrix::identity(cfg.n_max_1 + 1, cfg.n_max_1 + 1);
    let i2 = CMatrix::identity(cfg.n_max_2 + 1, cfg.n_max_2 + 1);
    crate::numerics::kron(&crate::numerics::kron(&i1, &i2)?, &rot)
}

/// Two-mode beam splitter exp(θ(a₁†a₂ - a₁a₂†)).
pub fn beam_splitter(theta: f64, cfg: &SpaceConfig) -> Result<CMatrix> {
    let a1 = annihilation(1, cfg)?;
    let a2 = annihilation(2, cfg)?;
    let gen = dagger(&a1) * &a2 - &a1 * dagger(&a2);
    // exp(θG) for antihermitian G equals exp(-i(iG)θ) with iG Hermitian.
    propagator(&(gen * c64(0.0, 1.0)), theta, 1e-10)
}

/// Mode-2 phase rotation exp(iφ a₂†a₂), exact diagonal.
pub fn mode2_phase(phi: f64, cfg: &SpaceConfig) -> Result<CMatrix> {
    let dim = cfg.dim();
    let mut d = CVector::zeros(dim);
    for i in 0..dim {
        let l = cfg.label(i)?;
        d[i] = c64(0.0, phi * l.n2 as f64).exp();
    }
    Ok(CMatrix::from_diagonal(&d))
}

/// Norm of the qubit-off-diagonal part of a full-space operator, plus the
/// two qubit-diagonal blocks in two-mode indexing (g block, e block).
pub fn qubit_block_split(h: &CMatrix, cfg: &SpaceConfig) -> Result<(f64, CMatrix, CMatrix)> {
    if !cfg.include_qubit {
        return Err(PfError::InvalidArgument("expected a space with qubit".into()));
    }
    let tm = cfg.dim() / 2;
    let mut off = 0.0f64;
    let mut hg = CMatrix::zeros(tm, tm);
    let mut he = CMatrix::zeros(tm, tm);
    for i in 0..tm {
        for j in 0..tm {
            // qubit is the innermost factor: full index = 2·(two-mode) + q
            hg[(i, j)] = h[(2 * i, 2 * j)];
            he[(i, j)] = h[(2 * i + 1, 2 * j + 1)];
            off += h[(2 * i, 2 * j + 1)].norm_sqr() + h[(2 * i + 1, 2 * j)].norm_sqr();
        }
    }
    Ok((off.sqrt(), hg, he))
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateResidual {
    pub name: String,
    pub residual: f64,
}

/// Outcome of the block-diagonalization scan. The winning composition is
/// recorded along with every candidate tried.
#[derive(Debug, Clone, Serialize)]
pub struct FgCompositionReport {
    pub best: String,
    pub best_offblock_residual: f64,
    pub candidates: Vec<CandidateResidual>,
    pub unitarity_residual: f64,
    /// Max entrywise deviation of the e block from H₊ and the g block from
    /// H₋ under the winning composition.
    pub block_e_vs_plus: f64,
    pub block_g_vs_minus: f64,
    /// Multiset spectral deviation between the transformed model and the
    /// direct sum of the two parity blocks.
    pub spectral_deviation: f64,
    pub pass: bool,
}

/// Sorted-spectrum multiset deviation max_i |a_i - b_i|.
pub fn spectra_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(PfError::Shape(format!(
            "spectra of different sizes: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

pub fn spectrum(h: &CMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(eigh(h, tol.unitarity)?.eigenvalues.iter().copied().collect())
}

/// Try the plausible compositions of the parity-conditioned flip with a
/// qubit rotation, pick the one that best block-diagonalizes the
/// rotating-wave model, and verify the blocks against the direct two-mode
/// constructions.
pub fn fg_transform_check(
    p: &ModelParams,
    cfg: &SpaceConfig,
    tol: &Tolerances,
) -> Result<FgCompositionReport> {
    let h = build_ccjc(p, cfg)?;
    let u = fg_unitary(cfg)?;

    let mut candidates: Vec<(String, CMatrix)> = vec![("flip alone".into(), u.clone())];
    for theta in [
        std::f64::consts::FRAC_PI_4,
        -std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_2,
        -std::f64::consts::FRAC_PI_2,
    ] {
        let ry = qubit_ry(theta, cfg)?;
        candidates.push((format!("flip after ry({theta:+.4})"), &u * &ry));
        candidates.push((format!("ry({theta:+.4}) after flip"), &ry * &u));
    }

    let mut tried = Vec::new();
    let mut best: Option<(String, f64, CMatrix)> = None;
    for (name, comp) in candidates {
        let transformed = &comp * &h * comp.adjoint();
        let (off, _, _) = qubit_block_split(&transformed, cfg)?;
        tried.push(CandidateResidual {
            name: name.clone(),
            residual: off,
        });
        if best.as_ref().map_or(true, |(_, b, _)| off < *b) {
            best = Some((name, off, comp));
        }
    }
    let (best_name, best_off, comp) = best.expect("nonempty candidate list");

    let transformed = &comp * &h * comp.adjoint();
    let (_, hg, he) = qubit_block_split(&transformed, cfg)?;
    let two_mode = SpaceConfig::two_mode(cfg.n_max_1, cfg.n_max_2)?;
    let (hp, hm) = fg_blocks(p, &two_mode)?;
    let block_e_vs_plus = max_abs(&(&he - &hp));
    let block_g_vs_minus = max_abs(&(&hg - &hm));

    let mut block_eigs = spectrum(&hp, tol)?;
    block_eigs.extend(spectrum(&hm, tol)?);
    let spectral_deviation = spectra_deviation(&spectrum(&h, tol)?, &block_eigs)?;

    let unitarity_residual = crate::numerics::unitarity_residual(&comp);
    let pass = best_off < tol.unitarity
        && block_e_vs_plus < tol.unitarity
        && block_g_vs_minus < tol.unitarity
        && spectral_deviation < tol.unitarity;
    Ok(FgCompositionReport {
        best: best_name,
        best_offblock_residual: best_off,
        candidates: tried,
        unitarity_residual,
        block_e_vs_plus,
        block_g_vs_minus,
        spectral_deviation,
        pass,
    })
}

/// Outcome of the beam-splitter frame scan.
#[derive(Debug, Clone, Serialize)]
pub struct SchwingerFrameReport {
    pub best: String,
    /// Entrywise residual on the excitation-complete part of the truncated
    /// space (labels with n1+n2 ≤ min truncation); the box edge of the
    /// numeric beam splitter is excluded because truncating the generator
    /// and truncating the rotation do not commute there.
    pub best_restricted_residual: f64,
    pub unrestricted_residual: f64,
    pub candidates: Vec<CandidateResidual>,
    /// Max per-excitation-block sorted-spectrum deviation for complete
    /// blocks, independent of the frame-map phase convention.
    pub block_spectra_deviation: f64,
    pub pass: bool,
}

/// Indices of all labels with n1+n2+q equal to the given excitation.
fn excitation_block_indices(cfg: &SpaceConfig, n: usize) -> Result<Vec<usize>> {
    let mut idx = Vec::new();
    for i in 0..cfg.dim() {
        let l = cfg.label(i)?;
        let q = l.q.map_or(0, crate::fock::QubitLevel::index);
        if l.n1 + l.n2 + q == n {
            idx.push(i);
        }
    }
    Ok(idx)
}

fn submatrix(h: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])])
}

/// Sorted spectra of the excitation blocks N = 0..=max_n of an
/// excitation-conserving Hamiltonian.
pub fn excitation_block_spectra(
    h: &CMatrix,
    cfg: &SpaceConfig,
    max_n: usize,
    tol: &Tolerances,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        let idx = excitation_block_indices(cfg, n)?;
        if idx.is_empty() {
            continue;
        }
        let block = submatrix(h, &idx);
        out.push((n, spectrum(&block, tol)?));
    }
    Ok(out)
}

/// Scan phase conventions for the map from the rotating-wave model onto the
/// beam-splitter frame: W = exp(iφ a₂†a₂)·exp(±θ*(a₁†a₂-a₁a₂†)) with
/// θ* = atan2(g₂, g₁), comparing W H W† against the directly built frame
/// Hamiltonian entrywise on the excitation-complete region, and comparing
/// per-block spectra for complete blocks.
pub fn schwinger_map_check(
    p: &ModelParams,
    cfg: &SpaceConfig,
    tol: &Tolerances,
) -> Result<SchwingerFrameReport> {
    if !cfg.include_qubit {
        return Err(PfError::InvalidArgument("frame map needs the qubit".into()));
    }
    let h = build_ccjc(p, cfg)?;
    let hd = build_schwinger(p, cfg)?;
    let theta_star = p.g2.atan2(p.g1);
    let m = cfg.n_max_1.min(cfg.n_max_2);

    let restricted: Vec<usize> = (0..cfg.dim())
        .filter(|&i| {
            let l = cfg.label(i).expect("index in range");
            l.n1 + l.n2 <= m
        })
        .collect();

    let residual_on = |w: &CMatrix, idx: &[usize]| -> f64 {
        let t = w * &h * w.adjoint();
        let diff = &t - &hd;
        let mut worst = 0.0f64;
        for &i in idx {
            for &j in idx {
                worst = worst.max(diff[(i, j)].norm());
            }
        }
        worst
    };

    let all: Vec<usize> = (0..cfg.dim()).collect();
    let mut tried = Vec::new();
    let mut best: Option<(String, f64, CMatrix)> = None;
    for phi_quarter in 0..4u8 {
        let phi = f64::from(phi_quarter) * std::f64::consts::FRAC_PI_2;
        for sign in [1.0f64, -1.0] {
            let w = mode2_phase(phi, cfg)? * beam_splitter(sign * theta_star, cfg)?;
            let name = format!("phase(pi*{}/2) after bs({:+.4})", phi_quarter, sign * theta_star);
            let r = residual_on(&w, &restricted);
            tried.push(CandidateResidual {
                name: name.clone(),
                residual: r,
            });
            if best.as_ref().map_or(true, |(_, b, _)| r < *b) {
                best = Some((name, r, w));
            }
        }
    }
    let (best_name, best_restricted, w) = best.expect("nonempty candidate list");
    let unrestricted = residual_on(&w, &all);

    let mut block_dev = 0.0f64;
    for ((na, ea), (nb, eb)) in excitation_block_spectra(&h, cfg, m, tol)?
        .iter()
        .zip(excitation_block_spectra(&hd, cfg, m, tol)?.iter())
    {
        debug_assert_eq!(na, nb);
        block_dev = block_dev.max(spectra_deviation(ea, eb)?);
    }

    let pass = best_restricted < tol.unitarity && block_dev < tol.unitarity;
    Ok(SchwingerFrameReport {
        best: best_name,
        best_restricted_residual: best_restricted,
        unrestricted_residual: unrestricted,
        candidates: tried,
        block_spectra_deviation: block_dev,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{total_excitation, BasisLabel, QubitLevel};
    use crate::numerics::{commutator, frobenius};
    use approx::assert_abs_diff_eq;

    fn sym_resonant() -> ModelParams {
        ModelParams::default()
    }

    fn asym() -> ModelParams {
        ModelParams {
            g1: 1e-3,
            g2: 5e-4,
            ..ModelParams::default()
        }
    }

    fn detuned() -> ModelParams {
        ModelParams {
            omega2: 1.001,
            ..ModelParams::default()
        }
    }

    #[test]
    fn derive_symmetric_and_detuned() {
        let d = derive(&sym_resonant()).unwrap();
        assert_eq!(d.gamma, 0.0);
        assert_eq!(d.omega_d1, 0.0);
        assert_eq!(d.omega_d2, 0.0);
        assert_eq!(d.eps_minus, 0.0);
        assert_abs_diff_eq!(d.gamma_plus, 1e-3 / std::f64::consts::SQRT_2, epsilon = 1e-18);
        assert_eq!(d.gamma_minus, 0.0);
        assert_abs_diff_eq!(d.g_eff(), 1e-3, epsilon = 1e-18);

        let d = derive(&detuned()).unwrap();
        assert_abs_diff_eq!(d.delta2, -1e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gamma, 5e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(d.omega_d1, -5e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(d.omega_d2, -5e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eps_plus, -5e-4, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eps_minus, 5e-4, epsilon = 1e-15);

        // sum rule
        for p in [sym_resonant(), asym(), detuned()] {
            let d = derive(&p).unwrap();
            assert_abs_diff_eq!(d.omega_d1 + d.omega_d2, d.delta1 + d.delta2, epsilon = 1e-15);
        }
    }

    #[test]
    fn derive_rejects_bad_params() {
        let mut p = sym_resonant();
        p.g1 = 0.0;
        p.g2 = 0.0;
        assert!(derive(&p).is_err());
        p = sym_resonant();
        p.omega1 = -1.0;
        assert!(derive(&p).is_err());
    }

    #[test]
    fn ccqrm_ground_element_and_n_nonconservation() {
        let cfg = SpaceConfig::with_qubit(3, 3).unwrap();
        let p = sym_resonant();
        let h = build_ccqrm(&p, &cfg).unwrap();
        assert!(frobenius(&(&h - h.adjoint())) < 1e-14);

        let g00 = cfg
            .basis_state(BasisLabel { n1: 0, n2: 0, q: Some(QubitLevel::G) })
            .unwrap();
        let diag = crate::fock::expectation(&h, &g00);
        assert_abs_diff_eq!(diag.re, -0.5, epsilon = 1e-14);

        let n = total_excitation(&cfg).unwrap();
        assert!(frobenius(&commutator(&h, &n).unwrap()) > 1e-4);

        let mut free = p;
        free.g1 = 0.0;
        free.g2 = 1e-12; // validation needs one nonzero coupling
        let hf = build_ccqrm(&free, &cfg).unwrap();
        // essentially diagonal free Hamiltonian
        let mut offdiag = hf.clone();
        offdiag.fill_diagonal(c64(0.0, 0.0));
        assert!(frobenius(&offdiag) < 1e-11);
    }

    #[test]
    fn ccjc_conserves_n_exactly_and_matrix_element() {
        let cfg = SpaceConfig::with_qubit(4, 4).unwrap();
        for p in [sym_resonant(), asym(), detuned()] {
            let h = build_ccjc(&p, &cfg).unwrap();
            assert!(frobenius(&(&h - h.adjoint())) == 0.0);
            let n = total_excitation(&cfg).unwrap();
            // coupling only connects equal-excitation labels, so the
            // commutator vanishes identically, not just approximately
            assert!(frobenius(&commutator(&h, &n).unwrap()) == 0.0);
        }

        let p = sym_resonant();
        let h = build_ccjc(&p, &cfg).unwrap();
        let e00 = cfg
            .basis_state(BasisLabel { n1: 0, n2: 0, q: Some(QubitLevel::E) })
            .unwrap();
        let g10 = cfg
            .basis_state(BasisLabel { n1: 1, n2: 0, q: Some(QubitLevel::G) })
            .unwrap();
        let elem = e00.dotc(&(&h * &g10));
        assert_abs_diff_eq!(elem.re, p.g1, epsilon = 1e-15);
        assert_abs_diff_eq!(elem.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ccjc_single_excitation_spectrum() {
        // 3-dim single-excitation block at resonance with equal couplings:
        // eigenvalues {0, ±√2 g}
        let cfg = SpaceConfig::with_qubit(2, 2).unwrap();
        let p = sym_resonant();
        let h = build_ccjc(&p, &cfg).unwrap();
        let idx = excitation_block_indices(&cfg, 1).unwrap();
        assert_eq!(idx.len(), 3);
        let block = submatrix(&h, &idx);
        let eigs = spectrum(&block, &Tolerances::default()).unwrap();
        let s = std::f64::consts::SQRT_2 * 1e-3;
        assert_abs_diff_eq!(eigs[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(eigs[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eigs[2], s, epsilon = 1e-15);
    }

    #[test]
    fn schwinger_decouples_mode2_when_gamma_zero() {
        let cfg = SpaceConfig::with_qubit(3, 3).unwrap();
        let p = sym_resonant(); // ω₁=ω₂ → γ=0
        let h = build_schwinger(&p, &cfg).unwrap();
        for i in 0..cfg.dim() {
            for j in 0..cfg.dim() {
                let (li, lj) = (cfg.label(i).unwrap(), cfg.label(j).unwrap());
                if li.n2 != lj.n2 {
                    assert!(h[(i, j)].norm() == 0.0);
                }
            }
        }
    }

    #[test]
    fn fg_blocks_conserve_their_excitation() {
        let cfg = SpaceConfig::two_mode(4, 4).unwrap();
        for p in [sym_resonant(), asym(), detuned()] {
            let (hp, hm) = fg_blocks(&p, &cfg).unwrap();
            for (h, sign_plus) in [(&hp, true), (&hm, false)] {
                assert!(crate::numerics::hermiticity_residual(h) == 0.0);
                let n = fg_block_excitation(sign_plus, &cfg).unwrap();
                assert!(frobenius(&commutator(h, &n).unwrap()) == 0.0);
            }
        }

        // H₊|0,0⟩ lives on single-photon states with weight g_j: the
        // projector 1-Π₁₂ kills creation on even-parity states, so only the
        // a_j(1+Π₁₂) part could act, and it annihilates the vacuum; the
        // creation part a_j†(1-Π₁₂)|0,0⟩ = 0 too. Net: H₊|0,0⟩ = 0 at
        // resonance.
        let p = sym_resonant();
        let (hp, _) = fg_blocks(&p, &cfg).unwrap();
        let vac = cfg
            .basis_state(BasisLabel { n1: 0, n2: 0, q: None })
            .unwrap();
        assert!((hp * vac).norm() == 0.0);
    }

    #[test]
    fn fg_transform_finds_block_diagonalization() {
        let cfg = SpaceConfig::with_qubit(4, 4).unwrap();
        let tol = Tolerances::default();
        for p in [sym_resonant(), asym(), detuned()] {
            let report = fg_transform_check(&p, &cfg, &tol).unwrap();
            assert!(report.pass, "{report:?}");
            assert_eq!(report.best, "flip alone");
            assert!(report.best_offblock_residual < 1e-12);
            assert!(report.block_e_vs_plus < 1e-14);
            assert!(report.block_g_vs_minus < 1e-14);
            assert!(report.spectral_deviation < 1e-12);
            assert!(report.unitarity_residual < 1e-12);
        }
    }

    #[test]
    fn fg_unitary_is_hermitian_involution() {
        let cfg = SpaceConfig::with_qubit(3, 2).unwrap();
        let u = fg_unitary(&cfg).unwrap();
        assert!(frobenius(&(&u - u.adjoint())) == 0.0);
        assert!(frobenius(&(&u * &u - identity(&cfg))) == 0.0);
    }

    #[test]
    fn schwinger_map_and_block_spectra() {
        let cfg = SpaceConfig::with_qubit(6, 6).unwrap();
        let tol = Tolerances::default();
        for p in [sym_resonant(), asym(), detuned()] {
            let report = schwinger_map_check(&p, &cfg, &tol).unwrap();
            assert!(report.pass, "{report:?}");
            assert!(report.best_restricted_residual < 1e-14, "{report:?}");
            assert!(report.block_spectra_deviation < 1e-12);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = ModelParams> {
            (0.5..2.0f64, 0.5..2.0f64, 1e-4..1e-2f64, 0.0..1e-2f64).prop_map(
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
            fn builders_hermitian_and_sum_rule(p in params()) {
                let cfg = SpaceConfig::with_qubit(3, 3).unwrap();
                for h in [
                    build_ccqrm(&p, &cfg).unwrap(),
                    build_ccjc(&p, &cfg).unwrap(),
                    build_schwinger(&p, &cfg).unwrap(),
                ] {
                    prop_assert!(frobenius(&(&h - h.adjoint())) < 1e-14 * frobenius(&h).max(1.0));
                }
                let d = derive(&p).unwrap();
                prop_assert!((d.omega_d1 + d.omega_d2 - (d.delta1 + d.delta2)).abs() < 1e-12);
                prop_assert!((d.g - (p.g1.hypot(p.g2))).abs() < 1e-15);
            }

            #[test]
            fn fg_direct_sum_isospectral(p in params()) {
                let cfg = SpaceConfig::with_qubit(3, 3).unwrap();
                let tol = Tolerances::default();
                let h = build_ccjc(&p, &cfg).unwrap();
                let two_mode = SpaceConfig::two_mode(3, 3).unwrap();
                let (hp, hm) = fg_blocks(&p, &two_mode).unwrap();
                let mut eigs = spectrum(&hp, &tol).unwrap();
                eigs.extend(spectrum(&hm, &tol).unwrap());
                let dev = spectra_deviation(&spectrum(&h, &tol).unwrap(), &eigs).unwrap();
                prop_assert!(dev < 1e-12);
            }
        }
    }
}
