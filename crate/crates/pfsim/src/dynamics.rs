//! Time evolution and collapse-revival analysis.
//!
//! Propagation is spectral throughout: one Hermitian eigendecomposition per
//! run, then exact phases per time point. All tracked observables are
//! diagonal in the working basis, so a trajectory costs one matrix-vector
//! product per sample.

use serde::Serialize;

use crate::fock::{expectation_diag, QubitLevel, SpaceConfig};
use crate::numerics::{c64, eigh, CMatrix, CVector, EigenDecomposition};
use crate::parafermi::PfSubspace;
use crate::{PfError, Result, Tolerances};

/// Uniform sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() {
            return Err(PfError::InvalidArgument("non-finite time bound".into()));
        }
        if t_end <= t_start {
            return Err(PfError::InvalidArgument(format!(
                "time grid end {t_end} not after start {t_start}"
            )));
        }
        if n_points < 2 {
            return Err(PfError::InvalidArgument(
                "time grid needs at least two points".into(),
            ));
        }
        Ok(TimeGrid { t_start, t_end, n_points })
    }

    pub fn from_zero(t_end: f64, n_points: usize) -> Result<Self> {
        TimeGrid::new(0.0, t_end, n_points)
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.n_points)
            .map(|i| self.t_start + dt * i as f64)
            .collect()
    }
}

/// Sampled expectation values along an evolution. `i3` is the mode
/// imbalance n₁-n₂ and `sigma_z` the qubit inversion; in the subspace basis
/// these are the weight and the reflection pattern of the embedding.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    pub i3: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub norm: Vec<f64>,
    #[serde(skip)]
    pub snapshots: Option<Vec<CVector>>,
}

struct DiagSet<'a> {
    n1: &'a [f64],
    n2: &'a [f64],
    i3: &'a [f64],
    sigma_z: &'a [f64],
}

fn evolve_spectral(
    eig: &EigenDecomposition,
    psi0: &CVector,
    grid: &TimeGrid,
    diags: &DiagSet,
    tol: &Tolerances,
    keep_snapshots: bool,
) -> Result<Trajectory> {
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(PfError::InvalidArgument(format!(
            "initial state norm {} is not 1",
            psi0.norm()
        )));
    }
    let times = grid.times();
    let coeffs = eig.eigenvectors.adjoint() * psi0;
    let dim = psi0.len();

    let mut traj = Trajectory {
        times: times.clone(),
        n1: Vec::with_capacity(times.len()),
        n2: Vec::with_capacity(times.len()),
        i3: Vec::with_capacity(times.len()),
        sigma_z: Vec::with_capacity(times.len()),
        norm: Vec::with_capacity(times.len()),
        snapshots: keep_snapshots.then(|| Vec::with_capacity(times.len())),
    };

    let mut phased = CVector::zeros(dim);
    for &t in &times {
        let dt = t - grid.t_start;
        for k in 0..dim {
            phased[k] = coeffs[k] * c64(0.0, -eig.eigenvalues[k] * dt).exp();
        }
        let psi = &eig.eigenvectors * &phased;
        let norm = psi.norm();
        if (norm - 1.0).abs() > tol.conservation {
            return Err(PfError::Contract(format!(
                "norm drifted to {norm} at t = {t}, beyond {}",
                tol.conservation
            )));
        }
        traj.n1.push(expectation_diag(diags.n1, &psi));
        traj.n2.push(expectation_diag(diags.n2, &psi));
        traj.i3.push(expectation_diag(diags.i3, &psi));
        traj.sigma_z.push(expectation_diag(diags.sigma_z, &psi));
        traj.norm.push(norm);
        if let Some(snaps) = traj.snapshots.as_mut() {
            snaps.push(psi);
        }
    }
    Ok(traj)
}

/// Evolve a subspace vector under the restricted Hamiltonian, reporting the
/// lab observables reconstructed through the Fock embedding.
pub fn evolve_subspace(
    s: &PfSubspace,
    psi0: &CVector,
    grid: &TimeGrid,
    tol: &Tolerances,
    keep_snapshots: bool,
) -> Result<Trajectory> {
    if psi0.len() != s.dim {
        return Err(PfError::Shape(format!(
            "initial state of length {} for subspace dim {}",
            psi0.len(),
            s.dim
        )));
    }
    let eig = eigh(&s.h_lambda, tol.unitarity)?;
    let (n1, n2, i3, sz) = s.observable_diags();
    evolve_spectral(
        &eig,
        psi0,
        grid,
        &DiagSet { n1: &n1, n2: &n2, i3: &i3, sigma_z: &sz },
        tol,
        keep_snapshots,
    )
}

/// Evolve a full-space state (two modes plus qubit) under the given
/// Hamiltonian.
pub fn evolve_full(
    h: &CMatrix,
    psi0: &CVector,
    grid: &TimeGrid,
    cfg: &SpaceConfig,
    tol: &Tolerances,
    keep_snapshots: bool,
) -> Result<Trajectory> {
    cfg.require_qubit()?;
    if h.nrows() != cfg.dim() || psi0.len() != cfg.dim() {
        return Err(PfError::Shape(format!(
            "operator {}x{} or state {} does not match space dim {}",
            h.nrows(),
            h.ncols(),
            psi0.len(),
            cfg.dim()
        )));
    }
    let n1 = crate::fock::diagonal_observable(cfg, |l| l.n1 as f64)?;
    let n2 = crate::fock::diagonal_observable(cfg, |l| l.n2 as f64)?;
    let i3 = crate::fock::diagonal_observable(cfg, |l| l.n1 as f64 - l.n2 as f64)?;
    let sz = crate::fock::diagonal_observable(cfg, |l| match l.q {
        Some(QubitLevel::E) => 1.0,
        _ => -1.0,
    })?;
    let eig = eigh(h, tol.unitarity)?;
    evolve_spectral(
        &eig,
        psi0,
        grid,
        &DiagSet { n1: &n1, n2: &n2, i3: &i3, sigma_z: &sz },
        tol,
        keep_snapshots,
    )
}

fn binom(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0_f64, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Closed-form state at time t for evolution from the lowest weight under
/// the homogeneous resonant subspace Hamiltonian, in the subspace basis
/// (index m+λ). Two finite sums over Rabi frequencies √(2(λ-k))·g_eff; the
/// result must come out normalized, and a deviation beyond 1e-6 is treated
/// as a transcription failure rather than roundoff.
pub fn closed_form_psi(lambda: u32, g_eff: f64, t: f64) -> Result<CVector> {
    if !g_eff.is_finite() || g_eff <= 0.0 {
        return Err(PfError::InvalidArgument(format!(
            "effective coupling {g_eff} must be positive"
        )));
    }
    if !t.is_finite() {
        return Err(PfError::InvalidArgument("non-finite time".into()));
    }
    let lam = lambda;
    let dim = 2 * lam as usize + 1;
    let mut amp = CVector::zeros(dim);
    let scale = 0.5f64.powi(lam as i32);

    // odd part, weight μ = λ-1-2(p+q), Rabi phase sin
    for k in 0..=lam {
        for p in 0..lam.saturating_sub(k) {
            for q in 0..=k {
                let c = (if q % 2 == 0 { 1.0 } else { -1.0 })
                    * scale
                    * binom(lam - k - 1, p)
                    * binom(k, q)
                    * (binom(lam, k) * binom(lam - 1, k) / binom(lam - 1, p + q)).sqrt();
                let mu = lam as i32 - 1 - 2 * (p + q) as i32;
                let idx = (lam as i32 - mu) as usize;
                let phase = g_eff * t * (2.0 * f64::from(lam - k)).sqrt();
                amp[idx] += c64(0.0, -c * std::f64::consts::SQRT_2) * c64(phase.sin(), 0.0);
            }
        }
    }
    // even part, weight μ = λ-2(r+s), Rabi phase cos
    for k in 0..=lam {
        for r in 0..=(lam - k) {
            for s in 0..=k {
                let c = (if s % 2 == 0 { 1.0 } else { -1.0 })
                    * scale
                    * binom(lam, k)
                    * binom(lam - k, r)
                    * binom(k, s)
                    / binom(lam, r + s).sqrt();
                let mu = lam as i32 - 2 * (r + s) as i32;
                let idx = (lam as i32 - mu) as usize;
                let phase = g_eff * t * (2.0 * f64::from(lam - k)).sqrt();
                amp[idx] += c64(c * phase.cos(), 0.0);
            }
        }
    }

    let norm = amp.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(PfError::Contract(format!(
            "closed-form norm {norm} at size {lambda}, t = {t}: coefficient transcription broken"
        )));
    }
    Ok(amp)
}

/// Calibration of the closed form's effective coupling against direct
/// propagation at size 1.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    /// Coupling minimizing the mean infidelity.
    pub g_eff: f64,
    /// Mean infidelity at the optimum.
    pub objective: f64,
    /// The frozen convention (g1+g2)/2 it is compared against.
    pub reference: f64,
    pub relative_offset: f64,
}

/// Golden-section search for the effective coupling that best matches the
/// closed form to direct subspace propagation at size 1, over one revival
/// period.
pub fn calibrate_g_eff(p: &crate::models::ModelParams, tol: &Tolerances) -> Result<CalibrationReport> {
    let s = crate::parafermi::build_subspace(1, p)?;
    let reference = s.derived.g_eff();
    let eig = eigh(&s.h_lambda, tol.unitarity)?;
    let psi0 = s.lowest();
    let coeffs = eig.eigenvectors.adjoint() * &psi0;
    let times: Vec<f64> = (0..50)
        .map(|i| 2.0 * std::f64::consts::PI / reference * i as f64 / 49.0)
        .collect();
    let mut propagated = Vec::with_capacity(times.len());
    for &t in &times {
        let mut phased = coeffs.clone();
        for k in 0..phased.len() {
            phased[k] *= c64(0.0, -eig.eigenvalues[k] * t).exp();
        }
        propagated.push(&eig.eigenvectors * phased);
    }

    let objective = |g: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (i, &t) in times.iter().enumerate() {
            let cf = closed_form_psi(1, g, t)?;
            let fid = cf.dotc(&propagated[i]).norm();
            acc += 1.0 - fid;
        }
        Ok(acc / times.len() as f64)
    };

    // golden-section on [reference/2, 2·reference]
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.5 * reference, 2.0 * reference);
    let (mut c, mut d) = (b - gr * (b - a), a + gr * (b - a));
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = objective(d)?;
        }
    }
    let g_best = 0.5 * (a + b);
    let best = objective(g_best)?;
    Ok(CalibrationReport {
        g_eff: g_best,
        objective: best,
        reference,
        relative_offset: (g_best - reference) / reference,
    })
}

/// Sliding-window RMS of a signal with its global mean removed. The window
/// is given in time units; half-width is rounded to samples and clamped at
/// the edges, so the curve has the same length as the input.
pub fn rms_curve(values: &[f64], dt: f64, window: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(PfError::InvalidArgument("empty signal".into()));
    }
    if !(dt > 0.0) || !(window > 0.0) {
        return Err(PfError::InvalidArgument(
            "window and sample spacing must be positive".into(),
        ));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut prefix_sq = vec![0.0f64; n + 1];
    for (i, v) in values.iter().enumerate() {
        let d = v - mean;
        prefix_sq[i + 1] = prefix_sq[i] + d * d;
    }
    let half = ((window / (2.0 * dt)).round() as usize).max(1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let count = (hi - lo + 1) as f64;
        out.push(((prefix_sq[hi + 1] - prefix_sq[lo]) / count).sqrt());
    }
    Ok(out)
}

/// Default analysis window: ten bare Rabi periods π/(g_eff√(2λ)).
pub fn default_rms_window(lambda: u32, g_eff: f64) -> f64 {
    10.0 * std::f64::consts::PI / (g_eff * (2.0 * f64::from(lambda.max(1))).sqrt())
}

pub const COLLAPSE_FRAC: f64 = 0.2;
pub const REVIVAL_FRAC: f64 = 0.4;

/// Collapse and revival landmarks of an inversion signal, located on the
/// windowed RMS envelope. A collapse is the first drop below
/// [`COLLAPSE_FRAC`] of the initial envelope; the revival is the peak of
/// the first contiguous recovery above [`REVIVAL_FRAC`] after the collapse.
/// The unconditional envelope minimum and the strongest peak after it are
/// always reported, so signals that never fully collapse still yield a
/// best-effort recovery time with `confident` unset.
#[derive(Debug, Clone, Serialize)]
pub struct RevivalReport {
    pub window: f64,
    pub r_init: f64,
    pub collapse_time: Option<f64>,
    pub collapse_rms: Option<f64>,
    pub revival_time: Option<f64>,
    pub revival_rms: Option<f64>,
    pub min_time: f64,
    pub min_rms: f64,
    pub recovery_time: f64,
    pub recovery_rms: f64,
    pub confident: bool,
}

pub fn revival_detect(traj: &Trajectory, window: f64) -> Result<RevivalReport> {
    if traj.times.len() < 4 {
        return Err(PfError::InvalidArgument(
            "trajectory too short for envelope analysis".into(),
        ));
    }
    let dt = traj.times[1] - traj.times[0];
    let r = rms_curve(&traj.sigma_z, dt, window)?;
    let r0 = r[0];

    // flat signal: nothing oscillates, nothing collapses
    if r0 < 1e-12 {
        return Ok(RevivalReport {
            window,
            r_init: r0,
            collapse_time: None,
            collapse_rms: None,
            revival_time: None,
            revival_rms: None,
            min_time: traj.times[0],
            min_rms: r0,
            recovery_time: traj.times[0],
            recovery_rms: r0,
            confident: false,
        });
    }

    let collapse_idx = r.iter().position(|&v| v < COLLAPSE_FRAC * r0);

    let mut revival_idx: Option<usize> = None;
    if let Some(ci) = collapse_idx {
        let mut i = ci;
        while i < r.len() && r[i] < REVIVAL_FRAC * r0 {
            i += 1;
        }
        if i < r.len() {
            // peak of the first contiguous hill above threshold
            let mut best = i;
            while i < r.len() && r[i] >= REVIVAL_FRAC * r0 {
                if r[i] > r[best] {
                    best = i;
                }
                i += 1;
            }
            revival_idx = Some(best);
        }
    }

    let min_idx = (0..r.len())
        .min_by(|&a, &b| r[a].total_cmp(&r[b]))
        .expect("nonempty");
    let rec_idx = (min_idx..r.len())
        .max_by(|&a, &b| r[a].total_cmp(&r[b]))
        .expect("nonempty");

    Ok(RevivalReport {
        window,
        r_init: r0,
        collapse_time: collapse_idx.map(|i| traj.times[i]),
        collapse_rms: collapse_idx.map(|i| r[i]),
        revival_time: revival_idx.map(|i| traj.times[i]),
        revival_rms: revival_idx.map(|i| r[i]),
        min_time: traj.times[min_idx],
        min_rms: r[min_idx],
        recovery_time: traj.times[rec_idx],
        recovery_rms: r[rec_idx],
        confident: collapse_idx.is_some() && revival_idx.is_some(),
    })
}
