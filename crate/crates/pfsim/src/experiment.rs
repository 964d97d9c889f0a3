//! Experiment configuration, presets, output writers, and the high-level
//! verification and revival runs the CLI is built on.
//!
//! Configuration is a flat key-value text format: one `key = value` per
//! line, `#` starts a comment. Every run resolves to explicit parameters
//! before anything is built, and the resolved values are echoed into the
//! output so a result file is self-describing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::{
    calibrate_g_eff, closed_form_psi, default_rms_window, evolve_full, evolve_subspace,
    revival_detect, CalibrationReport, RevivalReport, TimeGrid, Trajectory,
};
use crate::fock::{BasisLabel, QubitLevel, SpaceConfig};
use crate::models::{
    build_ccjc, build_ccqrm, build_schwinger, derive, fg_transform_check, schwinger_map_check,
    FgCompositionReport, ModelParams, SchwingerFrameReport,
};
use crate::numerics::{c64, eigh};
use crate::parafermi::{binomial_state, build_subspace, AlgebraReport};
use crate::{PfError, Result, Tolerances};

/// Which Hamiltonian a simulation propagates under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    /// Full two-cavity model with counter-rotating terms.
    Ccqrm,
    /// Rotating-wave model.
    Ccjc,
    /// Beam-splitter frame of the rotating-wave model.
    Schwinger,
    /// The (2λ+1)-dimensional restriction.
    Subspace,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ccqrm => "ccqrm",
            Model::Ccjc => "ccjc",
            Model::Schwinger => "schwinger",
            Model::Subspace => "subspace",
        }
    }
}

impl FromStr for Model {
    type Err = PfError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ccqrm" => Ok(Model::Ccqrm),
            "ccjc" => Ok(Model::Ccjc),
            "schwinger" => Ok(Model::Schwinger),
            "subspace" => Ok(Model::Subspace),
            other => Err(PfError::InvalidConfig(format!(
                "unknown model '{other}' (ccqrm, ccjc, schwinger, subspace)"
            ))),
        }
    }
}

/// A mode occupation in an initial-state spec: either a literal count or
/// the token `lambda`, resolved against the configured size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Count {
    Fixed(usize),
    Lambda,
}

impl Count {
    fn resolve(self, lambda: u32) -> usize {
        match self {
            Count::Fixed(n) => n,
            Count::Lambda => lambda as usize,
        }
    }
}

impl FromStr for Count {
    type Err = PfError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "lambda" || s == "λ" {
            return Ok(Count::Lambda);
        }
        s.parse::<usize>()
            .map(Count::Fixed)
            .map_err(|_| PfError::InvalidConfig(format!("bad occupation '{s}'")))
    }
}

/// Initial state of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialState {
    /// Lowest weight |λ;-λ⟩ of the hosted subspace (embedded in the lab
    /// space for full models).
    PfLowest,
    /// Bare product state |n1, n2⟩ ⊗ |qubit⟩.
    Fock { q: QubitLevel, n1: Count, n2: Count },
    /// Two-mode binomial profile of size λ with the qubit in ground.
    Binomial { eta: f64 },
}

impl InitialState {
    pub fn spec_string(&self) -> String {
        match self {
            InitialState::PfLowest => "pf_lowest".into(),
            InitialState::Fock { q, n1, n2 } => {
                let render = |c: &Count| match c {
                    Count::Fixed(n) => n.to_string(),
                    Count::Lambda => "lambda".into(),
                };
                let qs = match q {
                    QubitLevel::G => "g",
                    QubitLevel::E => "e",
                };
                format!("fock:{qs},{},{}", render(n1), render(n2))
            }
            InitialState::Binomial { eta } => format!("binomial:{eta}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = PfError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "pf_lowest" {
            return Ok(InitialState::PfLowest);
        }
        if let Some(rest) = s.strip_prefix("fock:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(PfError::InvalidConfig(format!(
                    "fock state '{s}' needs qubit,n1,n2"
                )));
            }
            let q = match parts[0] {
                "g" => QubitLevel::G,
                "e" => QubitLevel::E,
                other => {
                    return Err(PfError::InvalidConfig(format!(
                        "bad qubit level '{other}' (g or e)"
                    )))
                }
            };
            return Ok(InitialState::Fock {
                q,
                n1: parts[1].parse()?,
                n2: parts[2].parse()?,
            });
        }
        if let Some(rest) = s.strip_prefix("binomial:") {
            let eta: f64 = rest
                .trim()
                .parse()
                .map_err(|_| PfError::InvalidConfig(format!("bad binomial weight '{rest}'")))?;
            if !(0.0..=1.0).contains(&eta) {
                return Err(PfError::InvalidConfig(format!(
                    "binomial weight {eta} outside [0, 1]"
                )));
            }
            return Ok(InitialState::Binomial { eta });
        }
        Err(PfError::InvalidConfig(format!(
            "unknown initial state '{s}' (pf_lowest, fock:q,n1,n2, binomial:eta)"
        )))
    }
}

/// Flat experiment configuration. Every field has a default; a config file
/// or repeated `--set key=value` overrides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub lambda: u32,
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub g1: f64,
    pub g2: f64,
    pub initial_state: InitialState,
    pub t_start: f64,
    /// End of the time grid; if unset, one default revival period
    /// 2π√λ/g_eff.
    pub t_end: Option<f64>,
    pub n_points: usize,
    /// Fock truncation per mode for full-space models; if unset, chosen
    /// from the model and initial state.
    pub n_max: Option<usize>,
    pub tol_algebra: f64,
    pub tol_unitarity: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        let p = ModelParams::default();
        ExperimentConfig {
            model: Model::Subspace,
            lambda: 1,
            omega0: p.omega0,
            omega1: p.omega1,
            omega2: p.omega2,
            g1: p.g1,
            g2: p.g2,
            initial_state: InitialState::PfLowest,
            t_start: 0.0,
            t_end: None,
            n_points: 4000,
            n_max: None,
            tol_algebra: tol.algebra,
            tol_unitarity: tol.unitarity,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| PfError::InvalidConfig(format!("bad value '{value}' for key '{key}'")))
}

impl ExperimentConfig {
    /// Apply one `key = value` assignment.
    pub fn apply_set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        match key {
            "model" => self.model = value.parse()?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "omega0" => self.omega0 = parse_num(key, value)?,
            "omega1" => self.omega1 = parse_num(key, value)?,
            "omega2" => self.omega2 = parse_num(key, value)?,
            "g1" => self.g1 = parse_num(key, value)?,
            "g2" => self.g2 = parse_num(key, value)?,
            "initial_state" => self.initial_state = value.parse()?,
            "t_start" => self.t_start = parse_num(key, value)?,
            "t_end" => self.t_end = Some(parse_num(key, value)?),
            "n_points" => self.n_points = parse_num(key, value)?,
            "n_max" => self.n_max = Some(parse_num(key, value)?),
            "tol_algebra" => self.tol_algebra = parse_num(key, value)?,
            "tol_unitarity" => self.tol_unitarity = parse_num(key, value)?,
            other => {
                return Err(PfError::InvalidConfig(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Parse the flat text format: `key = value` lines, `#` comments.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.merge_kv(text)?;
        Ok(cfg)
    }

    /// Apply assignments from config text on top of the current values.
    pub fn merge_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PfError::InvalidConfig(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            self.apply_set(key, value)?;
        }
        Ok(())
    }

    /// Render as config text, one sorted key per line.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.echo_map() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Sorted key-value view of the effective configuration, used for the
    /// output echo and the config dump.
    pub fn echo_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("model".into(), self.model.name().into());
        m.insert("lambda".into(), self.lambda.to_string());
        m.insert("omega0".into(), format!("{:.16e}", self.omega0));
        m.insert("omega1".into(), format!("{:.16e}", self.omega1));
        m.insert("omega2".into(), format!("{:.16e}", self.omega2));
        m.insert("g1".into(), format!("{:.16e}", self.g1));
        m.insert("g2".into(), format!("{:.16e}", self.g2));
        m.insert("initial_state".into(), self.initial_state.spec_string());
        m.insert("t_start".into(), format!("{:.16e}", self.t_start));
        if let Some(te) = self.t_end {
            m.insert("t_end".into(), format!("{te:.16e}"));
        }
        m.insert("n_points".into(), self.n_points.to_string());
        if let Some(nm) = self.n_max {
            m.insert("n_max".into(), nm.to_string());
        }
        m.insert("tol_algebra".into(), format!("{:.16e}", self.tol_algebra));
        m.insert("tol_unitarity".into(), format!("{:.16e}", self.tol_unitarity));
        m
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            omega0: self.omega0,
            omega1: self.omega1,
            omega2: self.omega2,
            g1: self.g1,
            g2: self.g2,
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            algebra: self.tol_algebra,
            unitarity: self.tol_unitarity,
            ..Tolerances::default()
        }
    }

    /// Default grid end: one predicted revival period.
    pub fn default_t_end(&self) -> Result<f64> {
        let d = derive(&self.model_params())?;
        Ok(2.0 * std::f64::consts::PI * f64::from(self.lambda.max(1)).sqrt() / d.g_eff())
    }

    /// Effective truncation for full-space models. Excitation-conserving
    /// models only need the shell the initial state lives in; the
    /// counter-rotating model gets fixed headroom above the size.
    pub fn effective_n_max(&self) -> usize {
        if let Some(n) = self.n_max {
            return n;
        }
        let shell = match self.initial_state {
            InitialState::PfLowest | InitialState::Binomial { .. } => self.lambda as usize,
            InitialState::Fock { n1, n2, q } => {
                n1.resolve(self.lambda)
                    + n2.resolve(self.lambda)
                    + usize::from(q == QubitLevel::E)
            }
        };
        match self.model {
            Model::Ccqrm => shell + 20,
            _ => shell.max(1),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let t_end = match self.t_end {
            Some(t) => t,
            None => self.t_start + self.default_t_end()?,
        };
        TimeGrid::new(self.t_start, t_end, self.n_points)
    }

    pub fn validate(&self) -> Result<()> {
        self.model_params().validate()?;
        if self.model == Model::Subspace && !matches!(self.initial_state, InitialState::PfLowest)
        {
            return Err(PfError::InvalidConfig(format!(
                "subspace runs start from pf_lowest; '{}' needs a full-space model",
                self.initial_state.spec_string()
            )));
        }
        if self.tol_algebra <= 0.0 || self.tol_unitarity <= 0.0 {
            return Err(PfError::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Named preset configurations reproducing the survey scenarios: the
/// symmetric resonant case, the two asymmetric-coupling cases, and the
/// detuned second mode.
pub const PRESET_NAMES: [&str; 4] = ["fig5", "fig6a", "fig6d", "fig7"];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        model: Model::Subspace,
        lambda: 25,
        ..ExperimentConfig::default()
    };
    match name {
        "fig5" => {}
        "fig6a" => {
            cfg.g1 = 1e-3;
            cfg.g2 = 5e-4;
        }
        "fig6d" => {
            cfg.g1 = 5e-4;
            cfg.g2 = 1e-3;
        }
        "fig7" => {
            cfg.omega2 = 1.001;
        }
        other => {
            return Err(PfError::InvalidConfig(format!(
                "unknown preset '{other}' ({})",
                PRESET_NAMES.join(", ")
            )));
        }
    }
    Ok(cfg)
}

/// One finished simulation: the resolved configuration echo plus the
/// sampled trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationOutput {
    pub config: BTreeMap<String, String>,
    pub trajectory: Trajectory,
}

fn subspace_initial(cfg: &ExperimentConfig) -> Result<crate::numerics::CVector> {
    match cfg.initial_state {
        InitialState::PfLowest => {
            let s = build_subspace(cfg.lambda, &cfg.model_params())?;
            Ok(s.lowest())
        }
        _ => Err(PfError::InvalidConfig(
            "subspace runs start from pf_lowest".into(),
        )),
    }
}

fn full_initial(cfg: &ExperimentConfig, space: &SpaceConfig) -> Result<crate::numerics::CVector> {
    match cfg.initial_state {
        InitialState::PfLowest => {
            let s = build_subspace(cfg.lambda, &cfg.model_params())?;
            s.embed_lab(&s.lowest(), space)
        }
        InitialState::Fock { q, n1, n2 } => space.basis_state(BasisLabel {
            n1: n1.resolve(cfg.lambda),
            n2: n2.resolve(cfg.lambda),
            q: Some(q),
        }),
        InitialState::Binomial { eta } => binomial_state(cfg.lambda, eta, space),
    }
}

/// Run one simulation to a trajectory. Excitation-conserving models get a
/// conservation audit on the sampled observables: any drift of
/// n₁+n₂+(σ₃+1)/2 beyond the conservation tolerance is a contract
/// violation, not a warning.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    let tol = cfg.tolerances();
    let grid = cfg.time_grid()?;
    let trajectory = match cfg.model {
        Model::Subspace => {
            let s = build_subspace(cfg.lambda, &cfg.model_params())?;
            evolve_subspace(&s, &subspace_initial(cfg)?, &grid, &tol, false)?
        }
        m => {
            let n_max = cfg.effective_n_max();
            let space = SpaceConfig::with_qubit(n_max, n_max)?;
            let p = cfg.model_params();
            let h = match m {
                Model::Ccqrm => build_ccqrm(&p, &space)?,
                Model::Ccjc => build_ccjc(&p, &space)?,
                Model::Schwinger => build_schwinger(&p, &space)?,
                Model::Subspace => unreachable!(),
            };
            evolve_full(&h, &full_initial(cfg, &space)?, &grid, &space, &tol, false)?
        }
    };

    if matches!(cfg.model, Model::Ccjc | Model::Schwinger | Model::Subspace) {
        let n_of = |i: usize| {
            trajectory.n1[i] + trajectory.n2[i] + 0.5 * (trajectory.sigma_z[i] + 1.0)
        };
        let n0 = n_of(0);
        for i in 0..trajectory.times.len() {
            let drift = (n_of(i) - n0).abs();
            if drift > tol.conservation {
                return Err(PfError::Contract(format!(
                    "total excitation drifted by {drift} at t = {}, beyond {}",
                    trajectory.times[i], tol.conservation
                )));
            }
        }
    }

    Ok(SimulationOutput {
        config: cfg.echo_map(),
        trajectory,
    })
}

/// Output format for trajectory files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = PfError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(PfError::InvalidConfig(format!(
                "unknown format '{other}' (csv, json)"
            ))),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Write a trajectory as CSV: parameter echo in '#' comments (sorted keys),
/// then a header and one row per sample, full double precision, LF line
/// endings, '.' decimal separator.
pub fn write_csv<W: Write>(out: &mut W, sim: &SimulationOutput) -> Result<()> {
    for (k, v) in &sim.config {
        write!(out, "# {k} = {v}\n")?;
    }
    write!(out, "t,n1,n2,I3,sigma_z,norm\n")?;
    let tr = &sim.trajectory;
    for i in 0..tr.times.len() {
        write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            tr.times[i], tr.n1[i], tr.n2[i], tr.i3[i], tr.sigma_z[i], tr.norm[i]
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(out: &mut W, sim: &SimulationOutput) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, sim)
        .map_err(|e| PfError::Io(std::io::Error::other(e)))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_trajectory<W: Write>(
    out: &mut W,
    sim: &SimulationOutput,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, sim),
        OutputFormat::Json => write_json(out, sim),
    }
}

/// What a verification run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerifyScope {
    Algebra,
    Frames,
    ClosedForm,
    All,
}

impl FromStr for VerifyScope {
    type Err = PfError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "algebra" => Ok(VerifyScope::Algebra),
            "frames" => Ok(VerifyScope::Frames),
            "closedform" => Ok(VerifyScope::ClosedForm),
            "all" => Ok(VerifyScope::All),
            other => Err(PfError::InvalidConfig(format!(
                "unknown verify scope '{other}' (algebra, frames, closedform, all)"
            ))),
        }
    }
}

impl VerifyScope {
    fn covers_algebra(self) -> bool {
        matches!(self, VerifyScope::Algebra | VerifyScope::All)
    }
    fn covers_frames(self) -> bool {
        matches!(self, VerifyScope::Frames | VerifyScope::All)
    }
    fn covers_closed_form(self) -> bool {
        matches!(self, VerifyScope::ClosedForm | VerifyScope::All)
    }
}

/// The canonical parameter sets every verification sweep covers.
pub fn canonical_sets() -> Vec<(&'static str, ModelParams)> {
    vec![
        ("symmetric_resonant", ModelParams::default()),
        (
            "asymmetric_coupling",
            ModelParams {
                g1: 1e-3,
                g2: 5e-4,
                ..ModelParams::default()
            },
        ),
        (
            "detuned_mode2",
            ModelParams {
                omega2: 1.001,
                ..ModelParams::default()
            },
        ),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraCase {
    pub set: String,
    pub report: AlgebraReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameCase {
    pub set: String,
    pub block_diagonalization: FgCompositionReport,
    pub frame_map: SchwingerFrameReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormCase {
    pub lambda: u32,
    pub max_infidelity: f64,
    pub max_norm_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSection {
    pub calibration: CalibrationReport,
    pub cases: Vec<ClosedFormCase>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstOffender {
    pub location: String,
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
}

/// Complete verification report, serialized as JSON by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scope: VerifyScope,
    pub lambda_max: u32,
    pub tolerances: Tolerances,
    pub algebra: Option<Vec<AlgebraCase>>,
    pub frames: Option<Vec<FrameCase>>,
    pub closed_form: Option<ClosedFormSection>,
    pub pass: bool,
    pub worst: Option<WorstOffender>,
}

struct WorstTracker {
    best_ratio: f64,
    entry: Option<WorstOffender>,
}

impl WorstTracker {
    fn new() -> Self {
        WorstTracker { best_ratio: -1.0, entry: None }
    }
    fn observe(&mut self, location: &str, quantity: &str, value: f64, tolerance: f64) {
        let ratio = value / tolerance;
        if ratio > self.best_ratio {
            self.best_ratio = ratio;
            self.entry = Some(WorstOffender {
                location: location.into(),
                quantity: quantity.into(),
                value,
                tolerance,
            });
        }
    }
}

/// Run the verification suite: ladder algebra case by case, frame
/// equivalences, and the closed-form solution against direct propagation.
/// The closed form is only defined for homogeneous couplings on resonance,
/// so that section runs on the symmetric set regardless of scope.
pub fn run_verify(scope: VerifyScope, lambda_max: u32, tol: &Tolerances) -> Result<VerificationReport> {
    let mut worst = WorstTracker::new();
    let mut pass = true;

    let algebra = if scope.covers_algebra() {
        let mut cases = Vec::new();
        for (name, p) in canonical_sets() {
            for lambda in 0..=lambda_max {
                let s = build_subspace(lambda, &p)?;
                let rep = s.verify(tol)?;
                pass &= rep.pass;
                let loc = format!("{name}, size {lambda}");
                worst.observe(&loc, "trilinear commutator (order = size)", rep.trilinear_p_lambda, tol.algebra);
                worst.observe(&loc, "weight commutator with raising", rep.comm_i3_iplus, tol.algebra);
                worst.observe(&loc, "weight commutator with lowering", rep.comm_i3_iminus, tol.algebra);
                worst.observe(&loc, "reflection anticommutator (raising)", rep.anticomm_r_iplus, tol.algebra);
                worst.observe(&loc, "reflection anticommutator (lowering)", rep.anticomm_r_iminus, tol.algebra);
                worst.observe(&loc, "adjointness", rep.adjointness, tol.algebra);
                worst.observe(&loc, "ladder structure", rep.ladder_structure, tol.algebra);
                worst.observe(&loc, "inversion vs reflection", rep.sigma_z_vs_r, tol.algebra);
                worst.observe(&loc, "Hamiltonian closed form", rep.h_closed_form, tol.algebra);
                worst.observe(&loc, "projection leakage", rep.projection_leakage, tol.algebra);
                cases.push(AlgebraCase { set: name.into(), report: rep });
            }
        }
        Some(cases)
    } else {
        None
    };

    let frames = if scope.covers_frames() {
        let space = SpaceConfig::with_qubit(6, 6)?;
        let mut cases = Vec::new();
        for (name, p) in canonical_sets() {
            let fg = fg_transform_check(&p, &space, tol)?;
            let sw = schwinger_map_check(&p, &space, tol)?;
            pass &= fg.pass && sw.pass;
            worst.observe(name, "off-block residual", fg.best_offblock_residual, tol.unitarity);
            worst.observe(name, "excited block vs direct", fg.block_e_vs_plus, tol.unitarity);
            worst.observe(name, "ground block vs direct", fg.block_g_vs_minus, tol.unitarity);
            worst.observe(name, "block-sum spectral deviation", fg.spectral_deviation, tol.unitarity);
            worst.observe(name, "frame map entrywise residual", sw.best_restricted_residual, tol.unitarity);
            worst.observe(name, "frame block spectra", sw.block_spectra_deviation, tol.unitarity);
            cases.push(FrameCase {
                set: name.into(),
                block_diagonalization: fg,
                frame_map: sw,
            });
        }
        Some(cases)
    } else {
        None
    };

    let closed_form = if scope.covers_closed_form() {
        let p = ModelParams::default();
        let calibration = calibrate_g_eff(&p, tol)?;
        let mut section_pass = calibration.relative_offset.abs() < 1e-3;
        worst.observe(
            "calibration",
            "relative coupling offset",
            calibration.relative_offset.abs(),
            1e-3,
        );
        let mut cases = Vec::new();
        for lambda in 1..=lambda_max.min(12) {
            let s = build_subspace(lambda, &p)?;
            let g_eff = s.derived.g_eff();
            let eig = eigh(&s.h_lambda, tol.unitarity)?;
            let coeffs = eig.eigenvectors.adjoint() * s.lowest();
            let t_max = 2.0 * std::f64::consts::PI * f64::from(lambda).sqrt() / g_eff;
            let mut max_infid = 0.0f64;
            let mut max_norm_dev = 0.0f64;
            for i in 0..40 {
                let t = t_max * f64::from(i) / 39.0;
                let mut phased = coeffs.clone();
                for k in 0..phased.len() {
                    phased[k] *= c64(0.0, -eig.eigenvalues[k] * t).exp();
                }
                let prop = &eig.eigenvectors * phased;
                let cf = closed_form_psi(lambda, g_eff, t)?;
                max_norm_dev = max_norm_dev.max((cf.norm() - 1.0).abs());
                max_infid = max_infid.max(1.0 - cf.dotc(&prop).norm());
            }
            let case_pass = max_infid < tol.frame && max_norm_dev < 1e-6;
            section_pass &= case_pass;
            let loc = format!("closed form, size {lambda}");
            worst.observe(&loc, "infidelity vs propagation", max_infid, tol.frame);
            worst.observe(&loc, "norm deviation", max_norm_dev, 1e-6);
            cases.push(ClosedFormCase {
                lambda,
                max_infidelity: max_infid,
                max_norm_deviation: max_norm_dev,
                pass: case_pass,
            });
        }
        pass &= section_pass;
        Some(ClosedFormSection {
            calibration,
            cases,
            pass: section_pass,
        })
    } else {
        None
    };

    Ok(VerificationReport {
        scope,
        lambda_max,
        tolerances: *tol,
        algebra,
        frames,
        closed_form,
        pass,
        worst: worst.entry,
    })
}

/// Outcome of a collapse-revival analysis run, pairing the detector output
/// with the analytic predictions.
#[derive(Debug, Clone, Serialize)]
pub struct RevivalOutcome {
    pub config: BTreeMap<String, String>,
    pub lambda: u32,
    pub window: f64,
    /// π√λ/g_eff, the homogeneous-coupling prediction.
    pub predicted_homogeneous: f64,
    /// 2π√λ g₂/g², reducing to the homogeneous value when g₁ = g₂.
    pub predicted_general: f64,
    pub measured: Option<f64>,
    /// Measured against the general prediction.
    pub relative_error: Option<f64>,
    pub report: RevivalReport,
}

/// Simulate a configuration and locate its collapse and revival. A
/// configuration that never collapses is a valid outcome, reported with
/// `confident` unset rather than as an error.
pub fn run_revival(cfg: &ExperimentConfig) -> Result<RevivalOutcome> {
    let sim = run_simulate(cfg)?;
    let d = derive(&cfg.model_params())?;
    let lambda = cfg.lambda;
    let window = default_rms_window(lambda, d.g_eff());
    let report = revival_detect(&sim.trajectory, window)?;
    let sqrt_lam = f64::from(lambda.max(1)).sqrt();
    let predicted_homogeneous = std::f64::consts::PI * sqrt_lam / d.g_eff();
    let predicted_general = 2.0 * std::f64::consts::PI * sqrt_lam * cfg.g2 / (d.g * d.g);
    let measured = report.revival_time;
    let relative_error = measured.map(|m| (m - predicted_general) / predicted_general);
    Ok(RevivalOutcome {
        config: sim.config,
        lambda,
        window,
        predicted_homogeneous,
        predicted_general,
        measured,
        relative_error,
        report,
    })
}

/// One sweep item: a named configuration to simulate and write out.
#[derive(Debug, Clone)]
pub struct SweepItem {
    pub name: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub name: String,
    pub path: PathBuf,
    pub points: usize,
}

/// Run several configurations concurrently, one output file each under
/// `out_dir`. File names are the item names with the format extension.
pub fn run_sweep(items: &[SweepItem], out_dir: &Path, format: OutputFormat) -> Result<Vec<SweepEntry>> {
    if items.is_empty() {
        return Err(PfError::InvalidArgument("empty sweep".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let results: Vec<Result<SweepEntry>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .map(|item| {
                scope.spawn(move || -> Result<SweepEntry> {
                    let sim = run_simulate(&item.config)?;
                    let path = out_dir.join(format!("{}.{}", item.name, format.extension()));
                    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
                    write_trajectory(&mut file, &sim, format)?;
                    file.flush()?;
                    Ok(SweepEntry {
                        name: item.name.clone(),
                        path,
                        points: sim.trajectory.times.len(),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}
