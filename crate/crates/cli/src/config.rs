//! Experiment configuration: a TOML file with flat sections.
//!
//! Frequencies are entered as `ν = ω/2π` in the units named by each key
//! (GHz, MHz, nHz); drive powers are in mW. Every key is checked, and
//! unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use magdimer::bifurcation::StepControl;
use magdimer::steady::{BranchClass, MultistartOptions, NewtonOptions};
use magdimer::{SystemParams, Tunneling};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub branch: BranchConfig,
    #[serde(default)]
    pub phase_diagram: PhaseDiagramConfig,
    #[serde(default)]
    pub quench: QuenchConfig,
    #[serde(default)]
    pub fluct: FluctConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "nu_a_GHz")]
    pub nu_a_ghz: f64,
    #[serde(rename = "nu_m_GHz", default, skip_serializing_if = "Option::is_none")]
    pub nu_m_ghz: Option<f64>,
    #[serde(rename = "nu_d_GHz", default, skip_serializing_if = "Option::is_none")]
    pub nu_d_ghz: Option<f64>,
    #[serde(
        rename = "delta_a_MHz",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub delta_a_mhz: Option<f64>,
    #[serde(
        rename = "delta_m_MHz",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub delta_m_mhz: Option<f64>,
    #[serde(rename = "kappa_a_MHz")]
    pub kappa_a_mhz: f64,
    #[serde(rename = "kappa_m_MHz")]
    pub kappa_m_mhz: f64,
    #[serde(rename = "g_MHz")]
    pub g_mhz: f64,
    #[serde(rename = "K_nHz")]
    pub k_nhz: f64,
    #[serde(
        rename = "J_over_kappa_a",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub j_over_kappa_a: Option<f64>,
    #[serde(rename = "J_MHz", default, skip_serializing_if = "Option::is_none")]
    pub j_mhz: Option<f64>,
    #[serde(rename = "P_d_mW")]
    pub p_d_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub lattice: usize,
    pub phase_offsets: usize,
    pub n_max_factor: f64,
    pub jitter: f64,
    pub seed: u64,
    pub eps_stab_rel: f64,
    pub dedup_rel: f64,
    pub newton_rel_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let m = MultistartOptions::default();
        SolverConfig {
            lattice: m.lattice,
            phase_offsets: m.phase_offsets,
            n_max_factor: m.n_max_factor,
            jitter: m.jitter,
            seed: m.seed,
            eps_stab_rel: m.eps_stab_rel,
            dedup_rel: m.dedup_rel,
            newton_rel_tol: m.newton.rel_tol,
            newton_max_iter: m.newton.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchConfig {
    #[serde(rename = "p_min_mW")]
    pub p_min_mw: f64,
    #[serde(rename = "p_max_mW")]
    pub p_max_mw: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for BranchConfig {
    fn default() -> Self {
        let s = StepControl::default();
        BranchConfig {
            p_min_mw: 1.0,
            p_max_mw: 100.0,
            h_init: s.h_init,
            h_min: s.h_min,
            h_max: s.h_max,
            max_steps: s.max_steps,
            tol: s.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseDiagramConfig {
    #[serde(rename = "p_min_mW")]
    pub p_min_mw: f64,
    #[serde(rename = "p_max_mW")]
    pub p_max_mw: f64,
    pub p_points: usize,
    pub j_min: f64,
    pub j_max: f64,
    pub j_points: usize,
}

impl Default for PhaseDiagramConfig {
    fn default() -> Self {
        PhaseDiagramConfig {
            p_min_mw: 1.0,
            p_max_mw: 100.0,
            p_points: 101,
            j_min: 0.2,
            j_max: 3.0,
            j_points: 41,
        }
    }
}

/// Which symmetric saddle-node the relaxation-time scan approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanFold {
    /// The high-power end of the low branch; quenches start on `SymLow`.
    Upper,
    /// The low-power end of the high branch; quenches start on `SymHigh`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchConfig {
    #[serde(rename = "p_init_mW")]
    pub p_init_mw: f64,
    #[serde(rename = "p_final_mW")]
    pub p_final_mw: f64,
    pub start: String,
    /// Times below are in units of `1/κ_a` (angular).
    pub t_settle: f64,
    pub t_max: f64,
    pub dwell: f64,
    pub record_dt: f64,
    pub eps_rel: f64,
    pub rtol: f64,
    pub scan_fold: ScanFold,
    pub scan_points: usize,
    pub scan_delta_min: f64,
    pub scan_delta_max: f64,
    /// Relative distance of the pre-quench power from the fold.
    pub scan_pre_offset: f64,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        QuenchConfig {
            p_init_mw: 60.0,
            p_final_mw: 61.0,
            start: BranchClass::SymLow.label().to_string(),
            t_settle: 200.0,
            t_max: 1e5,
            dwell: 10.0,
            record_dt: 0.05,
            eps_rel: 1e-4,
            rtol: 1e-9,
            scan_fold: ScanFold::Upper,
            scan_points: 10,
            scan_delta_min: 1e-4,
            scan_delta_max: 1e-1,
            scan_pre_offset: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluctConfig {
    #[serde(rename = "p_min_mW")]
    pub p_min_mw: f64,
    #[serde(rename = "p_max_mW")]
    pub p_max_mw: f64,
    pub p_points: usize,
}

impl Default for FluctConfig {
    fn default() -> Self {
        FluctConfig {
            p_min_mw: 10.0,
            p_max_mw: 60.0,
            p_points: 51,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".to_string(),
        }
    }
}

/// The configuration shipped with the tool: the four-attractor parameter
/// set at 30 mW.
pub const DEFAULT_CONFIG: &str = include_str!("../default.toml");

pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config is always representable as TOML")
}

/// SHA-256 of the canonical serialization, as lowercase hex.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    format!("{:x}", Sha256::digest(serialize_config(cfg).as_bytes()))
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{key}` must be positive, got {v}"
        )))
    }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{key}` must be finite")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{key}` must be at least {min}, got {v}"
        )))
    }
}

fn range(section: &str, lo: f64, hi: f64) -> Result<(), CliError> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "[{section}] range must satisfy min < max, got [{lo}, {hi}]"
        )))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.system;
        positive("system.nu_a_GHz", s.nu_a_ghz)?;
        match (s.nu_d_ghz, s.delta_a_mhz, s.delta_m_mhz) {
            (Some(_), None, None) => {
                if s.nu_m_ghz.is_none() {
                    return Err(CliError::Config(
                        "`system.nu_m_GHz` is required together with `nu_d_GHz`".into(),
                    ));
                }
            }
            (None, Some(_), Some(_)) => {
                if s.nu_m_ghz.is_some() {
                    return Err(CliError::Config(
                        "conflicting magnon frequency: give `nu_m_GHz` or `delta_m_MHz`, not both"
                            .into(),
                    ));
                }
            }
            (Some(_), _, _) => {
                return Err(CliError::Config(
                    "conflicting detuning: give either `nu_d_GHz` or both `delta_a_MHz` and `delta_m_MHz`"
                        .into(),
                ))
            }
            (None, _, _) => {
                return Err(CliError::Config(
                    "missing detuning: give `nu_d_GHz` or both `delta_a_MHz` and `delta_m_MHz`".into(),
                ))
            }
        }
        for (k, v) in [
            ("system.nu_m_GHz", s.nu_m_ghz),
            ("system.nu_d_GHz", s.nu_d_ghz),
            ("system.delta_a_MHz", s.delta_a_mhz),
            ("system.delta_m_MHz", s.delta_m_mhz),
        ] {
            if let Some(v) = v {
                finite(k, v)?;
            }
        }
        positive("system.kappa_a_MHz", s.kappa_a_mhz)?;
        positive("system.kappa_m_MHz", s.kappa_m_mhz)?;
        finite("system.g_MHz", s.g_mhz)?;
        finite("system.K_nHz", s.k_nhz)?;
        finite("system.P_d_mW", s.p_d_mw)?;
        if s.g_mhz < 0.0 {
            return Err(CliError::Config(
                "`system.g_MHz` must be non-negative".into(),
            ));
        }
        if s.p_d_mw < 0.0 {
            return Err(CliError::Config(
                "`system.P_d_mW` must be non-negative".into(),
            ));
        }
        match (s.j_over_kappa_a, s.j_mhz) {
            (Some(j), None) | (None, Some(j)) => {
                if !(j >= 0.0 && j.is_finite()) {
                    return Err(CliError::Config("tunneling must be non-negative".into()));
                }
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "conflicting tunneling: give `J_over_kappa_a` or `J_MHz`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "missing tunneling: give `J_over_kappa_a` or `J_MHz`".into(),
                ))
            }
        }
        self.system_params()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let v = &self.solver;
        at_least("solver.lattice", v.lattice, 1)?;
        at_least("solver.phase_offsets", v.phase_offsets, 1)?;
        at_least("solver.newton_max_iter", v.newton_max_iter, 1)?;
        positive("solver.n_max_factor", v.n_max_factor)?;
        positive("solver.eps_stab_rel", v.eps_stab_rel)?;
        positive("solver.dedup_rel", v.dedup_rel)?;
        positive("solver.newton_rel_tol", v.newton_rel_tol)?;
        if !(v.jitter >= 0.0 && v.jitter.is_finite()) {
            return Err(CliError::Config(
                "`solver.jitter` must be non-negative".into(),
            ));
        }

        let b = &self.branch;
        range("branch", b.p_min_mw, b.p_max_mw)?;
        positive("branch.p_min_mW", b.p_min_mw)?;
        positive("branch.h_init", b.h_init)?;
        positive("branch.h_min", b.h_min)?;
        positive("branch.h_max", b.h_max)?;
        positive("branch.tol", b.tol)?;
        at_least("branch.max_steps", b.max_steps, 1)?;
        if !(b.h_min <= b.h_init && b.h_init <= b.h_max) {
            return Err(CliError::Config(
                "[branch] steps must satisfy h_min <= h_init <= h_max".into(),
            ));
        }

        let p = &self.phase_diagram;
        range("phase_diagram", p.p_min_mw, p.p_max_mw)?;
        range("phase_diagram", p.j_min, p.j_max)?;
        positive("phase_diagram.p_min_mW", p.p_min_mw)?;
        if p.j_min < 0.0 {
            return Err(CliError::Config(
                "`phase_diagram.j_min` must be non-negative".into(),
            ));
        }
        at_least("phase_diagram.p_points", p.p_points, 2)?;
        at_least("phase_diagram.j_points", p.j_points, 2)?;

        let q = &self.quench;
        positive("quench.p_init_mW", q.p_init_mw)?;
        positive("quench.p_final_mW", q.p_final_mw)?;
        self.quench_start()?;
        positive("quench.t_max", q.t_max)?;
        positive("quench.dwell", q.dwell)?;
        positive("quench.record_dt", q.record_dt)?;
        positive("quench.eps_rel", q.eps_rel)?;
        positive("quench.rtol", q.rtol)?;
        positive("quench.scan_delta_min", q.scan_delta_min)?;
        positive("quench.scan_pre_offset", q.scan_pre_offset)?;
        if !(q.t_settle >= 0.0 && q.t_settle.is_finite()) {
            return Err(CliError::Config(
                "`quench.t_settle` must be non-negative".into(),
            ));
        }
        range("quench scan", q.scan_delta_min, q.scan_delta_max)?;
        if q.scan_delta_max >= 1.0 || q.scan_pre_offset >= 1.0 {
            return Err(CliError::Config(
                "[quench] relative offsets must be below 1".into(),
            ));
        }
        at_least("quench.scan_points", q.scan_points, 2)?;

        let f = &self.fluct;
        range("fluct", f.p_min_mw, f.p_max_mw)?;
        positive("fluct.p_min_mW", f.p_min_mw)?;
        at_least("fluct.p_points", f.p_points, 2)?;

        if self.output.dir.is_empty() {
            return Err(CliError::Config("`output.dir` must not be empty".into()));
        }
        Ok(())
    }

    /// Converts the caption units to the Hz/W values of [`SystemParams`].
    ///
    /// Scale-downs divide by exact powers of ten so that decimal inputs map
    /// to the nearest double of the intended value.
    pub fn system_params(&self) -> SystemParams {
        let s = &self.system;
        let nu_a = s.nu_a_ghz * 1e9;
        let (nu_d, nu_m) = match (s.nu_d_ghz, s.delta_a_mhz, s.delta_m_mhz) {
            (Some(nu_d), _, _) => (nu_d * 1e9, s.nu_m_ghz.unwrap_or(f64::NAN) * 1e9),
            (None, Some(da), Some(dm)) => {
                let nu_d = nu_a - da * 1e6;
                (nu_d, nu_d + dm * 1e6)
            }
            _ => (f64::NAN, f64::NAN),
        };
        let j = match (s.j_over_kappa_a, s.j_mhz) {
            (_, Some(hz)) => Tunneling::Absolute(hz * 1e6),
            (Some(r), None) => Tunneling::RelativeToKappaA(r),
            (None, None) => Tunneling::RelativeToKappaA(f64::NAN),
        };
        SystemParams {
            nu_a,
            nu_m,
            nu_d,
            kappa_a: s.kappa_a_mhz * 1e6,
            kappa_m: s.kappa_m_mhz * 1e6,
            g: s.g_mhz * 1e6,
            j,
            k: s.k_nhz / 1e9,
            p_d: s.p_d_mw / 1e3,
        }
    }

    pub fn multistart(&self) -> MultistartOptions {
        let v = &self.solver;
        MultistartOptions {
            lattice: v.lattice,
            phase_offsets: v.phase_offsets,
            n_max_factor: v.n_max_factor,
            jitter: v.jitter,
            seed: v.seed,
            eps_stab_rel: v.eps_stab_rel,
            dedup_rel: v.dedup_rel,
            newton: NewtonOptions {
                rel_tol: v.newton_rel_tol,
                max_iter: v.newton_max_iter,
                ..NewtonOptions::default()
            },
        }
    }

    pub fn step_control(&self) -> StepControl {
        let b = &self.branch;
        StepControl {
            h_init: b.h_init,
            h_min: b.h_min,
            h_max: b.h_max,
            max_steps: b.max_steps,
            tol: b.tol,
            eps_stab_rel: self.solver.eps_stab_rel,
            ..StepControl::default()
        }
    }

    pub fn quench_start(&self) -> Result<BranchClass, CliError> {
        parse_class(&self.quench.start)
            .filter(|c| *c != BranchClass::Other)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "`quench.start` must name a branch class, got `{}`",
                    self.quench.start
                ))
            })
    }

    /// Applies command-line overrides and revalidates.
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(p) = o.p_d_mw {
            self.system.p_d_mw = p;
        }
        if let Some(j) = o.j_over_kappa_a {
            self.system.j_over_kappa_a = Some(j);
            self.system.j_mhz = None;
        }
        if let Some((np, nj)) = o.grid {
            self.phase_diagram.p_points = np;
            self.phase_diagram.j_points = nj;
        }
        if let Some(seed) = o.seed {
            self.solver.seed = seed;
        }
        if let Some(dir) = &o.out {
            self.output.dir = dir.clone();
        }
        self.validate()?;
        Ok(self)
    }
}

/// Command-line values that replace configuration entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub p_d_mw: Option<f64>,
    pub j_over_kappa_a: Option<f64>,
    pub grid: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub out: Option<String>,
}

pub fn parse_class(label: &str) -> Option<BranchClass> {
    [
        BranchClass::SymLow,
        BranchClass::SymMid,
        BranchClass::SymHigh,
        BranchClass::AsymLowHigh,
        BranchClass::AsymHighLow,
        BranchClass::Other,
    ]
    .into_iter()
    .find(|c| c.label() == label)
}

/// Parses an `NxM` grid size.
pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid must look like `NxM`, got `{s}`"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let n = a.trim().parse().map_err(|_| bad())?;
    let m = b.trim().parse().map_err(|_| bad())?;
    Ok((n, m))
}
