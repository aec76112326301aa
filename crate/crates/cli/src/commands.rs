//! Subcommand pipelines. Each one computes its tables in memory, then the
//! files are written one after another.

use std::fs;
use std::path::{Path, PathBuf};

use magdimer::bifurcation::{
    continue_branch, sweep_phase_diagram, symmetric_fold_powers, BranchCurve, Fold, Termination,
};
use magdimer::dynamics::{
    fit_scan, log_offsets, run_csd_scan, simulate_quench, CsdScan, IntegratorOptions,
    QuenchProtocol, QuenchStart,
};
use magdimer::fluctuations::fluctuation_scan;
use magdimer::steady::{find_all_fixed_points, BranchClass, FixedPoint};
use magdimer::{DimerError, FieldState, QuadratureVector, SystemParams};

use crate::config::{config_hash, ExperimentConfig, ScanFold};
use crate::error::CliError;
use crate::table::{
    coord, flag, num, opt_num, Table, BRANCH, FLUCT, PHASE_DIAGRAM, QUENCH_SCAN, STEADY, TRAJECTORY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Steady,
    Branch,
    PhaseDiagram,
    Quench,
    Fluct,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Branch => "branch",
            Command::PhaseDiagram => "phase-diagram",
            Command::Quench => "quench",
            Command::Fluct => "fluct",
        }
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub file_name: String,
    pub table: Table,
}

fn output(file_name: &str, table: Table) -> Output {
    Output {
        file_name: file_name.to_string(),
        table,
    }
}

/// Runs a subcommand and writes its CSV files under `cfg.output.dir`.
pub fn run_subcommand(cmd: Command, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let outputs = compute(cmd, cfg)?;
    let dir = Path::new(&cfg.output.dir);
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let hash = config_hash(cfg);
    let mut paths = Vec::with_capacity(outputs.len());
    for o in outputs {
        let path = dir.join(&o.file_name);
        o.table.write(&path, &hash)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn compute(cmd: Command, cfg: &ExperimentConfig) -> Result<Vec<Output>, CliError> {
    match cmd {
        Command::Steady => Ok(vec![output("steady.csv", steady(cfg)?)]),
        Command::Branch => Ok(vec![output("branch.csv", branch(cfg)?)]),
        Command::PhaseDiagram => Ok(vec![output("phase_diagram.csv", phase_diagram(cfg)?)]),
        Command::Quench => {
            let (traj, scan) = quench(cfg)?;
            Ok(vec![
                output("quench_trajectory.csv", traj),
                output("quench_scan.csv", scan),
            ])
        }
        Command::Fluct => Ok(vec![output("fluct.csv", fluct(cfg)?)]),
    }
}

fn mw(p_w: f64) -> f64 {
    p_w * 1e3
}

fn w(p_mw: f64) -> f64 {
    p_mw / 1e3
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let k = i as f64;
            (lo * (m - k) + hi * k) / m
        })
        .collect()
}

fn j_over_kappa(p: &SystemParams) -> f64 {
    p.j_hz() / p.kappa_a
}

fn amplitude_cells(s: &FieldState) -> Vec<String> {
    [s.m_l, s.m_r, s.a_l, s.a_r]
        .into_iter()
        .flat_map(|z| [num(z.re), num(z.im)])
        .collect()
}

pub fn steady(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let params = cfg.system_params();
    let d = params.derived()?;
    let fps = find_all_fixed_points(&d, None, &cfg.multistart())?;
    let mut t = Table::new(&STEADY);
    t.note("stable", fps.iter().filter(|f| f.is_stable()).count());
    t.note("total", fps.len());
    for (i, fp) in fps.iter().enumerate() {
        let (ml, mr) = fp.n_m();
        let (al, ar) = fp.n_a();
        let mut row = vec![
            coord(cfg.system.p_d_mw),
            coord(j_over_kappa(&params)),
            i.to_string(),
            fp.branch_class.to_string(),
            fp.stability.to_string(),
            num(ml),
            num(mr),
            num(al),
            num(ar),
            num(fp.imbalance_z),
            num(fp.max_re()),
        ];
        row.extend(amplitude_cells(&fp.state));
        t.push(row);
    }
    Ok(t)
}

/// Whether `fp` lies on `curve`, judged by interpolating the curve at the
/// power of `fp`.
fn on_curve(curve: &BranchCurve, fp: &FixedPoint, p: f64) -> bool {
    let q = fp.state.to_quadratures();
    let tol = 2e-2 * q.norm().max(f64::MIN_POSITIVE);
    curve.samples.windows(2).any(|w| {
        let (p0, p1) = (w[0].p_d, w[1].p_d);
        if (p0 - p).signum() == (p1 - p).signum() && p0 != p && p1 != p {
            return false;
        }
        let frac = if p1 == p0 { 0.0 } else { (p - p0) / (p1 - p0) };
        let a = w[0].point.state.to_quadratures().0;
        let b = w[1].point.state.to_quadratures().0;
        let mid = QuadratureVector(std::array::from_fn(|i| a[i] + frac * (b[i] - a[i])));
        mid.distance(&q) <= tol
    })
}

fn termination_label(t: &Termination) -> String {
    match t {
        Termination::RangeBoundary => "range boundary".into(),
        Termination::MergedWithSymmetric => "merged with symmetric branch".into(),
        Termination::MaxSteps => "step limit".into(),
        Termination::Truncated { p_d, reason } => {
            format!("truncated at {} mW ({reason})", coord(mw(*p_d)))
        }
    }
}

/// Continues a branch through every fixed point present at the configured
/// power, skipping points already covered by an earlier curve.
pub fn branch_curves(cfg: &ExperimentConfig) -> Result<Vec<BranchCurve>, CliError> {
    let params = cfg.system_params();
    let range = (w(cfg.branch.p_min_mw), w(cfg.branch.p_max_mw));
    if !(params.p_d >= range.0 && params.p_d <= range.1) {
        return Err(CliError::Config(format!(
            "P_d = {} mW lies outside the branch range [{}, {}] mW",
            cfg.system.p_d_mw, cfg.branch.p_min_mw, cfg.branch.p_max_mw
        )));
    }
    let d = params.derived()?;
    let fps = find_all_fixed_points(&d, None, &cfg.multistart())?;
    let ctl = cfg.step_control();
    let mut curves: Vec<BranchCurve> = Vec::new();
    for fp in &fps {
        if curves.iter().any(|c| on_curve(c, fp, params.p_d)) {
            continue;
        }
        curves.push(continue_branch(fp, &params, range, &ctl)?);
    }
    Ok(curves)
}

fn branch_row(id: usize, p_d: f64, fp: &FixedPoint, fold_flag: u8) -> Vec<String> {
    let (ml, mr) = fp.n_m();
    let (al, ar) = fp.n_a();
    vec![
        id.to_string(),
        coord(mw(p_d)),
        num(ml),
        num(mr),
        num(al),
        num(ar),
        num(fp.imbalance_z),
        num(fp.max_re()),
        fp.branch_class.to_string(),
        fold_flag.to_string(),
    ]
}

pub fn branch_table(curves: &[BranchCurve]) -> Table {
    let mut t = Table::new(&BRANCH);
    for (id, c) in curves.iter().enumerate() {
        t.note(
            &format!("branch {id}"),
            format!(
                "{} sector, seeded on {}, ends: {}; {}",
                match c.sector {
                    magdimer::bifurcation::Sector::Full => "full",
                    magdimer::bifurcation::Sector::Symmetric => "symmetric",
                },
                c.branch_class,
                termination_label(&c.termination[0]),
                termination_label(&c.termination[1]),
            ),
        );
        let mut marks: Vec<(&Fold, u8)> = c
            .fold_points
            .iter()
            .map(|f| (f, 1))
            .chain(c.branch_points.iter().map(|f| (f, 2)))
            .collect();
        marks.sort_by_key(|(f, _)| f.index);
        let mut marks = marks.into_iter().peekable();
        for (i, s) in c.samples.iter().enumerate() {
            t.push(branch_row(id, s.p_d, &s.point, 0));
            while let Some((f, kind)) = marks.next_if(|(f, _)| f.index == i) {
                t.push(branch_row(id, f.p_d, &f.point, kind));
            }
        }
    }
    t
}

pub fn branch(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    Ok(branch_table(&branch_curves(cfg)?))
}

pub fn phase_diagram(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let pd = &cfg.phase_diagram;
    let p_mw = linspace(pd.p_min_mw, pd.p_max_mw, pd.p_points);
    let p_w: Vec<f64> = p_mw.iter().map(|&p| w(p)).collect();
    let j = linspace(pd.j_min, pd.j_max, pd.j_points);
    let diagram = sweep_phase_diagram(&cfg.system_params(), &p_w, &j, &cfg.multistart())?;
    let mut t = Table::new(&PHASE_DIAGRAM);
    t.note("grid", format!("{}x{}", pd.p_points, pd.j_points));
    let invalid = diagram.cells.iter().filter(|c| !c.valid).count();
    if invalid > 0 {
        t.note("unsolved_cells", invalid);
    }
    for (jj, &jv) in j.iter().enumerate() {
        for (pi, cell) in diagram.row(jj).iter().enumerate() {
            t.push(vec![
                coord(p_mw[pi]),
                coord(jv),
                cell.region.to_string(),
                cell.n_stable.to_string(),
                num(cell.max_abs_z),
                flag(cell.hopf_flag),
            ]);
        }
    }
    Ok(t)
}

fn protocol(
    cfg: &ExperimentConfig,
    p_init: f64,
    p_final: f64,
    start: BranchClass,
    kappa_a: f64,
) -> QuenchProtocol {
    let q = &cfg.quench;
    QuenchProtocol {
        t_settle: q.t_settle / kappa_a,
        t_max: q.t_max / kappa_a,
        dwell: q.dwell / kappa_a,
        record_dt: q.record_dt / kappa_a,
        eps_rel: q.eps_rel,
        integrator: IntegratorOptions {
            rtol: q.rtol,
            ..IntegratorOptions::default()
        },
        ..QuenchProtocol::new(p_init, p_final, QuenchStart::Branch(start), kappa_a)
    }
}

/// The configured single quench as a trajectory table.
pub fn quench_trajectory(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let params = cfg.system_params();
    let d = params.derived()?;
    let q = &cfg.quench;
    let proto = protocol(
        cfg,
        w(q.p_init_mw),
        w(q.p_final_mw),
        cfg.quench_start()?,
        d.kappa_a,
    );
    let (traj, res) = simulate_quench(&proto, &params, &cfg.multistart())?;
    let mut t = Table::new(&TRAJECTORY);
    t.note("P_init_mW", coord(q.p_init_mw));
    t.note("P_final_mW", coord(q.p_final_mw));
    t.note("start", &q.start);
    t.note("converged", res.converged);
    t.note("tau_s", num(res.tau));
    if let Some(f) = &res.final_fp {
        t.note("final_class", f.branch_class);
    }
    for (time, s) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![num(*time)];
        for z in [s.a_l, s.m_l, s.a_r, s.m_r] {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row.push(num(s.m_l.norm_sqr()));
        row.push(num(s.m_r.norm_sqr()));
        t.push(row);
    }
    Ok(t)
}

/// Relaxation times for quenches past a symmetric saddle-node.
pub fn quench_scan(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let params = cfg.system_params();
    let d = params.derived()?;
    let q = &cfg.quench;
    let (lo, hi) = symmetric_fold_powers(&params)?.ok_or_else(|| {
        CliError::Solver(DimerError::Domain(
            "the symmetric response has no saddle-node to approach".into(),
        ))
    })?;
    let (p_c, start, sign) = match q.scan_fold {
        ScanFold::Upper => (hi, BranchClass::SymLow, 1.0),
        ScanFold::Lower => (lo, BranchClass::SymHigh, -1.0),
    };
    let p_init = p_c * (1.0 - sign * q.scan_pre_offset);
    let scan = CsdScan {
        p_c,
        p_init,
        start,
        offsets: log_offsets(q.scan_points, q.scan_delta_min, q.scan_delta_max),
        sign,
        template: protocol(cfg, p_init, p_c, start, d.kappa_a),
    };
    let points = run_csd_scan(&scan, &params, &cfg.multistart())?;
    let mut t = Table::new(&QUENCH_SCAN);
    t.note("P_c_mW", coord(mw(p_c)));
    t.note("P_init_mW", coord(mw(p_init)));
    t.note("start", start);
    match fit_scan(&points) {
        Ok(fit) => {
            t.note("fit_exponent", num(fit.exponent));
            t.note("fit_stderr", num(fit.stderr));
            t.note("fit_r2", num(fit.r2));
        }
        Err(e) => t.note("fit", e),
    }
    for p in &points {
        t.push(vec![
            coord(mw(p.p_final)),
            num(mw(p.delta)),
            num(p.tau),
            flag(p.converged),
            p.final_class.map(|c| c.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(t)
}

pub fn quench(cfg: &ExperimentConfig) -> Result<(Table, Table), CliError> {
    Ok((quench_trajectory(cfg)?, quench_scan(cfg)?))
}

pub fn fluct(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let f = &cfg.fluct;
    let p_mw = linspace(f.p_min_mw, f.p_max_mw, f.p_points);
    let p_w: Vec<f64> = p_mw.iter().map(|&p| w(p)).collect();
    let rows = fluctuation_scan(&cfg.system_params(), &p_w, &cfg.multistart())?;
    let mut t = Table::new(&FLUCT);
    for r in &rows {
        let i = p_w
            .iter()
            .position(|&p| p == r.p_d)
            .expect("row power comes from the grid");
        t.push(vec![
            coord(p_mw[i]),
            r.class_a.to_string(),
            r.class_b.to_string(),
            r.pairing.label().to_string(),
            num(r.fidelity),
            num(r.infidelity),
            opt_num(r.mutual_information),
            opt_num(r.log_negativity),
            opt_num(r.nu_plus),
            opt_num(r.nu_minus),
            opt_num(r.lyapunov_residual),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends_exactly() {
        let v = linspace(1.0, 100.0, 101);
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[100], 100.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(linspace(0.2, 3.0, 1), vec![0.2]);
    }

    #[test]
    fn unit_helpers_invert() {
        assert_eq!(w(30.0), 30.0e-3);
    }
}
