//! Experiment runners. Each returns its data files in memory; [`run`] then
//! writes them together with the manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::Serialize;
use wwgm::io::{write_binary, write_csv, write_table_csv, write_trajectory_csv};
use wwgm::phase_space::{norm, peak_grid_point};
use wwgm::{
    classical_heisenberg_evolve, classical_liouville_evolve, coherent_state, config_coset_flow,
    contracted_heisenberg_evolve, heisenberg_evolve, liouville_evolve, moyal_bracket, overlap_decay_sweep,
    left_operator_sweep, phase_space_coset_flow, product_commutativization, bracket_convergence,
    schrodinger_evolve, star, theta_decoupling_scan, trace_pair, wigner, CoherentLabel, ContractionParam,
    PhaseFunction, PhaseGrid, Polynomial, SweepSpec, Trajectory,
};

use crate::config::{Experiment, ExperimentConfig, Observable, Picture, SweepKind};
use crate::output::{Artifacts, FileEntry};
use crate::RunError;

/// Relative tolerance of the star-check identities.
pub const STAR_CHECK_TOL: f64 = 1e-6;

pub const UNITS: &str = "hbar = 2 throughout: [X, P] = 2i, coherent labels are half the expectation values of \
(P, X), and the contracted product uses hbar/k^2. Coordinates p, x and time t are dimensionless in these units.";

/// What a finished run left behind.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub status: &'static str,
    pub units: &'static str,
    pub columns: BTreeMap<&'static str, &'static str>,
    pub files: Vec<FileEntry>,
    pub config: ExperimentConfig,
    pub started_unix_seconds: u64,
    pub elapsed_seconds: f64,
}

/// Runs `experiment`, writes its data files and `manifest.json` into the
/// configured output directory, and returns the manifest.
///
/// A star-check whose identities fail still writes its report before the
/// accuracy error is returned.
pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Manifest, RunError> {
    cfg.check_experiment(experiment)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let (artifacts, failure) = compute(experiment, cfg)?;
    let dir = cfg.output_dir();
    let dir = Path::new(&dir);
    artifacts.write_all(dir)?;
    let manifest = Manifest {
        tool: "wwgm",
        version: env!("CARGO_PKG_VERSION"),
        experiment: experiment.name(),
        status: if failure.is_some() { "accuracy_failure" } else { "ok" },
        units: UNITS,
        columns: column_units(),
        files: artifacts.entries(),
        config: cfg.clone(),
        started_unix_seconds: started,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serialization cannot fail");
    bytes.push(b'\n');
    crate::output::write_atomic(&dir.join("manifest.json"), &bytes)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(manifest),
    }
}

/// Data files only; nothing touches the disk.
pub fn compute(experiment: Experiment, cfg: &ExperimentConfig) -> Result<(Artifacts, Option<wwgm::Error>), RunError> {
    let grid = cfg.grid(experiment)?;
    match experiment {
        Experiment::Coherent => coherent(cfg, &grid).map(|a| (a, None)),
        Experiment::StarCheck => star_check(cfg, &grid),
        Experiment::Evolve => evolve(cfg, &grid).map(|a| (a, None)),
        Experiment::SweepK => sweep(cfg, &grid).map(|a| (a, None)),
        Experiment::Coset => coset(cfg, grid.dim()).map(|a| (a, None)),
    }
}

fn column_units() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("p, x, p1.., x1..", "phase-space coordinates"),
        ("re, im", "real and imaginary part of the field value"),
        ("t", "evolution time"),
        ("norm", "||phi|| for states, Tr rho for densities, sup norm for observables"),
        ("energy", "<G> for states and densities; NaN where undefined"),
        ("peak_p, peak_x", "peak of |phi| (the label) or of Re rho (twice the label)"),
        ("k", "contraction parameter (dimensionless)"),
        ("numeric, closed_form, rel_err", "grid value, analytic value and their relative difference"),
        ("x_residual, p_residual", "sup norm of the contracted left operator minus multiplication"),
        ("product_deviation, commutator", "sup norms of a *_k b - ab and a *_k b - b *_k a"),
        ("error", "sup norm of the scaled bracket minus the Poisson bracket"),
        ("dp, dx, dtheta", "coset tangent components"),
        ("residual, tolerance", "sup-norm identity residual and its pass threshold"),
    ])
}

fn axis_monomial(n: usize, pe: u32, xe: u32) -> Observable {
    let mut p = vec![0; n];
    let mut x = vec![0; n];
    p[0] = pe;
    x[0] = xe;
    Observable::Monomial { coefficient: 1.0, p, x }
}

fn binary(f: &PhaseFunction) -> Vec<u8> {
    let mut v = Vec::new();
    write_binary(f, &mut v).expect("in-memory write");
    v
}

fn first<T: Clone>(v: &[T], what: &str) -> Result<T, RunError> {
    v.first().cloned().ok_or_else(|| RunError::Config(format!("this experiment needs at least one {what}")))
}

#[derive(Serialize)]
struct CoherentSummary {
    p: Vec<f64>,
    x: Vec<f64>,
    norm: f64,
    wigner_trace: f64,
    expectation_p: Vec<f64>,
    expectation_x: Vec<f64>,
    wigner_peak_p: Vec<f64>,
    wigner_peak_x: Vec<f64>,
}

fn coherent(cfg: &ExperimentConfig, grid: &PhaseGrid) -> Result<Artifacts, RunError> {
    let n = grid.dim();
    let labels = cfg.labels_or(vec![CoherentLabel::origin(n)?])?;
    let one = PhaseFunction::constant(grid, 1.0);
    let mut out = Artifacts::default();
    let mut summary = Vec::new();
    for (i, a) in labels.iter().enumerate() {
        let phi = coherent_state(a, grid)?;
        let rho = wigner(&phi)?;
        let expect = |poly: Polynomial| -> Result<f64, RunError> {
            Ok(trace_pair(&PhaseFunction::polynomial(grid, poly)?, &rho)?.re)
        };
        let expectation_p = (0..n).map(|j| expect(Polynomial::p(n, j))).collect::<Result<_, _>>()?;
        let expectation_x = (0..n).map(|j| expect(Polynomial::x(n, j))).collect::<Result<_, _>>()?;
        let (wigner_peak_p, wigner_peak_x) = peak_grid_point(&rho, |v| v.re);
        summary.push(CoherentSummary {
            p: a.p.clone(),
            x: a.x.clone(),
            norm: norm(&phi),
            wigner_trace: trace_pair(&one, &rho)?.re,
            expectation_p,
            expectation_x,
            wigner_peak_p,
            wigner_peak_x,
        });
        out.add(format!("state_{i}.bin"), binary(&phi));
        out.add_with(format!("state_{i}.csv"), |w| write_csv(&phi, w));
        out.add(format!("wigner_{i}.bin"), binary(&rho));
        out.add_with(format!("wigner_{i}.csv"), |w| write_csv(&rho, w));
    }
    out.add_json("coherent.json", &summary);
    Ok(out)
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    operands: String,
    k: f64,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct StarCheckReport {
    method: String,
    all_pass: bool,
    checks: Vec<CheckRow>,
}

fn star_check(cfg: &ExperimentConfig, grid: &PhaseGrid) -> Result<(Artifacts, Option<wwgm::Error>), RunError> {
    let n = grid.dim();
    let method = cfg.star_method()?;
    let catalog = cfg.observables_or(vec![
        axis_monomial(n, 0, 1),
        axis_monomial(n, 1, 0),
        Observable::Gaussian { amplitude: 1.0, center_p: vec![0.2; n], center_x: vec![-0.1; n], width: 1.0 },
    ]);
    let fields: Vec<PhaseFunction> = catalog.iter().map(|o| o.build(grid)).collect::<Result<_, _>>()?;
    let names: Vec<String> = catalog.iter().map(Observable::name).collect();
    let unit = ContractionParam::unit();
    let one = PhaseFunction::constant(grid, 1.0);
    let m = fields.len();
    let mut rows = Vec::new();
    let mut push = |check, operands: String, k, residual: f64, scale: f64| {
        let tolerance = STAR_CHECK_TOL * scale.max(1.0);
        rows.push(CheckRow { check, operands, k, residual, tolerance, pass: residual <= tolerance });
    };

    for (a, name) in fields.iter().zip(&names) {
        let left = star(&one, a, method, &unit)?.max_abs_diff(a)?;
        push("left_unit", name.clone(), 1.0, left, a.sup_norm());
        let right = star(a, &one, method, &unit)?.max_abs_diff(a)?;
        push("right_unit", name.clone(), 1.0, right, a.sup_norm());
    }
    for k in cfg.k_values()? {
        let kp = ContractionParam::new(k)?;
        for axis in 0..n {
            let x = PhaseFunction::polynomial(grid, Polynomial::x(n, axis))?;
            let p = PhaseFunction::polynomial(grid, Polynomial::p(n, axis))?;
            let want = PhaseFunction::constant(grid, Complex64::new(0.0, 2.0 / (k * k)));
            let residual = moyal_bracket(&x, &p, method, &kp)?.max_abs_diff(&want)?;
            let operands = if n == 1 { "x | p".to_string() } else { format!("x{0} | p{0}", axis + 1) };
            push("canonical_commutator", operands, k, residual, 2.0 / (k * k));
        }
    }
    for i in 0..m {
        let (a, b, c) = (&fields[i], &fields[(i + 1) % m], &fields[(i + 2) % m]);
        let ops = format!("{} | {} | {}", names[i], names[(i + 1) % m], names[(i + 2) % m]);
        let lhs = star(&star(a, b, method, &unit)?, c, method, &unit)?;
        let rhs = star(a, &star(b, c, method, &unit)?, method, &unit)?;
        push("associativity", ops, 1.0, lhs.max_abs_diff(&rhs)?, a.sup_norm() * b.sup_norm() * c.sup_norm());

        let ops = format!("{} | {}", names[i], names[(i + 1) % m]);
        let lhs = star(a, b, method, &unit)?.conj();
        let rhs = star(&b.conj(), &a.conj(), method, &unit)?;
        push("conjugation", ops, 1.0, lhs.max_abs_diff(&rhs)?, a.sup_norm() * b.sup_norm());
    }

    let all_pass = rows.iter().all(|r| r.pass);
    let mut out = Artifacts::default();
    out.add_with("star_check.csv", |w| {
        writeln!(w, "check,operands,k,residual,tolerance,pass")?;
        for r in &rows {
            writeln!(w, "{},{},{},{},{},{}", r.check, r.operands, r.k, r.residual, r.tolerance, r.pass)?;
        }
        Ok(())
    });
    let failed = rows.iter().filter(|r| !r.pass).count();
    out.add_json("star_check.json", &StarCheckReport { method: format!("{method:?}"), all_pass, checks: rows });
    let failure = (!all_pass).then(|| wwgm::Error::Accuracy(format!("{failed} star identity checks failed")));
    Ok((out, failure))
}

#[derive(Serialize)]
struct FinalRecord {
    t: f64,
    norm: f64,
    energy: f64,
    peak_p: f64,
    peak_x: f64,
}

#[derive(Serialize)]
struct RunSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    trajectory: String,
    snapshots: Vec<String>,
    #[serde(rename = "final")]
    last: FinalRecord,
    max_step_drift: f64,
    total_drift: f64,
}

#[derive(Serialize)]
struct EvolveSummary {
    picture: Picture,
    generator: String,
    mass: Option<f64>,
    dt: f64,
    steps: usize,
    t_final: f64,
    save_every: usize,
    runs: Vec<RunSummary>,
}

fn evolve(cfg: &ExperimentConfig, grid: &PhaseGrid) -> Result<Artifacts, RunError> {
    let n = grid.dim();
    let gen = cfg.generator(n)?;
    let ec = cfg.evolution()?;
    let picture = cfg.picture();
    let state = || -> Result<PhaseFunction, RunError> {
        let a = first(&cfg.labels_or(vec![CoherentLabel::origin(n)?])?, "label")?;
        Ok(coherent_state(&a, grid)?)
    };
    let observable = || first(&cfg.observables_or(vec![axis_monomial(n, 0, 1)]), "observable")?.build(grid);

    let runs: Vec<(Option<f64>, Trajectory)> = match picture {
        Picture::Schrodinger => vec![(None, schrodinger_evolve(&state()?, &gen, &ec)?)],
        Picture::Liouville => vec![(None, liouville_evolve(&wigner(&state()?)?, &gen, &ec)?)],
        Picture::ClassicalLiouville => vec![(None, classical_liouville_evolve(&wigner(&state()?)?, &gen, &ec)?)],
        Picture::Heisenberg => vec![(None, heisenberg_evolve(&observable()?, &gen, &ec)?)],
        Picture::ClassicalHeisenberg => vec![(None, classical_heisenberg_evolve(&observable()?, &gen, &ec)?)],
        Picture::ContractedHeisenberg => {
            let alpha = observable()?;
            cfg.k_values()?
                .into_iter()
                .map(|k| Ok((Some(k), contracted_heisenberg_evolve(&alpha, &gen, &ec, &ContractionParam::new(k)?)?)))
                .collect::<Result<_, RunError>>()?
        }
    };

    let mut out = Artifacts::default();
    let mut summaries = Vec::new();
    for (k, traj) in &runs {
        let tag = k.map(|k| format!("_k{k}")).unwrap_or_default();
        let trajectory = format!("trajectory{tag}.csv");
        out.add_with(trajectory.clone(), |w| write_trajectory_csv(&traj.records, w));
        let mut snapshots = Vec::new();
        for (j, snap) in traj.snapshots.iter().enumerate() {
            let name = format!("snapshot{tag}_{j:04}.bin");
            out.add(name.clone(), binary(snap));
            snapshots.push(name);
        }
        let r = traj.final_record();
        summaries.push(RunSummary {
            k: *k,
            trajectory,
            snapshots,
            last: FinalRecord { t: r.t, norm: r.norm, energy: r.energy, peak_p: r.peak_p, peak_x: r.peak_x },
            max_step_drift: traj.max_step_drift,
            total_drift: traj.total_drift,
        });
    }
    out.add_json(
        "evolve.json",
        &EvolveSummary {
            picture,
            generator: gen.name().to_string(),
            mass: gen.mass(),
            dt: ec.dt,
            steps: ec.steps,
            t_final: ec.final_time(),
            save_every: ec.save_every,
            runs: summaries,
        },
    );
    Ok(out)
}

fn sweep(cfg: &ExperimentConfig, grid: &PhaseGrid) -> Result<Artifacts, RunError> {
    let n = grid.dim();
    let kind = cfg.sweep();
    let spec = SweepSpec::new(cfg.k_values()?, *grid)?;
    let method = cfg.star_method()?;
    let pair = |defaults: Vec<Observable>| -> Result<(PhaseFunction, PhaseFunction), RunError> {
        let obs = cfg.observables_or(defaults);
        if obs.len() < 2 {
            return Err(RunError::Config(format!("the {} sweep needs two observables", kind.name())));
        }
        Ok((obs[0].build(grid)?, obs[1].build(grid)?))
    };
    let table = match kind {
        SweepKind::Overlap => {
            let labels = cfg.labels_or(vec![
                CoherentLabel::origin(n)?,
                CoherentLabel::new(vec![0.6; n], vec![0.8; n])?,
            ])?;
            if labels.len() < 2 {
                return Err(RunError::Config("the overlap sweep needs two labels".into()));
            }
            overlap_decay_sweep(&labels[0], &labels[1], &spec)?
        }
        SweepKind::LeftOperator => {
            let a = first(&cfg.labels_or(vec![CoherentLabel::origin(n)?])?, "label")?;
            left_operator_sweep(&a, &spec)?
        }
        SweepKind::Commutativization => {
            let (a, b) = pair(vec![axis_monomial(n, 0, 1), axis_monomial(n, 1, 0)])?;
            product_commutativization(&a, &b, &spec, method)?
        }
        SweepKind::Bracket => {
            let (a, b) = pair(vec![axis_monomial(n, 0, 3), axis_monomial(n, 3, 0)])?;
            bracket_convergence(&a, &b, &spec, method)?
        }
        SweepKind::Theta => {
            let (params, points) = cfg.coset(n)?;
            theta_decoupling_scan(&params, &first(&points, "coset point")?, &spec)?
        }
    };
    let mut out = Artifacts::default();
    out.add_with(format!("sweep_{}.csv", kind.name()), |w| write_table_csv(&table, w));
    out.add_json(format!("sweep_{}.json", kind.name()), &table);
    Ok(out)
}

fn axis_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn cells(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn coset(cfg: &ExperimentConfig, grid_dim: usize) -> Result<Artifacts, RunError> {
    let (params, points) = cfg.coset(grid_dim)?;
    let n = params.dim();
    let ks = cfg.k_values()?;
    let mut phase = Vec::new();
    let mut config = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        for &k in &ks {
            let t = phase_space_coset_flow(&params, pt, &ContractionParam::new(k)?)?;
            phase.push(format!(
                "{i},{k},{},{},{},{},{},{}",
                cells(&pt.p),
                cells(&pt.x),
                pt.theta,
                cells(&t.dp),
                cells(&t.dx),
                t.dtheta
            ));
        }
        let (dx, dtheta) = config_coset_flow(&params, &pt.x, pt.theta)?;
        config.push(format!("{i},{},{},{},{dtheta}", cells(&pt.x), pt.theta, cells(&dx)));
    }
    let header = |parts: Vec<Vec<String>>| parts.concat().join(",");
    let s = |v: &str| vec![v.to_string()];
    let phase_header = header(vec![
        s("point"),
        s("k"),
        axis_names("p", n),
        axis_names("x", n),
        s("theta"),
        axis_names("dp", n),
        axis_names("dx", n),
        s("dtheta"),
    ]);
    let config_header = header(vec![s("point"), axis_names("x", n), s("theta"), axis_names("dx", n), s("dtheta")]);
    let mut out = Artifacts::default();
    for (name, head, rows) in [
        ("coset_phase_space.csv", phase_header, phase),
        ("coset_config.csv", config_header, config),
    ] {
        out.add_with(name, |w| {
            writeln!(w, "{head}")?;
            for r in &rows {
                writeln!(w, "{r}")?;
            }
            Ok(())
        });
    }
    Ok(out)
}
