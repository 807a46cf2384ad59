//! Run orchestration: setup from a configuration, time stepping, output.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::blending::{assign_alpha, BlendField, BlendMode};
use crate::config::{CaseConfig, ConfigError};
use crate::diagnostics::{
    conserved_totals, fmt17, l2_error, node_weights, total_entropy, DiagnosticsRow, DiagnosticsSeries, CSV_HEADER,
};
use crate::mesh::geometry::line_node;
use crate::mesh::build_mesh;
use crate::operator::{Discretization, Solution, SolverError, Stage};
use crate::sbp::build_sbp;
use crate::time::{advance_step, RkScheme};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The solver stopped; `diagnostics` holds every row written so far.
    #[error("solver aborted: {source}")]
    Solver {
        source: SolverError,
        diagnostics: DiagnosticsSeries,
    },
    #[error("output error: {0}")]
    Io(#[from] io::Error),
}

/// A configured discretisation and its current state.
pub struct Simulation {
    pub config: CaseConfig,
    pub disc: Discretization,
    pub solution: Solution,
    pub time: f64,
    pub step: usize,
    pub blend: BlendField,
    weights: Vec<f64>,
    register: Solution,
    scheme: RkScheme,
}

fn solver_err(e: SolverError) -> RunError {
    RunError::Solver {
        source: e,
        diagnostics: DiagnosticsSeries::default(),
    }
}

impl Simulation {
    pub fn new(config: &CaseConfig) -> Result<Self, RunError> {
        config.validate()?;
        let cfg = config.clone();
        let invalid = |e: &dyn std::fmt::Display| RunError::Config(ConfigError::Invalid(e.to_string()));
        let mesh = build_mesh(cfg.mesh.clone(), cfg.motion.clone()).map_err(|e| invalid(&e))?;
        let sbp = build_sbp(cfg.degree).map_err(|e| invalid(&e))?;
        let disc = Discretization::new(mesh, sbp, cfg.gas, cfg.fluxes.surface, cfg.fluxes.subcell, cfg.fv_order)
            .map_err(|e| invalid(&e))?;
        let flow = cfg.flow.clone();
        let gas = cfg.gas;
        let solution = disc
            .project(0.0, |x| flow.state(x, 0.0, &gas))
            .map_err(|e| invalid(&e))?;
        let weights = node_weights(&disc.sbp);
        let register = Solution::zeros(solution.len());
        let mut sim = Self {
            blend: BlendField::uniform(&disc.mesh, 0.0),
            config: cfg,
            disc,
            solution,
            time: 0.0,
            step: 0,
            weights,
            register,
            scheme: RkScheme::carpenter_kennedy(),
        };
        let stage = sim.disc.stage(&sim.solution, 0.0).map_err(solver_err)?;
        let blend = sim.compute_blend(&stage)?;
        sim.blend = blend;
        Ok(sim)
    }

    fn compute_blend(&self, stage: &Stage) -> Result<BlendField, RunError> {
        assign_alpha(&self.config.blending, &self.disc.mesh, &self.disc.sbp, &stage.prims, &self.disc.gas)
            .map_err(|e| RunError::Config(ConfigError::Invalid(e.to_string())))
    }

    /// Takes one step towards `target`, landing on it exactly if the stable
    /// step reaches it. Returns the step size.
    pub fn step_towards(&mut self, target: f64) -> Result<f64, RunError> {
        let t = self.time;
        let stage = self.disc.stage(&self.solution, t).map_err(solver_err)?;
        if matches!(self.config.blending, BlendMode::Indicator(_)) {
            self.blend = self.compute_blend(&stage)?;
        }
        let stable = self.disc.stable_dt(&stage, &self.solution, self.config.time.cfl);
        let dt = self.config.time.next_dt(t, stable, target);
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(solver_err(SolverError::BadTimeStep { dt, time: t }));
        }
        let disc = &self.disc;
        let blend = &self.blend;
        let boundary = self.config.flow.boundary(disc.gas);
        let mut first = Some(stage);
        self.register.scale(0.0);
        advance_step(&mut self.solution, &mut self.register, &self.scheme, t, dt, |u, ts, dt, k| {
            let st = match first.take() {
                Some(s) => s,
                None => disc.stage(u, ts)?,
            };
            disc.accumulate_residual(&st, blend, &boundary, dt, k)
        })
        .map_err(solver_err)?;
        self.time = if dt == target - t { target } else { t + dt };
        self.step += 1;
        Ok(dt)
    }

    pub fn diagnostics_row(&self, dt: f64) -> Result<DiagnosticsRow, RunError> {
        let gas = self.disc.gas;
        let entropy = total_entropy(&self.solution, &self.weights, &gas).map_err(|source| {
            solver_err(SolverError::NonPhysical {
                element: 0,
                node: 0,
                time: self.time,
                source,
            })
        })?;
        let l2 = if self.config.flow.has_exact_solution() {
            let positions = self.node_positions()?;
            let t = self.time;
            Some(l2_error(&self.solution, &positions, &self.weights, |x| {
                self.config.flow.state(x, t, &gas)
            }))
        } else {
            None
        };
        Ok(DiagnosticsRow {
            step: self.step,
            time: self.time,
            dt,
            alpha_min: self.blend.min(),
            alpha_max: self.blend.max(),
            totals: conserved_totals(&self.solution, &self.weights),
            entropy,
            l2,
        })
    }

    pub fn node_positions(&self) -> Result<Vec<[f64; 3]>, RunError> {
        let geo = self.disc.geometry(self.time).map_err(|e| solver_err(e.into()))?;
        Ok(geo.elements.iter().flat_map(|g| g.positions.iter().copied()).collect())
    }

    /// Line of nodes along `x` through the middle of the domain in `y`, `z`:
    /// rows `(x, ρ, v1, p, α)`.
    pub fn profile(&self) -> Result<Vec<[f64; 5]>, RunError> {
        let geo = self.disc.geometry(self.time).map_err(|e| solver_err(e.into()))?;
        let stage = self.disc.stage(&self.solution, self.time).map_err(solver_err)?;
        let mesh = &self.disc.mesh;
        let n = self.disc.sbp.n_nodes();
        let npe = self.disc.nodes_per_element();
        let cells = mesh.topology.cells;
        let mut rows = Vec::new();
        for i in 0..cells[0] {
            let e = mesh.element_index([i, cells[1] / 2, cells[2] / 2]);
            for p in 0..n {
                let node = line_node(n, 0, p, n / 2, n / 2);
                let w = &stage.prims[e * npe + node];
                rows.push([geo.elements[e].positions[node][0], w.rho, w.v[0], w.p, self.blend.alpha[e]]);
            }
        }
        Ok(rows)
    }
}

/// Result of a completed run.
pub struct RunOutput {
    pub diagnostics: DiagnosticsSeries,
    pub simulation: Simulation,
    /// Profile extractions at each output event, if enabled.
    pub profiles: Vec<(f64, Vec<[f64; 5]>)>,
}

fn profile_csv(rows: &[[f64; 5]]) -> String {
    let mut s = String::from("x,rho,v1,p,alpha\n");
    for r in rows {
        let f: Vec<String> = r.iter().map(|&v| fmt17(v)).collect();
        s.push_str(&f.join(","));
        s.push('\n');
    }
    s
}

pub fn profile_file_name(t: f64) -> String {
    format!("profile_{t:.6}.csv")
}

struct Sink {
    dir: PathBuf,
    diagnostics: BufWriter<fs::File>,
}

impl Sink {
    fn open(dir: &Path, cfg: &CaseConfig) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.echo"), cfg.to_toml())?;
        let mut diagnostics = BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
        writeln!(diagnostics, "{CSV_HEADER}")?;
        diagnostics.flush()?;
        Ok(Self { dir: dir.to_path_buf(), diagnostics })
    }
}

/// Runs a case to its end time. With `output` set, writes `config.echo`,
/// `diagnostics.csv` (flushed after every row) and profile files there.
pub fn run_case(config: &CaseConfig, output: Option<&Path>) -> Result<RunOutput, RunError> {
    config.validate()?;
    let mut cfg = config.clone();
    if let Some(dir) = output {
        cfg.output.directory = dir.display().to_string();
    }
    let mut sink = match output {
        Some(dir) => Some(Sink::open(dir, &cfg)?),
        None => None,
    };
    let mut sim = Simulation::new(&cfg)?;
    let mut series = DiagnosticsSeries::default();
    let mut profiles = Vec::new();
    let end = cfg.time.end_time;
    let interval = cfg.output.interval;

    let mut record = |sim: &Simulation, dt: f64, series: &mut DiagnosticsSeries, sink: &mut Option<Sink>| -> Result<(), RunError> {
        let row = sim.diagnostics_row(dt)?;
        series.rows.push(row);
        if let Some(s) = sink.as_mut() {
            writeln!(s.diagnostics, "{}", series.csv_row(series.rows.len() - 1))?;
            s.diagnostics.flush()?;
        }
        if cfg.output.profiles {
            let rows = sim.profile()?;
            if let Some(s) = sink.as_ref() {
                fs::write(s.dir.join(profile_file_name(sim.time)), profile_csv(&rows))?;
            }
            profiles.push((sim.time, rows));
        }
        Ok(())
    };

    record(&sim, 0.0, &mut series, &mut sink)?;
    let mut next_event = 1usize;
    while sim.time < end {
        let target = if interval > 0.0 {
            (next_event as f64 * interval).min(end)
        } else {
            end
        };
        let dt = match sim.step_towards(target) {
            Ok(dt) => dt,
            Err(RunError::Solver { source, .. }) => {
                return Err(RunError::Solver {
                    source,
                    diagnostics: series,
                })
            }
            Err(e) => return Err(e),
        };
        if interval == 0.0 || sim.time == target {
            record(&sim, dt, &mut series, &mut sink)?;
            while interval > 0.0 && next_event as f64 * interval <= sim.time {
                next_event += 1;
            }
        }
    }
    Ok(RunOutput {
        diagnostics: series,
        simulation: sim,
        profiles,
    })
}
