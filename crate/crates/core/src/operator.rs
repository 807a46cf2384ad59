//! Global semi-discrete operator: face fluxes first, then element updates.
//!
//! The two phases touch disjoint data (faces write only face buffers,
//! elements read faces and write only their own nodes), so either loop can
//! be split across threads without changing results.

use std::borrow::Cow;

use thiserror::Error;

use crate::blending::BlendField;
use crate::dg::{surface_kernel, volume_kernel};
use crate::fv::{face_fv_states, fv_interior_kernel, FvOrder, OuterValues, SubcellGrid};
use crate::mesh::geometry::{dot3, line_node, norm3};
use crate::mesh::{FaceKind, GeometryBasis, Mesh, MeshError, MeshGeometry};
use crate::physics::{primitives, reflect_state, EulerState, GasModel, NumericalFlux, Primitive, StateError};
use crate::residual::{ElementFaces, ElementInput, ElementResidual, FaceTrace};
use crate::sbp::SbpOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("non-physical state in element {element}, node {node} at t = {time}: {source}")]
    NonPhysical {
        element: usize,
        node: usize,
        time: f64,
        source: StateError,
    },
    #[error("evolved Jacobian {value} <= 0 in element {element}, node {node} at t = {time}")]
    NonPositiveJacobian {
        element: usize,
        node: usize,
        time: f64,
        value: f64,
    },
    #[error("non-finite value in element {element} at t = {time}")]
    NonFinite { element: usize, time: f64 },
    #[error("time step {dt} is not positive and finite at t = {time}")]
    BadTimeStep { dt: f64, time: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// External state imposed on Dirichlet faces.
pub trait BoundaryState {
    fn state(&self, x: [f64; 3], t: f64) -> EulerState;
}

impl<F: Fn([f64; 3], f64) -> EulerState> BoundaryState for F {
    fn state(&self, x: [f64; 3], t: f64) -> EulerState {
        self(x, t)
    }
}

/// Evolved unknowns `J·u` and `J`, element-major with `(N+1)³` nodes each.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub ju: Vec<EulerState>,
    pub jac: Vec<f64>,
}

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Self {
            ju: vec![EulerState::ZERO; n],
            jac: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.jac.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jac.is_empty()
    }

    pub fn scale(&mut self, a: f64) {
        for q in &mut self.ju {
            for c in 0..5 {
                q.0[c] *= a;
            }
        }
        for j in &mut self.jac {
            *j *= a;
        }
    }

    pub fn add_scaled(&mut self, a: f64, other: &Solution) {
        for (q, o) in self.ju.iter_mut().zip(&other.ju) {
            for c in 0..5 {
                q.0[c] += a * o.0[c];
            }
        }
        for (j, o) in self.jac.iter_mut().zip(&other.jac) {
            *j += a * o;
        }
    }
}

/// Geometry and nodal primitive variables at one stage.
#[derive(Debug, Clone)]
pub struct Stage<'a> {
    pub time: f64,
    pub geometry: Cow<'a, MeshGeometry>,
    pub states: Vec<EulerState>,
    pub prims: Vec<Primitive>,
}

/// Spatial discretisation on a fixed mesh and operator.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub sbp: SbpOperator,
    pub grid: SubcellGrid,
    pub gas: GasModel,
    pub surface_flux: NumericalFlux,
    pub fv_flux: NumericalFlux,
    pub fv_order: FvOrder,
    geometry: GeometrySource,
}

#[derive(Debug, Clone)]
enum GeometrySource {
    Static(MeshGeometry),
    Moving(GeometryBasis),
}

#[inline]
fn avg3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

#[inline]
fn conserved(w: &Primitive, gas: &GasModel) -> EulerState {
    EulerState::from_primitive(w.rho, w.v, w.p, gas)
}

impl Discretization {
    pub fn new(
        mesh: Mesh,
        sbp: SbpOperator,
        gas: GasModel,
        surface_flux: NumericalFlux,
        fv_flux: NumericalFlux,
        fv_order: FvOrder,
    ) -> Result<Self, MeshError> {
        let initial = MeshGeometry::compute(&mesh, &sbp, 0.0)?;
        let geometry = if mesh.motion.is_static() {
            GeometrySource::Static(initial)
        } else {
            GeometrySource::Moving(GeometryBasis::new(&mesh, &sbp)?)
        };
        let grid = SubcellGrid::new(&sbp);
        Ok(Self {
            mesh,
            sbp,
            grid,
            gas,
            surface_flux,
            fv_flux,
            fv_order,
            geometry,
        })
    }

    pub fn nodes_per_element(&self) -> usize {
        self.sbp.n_nodes().pow(3)
    }

    pub fn n_dofs(&self) -> usize {
        self.nodes_per_element() * self.mesh.n_elements()
    }

    pub fn geometry(&self, t: f64) -> Result<Cow<'_, MeshGeometry>, MeshError> {
        match &self.geometry {
            GeometrySource::Static(g) => Ok(Cow::Borrowed(g)),
            GeometrySource::Moving(b) => b.evaluate(&self.mesh, &self.sbp, t).map(Cow::Owned),
        }
    }

    /// Samples `f(x)` at every node and sets `J` to the geometric Jacobian.
    pub fn project(&self, t: f64, f: impl Fn([f64; 3]) -> EulerState) -> Result<Solution, MeshError> {
        let geo = self.geometry(t)?;
        let mut sol = Solution::zeros(self.n_dofs());
        let npe = self.nodes_per_element();
        for (e, g) in geo.elements.iter().enumerate() {
            for i in 0..npe {
                let j = g.det[i];
                sol.jac[e * npe + i] = j;
                sol.ju[e * npe + i] = f(g.positions[i]) * j;
            }
        }
        Ok(sol)
    }

    /// Geometry at `t` and `u = (J·u) / J` with positivity checks.
    pub fn stage<'a>(&'a self, sol: &Solution, t: f64) -> Result<Stage<'a>, SolverError> {
        let geometry = self.geometry(t)?;
        let npe = self.nodes_per_element();
        let mut states = Vec::with_capacity(sol.len());
        let mut prims = Vec::with_capacity(sol.len());
        for (i, (q, &j)) in sol.ju.iter().zip(&sol.jac).enumerate() {
            let (element, node) = (i / npe, i % npe);
            if !(j > 0.0) {
                return Err(SolverError::NonPositiveJacobian {
                    element,
                    node,
                    time: t,
                    value: j,
                });
            }
            let u = *q * (1.0 / j);
            let w = primitives(&u, &self.gas).map_err(|source| SolverError::NonPhysical {
                element,
                node,
                time: t,
                source,
            })?;
            states.push(u);
            prims.push(w);
        }
        Ok(Stage {
            time: t,
            geometry,
            states,
            prims,
        })
    }

    fn face_fluxes(
        &self,
        stage: &Stage,
        blend: &BlendField,
        boundary: &dyn BoundaryState,
    ) -> (Vec<EulerState>, Vec<f64>) {
        let n = self.sbp.n_nodes();
        let npe = self.nodes_per_element();
        let nf = n * n;
        let gas = &self.gas;
        let mut flux = vec![EulerState::ZERO; self.mesh.faces.len() * nf];
        let mut gcl = vec![0.0; self.mesh.faces.len() * nf];
        for (fid, face) in self.mesh.faces.iter().enumerate() {
            let d = face.dir;
            let alpha = blend.face_alpha[fid];
            for b in 0..n {
                for a in 0..n {
                    let (nm, np) = (line_node(n, d, n - 1, a, b), line_node(n, d, 0, a, b));
                    let (f, g) = match (face.minus, face.plus) {
                        (Some(m), Some(p)) => {
                            let (gm, gp) = (&stage.geometry.elements[m], &stage.geometry.elements[p]);
                            let ja = avg3(gm.metrics[nm][d], gp.metrics[np][d]);
                            let a_nu = dot3(ja, avg3(gm.velocities[nm], gp.velocities[np]));
                            let (im, ip) = (m * npe + nm, p * npe + np);
                            let (ql, qr) = (&stage.states[im], &stage.states[ip]);
                            let (wl, wr) = (&stage.prims[im], &stage.prims[ip]);
                            let mut f = self.surface_flux.evaluate(ql, qr, wl, wr, gas, ja, a_nu);
                            if alpha > 0.0 {
                                let (fl, fr) = if self.fv_order == FvOrder::Second {
                                    let inner_m = m * npe + line_node(n, d, n.saturating_sub(2), a, b);
                                    let inner_p = p * npe + line_node(n, d, 1.min(n - 1), a, b);
                                    face_fv_states(
                                        [&stage.prims[inner_m], wl],
                                        [wr, &stage.prims[inner_p]],
                                        &self.grid,
                                    )
                                } else {
                                    (*wl, *wr)
                                };
                                let ffv =
                                    self.fv_flux
                                        .evaluate(&conserved(&fl, gas), &conserved(&fr, gas), &fl, &fr, gas, ja, a_nu);
                                f = f * (1.0 - alpha) + ffv * alpha;
                            }
                            (f, a_nu)
                        }
                        (Some(e), None) | (None, Some(e)) => {
                            let inner_is_minus = face.minus.is_some();
                            let node = if inner_is_minus { nm } else { np };
                            let ge = &stage.geometry.elements[e];
                            let ja = ge.metrics[node][d];
                            let nu = ge.velocities[node];
                            let a_nu = dot3(ja, nu);
                            let q = &stage.states[e * npe + node];
                            let w = &stage.prims[e * npe + node];
                            let ghost = match face.kind {
                                FaceKind::Wall => {
                                    let area = norm3(ja);
                                    reflect_state(w, [ja[0] / area, ja[1] / area, ja[2] / area], nu, gas)
                                }
                                _ => boundary.state(ge.positions[node], stage.time),
                            };
                            let fvflux = if alpha > 0.0 { Some(self.fv_flux) } else { None };
                            let eval = |fluxfn: NumericalFlux| -> EulerState {
                                let wg = primitives(&ghost, gas).unwrap_or(*w);
                                let qg = if wg == *w { *q } else { ghost };
                                if inner_is_minus {
                                    fluxfn.evaluate(q, &qg, w, &wg, gas, ja, a_nu)
                                } else {
                                    fluxfn.evaluate(&qg, q, &wg, w, gas, ja, a_nu)
                                }
                            };
                            let mut f = eval(self.surface_flux);
                            if let Some(ff) = fvflux {
                                f = f * (1.0 - alpha) + eval(ff) * alpha;
                            }
                            (f, a_nu)
                        }
                        (None, None) => (EulerState::ZERO, 0.0),
                    };
                    flux[fid * nf + a + n * b] = f;
                    gcl[fid * nf + a + n * b] = g;
                }
            }
        }
        (flux, gcl)
    }

    /// Adds `scale · R(u)` to `out`, with `R` the blended residual for both
    /// `J·u` and `J`. The blending field stays fixed for this evaluation.
    pub fn accumulate_residual(
        &self,
        stage: &Stage,
        blend: &BlendField,
        boundary: &dyn BoundaryState,
        scale: f64,
        out: &mut Solution,
    ) -> Result<(), SolverError> {
        let n = self.sbp.n_nodes();
        let npe = self.nodes_per_element();
        let nf = n * n;
        let (flux, gcl) = self.face_fluxes(stage, blend, boundary);
        let mut scratch = ElementResidual::zeros(npe);
        let trace = |fid: usize| FaceTrace {
            flux: &flux[fid * nf..(fid + 1) * nf],
            gcl: &gcl[fid * nf..(fid + 1) * nf],
        };
        for e in 0..self.mesh.n_elements() {
            let range = e * npe..(e + 1) * npe;
            let input = ElementInput {
                states: &stage.states[range.clone()],
                prims: &stage.prims[range.clone()],
                geometry: &stage.geometry.elements[e],
            };
            let ef = self.mesh.element_faces[e];
            let faces = ElementFaces {
                faces: [0, 1, 2].map(|d| [trace(ef[d][0]), trace(ef[d][1])]),
            };
            scratch.state.fill(EulerState::ZERO);
            scratch.jac.fill(0.0);
            let alpha = blend.alpha[e];
            if alpha < 1.0 {
                volume_kernel(&input, &self.sbp, &self.gas, false, 1.0 - alpha, &mut scratch);
            }
            if alpha > 0.0 {
                let mut outer = OuterValues::default();
                if self.fv_order == FvOrder::Second {
                    for d in 0..3 {
                        for side in 0..2 {
                            outer.lines[d][side] = self
                                .mesh
                                .neighbor(e, d, side)
                                .map(|nb| &stage.prims[nb * npe..(nb + 1) * npe]);
                        }
                    }
                }
                fv_interior_kernel(&input, &self.grid, &self.gas, self.fv_flux, self.fv_order, &outer, alpha, &mut scratch);
            }
            surface_kernel(&input, &faces, &self.sbp, false, 1.0, &mut scratch);
            for (i, (s, j)) in scratch.state.iter().zip(&scratch.jac).enumerate() {
                if !(s.0.iter().all(|x| x.is_finite()) && j.is_finite()) {
                    return Err(SolverError::NonFinite {
                        element: e,
                        time: stage.time,
                    });
                }
                let o = &mut out.ju[e * npe + i];
                for c in 0..5 {
                    o.0[c] += scale * s.0[c];
                }
                out.jac[e * npe + i] += scale * j;
            }
        }
        Ok(())
    }

    pub fn residual(
        &self,
        sol: &Solution,
        t: f64,
        blend: &BlendField,
        boundary: &dyn BoundaryState,
    ) -> Result<Solution, SolverError> {
        let stage = self.stage(sol, t)?;
        let mut out = Solution::zeros(sol.len());
        self.accumulate_residual(&stage, blend, boundary, 1.0, &mut out)?;
        Ok(out)
    }

    /// Largest stable step `cfl · min 2J / ((2N+1) Σ_k λ_k)` at one stage.
    pub fn stable_dt(&self, stage: &Stage, sol: &Solution, cfl: f64) -> f64 {
        let npe = self.nodes_per_element();
        let degree = self.sbp.degree as f64;
        let mut dt = f64::INFINITY;
        for (i, w) in stage.prims.iter().enumerate() {
            let g = &stage.geometry.elements[i / npe];
            let node = i % npe;
            let c = w.sound_speed(&self.gas);
            let nu = g.velocities[node];
            let rel = [w.v[0] - nu[0], w.v[1] - nu[1], w.v[2] - nu[2]];
            let sum: f64 = (0..3)
                .map(|k| {
                    let ja = g.metrics[node][k];
                    dot3(rel, ja).abs() + c * norm3(ja)
                })
                .sum();
            if sum > 0.0 {
                dt = dt.min(2.0 * sol.jac[i] / ((2.0 * degree + 1.0) * sum));
            }
        }
        cfl * dt
    }
}
