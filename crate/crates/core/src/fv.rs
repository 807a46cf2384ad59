//! Subcell finite-volume operator. Each GL node owns a subcell of width
//! `ω_i` in reference space; interfaces carry the telescoped metrics so the
//! scheme preserves constant states on moving curved meshes.

use serde::{Deserialize, Serialize};

use crate::dg::surface_kernel;
use crate::mesh::geometry::{dot3, line_node, subcell_interface_coordinates, SubcellMetrics};
use crate::physics::{EulerState, GasModel, NumericalFlux, Primitive};
use crate::residual::{ElementFaces, ElementInput, ElementResidual};
use crate::sbp::{SbpOperator, MAX_DEGREE};

const MAX_NODES: usize = MAX_DEGREE + 1;

/// Subcell layout in reference coordinates `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcellGrid {
    /// `N+2` interface positions.
    pub interfaces: Vec<f64>,
    pub widths: Vec<f64>,
    pub centroids: Vec<f64>,
}

impl SubcellGrid {
    pub fn new(sbp: &SbpOperator) -> Self {
        let interfaces = subcell_interface_coordinates(sbp);
        let centroids = interfaces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self {
            interfaces,
            widths: sbp.weights.clone(),
            centroids,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.widths.len()
    }
}

/// Reconstruction order of the subcell scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FvOrder {
    First,
    Second,
}

impl TryFrom<u8> for FvOrder {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(FvOrder::First),
            2 => Ok(FvOrder::Second),
            other => Err(format!("fv_order must be 1 or 2, got {other}")),
        }
    }
}

impl From<FvOrder> for u8 {
    fn from(o: FvOrder) -> u8 {
        match o {
            FvOrder::First => 1,
            FvOrder::Second => 2,
        }
    }
}

type PVec = [f64; 5];

#[inline]
fn pvec(w: &Primitive) -> PVec {
    [w.rho, w.v[0], w.v[1], w.v[2], w.p]
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a > 0.0 {
        a.min(b)
    } else {
        a.max(b)
    }
}

#[inline]
fn extrapolate(w: &Primitive, slope: &PVec, dx: f64) -> Option<Primitive> {
    let p = pvec(w);
    let e = |c: usize| p[c] + slope[c] * dx;
    Primitive::from_values(e(0), [e(1), e(2), e(3)], e(4))
}

/// Minmod slope for a cell with optional neighbours; a missing neighbour
/// gives a zero slope.
#[inline]
fn slope(w: &Primitive, back: Option<(&Primitive, f64)>, fwd: Option<(&Primitive, f64)>) -> PVec {
    let (Some((wb, db)), Some((wf, df))) = (back, fwd) else {
        return [0.0; 5];
    };
    let (p, pb, pf) = (pvec(w), pvec(wb), pvec(wf));
    let mut s = [0.0; 5];
    for c in 0..5 {
        s[c] = minmod((p[c] - pb[c]) / db, (pf[c] - p[c]) / df);
    }
    s
}

/// Interface states along one line of subcells.
#[derive(Debug, Clone, PartialEq)]
pub struct LineReconstruction {
    /// `(left, right)` states at the interior interfaces `m = 1..=N`.
    pub interior: Vec<(Primitive, Primitive)>,
    /// Reconstructed value at `ξ = -1` and `ξ = +1`.
    pub left_face: Primitive,
    pub right_face: Primitive,
}

struct LineStates {
    left: [Option<Primitive>; MAX_NODES],
    right: [Option<Primitive>; MAX_NODES],
}

/// Reconstructs primitive states at every subcell interface of a line.
/// Slot `m` holds the states left/right of interface `m` (`0..=N+1`);
/// `None` marks an invalid state.
fn line_states(
    values: &[Primitive],
    outer_left: Option<&Primitive>,
    outer_right: Option<&Primitive>,
    grid: &SubcellGrid,
) -> LineStates {
    let n = values.len();
    let mut slopes = [[0.0; 5]; MAX_NODES];
    for i in 0..n {
        let back = if i > 0 {
            Some((&values[i - 1], grid.centroids[i] - grid.centroids[i - 1]))
        } else {
            outer_left.map(|w| (w, grid.widths[0]))
        };
        let fwd = if i + 1 < n {
            Some((&values[i + 1], grid.centroids[i + 1] - grid.centroids[i]))
        } else {
            outer_right.map(|w| (w, grid.widths[n - 1]))
        };
        slopes[i] = slope(&values[i], back, fwd);
    }
    let mut out = LineStates {
        left: [None; MAX_NODES],
        right: [None; MAX_NODES],
    };
    // Right state of interface m comes from cell m, left state from cell m-1.
    for m in 0..=n {
        if m > 0 {
            out.left[m] = extrapolate(&values[m - 1], &slopes[m - 1], grid.interfaces[m] - grid.centroids[m - 1]);
        }
        if m < n {
            out.right[m] = extrapolate(&values[m], &slopes[m], grid.interfaces[m] - grid.centroids[m]);
        }
    }
    out
}

/// Second-order interface states of one line with invalid pairs replaced by
/// the first-order cell values.
pub fn reconstruct_line(
    values: &[Primitive],
    outer_left: Option<&Primitive>,
    outer_right: Option<&Primitive>,
    grid: &SubcellGrid,
) -> LineReconstruction {
    let n = values.len();
    let st = line_states(values, outer_left, outer_right, grid);
    let interior = (1..n)
        .map(|m| match (st.left[m], st.right[m]) {
            (Some(l), Some(r)) => (l, r),
            _ => (values[m - 1], values[m]),
        })
        .collect();
    LineReconstruction {
        interior,
        left_face: st.right[0].unwrap_or(values[0]),
        right_face: st.left[n].unwrap_or(values[n - 1]),
    }
}

/// Subcell states on both sides of an element face, from the two cells of
/// each neighbour nearest to the face (`minus = [N-1, N]`, `plus = [0, 1]`).
/// Falls back to the face-adjacent cell values if either state is invalid.
pub fn face_fv_states(
    minus: [&Primitive; 2],
    plus: [&Primitive; 2],
    grid: &SubcellGrid,
) -> (Primitive, Primitive) {
    let n = grid.n_cells();
    let (cm, cp) = (grid.centroids[n - 1], grid.centroids[0]);
    let inner_m = if n > 1 { grid.centroids[n - 1] - grid.centroids[n - 2] } else { 0.0 };
    let inner_p = if n > 1 { grid.centroids[1] - grid.centroids[0] } else { 0.0 };
    let across = grid.widths[0];
    let sm = slope(minus[1], (n > 1).then_some((minus[0], inner_m)), Some((plus[0], across)));
    let sp = slope(plus[0], Some((minus[1], across)), (n > 1).then_some((plus[1], inner_p)));
    match (
        extrapolate(minus[1], &sm, 1.0 - cm),
        extrapolate(plus[0], &sp, -1.0 - cp),
    ) {
        (Some(l), Some(r)) => (l, r),
        _ => (*minus[1], *plus[0]),
    }
}

/// Primitive values of the face-adjacent nodes of the neighbouring
/// elements, used as outer stencil points by second-order reconstruction.
/// `lines[d][side]` is the neighbour's full nodal primitive slice.
#[derive(Debug, Clone, Copy, Default)]
pub struct OuterValues<'a> {
    pub lines: [[Option<&'a [Primitive]>; 2]; 3],
}

#[inline]
fn conserved(w: &Primitive, gas: &GasModel) -> EulerState {
    EulerState::from_primitive(w.rho, w.v, w.p, gas)
}

/// Adds `scale · M⁻¹` times the interior subcell flux differences.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fv_interior_kernel(
    input: &ElementInput,
    grid: &SubcellGrid,
    gas: &GasModel,
    flux: NumericalFlux,
    order: FvOrder,
    outer: &OuterValues,
    scale: f64,
    out: &mut ElementResidual,
) {
    let n = grid.n_cells();
    let geo = input.geometry;
    let mut line = [input.prims[0]; MAX_NODES];
    for d in 0..3 {
        let sub = &geo.subcell[d];
        for b in 0..n {
            for a in 0..n {
                let node = |p: usize| line_node(n, d, p, a, b);
                let states = if order == FvOrder::Second {
                    for (p, slot) in line.iter_mut().enumerate().take(n) {
                        *slot = input.prims[node(p)];
                    }
                    let ol = outer.lines[d][0].map(|w| &w[line_node(n, d, n - 1, a, b)]);
                    let or = outer.lines[d][1].map(|w| &w[line_node(n, d, 0, a, b)]);
                    Some(line_states(&line[..n], ol, or, grid))
                } else {
                    None
                };
                for m in 1..n {
                    let (il, ir) = (node(m - 1), node(m));
                    let idx = SubcellMetrics::index(n, m, a, b);
                    let ja = sub.normals[idx];
                    let a_nu = dot3(ja, sub.velocities[idx]);
                    let f = match states.as_ref().and_then(|s| s.left[m].zip(s.right[m])) {
                        Some((wl, wr)) => {
                            flux.evaluate(&conserved(&wl, gas), &conserved(&wr, gas), &wl, &wr, gas, ja, a_nu)
                        }
                        None => flux.evaluate(
                            &input.states[il],
                            &input.states[ir],
                            &input.prims[il],
                            &input.prims[ir],
                            gas,
                            ja,
                            a_nu,
                        ),
                    };
                    let cl = scale / grid.widths[m - 1];
                    let cr = scale / grid.widths[m];
                    for k in 0..5 {
                        out.state[il].0[k] -= cl * f.0[k];
                        out.state[ir].0[k] += cr * f.0[k];
                    }
                    out.jac[il] += cl * a_nu;
                    out.jac[ir] -= cr * a_nu;
                }
            }
        }
    }
}

/// Full subcell residual: interior flux differences plus the element face
/// fluxes, which enter exactly as in the DG surface term.
#[allow(clippy::too_many_arguments)]
pub fn fv_element_residual(
    input: &ElementInput,
    faces: &ElementFaces,
    grid: &SubcellGrid,
    sbp: &SbpOperator,
    gas: &GasModel,
    flux: NumericalFlux,
    order: FvOrder,
    outer: &OuterValues,
) -> ElementResidual {
    let mut out = ElementResidual::zeros(input.states.len());
    fv_interior_kernel(input, grid, gas, flux, order, outer, 1.0, &mut out);
    surface_kernel(input, faces, sbp, false, 1.0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbp::build_sbp;

    fn prim(rho: f64, u: f64, p: f64) -> Primitive {
        Primitive::from_values(rho, [u, 0.0, 0.0], p).unwrap()
    }

    #[test]
    fn grid_partitions_reference_interval() {
        for n in 1..=8 {
            let g = SubcellGrid::new(&build_sbp(n).unwrap());
            assert_eq!(g.interfaces.len(), n + 2);
            assert_eq!(g.interfaces[0], -1.0);
            assert_eq!(g.interfaces[n + 1], 1.0);
            let total: f64 = g.widths.iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
            for i in 0..=n {
                assert!(g.interfaces[i] < g.centroids[i] && g.centroids[i] < g.interfaces[i + 1]);
            }
        }
    }

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-3.0, -2.0), -2.0);
        assert_eq!(minmod(1.0, -2.0), 0.0);
        assert_eq!(minmod(0.0, 5.0), 0.0);
    }

    #[test]
    fn linear_data_is_reproduced() {
        let sbp = build_sbp(4).unwrap();
        let g = SubcellGrid::new(&sbp);
        let f = |x: f64| prim(1.0 + 0.1 * x, 0.5 - 0.2 * x, 2.0 + 0.3 * x);
        let vals: Vec<_> = g.centroids.iter().map(|&c| f(c)).collect();
        let ol = f(g.centroids[0] - g.widths[0]);
        let or = f(g.centroids[4] + g.widths[4]);
        let rec = reconstruct_line(&vals, Some(&ol), Some(&or), &g);
        for (m, (l, r)) in rec.interior.iter().enumerate() {
            let e = f(g.interfaces[m + 1]);
            for (a, b) in [(l, &e), (r, &e)] {
                assert!((a.rho - b.rho).abs() < 1e-13);
                assert!((a.v[0] - b.v[0]).abs() < 1e-13);
                assert!((a.p - b.p).abs() < 1e-13);
            }
        }
        assert!((rec.left_face.rho - f(-1.0).rho).abs() < 1e-13);
        assert!((rec.right_face.p - f(1.0).p).abs() < 1e-13);
    }

    #[test]
    fn extrema_get_zero_slope_and_boundaries_without_neighbours_are_flat() {
        let sbp = build_sbp(2).unwrap();
        let g = SubcellGrid::new(&sbp);
        let vals = [prim(1.0, 0.0, 1.0), prim(2.0, 0.0, 1.0), prim(1.0, 0.0, 1.0)];
        let rec = reconstruct_line(&vals, None, None, &g);
        assert_eq!(rec.interior[0].1.rho, 2.0);
        assert_eq!(rec.interior[1].0.rho, 2.0);
        assert_eq!(rec.left_face, vals[0]);
        assert_eq!(rec.right_face, vals[2]);
    }

    #[test]
    fn face_states_continue_linear_data_across_elements() {
        let sbp = build_sbp(3).unwrap();
        let g = SubcellGrid::new(&sbp);
        // Minus element occupies [-3, -1], plus element [-1, 1].
        let f = |x: f64| prim(2.0 + 0.1 * x, 0.3, 1.0 + 0.05 * x);
        let m = [f(g.centroids[2] - 2.0), f(g.centroids[3] - 2.0)];
        let p = [f(g.centroids[0]), f(g.centroids[1])];
        let (l, r) = face_fv_states([&m[0], &m[1]], [&p[0], &p[1]], &g);
        assert!((l.rho - f(-1.0).rho).abs() < 1e-13);
        assert!((r.rho - f(-1.0).rho).abs() < 1e-13);
        assert!((l.p - r.p).abs() < 1e-13);
    }

    #[test]
    fn invalid_reconstruction_falls_back_to_cell_values() {
        let sbp = build_sbp(1).unwrap();
        let g = SubcellGrid::new(&sbp);
        // Steep pressure drop: extrapolated pressure would go negative.
        let vals = [prim(1.0, 0.0, 10.0), prim(1.0, 0.0, 1e-3)];
        let ol = prim(1.0, 0.0, 20.0);
        let or = prim(1.0, 0.0, 1e-6);
        let rec = reconstruct_line(&vals, Some(&ol), Some(&or), &g);
        let (l, r) = rec.interior[0];
        assert!(l.p > 0.0 && r.p > 0.0);
        let order_test = FvOrder::try_from(3u8);
        assert!(order_test.is_err());
    }
}
