//! Per-element geometry at one time level: positions, mesh velocity,
//! Jacobian, curl-form contravariant vectors and subcell interface metrics.

use super::{GeometryNodes, Mesh, MeshError};
use crate::sbp::{interpolation_matrix, SbpOperator};

pub(crate) fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Applies `mat` (rows: output nodes) along direction `d` of a tensor field.
fn apply_dir(input: &[f64], dims: [usize; 3], mat: &[Vec<f64>], d: usize) -> (Vec<f64>, [usize; 3]) {
    let mut out_dims = dims;
    out_dims[d] = mat.len();
    let in_stride = [1, dims[0], dims[0] * dims[1]];
    let out_stride = [1, out_dims[0], out_dims[0] * out_dims[1]];
    let mut out = vec![0.0; out_dims[0] * out_dims[1] * out_dims[2]];
    // The two transverse axes.
    let (t1, t2) = match d {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    for b in 0..dims[t2] {
        for a in 0..dims[t1] {
            let ib = a * in_stride[t1] + b * in_stride[t2];
            let ob = a * out_stride[t1] + b * out_stride[t2];
            for (o, row) in mat.iter().enumerate() {
                let mut acc = 0.0;
                for (l, &w) in row.iter().enumerate() {
                    acc += w * input[ib + l * in_stride[d]];
                }
                out[ob + o * out_stride[d]] = acc;
            }
        }
    }
    (out, out_dims)
}

fn interpolate3(input: &[f64], n_in: usize, mat: &[Vec<f64>]) -> Vec<f64> {
    let (a, dims) = apply_dir(input, [n_in; 3], mat, 0);
    let (b, dims) = apply_dir(&a, dims, mat, 1);
    apply_dir(&b, dims, mat, 2).0
}

fn differentiate(input: &[f64], n: usize, sbp: &SbpOperator, d: usize) -> Vec<f64> {
    apply_dir(input, [n; 3], &sbp.derivative, d).0
}

/// Index of node `p` along direction `d` on the line with transverse
/// indices `(a, b)`, where `(a, b)` follow the remaining axes in order.
#[inline(always)]
pub fn line_node(n: usize, d: usize, p: usize, a: usize, b: usize) -> usize {
    match d {
        0 => p + n * (a + n * b),
        1 => a + n * (p + n * b),
        _ => a + n * (b + n * p),
    }
}

/// Contravariant vector `Ja^d` and mesh velocity on every subcell interface
/// of every line along direction `d`. Entry `m + (N+2)·(a + (N+1)·b)`
/// holds interface `m`, with `m = 0` at `ξ = -1` and `m = N+1` at `ξ = +1`.
#[derive(Debug, Clone)]
pub struct SubcellMetrics {
    pub normals: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
}

impl SubcellMetrics {
    #[inline]
    pub fn index(n: usize, m: usize, a: usize, b: usize) -> usize {
        m + (n + 1) * (a + n * b)
    }
}

/// Area-scaled face data at one face point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    /// `J_f = |Ja^d|`.
    pub area: f64,
    /// Outward unit normal.
    pub normal: [f64; 3],
    pub velocity: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub n: usize,
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
    /// `jacobian[node][i][j] = ∂x_i/∂ξ_j`.
    pub jacobian: Vec<[[f64; 3]; 3]>,
    pub det: Vec<f64>,
    /// `metrics[node][k]` is the contravariant vector `Ja^k` (row `k` of `Mᵀ`).
    pub metrics: Vec<[[f64; 3]; 3]>,
    pub subcell: [SubcellMetrics; 3],
}

impl ElementGeometry {
    #[allow(clippy::too_many_arguments)]
    fn compute(
        mesh: &Mesh,
        sbp: &SbpOperator,
        interp: &[Vec<f64>],
        subcell_interp: &[Vec<f64>],
        nodes: &GeometryNodes,
        e: usize,
        t: f64,
    ) -> Result<Self, MeshError> {
        let g = Self::compute_unchecked(mesh, sbp, interp, subcell_interp, nodes, e);
        if let Some((p, &j)) = g.det.iter().enumerate().find(|(_, j)| !(**j > 0.0)) {
            return Err(MeshError::InvertedElement {
                element: e,
                node: p,
                jacobian: j,
                time: t,
            });
        }
        Ok(g)
    }

    fn compute_unchecked(
        mesh: &Mesh,
        sbp: &SbpOperator,
        interp: &[Vec<f64>],
        subcell_interp: &[Vec<f64>],
        nodes: &GeometryNodes,
        e: usize,
    ) -> Self {
        let n = sbp.n_nodes();
        let ng1 = mesh.topology.geometry_degree + 1;
        let (xg, vg) = mesh.element_geometry_nodes(nodes, e);
        let comp = |src: &[[f64; 3]], c: usize| -> Vec<f64> { src.iter().map(|p| p[c]).collect() };
        let x: Vec<Vec<f64>> = (0..3).map(|c| interpolate3(&comp(&xg, c), ng1, interp)).collect();
        let v: Vec<Vec<f64>> = (0..3).map(|c| interpolate3(&comp(&vg, c), ng1, interp)).collect();
        // dx[c][d] = ∂x_c/∂ξ_d
        let dx: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|c| (0..3).map(|d| differentiate(&x[c], n, sbp, d)).collect())
            .collect();
        let total = n * n * n;
        let mut metrics = vec![[[0.0; 3]; 3]; total];
        for comp_n in 0..3 {
            let m = (comp_n + 1) % 3;
            let l = (comp_n + 2) % 3;
            // V_d = x_l ∂x_m/∂ξ_d, collocated (the degree-N interpolant).
            let vf: Vec<Vec<f64>> = (0..3)
                .map(|d| (0..total).map(|p| x[l][p] * dx[m][d][p]).collect())
                .collect();
            let d1v2 = differentiate(&vf[2], n, sbp, 1);
            let d2v1 = differentiate(&vf[1], n, sbp, 2);
            let d2v0 = differentiate(&vf[0], n, sbp, 2);
            let d0v2 = differentiate(&vf[2], n, sbp, 0);
            let d0v1 = differentiate(&vf[1], n, sbp, 0);
            let d1v0 = differentiate(&vf[0], n, sbp, 1);
            for p in 0..total {
                metrics[p][0][comp_n] = -(d1v2[p] - d2v1[p]);
                metrics[p][1][comp_n] = -(d2v0[p] - d0v2[p]);
                metrics[p][2][comp_n] = -(d0v1[p] - d1v0[p]);
            }
        }
        let mut positions = Vec::with_capacity(total);
        let mut velocities = Vec::with_capacity(total);
        let mut jacobian = Vec::with_capacity(total);
        let mut det = Vec::with_capacity(total);
        for p in 0..total {
            positions.push([x[0][p], x[1][p], x[2][p]]);
            velocities.push([v[0][p], v[1][p], v[2][p]]);
            let jm = [
                [dx[0][0][p], dx[0][1][p], dx[0][2][p]],
                [dx[1][0][p], dx[1][1][p], dx[1][2][p]],
                [dx[2][0][p], dx[2][1][p], dx[2][2][p]],
            ];
            det.push(det3(&jm));
            jacobian.push(jm);
        }
        let subcell = [0, 1, 2].map(|d| subcell_metrics(sbp, subcell_interp, &metrics, &velocities, d));
        Self {
            n,
            positions,
            velocities,
            jacobian,
            det,
            metrics,
            subcell,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.positions.len()
    }

    /// Geometry at face point `(a, b)` of the face normal to `d` on `side`.
    pub fn face_geometry(&self, d: usize, side: usize, a: usize, b: usize) -> FaceGeometry {
        let p = if side == 0 { 0 } else { self.n - 1 };
        let node = line_node(self.n, d, p, a, b);
        let ja = self.metrics[node][d];
        let area = norm3(ja);
        let s = if side == 0 { -1.0 } else { 1.0 };
        FaceGeometry {
            area,
            normal: [s * ja[0] / area, s * ja[1] / area, s * ja[2] / area],
            velocity: self.velocities[node],
        }
    }

    /// Geometry at subcell interface `m` (`0..=N+1`) of line `(a, b)` along `d`,
    /// with the normal oriented towards `+ξ_d`.
    pub fn subcell_face_geometry(&self, d: usize, m: usize, a: usize, b: usize) -> FaceGeometry {
        let i = SubcellMetrics::index(self.n, m, a, b);
        let ja = self.subcell[d].normals[i];
        let area = norm3(ja);
        FaceGeometry {
            area,
            normal: [ja[0] / area, ja[1] / area, ja[2] / area],
            velocity: self.subcell[d].velocities[i],
        }
    }

    /// `max_node |Σ_k ∂_k Ja^k|` with the collocation derivative.
    pub fn metric_identity_residual(&self, sbp: &SbpOperator) -> f64 {
        let n = self.n;
        let total = n * n * n;
        let mut div = vec![[0.0; 3]; total];
        for k in 0..3 {
            for c in 0..3 {
                let f: Vec<f64> = self.metrics.iter().map(|m| m[k][c]).collect();
                let df = differentiate(&f, n, sbp, k);
                for p in 0..total {
                    div[p][c] += df[p];
                }
            }
        }
        div.iter().flat_map(|v| v.iter()).fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Telescoping subcell metrics: `(Ja)_{m+1} = (Ja)_m + ω_m (D Ja)_m`,
/// starting from the node value at `ξ = -1`.
fn subcell_metrics(
    sbp: &SbpOperator,
    subcell_interp: &[Vec<f64>],
    metrics: &[[[f64; 3]; 3]],
    velocities: &[[f64; 3]],
    d: usize,
) -> SubcellMetrics {
    let n = sbp.n_nodes();
    let lines = n * n;
    let mut normals = vec![[0.0; 3]; (n + 1) * lines];
    let mut vels = vec![[0.0; 3]; (n + 1) * lines];
    for b in 0..n {
        for a in 0..n {
            let node = |p: usize| line_node(n, d, p, a, b);
            let mut acc = metrics[node(0)][d];
            normals[SubcellMetrics::index(n, 0, a, b)] = acc;
            for m in 0..n {
                for c in 0..3 {
                    let mut deriv = 0.0;
                    for (l, dml) in sbp.derivative[m].iter().enumerate() {
                        deriv += dml * metrics[node(l)][d][c];
                    }
                    acc[c] += sbp.weights[m] * deriv;
                }
                normals[SubcellMetrics::index(n, m + 1, a, b)] = acc;
            }
            for (m, row) in subcell_interp.iter().enumerate() {
                let mut nu = [0.0; 3];
                for (l, w) in row.iter().enumerate() {
                    for c in 0..3 {
                        nu[c] += w * velocities[node(l)][c];
                    }
                }
                vels[SubcellMetrics::index(n, m, a, b)] = nu;
            }
        }
    }
    SubcellMetrics {
        normals,
        velocities: vels,
    }
}

/// Subcell interface coordinates `-1 + Σ_{j<m} ω_j`, `m = 0..=N+1`.
pub fn subcell_interface_coordinates(sbp: &SbpOperator) -> Vec<f64> {
    let n = sbp.n_nodes();
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = -1.0;
    out.push(acc);
    for m in 0..n {
        acc += sbp.weights[m];
        out.push(acc);
    }
    out[n] = 1.0;
    out
}

/// Geometry of every element at one time level.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub time: f64,
    pub elements: Vec<ElementGeometry>,
}

impl MeshGeometry {
    pub fn compute(mesh: &Mesh, sbp: &SbpOperator, t: f64) -> Result<Self, MeshError> {
        let ng = mesh.topology.geometry_degree;
        if ng > sbp.degree {
            return Err(MeshError::GeometryDegree {
                got: ng,
                max: sbp.degree,
            });
        }
        let interp = interpolation_matrix(mesh.geometry_reference_nodes(), &sbp.nodes)?;
        let coords = subcell_interface_coordinates(sbp);
        let subcell_interp = interpolation_matrix(&sbp.nodes, &coords)?;
        let nodes = mesh.geometry_nodes(t);
        let elements = (0..mesh.n_elements())
            .map(|e| ElementGeometry::compute(mesh, sbp, &interp, &subcell_interp, &nodes, e, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { time: t, elements })
    }

    pub fn max_metric_identity_residual(&self, sbp: &SbpOperator) -> f64 {
        self.elements
            .iter()
            .map(|g| g.metric_identity_residual(sbp))
            .fold(0.0, f64::max)
    }
}

/// Geometry as a polynomial in the motion's time factor `f`: positions and
/// the Jacobian matrix are linear in `f`, the curl-form metrics and their
/// telescoped subcell values quadratic, and velocities scale with `f'`.
/// Built once from three exact samples, so each stage costs a few axpys.
#[derive(Debug, Clone)]
pub struct GeometryBasis {
    elements: Vec<ElementBasis>,
}

#[derive(Debug, Clone)]
struct ElementBasis {
    positions: [Vec<[f64; 3]>; 2],
    jacobian: [Vec<[[f64; 3]; 3]>; 2],
    metrics: [Vec<[[f64; 3]; 3]>; 3],
    subcell_normals: [[Vec<[f64; 3]>; 3]; 3],
    /// Values for `f' = 1`.
    velocities: Vec<[f64; 3]>,
    subcell_velocities: [Vec<[f64; 3]>; 3],
}

fn lin3(c: &[Vec<[f64; 3]>], f: f64) -> Vec<[f64; 3]> {
    let f2 = f * f;
    let mut out = Vec::with_capacity(c[0].len());
    match c {
        [c0, c1] => {
            for (a, b) in c0.iter().zip(c1) {
                out.push([a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2]]);
            }
        }
        [c0, c1, c2] => {
            for ((a, b), q) in c0.iter().zip(c1).zip(c2) {
                out.push([
                    a[0] + f * b[0] + f2 * q[0],
                    a[1] + f * b[1] + f2 * q[1],
                    a[2] + f * b[2] + f2 * q[2],
                ]);
            }
        }
        _ => unreachable!("linear or quadratic basis"),
    }
    out
}

fn lin33(c: &[Vec<[[f64; 3]; 3]>], f: f64) -> Vec<[[f64; 3]; 3]> {
    let f2 = f * f;
    let zero = [[0.0; 3]; 3];
    let mut out = vec![zero; c[0].len()];
    for (w, coef) in c.iter().zip([1.0, f, f2]) {
        for (o, m) in out.iter_mut().zip(w) {
            for r in 0..3 {
                for k in 0..3 {
                    o[r][k] += coef * m[r][k];
                }
            }
        }
    }
    out
}

fn scaled(v: &[[f64; 3]], a: f64) -> Vec<[f64; 3]> {
    v.iter().map(|x| x.map(|c| a * c)).collect()
}

impl ElementBasis {
    /// Samples at `f = 0, 1, -1`.
    fn from_samples(g0: ElementGeometry, gp: ElementGeometry, gm: ElementGeometry) -> Self {
        let d1 = |a: &[f64; 3], b: &[f64; 3]| [0, 1, 2].map(|k| 0.5 * (a[k] - b[k]));
        let d2 = |a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]| [0, 1, 2].map(|k| 0.5 * (a[k] + b[k]) - c[k]);
        let quad = |p: &[[f64; 3]], m: &[[f64; 3]], z: &[[f64; 3]]| -> [Vec<[f64; 3]>; 3] {
            [
                z.to_vec(),
                p.iter().zip(m).map(|(a, b)| d1(a, b)).collect(),
                p.iter().zip(m).zip(z).map(|((a, b), c)| d2(a, b, c)).collect(),
            ]
        };
        let quad33 = |p: &[[[f64; 3]; 3]], m: &[[[f64; 3]; 3]], z: &[[[f64; 3]; 3]]| -> [Vec<[[f64; 3]; 3]>; 3] {
            let n = z.len();
            let mut out = [z.to_vec(), vec![[[0.0; 3]; 3]; n], vec![[[0.0; 3]; 3]; n]];
            for i in 0..n {
                for r in 0..3 {
                    out[1][i][r] = d1(&p[i][r], &m[i][r]);
                    out[2][i][r] = d2(&p[i][r], &m[i][r], &z[i][r]);
                }
            }
            out
        };
        let positions = {
            let [a, b, _] = quad(&gp.positions, &gm.positions, &g0.positions);
            [a, b]
        };
        let jacobian = {
            let [a, b, _] = quad33(&gp.jacobian, &gm.jacobian, &g0.jacobian);
            [a, b]
        };
        let metrics = quad33(&gp.metrics, &gm.metrics, &g0.metrics);
        let subcell_normals =
            [0, 1, 2].map(|d| quad(&gp.subcell[d].normals, &gm.subcell[d].normals, &g0.subcell[d].normals));
        Self {
            positions,
            jacobian,
            metrics,
            subcell_normals,
            velocities: g0.velocities,
            subcell_velocities: g0.subcell.map(|s| s.velocities),
        }
    }

    fn evaluate(&self, n: usize, f: f64, fdot: f64, e: usize, t: f64) -> Result<ElementGeometry, MeshError> {
        let jacobian = lin33(&self.jacobian, f);
        let mut det = Vec::with_capacity(jacobian.len());
        for (p, jm) in jacobian.iter().enumerate() {
            let j = det3(jm);
            if !(j > 0.0) {
                return Err(MeshError::InvertedElement {
                    element: e,
                    node: p,
                    jacobian: j,
                    time: t,
                });
            }
            det.push(j);
        }
        let subcell = [0, 1, 2].map(|d| SubcellMetrics {
            normals: lin3(&self.subcell_normals[d], f),
            velocities: scaled(&self.subcell_velocities[d], fdot),
        });
        Ok(ElementGeometry {
            n,
            positions: lin3(&self.positions, f),
            velocities: scaled(&self.velocities, fdot),
            jacobian,
            det,
            metrics: lin33(&self.metrics, f),
            subcell,
        })
    }
}

impl GeometryBasis {
    pub fn new(mesh: &Mesh, sbp: &SbpOperator) -> Result<Self, MeshError> {
        let ng = mesh.topology.geometry_degree;
        if ng > sbp.degree {
            return Err(MeshError::GeometryDegree {
                got: ng,
                max: sbp.degree,
            });
        }
        let interp = interpolation_matrix(mesh.geometry_reference_nodes(), &sbp.nodes)?;
        let coords = subcell_interface_coordinates(sbp);
        let subcell_interp = interpolation_matrix(&sbp.nodes, &coords)?;
        let samples = [0.0, 1.0, -1.0].map(|f| mesh.geometry_nodes_at_factor(f, 1.0));
        let mut elements = Vec::with_capacity(mesh.n_elements());
        for e in 0..mesh.n_elements() {
            // Sample geometry may be inverted at |f| = 1; only the evaluated
            // times are checked.
            let g = samples
                .each_ref()
                .map(|nodes| ElementGeometry::compute_unchecked(mesh, sbp, &interp, &subcell_interp, nodes, e));
            let [g0, gp, gm] = g;
            elements.push(ElementBasis::from_samples(g0, gp, gm));
        }
        Ok(Self { elements })
    }

    pub fn evaluate(&self, mesh: &Mesh, sbp: &SbpOperator, t: f64) -> Result<MeshGeometry, MeshError> {
        let (f, fdot) = mesh.motion.time_factor(t);
        let n = sbp.n_nodes();
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(e, b)| b.evaluate(n, f, fdot, e, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MeshGeometry { time: t, elements })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, MeshTopology, MotionSpec};

    #[test]
    fn affine_cube_metrics() {
        let topo = MeshTopology::periodic_box([2; 3], [-1.0; 3], [1.0; 3], 1);
        let mesh = build_mesh(topo, MotionSpec::Static).unwrap();
        let sbp = SbpOperator::new(3).unwrap();
        let geo = MeshGeometry::compute(&mesh, &sbp, 0.0).unwrap();
        for g in &geo.elements {
            for (j, m) in g.det.iter().zip(&g.metrics) {
                assert!((j - 0.125).abs() < 1e-15);
                for k in 0..3 {
                    for c in 0..3 {
                        let expect = if k == c { 0.25 } else { 0.0 };
                        assert!((m[k][c] - expect).abs() < 1e-15);
                    }
                }
            }
            let f = g.face_geometry(0, 1, 1, 2);
            assert!((f.area - 0.25).abs() < 1e-15);
            assert!((f.normal[0] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn curl_form_matches_cofactors_for_trilinear_maps() {
        let topo = MeshTopology::periodic_box([2, 2, 2], [-1.0; 3], [1.0; 3], 1);
        let motion = MotionSpec::CornerSinusoid {
            amplitude: [0.1, 0.07, 0.05],
            angular_frequency: 2.0,
        };
        let mesh = build_mesh(topo, motion).unwrap();
        let sbp = SbpOperator::new(3).unwrap();
        let geo = MeshGeometry::compute(&mesh, &sbp, 0.6).unwrap();
        for g in &geo.elements {
            for (jm, m) in g.jacobian.iter().zip(&g.metrics) {
                let col = |j: usize| [jm[0][j], jm[1][j], jm[2][j]];
                let cross = |a: [f64; 3], b: [f64; 3]| {
                    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
                };
                let expect = [cross(col(1), col(2)), cross(col(2), col(0)), cross(col(0), col(1))];
                for k in 0..3 {
                    for c in 0..3 {
                        assert!((m[k][c] - expect[k][c]).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn subcell_interfaces_close_onto_faces() {
        let topo = MeshTopology::periodic_box([2, 1, 2], [0.0; 3], [1.0, 2.0, 1.0], 2);
        let motion = MotionSpec::StandingWave {
            amplitude: 0.03,
            wavenumbers: [1.0, 1.0, 1.0],
            angular_frequency: 1.0,
        };
        let mesh = build_mesh(topo, motion).unwrap();
        let sbp = SbpOperator::new(4).unwrap();
        let geo = MeshGeometry::compute(&mesh, &sbp, 1.0).unwrap();
        let n = sbp.n_nodes();
        for g in &geo.elements {
            for d in 0..3 {
                for b in 0..n {
                    for a in 0..n {
                        let right = g.face_geometry(d, 1, a, b);
                        let sub = g.subcell_face_geometry(d, n, a, b);
                        assert!((right.area - sub.area).abs() < 1e-13);
                        for c in 0..3 {
                            assert!((right.normal[c] - sub.normal[c]).abs() < 1e-13);
                            assert!((right.velocity[c] - sub.velocity[c]).abs() < 1e-14);
                        }
                        let left = g.face_geometry(d, 0, a, b);
                        let sub = g.subcell_face_geometry(d, 0, a, b);
                        assert_eq!(left.area, sub.area);
                        assert_eq!(left.normal.map(|v| -v), sub.normal);
                    }
                }
            }
        }
    }

    #[test]
    fn subcell_coordinates() {
        let c = subcell_interface_coordinates(&SbpOperator::new(2).unwrap());
        for (a, b) in c.iter().zip([-1.0, -2.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn runtime_inversion_detected() {
        let topo = MeshTopology::periodic_box([2; 3], [-1.0; 3], [1.0; 3], 1);
        let motion = MotionSpec::CornerSinusoid {
            amplitude: [3.0; 3],
            angular_frequency: 1.0,
        };
        let mesh = build_mesh(topo, motion).unwrap();
        let sbp = SbpOperator::new(2).unwrap();
        let err = MeshGeometry::compute(&mesh, &sbp, std::f64::consts::FRAC_PI_2).unwrap_err();
        assert!(matches!(err, MeshError::InvertedElement { .. }));
    }
}
