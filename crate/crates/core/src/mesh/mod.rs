//! Structured hexahedral meshes with analytic motion, curved element
//! geometry and the metric terms the operators consume.

pub mod geometry;
pub mod motion;

pub use geometry::{ElementGeometry, FaceGeometry, GeometryBasis, MeshGeometry, SubcellMetrics};
pub use motion::{BoxDomain, MotionSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sbp::{chebyshev_lobatto, derivative_matrix, OperatorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("element count along axis {axis} must be at least 1")]
    EmptyAxis { axis: usize },
    #[error("domain extent along axis {axis} must be positive")]
    DegenerateDomain { axis: usize },
    #[error("geometry degree must be between 1 and the solution degree {max}, got {got}")]
    GeometryDegree { got: usize, max: usize },
    #[error("inverted element {element} at node {node} (J = {jacobian:e}, t = {time})")]
    InvertedElement {
        element: usize,
        node: usize,
        jacobian: f64,
        time: f64,
    },
    #[error("degenerate face on element {element} (direction {direction})")]
    DegenerateFace { element: usize, direction: usize },
    #[error("piston start {0} does not coincide with an x-face of the mesh")]
    PistonOffGrid(f64),
    #[error("piston motion requires a non-periodic x-axis")]
    PistonPeriodic,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshTopology {
    pub cells: [usize; 3],
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub periodic: [bool; 3],
    pub geometry_degree: usize,
}

impl MeshTopology {
    pub fn periodic_box(cells: [usize; 3], lower: [f64; 3], upper: [f64; 3], geometry_degree: usize) -> Self {
        Self {
            cells,
            lower,
            upper,
            periodic: [true; 3],
            geometry_degree,
        }
    }

    pub fn domain(&self) -> BoxDomain {
        BoxDomain {
            lower: self.lower,
            upper: self.upper,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.cells.iter().product()
    }

    /// Reference (undeformed) element edge length along `d`.
    pub fn spacing(&self, d: usize) -> f64 {
        (self.upper[d] - self.lower[d]) / self.cells[d] as f64
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        for axis in 0..3 {
            if self.cells[axis] == 0 {
                return Err(MeshError::EmptyAxis { axis });
            }
            if !(self.upper[axis] > self.lower[axis]) {
                return Err(MeshError::DegenerateDomain { axis });
            }
        }
        if self.geometry_degree == 0 {
            return Err(MeshError::GeometryDegree {
                got: 0,
                max: crate::sbp::MAX_DEGREE,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    /// Ghost state from the reference flow.
    Dirichlet,
    /// Reflecting wall that moves with the mesh.
    Wall,
}

/// A face normal to reference direction `dir`. `minus` lies on the `-ξ`
/// side (the face is that element's `ξ = +1` face), `plus` on the `+ξ` side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub dir: usize,
    pub minus: Option<usize>,
    pub plus: Option<usize>,
    pub kind: FaceKind,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub topology: MeshTopology,
    pub motion: MotionSpec,
    pub faces: Vec<Face>,
    /// `element_faces[e][d][side]`, `side = 0` for `ξ_d = -1`.
    pub element_faces: Vec<[[usize; 2]; 3]>,
    geo_nodes: Vec<f64>,
}

/// Motion samples at the unique global geometry nodes.
#[derive(Debug, Clone)]
pub struct GeometryNodes {
    pub dims: [usize; 3],
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
}

impl Mesh {
    pub fn element_index(&self, c: [usize; 3]) -> usize {
        let n = self.topology.cells;
        c[0] + n[0] * (c[1] + n[1] * c[2])
    }

    pub fn element_coords(&self, e: usize) -> [usize; 3] {
        let n = self.topology.cells;
        [e % n[0], (e / n[0]) % n[1], e / (n[0] * n[1])]
    }

    pub fn n_elements(&self) -> usize {
        self.topology.n_elements()
    }

    /// Neighbour across the given side, `None` on boundaries and walls.
    pub fn neighbor(&self, e: usize, d: usize, side: usize) -> Option<usize> {
        let f = &self.faces[self.element_faces[e][d][side]];
        if f.kind != FaceKind::Interior {
            return None;
        }
        if side == 0 {
            f.minus
        } else {
            f.plus
        }
    }

    /// Geometry node coordinates in `[-1, 1]` (Chebyshev–Lobatto).
    pub fn geometry_reference_nodes(&self) -> &[f64] {
        &self.geo_nodes
    }

    fn reference_coordinate(&self, d: usize, g: usize) -> f64 {
        let ng = self.topology.geometry_degree;
        let n = self.topology.cells[d];
        let (e, j) = if g == n * ng { (n, 0) } else { (g / ng, g % ng) };
        let s = (e as f64 + 0.5 * (1.0 + self.geo_nodes[j])) / n as f64;
        if g == n * ng {
            self.topology.upper[d]
        } else {
            self.topology.lower[d] + s * (self.topology.upper[d] - self.topology.lower[d])
        }
    }

    /// Evaluates the motion once at every unique geometry node.
    pub fn geometry_nodes(&self, t: f64) -> GeometryNodes {
        let (f, fdot) = self.motion.time_factor(t);
        self.geometry_nodes_at_factor(f, fdot)
    }

    /// Geometry nodes for `x = X + f Φ(X)`, `ν = f' Φ(X)`.
    pub fn geometry_nodes_at_factor(&self, f: f64, fdot: f64) -> GeometryNodes {
        let ng = self.topology.geometry_degree;
        let dims = [0, 1, 2].map(|d| self.topology.cells[d] * ng + 1);
        let domain = self.topology.domain();
        let coords: Vec<Vec<f64>> = (0..3)
            .map(|d| (0..dims[d]).map(|g| self.reference_coordinate(d, g)).collect())
            .collect();
        let total = dims[0] * dims[1] * dims[2];
        let mut positions = Vec::with_capacity(total);
        let mut velocities = Vec::with_capacity(total);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let x_ref = [coords[0][i], coords[1][j], coords[2][k]];
                    let phi = self.motion.displacement_shape(&domain, x_ref);
                    positions.push([0, 1, 2].map(|c| x_ref[c] + f * phi[c]));
                    velocities.push(phi.map(|p| fdot * p));
                }
            }
        }
        GeometryNodes {
            dims,
            positions,
            velocities,
        }
    }

    /// Positions and velocities of the `(N_geo+1)³` geometry nodes of `e`.
    pub(crate) fn element_geometry_nodes(&self, nodes: &GeometryNodes, e: usize) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
        let ng = self.topology.geometry_degree;
        let c = self.element_coords(e);
        let m = ng + 1;
        let mut x = Vec::with_capacity(m * m * m);
        let mut v = Vec::with_capacity(m * m * m);
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let g = (c[0] * ng + i) + nodes.dims[0] * ((c[1] * ng + j) + nodes.dims[1] * (c[2] * ng + k));
                    x.push(nodes.positions[g]);
                    v.push(nodes.velocities[g]);
                }
            }
        }
        (x, v)
    }
}

/// Builds connectivity for a structured box, classifies boundary faces and
/// rejects inverted initial elements.
pub fn build_mesh(topology: MeshTopology, motion: MotionSpec) -> Result<Mesh, MeshError> {
    topology.validate()?;
    let wall_face = match motion {
        MotionSpec::PistonChannel { piston_start, .. } => {
            if topology.periodic[0] {
                return Err(MeshError::PistonPeriodic);
            }
            let f = (piston_start - topology.lower[0]) / topology.spacing(0);
            let fi = f.round();
            if (f - fi).abs() > 1e-9 || fi < 1.0 || fi >= topology.cells[0] as f64 {
                return Err(MeshError::PistonOffGrid(piston_start));
            }
            Some(fi as usize)
        }
        _ => None,
    };
    let n = topology.cells;
    let idx = |c: [usize; 3]| c[0] + n[0] * (c[1] + n[1] * c[2]);
    let mut faces = Vec::new();
    let mut element_faces = vec![[[usize::MAX; 2]; 3]; topology.n_elements()];
    for d in 0..3 {
        let (t1, t2) = match d {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let planes = if topology.periodic[d] { n[d] } else { n[d] + 1 };
        for b in 0..n[t2] {
            for a in 0..n[t1] {
                let elem = |p: usize| {
                    let mut c = [0; 3];
                    c[d] = p;
                    c[t1] = a;
                    c[t2] = b;
                    idx(c)
                };
                for f in 0..planes {
                    let mut push = |minus: Option<usize>, plus: Option<usize>, kind| {
                        let id = faces.len();
                        faces.push(Face { dir: d, minus, plus, kind });
                        if let Some(m) = minus {
                            element_faces[m][d][1] = id;
                        }
                        if let Some(p) = plus {
                            element_faces[p][d][0] = id;
                        }
                    };
                    if topology.periodic[d] {
                        let minus = if f == 0 { n[d] - 1 } else { f - 1 };
                        push(Some(elem(minus)), Some(elem(f)), FaceKind::Interior);
                    } else if f == 0 {
                        push(None, Some(elem(0)), FaceKind::Dirichlet);
                    } else if f == n[d] {
                        push(Some(elem(f - 1)), None, FaceKind::Dirichlet);
                    } else if d == 0 && wall_face == Some(f) {
                        push(Some(elem(f - 1)), None, FaceKind::Wall);
                        push(None, Some(elem(f)), FaceKind::Wall);
                    } else {
                        push(Some(elem(f - 1)), Some(elem(f)), FaceKind::Interior);
                    }
                }
            }
        }
    }
    let geo_nodes = chebyshev_lobatto(topology.geometry_degree);
    let mesh = Mesh {
        topology,
        motion,
        faces,
        element_faces,
        geo_nodes,
    };
    check_initial_orientation(&mesh)?;
    Ok(mesh)
}

/// `det(∂x/∂ξ) > 0` at the geometry nodes of every element at `t = 0`.
fn check_initial_orientation(mesh: &Mesh) -> Result<(), MeshError> {
    let ng = mesh.topology.geometry_degree;
    let m = ng + 1;
    let d = derivative_matrix(&mesh.geo_nodes)?;
    let nodes = mesh.geometry_nodes(0.0);
    for e in 0..mesh.n_elements() {
        let (x, _) = mesh.element_geometry_nodes(&nodes, e);
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let mut jm = [[0.0; 3]; 3];
                    for l in 0..m {
                        for c in 0..3 {
                            jm[c][0] += d[i][l] * x[l + m * (j + m * k)][c];
                            jm[c][1] += d[j][l] * x[i + m * (l + m * k)][c];
                            jm[c][2] += d[k][l] * x[i + m * (j + m * l)][c];
                        }
                    }
                    let det = geometry::det3(&jm);
                    if !(det > 0.0) {
                        return Err(MeshError::InvertedElement {
                            element: e,
                            node: i + m * (j + m * k),
                            jacobian: det,
                            time: 0.0,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize) -> MeshTopology {
        MeshTopology::periodic_box([n; 3], [-1.0; 3], [1.0; 3], 1)
    }

    #[test]
    fn periodic_connectivity() {
        let mesh = build_mesh(unit_box(4), MotionSpec::Static).unwrap();
        assert_eq!(mesh.faces.len(), 3 * 64);
        for e in 0..64 {
            for d in 0..3 {
                let right = mesh.neighbor(e, d, 1).unwrap();
                assert_eq!(mesh.neighbor(right, d, 0), Some(e));
            }
        }
        // x = -1 and x = +1 faces are identified.
        let e0 = mesh.element_index([0, 2, 1]);
        assert_eq!(mesh.neighbor(e0, 0, 0), Some(mesh.element_index([3, 2, 1])));
    }

    #[test]
    fn piston_channel_topology() {
        let topo = MeshTopology {
            cells: [280, 1, 1],
            lower: [-20.0, 0.0, 0.0],
            upper: [50.0, 10.0, 10.0],
            periodic: [false, true, true],
            geometry_degree: 1,
        };
        assert_eq!(topo.spacing(0), 0.25);
        let motion = MotionSpec::PistonChannel {
            piston_speed: 2.0,
            piston_start: 0.0,
        };
        let mesh = build_mesh(topo.clone(), motion).unwrap();
        let walls = mesh.faces.iter().filter(|f| f.kind == FaceKind::Wall).count();
        assert_eq!(walls, 2);
        assert_eq!(mesh.neighbor(79, 0, 1), None);
        assert_eq!(mesh.neighbor(80, 0, 0), None);
        assert_eq!(mesh.neighbor(0, 1, 0), Some(0));
        let off = MotionSpec::PistonChannel {
            piston_speed: 2.0,
            piston_start: 0.1,
        };
        assert_eq!(build_mesh(topo, off).unwrap_err(), MeshError::PistonOffGrid(0.1));
    }

    #[test]
    fn shared_geometry_nodes_are_bitwise_identical() {
        let topo = MeshTopology::periodic_box([3, 2, 2], [-1.0; 3], [1.0; 3], 3);
        let mesh = build_mesh(topo.clone(), MotionSpec::corner_sinusoid_default(&topo.domain(), topo.cells)).unwrap();
        let nodes = mesh.geometry_nodes(0.37);
        let (xa, va) = mesh.element_geometry_nodes(&nodes, mesh.element_index([0, 1, 0]));
        let (xb, vb) = mesh.element_geometry_nodes(&nodes, mesh.element_index([1, 1, 0]));
        let m = 4;
        for k in 0..m {
            for j in 0..m {
                assert_eq!(xa[3 + m * (j + m * k)], xb[m * (j + m * k)]);
                assert_eq!(va[3 + m * (j + m * k)], vb[m * (j + m * k)]);
            }
        }
    }

    #[test]
    fn rejects_degenerate_domain() {
        let mut flipped = unit_box(2);
        flipped.upper = [-1.0; 3];
        assert!(matches!(
            build_mesh(flipped, MotionSpec::Static),
            Err(MeshError::DegenerateDomain { axis: 0 })
        ));
    }
}
