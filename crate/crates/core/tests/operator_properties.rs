use dgfv_core::blending::BlendField;
use dgfv_core::flow::FlowSpec;
use dgfv_core::fv::FvOrder;
use dgfv_core::mesh::{build_mesh, MeshTopology, MotionSpec};
use dgfv_core::operator::Discretization;
use dgfv_core::physics::{entropy_quantities, GasModel, NumericalFlux};
use dgfv_core::sbp::build_sbp;

const GAS: GasModel = GasModel { gamma: 1.4 };

fn moving_disc(n: usize, surface: NumericalFlux, fv: NumericalFlux, order: FvOrder) -> Discretization {
    let topo = MeshTopology::periodic_box([3; 3], [-1.0; 3], [1.0; 3], n.min(3));
    let motion = MotionSpec::corner_sinusoid_default(&topo.domain(), topo.cells);
    let mesh = build_mesh(topo, motion).unwrap();
    Discretization::new(mesh, build_sbp(n).unwrap(), GAS, surface, fv, order).unwrap()
}

fn random_alpha(d: &Discretization) -> BlendField {
    let alpha = (0..d.mesh.n_elements()).map(|e| ((e * 37 + 11) % 17) as f64 / 17.0).collect();
    BlendField::from_elements(&d.mesh, alpha)
}

#[test]
fn constant_state_is_a_steady_solution_on_moving_meshes() {
    let flow = FlowSpec::Constant {
        density: 1.0,
        velocity: [0.3; 3],
        pressure: 17.857,
    };
    for order in [FvOrder::First, FvOrder::Second] {
        for flux in [NumericalFlux::Central, NumericalFlux::Rusanov] {
            let d = moving_disc(4, flux, NumericalFlux::Rusanov, order);
            let t = 0.37;
            let sol = d.project(t, |x| flow.state(x, t, &GAS)).unwrap();
            let blend = random_alpha(&d);
            let r = d.residual(&sol, t, &blend, &flow.boundary(GAS)).unwrap();
            // dJ/dt is not zero, but d(Ju)/dt must equal u·dJ/dt.
            let u = flow.state([0.0; 3], 0.0, &GAS);
            let mut worst: f64 = 0.0;
            for (rq, rj) in r.ju.iter().zip(&r.jac) {
                worst = worst.max((*rq - u * *rj).max_abs());
            }
            assert!(worst < 1e-11, "{order:?} {flux:?}: {worst}");
            let jmax = r.jac.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(jmax > 1e-3, "mesh should be moving");
        }
    }
}

#[test]
fn totals_are_conserved_by_the_residual() {
    let flow = FlowSpec::RandomPerturbation {
        seed: 3,
        density: 1.0,
        pressure: 1.0,
        amplitude: 0.2,
    };
    for order in [FvOrder::First, FvOrder::Second] {
        let d = moving_disc(3, NumericalFlux::Rusanov, NumericalFlux::Rusanov, order);
        let sol = d.project(0.1, |x| flow.state(x, 0.0, &GAS)).unwrap();
        for blend in [BlendField::uniform(&d.mesh, 0.0), BlendField::uniform(&d.mesh, 1.0), random_alpha(&d)] {
            let r = d.residual(&sol, 0.1, &blend, &flow.boundary(GAS)).unwrap();
            let npe = d.nodes_per_element();
            let mut total = [0.0; 6];
            let mut scale = [0.0; 6];
            for (i, (rq, rj)) in r.ju.iter().zip(&r.jac).enumerate() {
                let w = d.sbp.weights[i % npe % d.sbp.n_nodes()]
                    * d.sbp.weights[i % npe / d.sbp.n_nodes() % d.sbp.n_nodes()]
                    * d.sbp.weights[i % npe / d.sbp.n_nodes().pow(2)];
                for c in 0..5 {
                    total[c] += w * rq[c];
                    scale[c] += w * rq[c].abs();
                }
                total[5] += w * rj;
                scale[5] += w * rj.abs();
            }
            for c in 0..6 {
                assert!(total[c].abs() < 1e-12 * (1.0 + scale[c]), "{order:?} comp {c}: {} / {}", total[c], scale[c]);
            }
        }
    }
}

#[test]
fn entropy_conservative_with_central_coupling() {
    let flow = FlowSpec::RandomPerturbation {
        seed: 5,
        density: 1.0,
        pressure: 1.0,
        amplitude: 0.2,
    };
    for alpha in [0.0, 0.3, 1.0] {
        let d = moving_disc(3, NumericalFlux::Central, NumericalFlux::Central, FvOrder::First);
        let t = 0.2;
        let sol = d.project(t, |x| flow.state(x, 0.0, &GAS)).unwrap();
        let blend = BlendField::uniform(&d.mesh, alpha);
        let r = d.residual(&sol, t, &blend, &flow.boundary(GAS)).unwrap();
        let n = d.sbp.n_nodes();
        let npe = d.nodes_per_element();
        let (mut prod, mut mag) = (0.0, 0.0);
        for i in 0..sol.len() {
            let l = i % npe;
            let w = d.sbp.weights[l % n] * d.sbp.weights[l / n % n] * d.sbp.weights[l / (n * n)];
            let u = sol.ju[i] * (1.0 / sol.jac[i]);
            let ep = entropy_quantities(&u, &GAS).unwrap();
            // d(J S)/dt = w·d(Ju)/dt - (w·u - S) dJ/dt
            let term = ep.variables.dot(&r.ju[i]) - (ep.variables.dot(&u) - ep.entropy) * r.jac[i];
            prod += w * term;
            mag += w * term.abs();
        }
        assert!(prod.abs() < 1e-12 * (1.0 + mag), "alpha {alpha}: {prod} / {mag}");
    }
}

#[test]
fn geometry_basis_matches_direct_evaluation() {
    use dgfv_core::mesh::{GeometryBasis, MeshGeometry};
    let cases = [
        (MeshTopology::periodic_box([2; 3], [-1.0; 3], [1.0; 3], 3), None),
        (
            MeshTopology::periodic_box([2; 3], [0.0; 3], [std::f64::consts::TAU; 3], 2),
            Some(MotionSpec::StandingWave {
                amplitude: 0.2,
                wavenumbers: [1.0; 3],
                angular_frequency: std::f64::consts::TAU,
            }),
        ),
        (
            MeshTopology {
                cells: [8, 1, 1],
                lower: [-2.0, 0.0, 0.0],
                upper: [6.0, 1.0, 1.0],
                periodic: [false, true, true],
                geometry_degree: 1,
            },
            Some(MotionSpec::PistonChannel {
                piston_speed: 0.5,
                piston_start: 0.0,
            }),
        ),
    ];
    for (topo, motion) in cases {
        let motion = motion.unwrap_or_else(|| MotionSpec::corner_sinusoid_default(&topo.domain(), topo.cells));
        let mesh = build_mesh(topo, motion).unwrap();
        let sbp = build_sbp(3).unwrap();
        let basis = GeometryBasis::new(&mesh, &sbp).unwrap();
        for t in [0.0, 0.13, 0.71, 3.9] {
            let a = basis.evaluate(&mesh, &sbp, t).unwrap();
            let b = MeshGeometry::compute(&mesh, &sbp, t).unwrap();
            let mut worst: f64 = 0.0;
            for (ga, gb) in a.elements.iter().zip(&b.elements) {
                for p in 0..ga.n_nodes() {
                    for k in 0..3 {
                        worst = worst.max((ga.positions[p][k] - gb.positions[p][k]).abs());
                        worst = worst.max((ga.velocities[p][k] - gb.velocities[p][k]).abs());
                        for c in 0..3 {
                            worst = worst.max((ga.metrics[p][k][c] - gb.metrics[p][k][c]).abs());
                        }
                    }
                    worst = worst.max((ga.det[p] - gb.det[p]).abs());
                }
                for d in 0..3 {
                    for (x, y) in ga.subcell[d].normals.iter().zip(&gb.subcell[d].normals) {
                        for c in 0..3 {
                            worst = worst.max((x[c] - y[c]).abs());
                        }
                    }
                }
            }
            assert!(worst < 1e-12, "t = {t}: {worst}");
            assert!(a.max_metric_identity_residual(&sbp) < 1e-12);
        }
    }
}
