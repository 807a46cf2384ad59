use dgfv_core::physics::{
    ale_state_function, ec_two_point_flux, entropy_quantities, log_mean, physical_flux, primitives, EulerState,
    GasModel, NumericalFlux,
};
use proptest::prelude::*;

const GAS: GasModel = GasModel { gamma: 1.4 };

fn state() -> impl Strategy<Value = EulerState> {
    (0.1..8.0f64, prop::array::uniform3(-3.0..3.0f64), 0.1..8.0f64)
        .prop_map(|(rho, v, p)| EulerState::from_primitive(rho, v, p, &GAS))
}

/// Independent pairs and nearby pairs down to relative jumps of 1e-9.
fn pair() -> impl Strategy<Value = (EulerState, EulerState)> {
    let near = (state(), -9.0..-1.0f64, prop::array::uniform5(-1.0..1.0f64)).prop_map(|(q, e, d)| {
        let w = primitives(&q, &GAS).unwrap();
        let eps = 10f64.powf(e);
        let v = [w.v[0] + eps * d[1], w.v[1] + eps * d[2], w.v[2] + eps * d[3]];
        let r = EulerState::from_primitive(w.rho * (1.0 + eps * d[0]), v, w.p * (1.0 + eps * d[4]), &GAS);
        (q, r)
    });
    prop_oneof![(state(), state()), near]
}

fn rel(a: &EulerState, b: &EulerState) -> f64 {
    (*a - *b).max_abs() / (1.0 + b.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn two_point_flux_satisfies_tadmor_condition((qi, qj) in pair(), k in 0usize..3) {
        let ei = entropy_quantities(&qi, &GAS).unwrap();
        let ej = entropy_quantities(&qj, &GAS).unwrap();
        let f = ec_two_point_flux(&qi, &qj, &GAS, k).unwrap();
        let r = (ei.variables - ej.variables).dot(&f) - (ei.potential[k] - ej.potential[k]);
        prop_assert!(r.abs() <= 1e-12, "residual {r:e}");
    }

    #[test]
    fn two_point_flux_is_symmetric_and_consistent((qi, qj) in pair(), k in 0usize..3) {
        let f = ec_two_point_flux(&qi, &qj, &GAS, k).unwrap();
        let g = ec_two_point_flux(&qj, &qi, &GAS, k).unwrap();
        prop_assert!(rel(&f, &g) <= 1e-14);
        let c = ec_two_point_flux(&qi, &qi, &GAS, k).unwrap();
        prop_assert!(rel(&c, &physical_flux(&qi, &GAS, k).unwrap()) <= 1e-14);
    }

    #[test]
    fn state_function_satisfies_jump_condition((qi, qj) in pair()) {
        let ei = entropy_quantities(&qi, &GAS).unwrap();
        let ej = entropy_quantities(&qj, &GAS).unwrap();
        let qs = ale_state_function(&qi, &qj, &GAS).unwrap();
        let r = (ei.variables - ej.variables).dot(&qs) - (qi[0] - qj[0]);
        prop_assert!(r.abs() <= 1e-12, "residual {r:e}");
        prop_assert!(rel(&qs, &ale_state_function(&qj, &qi, &GAS).unwrap()) <= 1e-14);
        prop_assert!(rel(&ale_state_function(&qi, &qi, &GAS).unwrap(), &qi) <= 1e-14);
    }

    #[test]
    fn entropy_variables_are_the_entropy_gradient(q in state()) {
        let e = entropy_quantities(&q, &GAS).unwrap();
        for c in 0..5 {
            let h = 1e-6 * q.max_abs().max(1.0);
            let (mut a, mut b) = (q, q);
            a.0[c] += h;
            b.0[c] -= h;
            let fd = (entropy_quantities(&a, &GAS).unwrap().entropy - entropy_quantities(&b, &GAS).unwrap().entropy)
                / (2.0 * h);
            let w = e.variables[c];
            prop_assert!((fd - w).abs() <= 1e-6 * w.abs().max(1.0), "component {c}: {fd} vs {w}");
        }
    }

    #[test]
    fn face_fluxes_are_conservative(
        (ql, qr) in pair(),
        a in prop::array::uniform3(-1.0..1.0f64),
        a_nu in -1.0..1.0f64,
    ) {
        let (l, r) = (primitives(&ql, &GAS).unwrap(), primitives(&qr, &GAS).unwrap());
        let m = [-a[0], -a[1], -a[2]];
        for flux in [NumericalFlux::Central, NumericalFlux::Rusanov, NumericalFlux::RusanovAverage] {
            let f = flux.evaluate(&ql, &qr, &l, &r, &GAS, a, a_nu);
            let g = flux.evaluate(&qr, &ql, &r, &l, &GAS, m, -a_nu);
            prop_assert!(rel(&(f + g), &EulerState::ZERO) <= 1e-13 * (1.0 + f.max_abs()), "{flux:?}");
        }
    }

    #[test]
    fn rusanov_dissipates_entropy(
        (ql, qr) in pair(),
        a in prop::array::uniform3(-1.0..1.0f64),
        a_nu in -1.0..1.0f64,
    ) {
        let (l, r) = (primitives(&ql, &GAS).unwrap(), primitives(&qr, &GAS).unwrap());
        let dw = entropy_quantities(&qr, &GAS).unwrap().variables - entropy_quantities(&ql, &GAS).unwrap().variables;
        let ec = NumericalFlux::Central.evaluate(&ql, &qr, &l, &r, &GAS, a, a_nu);
        let rus = NumericalFlux::Rusanov.evaluate(&ql, &qr, &l, &r, &GAS, a, a_nu);
        prop_assert!(dw.dot(&(rus - ec)) <= 1e-12 * (1.0 + ec.max_abs()));
    }

    #[test]
    fn log_mean_lies_between_its_arguments(a in 1e-6..1e6f64, t in -1.0..1.0f64) {
        let b = a * (1.0 + 0.999 * t * t.abs().powi(6));
        let m = log_mean(a, b).unwrap();
        prop_assert!(m >= a.min(b) && m <= a.max(b), "{a} {b} {m}");
    }
}

#[test]
fn log_mean_rejects_non_positive_arguments() {
    assert!(log_mean(0.0, 1.0).is_err());
    assert!(log_mean(1.0, -2.0).is_err());
}
