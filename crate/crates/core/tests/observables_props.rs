use proptest::prelude::*;
use qndsim_core::observables::*;

fn params() -> OscillatorParams {
    OscillatorParams::new(1e-3, 1e4, 1e4, 0.05, BathModel::Classical).unwrap()
}

/// Coefficients in natural units: `c_x` dimensionless, `c_p` in units of 1/mω.
fn obs() -> impl Strategy<Value = LinearObservable> {
    let k = params().commutator_scale();
    (-10.0..10.0_f64, -10.0..10.0_f64)
        .prop_filter("non-zero", |(a, b)| a.abs() + b.abs() > 1e-3)
        .prop_map(move |(a, b)| LinearObservable::new(a, b * k).unwrap())
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-10 * scale
}

proptest! {
    #[test]
    fn commutator_is_antisymmetric(a in obs(), b in obs()) {
        prop_assert_eq!(commutator_symplectic(&a, &b), -commutator_symplectic(&b, &a));
        prop_assert_eq!(commutator_symplectic(&a, &a), 0.0);
    }

    #[test]
    fn commutator_is_bilinear(a in obs(), b in obs(), c in obs(), alpha in -3.0..3.0_f64, beta in -3.0..3.0_f64) {
        let k = params().commutator_scale();
        let combo = a.combine(alpha, &b, beta);
        prop_assume!(combo.is_ok());
        let lhs = commutator_symplectic(&combo.unwrap(), &c);
        let rhs = alpha * commutator_symplectic(&a, &c) + beta * commutator_symplectic(&b, &c);
        prop_assert!(close(lhs, rhs, 1e3 * k), "{lhs} vs {rhs}");
    }

    #[test]
    fn evolution_preserves_commutators(a in obs(), b in obs(), t in -1.0..1.0_f64) {
        let p = params();
        let before = commutator_symplectic(&a, &b);
        let after = commutator_symplectic(&heisenberg_evolve(&a, t, &p).unwrap(), &heisenberg_evolve(&b, t, &p).unwrap());
        prop_assert!(close(before, after, 1e3 * p.commutator_scale()), "{before} vs {after}");
    }

    #[test]
    fn quadratures_are_constants_of_motion(t in -1.0..1.0_f64, t0 in -1.0..1.0_f64) {
        let p = params();
        let k = p.commutator_scale();
        for family in [Observable::Quadrature1, Observable::Quadrature2] {
            let a = family.heisenberg_at(t, &p).unwrap();
            let b = family.heisenberg_at(t0, &p).unwrap();
            prop_assert!((a.c_x() - b.c_x()).abs() < 1e-12);
            prop_assert!((a.c_p() - b.c_p()).abs() < 1e-12 * k);
        }
    }

    #[test]
    fn quadrature_pair_is_canonical(t in -1.0..1.0_f64) {
        let p = params();
        let s = commutator_symplectic(
            &LinearObservable::quadrature1_at(t, &p),
            &LinearObservable::quadrature2_at(t, &p),
        );
        prop_assert!(close(s, p.commutator_scale(), p.commutator_scale()));
    }

    #[test]
    fn phase_point_round_trip(x in -1e-15..1e-15_f64, q in -1e-15..1e-15_f64, t in -1.0..1.0_f64) {
        let p = params();
        let point = PhasePoint { x, p: q * p.m_omega() };
        let back = phase_point_of(quadratures_of(point, t, &p), t, &p);
        prop_assert!((back.x - point.x).abs() <= 1e-12 * 1e-15);
        prop_assert!((back.p - point.p).abs() <= 1e-12 * 1e-15 * p.m_omega());
    }

    #[test]
    fn x1_sequences_are_qnd(times in prop::collection::vec(-10.0..10.0_f64, 2..12)) {
        let v = is_qnd_sequence(&Observable::Quadrature1, &times, &params(), DEFAULT_QND_TOL).unwrap();
        prop_assert!(v.is_qnd);
        prop_assert!(v.relative_violation() <= 1e-12);
    }

    #[test]
    fn half_period_position_is_qnd(n in 0u32..50, m in 0u32..50, t0 in 0.0..1.0_f64) {
        let p = params();
        let half = std::f64::consts::PI / p.omega1();
        let times = [t0 + n as f64 * half, t0 + (n + m + 1) as f64 * half];
        let v = is_qnd_sequence(&Observable::Position, &times, &p, 1e-9).unwrap();
        prop_assert!(v.is_qnd, "violation {}", v.relative_violation());
    }
}

#[test]
fn momentum_and_position_are_not_qnd_at_quarter_period() {
    let p = params();
    let quarter = std::f64::consts::FRAC_PI_2 / p.omega1();
    for family in [Observable::Position, Observable::Momentum] {
        let v = is_qnd_sequence(&family, &[0.0, quarter], &p, DEFAULT_QND_TOL).unwrap();
        assert!(!v.is_qnd);
    }
}

#[test]
fn back_action_evading_coupling() {
    let p = params();
    let x1 = Observable::Quadrature1;
    assert!(is_interaction_qnd(&x1, &x1, 0.37, &p, DEFAULT_QND_TOL).unwrap());
    assert!(!is_interaction_qnd(&Observable::Quadrature2, &x1, 0.37, &p, DEFAULT_QND_TOL).unwrap());
}

#[test]
fn observable_parsing() {
    assert_eq!("X1".parse::<Observable>().unwrap(), Observable::Quadrature1);
    let lin: Observable = "linear:1,0".parse().unwrap();
    assert_eq!(lin, Observable::Linear(LinearObservable::position()));
    assert!("linear:1".parse::<Observable>().is_err());
    assert!("y".parse::<Observable>().is_err());
}
