use bhlab::limits::{
    o_functional, predict_limit, solve_h, solve_theta, HOptions, LimitArgs, QuadraticForm,
    SolvedLimits, TheoremId, ThetaMap, ThetaOptions, ThetaStart, UniformAxis,
};
use bhlab::{Error, Model};

fn theta(beta: f64, start: ThetaStart) -> bhlab::limits::ThetaSolution<f64> {
    let model = Model::reference(beta);
    let c = model.constants().unwrap();
    let opts = ThetaOptions {
        start,
        ..ThetaOptions::default()
    };
    solve_theta(&c, &QuadraticForm::from_model(&model), &opts).unwrap()
}

#[test]
fn first_theta_iterate_has_closed_form() {
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let model = Model::reference(beta);
        let c = model.constants().unwrap();
        let map = ThetaMap::new(&c, &QuadraticForm::<f64>::from_model(&model), 256);
        assert_eq!(map.boundary().0, [1.0, 1.0]);
        let axis = UniformAxis::new(2.0, 33);
        let next = map.apply(&axis, &vec![map.boundary(); axis.points]);
        for (i, v) in next.iter().enumerate() {
            let expected = 1.0 - c.gamma_beta * axis.node(i).powf(beta) / 4.0;
            assert!((v[0] - expected).abs() < 1e-10 && (v[1] - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn theta_converges_and_is_a_fixed_point() {
    for beta in [0.25, 0.5, 0.75, 1.0] {
        let sol = theta(beta, ThetaStart::Boundary);
        assert!(sol.kappa <= 0.8, "beta {beta}: kappa {}", sol.kappa);
        assert!(sol.residual <= 1e-8, "beta {beta}: residual {}", sol.residual);
        assert_eq!(sol.values[0].0, [1.0, 1.0]);
        for w in sol.values.windows(2) {
            assert!(w[1][0] <= w[0][0] && w[1][1] <= w[0][1]);
        }
        assert!(sol.values.iter().all(|v| v[0] > 0.0 && v[1] > 0.0));
    }
}

#[test]
fn theta_does_not_depend_on_the_start() {
    let base = theta(0.5, ThetaStart::Boundary);
    for start in [ThetaStart::Zero, ThetaStart::Scaled(0.5), ThetaStart::Scaled(1.5)] {
        let other = theta(0.5, start);
        assert_eq!(other.axis, base.axis);
        let diff = base
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
            .fold(0.0, f64::max);
        assert!(diff <= 1e-8, "{start:?}: {diff}");
    }
}

#[test]
fn omega_solves_its_own_equation() {
    let model = Model::reference(0.25);
    let c = model.constants().unwrap();
    let qform = QuadraticForm::<f64>::from_model(&model);
    let opts = ThetaOptions {
        lambda_points: 1024,
        nodes: 4096,
        ..ThetaOptions::default()
    };
    let sol = solve_theta(&c, &qform, &opts).unwrap();
    assert_eq!(sol.omega(0.0).unwrap().0, [0.0, 0.0]);
    for lambda in [0.25, 0.5, 1.0] {
        let res = sol.omega_residual(&c, &qform, lambda, 4096).unwrap();
        assert!(res < 1e-6, "lambda {lambda}: {res}");
    }
    assert!(matches!(sol.omega(2.0), Err(Error::OutsideDomain { .. })));
}

#[test]
fn h_boundary_and_bounds() {
    let model = Model::reference(0.75);
    let c = model.constants().unwrap();
    let opts = HOptions {
        theta_points: 256,
        nodes: 512,
        lambda_points: 5,
        ..HOptions::default()
    };
    let sol = solve_h(&c, &QuadraticForm::<f64>::from_model(&model), &opts).unwrap();
    assert!(sol.kappa <= 0.8 && sol.residual <= 1e-7);
    let bg = c.beta * c.gamma_beta;
    for lambda in [0.0, 0.5, 1.0] {
        let h0 = sol.eval(0.0, lambda).unwrap();
        assert!((h0[0] - bg * c.d.0[0][0]).abs() < 1e-12 && (h0[1] - bg * c.d.0[1][0]).abs() < 1e-12);
        for theta in [0.25, 0.5, 1.0] {
            let (h, ub) = (sol.eval(theta, lambda).unwrap(), sol.upper_bound(theta, lambda));
            assert!(h[0] <= ub[0] + 1e-12 && h[1] <= ub[1] + 1e-12 && h[1] > 0.0);
        }
    }
    assert!(solve_h(&Model::reference(0.5).constants().unwrap(), &QuadraticForm::<f64>::from_model(&model), &opts).is_err());
}

#[test]
fn h_at_beta_one_starts_from_c_beta() {
    let model = Model::reference(1.0);
    let c = model.constants().unwrap();
    let opts = HOptions {
        theta_points: 128,
        nodes: 256,
        lambda_points: 3,
        ..HOptions::default()
    };
    let sol = solve_h(&c, &QuadraticForm::<f64>::from_model(&model), &opts).unwrap();
    let h = sol.eval(0.0, 1.0).unwrap();
    assert!((h[0] - 1.5).abs() < 1e-12 && (h[1] - 1.5).abs() < 1e-12);
}

#[test]
fn o_functional_for_small_beta() {
    let model = Model::reference(0.25);
    let o0 = o_functional(&model, 0.5, 0.0, 4000.0).unwrap();
    let o5 = o_functional(&model, 0.5, 0.5, 4000.0).unwrap();
    assert!(o0.value[1] > o5.value[1] && o5.value[1] > 0.0);
    assert!(o0.tail[1] < 0.05 * o0.value[1]);
    assert!(matches!(
        o_functional(&Model::reference(0.5), 0.5, 0.0, 4000.0),
        Err(Error::TailNotConverged(_))
    ));
    assert!(matches!(
        o_functional(&Model::reference(0.75), 0.5, 0.0, 100.0),
        Err(Error::BetaOutOfRange(_))
    ));
}

#[test]
fn predictions() {
    let c = Model::reference(0.5).constants().unwrap();
    let none = SolvedLimits::default();
    let at = |l1: f64, l2: f64, r: f64, s: f64| LimitArgs {
        lambda1: l1,
        lambda2: l2,
        r,
        s,
    };
    let t1 = predict_limit(TheoremId::T1, &c, &at(1.0, 1.0, 0.0, 1.0), &none).unwrap();
    assert!((t1 - (-1.0 / std::f64::consts::PI - 1.0).exp()).abs() < 1e-12);
    let c1 = predict_limit(TheoremId::C1, &c, &at(0.0, 2.0, 0.0, 1.0), &none).unwrap();
    assert!((c1 - (-2.0f64).exp()).abs() < 1e-15);
    let t6 = predict_limit(TheoremId::T6, &c, &at(0.0, 4.0, 0.5, 1.0), &none).unwrap();
    assert!((t6 - (-1.0f64).exp()).abs() < 1e-15);
    let z = predict_limit(TheoremId::Z12, &c, &at(0.0, 0.0, 1.0, 0.75), &none).unwrap();
    assert!((z - (-0.5f64).exp()).abs() < 1e-15);
    for th in [TheoremId::T2, TheoremId::T4, TheoremId::T5] {
        let args = at(0.5, 0.5, 1.0, 0.5);
        assert!(matches!(predict_limit(th, &c, &args, &none), Err(Error::MissingSolution(_))));
    }
    // Every law is 1 at the origin.
    let solved = SolvedLimits {
        theta: Some(theta(0.5, ThetaStart::Boundary)),
        ..SolvedLimits::default()
    };
    for th in TheoremId::ALL {
        let v = predict_limit(th, &c, &at(0.0, 0.0, 2.0, 1.0), &solved);
        if th == TheoremId::T5 {
            assert!(matches!(v, Err(Error::MissingSolution(_))) || v.unwrap() == 1.0);
        } else {
            assert_eq!(v.unwrap(), 1.0, "{th}");
        }
    }
}
