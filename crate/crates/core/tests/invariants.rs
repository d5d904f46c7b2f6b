use heunmcv::fuchsian::{
    build_system, heun_normal_form, scalar_ode_of_parameters, HeunParams, SystemState, ThetaParams,
};
use heunmcv::mcv::heun_euler_source;
use heunmcv::num_core::{c, cr, max_abs, CPoly};
use heunmcv::sic::{route, Chart, SICPoint};
use heunmcv::weyl::{apply_generator, mc_kappa2_map, ExtParams};
use heunmcv::C64;
use proptest::prelude::*;

fn cx(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C64> {
    (re, im).prop_map(|(a, b)| c(a, b))
}

fn theta() -> impl Strategy<Value = ThetaParams> {
    [cx(-0.45..0.45, -0.3..0.3), cx(-0.45..0.45, -0.3..0.3), cx(-0.45..0.45, -0.3..0.3), cx(-0.3..0.9, -0.3..0.3)]
        .prop_map(ThetaParams::from_array)
}

fn ext() -> impl Strategy<Value = ExtParams> {
    (theta(), cx(0.2..1.6, 0.3..1.0), cx(-0.8..0.8, -0.8..0.8), cx(1.9..2.7, -0.4..0.4))
        .prop_filter("generic", |(th, l, mu, t)| {
            mu.norm() > 0.1
                && th.kappa1().norm() > 0.05
                && th.kappa2().norm() > 0.05
                && [cr(0.0), cr(1.0), *t].iter().all(|p| (l - p).norm() > 0.2)
        })
        .prop_map(|(th, l, mu, t)| ExtParams::new(th, l, mu, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kappas_close_the_trace(th in theta()) {
        let s = th.theta0 + th.theta1 + th.thetat + th.kappa1() + th.kappa2();
        prop_assert!(s.norm() < 1e-14);
        prop_assert!((th.kappa1() - th.kappa2() - th.thetainf).norm() < 1e-14);
    }

    #[test]
    fn generators_are_involutions(p in ext(), i in 0u8..5) {
        let q = apply_generator(i, &p).unwrap();
        if let Ok(back) = apply_generator(i, &q) {
            prop_assert!(back.distance(&p) < 1e-10);
        }
    }

    #[test]
    fn convolution_map_is_an_involution(p in ext()) {
        if let Ok(q) = mc_kappa2_map(&p) {
            if let Ok(back) = mc_kappa2_map(&q) {
                let scale = 1.0 + q.mu.norm() + q.lambda.norm();
                prop_assert!(back.distance(&p) < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn built_system_has_the_prescribed_exponents(p in ext(), k in cx(0.7..1.3, -0.3..0.3)) {
        let st = SystemState::new(p.t, p.lambda, p.mu, k);
        if let Ok(sys) = build_system(&p.theta, &st) {
            let ai = sys.a_inf();
            let scale = 1.0 + max_abs(&sys.a0) + max_abs(&sys.a1) + max_abs(&sys.at);
            prop_assert!((ai[(0, 0)] - p.theta.kappa1()).norm() < 1e-12 * scale);
            prop_assert!((ai[(1, 1)] - p.theta.kappa2()).norm() < 1e-12 * scale);
            prop_assert!(ai[(0, 1)].norm() < 1e-12 * scale && ai[(1, 0)].norm() < 1e-12 * scale);
            let th = [p.theta.theta0, p.theta.theta1, p.theta.thetat];
            for (a, t) in sys.residues().iter().zip(th) {
                prop_assert!((a.trace() - t).norm() < 1e-12 * scale);
                prop_assert!(a.determinant().norm() < 1e-10 * scale * scale);
            }
        }
    }

    #[test]
    fn scalar_equation_is_apparent_at_lambda(p in ext()) {
        let st = SystemState::new(p.t, p.lambda, p.mu, cr(1.0));
        let ode = scalar_ode_of_parameters(&p.theta, &st).unwrap();
        let sing = ode.singular_points();
        prop_assert!(sing.iter().any(|s| (s - p.lambda).norm() < 1e-8));
        prop_assert!(sing.len() <= 4);
    }

    #[test]
    fn chart_routes_round_trip(p in ext(), chart in prop::sample::select(vec![Chart::U1, Chart::U2, Chart::U3, Chart::Uinf, Chart::U4])) {
        let start = SICPoint::new(Chart::U0, p.lambda, p.mu);
        let there = route(&start, chart, &p.theta, p.t).unwrap();
        let back = route(&there, Chart::U0, &p.theta, p.t).unwrap();
        prop_assert!((back.c1 - p.lambda).norm() < 1e-10 * (1.0 + p.lambda.norm()));
        prop_assert!((back.c2 - p.mu).norm() < 1e-10 * (1.0 + p.mu.norm()));
    }

    #[test]
    fn polynomial_roots_round_trip(roots in prop::collection::vec(cx(-2.0..2.0, -2.0..2.0), 1..6)) {
        let spread = roots.iter().enumerate().all(|(i, a)| roots[..i].iter().all(|b| (a - b).norm() > 0.05));
        prop_assume!(spread);
        let p = CPoly::from_roots(c(1.5, -0.5), &roots);
        let found = p.roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let d = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-8);
        }
    }

    #[test]
    fn euler_source_keeps_the_fuchs_relation(
        g in cx(0.1..1.0, -0.3..0.3), d in cx(0.1..1.0, -0.3..0.3), e in cx(0.1..1.0, -0.3..0.3),
        a in cx(-0.8..0.8, -0.3..0.3), q in cx(-1.0..1.0, -1.0..1.0), t in cx(1.9..2.7, -0.4..0.4),
    ) {
        let target = HeunParams::new(g, d, e, a, g + d + e - a - 1.0, q, t).unwrap();
        let src = heun_euler_source(&target, target.alpha).unwrap();
        prop_assert!(src.fuchs_defect() < 1e-12);
        let back = heun_normal_form(&target.to_ode()).unwrap();
        prop_assert!(back.distance(&target) < 1e-9 * (1.0 + q.norm()));
    }
}
