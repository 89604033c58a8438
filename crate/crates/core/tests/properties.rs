use proptest::prelude::*;

use imcf_core::flow::{checked_decomposition, graphs_monotone, nesting_check, run, StepControl};
use imcf_core::geometry::{decompose_graphs, is_embedded, surface_area, CurvatureField};
use imcf_core::scenarios::{make_perturbed_torus, FourierMode};
use imcf_core::GeneratingCurve;

fn torus_strategy() -> impl Strategy<Value = GeneratingCurve> {
    (
        3.0f64..6.0,
        prop::collection::vec((2u32..6, -0.03f64..0.03, 0.0f64..6.3), 0..3),
        prop::sample::select(vec![64usize, 96, 128]),
    )
        .prop_filter_map("mean-convex perturbed torus", |(major, modes, n)| {
            let modes: Vec<FourierMode> = modes
                .into_iter()
                .map(|(m, amplitude, phase)| FourierMode { m, amplitude, phase })
                .collect();
            make_perturbed_torus(major, 1.0, &modes, n).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_identities_hold_exactly(curve in torus_strategy()) {
        let f = CurvatureField::compute(&curve).unwrap();
        for i in 0..curve.len() {
            prop_assert_eq!(f.h[i], f.k[i] + f.p[i]);
            prop_assert_eq!(f.gauss[i], f.k[i] * f.p[i]);
            let a2 = f.h[i] * f.h[i] - 2.0 * f.gauss[i];
            prop_assert!((f.a2[i] - a2).abs() <= 1e-13 * f.a2[i].max(1.0));
            prop_assert!((f.nu[i].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn area_scales_quadratically(curve in torus_strategy(), lambda in 0.1f64..10.0) {
        let a = surface_area(&curve);
        let b = surface_area(&curve.scaled(lambda));
        prop_assert!((b - lambda * lambda * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn decomposition_partitions_nodes(curve in torus_strategy()) {
        let f = CurvatureField::compute(&curve).unwrap();
        let d = decompose_graphs(&curve, &f.nu).unwrap();
        prop_assert_eq!(d.reassemble(), (0..curve.len()).collect::<Vec<_>>());
        prop_assert!(d.bottom.iter().zip(&d.top).all(|(w, v)| w < v));
        prop_assert!(d.is_convex());
        prop_assert!(is_embedded(&curve).is_embedded());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn runs_are_nested_and_monotone(curve in torus_strategy()) {
        // samples far enough apart that the displacement exceeds the chord sag
        // introduced by remeshing
        let ctl = StepControl::for_initial(&curve).unwrap();
        let traj = run(curve, &ctl, 0.02).unwrap();
        let samples: Vec<_> = traj.samples().collect();
        prop_assert!(samples.len() >= 2);
        for w in samples.windows(2) {
            prop_assert!(nesting_check(&w[0].curve, &w[1].curve));
            let d = checked_decomposition(&w[0].curve).unwrap();
            prop_assert!(graphs_monotone(&d, &w[1].curve, 1e-9 * w[1].curve.diameter()));
        }
    }
}

#[test]
fn halving_cfl_moves_the_stopping_time_by_less_than_a_coarse_step() {
    let curve = make_perturbed_torus(3.0, 1.0, &[], 64).unwrap();
    let coarse = StepControl::for_initial(&curve).unwrap();
    let fine = StepControl { cfl: 0.5 * coarse.cfl, ..coarse };
    let f = CurvatureField::compute(&curve).unwrap();
    let dt0 = imcf_core::flow::stable_dt(&curve, &f, &coarse);
    let t_coarse = run(curve.clone(), &coarse, 1.0).unwrap().final_state.t;
    let t_fine = run(curve, &fine, 1.0).unwrap().final_state.t;
    assert!((t_coarse - t_fine).abs() < dt0, "{t_coarse} vs {t_fine}, dt {dt0}");
}
