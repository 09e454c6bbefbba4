use wavepart_core::analysis::{exact_click_moments, witness_with_errors};
use wavepart_core::detector::ClickStatistics;
use wavepart_core::{
    click_distribution, detected_statistics, moments_from_clicks, photon_moments, systematic_error,
    tmsv_inputs, witness_pair, Complex64, FactorialMoments, JointNumberDistribution,
    ModePreparation,
};

fn fixtures() -> Vec<(String, JointNumberDistribution)> {
    let mut out = Vec::new();
    for &(q, eta) in &[(0.1, 0.5), (0.3, 0.2), (0.02, 1.0)] {
        let (a, b) = tmsv_inputs(q).unwrap();
        out.push((
            format!("tmsv q={q} eta={eta}"),
            detected_statistics(a, b, 0.0, eta, 1e-13).unwrap(),
        ));
    }
    for &mt in &[0.005, 0.02, 0.05] {
        let q = wavepart_core::witness::tmsv_q_for_mean_total(mt, 0.024).unwrap();
        let (a, b) = tmsv_inputs(q).unwrap();
        out.push((
            format!("tmsv mean_total={mt}"),
            detected_statistics(a, b, 0.0, 0.024, 1e-13).unwrap(),
        ));
    }
    let coh = |re: f64, im: f64| ModePreparation::coherent(Complex64::new(re, im));
    out.push((
        "coherent".into(),
        detected_statistics(coh(0.3, 0.1), coh(-0.2, 0.4), 0.3, 0.9, 1e-13).unwrap(),
    ));
    out.push((
        "fock 1,0".into(),
        detected_statistics(
            ModePreparation::Fock { n: 1 },
            ModePreparation::Vacuum,
            0.0,
            0.4,
            1e-13,
        )
        .unwrap(),
    ));
    out.push((
        "hom".into(),
        detected_statistics(
            ModePreparation::Fock { n: 1 },
            ModePreparation::Fock { n: 1 },
            0.0,
            0.2,
            1e-13,
        )
        .unwrap(),
    ));
    out
}

#[test]
fn click_bias_within_systematic_bounds() {
    for (name, dist) in fixtures() {
        let exact = photon_moments(&dist);
        assert!(exact.mean_total() <= 0.5, "{name}");
        let est = exact_click_moments(&click_distribution(&dist, 8, 1e-9).unwrap()).unwrap();
        let sys = est.sys_err.unwrap();
        for i in 0..5 {
            let bias = (exact.values()[i] - est.values()[i]).abs();
            assert!(
                bias <= sys[i] + 1e-16,
                "{name} component {i}: {bias} > {}",
                sys[i]
            );
        }
        // propagated bound covers the witness bias
        let w_exact = witness_pair(&exact);
        let w = witness_with_errors(&est);
        assert!(
            (w.e_wave - w_exact.e_wave).abs() <= w.err_wave_sys + 1e-16,
            "{name}: e_wave bias {} > {}",
            (w.e_wave - w_exact.e_wave).abs(),
            w.err_wave_sys
        );
        assert!(
            (w.e_part - w_exact.e_part).abs() <= w.err_part_sys + 1e-16,
            "{name}: e_part bias {} > {}",
            (w.e_part - w_exact.e_part).abs(),
            w.err_part_sys
        );
    }
}

#[test]
fn systematic_errors_shrink_with_more_bins() {
    for (name, dist) in fixtures() {
        let mut prev: Option<[f64; 5]> = None;
        for d in [4usize, 8, 16] {
            let c = click_distribution(&dist, d, 1e-9).unwrap();
            assert_eq!(c.d_bins(), d);
            let f = FactorialMoments::from_clicks(&c).unwrap();
            let s = [
                systematic_error(&f, 1, 0).unwrap(),
                systematic_error(&f, 0, 1).unwrap(),
                systematic_error(&f, 2, 0).unwrap(),
                systematic_error(&f, 0, 2).unwrap(),
                systematic_error(&f, 1, 1).unwrap(),
            ];
            if let Some(p) = prev {
                for i in 0..5 {
                    assert!(s[i] <= p[i] + 1e-18, "{name} D={d} component {i}");
                }
            }
            prev = Some(s);
            // and the estimate stays consistent with the bound at every D
            let est = moments_from_clicks(&f).unwrap();
            let exact = photon_moments(&dist);
            let bias = (exact.mean_a - est.mean_a).abs();
            assert!(bias <= s[0] + 1e-16, "{name} D={d}");
        }
    }
}
