//! End-to-end checks across generators, embeddings, evaluation and the
//! benchmark harness.

mod common;

use suproj::bench::{fit_method, run_benchmark, BenchConfig, EmbedParams, SigmaSetting};
use suproj::datasets::{gen_spirals, gen_xor, normalize01, split, LabeledDataset};
use suproj::embeddings::{fit_kspca, fit_ksrp, label_factor, DataBackend, LabelFactor};
use suproj::eval::one_nn_accuracy;
use suproj::kernels::{default_sigma_grid, delta_gram, median_heuristic, select_sigma_cv, CvEmbedding, KernelSpec};
use suproj::rff::sample_map;
use suproj::Method;

fn normalized(ds: &LabeledDataset) -> LabeledDataset {
    normalize01(ds, ds).unwrap().0
}

#[test]
fn ksrp_feature_backend_tracks_exact_kernel_on_small_xor() {
    let mut total = 0.0;
    for seed in 0..10 {
        let ds = normalized(&gen_xor(50, 8, seed).unwrap());
        let sigma = median_heuristic(&ds.x);
        let psi = label_factor(&ds.labels, 2, 2, LabelFactor::Rff { sigma: 1e-10, seed }).unwrap();
        let exact = fit_ksrp(&ds.x, DataBackend::Exact(KernelSpec::Rbf { sigma }), &psi).unwrap();
        let map = sample_map(sigma, ds.dim(), 1000, seed + 100).unwrap();
        let approx = fit_ksrp(&ds.x, DataBackend::Features(map), &psi).unwrap();
        let diff = exact.training_embedding().sub(approx.training_embedding());
        total += diff.as_slice().iter().map(|v| v.abs()).sum::<f64>() / diff.as_slice().len() as f64;
    }
    let mean = total / 10.0;
    assert!(mean < 0.1, "mean entrywise gap {mean}");
}

#[test]
fn kspca_on_xor_100_separates_training_data() {
    let ds = normalized(&gen_xor(100, 8, 3).unwrap());
    let grid = default_sigma_grid(&ds.x);
    let sigma = select_sigma_cv(&ds.x, &ds.labels, 10, &grid, CvEmbedding::Kspca, 3).unwrap();
    let model = fit_kspca(&ds.x, KernelSpec::Rbf { sigma }, &delta_gram(&ds.labels), 2).unwrap();
    let z = model.training_embedding();
    // Leave-one-out 1-NN on the training embedding.
    let mut hits = 0;
    for i in 0..ds.len() {
        let rest: Vec<usize> = (0..ds.len()).filter(|&j| j != i).collect();
        let labels: Vec<usize> = rest.iter().map(|&j| ds.labels[j]).collect();
        let acc = one_nn_accuracy(&z.select_columns(&rest), &labels, &z.select_columns(&[i]), &[ds.labels[i]]).unwrap();
        hits += acc as usize;
    }
    let acc = hits as f64 / ds.len() as f64;
    assert!(acc > 0.9, "training 1-NN accuracy {acc}");
}

#[test]
fn ksrp_matches_kspca_on_spirals_200() {
    let params = EmbedParams::default();
    let (mut kspca, mut ksrp) = (0.0, 0.0);
    for seed in 0..10 {
        let ds = gen_spirals(200, 8, seed).unwrap();
        let parts = split(&ds, 0.7, seed).unwrap();
        let (train, test, _) = normalize01(&parts.train, &parts.test).unwrap();
        for (method, acc) in [(Method::Kspca, &mut kspca), (Method::Ksrp, &mut ksrp)] {
            let sigma = suproj::bench::resolve_sigma_x(&train, &params, method, seed).unwrap();
            let model = fit_method(method, &train, 2, sigma, &params, seed).unwrap();
            let z = model.transform(&test.x).unwrap();
            *acc += one_nn_accuracy(model.training_embedding(), &train.labels, &z, &test.labels).unwrap() / 10.0;
        }
    }
    assert!((kspca - ksrp).abs() <= 0.1, "KSPCA {kspca} vs KSRP {ksrp}");
}

#[test]
fn srp_training_accuracy_does_not_drop_from_k1_to_k2() {
    let ds = normalized(&gen_xor(200, 8, 5).unwrap());
    let params = EmbedParams {
        sigma_x: SigmaSetting::Fixed(1.0),
        ..EmbedParams::default()
    };
    let acc = |k: usize| {
        let model = fit_method(Method::Srp, &ds, k, f64::NAN, &params, 9).unwrap();
        let z = model.training_embedding();
        one_nn_accuracy(z, &ds.labels, z, &ds.labels).unwrap()
    };
    assert!(acc(2) >= acc(1));
}

#[test]
fn report_shape_and_ranges() {
    let ds = gen_xor(500, 8, 2).unwrap();
    let cfg = BenchConfig {
        methods: vec![Method::Spca, Method::Srp],
        ks: vec![2],
        repeats: 5,
        seed: 4,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&ds, &cfg).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert_eq!(report.aggregates.len(), 2);
    for row in &report.rows {
        assert!((0.0..=1.0).contains(&row.accuracy));
        assert!(row.fit_ns > 0 && row.transform_ns > 0);
        assert!(!row.contended);
    }
    for agg in &report.aggregates {
        assert_eq!(agg.runs, 5);
    }
}

#[test]
fn srp_close_to_spca_on_xor_500() {
    let ds = gen_xor(500, 8, 1).unwrap();
    let cfg = BenchConfig {
        methods: vec![Method::Spca, Method::Srp],
        ks: vec![2],
        repeats: 30,
        seed: 1,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&ds, &cfg).unwrap();
    let spca = report.aggregate(Method::Spca, 2).unwrap().accuracy_mean;
    let srp = report.aggregate(Method::Srp, 2).unwrap().accuracy_mean;
    assert!((spca - srp).abs() <= 0.1, "SPCA {spca} vs SRP {srp}");
}

#[test]
fn ksrp_fits_at_least_twice_as_fast_as_kspca_at_n_1000() {
    let ds = normalized(&gen_xor(1000, 8, 6).unwrap());
    let sigma = median_heuristic(&ds.x);
    let params = EmbedParams {
        sigma_x: SigmaSetting::Fixed(sigma),
        ..EmbedParams::default()
    };
    let time = |method: Method| {
        (0..3)
            .map(|r| {
                let t = std::time::Instant::now();
                std::hint::black_box(fit_method(method, &ds, 2, sigma, &params, r).unwrap());
                t.elapsed().as_secs_f64()
            })
            .sum::<f64>()
    };
    let (kspca, ksrp) = (time(Method::Kspca), time(Method::Ksrp));
    assert!(2.0 * ksrp <= kspca, "KSRP {ksrp} s vs KSPCA {kspca} s");
}

#[test]
fn fit_time_growth_with_n() {
    let sizes = [250, 500, 1000, 2000];
    let (mut kspca, mut srp) = (Vec::new(), Vec::new());
    for &n in &sizes {
        let ds = normalized(&gen_xor(n, 8, 8).unwrap());
        let sigma = median_heuristic(&ds.x);
        let params = EmbedParams {
            sigma_x: SigmaSetting::Fixed(sigma),
            ..EmbedParams::default()
        };
        for (method, out) in [(Method::Kspca, &mut kspca), (Method::Srp, &mut srp)] {
            let times: Vec<f64> = (0..5)
                .map(|r| {
                    let t = std::time::Instant::now();
                    std::hint::black_box(fit_method(method, &ds, 2, sigma, &params, r).unwrap());
                    t.elapsed().as_secs_f64()
                })
                .collect();
            out.push(common::median(times));
        }
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let ratios: Vec<f64> = kspca.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.windows(2).all(|r| r[1] > r[0]), "KSPCA growth ratios {ratios:?}");
    assert!(ratios.iter().all(|&r| r > 2.0), "KSPCA growth ratios {ratios:?}");
    let slope = common::loglog_slope(&xs, &srp);
    assert!(slope <= 2.0, "SRP slope {slope}");
}
