// Temporary convergence probe; deleted before finalizing.
use rankwitness_core::matrix::Mat;
use rankwitness_core::psd::{psd_search, verify_psd_factorization};

#[test]
#[ignore]
fn probe() {
    let s = 1.0 / 6.0;
    let m = Mat::from_rows(&[
        vec![0.0, s, s],
        vec![s, 0.0, s],
        vec![s, s, 0.0],
    ])
    .unwrap();
    for seed in [0u64, 1, 42, 777] {
        let t = std::time::Instant::now();
        let found = psd_search(&m, 2, 32, 400, 1e-8, seed);
        println!("seed={seed} found={} in {:?} verify={:?}", found.is_some(), t.elapsed(),
            found.map(|f| verify_psd_factorization(&m, &f, 1e-8).unwrap()));
    }
}
