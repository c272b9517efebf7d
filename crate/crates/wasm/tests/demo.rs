use oft_wasm::{spectrum, Scatter2d, Solve1d};

#[test]
fn solve1d_tracks_the_exact_field() {
    let s = Solve1d::compute(10.0, 200, 5e-3, 40.0).unwrap();
    assert_eq!(s.x().len(), 200);
    assert_eq!(s.approx().len(), s.exact().len());
    assert!(s.rel_err() < 0.05, "relErr {}", s.rel_err());
    assert!(s.residual() < 0.05, "residual {}", s.residual());
}

#[test]
fn uniform_medium_scatters_nothing() {
    let s = Scatter2d::compute(31, 8.0, 0.0, 0.3, 0.05).unwrap();
    assert_eq!(s.re().len(), 31 * 31);
    assert!(s.re().iter().chain(s.im().iter()).all(|v| *v == 0.0));
}

#[test]
fn bump_scatters_symmetrically() {
    let n = 41;
    let s = Scatter2d::compute(n, 8.0, 0.2, 0.3, 0.05).unwrap();
    let (re, im) = (s.re(), s.im());
    let peak = re.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(peak > 1e-3 && s.residual() < 1.0);
    for j in 0..n {
        for i in 0..n {
            let a = i + n * j;
            let b = i + n * (n - 1 - j);
            assert!((re[a] - re[b]).abs() < 1e-12 && (im[a] - im[b]).abs() < 1e-12);
        }
    }
}

#[test]
fn spectrum_interleaves_roots() {
    let s = spectrum(10.0, 2.0, 6).unwrap();
    assert_eq!(s.len(), 18);
    for root in s.chunks(3) {
        assert!(root[0] > 0.0 && root[1] < 0.0 && root[2] < 1e-10, "{root:?}");
    }
    assert!(spectrum(-1.0, 2.0, 3).is_err());
}
