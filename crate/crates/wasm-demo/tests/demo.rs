use ostro_wasm::{conjugate, example1_orbit, zermelo_gap};

#[test]
fn orbit_tracks_the_closed_form() {
    let o = example1_orbit(-1.0, 2.0, [0.5, 0.1, -0.3, 0.2], 4.0, 0.01).unwrap();
    assert_eq!(o.times().len(), 401);
    assert!(o.max_error() < 1e-8, "{}", o.max_error());
    assert!(o.energy_drift() < 1e-10);
    assert!(example1_orbit(1.0, 0.0, [0.0; 4], 1.0, 0.1).is_err());
}

#[test]
fn conjugates_match_their_closed_forms() {
    let n = 41;
    let ps: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64).collect();
    let quad = conjugate("quadratic", -3.0, 3.0, n).unwrap();
    let cosh = conjugate("cosh", -3.0, 3.0, n).unwrap();
    for ((p, q), c) in ps.iter().zip(&quad).zip(&cosh) {
        assert!((q - 0.5 * p * p).abs() < 1e-12);
        assert!((c - (p * p.asinh() - (1.0 + p * p).sqrt())).abs() < 1e-10);
    }
    // y + y³ = p has the root y = 1 at p = 2: H = 2 − ¾.
    let quartic = conjugate("quartic", 2.0, 3.0, 2).unwrap();
    assert!((quartic[0] - 1.25).abs() < 1e-12);
    assert!(conjugate("sinc", 0.0, 1.0, 5).is_err());
    assert!(conjugate("cosh", 1.0, 0.0, 5).is_err());
}

#[test]
fn reparametrization_gap_vanishes_only_for_the_identity() {
    let jets = [0.0, 1.0, 0.5, 0.2];
    assert!(zermelo_gap(1.0, 1.0, 0.0, jets).unwrap().abs() < 1e-12);
    assert!(zermelo_gap(1.0, 1.0, 0.5, jets).unwrap().abs() > 1e-3);
    assert!(zermelo_gap(1.0, 1.0, -0.5, jets).unwrap().abs() > 1e-3);
    assert!(zermelo_gap(1.0, 1.0, 1.0, jets).is_err());
}
