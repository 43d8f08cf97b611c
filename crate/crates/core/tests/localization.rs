use std::sync::Arc;

use bosegas::localization::{
    gap_search, quav_beta_search, BallRule, BumpProfile, KineticMultiplier, PGrid, DEFAULT_B,
};
use bosegas::Error;

fn multiplier(s: f64) -> KineticMultiplier {
    KineticMultiplier::new(Arc::new(BumpProfile::new(4.0 / s)), s, &BallRule::default()).unwrap()
}

fn points(s: f64) -> Vec<[f64; 3]> {
    PGrid::Rays(48).points(3.0 / s)
}

#[test]
fn default_gap_constant_is_reproduced() {
    let beta = quav_beta_search().unwrap();
    let f = multiplier(0.05);
    let gap = gap_search(&f, beta, &points(0.05), 0.5).unwrap();
    assert!(gap.b >= DEFAULT_B, "{gap:?}");
}

#[test]
fn gap_search_fails_when_doubled_bound_fails() {
    let f = multiplier(0.1);
    assert!(!f.fs_bound_check(&points(0.1)).passes);
    assert!(matches!(
        gap_search(&f, 0.97, &points(0.1), 0.5),
        Err(Error::NotFound(_))
    ));
}

#[test]
fn inner_constant_does_not_grow_as_s_shrinks() {
    let coarse = multiplier(0.05).fs_bound_check(&points(0.05));
    let fine = multiplier(0.025).fs_bound_check(&points(0.025));
    assert!(coarse.passes && fine.passes);
    assert!(fine.fitted_c <= coarse.fitted_c);
}
