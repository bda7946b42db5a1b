#![allow(dead_code)]

pub mod oracles;

use std::sync::OnceLock;

use mmfpls::channel::{build_tap_matrix, LinkConfig, LinkSettings, TapProfile, DEFAULT_EDGE_RHO, DEFAULT_SIGMA_SQ_MIN};
use mmfpls::fiber::{solve_modes, FiberSpec};
use mmfpls::linalg::haar_unitary;
use mmfpls::rng::Seed;

/// Tap of the 55-mode reference fiber with default construction parameters.
pub fn reference_tap() -> &'static TapProfile {
    static TAP: OnceLock<TapProfile> = OnceLock::new();
    TAP.get_or_init(|| {
        let basis = solve_modes(&FiberSpec::reference()).unwrap();
        build_tap_matrix(&basis, DEFAULT_EDGE_RHO, DEFAULT_SIGMA_SQ_MIN).unwrap()
    })
}

/// Default link: Haar `T_AE = T_AB`, reference tap.
pub fn default_link(seed: u64, settings: LinkSettings) -> LinkConfig {
    let t = haar_unitary(55, Seed(seed)).unwrap();
    LinkConfig::new(t.clone(), t, reference_tap().clone(), settings).unwrap()
}
