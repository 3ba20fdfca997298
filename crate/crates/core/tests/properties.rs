use proptest::prelude::*;

use irsmec::channel::sample_channels;
use irsmec::scheduler::{solve_p1, SearchMode, SolveControls};
use irsmec::sim::experiment::trial_rng;
use irsmec::sim::ScenarioConfig;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // each phase alphabet contains the coarser ones, so a finer resolution
    // can only help
    #[test]
    fn finer_phase_resolution_never_hurts(seed in any::<u64>(), preset in 0usize..2, finite in any::<bool>()) {
        let name = ["symmetric", "asymmetric"][preset];
        let config = ScenarioConfig::load(name).unwrap();
        let mut rng = trial_rng(seed, 0, 0);
        let gains = config.geometry.link_gains().unwrap();
        let channels = sample_channels(&gains, 4, config.elements_per_subsurface, &mut rng);
        let mut task = config.task.clone();
        task.cloud_freq_hz = if finite { 5e9 } else { f64::INFINITY };
        let mut previous = f64::INFINITY;
        for levels in [1, 2, 4, 8] {
            let s = solve_p1(&channels, &task, &config.radio, SearchMode::Exhaustive, &SolveControls::new(levels)).unwrap();
            prop_assert!(s.delay_sum <= previous * (1.0 + 1e-12), "Q = {levels}: {} > {previous}", s.delay_sum);
            previous = s.delay_sum;
        }
    }
}
