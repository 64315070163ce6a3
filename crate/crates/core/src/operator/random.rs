use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{Scenario, Step};
use crate::panel::{PlantState, Switch};

/// Reproducible scenario of `len` steps over `plant`. Program labels are
/// drawn only from programs with a scheduled start; waits are whole
/// milliseconds so they survive fixed-precision serialization unchanged.
pub fn random_scenario(seed: u64, plant: &PlantState, len: usize) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let units: Vec<_> = plant.units().collect();
    let labels: Vec<(usize, usize)> = plant
        .programs
        .iter()
        .filter(|p| p.scheduled_start.is_some())
        .flat_map(|p| (0..p.entries.len()).map(move |e| (p.id, e)))
        .collect();
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let roll = rng.random_range(0..100);
        let step = match roll {
            0..35 if !units.is_empty() => Step::VerifyUnit {
                unit: units[rng.random_range(0..units.len())],
                expected: Switch::from_on(rng.random()),
            },
            35..70 if !units.is_empty() => Step::SetUnit {
                unit: units[rng.random_range(0..units.len())],
                desired: Switch::from_on(rng.random()),
            },
            70..80 => Step::FullStatusSweep,
            80..90 if !labels.is_empty() => {
                let (program, entry) = labels[rng.random_range(0..labels.len())];
                Step::AwaitProgramLabel { program, entry }
            }
            _ => Step::Wait {
                seconds: rng.random_range(0..5000u32) as f64 / 1000.0,
            },
        };
        steps.push(step);
    }
    let mut faults = std::collections::BTreeSet::new();
    for &(p, e) in &labels {
        if rng.random_range(0..10) == 0 {
            faults.insert((p, e));
        }
    }
    Scenario {
        id: format!("random-{seed}"),
        description: format!("{len} random steps, seed {seed}"),
        seed,
        steps,
        faults,
    }
}
