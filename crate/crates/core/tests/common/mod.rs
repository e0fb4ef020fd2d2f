#![allow(dead_code)]

use std::collections::BTreeMap;

use ksubmod::instances::{
    build_assignment_modular, build_separable_coverage, random_monotone_instance, Family,
    FamilyMix, Function, Instance,
};
use ksubmod::GroundSet;

pub struct SuiteInstance {
    pub label: String,
    pub instance: Instance,
}

fn seed_for(n: usize, k: u32, family: usize, idx: u64) -> u64 {
    10_000 * n as u64 + 1_000 * k as u64 + 100 * family as u64 + idx
}

/// Divides every weight of a constructed instance by 7, giving values that
/// are not exactly representable.
fn fractional_copy(instance: &Instance) -> Instance {
    let ground = instance.ground().clone();
    match instance.function() {
        Function::AssignmentModular { weights } => {
            let named: BTreeMap<String, Vec<f64>> = ground
                .elements()
                .iter()
                .cloned()
                .zip(
                    weights
                        .iter()
                        .map(|ws| ws.iter().map(|w| w / 7.0).collect()),
                )
                .collect();
            build_assignment_modular(ground, &named).unwrap()
        }
        Function::SeparableCoverage {
            universe,
            cover,
            part_weights,
        } => {
            let cover_sets = ground
                .elements()
                .iter()
                .zip(cover)
                .map(|(e, set)| {
                    (
                        e.clone(),
                        set.iter().map(|&u| universe[u].clone()).collect(),
                    )
                })
                .collect();
            let topic_weights: Vec<BTreeMap<String, f64>> = part_weights
                .iter()
                .map(|ws| {
                    universe
                        .iter()
                        .cloned()
                        .zip(ws.iter().map(|w| w / 7.0))
                        .collect()
                })
                .collect();
            build_separable_coverage(ground, &cover_sets, &topic_weights).unwrap()
        }
        Function::Table(_) => unreachable!("tables are kept integral"),
    }
}

/// The fixed instance suite: n in 2..=5, k in 1..=3, every family, nine seeds
/// each (324 integral instances), plus 72 fractional copies of constructed ones.
pub fn suite() -> Vec<SuiteInstance> {
    let mut out = Vec::new();
    for n in 2..=5usize {
        for k in 1..=3u32 {
            for (fi, family) in Family::ALL.iter().enumerate() {
                for idx in 0..9u64 {
                    let seed = seed_for(n, k, fi, idx);
                    let instance =
                        random_monotone_instance(seed, n, k, FamilyMix::Only(*family)).unwrap();
                    if *family != Family::Table && idx < 3 {
                        out.push(SuiteInstance {
                            label: format!("{}-frac n={n} k={k} seed={seed}", family.name()),
                            instance: fractional_copy(&instance),
                        });
                    }
                    out.push(SuiteInstance {
                        label: format!("{} n={n} k={k} seed={seed}", family.name()),
                        instance,
                    });
                }
            }
        }
    }
    out
}

pub fn ground(n: usize, k: u32) -> GroundSet {
    GroundSet::numbered(n, k).unwrap()
}
