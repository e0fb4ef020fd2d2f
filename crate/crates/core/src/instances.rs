//! Monotone k-submodular function families, their JSON form, and random
//! instance generation.
//!
//! Three families are supported:
//!
//! * `assignment_modular`: `f(x) = Σ_{e : x(e) ≠ 0} w(e, x(e))`.
//! * `separable_coverage`: `f(X_1..X_k) = Σ_i w_i(∪_{e ∈ X_i} S_e)`, one
//!   weighted coverage function per part.
//! * `table`: an explicit value for every vector, validated exhaustively.
//!
//! The first two are monotone k-submodular by construction. Tables carry a
//! `validated` flag that is only ever set after the monotonicity and
//! k-submodularity checkers pass.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::lattice::{GroundSet, KVector};
use crate::oracle::{TableOracle, ValueOracle, DEFAULT_TABLE_BUDGET};
use crate::properties::verify_all;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AssignmentModular,
    SeparableCoverage,
    Table,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::AssignmentModular,
        Family::SeparableCoverage,
        Family::Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::AssignmentModular => "assignment_modular",
            Family::SeparableCoverage => "separable_coverage",
            Family::Table => "table",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assignment_modular" | "modular" => Ok(Family::AssignmentModular),
            "separable_coverage" | "coverage" => Ok(Family::SeparableCoverage),
            "table" => Ok(Family::Table),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// Which families `random_monotone_instance` may draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyMix {
    Only(Family),
    /// Uniform over all three families, chosen from the seed.
    Any,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Function {
    AssignmentModular {
        /// `weights[e][i - 1] = w(e, i)`.
        weights: Vec<Vec<f64>>,
    },
    SeparableCoverage {
        universe: Vec<String>,
        /// `cover[e]` lists universe indices of `S_e`.
        cover: Vec<Vec<usize>>,
        /// `part_weights[i - 1][u]`.
        part_weights: Vec<Vec<f64>>,
    },
    Table(TableOracle),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    ground: GroundSet,
    function: Function,
    validated: bool,
}

impl Instance {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn function(&self) -> &Function {
        &self.function
    }

    pub fn family(&self) -> Family {
        match self.function {
            Function::AssignmentModular { .. } => Family::AssignmentModular,
            Function::SeparableCoverage { .. } => Family::SeparableCoverage,
            Function::Table(_) => Family::Table,
        }
    }

    /// True for the constructed families; for tables, only after
    /// [`Instance::validate`] has passed.
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// True when every value the oracle can return is an integer.
    pub fn is_integral(&self) -> bool {
        let int = |w: &f64| w.fract() == 0.0;
        match &self.function {
            Function::AssignmentModular { weights } => weights.iter().flatten().all(int),
            Function::SeparableCoverage { part_weights, .. } => {
                part_weights.iter().flatten().all(int)
            }
            Function::Table(t) => t.is_integral(),
        }
    }

    /// Runs the monotone and k-submodular checkers and records the outcome.
    pub fn validate(&mut self, budget: u128) -> Result<bool> {
        let table = TableOracle::tabulate(self, budget)?;
        let report = verify_all(&table, budget)?;
        self.validated = report.is_monotone_k_submodular();
        Ok(self.validated)
    }

    /// Tabulated copy of this instance.
    pub fn to_table(&self, budget: u128) -> Result<TableOracle> {
        TableOracle::tabulate(self, budget)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    fn to_file(&self) -> InstanceFile {
        let names = self.ground.elements();
        let function = match &self.function {
            Function::AssignmentModular { weights } => FunctionSpec::AssignmentModular {
                weights: names.iter().cloned().zip(weights.iter().cloned()).collect(),
            },
            Function::SeparableCoverage {
                universe,
                cover,
                part_weights,
            } => FunctionSpec::SeparableCoverage {
                cover_sets: names
                    .iter()
                    .zip(cover)
                    .map(|(e, set)| {
                        (
                            e.clone(),
                            set.iter().map(|&u| universe[u].clone()).collect(),
                        )
                    })
                    .collect(),
                topic_weights: part_weights
                    .iter()
                    .map(|ws| {
                        universe
                            .iter()
                            .zip(ws)
                            .map(|(u, &w)| (u.clone(), w))
                            .collect()
                    })
                    .collect(),
            },
            Function::Table(t) => FunctionSpec::Table {
                values: t.vectors().map(|x| (x.key(), t.evaluate(&x))).collect(),
                validated: self.validated,
            },
        };
        InstanceFile {
            k: self.ground.k(),
            ground: names.to_vec(),
            function,
        }
    }

    fn from_file(file: InstanceFile) -> Result<Self> {
        let ground = GroundSet::new(file.ground, file.k)?;
        match file.function {
            FunctionSpec::AssignmentModular { weights } => {
                build_assignment_modular(ground, &weights)
            }
            FunctionSpec::SeparableCoverage {
                cover_sets,
                topic_weights,
            } => build_separable_coverage(ground, &cover_sets, &topic_weights),
            FunctionSpec::Table { values, validated } => {
                let n = ground.n();
                let k = ground.k();
                let size = check_budget(k as usize + 1, n, DEFAULT_TABLE_BUDGET)? as usize;
                let mut table = TableOracle::from_values(n, k, vec![0.0; size])?;
                let mut seen = vec![false; table.values().len()];
                for (key, value) in values {
                    let x = ground.vector(KVector::parse_key(&key)?.as_slice().to_vec())?;
                    if !value.is_finite() {
                        return Err(Error::Validation(format!("value at '{key}' is not finite")));
                    }
                    let idx = table.index(&x);
                    if seen[idx] {
                        return Err(Error::Validation(format!("duplicate table key '{key}'")));
                    }
                    seen[idx] = true;
                    table.set(&x, value);
                }
                if let Some(missing) = seen.iter().position(|s| !s) {
                    let x = table.vectors().nth(missing).expect("index in range");
                    return Err(Error::Validation(format!(
                        "table is missing key '{}'",
                        x.key()
                    )));
                }
                let mut instance = Instance {
                    ground,
                    function: Function::Table(table),
                    validated: false,
                };
                if validated && !instance.validate(DEFAULT_TABLE_BUDGET)? {
                    return Err(Error::Validation(
                        "table claims validated but is not monotone k-submodular".into(),
                    ));
                }
                Ok(instance)
            }
        }
    }
}

impl ValueOracle for Instance {
    fn n(&self) -> usize {
        self.ground.n()
    }

    fn k(&self) -> u32 {
        self.ground.k()
    }

    fn evaluate(&self, x: &KVector) -> f64 {
        match &self.function {
            Function::AssignmentModular { weights } => x
                .as_slice()
                .iter()
                .zip(weights)
                .filter(|(&part, _)| part != 0)
                .map(|(&part, w)| w[part as usize - 1])
                .sum(),
            Function::SeparableCoverage {
                universe,
                cover,
                part_weights,
            } => {
                let mut covered = vec![false; universe.len()];
                let mut total = 0.0;
                for (part, ws) in part_weights.iter().enumerate() {
                    covered.iter_mut().for_each(|c| *c = false);
                    for e in x.part_members(part as u32 + 1) {
                        for &u in &cover[e] {
                            covered[u] = true;
                        }
                    }
                    total += covered
                        .iter()
                        .zip(ws)
                        .filter(|(&c, _)| c)
                        .map(|(_, &w)| w)
                        .sum::<f64>();
                }
                total
            }
            Function::Table(t) => t.evaluate(x),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    k: u32,
    ground: Vec<String>,
    function: FunctionSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum FunctionSpec {
    AssignmentModular {
        weights: BTreeMap<String, Vec<f64>>,
    },
    SeparableCoverage {
        cover_sets: BTreeMap<String, Vec<String>>,
        topic_weights: Vec<BTreeMap<String, f64>>,
    },
    Table {
        values: BTreeMap<String, f64>,
        #[serde(default)]
        validated: bool,
    },
}

fn check_weight(what: &str, w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::Validation(format!("{what} has invalid weight {w}")));
    }
    Ok(())
}

/// `f(x) = Σ_{e : x(e) ≠ 0} w(e, x(e))`. `weights` maps an element name to
/// its `k` part weights; absent elements weigh zero in every part.
pub fn build_assignment_modular(
    ground: GroundSet,
    weights: &BTreeMap<String, Vec<f64>>,
) -> Result<Instance> {
    let k = ground.k() as usize;
    let mut table = vec![vec![0.0; k]; ground.n()];
    for (name, ws) in weights {
        let e = ground
            .position(name)
            .ok_or_else(|| Error::Validation(format!("unknown element '{name}'")))?;
        if ws.len() != k {
            return Err(Error::Validation(format!(
                "element '{name}' has {} weights, expected {k}",
                ws.len()
            )));
        }
        for &w in ws {
            check_weight(name, w)?;
        }
        table[e] = ws.clone();
    }
    Ok(Instance {
        ground,
        function: Function::AssignmentModular { weights: table },
        validated: true,
    })
}

/// One weighted coverage function per part, summed. The universe is the set
/// of items named in `topic_weights`; cover sets may only use those items.
pub fn build_separable_coverage(
    ground: GroundSet,
    cover_sets: &BTreeMap<String, Vec<String>>,
    topic_weights: &[BTreeMap<String, f64>],
) -> Result<Instance> {
    let k = ground.k() as usize;
    if topic_weights.len() != k {
        return Err(Error::Validation(format!(
            "{} topic weight maps, expected {k}",
            topic_weights.len()
        )));
    }
    let universe: Vec<String> = topic_weights
        .iter()
        .flat_map(|m| m.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |u: &str| universe.binary_search_by(|x| x.as_str().cmp(u)).ok();

    let mut part_weights = vec![vec![0.0; universe.len()]; k];
    for (part, m) in topic_weights.iter().enumerate() {
        for (u, &w) in m {
            check_weight(u, w)?;
            part_weights[part][index(u).expect("universe built from keys")] = w;
        }
    }

    let mut cover = vec![Vec::new(); ground.n()];
    for (name, items) in cover_sets {
        let e = ground
            .position(name)
            .ok_or_else(|| Error::Validation(format!("unknown element '{name}'")))?;
        let mut set = Vec::with_capacity(items.len());
        for u in items {
            let idx = index(u)
                .ok_or_else(|| Error::Validation(format!("unknown universe element '{u}'")))?;
            if !set.contains(&idx) {
                set.push(idx);
            }
        }
        set.sort_unstable();
        cover[e] = set;
    }

    Ok(Instance {
        ground,
        function: Function::SeparableCoverage {
            universe,
            cover,
            part_weights,
        },
        validated: true,
    })
}

/// A table instance. Unvalidated until [`Instance::validate`] passes.
pub fn build_table(ground: GroundSet, table: TableOracle) -> Result<Instance> {
    if table.n() != ground.n() || table.k() != ground.k() {
        return Err(Error::Validation(format!(
            "table shape (n={}, k={}) does not match ground set (n={}, k={})",
            table.n(),
            table.k(),
            ground.n(),
            ground.k()
        )));
    }
    Ok(Instance {
        ground,
        function: Function::Table(table),
        validated: false,
    })
}

/// Sampling attempts before `random_monotone_instance` gives up on tables.
pub const DEFAULT_REJECTION_BUDGET: usize = 10_000;

/// Largest value a generated table may hold.
const TABLE_VALUE_MAX: f64 = 100.0;

/// Draws a monotone k-submodular instance; a pure function of its arguments.
///
/// Table instances are rejection sampled: each proposal is a capped sum of
/// random modular and coverage terms, sometimes perturbed at a random entry,
/// and is kept only once both checkers accept it.
pub fn random_monotone_instance(seed: u64, n: usize, k: u32, mix: FamilyMix) -> Result<Instance> {
    random_monotone_instance_with_budget(seed, n, k, mix, DEFAULT_REJECTION_BUDGET)
}

pub fn random_monotone_instance_with_budget(
    seed: u64,
    n: usize,
    k: u32,
    mix: FamilyMix,
    rejection_budget: usize,
) -> Result<Instance> {
    let ground = GroundSet::numbered(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = match mix {
        FamilyMix::Only(f) => f,
        FamilyMix::Any => Family::ALL[rng.gen_range(0..Family::ALL.len())],
    };
    match family {
        Family::AssignmentModular => {
            let weights = random_modular_weights(&mut rng, n, k, 20);
            let named = ground.elements().iter().cloned().zip(weights).collect();
            build_assignment_modular(ground, &named)
        }
        Family::SeparableCoverage => {
            let (cover_sets, topic_weights) = random_coverage_spec(&mut rng, &ground, n + 2, 10);
            build_separable_coverage(ground, &cover_sets, &topic_weights)
        }
        Family::Table => {
            check_budget(k as usize + 1, 2 * n, DEFAULT_TABLE_BUDGET)?;
            for _ in 0..rejection_budget {
                let table = propose_table(&mut rng, &ground)?;
                let mut instance = build_table(ground.clone(), table)?;
                if instance.validate(DEFAULT_TABLE_BUDGET)? {
                    return Ok(instance);
                }
            }
            Err(Error::RejectionExhausted {
                samples: rejection_budget,
            })
        }
    }
}

fn random_modular_weights(rng: &mut ChaCha8Rng, n: usize, k: u32, max: u32) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..k).map(|_| rng.gen_range(0..=max) as f64).collect())
        .collect()
}

type CoverageSpec = (BTreeMap<String, Vec<String>>, Vec<BTreeMap<String, f64>>);

fn random_coverage_spec(
    rng: &mut ChaCha8Rng,
    ground: &GroundSet,
    universe_size: usize,
    max_weight: u32,
) -> CoverageSpec {
    let universe: Vec<String> = (1..=universe_size).map(|u| format!("u{u}")).collect();
    let cover_sets = ground
        .elements()
        .iter()
        .map(|e| {
            let mut set: Vec<String> = universe
                .iter()
                .filter(|_| rng.gen_bool(0.4))
                .cloned()
                .collect();
            if set.is_empty() {
                set.push(universe[rng.gen_range(0..universe.len())].clone());
            }
            (e.clone(), set)
        })
        .collect();
    let topic_weights = (0..ground.k())
        .map(|_| {
            universe
                .iter()
                .map(|u| (u.clone(), rng.gen_range(0..=max_weight) as f64))
                .collect()
        })
        .collect();
    (cover_sets, topic_weights)
}

fn propose_table(rng: &mut ChaCha8Rng, ground: &GroundSet) -> Result<TableOracle> {
    let n = ground.n();
    let k = ground.k();
    let modular = random_modular_weights(rng, n, k, 12);
    let cap = rng.gen_range(5..=60) as f64;
    let (cover_sets, topic_weights) = random_coverage_spec(rng, ground, 4, 6);
    let coverage = build_separable_coverage(ground.clone(), &cover_sets, &topic_weights)?;
    let modular = build_assignment_modular(
        ground.clone(),
        &ground.elements().iter().cloned().zip(modular).collect(),
    )?;

    let mut table = TableOracle::tabulate(
        &crate::oracle::FnOracle::new(n, k, |x: &KVector| {
            let v = modular.evaluate(x).min(cap) + coverage.evaluate(x);
            v.min(TABLE_VALUE_MAX)
        }),
        DEFAULT_TABLE_BUDGET,
    )?;

    if rng.gen_bool(0.5) {
        let entries = table.values().len();
        let idx = rng.gen_range(1..entries);
        let x = table.vectors().nth(idx).expect("index in range");
        let delta = rng.gen_range(1..=3) as f64 * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let v = (table.evaluate(&x) + delta).clamp(0.0, TABLE_VALUE_MAX);
        table.set(&x, v);
    }
    Ok(table)
}

/// A table of independent integers in `[0, 100]` with `f(0) = 0`. No
/// structure is imposed, so most draws are not k-submodular.
pub fn random_table(seed: u64, n: usize, k: u32) -> Result<TableOracle> {
    check_budget(k as usize + 1, n, DEFAULT_TABLE_BUDGET)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = (k as usize + 1).pow(n as u32);
    let mut values: Vec<f64> = (0..size)
        .map(|_| rng.gen_range(0..=TABLE_VALUE_MAX as u32) as f64)
        .collect();
    values[0] = 0.0;
    TableOracle::from_values(n, k, values)
}
