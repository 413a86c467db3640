//! Seeded generators for two COP families: bin packing (sum objective) and
//! jobshop scheduling (makespan via per-operation upper bounds on the
//! objective). Generation is constructive: every instance carries a feasible
//! witness assignment that is verified before the instance is returned.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cop::{Constraint, CopInstance, LinearIneq, Params, Role, Variable};
use crate::solver::assignment_satisfies;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    Invalid(String),
    #[error("spec exceeds desk-scale cap: {0}")]
    TooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    BinPacking { items: usize, capacity: i64, weight_min: i64, weight_max: i64 },
    Jobshop { jobs: usize, machines: usize, duration_min: i64, duration_max: i64, use_max_of: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl GenSpec {
    /// Default desk-scale bin packing: 6 items, capacity 10, weights 2..=7.
    pub fn bin_packing_default(seed: u64) -> Self {
        GenSpec {
            family: Family::BinPacking { items: 6, capacity: 10, weight_min: 2, weight_max: 7 },
            seed,
        }
    }

    /// Default desk-scale jobshop: 3 jobs x 2 machines, durations 1..=9.
    pub fn jobshop_default(seed: u64) -> Self {
        GenSpec {
            family: Family::Jobshop {
                jobs: 3,
                machines: 2,
                duration_min: 1,
                duration_max: 9,
                use_max_of: false,
            },
            seed,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        match &self.family {
            Family::BinPacking { items, capacity, weight_min, weight_max } => {
                if *items < 1 || *capacity < 1 {
                    return Err(GenError::Invalid("items and capacity must be >= 1".into()));
                }
                if weight_min > weight_max || *weight_min < 1 {
                    return Err(GenError::Invalid("weight bounds must satisfy 1 <= min <= max".into()));
                }
                if weight_max > capacity {
                    return Err(GenError::Invalid("max weight must not exceed capacity".into()));
                }
                if *items > 12 {
                    return Err(GenError::TooLarge(format!("{items} items (cap 12)")));
                }
            }
            Family::Jobshop { jobs, machines, duration_min, duration_max, .. } => {
                if *jobs < 1 || *machines < 1 {
                    return Err(GenError::Invalid("jobs and machines must be >= 1".into()));
                }
                if duration_min > duration_max || *duration_min < 1 {
                    return Err(GenError::Invalid("duration bounds must satisfy 1 <= min <= max".into()));
                }
                if jobs * machines > 16 {
                    return Err(GenError::TooLarge(format!(
                        "{jobs}x{machines} operations (cap 16)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Generates one instance; deterministic per spec + seed.
pub fn generate(spec: &GenSpec) -> Result<CopInstance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (m, witness) = match &spec.family {
        Family::BinPacking { items, capacity, weight_min, weight_max } => {
            bin_packing(*items, *capacity, *weight_min, *weight_max, spec.seed, &mut rng)
        }
        Family::Jobshop { jobs, machines, duration_min, duration_max, use_max_of } => {
            jobshop(*jobs, *machines, *duration_min, *duration_max, *use_max_of, spec.seed, &mut rng)
        }
    };
    debug_assert!(m.validate().is_ok());
    assert!(assignment_satisfies(&m, &witness), "generated witness must satisfy the instance");
    Ok(m)
}

/// Independent seeded instances, with per-instance seeds derived from
/// (seed, index) so any batch element can be regenerated in isolation.
pub fn generate_batch(spec: &GenSpec, count: usize) -> Result<Vec<CopInstance>, GenError> {
    (0..count)
        .map(|i| {
            let mut s = spec.clone();
            s.seed = derive_seed(spec.seed, i);
            generate(&s)
        })
        .collect()
}

pub fn derive_seed(base: u64, index: usize) -> u64 {
    // splitmix64 over the pair keeps derived streams independent
    let mut x = base ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Bin packing with bin-indicator encoding. Items carry random weights; each
/// item is assigned to exactly one of `items` bins; bin loads respect the
/// capacity; the objective counts used bins. Symmetry is broken by allowing
/// item i only bins 0..=i and ordering bin-used indicators.
fn bin_packing(
    items: usize,
    capacity: i64,
    wmin: i64,
    wmax: i64,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> (CopInstance, BTreeMap<String, i64>) {
    let weights: Vec<i64> = (0..items).map(|_| rng.gen_range(wmin..=wmax)).collect();
    let bins = items;

    let mut variables = Vec::new();
    let mut constraints = Vec::new();
    let assign = |i: usize, b: usize| format!("x_{i}_{b}");
    let used = |b: usize| format!("u_{b}");

    for i in 0..items {
        for b in 0..bins {
            let ub = if b <= i { 1 } else { 0 };
            variables.push(Variable { id: assign(i, b), lb: 0, ub, role: Role::Decision });
        }
    }
    for b in 0..bins {
        variables.push(Variable { id: used(b), lb: 0, ub: 1, role: Role::Decision });
    }
    variables.push(Variable { id: "z".into(), lb: 1, ub: items as i64, role: Role::Objective });

    // each item in exactly one bin
    for i in 0..items {
        constraints.push(Constraint::LinearEq {
            terms: (0..bins).map(|b| (1, assign(i, b))).collect(),
            rhs: 1,
        });
    }
    // capacity per bin
    for b in 0..bins {
        constraints.push(Constraint::LinearLe {
            terms: (0..items).map(|i| (weights[i], assign(i, b))).collect(),
            rhs: capacity,
        });
    }
    // x_{i,b} <= u_b
    for i in 0..items {
        for b in 0..=i.min(bins - 1) {
            constraints.push(Constraint::LinearLe {
                terms: vec![(1, assign(i, b)), (-1, used(b))],
                rhs: 0,
            });
        }
    }
    // used bins are densely packed from index 0
    for b in 1..bins {
        constraints.push(Constraint::LinearLe {
            terms: vec![(1, used(b)), (-1, used(b - 1))],
            rhs: 0,
        });
    }
    // z = sum of used indicators
    let mut z_terms: Vec<(i64, String)> = vec![(1, "z".into())];
    z_terms.extend((0..bins).map(|b| (-1, used(b))));
    constraints.push(Constraint::LinearEq { terms: z_terms, rhs: 0 });

    // first-fit witness (bins in use order, so item i lands in a bin <= i)
    let mut loads = vec![0i64; bins];
    let mut open = 0usize;
    let mut witness = BTreeMap::new();
    for i in 0..items {
        let mut placed = None;
        for b in 0..open {
            if loads[b] + weights[i] <= capacity {
                placed = Some(b);
                break;
            }
        }
        let b = placed.unwrap_or_else(|| {
            open += 1;
            open - 1
        });
        loads[b] += weights[i];
        for bb in 0..bins {
            witness.insert(assign(i, bb), i64::from(bb == b));
        }
    }
    for b in 0..bins {
        witness.insert(used(b), i64::from(b < open));
    }
    witness.insert("z".into(), open as i64);

    let params = Params {
        scalars: [("capacity".to_string(), capacity), ("items".to_string(), items as i64)].into(),
        arrays: [("weights".to_string(), weights)].into(),
    };
    let m = CopInstance {
        name: format!("binpacking_{seed:016x}"),
        params,
        variables,
        constraints,
        objective: "z".into(),
        known_optimum: None,
    };
    (m, witness)
}

/// Jobshop: each job visits every machine once in a random order; operations
/// on the same machine may not overlap (binary disjunctions); the objective
/// bounds every operation end from above. A `use_max_of` flag switches the
/// makespan link to an explicit max over end-time variables.
fn jobshop(
    jobs: usize,
    machines: usize,
    dmin: i64,
    dmax: i64,
    use_max_of: bool,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> (CopInstance, BTreeMap<String, i64>) {
    let durations: Vec<Vec<i64>> =
        (0..jobs).map(|_| (0..machines).map(|_| rng.gen_range(dmin..=dmax)).collect()).collect();
    // machine order per job: random permutation
    let orders: Vec<Vec<usize>> = (0..jobs)
        .map(|_| {
            let mut p: Vec<usize> = (0..machines).collect();
            for i in (1..p.len()).rev() {
                p.swap(i, rng.gen_range(0..=i));
            }
            p
        })
        .collect();
    let horizon: i64 = durations.iter().flatten().sum();

    let start = |j: usize, k: usize| format!("s_{j}_{k}"); // k = position in job order
    let mut variables = Vec::new();
    let mut constraints = Vec::new();
    for j in 0..jobs {
        for k in 0..machines {
            variables.push(Variable {
                id: start(j, k),
                lb: 0,
                ub: horizon - durations[j][orders[j][k]],
                role: Role::Decision,
            });
        }
    }
    if use_max_of {
        for j in 0..jobs {
            for k in 0..machines {
                variables.push(Variable {
                    id: format!("e_{j}_{k}"),
                    lb: durations[j][orders[j][k]],
                    ub: horizon,
                    role: Role::Decision,
                });
            }
        }
    }
    variables.push(Variable { id: "z".into(), lb: 0, ub: horizon, role: Role::Objective });

    // precedence within each job
    for j in 0..jobs {
        for k in 1..machines {
            let d_prev = durations[j][orders[j][k - 1]];
            constraints.push(Constraint::LinearLe {
                terms: vec![(1, start(j, k - 1)), (-1, start(j, k))],
                rhs: -d_prev,
            });
        }
    }
    // machine exclusivity
    for mach in 0..machines {
        let ops: Vec<(usize, usize)> = (0..jobs)
            .map(|j| {
                let k = orders[j].iter().position(|&m| m == mach).unwrap();
                (j, k)
            })
            .collect();
        for a in 0..ops.len() {
            for b in (a + 1)..ops.len() {
                let (j1, k1) = ops[a];
                let (j2, k2) = ops[b];
                let d1 = durations[j1][orders[j1][k1]];
                let d2 = durations[j2][orders[j2][k2]];
                constraints.push(Constraint::Disjunction {
                    left: LinearIneq {
                        terms: vec![(1, start(j1, k1)), (-1, start(j2, k2))],
                        rhs: -d1,
                    },
                    right: LinearIneq {
                        terms: vec![(1, start(j2, k2)), (-1, start(j1, k1))],
                        rhs: -d2,
                    },
                });
            }
        }
    }
    // makespan link
    if use_max_of {
        for j in 0..jobs {
            for k in 0..machines {
                let d = durations[j][orders[j][k]];
                constraints.push(Constraint::LinearEq {
                    terms: vec![(1, format!("e_{j}_{k}")), (-1, start(j, k))],
                    rhs: d,
                });
            }
        }
        constraints.push(Constraint::MaxOf {
            target: "z".into(),
            operands: (0..jobs)
                .flat_map(|j| (0..machines).map(move |k| format!("e_{j}_{k}")))
                .collect(),
        });
    } else {
        for j in 0..jobs {
            for k in 0..machines {
                let d = durations[j][orders[j][k]];
                constraints.push(Constraint::LinearLe {
                    terms: vec![(1, start(j, k)), (-1, "z".into())],
                    rhs: -d,
                });
            }
        }
    }

    // sequential witness: jobs run back to back
    let mut witness = BTreeMap::new();
    let mut t = 0i64;
    for j in 0..jobs {
        for k in 0..machines {
            witness.insert(start(j, k), t);
            if use_max_of {
                witness.insert(format!("e_{j}_{k}"), t + durations[j][orders[j][k]]);
            }
            t += durations[j][orders[j][k]];
        }
    }
    witness.insert("z".into(), horizon);

    let flat: Vec<i64> = durations.iter().flatten().copied().collect();
    let machine_seq: Vec<i64> =
        orders.iter().flatten().map(|&m| m as i64).collect();
    let params = Params {
        scalars: [
            ("jobs".to_string(), jobs as i64),
            ("machines".to_string(), machines as i64),
            ("horizon".to_string(), horizon),
        ]
        .into(),
        arrays: [
            ("durations".to_string(), flat),
            ("machine_order".to_string(), machine_seq),
        ]
        .into(),
    };
    let m = CopInstance {
        name: format!("jobshop_{seed:016x}"),
        params,
        variables,
        constraints,
        objective: "z".into(),
        known_optimum: None,
    };
    (m, witness)
}
