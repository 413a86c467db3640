//! COP data model: variables with finite integer domains, a small constraint
//! vocabulary (linear inequalities/equalities, max, binary disjunction), one
//! minimization objective variable, and a canonical JSON instance format.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("invalid boundary: lo {lo} > hi {hi}")]
    InvalidBoundary { lo: i64, hi: i64 },
}

/// Inclusive integer interval. `lb <= ub` always holds for constructed
/// domains; empty domains exist only transiently inside the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub lb: i64,
    pub ub: i64,
}

impl Domain {
    pub fn new(lb: i64, ub: i64) -> Result<Self, ModelError> {
        if lb > ub {
            return Err(ModelError::Semantic(format!("empty domain {lb}..{ub}")));
        }
        Ok(Domain { lb, ub })
    }

    pub fn size(&self) -> i64 {
        self.ub - self.lb + 1
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lb <= v && v <= self.ub
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Decision,
    Objective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub lb: i64,
    pub ub: i64,
    pub role: Role,
}

impl Variable {
    pub fn domain(&self) -> Domain {
        Domain { lb: self.lb, ub: self.ub }
    }
}

/// One side of a disjunction: `sum(coeff * var) <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearIneq {
    pub terms: Vec<(i64, String)>,
    pub rhs: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// sum(coeff * var) <= rhs
    LinearLe { terms: Vec<(i64, String)>, rhs: i64 },
    /// sum(coeff * var) == rhs
    LinearEq { terms: Vec<(i64, String)>, rhs: i64 },
    /// target == max(operands)
    MaxOf { target: String, operands: Vec<String> },
    /// left or right, both linear inequalities
    Disjunction { left: LinearIneq, right: LinearIneq },
}

impl Constraint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Constraint::LinearLe { .. } => "linear_le",
            Constraint::LinearEq { .. } => "linear_eq",
            Constraint::MaxOf { .. } => "max_of",
            Constraint::Disjunction { .. } => "disjunction",
        }
    }

    /// Variable ids referenced by this constraint.
    pub fn referenced_vars(&self) -> Vec<&str> {
        match self {
            Constraint::LinearLe { terms, .. } | Constraint::LinearEq { terms, .. } => {
                terms.iter().map(|(_, v)| v.as_str()).collect()
            }
            Constraint::MaxOf { target, operands } => {
                let mut v: Vec<&str> = vec![target.as_str()];
                v.extend(operands.iter().map(|s| s.as_str()));
                v
            }
            Constraint::Disjunction { left, right } => left
                .terms
                .iter()
                .chain(right.terms.iter())
                .map(|(_, v)| v.as_str())
                .collect(),
        }
    }
}

/// Named scalar and integer-array inputs that generated the instance,
/// retained for feature extraction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Params {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopInstance {
    pub name: String,
    pub params: Params,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: String,
    pub known_optimum: Option<i64>,
}

impl CopInstance {
    pub fn variable(&self, id: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn objective_domain(&self) -> Domain {
        self.variable(&self.objective)
            .expect("validated instance has its objective variable")
            .domain()
    }

    /// Checks all structural invariants. Called by `parse_instance`; public so
    /// programmatically built instances can be checked too.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut ids = HashSet::new();
        for v in &self.variables {
            if v.lb > v.ub {
                return Err(ModelError::Semantic(format!(
                    "variable {}: empty domain {}..{}",
                    v.id, v.lb, v.ub
                )));
            }
            if !ids.insert(v.id.as_str()) {
                return Err(ModelError::Semantic(format!("duplicate variable id {}", v.id)));
            }
        }
        let objectives: Vec<_> =
            self.variables.iter().filter(|v| v.role == Role::Objective).collect();
        if objectives.len() != 1 {
            return Err(ModelError::Semantic(format!(
                "expected exactly one objective variable, found {}",
                objectives.len()
            )));
        }
        if objectives[0].id != self.objective {
            return Err(ModelError::Semantic(format!(
                "objective field {} does not match the objective-role variable {}",
                self.objective, objectives[0].id
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            for var in c.referenced_vars() {
                if !ids.contains(var) {
                    return Err(ModelError::Semantic(format!(
                        "constraint #{i} references undeclared variable {var}"
                    )));
                }
            }
        }
        for (name, arr) in &self.params.arrays {
            if arr.is_empty() {
                return Err(ModelError::Semantic(format!("params array {name} is empty")));
            }
        }
        Ok(())
    }
}

/// Parses the canonical JSON instance format and validates all invariants.
pub fn parse_instance(bytes: &[u8]) -> Result<CopInstance, ModelError> {
    let m: CopInstance = serde_json::from_slice(bytes)
        .map_err(|e| ModelError::Syntax(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    m.validate()?;
    Ok(m)
}

/// Serializes to the canonical form: fixed field order, sorted param keys,
/// two-space indentation, trailing newline. Deterministic; `parse_instance`
/// inverts it.
pub fn serialize_instance(m: &CopInstance) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(m).expect("instance serialization cannot fail");
    out.push(b'\n');
    out
}

/// How a negated boundary is encoded when the bounded solve was unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplementMode {
    /// `z >= hi + 1`: the inadmissible case under minimization is an
    /// underestimated upper bound, so only the region above the interval is
    /// searched and the estimated lower bound is dropped.
    #[default]
    UpperOnly,
    /// Literal set complement `z <= lo - 1 or z >= hi + 1`.
    Literal,
}

/// Returns a copy of `m` with the objective restricted to `[lo, hi]`
/// (negated = false) or excluded from it (negated = true, see
/// [`ComplementMode::UpperOnly`]). The input is never mutated.
pub fn post_boundary_constraint(
    m: &CopInstance,
    lo: i64,
    hi: i64,
    negated: bool,
) -> Result<CopInstance, ModelError> {
    post_boundary_with_mode(m, lo, hi, negated, ComplementMode::UpperOnly)
}

pub fn post_boundary_with_mode(
    m: &CopInstance,
    lo: i64,
    hi: i64,
    negated: bool,
    mode: ComplementMode,
) -> Result<CopInstance, ModelError> {
    if !negated && lo > hi {
        return Err(ModelError::InvalidBoundary { lo, hi });
    }
    let z = m.objective.clone();
    let mut out = m.clone();
    if !negated {
        // z >= lo encoded as -z <= -lo
        out.constraints.push(Constraint::LinearLe { terms: vec![(-1, z.clone())], rhs: -lo });
        out.constraints.push(Constraint::LinearLe { terms: vec![(1, z)], rhs: hi });
    } else {
        match mode {
            ComplementMode::UpperOnly => {
                // z >= hi + 1
                out.constraints
                    .push(Constraint::LinearLe { terms: vec![(-1, z)], rhs: -(hi + 1) });
            }
            ComplementMode::Literal => {
                out.constraints.push(Constraint::Disjunction {
                    left: LinearIneq { terms: vec![(1, z.clone())], rhs: lo - 1 },
                    right: LinearIneq { terms: vec![(-1, z)], rhs: -(hi + 1) },
                });
            }
        }
    }
    Ok(out)
}
