//! The scenario file format: one JSON document per experiment, with
//! sections cross-referenced by id.
//!
//! Rationals are written as `"p/q"` strings and parsed exactly. Gaussian
//! parameters are JSON numbers. Unknown keys are rejected. Representations
//! are the identity wherever a `representation` field is omitted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpret::Desideratum;
use crate::validity::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub title: String,
    /// Declaration order fixes variable indices.
    pub variables: Vec<VariableDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scms: BTreeMap<String, ScmDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cbns: BTreeMap<String, CbnDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub interventions: BTreeMap<String, InterventionDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub intervention_sets: BTreeMap<String, SetDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub representations: BTreeMap<String, RepresentationDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dgps: BTreeMap<String, DgpDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub interpretations: BTreeMap<String, InterpretationDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub abstractions: BTreeMap<String, AbstractionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<Expectation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Finite,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub kind: VarKind,
    /// Required for finite variables, absent for Gaussian ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<i64>>,
}

/// An integer or a decimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
}

impl Scalar {
    pub fn as_f64(self) -> f64 {
        match self {
            Scalar::Int(v) => v as f64,
            Scalar::Float(v) => v,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(v),
            Scalar::Float(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => Some(v as i64),
            Scalar::Float(_) => None,
        }
    }
}

/// An exact `"p/q"` string or an approximate decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Exact(String),
    Approx(f64),
}

/// A kernel for one node, read against the node's parents in graph
/// order (ascending variable index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDecl {
    /// Point mass ignoring the parents.
    Point(Scalar),
    /// One row of probabilities per parent assignment, aligned with the
    /// node domain; rows follow the lexicographic order of parent values.
    /// A single row is used for every parent assignment.
    Table(Vec<Vec<String>>),
    /// `N(intercept + Σ weight·parent, variance)`; missing weights are 0.
    Linear {
        intercept: f64,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        weights: BTreeMap<String, f64>,
        variance: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CbnDecl {
    Graph {
        nodes: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        edges: Vec<(String, String)>,
        kernels: BTreeMap<String, KernelDecl>,
    },
    /// The network induced by a declared structural model.
    FromScm(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FiniteLawDecl {
    Uniform,
    Table(Vec<(Vec<i64>, String)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismDecl {
    pub var: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exo_parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<String>,
    /// `(exogenous values then parent values, value)`.
    pub table: Vec<(Vec<i64>, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmDecl {
    pub exogenous: Vec<String>,
    pub exo_law: FiniteLawDecl,
    pub mechanisms: Vec<MechanismDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterventionDecl {
    pub cbn: String,
    pub targets: BTreeMap<String, KernelDecl>,
    /// Display name; defaults to a `do(...)` rendering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDecl {
    pub cbn: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepresentationDecl {
    Affine {
        inputs: Vec<String>,
        outputs: Vec<String>,
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        offset: Vec<f64>,
    },
    Table {
        inputs: Vec<String>,
        outputs: Vec<String>,
        entries: Vec<(Vec<i64>, Vec<i64>)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionLawDecl {
    Finite(Vec<(Vec<i64>, String)>),
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
    },
    /// The law a declared network induces, under an optional intervention.
    Emulate {
        cbn: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervention: Option<String>,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDecl {
    pub label: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub observational: bool,
    pub law: ActionLawDecl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDecl {
    pub terms: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ComplexityDecl {
    /// Value per action label.
    Table(BTreeMap<String, f64>),
    ReverseEntropy(String),
    AffineExpectation(FunctionalDecl),
    ExpectedCost {
        var: String,
        costs: Vec<(i64, String)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpDecl {
    pub vars: Vec<String>,
    pub actions: Vec<ActionDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum InterpretationDecl {
    C,
    P,
    S,
    M,
    /// Uses its own complexity if given, else the process's.
    K {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        complexity: Option<ComplexityDecl>,
    },
    #[serde(rename = "tilde_if")]
    TildeIf {
        tilde: Vec<String>,
        ranks: Vec<u64>,
    },
    #[serde(rename = "S~")]
    STilde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractionDecl {
    pub low: String,
    pub high: String,
    /// A table representation, or an affine one with integer images.
    pub tau: String,
    /// Hard interventions in the low model, by variable name.
    pub i_star: Vec<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
}

/// Where a number is owed to: stated in the worked example, derived by
/// hand from it, or a harness sanity value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Stated,
    Derived,
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub claim: Claim,
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessRef {
    pub action: String,
    pub intervention: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Action {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        action: String,
    },
    Model {
        cbn: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervention: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Claim {
    /// Verdict, and witnesses that must appear among the reported ones.
    Validity {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        cbn: String,
        set: String,
        interpretation: String,
        verdict: Verdict,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        witnesses: Vec<WitnessRef>,
    },
    Membership {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        cbn: String,
        set: String,
        interpretation: String,
        action: String,
        intervention: String,
        member: bool,
        /// First failed condition, as displayed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
    },
    Expectation {
        source: Source,
        functional: FunctionalDecl,
        value: Number,
    },
    Probability {
        source: Source,
        event: BTreeMap<String, i64>,
        value: Number,
    },
    Compatible {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        cbn: String,
        compatible: bool,
    },
    Desideratum {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        cbn: String,
        interpretation: String,
        family: Vec<String>,
        which: Desideratum,
        holds: bool,
    },
    /// `x ⊥ y | given`; for Gaussian laws optionally the largest absolute
    /// entry of the conditional cross-covariance.
    Independence {
        source: Source,
        x: Vec<String>,
        y: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        given: Vec<String>,
        independent: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cross_cov: Option<Number>,
    },
    Markov {
        source: Source,
        cbn: String,
        markov: bool,
    },
    Pheno {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        cbn: String,
        valid: bool,
    },
    Classify {
        cbn: String,
        intervention: String,
        class: String,
        perfect: bool,
    },
    TauAbstraction {
        abstraction: String,
        holds: bool,
        /// Whether the exogenous map found coincides with `tau`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau_u_is_tau: Option<bool>,
    },
    Omega {
        abstraction: String,
        intervention: BTreeMap<String, i64>,
        image: String,
    },
    /// Targets of the intervention derived from an action's law.
    LinkTargets {
        dgp: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        representation: Option<String>,
        action: String,
        cbn: String,
        targets: Vec<String>,
    },
}

/// Parses a scenario, reporting the line and column of any error.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_canonical(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(s).expect("scenario serializes");
    out.push('\n');
    out
}
