//! Data-generating processes, representations and emulation by complete
//! networks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cbn::{complete_cbn_from_dist, kernels_from_law, Cbn, Intervention};
use crate::dist::ops::kernel_compatible_idx;
use crate::dist::{
    entropy, equal, expectation, is_markov, pushforward, Distribution, Family, Functional,
    RepresentationMap, Tolerances,
};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::var::{positions, VarId};

pub const OBSERVATIONAL_LABEL: &str = "obs";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ActionId {
    pub label: String,
    pub is_observational: bool,
}

impl ActionId {
    pub fn new(label: impl Into<String>) -> Self {
        ActionId {
            label: label.into(),
            is_observational: false,
        }
    }

    pub fn observational(label: impl Into<String>) -> Self {
        ActionId {
            label: label.into(),
            is_observational: true,
        }
    }
}

/// Complexity of actions, evaluated on the low-level laws.
#[derive(Debug, Clone, PartialEq)]
pub enum Complexity {
    /// One value per action, in action order; `f64::INFINITY` allowed.
    Table(Vec<f64>),
    /// `1 / H(var)`, infinite for a point mass.
    ReverseEntropy(VarId),
    /// Expectation of an affine functional.
    AffineExpectation(Functional),
    /// Expectation of a per-value cost of one finite variable.
    ExpectedCost {
        var: VarId,
        costs: BTreeMap<i64, Rational>,
    },
}

/// Finite action set with one low-level law per action.
#[derive(Debug, Clone)]
pub struct Dgp {
    actions: Vec<ActionId>,
    laws: Vec<Distribution>,
    complexity: Option<Complexity>,
}

impl Dgp {
    pub fn new(
        actions: Vec<ActionId>,
        laws: Vec<Distribution>,
        complexity: Option<Complexity>,
    ) -> Result<Self> {
        if actions.len() != laws.len() {
            return Err(Error::InvalidDgp("one law per action required".into()));
        }
        if actions.iter().filter(|a| a.is_observational).count() != 1 {
            return Err(Error::InvalidDgp(
                "exactly one observational action required".into(),
            ));
        }
        for (k, a) in actions.iter().enumerate() {
            if actions[..k].iter().any(|b| b.label == a.label) {
                return Err(Error::InvalidDgp(format!(
                    "duplicate action label `{}`",
                    a.label
                )));
            }
        }
        let first = &laws[0];
        for (a, l) in actions.iter().zip(&laws) {
            if l.family() != first.family() || l.vars() != first.vars() {
                return Err(Error::InvalidDgp(format!(
                    "law of `{}` differs in family or variables",
                    a.label
                )));
            }
        }
        let dgp = Dgp {
            actions,
            laws,
            complexity: None,
        };
        match complexity {
            Some(c) => dgp.with_complexity(c),
            None => Ok(dgp),
        }
    }

    /// Attaches a complexity, checking that it evaluates on every action.
    pub fn with_complexity(mut self, c: Complexity) -> Result<Self> {
        self.complexity = Some(c);
        self.complexity_values()?;
        Ok(self)
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn laws(&self) -> &[Distribution] {
        &self.laws
    }

    pub fn law(&self, a: usize) -> &Distribution {
        &self.laws[a]
    }

    pub fn vars(&self) -> &[VarId] {
        self.laws[0].vars()
    }

    pub fn family(&self) -> Family {
        self.laws[0].family()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn observational(&self) -> usize {
        self.actions
            .iter()
            .position(|a| a.is_observational)
            .expect("checked at construction")
    }

    pub fn action_index(&self, label: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::InvalidDgp(format!("unknown action `{label}`")))
    }

    pub fn complexity(&self) -> Option<&Complexity> {
        self.complexity.as_ref()
    }

    /// Complexity of every action; errors when none is attached.
    pub fn complexity_values(&self) -> Result<Vec<f64>> {
        let c = self
            .complexity
            .as_ref()
            .ok_or_else(|| Error::InvalidDgp("no complexity attached".into()))?;
        match c {
            Complexity::Table(t) => {
                if t.len() != self.len() {
                    return Err(Error::InvalidDgp(format!(
                        "complexity table has {} values for {} actions",
                        t.len(),
                        self.len()
                    )));
                }
                if t.iter().any(|x| x.is_nan() || *x < 0.0) {
                    return Err(Error::InvalidDgp("complexity must be nonnegative".into()));
                }
                Ok(t.clone())
            }
            Complexity::ReverseEntropy(v) => self
                .laws
                .iter()
                .map(|l| {
                    let h = entropy(l, v)?;
                    Ok(if h == 0.0 { f64::INFINITY } else { 1.0 / h })
                })
                .collect(),
            Complexity::AffineExpectation(f) => {
                self.laws.iter().map(|l| expectation(l, f)).collect()
            }
            Complexity::ExpectedCost { var, costs } => self
                .laws
                .iter()
                .map(|l| {
                    let f = l.as_finite()?;
                    let i = positions(f.vars(), std::slice::from_ref(var))?[0];
                    let mut acc = Rational::from_integer(0.into());
                    for (x, p) in f.marginal_idx(&[i]).table() {
                        let c = costs.get(&x[0]).ok_or_else(|| {
                            Error::InvalidDgp(format!("no cost for {var}={}", x[0]))
                        })?;
                        acc += c * p;
                    }
                    Ok(to_f64(&acc))
                })
                .collect(),
        }
    }
}

/// Pushforward of every action law through `h`.
pub fn action_laws(dgp: &Dgp, h: &RepresentationMap) -> Result<Vec<Distribution>> {
    dgp.laws.iter().map(|l| pushforward(l, h)).collect()
}

/// Maps non-observational actions to interventions.
#[derive(Debug, Clone, Default)]
pub struct Link {
    entries: BTreeMap<usize, Intervention>,
}

impl Link {
    pub fn get(&self, action: usize) -> Option<&Intervention> {
        self.entries.get(&action)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Intervention)> {
        self.entries.iter().map(|(a, d)| (*a, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One action per intervention plus the observational regime
/// (labelled `obs`), each with the intervened law of `c`.
pub fn build_dgp_from_cbn(
    c: &Cbn,
    interventions: &[Intervention],
    labels: &[String],
    tol: &Tolerances,
) -> Result<(Dgp, Link)> {
    if labels.len() != interventions.len() {
        return Err(Error::InvalidDgp(
            "one label per intervention required".into(),
        ));
    }
    let mut actions = vec![ActionId::observational(OBSERVATIONAL_LABEL)];
    let mut laws = vec![c.observational()];
    let mut link = Link::default();
    for (d, l) in interventions.iter().zip(labels) {
        if actions.iter().any(|a| &a.label == l) {
            return Err(Error::InvalidDgp(format!("duplicate action label `{l}`")));
        }
        laws.push(c.register(d, tol)?);
        link.entries.insert(actions.len(), d.clone());
        actions.push(ActionId::new(l.clone()));
    }
    Ok((Dgp::new(actions, laws, None)?, link))
}

/// A complete network emulating the representation, its link, and the
/// actions that could not be linked.
#[derive(Debug, Clone)]
pub struct Emulation {
    pub cbn: Cbn,
    pub link: Link,
    /// Actions whose represented law equals the observational one.
    pub unlinkable: Vec<usize>,
}

/// Emulates `h(X*)` by a complete network along `order`; each linked
/// intervention targets every node.
pub fn emulate(
    dgp: &Dgp,
    h: &RepresentationMap,
    order: &[VarId],
    tol: &Tolerances,
) -> Result<Emulation> {
    let laws = action_laws(dgp, h)?;
    let o = dgp.observational();
    let cbn = complete_cbn_from_dist(&laws[o], order, tol)?;
    let mut link = Link::default();
    let mut unlinkable = Vec::new();
    for (a, law) in laws.iter().enumerate() {
        if a == o {
            continue;
        }
        if equal(law, &laws[o], tol)? {
            unlinkable.push(a);
            continue;
        }
        let ks = kernels_from_law(&cbn, law, tol)?;
        let d = Intervention::new(ks.into_iter().enumerate().collect())?
            .labeled(dgp.actions[a].label.clone());
        if !equal(&cbn.interventional(&d)?, law, tol)? {
            return Err(Error::InvalidDgp(format!(
                "emulation of `{}` does not reproduce its law",
                dgp.actions[a].label
            )));
        }
        link.entries.insert(a, d);
    }
    Ok(Emulation {
        cbn,
        link,
        unlinkable,
    })
}

/// Drops targets whose replacement kernel is a version of the
/// observational kernel under the intervened law.
pub fn prune_link_intervention(
    c: &Cbn,
    d: &Intervention,
    tol: &Tolerances,
) -> Result<Intervention> {
    let law = c.interventional(d)?;
    let mut keep = Vec::new();
    for &j in d.targets().keys() {
        if !kernel_compatible_idx(&law, j, c.dag().parents(j), c.kernel(j), tol)? {
            keep.push(j);
        }
    }
    if keep.is_empty() {
        return Err(Error::InvalidIntervention(
            "every target matches its observational kernel".into(),
        ));
    }
    let mut out = d.restrict(&keep)?;
    if let Some(l) = d.label() {
        out = out.labeled(l);
    }
    if !equal(&c.interventional(&out)?, &law, tol)? {
        return Err(Error::Precondition("pruning changed the law".into()));
    }
    Ok(out)
}

/// The pruned intervention in `c` reproducing `law`, if `law` is Markov
/// with respect to the graph of `c` and differs from its observational law.
pub fn derive_intervention(
    c: &Cbn,
    law: &Distribution,
    tol: &Tolerances,
) -> Result<Option<Intervention>> {
    if !is_markov(law, c.dag(), tol)? || equal(law, &c.observational(), tol)? {
        return Ok(None);
    }
    let ks = kernels_from_law(c, law, tol)?;
    let d = Intervention::new(ks.into_iter().enumerate().collect())?;
    prune_link_intervention(c, &d, tol).map(Some)
}
