//! Causal Bayesian networks, their interventions and the intervention
//! taxonomy (perfect, single-node, minimal, decomposable).

pub mod dag;
pub mod kernel;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::One;

use crate::dist::ops::{conditional_kernel_idx, kernel_compatible_idx};
use crate::dist::{equal, Distribution, Family, FiniteDist, GaussianDist, Tolerances};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::var::{check_unique, positions, VarId};

pub use dag::Dag;
pub use kernel::{FiniteKernel, Kernel, LinearGaussianKernel, Row};

/// A DAG with one Markov kernel per node. Node `i` is `vars[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cbn {
    vars: Vec<VarId>,
    dag: Dag,
    kernels: Vec<Kernel>,
}

impl Cbn {
    pub fn new(vars: Vec<VarId>, dag: Dag, kernels: Vec<Kernel>) -> Result<Self> {
        check_unique(&vars)?;
        if vars.len() != dag.n() || kernels.len() != dag.n() {
            return Err(Error::InvalidGraph(format!(
                "{} variables, {} nodes, {} kernels",
                vars.len(),
                dag.n(),
                kernels.len()
            )));
        }
        if let Some(first) = kernels.first() {
            if kernels.iter().any(|k| k.family() != first.family()) {
                return Err(Error::FamilyMismatch("kernels of mixed families".into()));
            }
        }
        let c = Cbn { vars, dag, kernels };
        for i in 0..c.n() {
            c.check_kernel(i, &c.kernels[i])?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn kernel(&self, i: usize) -> &Kernel {
        &self.kernels[i]
    }

    pub fn family(&self) -> Family {
        self.kernels
            .first()
            .map(Kernel::family)
            .unwrap_or(Family::Finite)
    }

    pub fn node_index(&self, v: &VarId) -> Result<usize> {
        Ok(positions(&self.vars, std::slice::from_ref(v))?[0])
    }

    /// Node index by variable name.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVar(name.into()))
    }

    pub fn parent_vars(&self, i: usize) -> Vec<VarId> {
        self.dag
            .parents(i)
            .iter()
            .map(|&p| self.vars[p].clone())
            .collect()
    }

    pub fn parent_names(&self, i: usize) -> Vec<String> {
        self.dag
            .parents(i)
            .iter()
            .map(|&p| self.vars[p].name.clone())
            .collect()
    }

    /// Domain of a finite node.
    pub fn node_domain(&self, i: usize) -> Option<&[i64]> {
        match &self.kernels[i] {
            Kernel::Finite(k) => Some(k.node_domain()),
            Kernel::LinearGaussian(_) => None,
        }
    }

    /// Checks that `k` fits node `i`: family, parent count, domains.
    pub fn check_kernel(&self, i: usize, k: &Kernel) -> Result<()> {
        let name = &self.vars[i].name;
        let ps = self.dag.parents(i);
        if k.n_parents() != ps.len() {
            return Err(Error::InvalidKernel(format!(
                "kernel of `{name}` has {} parents, graph has {}",
                k.n_parents(),
                ps.len()
            )));
        }
        if let Some(first) = self.kernels.first() {
            if first.family() != k.family() {
                return Err(Error::FamilyMismatch(format!("kernel of `{name}`")));
            }
        }
        if let Kernel::Finite(fk) = k {
            for (slot, &p) in ps.iter().enumerate() {
                let want = self
                    .node_domain(p)
                    .ok_or_else(|| Error::FamilyMismatch(format!("parent of `{name}`")))?;
                if fk.parent_domains()[slot] != want {
                    return Err(Error::InvalidKernel(format!(
                        "kernel of `{name}` disagrees with the domain of `{}`",
                        self.vars[p]
                    )));
                }
            }
            if let Some(own) = self.node_domain(i) {
                if own != fk.node_domain() {
                    return Err(Error::InvalidKernel(format!(
                        "kernel of `{name}` changes its domain"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn observational(&self) -> Distribution {
        let ks: Vec<&Kernel> = self.kernels.iter().collect();
        self.law_of(&ks)
    }

    /// Law with the targets of `d` replaced. Does not require the law to
    /// differ from the observational one.
    pub fn interventional(&self, d: &Intervention) -> Result<Distribution> {
        let mut ks: Vec<&Kernel> = self.kernels.iter().collect();
        for (&j, k) in &d.targets {
            if j >= self.n() {
                return Err(Error::InvalidIntervention(format!(
                    "target {j} out of range"
                )));
            }
            self.check_kernel(j, k)?;
            ks[j] = k;
        }
        Ok(self.law_of(&ks))
    }

    /// Validates `d` as an intervention in this network and returns its law.
    pub fn register(&self, d: &Intervention, tol: &Tolerances) -> Result<Distribution> {
        let law = self.interventional(d)?;
        if equal(&law, &self.observational(), tol)? {
            return Err(Error::InvalidIntervention(format!(
                "{} induces the observational law",
                d.name(self)
            )));
        }
        Ok(law)
    }

    pub fn is_compatible(&self, d: &Distribution, tol: &Tolerances) -> Result<bool> {
        equal(&self.observational(), d, tol)
    }

    fn law_of(&self, ks: &[&Kernel]) -> Distribution {
        match self.family() {
            Family::Finite => Distribution::Finite(self.finite_law(ks)),
            Family::Gaussian => Distribution::Gaussian(self.gaussian_law(ks)),
        }
    }

    fn finite_law(&self, ks: &[&Kernel]) -> FiniteDist {
        let n = self.n();
        let mut partial: Vec<(Vec<i64>, Rational)> = vec![(vec![0; n], Rational::one())];
        for &i in self.dag.topological_order() {
            let Kernel::Finite(k) = ks[i] else {
                unreachable!("family checked at construction")
            };
            let ps = self.dag.parents(i);
            let mut next = Vec::with_capacity(partial.len());
            for (a, p) in &partial {
                let pa: Vec<i64> = ps.iter().map(|&q| a[q]).collect();
                let row = k.row(&pa).expect("kernel rows are total");
                for (v, q) in row {
                    let mut b = a.clone();
                    b[i] = *v;
                    next.push((b, p * q));
                }
            }
            partial = next;
        }
        let domains = (0..n)
            .map(|i| match ks[i] {
                Kernel::Finite(k) => k.node_domain().to_vec(),
                Kernel::LinearGaussian(_) => unreachable!(),
            })
            .collect();
        FiniteDist::from_parts(self.vars.clone(), domains, partial.into_iter().collect())
    }

    /// `Z = μ + B η` with `η ~ N(0, diag(σ²))`, built in topological order.
    fn gaussian_law(&self, ks: &[&Kernel]) -> GaussianDist {
        let n = self.n();
        let mut mean = DVector::zeros(n);
        let mut b = DMatrix::zeros(n, n);
        let mut noise = DVector::zeros(n);
        for &i in self.dag.topological_order() {
            let Kernel::LinearGaussian(k) = ks[i] else {
                unreachable!("family checked at construction")
            };
            let mut m = k.intercept;
            b[(i, i)] = 1.0;
            for (&p, &w) in self.dag.parents(i).iter().zip(&k.weights) {
                m += w * mean[p];
                if w != 0.0 {
                    let row = b.row(p).into_owned() * w;
                    let mut cur = b.row_mut(i);
                    cur += row;
                }
            }
            mean[i] = m;
            noise[i] = k.variance;
        }
        let cov = &b * DMatrix::from_diagonal(&noise) * b.transpose();
        GaussianDist::from_parts(self.vars.clone(), mean, cov)
    }
}

/// `do(j ← q_j, j ∈ J)`: replacement kernels for a nonempty node set.
#[derive(Debug, Clone)]
pub struct Intervention {
    targets: BTreeMap<usize, Kernel>,
    label: Option<String>,
}

/// Interventions are identified by their targets and kernels; labels are
/// display only.
impl PartialEq for Intervention {
    fn eq(&self, other: &Self) -> bool {
        self.targets == other.targets
    }
}

impl Intervention {
    pub fn new(targets: BTreeMap<usize, Kernel>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidIntervention("no targets".into()));
        }
        Ok(Intervention {
            targets,
            label: None,
        })
    }

    pub fn single(node: usize, k: Kernel) -> Self {
        Intervention {
            targets: [(node, k)].into_iter().collect(),
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn targets(&self) -> &BTreeMap<usize, Kernel> {
        &self.targets
    }

    pub fn target_nodes(&self) -> Vec<usize> {
        self.targets.keys().copied().collect()
    }

    pub fn is_single_node(&self) -> bool {
        self.targets.len() == 1
    }

    pub fn is_perfect(&self) -> bool {
        self.targets.values().all(Kernel::is_perfect)
    }

    /// The same kernels on the subset `nodes` of the targets.
    pub fn restrict(&self, nodes: &[usize]) -> Result<Intervention> {
        let mut t = BTreeMap::new();
        for j in nodes {
            let k = self
                .targets
                .get(j)
                .ok_or_else(|| Error::InvalidIntervention(format!("node {j} is not a target")))?;
            t.insert(*j, k.clone());
        }
        Intervention::new(t)
    }

    /// Label if present, else a `do(...)` rendering.
    pub fn name(&self, c: &Cbn) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => self.describe(c),
        }
    }

    /// `do(B=5)`, `do(TC←N(1, 2))`, ...
    pub fn describe(&self, c: &Cbn) -> String {
        let parts: Vec<String> = self
            .targets
            .iter()
            .map(|(&j, k)| {
                let name = c
                    .vars()
                    .get(j)
                    .map(|v| v.name.clone())
                    .unwrap_or(j.to_string());
                match point_value(k) {
                    Some(v) => format!("{name}={v}"),
                    None => format!("{name}←{}", k.describe(&c.parent_names(j))),
                }
            })
            .collect();
        format!("do({})", parts.join(", "))
    }
}

/// Value of a parent-independent point-mass kernel.
fn point_value(k: &Kernel) -> Option<String> {
    match k {
        Kernel::LinearGaussian(g) if g.is_perfect() && g.variance == 0.0 => {
            Some(kernel::fmt_num(g.intercept))
        }
        Kernel::Finite(f) if f.is_perfect() => {
            let r = f.rows().values().next()?;
            (r.len() == 1).then(|| r.keys().next().unwrap().to_string())
        }
        _ => None,
    }
}

/// A validated set of interventions in one network, with cached laws.
#[derive(Debug, Clone)]
pub struct InterventionSet {
    items: Vec<Intervention>,
    laws: Vec<Distribution>,
}

impl InterventionSet {
    pub fn new(c: &Cbn, items: Vec<Intervention>, tol: &Tolerances) -> Result<Self> {
        let mut laws = Vec::with_capacity(items.len());
        for (k, d) in items.iter().enumerate() {
            if items[..k].contains(d) {
                return Err(Error::InvalidIntervention(format!(
                    "{} listed twice",
                    d.name(c)
                )));
            }
            laws.push(c.register(d, tol)?);
        }
        Ok(InterventionSet { items, laws })
    }

    pub fn empty() -> Self {
        InterventionSet {
            items: Vec::new(),
            laws: Vec::new(),
        }
    }

    pub fn items(&self) -> &[Intervention] {
        &self.items
    }

    pub fn laws(&self) -> &[Distribution] {
        &self.laws
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn position(&self, d: &Intervention) -> Option<usize> {
        self.items.iter().position(|x| x == d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct InterventionClass {
    pub perfect: bool,
    pub single_node: bool,
    pub minimal: bool,
    pub decomposable: bool,
}

impl std::fmt::Display for InterventionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts = [
            if self.single_node {
                "single-node"
            } else {
                "multi-node"
            },
            if self.minimal {
                "minimal"
            } else {
                "not minimal"
            },
            if self.decomposable {
                "decomposable"
            } else {
                "not decomposable"
            },
        ];
        f.write_str(&parts.join(", "))
    }
}

/// Minimal iff no target's conditional under the intervened law is a
/// version of its observational kernel; decomposable iff every nonempty
/// restriction changes the observational law.
pub fn classify_intervention(
    c: &Cbn,
    d: &Intervention,
    tol: &Tolerances,
) -> Result<InterventionClass> {
    let law = c.interventional(d)?;
    let mut minimal = true;
    for &j in d.targets.keys() {
        if kernel_compatible_idx(&law, j, c.dag.parents(j), c.kernel(j), tol)? {
            minimal = false;
            break;
        }
    }
    let obs = c.observational();
    let nodes = d.target_nodes();
    let mut decomposable = true;
    for mask in 1u64..(1u64 << nodes.len()) {
        let sub: Vec<usize> = (0..nodes.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| nodes[b])
            .collect();
        if equal(&c.interventional(&d.restrict(&sub)?)?, &obs, tol)? {
            decomposable = false;
            break;
        }
    }
    Ok(InterventionClass {
        perfect: d.is_perfect(),
        single_node: d.is_single_node(),
        minimal,
        decomposable,
    })
}

/// Complete-graph network along `order` whose observational law is `d`.
pub fn complete_cbn_from_dist(d: &Distribution, order: &[VarId], tol: &Tolerances) -> Result<Cbn> {
    if order.len() != d.vars().len() {
        return Err(Error::Precondition(
            "order must list every variable once".into(),
        ));
    }
    check_unique(order)?;
    let idx = positions(d.vars(), order)?;
    let dag = Dag::complete(&idx)?;
    let kernels = (0..dag.n())
        .map(|i| conditional_kernel_idx(d, i, dag.parents(i), None, tol))
        .collect::<Result<Vec<_>>>()?;
    Cbn::new(d.vars().to_vec(), dag, kernels)
}

/// Kernels read off `law` along the parents of `c`, with finite rows at
/// unsupported parent values copied from `c`.
pub fn kernels_from_law(c: &Cbn, law: &Distribution, tol: &Tolerances) -> Result<Vec<Kernel>> {
    (0..c.n())
        .map(|i| conditional_kernel_idx(law, i, c.dag.parents(i), Some(c.kernel(i)), tol))
        .collect()
}
