//! Turns a parsed scenario into engine objects, resolving every id.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use super::format::*;
use crate::abstraction::{FiniteScm, HardIntervention, Mechanism, DEFAULT_SEARCH_BOUND};
use crate::cbn::LinearGaussianKernel;
use crate::cbn::{Cbn, Dag, FiniteKernel, Intervention, InterventionSet, Kernel};
use crate::dgp::{ActionId, Complexity, Dgp};
use crate::dist::{
    domain_product, AffineMap, Distribution, FiniteDist, Functional, GaussianDist,
    RepresentationMap, TableMap, Tolerances,
};
use crate::error::{Error, Result};
use crate::interpret::InterpretationSpec;
use crate::rational::{parse_rational, Rational};
use crate::var::VarId;

fn err(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, id: &str) -> Result<&'a T> {
    map.get(id)
        .ok_or_else(|| err(format!("unknown {what} `{id}`")))
}

#[derive(Debug, Clone)]
pub struct VarEntry {
    pub id: VarId,
    pub kind: VarKind,
    pub domain: Option<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct ResolvedIntervention {
    pub cbn: String,
    pub intervention: Intervention,
}

#[derive(Debug, Clone)]
pub struct ResolvedSet {
    pub cbn: String,
    pub members: Vec<String>,
    pub set: InterventionSet,
}

#[derive(Debug, Clone)]
pub struct ResolvedInterpretation {
    pub spec: InterpretationSpec,
    pub complexity: Option<Complexity>,
}

#[derive(Debug, Clone)]
pub struct ResolvedAbstraction {
    pub low: FiniteScm,
    pub high: FiniteScm,
    pub tau: TableMap,
    pub i_star: Vec<HardIntervention>,
    pub bound: usize,
}

/// A scenario with every section built and every reference checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub id: String,
    pub vars: BTreeMap<String, VarEntry>,
    pub scms: BTreeMap<String, FiniteScm>,
    pub cbns: BTreeMap<String, Cbn>,
    pub interventions: BTreeMap<String, ResolvedIntervention>,
    pub sets: BTreeMap<String, ResolvedSet>,
    pub representations: BTreeMap<String, RepresentationMap>,
    pub dgps: BTreeMap<String, Dgp>,
    pub interpretations: BTreeMap<String, ResolvedInterpretation>,
    pub abstractions: BTreeMap<String, ResolvedAbstraction>,
}

impl Resolved {
    pub fn var(&self, name: &str) -> Result<&VarEntry> {
        lookup(&self.vars, "variable", name)
    }

    pub fn var_ids(&self, names: &[String]) -> Result<Vec<VarId>> {
        names.iter().map(|n| Ok(self.var(n)?.id.clone())).collect()
    }

    pub fn cbn(&self, id: &str) -> Result<&Cbn> {
        lookup(&self.cbns, "network", id)
    }

    pub fn intervention(&self, id: &str) -> Result<&ResolvedIntervention> {
        lookup(&self.interventions, "intervention", id)
    }

    /// Intervention `id`, checked to belong to network `cbn`.
    pub fn intervention_in(&self, id: &str, cbn: &str) -> Result<&Intervention> {
        let r = self.intervention(id)?;
        if r.cbn != cbn {
            return Err(err(format!(
                "intervention `{id}` belongs to `{}`, not `{cbn}`",
                r.cbn
            )));
        }
        Ok(&r.intervention)
    }

    /// Set `id`, checked to belong to network `cbn`.
    pub fn set_in(&self, id: &str, cbn: &str) -> Result<&ResolvedSet> {
        let s = lookup(&self.sets, "intervention set", id)?;
        if s.cbn != cbn {
            return Err(err(format!(
                "intervention set `{id}` belongs to `{}`, not `{cbn}`",
                s.cbn
            )));
        }
        Ok(s)
    }

    pub fn dgp(&self, id: &str) -> Result<&Dgp> {
        lookup(&self.dgps, "process", id)
    }

    /// The representation `id`, or the identity when absent.
    pub fn representation(&self, id: Option<&str>) -> Result<RepresentationMap> {
        match id {
            None => Ok(RepresentationMap::Identity),
            Some(id) => lookup(&self.representations, "representation", id).cloned(),
        }
    }

    /// The unique representation (the identity included) that maps the
    /// variables of `dgp` onto the variables of `cbn`.
    pub fn infer_representation(&self, dgp: &str, cbn: &str) -> Result<Option<String>> {
        let low = self.dgp(dgp)?.vars().to_vec();
        let want = self.cbn(cbn)?.vars().to_vec();
        let mut hits: Vec<Option<String>> = Vec::new();
        if low == want {
            hits.push(None);
        }
        for (id, r) in &self.representations {
            let (ins, outs) = match r {
                RepresentationMap::Affine(a) => (a.inputs(), a.outputs()),
                RepresentationMap::Table(t) => (t.inputs(), t.outputs()),
                RepresentationMap::Identity => continue,
            };
            if ins == low.as_slice() && outs == want.as_slice() {
                hits.push(Some(id.clone()));
            }
        }
        match hits.len() {
            1 => Ok(hits.pop().unwrap()),
            0 => Err(err(format!(
                "no representation maps `{dgp}` onto the variables of `{cbn}`"
            ))),
            _ => Err(err(format!(
                "several representations map `{dgp}` onto `{cbn}`; name one"
            ))),
        }
    }

    pub fn interpretation(&self, id: &str) -> Result<&ResolvedInterpretation> {
        lookup(&self.interpretations, "interpretation", id)
    }

    /// The process `dgp`, carrying the complexity of interpretation `interp`
    /// when it declares one.
    pub fn dgp_for(&self, dgp: &str, interp: &str) -> Result<Dgp> {
        let d = self.dgp(dgp)?.clone();
        match &self.interpretation(interp)?.complexity {
            Some(c) => d.with_complexity(c.clone()),
            None => Ok(d),
        }
    }

    pub fn abstraction(&self, id: &str) -> Result<&ResolvedAbstraction> {
        lookup(&self.abstractions, "abstraction", id)
    }
}

pub fn resolve(s: &Scenario, tol: &Tolerances) -> Result<Resolved> {
    let mut r = Resolved {
        id: s.id.clone(),
        vars: BTreeMap::new(),
        scms: BTreeMap::new(),
        cbns: BTreeMap::new(),
        interventions: BTreeMap::new(),
        sets: BTreeMap::new(),
        representations: BTreeMap::new(),
        dgps: BTreeMap::new(),
        interpretations: BTreeMap::new(),
        abstractions: BTreeMap::new(),
    };
    for (i, v) in s.variables.iter().enumerate() {
        match (v.kind, &v.domain) {
            (VarKind::Finite, None) => {
                return Err(err(format!("finite variable `{}` needs a domain", v.name)))
            }
            (VarKind::Gaussian, Some(_)) => {
                return Err(err(format!(
                    "Gaussian variable `{}` takes no domain",
                    v.name
                )))
            }
            _ => {}
        }
        let entry = VarEntry {
            id: VarId::new(i, v.name.clone()),
            kind: v.kind,
            domain: v.domain.clone(),
        };
        if r.vars.insert(v.name.clone(), entry).is_some() {
            return Err(Error::DuplicateVar(v.name.clone()));
        }
    }
    for (id, d) in &s.scms {
        let m = build_scm(&r, d).map_err(|e| err(format!("scm `{id}`: {e}")))?;
        r.scms.insert(id.clone(), m);
    }
    for (id, d) in &s.cbns {
        let c = build_cbn(&r, d).map_err(|e| err(format!("network `{id}`: {e}")))?;
        r.cbns.insert(id.clone(), c);
    }
    for (id, d) in &s.interventions {
        let c = r.cbn(&d.cbn)?;
        let mut targets = BTreeMap::new();
        for (name, k) in &d.targets {
            let i = c.index_of(name)?;
            let kernel =
                build_kernel(&r, c, i, k).map_err(|e| err(format!("intervention `{id}`: {e}")))?;
            targets.insert(i, kernel);
        }
        let mut iv = Intervention::new(targets)?;
        if let Some(l) = &d.label {
            iv = iv.labeled(l.clone());
        }
        c.register(&iv, tol)
            .map_err(|e| err(format!("intervention `{id}`: {e}")))?;
        r.interventions.insert(
            id.clone(),
            ResolvedIntervention {
                cbn: d.cbn.clone(),
                intervention: iv,
            },
        );
    }
    for (id, d) in &s.intervention_sets {
        let c = r.cbn(&d.cbn)?;
        let items = d
            .members
            .iter()
            .map(|m| r.intervention_in(m, &d.cbn).cloned())
            .collect::<Result<Vec<_>>>()?;
        let set = InterventionSet::new(c, items, tol)
            .map_err(|e| err(format!("intervention set `{id}`: {e}")))?;
        r.sets.insert(
            id.clone(),
            ResolvedSet {
                cbn: d.cbn.clone(),
                members: d.members.clone(),
                set,
            },
        );
    }
    for (id, d) in &s.representations {
        let m =
            build_representation(&r, d).map_err(|e| err(format!("representation `{id}`: {e}")))?;
        r.representations.insert(id.clone(), m);
    }
    for (id, d) in &s.dgps {
        let g = build_dgp(&r, d).map_err(|e| err(format!("process `{id}`: {e}")))?;
        r.dgps.insert(id.clone(), g);
    }
    for (id, d) in &s.interpretations {
        let ri =
            build_interpretation(&r, d).map_err(|e| err(format!("interpretation `{id}`: {e}")))?;
        r.interpretations.insert(id.clone(), ri);
    }
    for (id, d) in &s.abstractions {
        let a = build_abstraction(&r, d).map_err(|e| err(format!("abstraction `{id}`: {e}")))?;
        r.abstractions.insert(id.clone(), a);
    }
    Ok(r)
}

fn domain_of(r: &Resolved, name: &str) -> Result<Vec<i64>> {
    r.var(name)?
        .domain
        .clone()
        .ok_or_else(|| err(format!("`{name}` is not finite")))
}

fn probs(row: &[String]) -> Result<Vec<Rational>> {
    row.iter().map(|p| parse_rational(p)).collect()
}

fn finite_law(r: &Resolved, names: &[String], law: &FiniteLawDecl) -> Result<FiniteDist> {
    let vars = r.var_ids(names)?;
    let domains = names
        .iter()
        .map(|n| domain_of(r, n))
        .collect::<Result<Vec<_>>>()?;
    match law {
        FiniteLawDecl::Uniform => FiniteDist::uniform(vars, domains),
        FiniteLawDecl::Table(t) => finite_table(vars, domains, t),
    }
}

fn finite_table(
    vars: Vec<VarId>,
    domains: Vec<Vec<i64>>,
    t: &[(Vec<i64>, String)],
) -> Result<FiniteDist> {
    let mut entries: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (x, p) in t {
        if entries.insert(x.clone(), parse_rational(p)?).is_some() {
            return Err(err(format!("point {x:?} listed twice")));
        }
    }
    FiniteDist::new(vars, domains, entries)
}

fn build_scm(r: &Resolved, d: &ScmDecl) -> Result<FiniteScm> {
    let exo_law = finite_law(r, &d.exogenous, &d.exo_law)?;
    let endo_names: Vec<String> = d.mechanisms.iter().map(|m| m.var.clone()).collect();
    let endo = r.var_ids(&endo_names)?;
    let endo_domains = endo_names
        .iter()
        .map(|n| domain_of(r, n))
        .collect::<Result<Vec<_>>>()?;
    let index = |list: &[String], n: &str, what: &str| {
        list.iter()
            .position(|x| x == n)
            .ok_or_else(|| err(format!("unknown {what} `{n}`")))
    };
    let mut mechanisms = Vec::new();
    for m in &d.mechanisms {
        let exo_parents = m
            .exo_parents
            .iter()
            .map(|n| index(&d.exogenous, n, "exogenous variable"))
            .collect::<Result<Vec<_>>>()?;
        let endo_parents = m
            .parents
            .iter()
            .map(|n| index(&endo_names, n, "endogenous variable"))
            .collect::<Result<Vec<_>>>()?;
        let mut table = BTreeMap::new();
        for (k, v) in &m.table {
            if table.insert(k.clone(), *v).is_some() {
                return Err(err(format!("mechanism of `{}` repeats {k:?}", m.var)));
            }
        }
        mechanisms.push(Mechanism {
            exo_parents,
            endo_parents,
            table,
        });
    }
    FiniteScm::new(exo_law, endo, endo_domains, mechanisms)
}

fn build_cbn(r: &Resolved, d: &CbnDecl) -> Result<Cbn> {
    let (nodes, edges, kernels) = match d {
        CbnDecl::FromScm(id) => return lookup(&r.scms, "scm", id)?.to_cbn(),
        CbnDecl::Graph {
            nodes,
            edges,
            kernels,
        } => (nodes, edges, kernels),
    };
    let vars = r.var_ids(nodes)?;
    let pos = |n: &str| {
        nodes
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| err(format!("edge endpoint `{n}` is not a node")))
    };
    let e = edges
        .iter()
        .map(|(a, b)| Ok((pos(a)?, pos(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let dag = Dag::from_edges(nodes.len(), &e)?;
    if let Some(k) = kernels.keys().find(|k| !nodes.contains(k)) {
        return Err(err(format!("kernel for unknown node `{k}`")));
    }
    let mut ks = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        let k = lookup(kernels, "kernel for node", n)?;
        let parents: Vec<String> = dag.parents(i).iter().map(|&p| nodes[p].clone()).collect();
        ks.push(kernel_from_decl(r, n, &parents, k)?);
    }
    Cbn::new(vars, dag, ks)
}

fn build_kernel(r: &Resolved, c: &Cbn, i: usize, k: &KernelDecl) -> Result<Kernel> {
    let name = c.vars()[i].name.clone();
    kernel_from_decl(r, &name, &c.parent_names(i), k)
}

fn kernel_from_decl(
    r: &Resolved,
    node: &str,
    parents: &[String],
    k: &KernelDecl,
) -> Result<Kernel> {
    let entry = r.var(node)?;
    match entry.kind {
        VarKind::Finite => {
            let dom = entry.domain.clone().unwrap_or_default();
            let pd = parents
                .iter()
                .map(|p| domain_of(r, p))
                .collect::<Result<Vec<_>>>()?;
            match k {
                KernelDecl::Point(v) => {
                    let v = v.as_int().ok_or_else(|| {
                        err(format!("point value for `{node}` must be an integer"))
                    })?;
                    Ok(FiniteKernel::point(dom, pd, v)?.into())
                }
                KernelDecl::Table(rows) => {
                    let keys = domain_product(&pd);
                    let rows: Vec<Vec<Rational>> =
                        rows.iter().map(|row| probs(row)).collect::<Result<_>>()?;
                    if rows.len() != 1 && rows.len() != keys.len() {
                        return Err(err(format!(
                            "kernel of `{node}` has {} rows, expected {}",
                            rows.len(),
                            keys.len()
                        )));
                    }
                    let mut table = BTreeMap::new();
                    for (n, key) in keys.into_iter().enumerate() {
                        let row = if rows.len() == 1 { &rows[0] } else { &rows[n] };
                        if row.len() != dom.len() {
                            return Err(err(format!(
                                "row of `{node}` has {} entries for a domain of {}",
                                row.len(),
                                dom.len()
                            )));
                        }
                        let row = dom
                            .iter()
                            .zip(row)
                            .filter(|(_, p)| !p.is_zero())
                            .map(|(v, p)| (*v, p.clone()))
                            .collect();
                        table.insert(key, row);
                    }
                    Ok(FiniteKernel::new(dom, pd, table)?.into())
                }
                KernelDecl::Linear { .. } => {
                    Err(err(format!("linear kernel for finite variable `{node}`")))
                }
            }
        }
        VarKind::Gaussian => match k {
            KernelDecl::Point(v) => {
                Ok(LinearGaussianKernel::constant(v.as_f64(), 0.0, parents.len())?.into())
            }
            KernelDecl::Linear {
                intercept,
                weights,
                variance,
            } => {
                if let Some(w) = weights.keys().find(|w| !parents.contains(w)) {
                    return Err(err(format!("`{w}` is not a parent of `{node}`")));
                }
                let ws = parents
                    .iter()
                    .map(|p| weights.get(p).copied().unwrap_or(0.0))
                    .collect();
                Ok(LinearGaussianKernel::new(*intercept, ws, *variance)?.into())
            }
            KernelDecl::Table(_) => {
                Err(err(format!("table kernel for Gaussian variable `{node}`")))
            }
        },
    }
}

fn build_representation(r: &Resolved, d: &RepresentationDecl) -> Result<RepresentationMap> {
    match d {
        RepresentationDecl::Affine {
            inputs,
            outputs,
            matrix,
            offset,
        } => {
            let rows = matrix.len();
            if matrix.iter().any(|row| row.len() != inputs.len()) {
                return Err(err("matrix rows must have one entry per input"));
            }
            let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
            let offset = if offset.is_empty() {
                DVector::zeros(rows)
            } else {
                DVector::from_column_slice(offset)
            };
            Ok(RepresentationMap::Affine(AffineMap::new(
                r.var_ids(inputs)?,
                r.var_ids(outputs)?,
                DMatrix::from_row_slice(rows, inputs.len(), &flat),
                offset,
            )?))
        }
        RepresentationDecl::Table {
            inputs,
            outputs,
            entries,
        } => {
            let domains = inputs
                .iter()
                .map(|n| domain_of(r, n))
                .collect::<Result<Vec<_>>>()?;
            let mut map = BTreeMap::new();
            for (x, y) in entries {
                if map.insert(x.clone(), y.clone()).is_some() {
                    return Err(err(format!("point {x:?} listed twice")));
                }
            }
            let t = TableMap::new(r.var_ids(inputs)?, domains, r.var_ids(outputs)?, map)?;
            for (k, out) in outputs.iter().enumerate() {
                let dom = domain_of(r, out)?;
                if let Some(y) = t.entries().values().find(|y| !dom.contains(&y[k])) {
                    return Err(err(format!("image {y:?} leaves the domain of `{out}`")));
                }
            }
            Ok(RepresentationMap::Table(t))
        }
    }
}

fn build_dgp(r: &Resolved, d: &DgpDecl) -> Result<Dgp> {
    let vars = r.var_ids(&d.vars)?;
    let mut actions = Vec::new();
    let mut laws = Vec::new();
    for a in &d.actions {
        let law = match &a.law {
            ActionLawDecl::Finite(t) => {
                let domains = d
                    .vars
                    .iter()
                    .map(|n| domain_of(r, n))
                    .collect::<Result<Vec<_>>>()?;
                Distribution::Finite(finite_table(vars.clone(), domains, t)?)
            }
            ActionLawDecl::Gaussian { mean, cov } => {
                if cov.iter().any(|row| row.len() != mean.len()) {
                    return Err(err(format!("covariance of `{}` is not square", a.label)));
                }
                let flat: Vec<f64> = cov.iter().flatten().copied().collect();
                Distribution::Gaussian(GaussianDist::from_rows(vars.clone(), mean, &flat)?)
            }
            ActionLawDecl::Emulate { cbn, intervention } => {
                let c = r.cbn(cbn)?;
                match intervention {
                    None => c.observational(),
                    Some(i) => c.interventional(r.intervention_in(i, cbn)?)?,
                }
            }
        };
        if law.vars() != vars.as_slice() {
            return Err(err(format!(
                "law of `{}` is not over ({})",
                a.label,
                d.vars.join(", ")
            )));
        }
        laws.push(law);
        actions.push(if a.observational {
            ActionId::observational(a.label.clone())
        } else {
            ActionId::new(a.label.clone())
        });
    }
    let complexity = d
        .complexity
        .as_ref()
        .map(|c| build_complexity(r, &actions, c))
        .transpose()?;
    Dgp::new(actions, laws, complexity)
}

fn build_functional(r: &Resolved, f: &FunctionalDecl) -> Result<Functional> {
    let terms = f
        .terms
        .iter()
        .map(|(n, c)| Ok((r.var(n)?.id.clone(), parse_rational(c)?)))
        .collect::<Result<Vec<_>>>()?;
    let constant = match &f.constant {
        Some(c) => parse_rational(c)?,
        None => Rational::zero(),
    };
    Ok(Functional::new(terms, constant))
}

pub(crate) fn functional(r: &Resolved, f: &FunctionalDecl) -> Result<Functional> {
    build_functional(r, f)
}

fn build_complexity(r: &Resolved, actions: &[ActionId], c: &ComplexityDecl) -> Result<Complexity> {
    Ok(match c {
        ComplexityDecl::Table(t) => {
            if let Some(l) = t.keys().find(|l| !actions.iter().any(|a| &a.label == *l)) {
                return Err(err(format!("complexity for unknown action `{l}`")));
            }
            Complexity::Table(
                actions
                    .iter()
                    .map(|a| {
                        t.get(&a.label)
                            .copied()
                            .ok_or_else(|| err(format!("no complexity for `{}`", a.label)))
                    })
                    .collect::<Result<_>>()?,
            )
        }
        ComplexityDecl::ReverseEntropy(v) => Complexity::ReverseEntropy(r.var(v)?.id.clone()),
        ComplexityDecl::AffineExpectation(f) => {
            Complexity::AffineExpectation(build_functional(r, f)?)
        }
        ComplexityDecl::ExpectedCost { var, costs } => Complexity::ExpectedCost {
            var: r.var(var)?.id.clone(),
            costs: costs
                .iter()
                .map(|(k, v)| Ok((*k, parse_rational(v)?)))
                .collect::<Result<_>>()?,
        },
    })
}

fn build_interpretation(r: &Resolved, d: &InterpretationDecl) -> Result<ResolvedInterpretation> {
    let plain = |spec| {
        Ok(ResolvedInterpretation {
            spec,
            complexity: None,
        })
    };
    match d {
        InterpretationDecl::C => plain(InterpretationSpec::C),
        InterpretationDecl::P => plain(InterpretationSpec::P),
        InterpretationDecl::S => plain(InterpretationSpec::S),
        InterpretationDecl::M => plain(InterpretationSpec::M),
        InterpretationDecl::STilde => plain(InterpretationSpec::STilde),
        InterpretationDecl::K { complexity } => {
            let complexity = match complexity {
                None => None,
                Some(c) => {
                    // Table complexities name actions, so they need a process.
                    if matches!(c, ComplexityDecl::Table(_)) {
                        return Err(err(
                            "table complexities belong to the process, not the interpretation",
                        ));
                    }
                    Some(build_complexity(r, &[], c)?)
                }
            };
            Ok(ResolvedInterpretation {
                spec: InterpretationSpec::K,
                complexity,
            })
        }
        InterpretationDecl::TildeIf { tilde, ranks } => {
            let items = tilde
                .iter()
                .map(|t| Ok(r.intervention(t)?.intervention.clone()))
                .collect::<Result<Vec<_>>>()?;
            plain(InterpretationSpec::tilde_if(items, ranks.clone())?)
        }
    }
}

/// Hard intervention in `m` from variable names.
pub(crate) fn hard_intervention(
    m: &FiniteScm,
    values: &BTreeMap<String, i64>,
) -> Result<HardIntervention> {
    let mut idx = BTreeMap::new();
    for (n, v) in values {
        let i = m
            .endo()
            .iter()
            .position(|x| &x.name == n)
            .ok_or_else(|| err(format!("`{n}` is not an endogenous variable")))?;
        idx.insert(i, *v);
    }
    HardIntervention::new(m, idx)
}

fn build_abstraction(r: &Resolved, d: &AbstractionDecl) -> Result<ResolvedAbstraction> {
    let low = lookup(&r.scms, "scm", &d.low)?.clone();
    let high = lookup(&r.scms, "scm", &d.high)?.clone();
    let tau = match lookup(&r.representations, "representation", &d.tau)? {
        RepresentationMap::Table(t) => t.clone(),
        RepresentationMap::Affine(a) => a.to_table(low.endo_domains().to_vec())?,
        RepresentationMap::Identity => return Err(err("tau must be a declared map")),
    };
    let i_star = d
        .i_star
        .iter()
        .map(|v| hard_intervention(&low, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolvedAbstraction {
        low,
        high,
        tau,
        i_star,
        bound: d.bound.unwrap_or(DEFAULT_SEARCH_BOUND),
    })
}
