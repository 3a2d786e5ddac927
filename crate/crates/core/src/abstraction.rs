//! Finite deterministic structural causal models, the induced mapping of
//! hard interventions through a state map, the τ-abstraction decision on
//! finite exogenous domains, and paired validity experiments.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::cbn::{Cbn, Dag, FiniteKernel, Intervention, InterventionSet, Kernel, Row};
use crate::dgp::build_dgp_from_cbn;
use crate::dist::{domain_product, FiniteDist, RepresentationMap, TableMap, Tolerances};
use crate::error::{Error, Result};
use crate::interpret::InterpretationSpec;
use crate::rational::Rational;
use crate::validity::{check_validity, ValidityReport};
use crate::var::{check_unique, VarId};

/// Default limit on `|low exogenous| · |high exogenous|`.
pub const DEFAULT_SEARCH_BOUND: usize = 1 << 16;

/// Structural assignment of one endogenous variable as a total table over
/// its exogenous and endogenous parents, exogenous values first.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub exo_parents: Vec<usize>,
    pub endo_parents: Vec<usize>,
    pub table: BTreeMap<Vec<i64>, i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteScm {
    exo_law: FiniteDist,
    endo: Vec<VarId>,
    endo_domains: Vec<Vec<i64>>,
    mechanisms: Vec<Mechanism>,
    dag: Dag,
}

impl FiniteScm {
    pub fn new(
        exo_law: FiniteDist,
        endo: Vec<VarId>,
        endo_domains: Vec<Vec<i64>>,
        mechanisms: Vec<Mechanism>,
    ) -> Result<Self> {
        check_unique(&endo)?;
        if endo_domains.len() != endo.len() || mechanisms.len() != endo.len() {
            return Err(Error::InvalidScm(
                "one domain and mechanism per variable required".into(),
            ));
        }
        let n_exo = exo_law.vars().len();
        for (i, m) in mechanisms.iter().enumerate() {
            if m.exo_parents.iter().any(|&e| e >= n_exo) {
                return Err(Error::InvalidScm(format!(
                    "unknown exogenous parent of `{}`",
                    endo[i]
                )));
            }
            let mut doms: Vec<Vec<i64>> = m
                .exo_parents
                .iter()
                .map(|&e| exo_law.domains()[e].clone())
                .collect();
            for &p in &m.endo_parents {
                doms.push(endo_domains.get(p).cloned().ok_or_else(|| {
                    Error::InvalidScm(format!("unknown endogenous parent of `{}`", endo[i]))
                })?);
            }
            for pt in domain_product(&doms) {
                match m.table.get(&pt) {
                    None => {
                        return Err(Error::InvalidScm(format!(
                            "mechanism of `{}` undefined at {pt:?}",
                            endo[i]
                        )))
                    }
                    Some(v) if !endo_domains[i].contains(v) => {
                        return Err(Error::InvalidScm(format!(
                            "mechanism of `{}` leaves its domain",
                            endo[i]
                        )))
                    }
                    _ => {}
                }
            }
        }
        let dag = Dag::new(mechanisms.iter().map(|m| m.endo_parents.clone()).collect())
            .map_err(|e| Error::InvalidScm(e.to_string()))?;
        Ok(FiniteScm {
            exo_law,
            endo,
            endo_domains,
            mechanisms,
            dag,
        })
    }

    pub fn exo_law(&self) -> &FiniteDist {
        &self.exo_law
    }
    pub fn exo_domains(&self) -> &[Vec<i64>] {
        self.exo_law.domains()
    }
    pub fn endo(&self) -> &[VarId] {
        &self.endo
    }
    pub fn endo_domains(&self) -> &[Vec<i64>] {
        &self.endo_domains
    }
    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Law of the endogenous variables under `d`.
    pub fn law(&self, d: Option<&HardIntervention>) -> Result<FiniteDist> {
        let mut acc: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for (u, p) in self.exo_law.table() {
            *acc.entry(scm_solve(self, d, u)?)
                .or_insert_with(Rational::zero) += p;
        }
        FiniteDist::new(self.endo.clone(), self.endo_domains.clone(), acc)
    }

    /// The network with the same graph whose kernels marginalize the
    /// private exogenous parents of each mechanism. Rows at unreachable
    /// parent values come from the mechanisms too.
    pub fn to_cbn(&self) -> Result<Cbn> {
        let n_exo = self.exo_law.vars().len();
        let mut owner = vec![None; n_exo];
        for (i, m) in self.mechanisms.iter().enumerate() {
            for &e in &m.exo_parents {
                if owner[e].replace(i).is_some() {
                    return Err(Error::InvalidScm(
                        "exogenous variable shared between mechanisms".into(),
                    ));
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = self
            .mechanisms
            .iter()
            .map(|m| m.exo_parents.clone())
            .collect();
        let loose: Vec<usize> = (0..n_exo).filter(|&e| owner[e].is_none()).collect();
        groups.push(loose);
        let mut product: Option<FiniteDist> = None;
        let mut order = Vec::new();
        for g in groups.iter().filter(|g| !g.is_empty()) {
            let m = self.exo_law.marginal_idx(g);
            order.extend(g.iter().copied());
            product = Some(match product {
                None => m,
                Some(p) => p.product(&m)?,
            });
        }
        if let Some(p) = product {
            if p.marginal_idx(&inverse(&order)).table() != self.exo_law.table() {
                return Err(Error::InvalidScm(
                    "exogenous law does not factorize over mechanisms".into(),
                ));
            }
        }
        let mut kernels = Vec::new();
        for (i, m) in self.mechanisms.iter().enumerate() {
            let exo = self.exo_law.marginal_idx(&m.exo_parents);
            let pd: Vec<Vec<i64>> = m
                .endo_parents
                .iter()
                .map(|&p| self.endo_domains[p].clone())
                .collect();
            let k = FiniteKernel::from_fn(self.endo_domains[i].clone(), pd, |pa| {
                let mut r = Row::new();
                for (u, p) in exo.table() {
                    let mut key = u.clone();
                    key.extend_from_slice(pa);
                    *r.entry(m.table[&key]).or_insert_with(Rational::zero) += p;
                }
                r
            })?;
            kernels.push(Kernel::Finite(k));
        }
        Cbn::new(self.endo.clone(), self.dag.clone(), kernels)
    }
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (k, &e) in order.iter().enumerate() {
        inv[e] = k;
    }
    inv
}

/// Assignment of fixed values to endogenous variables; may be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct HardIntervention {
    values: BTreeMap<usize, i64>,
    names: BTreeMap<usize, String>,
}

impl HardIntervention {
    pub fn new(m: &FiniteScm, values: BTreeMap<usize, i64>) -> Result<Self> {
        let mut names = BTreeMap::new();
        for (&i, v) in &values {
            let dom = m.endo_domains.get(i).ok_or_else(|| {
                Error::InvalidIntervention(format!("unknown endogenous index {i}"))
            })?;
            if !dom.contains(v) {
                return Err(Error::InvalidIntervention(format!(
                    "value {v} outside the domain of `{}`",
                    m.endo[i]
                )));
            }
            names.insert(i, m.endo[i].name.clone());
        }
        Ok(HardIntervention { values, names })
    }

    pub fn empty() -> Self {
        HardIntervention::default()
    }

    pub fn values(&self) -> &BTreeMap<usize, i64> {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same assignment as point-mass kernels in the network of `m`.
    pub fn to_intervention(&self, m: &FiniteScm) -> Result<Intervention> {
        let targets = self
            .values
            .iter()
            .map(|(&i, &v)| {
                let pd = m.mechanisms[i]
                    .endo_parents
                    .iter()
                    .map(|&p| m.endo_domains[p].clone())
                    .collect();
                Ok((
                    i,
                    FiniteKernel::point(m.endo_domains[i].clone(), pd, v)?.into(),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(Intervention::new(targets)?.labeled(self.to_string()))
    }
}

impl fmt::Display for HardIntervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("do()");
        }
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(i, v)| format!("{}={v}", self.names[i]))
            .collect();
        write!(f, "do({})", parts.join(", "))
    }
}

/// Unique solution of the intervened system at exogenous value `u`.
pub fn scm_solve(m: &FiniteScm, d: Option<&HardIntervention>, u: &[i64]) -> Result<Vec<i64>> {
    if u.len() != m.exo_law.vars().len() {
        return Err(Error::InvalidScm(
            "exogenous assignment has wrong length".into(),
        ));
    }
    let mut x = vec![0i64; m.endo.len()];
    for &i in m.dag.topological_order() {
        if let Some(&v) = d.and_then(|d| d.values.get(&i)) {
            x[i] = v;
            continue;
        }
        let mech = &m.mechanisms[i];
        let key: Vec<i64> = mech
            .exo_parents
            .iter()
            .map(|&e| u[e])
            .chain(mech.endo_parents.iter().map(|&p| x[p]))
            .collect();
        x[i] = *mech.table.get(&key).ok_or_else(|| {
            Error::InvalidScm(format!("mechanism of `{}` undefined at {key:?}", m.endo[i]))
        })?;
    }
    Ok(x)
}

fn tau_apply<'a>(tau: &'a TableMap, x: &[i64]) -> Result<&'a Vec<i64>> {
    tau.apply(x)
        .ok_or_else(|| Error::Abstraction(format!("state map undefined at {x:?}")))
}

fn check_tau(tau: &TableMap, low: &FiniteScm, high: &FiniteScm) -> Result<()> {
    if tau.inputs() != low.endo() || tau.outputs() != high.endo() {
        return Err(Error::Abstraction(
            "state map variables differ from the models'".into(),
        ));
    }
    for pt in domain_product(low.endo_domains()) {
        tau_apply(tau, &pt)?;
    }
    Ok(())
}

/// The high-level hard intervention induced by `d`: every high coordinate
/// that depends on a targeted low variable and is constant over the
/// images of all solutions under `d` is fixed to that constant.
/// Coordinates varying across solutions stay unconstrained.
pub fn omega_tau(
    tau: &TableMap,
    low: &FiniteScm,
    high: &FiniteScm,
    d: &HardIntervention,
) -> Result<HardIntervention> {
    check_tau(tau, low, high)?;
    if d.is_empty() {
        return Ok(HardIntervention::empty());
    }
    let grid = domain_product(low.endo_domains());
    let k_out = high.endo().len();
    let mut targeted = vec![false; k_out];
    for x in &grid {
        let y = tau_apply(tau, x)?;
        for &j in d.values.keys() {
            for &alt in &low.endo_domains[j] {
                let mut x2 = x.clone();
                x2[j] = alt;
                let y2 = tau_apply(tau, &x2)?;
                for k in 0..k_out {
                    if y[k] != y2[k] {
                        targeted[k] = true;
                    }
                }
            }
        }
    }
    let mut images = Vec::new();
    for u in domain_product(low.exo_domains()) {
        images.push(tau_apply(tau, &scm_solve(low, Some(d), &u)?)?.clone());
    }
    let first = images
        .first()
        .ok_or_else(|| Error::Abstraction("empty exogenous domain".into()))?;
    let values = (0..k_out)
        .filter(|&k| targeted[k] && images.iter().all(|y| y[k] == first[k]))
        .map(|k| (k, first[k]))
        .collect();
    HardIntervention::new(high, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractionVerdict {
    pub holds: bool,
    /// Induced high-level interventions, one per low-level intervention.
    pub omegas: Vec<HardIntervention>,
    /// Exogenous map from low to high values, when one exists.
    pub tau_u: Option<BTreeMap<Vec<i64>, Vec<i64>>>,
    pub reason: Option<String>,
}

impl AbstractionVerdict {
    fn fail(omegas: Vec<HardIntervention>, reason: String) -> Self {
        AbstractionVerdict {
            holds: false,
            omegas,
            tau_u: None,
            reason: Some(reason),
        }
    }
}

pub fn is_tau_abstraction(
    low: &FiniteScm,
    i_star: &[HardIntervention],
    high: &FiniteScm,
    tau: &TableMap,
) -> Result<AbstractionVerdict> {
    is_tau_abstraction_bounded(low, i_star, high, tau, DEFAULT_SEARCH_BOUND)
}

/// Decides whether `high` with the induced interventions abstracts `low`
/// with `i_star` under `tau`: `tau` must be surjective, and a surjective
/// exogenous map must make every intervened solution commute.
pub fn is_tau_abstraction_bounded(
    low: &FiniteScm,
    i_star: &[HardIntervention],
    high: &FiniteScm,
    tau: &TableMap,
    bound: usize,
) -> Result<AbstractionVerdict> {
    check_tau(tau, low, high)?;
    let us = domain_product(low.exo_domains());
    let vs = domain_product(high.exo_domains());
    if us.len().saturating_mul(vs.len()) > bound {
        return Err(Error::Abstraction(format!(
            "exogenous domains of sizes {} and {} exceed the search bound {bound}",
            us.len(),
            vs.len()
        )));
    }
    let omegas = i_star
        .iter()
        .map(|d| omega_tau(tau, low, high, d))
        .collect::<Result<Vec<_>>>()?;
    let image: std::collections::BTreeSet<&Vec<i64>> = domain_product(low.endo_domains())
        .iter()
        .map(|x| tau_apply(tau, x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let high_points = domain_product(high.endo_domains());
    if let Some(y) = high_points.iter().find(|y| !image.contains(y)) {
        return Ok(AbstractionVerdict::fail(
            omegas,
            format!("τ not surjective: misses {y:?}"),
        ));
    }
    let mut feasible: Vec<Vec<usize>> = Vec::with_capacity(us.len());
    for u in &us {
        let lows = i_star
            .iter()
            .map(|d| Ok(tau_apply(tau, &scm_solve(low, Some(d), u)?)?.clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut f = Vec::new();
        for (vi, v) in vs.iter().enumerate() {
            let mut ok = true;
            for (d, y) in omegas.iter().zip(&lows) {
                if &scm_solve(high, Some(d), v)? != y {
                    ok = false;
                    break;
                }
            }
            if ok {
                f.push(vi);
            }
        }
        if f.is_empty() {
            return Ok(AbstractionVerdict::fail(
                omegas,
                format!("no exogenous image for u={u:?}"),
            ));
        }
        feasible.push(f);
    }
    // Cover every high value with a distinct u by augmenting paths, taking
    // the first free u when there is one.
    let mut owner_of_v: Vec<Option<usize>> = vec![None; vs.len()];
    let mut v_of_u: Vec<Option<usize>> = vec![None; us.len()];
    let by_v: Vec<Vec<usize>> = (0..vs.len())
        .map(|vi| {
            (0..us.len())
                .filter(|&ui| feasible[ui].contains(&vi))
                .collect()
        })
        .collect();
    for (vi, v) in vs.iter().enumerate() {
        let mut seen = vec![false; us.len()];
        if !augment(vi, &by_v, &mut seen, &mut owner_of_v, &mut v_of_u) {
            return Ok(AbstractionVerdict::fail(
                omegas,
                format!("no surjective exogenous map reaches {v:?}"),
            ));
        }
    }
    let tau_u = us
        .iter()
        .enumerate()
        .map(|(ui, u)| (u.clone(), vs[v_of_u[ui].unwrap_or(feasible[ui][0])].clone()))
        .collect();
    Ok(AbstractionVerdict {
        holds: true,
        omegas,
        tau_u: Some(tau_u),
        reason: None,
    })
}

fn augment(
    vi: usize,
    by_v: &[Vec<usize>],
    seen: &mut [bool],
    owner_of_v: &mut [Option<usize>],
    v_of_u: &mut [Option<usize>],
) -> bool {
    if let Some(&ui) = by_v[vi].iter().find(|&&ui| v_of_u[ui].is_none()) {
        v_of_u[ui] = Some(vi);
        owner_of_v[vi] = Some(ui);
        return true;
    }
    for &ui in &by_v[vi] {
        if seen[ui] {
            continue;
        }
        seen[ui] = true;
        let free = match v_of_u[ui] {
            None => true,
            Some(other) => augment(other, by_v, seen, owner_of_v, v_of_u),
        };
        if free {
            v_of_u[ui] = Some(vi);
            owner_of_v[vi] = Some(ui);
            return true;
        }
    }
    false
}

/// Validity of the low network for the actions emulated by `i_star`, and
/// of the high network for the same actions seen through `tau`.
#[allow(clippy::too_many_arguments)]
pub fn abstraction_validity_experiment(
    low: &Cbn,
    i_star: &[Intervention],
    tau: &RepresentationMap,
    high: &Cbn,
    spec: &InterpretationSpec,
    low_set: &InterventionSet,
    high_set: &InterventionSet,
    tol: &Tolerances,
) -> Result<(ValidityReport, ValidityReport)> {
    let labels: Vec<String> = i_star.iter().map(|d| d.name(low)).collect();
    let (dgp, _) = build_dgp_from_cbn(low, i_star, &labels, tol)?;
    let lo = check_validity(&dgp, &RepresentationMap::Identity, low, low_set, spec, tol)?;
    let hi = check_validity(&dgp, tau, high, high_set, spec, tol)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::var::vars;

    fn identity_mech(exo: usize) -> Mechanism {
        Mechanism {
            exo_parents: vec![exo],
            endo_parents: vec![],
            table: (0..8).map(|v| (vec![v], v)).collect(),
        }
    }

    fn mech(
        exo: Vec<usize>,
        endo: Vec<usize>,
        doms: &[Vec<i64>],
        f: impl Fn(&[i64]) -> i64,
    ) -> Mechanism {
        Mechanism {
            exo_parents: exo,
            endo_parents: endo,
            table: domain_product(doms)
                .into_iter()
                .map(|p| {
                    let v = f(&p);
                    (p, v)
                })
                .collect(),
        }
    }

    fn ex63(dom: Vec<i64>) -> (FiniteScm, FiniteScm, TableMap) {
        let low = FiniteScm::new(
            FiniteDist::uniform(vars(&["U1"]), vec![dom.clone()]).unwrap(),
            vec![VarId::new(0, "X1")],
            vec![dom.clone()],
            vec![mech(vec![0], vec![], std::slice::from_ref(&dom), |p| p[0])],
        )
        .unwrap();
        let bin = vec![0, 1];
        let high = FiniteScm::new(
            FiniteDist::uniform(vars(&["N1", "N2"]), vec![bin.clone(), bin.clone()]).unwrap(),
            vec![VarId::new(0, "Y1"), VarId::new(1, "Y2")],
            vec![bin.clone(), bin.clone()],
            vec![identity_mech(0), identity_mech(1)]
                .into_iter()
                .map(|mut m| {
                    m.table.retain(|k, _| k[0] < 2);
                    m
                })
                .collect(),
        )
        .unwrap();
        let tau = TableMap::from_fn(low.endo().to_vec(), vec![dom], high.endo().to_vec(), |x| {
            vec![(x[0] >= 3) as i64, (x[0] % 2 == 0) as i64]
        })
        .unwrap();
        (low, high, tau)
    }

    fn point(m: &FiniteScm, i: usize, v: i64) -> HardIntervention {
        HardIntervention::new(m, [(i, v)].into_iter().collect()).unwrap()
    }

    #[test]
    fn binary_encoding_is_an_abstraction() {
        let (low, high, tau) = ex63(vec![1, 2, 3, 4]);
        assert_eq!(
            scm_solve(&low, Some(&point(&low, 0, 1)), &[4]).unwrap(),
            vec![1]
        );
        assert_eq!(
            omega_tau(&tau, &low, &high, &point(&low, 0, 2))
                .unwrap()
                .to_string(),
            "do(Y1=0, Y2=1)"
        );
        assert_eq!(
            omega_tau(&tau, &low, &high, &point(&low, 0, 4))
                .unwrap()
                .to_string(),
            "do(Y1=1, Y2=1)"
        );
        assert!(omega_tau(&tau, &low, &high, &HardIntervention::empty())
            .unwrap()
            .is_empty());
        let i_star: Vec<_> = (1..=4).map(|x| point(&low, 0, x)).collect();
        let v = is_tau_abstraction(&low, &i_star, &high, &tau).unwrap();
        assert!(v.holds, "{:?}", v.reason);
        for (u, img) in v.tau_u.unwrap() {
            assert_eq!(&img, tau.apply(&u).unwrap());
        }
        assert!(is_tau_abstraction_bounded(&low, &i_star, &high, &tau, 8).is_err());
    }

    #[test]
    fn truncated_domain_is_not_surjective() {
        let (low, high, tau) = ex63(vec![1, 2, 3]);
        let i_star: Vec<_> = (1..=3).map(|x| point(&low, 0, x)).collect();
        let v = is_tau_abstraction(&low, &i_star, &high, &tau).unwrap();
        assert!(!v.holds);
        assert!(v.reason.unwrap().starts_with("τ not surjective"));
    }

    #[test]
    fn conversion_commutes_with_hard_interventions() {
        let b = vec![0, 1];
        let exo = FiniteDist::new(
            vars(&["U1", "U2"]),
            vec![b.clone(), b.clone()],
            [
                (vec![0, 0], rat(1, 8)),
                (vec![0, 1], rat(3, 8)),
                (vec![1, 0], rat(1, 8)),
                (vec![1, 1], rat(3, 8)),
            ],
        )
        .unwrap();
        let m = FiniteScm::new(
            exo,
            vec![VarId::new(0, "X"), VarId::new(1, "Y")],
            vec![b.clone(), b.clone()],
            vec![
                mech(vec![0], vec![], std::slice::from_ref(&b), |p| p[0]),
                mech(vec![1], vec![0], &[b.clone(), b.clone()], |p| p[0] ^ p[1]),
            ],
        )
        .unwrap();
        let c = m.to_cbn().unwrap();
        assert_eq!(
            c.observational().as_finite().unwrap(),
            &m.law(None).unwrap()
        );
        for (i, v) in [(0, 0), (0, 1), (1, 1)] {
            let d = point(&m, i, v);
            let law = c.interventional(&d.to_intervention(&m).unwrap()).unwrap();
            assert_eq!(law.as_finite().unwrap(), &m.law(Some(&d)).unwrap());
        }
    }
}
