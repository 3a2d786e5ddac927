//! Random finite instances and brute-force oracles shared by the
//! acceptance and property tests. Oracles work on plain tables and never
//! call the engine's factorization or conditioning code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use ivalid_core::cbn::kernel::Row;
use ivalid_core::cbn::{classify_intervention, Cbn, Dag, FiniteKernel, Intervention, Kernel};
use ivalid_core::dgp::build_dgp_from_cbn;
use ivalid_core::interpret::{check_desideratum, interpret, Desideratum, InterpretationSpec};
use ivalid_core::validity::{
    check_validity, construct_intp_falsifier, construct_ints_falsifier, Verdict,
};
use ivalid_core::{
    emulate, Distribution, InterventionSet, Rational, RepresentationMap, Tolerances, VarId,
};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Table = BTreeMap<Vec<i64>, Rational>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

fn cartesian(doms: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for d in doms {
        out = out
            .into_iter()
            .flat_map(|p| {
                d.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Row over `dom` with weights drawn from `lo..=hi`, never all zero.
pub fn random_row(r: &mut ChaCha8Rng, dom: &[i64], lo: i64, hi: i64) -> Row {
    loop {
        let w: Vec<i64> = dom.iter().map(|_| r.gen_range(lo..=hi)).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        return dom
            .iter()
            .zip(&w)
            .filter(|(_, &x)| x > 0)
            .map(|(v, &x)| (*v, Rational::new(x.into(), total.into())))
            .collect();
    }
}

fn domains(c: &Cbn) -> Vec<Vec<i64>> {
    (0..c.n())
        .map(|i| c.node_domain(i).expect("finite").to_vec())
        .collect()
}

fn parent_domains(c: &Cbn, i: usize) -> Vec<Vec<i64>> {
    let doms = domains(c);
    c.dag()
        .parents(i)
        .iter()
        .map(|&p| doms[p].clone())
        .collect()
}

/// Random network with `2..=max_n` nodes, domains of size 2 or 3, a random
/// DAG and kernels of full support.
pub fn random_cbn(r: &mut ChaCha8Rng, max_n: usize) -> Cbn {
    let n = r.gen_range(2..=max_n);
    let doms: Vec<Vec<i64>> = (0..n).map(|_| (0..r.gen_range(2..=3)).collect()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen_bool(0.5) {
                edges.push((order[a], order[b]));
            }
        }
    }
    let dag = Dag::from_edges(n, &edges).unwrap();
    let kernels = (0..n)
        .map(|i| {
            let pd: Vec<Vec<i64>> = dag.parents(i).iter().map(|&p| doms[p].clone()).collect();
            let rows: BTreeMap<Vec<i64>, Row> = cartesian(&pd)
                .into_iter()
                .map(|pa| (pa, random_row(r, &doms[i], 1, 4)))
                .collect();
            Kernel::Finite(FiniteKernel::new(doms[i].clone(), pd, rows).unwrap())
        })
        .collect();
    let vars = (0..n).map(|i| VarId::new(i, format!("V{i}"))).collect();
    Cbn::new(vars, dag, kernels).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Point mass or a constant row.
    Perfect,
    /// Rows may depend on the parents.
    Any,
}

pub fn random_kernel(r: &mut ChaCha8Rng, c: &Cbn, i: usize, kind: KernelKind) -> Kernel {
    let dom = c.node_domain(i).unwrap().to_vec();
    let pd = parent_domains(c, i);
    let perfect = kind == KernelKind::Perfect || pd.is_empty() || r.gen_bool(0.3);
    let k = if perfect {
        if r.gen_bool(0.5) {
            let v = dom[r.gen_range(0..dom.len())];
            FiniteKernel::point(dom, pd, v)
        } else {
            let row = random_row(r, &dom, 0, 3);
            FiniteKernel::constant(dom, pd, row)
        }
    } else {
        let rows = cartesian(&pd)
            .into_iter()
            .map(|pa| (pa, random_row(r, &dom, 0, 3)))
            .collect();
        FiniteKernel::new(dom, pd, rows)
    };
    Kernel::Finite(k.unwrap())
}

/// Random intervention on `targets` that changes the observational law.
pub fn random_intervention_on(
    r: &mut ChaCha8Rng,
    c: &Cbn,
    targets: &[usize],
    kind: KernelKind,
) -> Option<Intervention> {
    for _ in 0..20 {
        let t = targets
            .iter()
            .map(|&i| (i, random_kernel(r, c, i, kind)))
            .collect();
        let d = Intervention::new(t).unwrap();
        if oracle_joint(c, Some(&d)) != oracle_joint(c, None) {
            return Some(d);
        }
    }
    None
}

pub fn random_targets(r: &mut ChaCha8Rng, n: usize, max: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(r);
    let k = r.gen_range(1..=max.min(n));
    let mut t = all[..k].to_vec();
    t.sort();
    t
}

/// Joint table over the nodes of `c` in index order, by direct product of
/// kernel entries over every assignment.
pub fn oracle_joint(c: &Cbn, d: Option<&Intervention>) -> Table {
    let doms = domains(c);
    let mut out = Table::new();
    for x in cartesian(&doms) {
        let mut p = Rational::one();
        for i in 0..c.n() {
            let k = d
                .and_then(|d| d.targets().get(&i))
                .unwrap_or_else(|| c.kernel(i));
            let Kernel::Finite(k) = k else {
                panic!("finite oracle only")
            };
            let pa: Vec<i64> = c.dag().parents(i).iter().map(|&j| x[j]).collect();
            p *= k.prob(&pa, x[i]);
            if p.is_zero() {
                break;
            }
        }
        if !p.is_zero() {
            out.insert(x, p);
        }
    }
    out
}

/// Table of a finite law with coordinates permuted into the order `vars`.
pub fn table_in_order(law: &Distribution, vars: &[VarId]) -> Table {
    let f = law.as_finite().expect("finite law");
    let pos: Vec<usize> = vars
        .iter()
        .map(|v| {
            f.vars()
                .iter()
                .position(|w| w == v)
                .expect("same variables")
        })
        .collect();
    f.table()
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(x, p)| (pos.iter().map(|&k| x[k]).collect(), p.clone()))
        .collect()
}

/// Conditional of node `j` given `pa` under `t`, uniform where undefined.
pub fn oracle_conditional(c: &Cbn, t: &Table, j: usize, pa: &[usize]) -> Kernel {
    let doms = domains(c);
    let pd: Vec<Vec<i64>> = pa.iter().map(|&p| doms[p].clone()).collect();
    let rows = cartesian(&pd)
        .into_iter()
        .map(|pv| {
            let mut mass: BTreeMap<i64, Rational> = BTreeMap::new();
            let mut total = Rational::zero();
            for (x, p) in t {
                if pa.iter().zip(&pv).all(|(&k, v)| x[k] == *v) {
                    *mass.entry(x[j]).or_insert_with(Rational::zero) += p;
                    total += p;
                }
            }
            let row: Row = if total.is_zero() {
                let u = Rational::new(1.into(), (doms[j].len() as i64).into());
                doms[j].iter().map(|v| (*v, u.clone())).collect()
            } else {
                mass.into_iter()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(v, p)| (v, p / &total))
                    .collect()
            };
            (pv, row)
        })
        .collect();
    Kernel::Finite(FiniteKernel::new(doms[j].clone(), pd, rows).unwrap())
}

/// Minimality by enumerating every proper nonempty target subset with
/// kernels read off the target law.
pub fn oracle_minimal(c: &Cbn, d: &Intervention) -> bool {
    let target = oracle_joint(c, Some(d));
    let nodes = d.target_nodes();
    for mask in 1u64..(1u64 << nodes.len()) - 1 {
        let sub: BTreeMap<usize, Kernel> = (0..nodes.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| {
                let j = nodes[b];
                (j, oracle_conditional(c, &target, j, c.dag().parents(j)))
            })
            .collect();
        let e = Intervention::new(sub).unwrap();
        if oracle_joint(c, Some(&e)) == target {
            return false;
        }
    }
    true
}

/// Outcome of one suite: how many instances met their preconditions, and
/// a description of every failing one.
#[derive(Debug, Default)]
pub struct Suite {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl Suite {
    pub fn passed(&self, need: usize) -> bool {
        self.failures.is_empty() && self.instances >= need
    }
}

/// Runs `check` on seeds `base, base+1, ...` until `need` instances have
/// been checked or `4·need` attempts are spent. `check` returns `Ok(false)`
/// when the drawn instance misses its preconditions.
pub fn run_suite(base: u64, need: usize, check: impl Fn(u64) -> Result<bool, String>) -> Suite {
    let mut s = Suite::default();
    let mut seed = base;
    while s.instances < need && seed < base + 4 * need as u64 {
        match check(seed) {
            Ok(true) => s.instances += 1,
            Ok(false) => {}
            Err(e) => {
                s.instances += 1;
                s.failures.push(format!("seed {seed}: {e}"));
            }
        }
        seed += 1;
    }
    s
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

/// Membership under the circular interpretation agrees with direct
/// equality of the action law and the interventional table.
pub fn check_two_path(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let mut set = Vec::new();
    for _ in 0..r.gen_range(1..=3) {
        let targets = random_targets(r, c.n(), 2);
        if let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) {
            if !set.contains(&d) {
                set.push(d);
            }
        }
    }
    if set.is_empty() {
        return Ok(false);
    }
    let mut acts: Vec<Intervention> = set.clone();
    for _ in 0..2 {
        let targets = random_targets(r, c.n(), 3);
        if let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) {
            if !acts.contains(&d) {
                acts.push(d);
            }
        }
    }
    let labels: Vec<String> = (0..acts.len()).map(|k| format!("a{k}")).collect();
    let (dgp, _) = e(build_dgp_from_cbn(&c, &acts, &labels, &t))?;
    let iset = e(InterventionSet::new(&c, set.clone(), &t))?;
    let h = RepresentationMap::Identity;
    let res = e(interpret(&InterpretationSpec::C, &dgp, &h, &c, &iset, &t))?;
    for a in 0..dgp.len() {
        let law = table_in_order(dgp.law(a), c.vars());
        for (k, d) in set.iter().enumerate() {
            let direct = law == oracle_joint(&c, Some(d));
            if res.contains(a, k) != direct {
                return Err(format!(
                    "action {} / {}: membership {} but law equality {direct}",
                    dgp.actions()[a].label,
                    d.describe(&c),
                    res.contains(a, k)
                ));
            }
        }
    }
    Ok(true)
}

/// A process emulated by perfect (or single-node) interventions is valid
/// under `P` (or `S`) for a random set mixing the emulating interventions
/// with fresh ones.
pub fn check_emulated_validity(seed: u64, spec: InterpretationSpec) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let (kind, max_targets) = match spec {
        InterpretationSpec::P => (KernelKind::Perfect, 3),
        _ => (KernelKind::Any, 1),
    };
    let mut acts: Vec<Intervention> = Vec::new();
    for _ in 0..r.gen_range(1..=4) {
        let targets = random_targets(r, c.n(), max_targets);
        if let Some(d) = random_intervention_on(r, &c, &targets, kind) {
            if !acts.contains(&d) {
                acts.push(d);
            }
        }
    }
    if acts.is_empty() {
        return Ok(false);
    }
    let mut items = acts.clone();
    for d in &acts {
        let nodes = d.target_nodes();
        if nodes.len() > 1 {
            let sub = e(d.restrict(&nodes[..1]))?;
            if !items.contains(&sub) && c.register(&sub, &t).is_ok() {
                items.push(sub);
            }
        }
    }
    for _ in 0..2 {
        let targets = random_targets(r, c.n(), 2);
        if let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) {
            if !items.contains(&d) {
                items.push(d);
            }
        }
    }
    let labels: Vec<String> = (0..acts.len()).map(|k| format!("a{k}")).collect();
    let (dgp, _) = e(build_dgp_from_cbn(&c, &acts, &labels, &t))?;
    let iset = e(InterventionSet::new(&c, items, &t))?;
    let rep = e(check_validity(
        &dgp,
        &RepresentationMap::Identity,
        &c,
        &iset,
        &spec,
        &t,
    ))?;
    if rep.verdict != Verdict::Valid {
        return Err(format!("witnesses {:?}", rep.witnesses));
    }
    Ok(true)
}

pub fn check_minimality(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let targets = random_targets(r, c.n(), 3);
    let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) else {
        return Ok(false);
    };
    let fast = e(classify_intervention(&c, &d, &tol()))?.minimal;
    let brute = oracle_minimal(&c, &d);
    if fast != brute {
        return Err(format!(
            "{}: fast path {fast}, subset enumeration {brute}",
            d.describe(&c)
        ));
    }
    Ok(true)
}

/// Emulating an emulated process along two random orders reproduces every
/// action law and the observational law.
pub fn check_emulation_round_trip(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let mut acts: Vec<Intervention> = Vec::new();
    for _ in 0..r.gen_range(1..=3) {
        let targets = random_targets(r, c.n(), 3);
        if let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) {
            if !acts.contains(&d) {
                acts.push(d);
            }
        }
    }
    if acts.is_empty() {
        return Ok(false);
    }
    let labels: Vec<String> = (0..acts.len()).map(|k| format!("a{k}")).collect();
    let (dgp, _) = e(build_dgp_from_cbn(&c, &acts, &labels, &t))?;
    let h = RepresentationMap::Identity;
    let mut order: Vec<VarId> = c.vars().to_vec();
    for round in 0..2 {
        if round == 0 {
            order.reverse();
        } else {
            order.shuffle(r);
        }
        let em = e(emulate(&dgp, &h, &order, &t))?;
        let vars = em.cbn.vars().to_vec();
        let obs = table_in_order(dgp.law(dgp.observational()), &vars);
        if oracle_joint(&em.cbn, None) != obs {
            return Err(format!("order {order:?}: observational law not reproduced"));
        }
        for (a, d) in em.link.iter() {
            if oracle_joint(&em.cbn, Some(d)) != table_in_order(dgp.law(a), &vars) {
                return Err(format!(
                    "order {order:?}: action {} not reproduced",
                    dgp.actions()[a].label
                ));
            }
        }
        if em.link.len() + em.unlinkable.len() + 1 != dgp.len() {
            return Err("some action neither linked nor reported".into());
        }
    }
    Ok(true)
}

/// The restriction of a minimal decomposable multi-node intervention to one
/// target falsifies the network under `S` for the process it emulates.
pub fn check_ints_falsifier(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let targets = random_targets(r, c.n(), 3);
    if targets.len() < 2 {
        return Ok(false);
    }
    let Some(d) = random_intervention_on(r, &c, &targets, KernelKind::Any) else {
        return Ok(false);
    };
    let Ok(f) = construct_ints_falsifier(&c, &d, None, &t) else {
        return Ok(false);
    };
    falsifies(&c, d, f, InterpretationSpec::S)
}

/// The marginal-matched perfect intervention built from a minimal
/// decomposable intervention falsifies the network under `P`.
pub fn check_intp_falsifier(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let non_source: Vec<usize> = (0..c.n())
        .filter(|&i| !c.dag().parents(i).is_empty())
        .collect();
    if non_source.is_empty() {
        return Ok(false);
    }
    // One target keeps a parent-dependent full-support kernel, another gets a
    // full-support constant row; the rest of the law stays full-support, so
    // dependence on the parents is visible in the intervened law.
    let dep = non_source[r.gen_range(0..non_source.len())];
    let others: Vec<usize> = (0..c.n()).filter(|&i| i != dep).collect();
    let indep = others[r.gen_range(0..others.len())];
    let pd = parent_domains(&c, dep);
    let dom = c.node_domain(dep).unwrap().to_vec();
    let rows: BTreeMap<Vec<i64>, Row> = loop {
        let rows: BTreeMap<Vec<i64>, Row> = cartesian(&pd)
            .into_iter()
            .map(|pa| (pa, random_row(r, &dom, 1, 4)))
            .collect();
        let first = rows.values().next().unwrap();
        if rows.values().any(|row| row != first) {
            break rows;
        }
    };
    let dep_kernel = Kernel::Finite(FiniteKernel::new(dom, pd, rows).unwrap());
    let idom = c.node_domain(indep).unwrap().to_vec();
    let indep_row = random_row(r, &idom, 1, 4);
    let indep_kernel =
        Kernel::Finite(FiniteKernel::constant(idom, parent_domains(&c, indep), indep_row).unwrap());
    let kernels: BTreeMap<usize, Kernel> = [(dep, dep_kernel), (indep, indep_kernel)].into();
    let d = Intervention::new(kernels).unwrap();
    if c.register(&d, &t).is_err() {
        return Ok(false);
    }
    let Ok((f, _)) = construct_intp_falsifier(&c, &d, &t) else {
        return Ok(false);
    };
    falsifies(&c, d, f, InterpretationSpec::P)
}

fn falsifies(
    c: &Cbn,
    d: Intervention,
    f: Intervention,
    spec: InterpretationSpec,
) -> Result<bool, String> {
    let t = tol();
    let (dgp, _) = e(build_dgp_from_cbn(
        c,
        std::slice::from_ref(&d),
        &["a".into()],
        &t,
    ))?;
    let iset = e(InterventionSet::new(c, vec![f.clone()], &t))?;
    let rep = e(check_validity(
        &dgp,
        &RepresentationMap::Identity,
        c,
        &iset,
        &spec,
        &t,
    ))?;
    if rep.verdict != Verdict::Falsified {
        return Err(format!(
            "{} built from {} does not falsify",
            f.describe(c),
            d.describe(c)
        ));
    }
    Ok(true)
}

/// No action is taken to implement two distinct interventions under `P`.
pub fn check_p_d2(seed: u64) -> Result<bool, String> {
    let r = &mut rng(seed);
    let c = random_cbn(r, 4);
    let t = tol();
    let mut acts: Vec<Intervention> = Vec::new();
    for _ in 0..r.gen_range(1..=3) {
        let targets = random_targets(r, c.n(), 3);
        let kind = if r.gen_bool(0.7) {
            KernelKind::Perfect
        } else {
            KernelKind::Any
        };
        if let Some(d) = random_intervention_on(r, &c, &targets, kind) {
            if !acts.contains(&d) {
                acts.push(d);
            }
        }
    }
    if acts.is_empty() {
        return Ok(false);
    }
    let mut items: Vec<Intervention> = Vec::new();
    for d in &acts {
        let nodes = d.target_nodes();
        for mask in 1u64..(1u64 << nodes.len()) {
            let sub: Vec<usize> = (0..nodes.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| nodes[b])
                .collect();
            let s = e(d.restrict(&sub))?;
            if !items.contains(&s) && c.register(&s, &t).is_ok() {
                items.push(s);
            }
        }
    }
    let labels: Vec<String> = (0..acts.len()).map(|k| format!("a{k}")).collect();
    let (dgp, _) = e(build_dgp_from_cbn(&c, &acts, &labels, &t))?;
    let iset = e(InterventionSet::new(&c, items, &t))?;
    let rep = e(check_desideratum(
        Desideratum::D2,
        &InterpretationSpec::P,
        &dgp,
        &RepresentationMap::Identity,
        &c,
        &[iset],
        &t,
    ))?;
    if !rep.holds {
        return Err(format!("{:?}", rep.witness));
    }
    Ok(true)
}
