//! Interventional-validity verdicts, constructive falsifiers and the
//! phenomenological-validity check.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::cbn::{
    classify_intervention, Cbn, Dag, FiniteKernel, Intervention, InterventionSet, Kernel,
    LinearGaussianKernel,
};
use crate::dgp::{action_laws, derive_intervention, Dgp};
use crate::dist::ops::{conditional_kernel_idx, kernel_compatible_idx};
use crate::dist::{
    ci_test, equal, finite_gap, gaussian_gap, is_markov, Distribution, RepresentationMap,
    Tolerances,
};
use crate::error::{Error, Result};
use crate::interpret::{interpret, InterpretationSpec};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Valid,
    Falsified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "VALID",
            Verdict::Falsified => "FALSIFIED",
        })
    }
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn fmt_gap(x: f64) -> String {
    if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        crate::cbn::kernel::fmt_num(x)
    } else {
        format!("{x:.3e}")
    }
}

/// Gap between an action law and a model law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Divergence {
    Finite {
        #[serde(serialize_with = "ser_rational")]
        max_abs: Rational,
        /// First assignment at which the tables differ.
        at: Option<Vec<(String, i64)>>,
    },
    Gaussian {
        mean: f64,
        cov: f64,
    },
}

impl Divergence {
    pub fn between(a: &Distribution, b: &Distribution) -> Result<Self> {
        match (a, b) {
            (Distribution::Finite(x), Distribution::Finite(y)) => {
                let (max_abs, at) = finite_gap(x, y);
                let at = at.map(|v| x.vars().iter().map(|n| n.name.clone()).zip(v).collect());
                Ok(Divergence::Finite { max_abs, at })
            }
            (Distribution::Gaussian(x), Distribution::Gaussian(y)) => {
                let g = gaussian_gap(x, y);
                Ok(Divergence::Gaussian {
                    mean: g.mean,
                    cov: g.cov,
                })
            }
            _ => Err(Error::FamilyMismatch("divergence across families".into())),
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite { max_abs, at } => {
                write!(f, "max table gap {}", format_rational(max_abs))?;
                if let Some(at) = at {
                    let s: Vec<String> = at.iter().map(|(n, v)| format!("{n}={v}")).collect();
                    write!(f, " first at ({})", s.join(", "))?;
                }
                Ok(())
            }
            Divergence::Gaussian { mean, cov } => {
                write!(f, "mean gap {}, cov gap {}", fmt_gap(*mean), fmt_gap(*cov))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub action: String,
    pub intervention: String,
    pub divergence: Divergence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub pairs_checked: usize,
    pub scope_note: String,
    /// The network does not reproduce the observational law.
    pub incompatible: bool,
    pub warnings: Vec<String>,
}

impl ValidityReport {
    fn new(
        witnesses: Vec<Witness>,
        pairs_checked: usize,
        scope_note: String,
        incompatible: bool,
        warnings: Vec<String>,
    ) -> Self {
        ValidityReport {
            verdict: if witnesses.is_empty() {
                Verdict::Valid
            } else {
                Verdict::Falsified
            },
            witnesses,
            pairs_checked,
            scope_note,
            incompatible,
            warnings,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

fn scope(dgp: &Dgp, set: &InterventionSet) -> String {
    format!(
        "relative to the {} listed actions and {} modeled interventions",
        dgp.len(),
        set.len()
    )
}

/// Compares every assigned (action, intervention) pair and returns all
/// witnesses of disagreement.
pub fn check_validity(
    dgp: &Dgp,
    h: &RepresentationMap,
    c: &Cbn,
    set: &InterventionSet,
    spec: &InterpretationSpec,
    tol: &Tolerances,
) -> Result<ValidityReport> {
    let laws = action_laws(dgp, h)?;
    let o = dgp.observational();
    if laws[o].vars() != c.vars() {
        return Err(Error::VarMismatch(
            "representation variables differ from the network's".into(),
        ));
    }
    let obs = c.observational();
    if !equal(&laws[o], &obs, tol)? {
        let w = Witness {
            action: dgp.actions()[o].label.clone(),
            intervention: "none".into(),
            divergence: Divergence::between(&laws[o], &obs)?,
        };
        return Ok(ValidityReport::new(
            vec![w],
            1,
            scope(dgp, set),
            true,
            vec![],
        ));
    }
    let res = interpret(spec, dgp, h, c, set, tol)?;
    let mut witnesses = Vec::new();
    let mut pairs = 0;
    for (a, law) in laws.iter().enumerate() {
        for d in res.row(a) {
            pairs += 1;
            if !equal(law, &set.laws()[d], tol)? {
                witnesses.push(Witness {
                    action: res.actions[a].clone(),
                    intervention: res.interventions[d].clone(),
                    divergence: Divergence::between(law, &set.laws()[d])?,
                });
            }
        }
    }
    Ok(ValidityReport::new(
        witnesses,
        pairs,
        scope(dgp, set),
        false,
        res.warnings,
    ))
}

fn constant_kernel(c: &Cbn, law: &Distribution, j: usize) -> Result<Kernel> {
    let np = c.dag().parents(j).len();
    match law {
        Distribution::Finite(f) => {
            let row = f
                .marginal_idx(&[j])
                .table()
                .iter()
                .map(|(k, p)| (k[0], p.clone()))
                .collect();
            let pd = c
                .dag()
                .parents(j)
                .iter()
                .map(|&p| f.domains()[p].clone())
                .collect();
            Ok(FiniteKernel::constant(f.domains()[j].clone(), pd, row)?.into())
        }
        Distribution::Gaussian(g) => {
            Ok(LinearGaussianKernel::constant(g.mean()[j], g.cov()[(j, j)].max(0.0), np)?.into())
        }
    }
}

fn independent_of_parents(c: &Cbn, law: &Distribution, j: usize, tol: &Tolerances) -> Result<bool> {
    ci_test(
        law,
        std::slice::from_ref(&c.vars()[j]),
        &c.parent_vars(j),
        &[],
        tol,
    )
}

/// The perfect intervention on the targets independent of their parents
/// together with the non-targeted non-source nodes independent of their
/// parents, with marginals matched to the law of `d_star`. Returns it with
/// that law, which the intervention admits under `P` but does not induce.
pub fn construct_intp_falsifier(
    c: &Cbn,
    d_star: &Intervention,
    tol: &Tolerances,
) -> Result<(Intervention, Distribution)> {
    let class = classify_intervention(c, d_star, tol)?;
    if !class.minimal || !class.decomposable {
        return Err(Error::Precondition(
            "intervention must be minimal and decomposable".into(),
        ));
    }
    let law = c.interventional(d_star)?;
    let mut chosen = Vec::new();
    let mut dependent_target = false;
    for i in 0..c.n() {
        let indep = independent_of_parents(c, &law, i, tol)?;
        let targeted = d_star.targets().contains_key(&i);
        if targeted && !indep {
            dependent_target = true;
        }
        if indep && (targeted || !c.dag().parents(i).is_empty()) {
            chosen.push(i);
        }
    }
    let any_indep_target = chosen.iter().any(|i| d_star.targets().contains_key(i));
    if !any_indep_target || !dependent_target {
        return Err(Error::Precondition(
            "needs one target independent of its parents and one dependent on them".into(),
        ));
    }
    let targets = chosen
        .iter()
        .map(|&i| Ok((i, constant_kernel(c, &law, i)?)))
        .collect::<Result<_>>()?;
    let d = Intervention::new(targets)?;
    c.register(&d, tol).map_err(|_| {
        Error::Precondition(
            "constructed intervention leaves the observational law unchanged".into(),
        )
    })?;
    Ok((d, law))
}

/// The restriction of `d_star` to node `j_prime`, or to its lowest target.
pub fn construct_ints_falsifier(
    c: &Cbn,
    d_star: &Intervention,
    j_prime: Option<usize>,
    tol: &Tolerances,
) -> Result<Intervention> {
    let class = classify_intervention(c, d_star, tol)?;
    if class.single_node || !class.minimal || !class.decomposable {
        return Err(Error::Precondition(
            "intervention must be multi-node, minimal and decomposable".into(),
        ));
    }
    let j = match j_prime {
        Some(j) if d_star.targets().contains_key(&j) => j,
        Some(j) => return Err(Error::Precondition(format!("node {j} is not a target"))),
        None => d_star.target_nodes()[0],
    };
    d_star.restrict(&[j])
}

/// Outcome of a falsification attempt.
#[derive(Debug, Clone)]
pub enum FalsifierOutcome {
    /// A constructed singleton set that falsifies the model.
    Constructed {
        action: String,
        set: InterventionSet,
        report: ValidityReport,
    },
    /// No falsifier can exist; the reason says why.
    Impossible(String),
    /// Exhaustive search over interventions derived from the actions.
    Searched {
        set: InterventionSet,
        report: ValidityReport,
    },
}

/// Tries the constructive falsifier matching `spec`, and otherwise
/// searches over the interventions implied by the actions.
pub fn find_falsifier(
    dgp: &Dgp,
    h: &RepresentationMap,
    c: &Cbn,
    spec: &InterpretationSpec,
    tol: &Tolerances,
) -> Result<FalsifierOutcome> {
    let laws = action_laws(dgp, h)?;
    let o = dgp.observational();
    if !c.is_compatible(&laws[o], tol)? {
        let set = InterventionSet::empty();
        let report = check_validity(dgp, h, c, &set, spec, tol)?;
        return Ok(FalsifierOutcome::Searched { set, report });
    }
    let mut derived: Vec<(usize, Intervention)> = Vec::new();
    for (a, law) in laws.iter().enumerate() {
        if a == o {
            continue;
        }
        if let Some(d) = derive_intervention(c, law, tol)? {
            derived.push((a, d.labeled(dgp.actions()[a].label.clone())));
        }
    }
    let label = |a: usize| dgp.actions()[a].label.clone();
    let constructed = |a: usize, d: Intervention| -> Result<FalsifierOutcome> {
        let set = InterventionSet::new(c, vec![d], tol)?;
        let report = check_validity(dgp, h, c, &set, spec, tol)?;
        Ok(FalsifierOutcome::Constructed {
            action: label(a),
            set,
            report,
        })
    };
    match spec {
        InterpretationSpec::C => {
            return Ok(FalsifierOutcome::Impossible(
                "the circular interpretation validates every compatible model".into(),
            ))
        }
        InterpretationSpec::P => {
            for (a, d) in &derived {
                if let Ok((f, _)) = construct_intp_falsifier(c, d, tol) {
                    return constructed(*a, f);
                }
            }
            if derived.iter().all(|(_, d)| d.is_perfect()) && all_markov(&laws, c, tol)? {
                return Ok(FalsifierOutcome::Impossible(
                    "every action is a perfect intervention in the model".into(),
                ));
            }
        }
        InterpretationSpec::S => {
            for (a, d) in &derived {
                if let Ok(f) = construct_ints_falsifier(c, d, None, tol) {
                    return constructed(*a, f);
                }
            }
            if derived.iter().all(|(_, d)| d.is_single_node()) && all_markov(&laws, c, tol)? {
                return Ok(FalsifierOutcome::Impossible(
                    "every action is a single-node intervention in the model".into(),
                ));
            }
        }
        InterpretationSpec::M => {
            for (a, law) in laws.iter().enumerate() {
                if !is_markov(law, c.dag(), tol)? {
                    let ks = crate::cbn::kernels_from_law(c, law, tol)?;
                    let d = Intervention::new(ks.into_iter().enumerate().collect())?;
                    if c.register(&d, tol).is_ok() {
                        return constructed(a, d);
                    }
                }
            }
            return Ok(FalsifierOutcome::Impossible(
                "every action law is Markov with respect to the graph".into(),
            ));
        }
        _ => {}
    }
    let mut items: Vec<Intervention> = Vec::new();
    for (_, d) in &derived {
        let nodes = d.target_nodes();
        for mask in 1u64..(1u64 << nodes.len()) {
            let sub: Vec<usize> = (0..nodes.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| nodes[b])
                .collect();
            let r = d.restrict(&sub)?;
            if !items.contains(&r) && c.register(&r, tol).is_ok() {
                items.push(r);
            }
        }
    }
    let set = InterventionSet::new(c, items, tol)?;
    let report = check_validity(dgp, h, c, &set, spec, tol)?;
    Ok(FalsifierOutcome::Searched { set, report })
}

fn all_markov(laws: &[Distribution], c: &Cbn, tol: &Tolerances) -> Result<bool> {
    for l in laws {
        if !is_markov(l, c.dag(), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhenoReport {
    pub valid: bool,
    pub markov: bool,
    /// Per node, the actions changing exactly that node's conditional.
    pub partition: Vec<(String, Vec<String>)>,
    /// Actions changing no conditional or more than one, with the changed
    /// nodes.
    pub misfits: Vec<(String, Vec<String>)>,
}

impl PhenoReport {
    pub fn reason(&self) -> Option<String> {
        if !self.markov {
            return Some("observational law not Markov w.r.t. the graph".into());
        }
        if let Some((a, ch)) = self.misfits.first() {
            return Some(format!("action `{a}` changes {} conditionals", ch.len()));
        }
        self.partition
            .iter()
            .find(|(_, acts)| acts.is_empty())
            .map(|(n, _)| format!("no action changes only the conditional of {n}"))
    }
}

/// Whether every non-observational action changes exactly one node's
/// conditional and every node is changed by some action.
pub fn check_pheno_validity(
    dgp: &Dgp,
    h: &RepresentationMap,
    g: &Dag,
    tol: &Tolerances,
) -> Result<PhenoReport> {
    let laws = action_laws(dgp, h)?;
    let o = dgp.observational();
    let vars = laws[o].vars().to_vec();
    if vars.len() != g.n() {
        return Err(Error::InvalidGraph(
            "graph size differs from the variable count".into(),
        ));
    }
    let markov = is_markov(&laws[o], g, tol)?;
    let kernels = (0..g.n())
        .map(|i| conditional_kernel_idx(&laws[o], i, g.parents(i), None, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut partition: Vec<(String, Vec<String>)> =
        vars.iter().map(|v| (v.name.clone(), vec![])).collect();
    let mut misfits = Vec::new();
    for (a, law) in laws.iter().enumerate() {
        if a == o {
            continue;
        }
        let mut changed = Vec::new();
        for (i, k) in kernels.iter().enumerate() {
            if !kernel_compatible_idx(law, i, g.parents(i), k, tol)? {
                changed.push(i);
            }
        }
        let label = dgp.actions()[a].label.clone();
        if changed.len() == 1 {
            partition[changed[0]].1.push(label);
        } else {
            misfits.push((
                label,
                changed.iter().map(|&i| vars[i].name.clone()).collect(),
            ));
        }
    }
    let valid = markov && misfits.is_empty() && partition.iter().all(|(_, a)| !a.is_empty());
    Ok(PhenoReport {
        valid,
        markov,
        partition,
        misfits,
    })
}
