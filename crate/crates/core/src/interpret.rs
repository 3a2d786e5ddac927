//! Interpretations of actions as interventions and checkers for the
//! desiderata D0 to D4.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cbn::{Cbn, Intervention, InterventionSet};
use crate::dgp::{action_laws, Dgp};
use crate::dist::ops::kernel_compatible_idx;
use crate::dist::{
    ci_test, equal, is_markov, marginal, Distribution, RepresentationMap, Tolerances,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum InterpretationSpec {
    /// Circular: every kernel matches and the law is Markov.
    C,
    /// Perfect interventions only.
    P,
    /// Intervened conditionals changed, non-intervened unconstrained.
    S,
    /// `C` without the Markov requirement.
    M,
    /// `C`, or the lowest-ranked member of `tilde` admitted by `S`.
    TildeIF {
        tilde: Vec<Intervention>,
        ranks: Vec<u64>,
    },
    /// The least complex actions among those `S` admits.
    K,
    /// `S` without the changed-conditional requirement. Debug only.
    STilde,
}

impl InterpretationSpec {
    pub fn tilde_if(tilde: Vec<Intervention>, ranks: Vec<u64>) -> Result<Self> {
        if tilde.len() != ranks.len() {
            return Err(Error::InvalidInterpretation(
                "one rank per intervention required".into(),
            ));
        }
        for i in 0..tilde.len() {
            for j in 0..i {
                if ranks[i] == ranks[j] {
                    return Err(Error::InvalidInterpretation(
                        "ranks must be injective".into(),
                    ));
                }
                if tilde[i] == tilde[j] {
                    return Err(Error::InvalidInterpretation(
                        "duplicate intervention in ranked set".into(),
                    ));
                }
            }
        }
        Ok(InterpretationSpec::TildeIF { tilde, ranks })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InterpretationSpec::C => "C",
            InterpretationSpec::P => "P",
            InterpretationSpec::S => "S",
            InterpretationSpec::M => "M",
            InterpretationSpec::TildeIF { .. } => "tilde-IF",
            InterpretationSpec::K => "K",
            InterpretationSpec::STilde => "S~",
        }
    }

    /// Whether the spec is one of the six that satisfy D0 by definition.
    pub fn is_public(&self) -> bool {
        !matches!(self, InterpretationSpec::STilde)
    }
}

/// A failed defining condition for one (action, intervention) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "at", rename_all = "snake_case")]
pub enum Failure {
    NotPerfect,
    IntervenedMismatch(String),
    NonIntervenedMismatch(String),
    SourceMarginalChanged(String),
    IndependentOfParents(String),
    ObservationalKernelFits(String),
    NotMarkov,
    NotInRankedSet,
    OutrankedBy(String),
    NotLeastComplex(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NotPerfect => write!(f, "intervention is not perfect"),
            Failure::IntervenedMismatch(v) => write!(f, "intervened kernel mismatch at {v}"),
            Failure::NonIntervenedMismatch(v) => write!(f, "non-intervened kernel mismatch at {v}"),
            Failure::SourceMarginalChanged(v) => write!(f, "source marginal changed at {v}"),
            Failure::IndependentOfParents(v) => write!(f, "{v} independent of its parents"),
            Failure::ObservationalKernelFits(v) => {
                write!(f, "observational kernel still fits at {v}")
            }
            Failure::NotMarkov => write!(f, "law not Markov w.r.t. the graph"),
            Failure::NotInRankedSet => write!(f, "not in the ranked set"),
            Failure::OutrankedBy(d) => write!(f, "outranked by {d}"),
            Failure::NotLeastComplex(a) => write!(f, "action `{a}` is less complex"),
        }
    }
}

/// Membership of one intervention in one action's row, with every failed
/// condition in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub failures: Vec<Failure>,
}

impl Membership {
    fn from_failures(failures: Vec<Failure>) -> Self {
        Membership {
            member: failures.is_empty(),
            failures,
        }
    }

    /// First failed condition.
    pub fn reason(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

#[derive(Debug, Clone)]
pub struct InterpretationResult {
    pub actions: Vec<String>,
    pub interventions: Vec<String>,
    /// `rows[a][d]`.
    pub rows: Vec<Vec<Membership>>,
    pub warnings: Vec<String>,
}

impl InterpretationResult {
    pub fn contains(&self, a: usize, d: usize) -> bool {
        self.rows[a][d].member
    }

    /// Indices of interventions assigned to action `a`.
    pub fn row(&self, a: usize) -> Vec<usize> {
        (0..self.interventions.len())
            .filter(|&d| self.rows[a][d].member)
            .collect()
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }
}

/// Per-action facts shared by every interpretation.
struct Prepared {
    laws: Vec<Distribution>,
    markov: Vec<bool>,
    /// `obs_fit[a][i]`: the observational kernel of node i fits under a.
    obs_fit: Vec<Vec<bool>>,
    /// Per action and node: source marginal unchanged, or dependent on
    /// parents.
    p_ok: Vec<Vec<bool>>,
    /// `fits[a][d][j]` for each target j of d, in target order.
    fits: Vec<Vec<Vec<bool>>>,
}

fn prepare(
    dgp: &Dgp,
    h: &RepresentationMap,
    c: &Cbn,
    set: &InterventionSet,
    need_p: bool,
    tol: &Tolerances,
) -> Result<Prepared> {
    let laws = action_laws(dgp, h)?;
    if laws[0].vars() != c.vars() {
        return Err(Error::VarMismatch(
            "representation variables differ from the network's".into(),
        ));
    }
    if !c.is_compatible(&laws[dgp.observational()], tol)? {
        return Err(Error::Precondition(
            "network is not compatible with the observational law".into(),
        ));
    }
    let obs = c.observational();
    let n = c.n();
    let mut markov = Vec::new();
    let mut obs_fit = Vec::new();
    let mut p_ok = Vec::new();
    let mut fits = Vec::new();
    for law in &laws {
        markov.push(is_markov(law, c.dag(), tol)?);
        let mut of = Vec::with_capacity(n);
        for i in 0..n {
            of.push(kernel_compatible_idx(
                law,
                i,
                c.dag().parents(i),
                c.kernel(i),
                tol,
            )?);
        }
        obs_fit.push(of);
        let mut po = Vec::with_capacity(n);
        if need_p {
            for i in 0..n {
                let v = std::slice::from_ref(&c.vars()[i]);
                let ok = if c.dag().parents(i).is_empty() {
                    equal(&marginal(law, v)?, &marginal(&obs, v)?, tol)?
                } else {
                    !ci_test(law, v, &c.parent_vars(i), &[], tol)?
                };
                po.push(ok);
            }
        }
        p_ok.push(po);
        let mut fa = Vec::with_capacity(set.len());
        for d in set.items() {
            let mut fd = Vec::new();
            for (&j, q) in d.targets() {
                fd.push(kernel_compatible_idx(law, j, c.dag().parents(j), q, tol)?);
            }
            fa.push(fd);
        }
        fits.push(fa);
    }
    Ok(Prepared {
        laws,
        markov,
        obs_fit,
        p_ok,
        fits,
    })
}

#[derive(Clone, Copy)]
struct Conds {
    perfect: bool,
    intervened: bool,
    non_intervened: bool,
    p_rule: bool,
    changed: bool,
    markov: bool,
}

fn evaluate(
    p: &Prepared,
    c: &Cbn,
    a: usize,
    di: usize,
    d: &Intervention,
    k: Conds,
) -> Vec<Failure> {
    let name = |i: usize| c.vars()[i].name.clone();
    let mut out = Vec::new();
    if k.perfect && !d.is_perfect() {
        out.push(Failure::NotPerfect);
    }
    if k.intervened {
        for (t, &j) in d.targets().keys().enumerate() {
            if !p.fits[a][di][t] {
                out.push(Failure::IntervenedMismatch(name(j)));
            }
        }
    }
    if k.changed {
        for &j in d.targets().keys() {
            if p.obs_fit[a][j] {
                out.push(Failure::ObservationalKernelFits(name(j)));
            }
        }
    }
    for i in 0..c.n() {
        if d.targets().contains_key(&i) {
            continue;
        }
        if k.non_intervened && !p.obs_fit[a][i] {
            out.push(Failure::NonIntervenedMismatch(name(i)));
        }
        if k.p_rule && !p.p_ok[a][i] {
            out.push(if c.dag().parents(i).is_empty() {
                Failure::SourceMarginalChanged(name(i))
            } else {
                Failure::IndependentOfParents(name(i))
            });
        }
    }
    if k.markov && !p.markov[a] {
        out.push(Failure::NotMarkov);
    }
    out
}

const NONE: Conds = Conds {
    perfect: false,
    intervened: true,
    non_intervened: false,
    p_rule: false,
    changed: false,
    markov: false,
};

fn conds(spec: &InterpretationSpec) -> Conds {
    match spec {
        InterpretationSpec::C => Conds {
            non_intervened: true,
            markov: true,
            ..NONE
        },
        InterpretationSpec::M => Conds {
            non_intervened: true,
            ..NONE
        },
        InterpretationSpec::P => Conds {
            perfect: true,
            p_rule: true,
            markov: true,
            ..NONE
        },
        InterpretationSpec::S | InterpretationSpec::K | InterpretationSpec::TildeIF { .. } => {
            Conds {
                changed: true,
                markov: true,
                ..NONE
            }
        }
        InterpretationSpec::STilde => Conds {
            markov: true,
            ..NONE
        },
    }
}

fn matrix(p: &Prepared, c: &Cbn, set: &InterventionSet, k: Conds) -> Vec<Vec<Vec<Failure>>> {
    (0..p.laws.len())
        .map(|a| {
            set.items()
                .iter()
                .enumerate()
                .map(|(di, d)| evaluate(p, c, a, di, d, k))
                .collect()
        })
        .collect()
}

/// Assigns to every action the interventions of `set` that `spec` deems
/// it to implement.
pub fn interpret(
    spec: &InterpretationSpec,
    dgp: &Dgp,
    h: &RepresentationMap,
    c: &Cbn,
    set: &InterventionSet,
    tol: &Tolerances,
) -> Result<InterpretationResult> {
    if let InterpretationSpec::TildeIF { tilde, ranks } = spec {
        InterpretationSpec::tilde_if(tilde.clone(), ranks.clone())?;
    }
    let complexity = match spec {
        InterpretationSpec::K => Some(dgp.complexity_values().map_err(|_| {
            Error::InvalidInterpretation("K requires a complexity for every action".into())
        })?),
        _ => None,
    };
    let p = prepare(dgp, h, c, set, matches!(spec, InterpretationSpec::P), tol)?;
    let mut warnings = Vec::new();
    let base = matrix(&p, c, set, conds(spec));
    let rows: Vec<Vec<Membership>> = match spec {
        InterpretationSpec::K => {
            let kv = complexity.expect("set above");
            let mut rows: Vec<Vec<Membership>> = base
                .into_iter()
                .map(|r| r.into_iter().map(Membership::from_failures).collect())
                .collect();
            for d in 0..set.len() {
                let cands: Vec<usize> = (0..rows.len()).filter(|&a| rows[a][d].member).collect();
                let Some(&best) = cands.iter().min_by(|&&x, &&y| kv[x].total_cmp(&kv[y])) else {
                    continue;
                };
                let min = kv[best];
                if min.is_infinite() {
                    warnings.push(format!(
                        "every candidate for {} has infinite complexity",
                        set.items()[d].name(c)
                    ));
                    continue;
                }
                let slack = tol.eq_tol * min.abs().max(1.0);
                for &a in &cands {
                    if kv[a] > min + slack {
                        rows[a][d] = Membership::from_failures(vec![Failure::NotLeastComplex(
                            dgp.actions()[best].label.clone(),
                        )]);
                    }
                }
            }
            rows
        }
        InterpretationSpec::TildeIF { tilde, ranks } => {
            let circ = matrix(&p, c, set, conds(&InterpretationSpec::C));
            let rank: Vec<Option<u64>> = set
                .items()
                .iter()
                .map(|d| tilde.iter().position(|t| t == d).map(|k| ranks[k]))
                .collect();
            circ.into_iter()
                .zip(base)
                .map(|(cr, sr)| {
                    (0..set.len())
                        .map(|d| {
                            if cr[d].is_empty() {
                                return Membership::from_failures(vec![]);
                            }
                            let mut f = Vec::new();
                            match rank[d] {
                                None => f.push(Failure::NotInRankedSet),
                                Some(r) if sr[d].is_empty() => {
                                    if let Some(b) = (0..set.len()).find(|&b| {
                                        b != d
                                            && sr[b].is_empty()
                                            && rank[b].is_some_and(|rb| rb <= r)
                                    }) {
                                        f.push(Failure::OutrankedBy(set.items()[b].name(c)));
                                    } else {
                                        return Membership::from_failures(vec![]);
                                    }
                                }
                                Some(_) => f.extend(sr[d].iter().cloned()),
                            }
                            f.extend(cr[d].iter().cloned());
                            Membership {
                                member: false,
                                failures: f,
                            }
                        })
                        .collect()
                })
                .collect()
        }
        _ => base
            .into_iter()
            .map(|r| r.into_iter().map(Membership::from_failures).collect())
            .collect(),
    };
    Ok(InterpretationResult {
        actions: dgp.actions().iter().map(|a| a.label.clone()).collect(),
        interventions: set.items().iter().map(|d| d.name(c)).collect(),
        rows,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Desideratum {
    D0,
    D1,
    D2,
    D3,
    D4,
}

impl Desideratum {
    pub const ALL: [Desideratum; 5] = [
        Desideratum::D0,
        Desideratum::D1,
        Desideratum::D2,
        Desideratum::D3,
        Desideratum::D4,
    ];
}

impl fmt::Display for Desideratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Concrete instance violating a desideratum. `set` indexes the family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesiderataWitness {
    pub action: String,
    pub intervention: String,
    pub other: Option<String>,
    pub set: usize,
    pub other_set: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesideratumReport {
    pub which: Desideratum,
    pub holds: bool,
    pub witness: Option<DesiderataWitness>,
}

impl DesideratumReport {
    fn verdict(which: Desideratum, witness: Option<DesiderataWitness>) -> Self {
        DesideratumReport {
            which,
            holds: witness.is_none(),
            witness,
        }
    }
}

/// Checks one desideratum on every action of `dgp` and every set of
/// `family`. Holding means holding on these instances only.
pub fn check_desideratum(
    which: Desideratum,
    spec: &InterpretationSpec,
    dgp: &Dgp,
    h: &RepresentationMap,
    c: &Cbn,
    family: &[InterventionSet],
    tol: &Tolerances,
) -> Result<DesideratumReport> {
    if family.is_empty() {
        return Err(Error::Precondition("empty intervention-set family".into()));
    }
    let laws = action_laws(dgp, h)?;
    let results = family
        .iter()
        .map(|s| interpret(spec, dgp, h, c, s, tol))
        .collect::<Result<Vec<_>>>()?;
    let label = |a: usize| dgp.actions()[a].label.clone();
    let w = |a: usize, s: usize, d: &Intervention, detail: String| DesiderataWitness {
        action: label(a),
        intervention: d.name(c),
        other: None,
        set: s,
        other_set: None,
        detail,
    };
    for (s, (set, res)) in family.iter().zip(&results).enumerate() {
        for (a, law) in laws.iter().enumerate() {
            match which {
                Desideratum::D0 => {
                    for d in res.row(a) {
                        let item = &set.items()[d];
                        for (&j, q) in item.targets() {
                            if !kernel_compatible_idx(law, j, c.dag().parents(j), q, tol)? {
                                return Ok(DesideratumReport::verdict(
                                    which,
                                    Some(w(
                                        a,
                                        s,
                                        item,
                                        format!("conditional of {} does not match", c.vars()[j]),
                                    )),
                                ));
                            }
                        }
                    }
                }
                Desideratum::D1 => {
                    for (d, item) in set.items().iter().enumerate() {
                        if !res.contains(a, d) && equal(law, &set.laws()[d], tol)? {
                            return Ok(DesideratumReport::verdict(
                                which,
                                Some(w(a, s, item, "laws equal but not assigned".into())),
                            ));
                        }
                    }
                }
                Desideratum::D2 => {
                    let row = res.row(a);
                    for (x, &d) in row.iter().enumerate() {
                        for &b in &row[x + 1..] {
                            if !equal(&set.laws()[d], &set.laws()[b], tol)? {
                                let mut wit = w(
                                    a,
                                    s,
                                    &set.items()[d],
                                    "assigned interventions induce different laws".into(),
                                );
                                wit.other = Some(set.items()[b].name(c));
                                return Ok(DesideratumReport::verdict(which, Some(wit)));
                            }
                        }
                    }
                }
                Desideratum::D3 => {
                    for (s2, (set2, res2)) in family.iter().zip(&results).enumerate().skip(s + 1) {
                        for (d, item) in set.items().iter().enumerate() {
                            let Some(d2) = set2.position(item) else {
                                continue;
                            };
                            if res.contains(a, d) != res2.contains(a, d2) {
                                let mut wit = w(
                                    a,
                                    s,
                                    item,
                                    format!(
                                        "assigned in set {} but not in set {}",
                                        if res.contains(a, d) { s } else { s2 },
                                        if res.contains(a, d) { s2 } else { s }
                                    ),
                                );
                                wit.other_set = Some(s2);
                                return Ok(DesideratumReport::verdict(which, Some(wit)));
                            }
                        }
                    }
                }
                Desideratum::D4 => {
                    if let Some(&d) = res.row(a).first() {
                        if !is_markov(law, c.dag(), tol)? {
                            return Ok(DesideratumReport::verdict(
                                which,
                                Some(w(
                                    a,
                                    s,
                                    &set.items()[d],
                                    "law not Markov but assigned".into(),
                                )),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(DesideratumReport::verdict(which, None))
}
