//! Evaluates every expectation of a scenario against the engine.

use serde::Serialize;

use super::format::*;
use super::resolve::{functional, hard_intervention, resolve, Resolved};
use crate::abstraction::{is_tau_abstraction_bounded, omega_tau};
use crate::cbn::{classify_intervention, Cbn};
use crate::dgp::{action_laws, derive_intervention};
use crate::dist::{
    ci_test, conditional_cross_covariance, expectation, expectation_exact, is_markov, probability,
    Distribution, Tolerances,
};
use crate::error::{Error, Result};
use crate::interpret::{check_desideratum, interpret};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::validity::{check_pheno_validity, check_validity};

/// One evaluated expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub claim: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub id: String,
    pub outcomes: Vec<Outcome>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed).count()
    }
}

/// Resolves `s` and evaluates each expectation in file order.
pub fn run_scenario(s: &Scenario, tol: &Tolerances) -> Result<ScenarioReport> {
    let r = resolve(s, tol)?;
    let outcomes = s
        .expectations
        .iter()
        .enumerate()
        .map(|(k, e)| {
            evaluate(&r, &e.claim, tol)
                .map_err(|err| Error::Scenario(format!("expectation {}: {err}", k + 1)))
        })
        .collect::<Result<_>>()?;
    Ok(ScenarioReport {
        id: s.id.clone(),
        outcomes,
    })
}

fn outcome(claim: String, expected: String, actual: String, passed: bool) -> Outcome {
    Outcome {
        claim,
        expected,
        actual,
        passed,
    }
}

fn bool_outcome(claim: String, expected: bool, actual: bool) -> Outcome {
    outcome(
        claim,
        expected.to_string(),
        actual.to_string(),
        expected == actual,
    )
}

fn view(rep: &Option<String>) -> String {
    rep.as_ref()
        .map(|r| format!(" via {r}"))
        .unwrap_or_default()
}

/// A computed number: exact for finite laws, floating for Gaussian ones.
enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    fn show(&self) -> String {
        match self {
            Value::Exact(r) => format_rational(r),
            Value::Approx(x) => format!("{x}"),
        }
    }

    /// Exact comparison when both sides are exact, else relative
    /// tolerance `eq_tol·max(1, |expected|)`.
    fn matches(&self, want: &Number, tol: &Tolerances) -> Result<bool> {
        let want_f = match want {
            Number::Exact(s) => {
                let w = parse_rational(s)?;
                if let Value::Exact(v) = self {
                    return Ok(*v == w);
                }
                to_f64(&w)
            }
            Number::Approx(x) => *x,
        };
        let got = match self {
            Value::Exact(v) => to_f64(v),
            Value::Approx(x) => *x,
        };
        Ok((got - want_f).abs() <= tol.eq_tol * want_f.abs().max(1.0))
    }
}

fn show_number(n: &Number) -> String {
    match n {
        Number::Exact(s) => s.clone(),
        Number::Approx(x) => format!("{x}"),
    }
}

fn source_law(r: &Resolved, s: &Source) -> Result<(Distribution, String)> {
    match s {
        Source::Action {
            dgp,
            representation,
            action,
        } => {
            let d = r.dgp(dgp)?;
            let h = r.representation(representation.as_deref())?;
            let a = d.action_index(action)?;
            let law = action_laws(d, &h)?.swap_remove(a);
            Ok((law, format!("{dgp}:{action}{}", view(representation))))
        }
        Source::Model { cbn, intervention } => {
            let c = r.cbn(cbn)?;
            match intervention {
                None => Ok((c.observational(), cbn.to_string())),
                Some(i) => {
                    let d = r.intervention_in(i, cbn)?;
                    Ok((c.interventional(d)?, format!("{cbn};{}", d.name(c))))
                }
            }
        }
    }
}

fn names(r: &Resolved, law: &Distribution, list: &[String]) -> Result<Vec<crate::var::VarId>> {
    let ids = r.var_ids(list)?;
    for v in &ids {
        if !law.vars().contains(v) {
            return Err(Error::UnknownVar(v.name.clone()));
        }
    }
    Ok(ids)
}

fn intervention_name(r: &Resolved, c: &Cbn, cbn: &str, id: &str) -> Result<String> {
    Ok(r.intervention_in(id, cbn)?.name(c))
}

fn evaluate(r: &Resolved, claim: &Claim, tol: &Tolerances) -> Result<Outcome> {
    match claim {
        Claim::Validity {
            dgp,
            representation,
            cbn,
            set,
            interpretation,
            verdict,
            witnesses,
        } => {
            let c = r.cbn(cbn)?;
            let d = r.dgp_for(dgp, interpretation)?;
            let h = r.representation(representation.as_deref())?;
            let s = r.set_in(set, cbn)?;
            let spec = &r.interpretation(interpretation)?.spec;
            let rep = check_validity(&d, &h, c, &s.set, spec, tol)?;
            let mut missing = Vec::new();
            for w in witnesses {
                d.action_index(&w.action)?;
                let name = intervention_name(r, c, cbn, &w.intervention)?;
                if !rep
                    .witnesses
                    .iter()
                    .any(|x| x.action == w.action && x.intervention == name)
                {
                    missing.push(format!("({}, {name})", w.action));
                }
            }
            let mut expected = verdict.to_string();
            for w in witnesses {
                expected.push_str(&format!(" with ({}, {})", w.action, w.intervention));
            }
            let found: Vec<String> = rep
                .witnesses
                .iter()
                .map(|w| format!("({}, {})", w.action, w.intervention))
                .collect();
            let mut actual = rep.verdict.to_string();
            if !found.is_empty() {
                actual.push_str(&format!(" [{}]", found.join(", ")));
            }
            Ok(outcome(
                format!(
                    "validity of {cbn} for {dgp}{} under {interpretation}, set {set}",
                    view(representation)
                ),
                expected,
                actual,
                rep.verdict == *verdict && missing.is_empty(),
            ))
        }
        Claim::Membership {
            dgp,
            representation,
            cbn,
            set,
            interpretation,
            action,
            intervention,
            member,
            reason,
        } => {
            let c = r.cbn(cbn)?;
            let d = r.dgp_for(dgp, interpretation)?;
            let h = r.representation(representation.as_deref())?;
            let s = r.set_in(set, cbn)?;
            let spec = &r.interpretation(interpretation)?.spec;
            let res = interpret(spec, &d, &h, c, &s.set, tol)?;
            let a = d.action_index(action)?;
            let iv = r.intervention_in(intervention, cbn)?;
            let k = s.set.position(iv).ok_or_else(|| {
                Error::Scenario(format!("`{intervention}` is not in set `{set}`"))
            })?;
            let m = &res.rows[a][k];
            let got_reason = m.reason().map(|f| f.to_string());
            let reason_ok = reason.is_none() || *reason == got_reason;
            let show = |mem: bool, why: &Option<String>| match why {
                Some(w) => format!("{mem} ({w})"),
                None => mem.to_string(),
            };
            Ok(outcome(
                format!(
                    "{} in the {interpretation} row of {action} ({cbn}{})",
                    iv.name(c),
                    view(representation)
                ),
                show(*member, reason),
                show(m.member, &got_reason),
                m.member == *member && reason_ok,
            ))
        }
        Claim::Expectation {
            source,
            functional: f,
            value,
        } => {
            let (law, label) = source_law(r, source)?;
            let func = functional(r, f)?;
            let got = match &law {
                Distribution::Finite(fd) => Value::Exact(expectation_exact(fd, &func)?),
                Distribution::Gaussian(_) => Value::Approx(expectation(&law, &func)?),
            };
            let terms: Vec<String> = f
                .terms
                .iter()
                .map(|(v, c)| {
                    if c == "1" {
                        v.clone()
                    } else {
                        format!("{c}·{v}")
                    }
                })
                .collect();
            Ok(outcome(
                format!("E[{}] under {label}", terms.join(" + ")),
                show_number(value),
                got.show(),
                got.matches(value, tol)?,
            ))
        }
        Claim::Probability {
            source,
            event,
            value,
        } => {
            let (law, label) = source_law(r, source)?;
            let ev = event
                .iter()
                .map(|(n, v)| Ok((r.var(n)?.id.clone(), *v)))
                .collect::<Result<Vec<_>>>()?;
            let got = Value::Exact(probability(law.as_finite()?, &ev)?);
            let shown: Vec<String> = event.iter().map(|(n, v)| format!("{n}={v}")).collect();
            Ok(outcome(
                format!("P({}) under {label}", shown.join(", ")),
                show_number(value),
                got.show(),
                got.matches(value, tol)?,
            ))
        }
        Claim::Compatible {
            dgp,
            representation,
            cbn,
            compatible,
        } => {
            let d = r.dgp(dgp)?;
            let h = r.representation(representation.as_deref())?;
            let laws = action_laws(d, &h)?;
            let got = r.cbn(cbn)?.is_compatible(&laws[d.observational()], tol)?;
            Ok(bool_outcome(
                format!("{cbn} compatible with {dgp}{}", view(representation)),
                *compatible,
                got,
            ))
        }
        Claim::Desideratum {
            dgp,
            representation,
            cbn,
            interpretation,
            family,
            which,
            holds,
        } => {
            let c = r.cbn(cbn)?;
            let d = r.dgp_for(dgp, interpretation)?;
            let h = r.representation(representation.as_deref())?;
            let sets = family
                .iter()
                .map(|s| Ok(r.set_in(s, cbn)?.set.clone()))
                .collect::<Result<Vec<_>>>()?;
            let spec = &r.interpretation(interpretation)?.spec;
            let rep = check_desideratum(*which, spec, &d, &h, c, &sets, tol)?;
            let mut actual = rep.holds.to_string();
            if let Some(w) = &rep.witness {
                actual.push_str(&format!(" ({}: {})", w.action, w.detail));
            }
            Ok(outcome(
                format!(
                    "{which} for {interpretation} on {cbn} over [{}]",
                    family.join(", ")
                ),
                holds.to_string(),
                actual,
                rep.holds == *holds,
            ))
        }
        Claim::Independence {
            source,
            x,
            y,
            given,
            independent,
            cross_cov,
        } => {
            let (law, label) = source_law(r, source)?;
            let xs = names(r, &law, x)?;
            let ys = names(r, &law, y)?;
            let zs = names(r, &law, given)?;
            let got = ci_test(&law, &xs, &ys, &zs, tol)?;
            let mut passed = got == *independent;
            let mut expected = independent.to_string();
            let mut actual = got.to_string();
            if let Some(want) = cross_cov {
                let m = conditional_cross_covariance(&law, &xs, &ys, &zs, tol)?;
                let mag = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                passed &= Value::Approx(mag).matches(want, tol)?;
                expected.push_str(&format!(", cross-cov {}", show_number(want)));
                actual.push_str(&format!(", cross-cov {mag}"));
            }
            let cond = if given.is_empty() {
                String::new()
            } else {
                format!(" | {}", given.join(","))
            };
            Ok(outcome(
                format!("{} ⊥ {}{cond} under {label}", x.join(","), y.join(",")),
                expected,
                actual,
                passed,
            ))
        }
        Claim::Markov {
            source,
            cbn,
            markov,
        } => {
            let (law, label) = source_law(r, source)?;
            let got = is_markov(&law, r.cbn(cbn)?.dag(), tol)?;
            Ok(bool_outcome(
                format!("law under {label} Markov w.r.t. the graph of {cbn}"),
                *markov,
                got,
            ))
        }
        Claim::Pheno {
            dgp,
            representation,
            cbn,
            valid,
        } => {
            let d = r.dgp(dgp)?;
            let h = r.representation(representation.as_deref())?;
            let rep = check_pheno_validity(d, &h, r.cbn(cbn)?.dag(), tol)?;
            let mut actual = rep.valid.to_string();
            if let Some(why) = rep.reason() {
                actual.push_str(&format!(" ({why})"));
            }
            Ok(outcome(
                format!("graph of {cbn} phenomenologically valid for {dgp}"),
                valid.to_string(),
                actual,
                rep.valid == *valid,
            ))
        }
        Claim::Classify {
            cbn,
            intervention,
            class,
            perfect,
        } => {
            let c = r.cbn(cbn)?;
            let d = r.intervention_in(intervention, cbn)?;
            let k = classify_intervention(c, d, tol)?;
            let show = |cl: &str, p: bool| format!("{cl}{}", if p { ", perfect" } else { "" });
            Ok(outcome(
                format!("class of {} in {cbn}", d.name(c)),
                show(class, *perfect),
                show(&k.to_string(), k.perfect),
                k.to_string() == *class && k.perfect == *perfect,
            ))
        }
        Claim::TauAbstraction {
            abstraction,
            holds,
            tau_u_is_tau,
        } => {
            let a = r.abstraction(abstraction)?;
            let v = is_tau_abstraction_bounded(&a.low, &a.i_star, &a.high, &a.tau, a.bound)?;
            let same = v.tau_u.as_ref().map(|m| {
                m.iter()
                    .all(|(u, img)| a.tau.apply(u).is_some_and(|t| t == img))
            });
            let mut passed = v.holds == *holds;
            let mut expected = holds.to_string();
            let mut actual = v.holds.to_string();
            if let Some(want) = tau_u_is_tau {
                passed &= same == Some(*want);
                expected.push_str(&format!(", exogenous map is tau: {want}"));
                actual.push_str(&format!(
                    ", exogenous map is tau: {}",
                    same.map(|b| b.to_string()).unwrap_or("none".into())
                ));
            }
            if let Some(why) = &v.reason {
                actual.push_str(&format!(" ({why})"));
            }
            Ok(outcome(
                format!("tau-abstraction {abstraction}"),
                expected,
                actual,
                passed,
            ))
        }
        Claim::Omega {
            abstraction,
            intervention,
            image,
        } => {
            let a = r.abstraction(abstraction)?;
            let d = hard_intervention(&a.low, intervention)?;
            let got = omega_tau(&a.tau, &a.low, &a.high, &d)?.to_string();
            Ok(outcome(
                format!("image of {d} in {abstraction}"),
                image.clone(),
                got.clone(),
                got == *image,
            ))
        }
        Claim::LinkTargets {
            dgp,
            representation,
            action,
            cbn,
            targets,
        } => {
            let c = r.cbn(cbn)?;
            let d = r.dgp(dgp)?;
            let h = r.representation(representation.as_deref())?;
            let a = d.action_index(action)?;
            let law = action_laws(d, &h)?.swap_remove(a);
            let got: Vec<String> = match derive_intervention(c, &law, tol)? {
                Some(iv) => iv
                    .target_nodes()
                    .into_iter()
                    .map(|j| c.vars()[j].name.clone())
                    .collect(),
                None => Vec::new(),
            };
            Ok(outcome(
                format!("targets of the intervention in {cbn} implied by {action}"),
                format!("[{}]", targets.join(", ")),
                format!("[{}]", got.join(", ")),
                got == *targets,
            ))
        }
    }
}
