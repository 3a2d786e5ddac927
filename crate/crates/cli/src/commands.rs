use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ivalid_core::abstraction::is_tau_abstraction_bounded;
use ivalid_core::scenario::{Resolved, BUILTIN};
use ivalid_core::validity::{find_falsifier, FalsifierOutcome};
use ivalid_core::{
    builtin_scenarios, check_validity, classify_intervention, emulate as emulate_dgp,
    interpret as interpret_dgp, parse_scenario, resolve, run_scenario, to_canonical, Cbn,
    InterventionSet, Tolerances, ValidityReport, Verdict,
};
use serde::Serialize;
use serde_json::json;

use crate::{load, Format, Status, Target};

fn print_json(v: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// The given id, or the only candidate when there is exactly one.
fn pick<'a>(
    given: Option<&str>,
    mut ids: impl Iterator<Item = &'a String>,
    what: &str,
    flag: &str,
) -> Result<String> {
    if let Some(g) = given {
        return Ok(g.to_string());
    }
    match (ids.next(), ids.next()) {
        (Some(one), None) => Ok(one.clone()),
        (None, _) => bail!("the scenario declares no {what}"),
        _ => bail!("several {what}s declared; choose one with {flag}"),
    }
}

struct Ctx {
    r: Resolved,
    dgp: String,
    repr: Option<String>,
}

fn context(t: &Target, tol: &Tolerances) -> Result<Ctx> {
    let r = resolve(&load(&t.scenario)?, tol)?;
    r.cbn(&t.cbn)?;
    let dgp = pick(t.dgp.as_deref(), r.dgps.keys(), "process", "--dgp")?;
    let repr = match &t.representation {
        Some(id) => Some(id.clone()),
        None => r.infer_representation(&dgp, &t.cbn)?,
    };
    Ok(Ctx { r, dgp, repr })
}

fn set_id(r: &Resolved, cbn: &str, given: Option<&str>) -> Result<String> {
    let ids = r.sets.iter().filter(|(_, s)| s.cbn == cbn).map(|(k, _)| k);
    pick(given, ids, &format!("intervention set of `{cbn}`"), "--set")
}

/// Scenario id of member `d` next to its rendering.
fn shown(c: &Cbn, set: &InterventionSet, ids: Option<&[String]>, d: usize) -> String {
    let desc = set.items()[d].describe(c);
    match ids.map(|ids| &ids[d]) {
        Some(id) if *id != desc => format!("{id}  {desc}"),
        _ => desc,
    }
}

fn shown_named(c: &Cbn, set: &InterventionSet, ids: Option<&[String]>, name: &str) -> String {
    match set.items().iter().position(|d| d.name(c) == name) {
        Some(d) => shown(c, set, ids, d),
        None => name.to_string(),
    }
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Valid => Status::Pass,
        Verdict::Falsified => Status::Fail,
    }
}

fn print_report(c: &Cbn, set: &InterventionSet, ids: Option<&[String]>, rep: &ValidityReport) {
    println!("verdict: {}", rep.verdict);
    println!("pairs checked: {} ({})", rep.pairs_checked, rep.scope_note);
    if rep.incompatible {
        println!("note: the network does not reproduce the observational law");
    }
    for w in &rep.warnings {
        println!("warning: {w}");
    }
    if rep.witnesses.is_empty() {
        return;
    }
    println!("witnesses:");
    let width = rep
        .witnesses
        .iter()
        .map(|w| w.action.len())
        .max()
        .unwrap_or(0);
    for w in &rep.witnesses {
        let d = shown_named(c, set, ids, &w.intervention);
        println!("  {:width$}  {d}  {}", w.action, w.divergence);
    }
}

pub fn validate(
    t: &Target,
    interp: &str,
    set: Option<&str>,
    tol: &Tolerances,
    fmt: Format,
) -> Result<Status> {
    let ctx = context(t, tol)?;
    let r = &ctx.r;
    let c = r.cbn(&t.cbn)?;
    let sid = set_id(r, &t.cbn, set)?;
    let s = r.set_in(&sid, &t.cbn)?;
    let spec = &r.interpretation(interp)?.spec;
    let dgp = r.dgp_for(&ctx.dgp, interp)?;
    let h = r.representation(ctx.repr.as_deref())?;
    let rep = check_validity(&dgp, &h, c, &s.set, spec, tol)?;
    match fmt {
        Format::Json => {
            let mut v = serde_json::to_value(&rep)?;
            for w in v["witnesses"].as_array_mut().into_iter().flatten() {
                let name = w["intervention"].as_str().unwrap_or_default();
                if let Some(d) = s.set.items().iter().position(|d| d.name(c) == name) {
                    w["intervention_id"] = json!(s.members[d]);
                }
            }
            print_json(&v)?
        }
        Format::Text => {
            println!(
                "{}: network `{}`, process `{}`{}, set `{sid}`, interpretation {interp}",
                r.id,
                t.cbn,
                ctx.dgp,
                ctx.repr
                    .as_ref()
                    .map(|x| format!(" through `{x}`"))
                    .unwrap_or_default()
            );
            print_report(c, &s.set, Some(&s.members), &rep);
        }
    }
    Ok(verdict_status(rep.verdict))
}

#[derive(Serialize)]
struct Excluded {
    intervention: String,
    reasons: Vec<String>,
}

#[derive(Serialize)]
struct Row {
    action: String,
    members: Vec<String>,
    excluded: Vec<Excluded>,
}

pub fn interpret(
    t: &Target,
    interp: &str,
    set: Option<&str>,
    action: Option<&str>,
    tol: &Tolerances,
    fmt: Format,
) -> Result<Status> {
    let ctx = context(t, tol)?;
    let r = &ctx.r;
    let c = r.cbn(&t.cbn)?;
    let sid = set_id(r, &t.cbn, set)?;
    let s = r.set_in(&sid, &t.cbn)?;
    let spec = &r.interpretation(interp)?.spec;
    let dgp = r.dgp_for(&ctx.dgp, interp)?;
    let h = r.representation(ctx.repr.as_deref())?;
    let res = interpret_dgp(spec, &dgp, &h, c, &s.set, tol)?;
    let picked: Vec<usize> = match action {
        Some(a) => vec![res
            .action_index(a)
            .ok_or_else(|| anyhow!("unknown action `{a}`"))?],
        None => (0..res.actions.len()).collect(),
    };
    let rows: Vec<Row> = picked
        .iter()
        .map(|&a| {
            let mut row = Row {
                action: res.actions[a].clone(),
                members: Vec::new(),
                excluded: Vec::new(),
            };
            for (d, m) in res.rows[a].iter().enumerate() {
                let name = res.interventions[d].clone();
                if m.member {
                    row.members.push(name);
                } else {
                    row.excluded.push(Excluded {
                        intervention: name,
                        reasons: m.failures.iter().map(|f| f.to_string()).collect(),
                    });
                }
            }
            row
        })
        .collect();
    match fmt {
        Format::Json => print_json(&json!({
            "interpretation": interp,
            "set": sid,
            "actions": rows,
            "warnings": res.warnings,
        }))?,
        Format::Text => {
            for w in &res.warnings {
                println!("warning: {w}");
            }
            for row in &rows {
                println!("action {}", row.action);
                if row.members.is_empty() && row.excluded.is_empty() {
                    println!("  (empty set)");
                }
                for m in &row.members {
                    println!("  + {}", shown_named(c, &s.set, Some(&s.members), m));
                }
                for e in &row.excluded {
                    println!(
                        "  - {}  excluded: {}",
                        shown_named(c, &s.set, Some(&s.members), &e.intervention),
                        e.reasons.join("; ")
                    );
                }
            }
        }
    }
    Ok(Status::Pass)
}

pub fn falsify(t: &Target, interp: &str, tol: &Tolerances, fmt: Format) -> Result<Status> {
    let ctx = context(t, tol)?;
    let r = &ctx.r;
    let c = r.cbn(&t.cbn)?;
    let spec = &r.interpretation(interp)?.spec;
    let dgp = r.dgp_for(&ctx.dgp, interp)?;
    let h = r.representation(ctx.repr.as_deref())?;
    let names =
        |s: &InterventionSet| -> Vec<String> { s.items().iter().map(|d| d.describe(c)).collect() };
    match find_falsifier(&dgp, &h, c, spec, tol)? {
        FalsifierOutcome::Impossible(why) => {
            match fmt {
                Format::Json => print_json(&json!({"outcome": "impossible", "reason": why}))?,
                Format::Text => println!("no falsifier: {why}"),
            }
            Ok(Status::Pass)
        }
        FalsifierOutcome::Constructed {
            action,
            set,
            report,
        } => {
            match fmt {
                Format::Json => print_json(&json!({
                    "outcome": "constructed",
                    "action": action,
                    "set": names(&set),
                    "report": report,
                }))?,
                Format::Text => {
                    println!(
                        "constructed from action `{action}`: I = {{{}}}",
                        names(&set).join(", ")
                    );
                    print_report(c, &set, None, &report);
                }
            }
            Ok(verdict_status(report.verdict))
        }
        FalsifierOutcome::Searched { set, report } => {
            match fmt {
                Format::Json => print_json(&json!({
                    "outcome": "searched",
                    "set": names(&set),
                    "report": report,
                }))?,
                Format::Text => {
                    println!(
                        "searched {} interventions derived from the actions",
                        set.len()
                    );
                    print_report(c, &set, None, &report);
                }
            }
            Ok(verdict_status(report.verdict))
        }
    }
}

pub fn classify(scenario: &str, id: &str, tol: &Tolerances, fmt: Format) -> Result<Status> {
    let r = resolve(&load(scenario)?, tol)?;
    let ri = r.intervention(id)?;
    let c = r.cbn(&ri.cbn)?;
    let class = classify_intervention(c, &ri.intervention, tol)?;
    let desc = ri.intervention.describe(c);
    match fmt {
        Format::Json => print_json(&json!({
            "intervention": id,
            "cbn": ri.cbn,
            "describe": desc,
            "summary": class.to_string(),
            "class": class,
        }))?,
        Format::Text => {
            println!("{id} in `{}`: {desc}", ri.cbn);
            println!("{class}");
            println!(
                "{}",
                if class.perfect {
                    "perfect"
                } else {
                    "imperfect"
                }
            );
        }
    }
    Ok(Status::Pass)
}

pub fn emulate(
    scenario: &str,
    order: &[String],
    dgp: Option<&str>,
    repr: Option<&str>,
    tol: &Tolerances,
    fmt: Format,
) -> Result<Status> {
    let r = resolve(&load(scenario)?, tol)?;
    let did = pick(dgp, r.dgps.keys(), "process", "--dgp")?;
    let d = r.dgp(&did)?;
    let order = r.var_ids(order)?;
    let repr = match repr {
        Some(x) => Some(x.to_string()),
        None if order.iter().all(|v| d.vars().contains(v)) => None,
        None => {
            let mut hits = r.representations.iter().filter(|(_, m)| {
                let outs = m.outputs(d.vars());
                outs.len() == order.len() && order.iter().all(|v| outs.contains(v))
            });
            match (hits.next(), hits.next()) {
                (Some((id, _)), None) => Some(id.clone()),
                _ => bail!("cannot tell which representation to emulate; pass --repr"),
            }
        }
    };
    let h = r.representation(repr.as_deref())?;
    let em = emulate_dgp(d, &h, &order, tol)?;
    let c = &em.cbn;
    let nodes: Vec<_> = (0..c.n())
        .map(|i| {
            let parents = c.parent_names(i);
            json!({
                "node": c.vars()[i].name,
                "parents": parents,
                "kernel": c.kernel(i).describe(&parents),
            })
        })
        .collect();
    let label = |a: usize| d.actions()[a].label.clone();
    let link: Vec<_> = em
        .link
        .iter()
        .map(|(a, iv)| json!({"action": label(a), "intervention": iv.describe(c)}))
        .collect();
    let unlinkable: Vec<String> = em.unlinkable.iter().map(|&a| label(a)).collect();
    match fmt {
        Format::Json => print_json(&json!({
            "nodes": nodes,
            "link": link,
            "unlinkable": unlinkable,
        }))?,
        Format::Text => {
            for v in &order {
                let i = c.node_index(v)?;
                let parents = c.parent_names(i);
                let given = if parents.is_empty() {
                    String::new()
                } else {
                    format!(" | {}", parents.join(", "))
                };
                println!(
                    "{}{given} ~ {}",
                    c.vars()[i].name,
                    c.kernel(i).describe(&parents)
                );
            }
            for (a, iv) in em.link.iter() {
                println!("{} -> {}", label(a), iv.describe(c));
            }
            for u in &unlinkable {
                println!("{u} -> (observational law, not linked)");
            }
        }
    }
    Ok(Status::Pass)
}

pub fn abstraction_check(
    scenario: &str,
    id: Option<&str>,
    tol: &Tolerances,
    fmt: Format,
) -> Result<Status> {
    let r = resolve(&load(scenario)?, tol)?;
    let ids: Vec<String> = match id {
        Some(x) => vec![x.to_string()],
        None => r.abstractions.keys().cloned().collect(),
    };
    if ids.is_empty() {
        bail!("the scenario declares no abstraction");
    }
    let mut all = true;
    let mut out = Vec::new();
    for id in &ids {
        let a = r.abstraction(id)?;
        let v = is_tau_abstraction_bounded(&a.low, &a.i_star, &a.high, &a.tau, a.bound)?;
        let tau_u_is_tau = v.tau_u.as_ref().map(|m| {
            m.iter()
                .all(|(u, img)| a.tau.apply(u).is_some_and(|t| t == img))
        });
        let images: Vec<_> = a
            .i_star
            .iter()
            .zip(&v.omegas)
            .map(|(d, o)| json!({"low": d.to_string(), "high": o.to_string()}))
            .collect();
        all &= v.holds;
        if fmt == Format::Text {
            let head = if v.holds { "holds" } else { "does not hold" };
            match &v.reason {
                Some(why) => println!("{id}: {head} ({why})"),
                None => println!("{id}: {head}"),
            }
            if let Some(same) = tau_u_is_tau {
                println!("  exogenous map equals tau: {same}");
            }
            for (d, o) in a.i_star.iter().zip(&v.omegas) {
                println!("  {d} -> {o}");
            }
        }
        out.push(json!({
            "abstraction": id,
            "holds": v.holds,
            "tau_u_is_tau": tau_u_is_tau,
            "images": images,
            "reason": v.reason,
        }));
    }
    if fmt == Format::Json {
        print_json(&out)?;
    }
    Ok(if all { Status::Pass } else { Status::Fail })
}

pub fn list(fmt: Format) -> Result<Status> {
    let all = builtin_scenarios();
    match fmt {
        Format::Json => print_json(
            &all.iter()
                .map(|s| json!({"id": s.id, "title": s.title}))
                .collect::<Vec<_>>(),
        )?,
        Format::Text => {
            let width = all.iter().map(|s| s.id.len()).max().unwrap_or(0);
            for s in &all {
                println!("{:width$}  {}", s.id, s.title);
            }
        }
    }
    Ok(Status::Pass)
}

pub fn run_scenarios(names: &[String], tol: &Tolerances, fmt: Format) -> Result<Status> {
    let names: Vec<String> = if names.is_empty() {
        BUILTIN.iter().map(|(id, _)| id.to_string()).collect()
    } else {
        names.to_vec()
    };
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for n in &names {
        match load(n).and_then(|s| Ok(run_scenario(&s, tol)?)) {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push((n.clone(), format!("{e:#}"))),
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let total = names.len();
    match fmt {
        Format::Json => print_json(&json!({
            "passed": passed,
            "total": total,
            "scenarios": reports,
            "errors": errors
                .iter()
                .map(|(n, e)| json!({"scenario": n, "error": e}))
                .collect::<Vec<_>>(),
        }))?,
        Format::Text => {
            for rep in &reports {
                println!("{:8} {}/{}", rep.id, rep.passed_count(), rep.outcomes.len());
                for o in rep.outcomes.iter().filter(|o| !o.passed) {
                    println!(
                        "  FAIL {}: expected {}, got {}",
                        o.claim, o.expected, o.actual
                    );
                }
            }
            for (n, e) in &errors {
                println!("{n:8} error: {e}");
            }
            println!("{passed}/{total} passed");
        }
    }
    if !errors.is_empty() {
        bail!("{} scenario(s) could not be evaluated", errors.len());
    }
    Ok(if passed == total {
        Status::Pass
    } else {
        Status::Fail
    })
}

pub fn fmt(file: &Path, check: bool) -> Result<Status> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let s = parse_scenario(&text).with_context(|| format!("in {}", file.display()))?;
    let canon = to_canonical(&s);
    if check {
        if canon == text {
            return Ok(Status::Pass);
        }
        eprintln!("{} is not in canonical form", file.display());
        return Ok(Status::Fail);
    }
    print!("{canon}");
    Ok(Status::Pass)
}
