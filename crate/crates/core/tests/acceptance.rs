//! Acceptance criteria 1 to 12 at the pinned tolerance (eq_tol = 1e-9).
//! Prints one PASS/FAIL line per criterion and fails if any criterion does.

mod common;

use std::io::Write;

use ivalid_core::abstraction::is_tau_abstraction_bounded;
use ivalid_core::dgp::action_laws;
use ivalid_core::dist::{
    conditional_cross_covariance, expectation, probability, Distribution, Functional,
};
use ivalid_core::interpret::{check_desideratum, interpret, Desideratum, InterpretationSpec};
use ivalid_core::rational::{format_rational, rat};
use ivalid_core::scenario::{builtin_scenario, resolve, Resolved};
use ivalid_core::validity::{check_pheno_validity, check_validity, Divergence, ValidityReport};
use ivalid_core::{Rational, Tolerances, Verdict};

const EQ_TOL: f64 = 1e-9;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn fixture(id: &str) -> Resolved {
    resolve(&builtin_scenario(id).expect("builtin"), &tol()).expect("resolves")
}

type Check = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

struct Q<'a> {
    r: &'a Resolved,
    dgp: &'a str,
    repr: Option<&'a str>,
    cbn: &'a str,
}

impl Q<'_> {
    fn validity(&self, set: &str, interp: &str) -> Result<ValidityReport, String> {
        let r = self.r;
        e(check_validity(
            &e(r.dgp_for(self.dgp, interp))?,
            &e(r.representation(self.repr))?,
            e(r.cbn(self.cbn))?,
            &e(r.set_in(set, self.cbn))?.set,
            &e(r.interpretation(interp))?.spec,
            &tol(),
        ))
    }

    fn member(&self, set: &str, interp: &str, action: &str, iv: &str) -> Result<bool, String> {
        let r = self.r;
        let s = e(r.set_in(set, self.cbn))?;
        let res = e(interpret(
            &e(r.interpretation(interp))?.spec,
            &e(r.dgp_for(self.dgp, interp))?,
            &e(r.representation(self.repr))?,
            e(r.cbn(self.cbn))?,
            &s.set,
            &tol(),
        ))?;
        let a = res.action_index(action).ok_or("unknown action")?;
        let d = s
            .members
            .iter()
            .position(|m| m == iv)
            .ok_or("unknown member")?;
        Ok(res.contains(a, d))
    }

    fn action_law(&self, action: &str) -> Result<Distribution, String> {
        let d = e(self.r.dgp(self.dgp))?;
        let laws = e(action_laws(d, &e(self.r.representation(self.repr))?))?;
        Ok(laws[e(d.action_index(action))?].clone())
    }

    fn model_law(&self, iv: &str) -> Result<Distribution, String> {
        let c = e(self.r.cbn(self.cbn))?;
        e(c.interventional(e(self.r.intervention_in(iv, self.cbn))?))
    }

    fn var(&self, name: &str) -> Result<ivalid_core::VarId, String> {
        Ok(e(self.r.var(name))?.id.clone())
    }

    fn mean(&self, law: &Distribution, v: &str) -> Result<f64, String> {
        e(expectation(law, &Functional::var(&self.var(v)?)))
    }

    fn prob(&self, law: &Distribution, v: &str, x: i64) -> Result<Rational, String> {
        e(probability(e(law.as_finite())?, &[(self.var(v)?, x)]))
    }
}

fn verdict(rep: &ValidityReport, want: Verdict, what: &str) -> Result<(), String> {
    ensure(
        rep.verdict == want,
        format!("{what}: expected {want}, got {}", rep.verdict),
    )
}

fn has_witness(rep: &ValidityReport, action: &str, iv_name: &str) -> bool {
    rep.witnesses
        .iter()
        .any(|w| w.action == action && w.intervention == iv_name)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * b.abs().max(1.0)
}

fn c1() -> Check {
    let r = fixture("dialogue");
    let ab = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "ab",
    };
    let ba = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "ba",
    };
    verdict(&ab.validity("I-ab", "C")?, Verdict::Valid, "A→B under C")?;
    verdict(&ba.validity("I-ba", "C")?, Verdict::Valid, "B→A under C")?;
    ensure(
        !ab.member("I-ab", "C", "delta-1-5", "b5-ab")?,
        "δ1⊗δ5 assigned do(B=5)",
    )?;
    ensure(
        ab.member("I-ab", "C", "normal-delta-5", "b5-ab")?,
        "N(0,1)⊗δ5 not assigned do(B=5)",
    )?;
    Ok("both orientations VALID; δ1⊗δ5 excluded, N(0,1)⊗δ5 included".into())
}

fn c2() -> Check {
    let r = fixture("ex-5.4");
    let q = Q {
        r: &r,
        dgp: "grid",
        repr: Some("tau"),
        cbn: "high",
    };
    let p = q.validity("I", "P")?;
    verdict(&p, Verdict::Falsified, "Int_P")?;
    let w = p
        .witnesses
        .iter()
        .find(|w| w.action == "y=1,x=0")
        .ok_or("no witness for the action with y=1, x=0")?;
    let act = q.mean(&q.action_law("y=1,x=0")?, "HD")?;
    let model = q.mean(&q.model_law("tc")?, "HD")?;
    ensure(
        close(act, 2.0) && close(model, 0.5),
        format!("E[HD] {act} vs {model}"),
    )?;
    match &w.divergence {
        Divergence::Gaussian { mean, .. } => ensure(close(*mean, 1.5), format!("|Δ| = {mean}"))?,
        d => return Err(format!("unexpected divergence {d}")),
    }
    verdict(&q.validity("I", "C")?, Verdict::Valid, "Int_C")?;
    Ok(format!("P FALSIFIED with E[HD] {act} vs {model}; C VALID"))
}

fn c3() -> Check {
    let r = fixture("ex-5.8");
    let a = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "A",
    };
    let rep = a.validity("points-A", "S")?;
    verdict(&rep, Verdict::Falsified, "𝔄 under S")?;
    ensure(
        has_witness(&rep, "a1", "do(Z2=1)"),
        "missing witness (a1, do(Z2=1))",
    )?;
    let got = a.prob(&a.action_law("a1")?, "Z1", 1)?;
    let model = a.prob(&a.model_law("a-z2-1")?, "Z1", 1)?;
    ensure(
        got == rat(3, 5) && model == rat(1, 2),
        "marginals of Z1 differ from Ber(3/5), Ber(1/2)",
    )?;
    let c = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "C",
    };
    verdict(
        &c.validity("points-C", "S")?,
        Verdict::Valid,
        "reversed 𝔠 under S",
    )?;
    Ok(format!(
        "S FALSIFIED with P(Z1=1) {} vs {}; reversed VALID",
        format_rational(&got),
        format_rational(&model)
    ))
}

fn c4() -> Check {
    let r = fixture("ex-5.11");
    let q = Q {
        r: &r,
        dgp: "die",
        repr: Some("side"),
        cbn: "side",
    };
    verdict(&q.validity("I", "S")?, Verdict::Falsified, "Int_S")?;
    verdict(
        &q.validity("I", "K-entropy")?,
        Verdict::Valid,
        "Int_K reverse entropy",
    )?;
    let k = q.validity("I", "K-steps")?;
    verdict(&k, Verdict::Falsified, "Int_K step cost")?;
    ensure(
        has_witness(&k, "P=2", "do(S=0)"),
        "missing witness (P≡2, do(S=0))",
    )?;
    let got = q.prob(&q.action_law("P=2")?, "R", -1)?;
    let model = q.prob(&q.model_law("s=0")?, "R", -1)?;
    ensure(
        got == rat(1, 1) && model == rat(1, 3),
        "reward laws differ from 1 vs 1/3",
    )?;
    Ok(format!(
        "S FALSIFIED; K(entropy) VALID; K(steps) FALSIFIED with P(R=-1) {} vs {}",
        format_rational(&got),
        format_rational(&model)
    ))
}

fn c5() -> Check {
    let r = fixture("ex-6.2");
    let c = Q {
        r: &r,
        dgp: "grid",
        repr: Some("tau"),
        cbn: "c",
    };
    let h = Q {
        r: &r,
        dgp: "grid",
        repr: Some("tau"),
        cbn: "h",
    };
    verdict(
        &c.validity("I-c", "S")?,
        Verdict::Falsified,
        "TC→HD under S",
    )?;
    let hr = h.validity("I-h", "S")?;
    verdict(&hr, Verdict::Falsified, "HD→TC under S")?;
    ensure(
        has_witness(&hr, "y=1/2,x=0", "do(HD←N(1, 6))"),
        "missing witness (y=1/2, x=0; do(HD←N(1,6)))",
    )?;
    let a1 = c.mean(&c.action_law("y=1,x=0")?, "HD")?;
    let m1 = c.mean(&c.model_law("c-tc")?, "HD")?;
    let a2 = h.mean(&h.action_law("y=1/2,x=0")?, "TC")?;
    let m2 = h.mean(&h.model_law("h-hd")?, "TC")?;
    ensure(
        close(a1, 2.0) && close(m1, 0.5) && close(a2, 0.5) && close(m2, 1.0 / 6.0),
        format!("{a1} vs {m1}, {a2} vs {m2}"),
    )?;
    Ok(format!(
        "both FALSIFIED; E[HD] {a1} vs {m1}; E[TC] {a2} vs {m2:.6}"
    ))
}

fn c6() -> Check {
    let r = fixture("ex-6.3");
    let a = e(r.abstraction("binary"))?;
    let v = e(is_tau_abstraction_bounded(
        &a.low, &a.i_star, &a.high, &a.tau, a.bound,
    ))?;
    ensure(v.holds, "not a τ-abstraction")?;
    let tau_u = v.tau_u.ok_or("no exogenous map")?;
    ensure(
        tau_u.iter().all(|(u, img)| a.tau.apply(u) == Some(img)),
        "exogenous map differs from τ",
    )?;
    let high = Q {
        r: &r,
        dgp: "world",
        repr: Some("tau"),
        cbn: "high",
    };
    let rep = high.validity("I-high", "S")?;
    verdict(&rep, Verdict::Falsified, "high level under S")?;
    ensure(
        has_witness(&rep, "x=1", "do(Y2=0)"),
        "missing witness (X1≡1, do(Y2=0))",
    )?;
    let got = high.prob(&high.action_law("x=1")?, "Y1", 0)?;
    let model = high.model_law("y2=0")?;
    let m0 = high.prob(&model, "Y1", 0)?;
    let m1 = high.prob(&model, "Y1", 1)?;
    ensure(
        got == rat(1, 1) && m0 == rat(1, 2) && m1 == rat(1, 2),
        "P(Y1=0) not 1 vs uniform",
    )?;
    let low = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "low",
    };
    verdict(
        &low.validity("I-low", "S")?,
        Verdict::Valid,
        "low level under S",
    )?;
    Ok("τ-abstraction with τ_U = τ; high FALSIFIED (P(Y1=0) 1 vs 1/2); low VALID".into())
}

fn c7() -> Check {
    let r = fixture("ex-6.4");
    let low = Q {
        r: &r,
        dgp: "joint",
        repr: None,
        cbn: "low",
    };
    verdict(
        &low.validity("I-low-all", "S")?,
        Verdict::Falsified,
        "low level, 2-node grid",
    )?;
    let high = Q {
        r: &r,
        dgp: "joint",
        repr: Some("tau"),
        cbn: "high",
    };
    verdict(
        &high.validity("I-high", "S")?,
        Verdict::Valid,
        "high level under S",
    )?;
    verdict(
        &high.validity("I-high", "P")?,
        Verdict::Valid,
        "high level under P",
    )?;
    let single = Q {
        r: &r,
        dgp: "single",
        repr: None,
        cbn: "low",
    };
    verdict(
        &single.validity("I-low-single", "S")?,
        Verdict::Valid,
        "low level, single-node",
    )?;
    Ok("low FALSIFIED with 2-node I*; high VALID under S and P; single-node low VALID".into())
}

fn c8() -> Check {
    let r = fixture("app-e");
    let low = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "low",
    };
    verdict(
        &low.validity("I-low", "P")?,
        Verdict::Valid,
        "low level under P",
    )?;
    let high = Q {
        r: &r,
        dgp: "world",
        repr: Some("tau"),
        cbn: "high",
    };
    verdict(
        &high.validity("I-high", "P")?,
        Verdict::Falsified,
        "high level under P",
    )?;
    let y3 = Functional::var(&high.var("Y3")?);
    let got = e(ivalid_core::dist::expectation_exact(
        e(high.action_law("star")?.as_finite())?,
        &y3,
    ))?;
    let model = e(ivalid_core::dist::expectation_exact(
        e(high.model_law("y0=0")?.as_finite())?,
        &y3,
    ))?;
    ensure(got == rat(3, 2) && model == rat(1, 1), "E[Y3] not 3/2 vs 1")?;
    Ok(format!(
        "low VALID; high FALSIFIED with E[Y3] {} vs {}",
        format_rational(&got),
        format_rational(&model)
    ))
}

fn c9() -> Check {
    let r = fixture("app-c");
    let q = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "xy",
    };
    ensure(
        q.member("I", "S~", "x=0", "d")?,
        "S~ does not assign the Y-kernel intervention",
    )?;
    let got = q.prob(&q.action_law("x=0")?, "Y", 1)?;
    let model = q.prob(&q.model_law("d")?, "Y", 1)?;
    ensure(got != model, "laws agree")?;
    verdict(&q.validity("I", "S~")?, Verdict::Falsified, "S~")?;
    ensure(
        !q.member("I", "S", "x=0", "d")?,
        "S assigns the Y-kernel intervention",
    )?;
    Ok(format!(
        "S~ assigns it with P(Y=1) {} vs {}; S excludes it",
        format_rational(&got),
        format_rational(&model)
    ))
}

fn c10() -> Check {
    let r = fixture("app-d");
    let family = vec![
        e(r.set_in("one", "flat"))?.set.clone(),
        e(r.set_in("both", "flat"))?.set.clone(),
    ];
    let d3 = e(check_desideratum(
        Desideratum::D3,
        &e(r.interpretation("ranked"))?.spec,
        e(r.dgp("d1"))?,
        &e(r.representation(None))?,
        e(r.cbn("flat"))?,
        &family,
        &tol(),
    ))?;
    ensure(!d3.holds, "D3 holds for the ranked interpretation")?;
    let q = Q {
        r: &r,
        dgp: "d2",
        repr: None,
        cbn: "xyz",
    };
    ensure(
        q.member("I", "M", "a", "y-half")?,
        "M does not assign do(Y←N(x/2,1))",
    )?;
    verdict(&q.validity("I", "M")?, Verdict::Falsified, "Int_M")?;
    let law = q.action_law("a")?;
    let m = e(conditional_cross_covariance(
        &law,
        &[q.var("Y")?],
        &[q.var("Z")?],
        &[q.var("X")?],
        &tol(),
    ))?;
    let mag = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ensure(
        close(mag, std::f64::consts::FRAC_1_SQRT_2),
        format!("cross-cov {mag}"),
    )?;
    Ok(format!(
        "D3 VIOLATED; M FALSIFIED with |cov(Y,Z|X)| = {mag:.12}"
    ))
}

fn c11() -> Check {
    let r = fixture("app-f");
    let c = e(r.cbn("triangle"))?;
    let pheno = e(check_pheno_validity(
        e(r.dgp("world"))?,
        &e(r.representation(None))?,
        c.dag(),
        &tol(),
    ))?;
    ensure(!pheno.valid, "phenomenologically valid")?;
    let q = Q {
        r: &r,
        dgp: "world",
        repr: None,
        cbn: "triangle",
    };
    let mut names = Vec::new();
    for interp in ["C", "P", "S", "M", "K", "ranked"] {
        let spec = &e(r.interpretation(interp))?.spec;
        ensure(
            spec.is_public(),
            format!("{interp} is not a public interpretation"),
        )?;
        verdict(&q.validity("I", interp)?, Verdict::Valid, interp)?;
        names.push(spec.name());
    }
    ensure(
        !matches!(e(r.interpretation("S"))?.spec, InterpretationSpec::STilde),
        "S resolved to the debug variant",
    )?;
    Ok(format!("not pheno-valid; VALID under {}", names.join(", ")))
}

fn c12() -> Check {
    let suites = [
        (
            "a two-path agreement",
            common::run_suite(1_000, 200, common::check_two_path),
            200,
        ),
        (
            "b perfect emulation, P",
            common::run_suite(2_000, 100, |s| {
                common::check_emulated_validity(s, InterpretationSpec::P)
            }),
            100,
        ),
        (
            "b single-node emulation, S",
            common::run_suite(3_000, 100, |s| {
                common::check_emulated_validity(s, InterpretationSpec::S)
            }),
            100,
        ),
        (
            "c minimality",
            common::run_suite(4_000, 200, common::check_minimality),
            200,
        ),
        (
            "d emulation round trip, 2 orders",
            common::run_suite(5_000, 100, common::check_emulation_round_trip),
            100,
        ),
        (
            "e S falsifier",
            common::run_suite(6_000, 100, common::check_ints_falsifier),
            100,
        ),
        (
            "e P falsifier",
            common::run_suite(7_000, 100, common::check_intp_falsifier),
            100,
        ),
        (
            "f P satisfies D2",
            common::run_suite(8_000, 100, common::check_p_d2),
            100,
        ),
    ];
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (name, s, need) in &suites {
        parts.push(format!("{name}: {}", s.instances));
        if !s.passed(*need) {
            bad.push(format!(
                "{name}: {} instances (need {need}), failures {:?}",
                s.instances,
                s.failures.iter().take(3).collect::<Vec<_>>()
            ));
        }
    }
    if bad.is_empty() {
        Ok(parts.join("; "))
    } else {
        Err(bad.join("; "))
    }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        (1, "dialogue", c1),
        (2, "cholesterol model under P and C", c2),
        (3, "binary model and its reversal", c3),
        (4, "die, side and reward", c4),
        (5, "both cholesterol orientations", c5),
        (6, "binary encoding abstraction", c6),
        (7, "sum of two causes", c7),
        (8, "soft abstraction", c8),
        (9, "changed-conditional requirement", c9),
        (10, "ranked and Markov-free interpretations", c10),
        (11, "confounder triangle", c11),
        (12, "property suites", c12),
    ];
    let mut failed = Vec::new();
    // Written to the raw handle so the lines survive test output capture.
    let mut out = std::io::stderr().lock();
    for (n, name, f) in criteria {
        let line = match f() {
            Ok(detail) => format!("criterion {n:2} PASS  {name}: {detail}"),
            Err(why) => {
                failed.push(n);
                format!("criterion {n:2} FAIL  {name}: {why}")
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    drop(out);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
