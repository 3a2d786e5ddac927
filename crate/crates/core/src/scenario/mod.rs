//! Declarative experiments: a file format, a resolver that builds engine
//! objects from it, a runner for the expectations it states, and the
//! shipped fixtures.

pub mod format;
pub mod resolve;
pub mod run;

pub use format::{parse_scenario, to_canonical, Claim, Expectation, Scenario};
pub use resolve::{resolve, Resolved};
pub use run::{run_scenario, Outcome, ScenarioReport};

/// Shipped fixtures as `(id, file contents)`.
pub const BUILTIN: [(&str, &str); 12] = [
    ("dialogue", include_str!("../../scenarios/dialogue.json")),
    ("ex-5.4", include_str!("../../scenarios/ex-5.4.json")),
    ("ex-5.8", include_str!("../../scenarios/ex-5.8.json")),
    ("ex-5.11", include_str!("../../scenarios/ex-5.11.json")),
    ("ex-6.1", include_str!("../../scenarios/ex-6.1.json")),
    ("ex-6.2", include_str!("../../scenarios/ex-6.2.json")),
    ("ex-6.3", include_str!("../../scenarios/ex-6.3.json")),
    ("ex-6.4", include_str!("../../scenarios/ex-6.4.json")),
    ("app-c", include_str!("../../scenarios/app-c.json")),
    ("app-d", include_str!("../../scenarios/app-d.json")),
    ("app-e", include_str!("../../scenarios/app-e.json")),
    ("app-f", include_str!("../../scenarios/app-f.json")),
];

/// Every shipped fixture, parsed.
pub fn builtin_scenarios() -> Vec<Scenario> {
    BUILTIN
        .iter()
        .map(|(id, text)| {
            parse_scenario(text).unwrap_or_else(|e| panic!("builtin scenario `{id}`: {e}"))
        })
        .collect()
}

pub fn builtin_scenario(id: &str) -> Option<Scenario> {
    BUILTIN
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| parse_scenario(text).expect("builtin scenario parses"))
}
