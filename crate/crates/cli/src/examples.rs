//! Built-in example bank. Each example is a list of command invocations
//! with the report values they must produce.

use clap::Parser;
use serde_json::{json, Value};

use crate::commands::{dispatch, CliError};
use crate::report::{Report, Status};
use crate::{session, Cli};

pub struct Step {
    pub args: &'static [&'static str],
    /// JSON pointers into the report and their expected values.
    pub expect: &'static [(&'static str, Expected)],
}

#[derive(Debug, Clone, Copy)]
pub enum Expected {
    Str(&'static str),
    Bool(bool),
    Int(i64),
}

impl Expected {
    fn value(self) -> Value {
        match self {
            Expected::Str(s) => json!(s),
            Expected::Bool(b) => json!(b),
            Expected::Int(n) => json!(n),
        }
    }
}

pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub steps: &'static [Step],
}

use Expected::{Bool, Int, Str};

pub const BANK: &[Example] = &[
    Example {
        name: "symplectic-plane",
        description: "h*Dx^^Dy on Q[x, y]: unimodular, Moyal commutator [x, y] = h",
        steps: &[
            Step {
                args: &["modular", "--pi", "h*Dx^^Dy", "--omega", "dx^^dy"],
                expect: &[
                    ("/status", Str("ok")),
                    ("/modular_field", Str("0")),
                    ("/witness", Str("1")),
                ],
            },
            Step {
                args: &["unimodular", "--pi", "h*Dx^^Dy", "--omega", "dx^^dy"],
                expect: &[("/status", Str("ok")), ("/witness", Str("dx^^dy"))],
            },
            Step {
                args: &[
                    "star",
                    "--provider",
                    "moyal",
                    "--pi",
                    "h*Dx^^Dy",
                    "--lhs",
                    "x",
                    "--rhs",
                    "y",
                ],
                expect: &[("/status", Str("ok")), ("/commutator", Str("h"))],
            },
        ],
    },
    Example {
        name: "ax-b-polynomial",
        description: "h*y*Dx^^Dy on Q[x, y]: modular field -h*Dx, not log-Hamiltonian",
        steps: &[
            Step {
                args: &["modular", "--pi", "h*y*Dx^^Dy", "--omega", "dx^^dy"],
                expect: &[
                    ("/status", Str("obstructed")),
                    ("/modular_field", Str("-h*Dx")),
                    ("/poisson_field", Bool(true)),
                    ("/class_trivial", Bool(false)),
                ],
            },
            Step {
                args: &["hamiltonian", "--pi", "h*y*Dx^^Dy", "--field", "-h*Dx"],
                expect: &[
                    ("/status", Str("obstructed")),
                    ("/obstruction/exhaustive", Bool(true)),
                ],
            },
            Step {
                args: &[
                    "hp",
                    "--pi",
                    "h*y*Dx^^Dy",
                    "--degree",
                    "0",
                    "--from",
                    "0",
                    "--to",
                    "0",
                ],
                expect: &[
                    ("/slices/0/dimension", Int(1)),
                    ("/slices/0/representatives/0", Str("1")),
                ],
            },
        ],
    },
    Example {
        name: "ax-b-laurent",
        description: "h*y*Dx^^Dy with y invertible: the modular field is log-Hamiltonian for y^-1",
        steps: &[
            Step {
                args: &[
                    "modular",
                    "--invertible",
                    "y",
                    "--pi",
                    "h*y*Dx^^Dy",
                    "--omega",
                    "dx^^dy",
                ],
                expect: &[
                    ("/status", Str("ok")),
                    ("/modular_field", Str("-h*Dx")),
                    ("/witness", Str("y^-1")),
                ],
            },
            Step {
                args: &[
                    "logham",
                    "--invertible",
                    "y",
                    "--pi",
                    "h*y*Dx^^Dy",
                    "--field",
                    "-h*Dx",
                ],
                expect: &[("/status", Str("ok")), ("/verified", Bool(true))],
            },
        ],
    },
    Example {
        name: "crossed-modular",
        description:
            "crossed product of the ax+b star product by exp of its quantized modular field",
        steps: &[Step {
            args: &["crossed", "--pi", "h*y*Dx^^Dy", "--omega", "dx^^dy"],
            expect: &[
                ("/status", Str("ok")),
                ("/field", Str("-h*Dx")),
                ("/conjugation/x", Str("x - h")),
                ("/conjugation/y", Str("y")),
                ("/semiclassical/passed", Bool(true)),
                ("/euler/passed", Bool(true)),
            ],
        }],
    },
];

pub fn list() -> Report {
    let mut r = Report::new("examples");
    let entries: Vec<Value> = BANK
        .iter()
        .map(|e| json!({"name": e.name, "description": e.description, "steps": e.steps.len()}))
        .collect();
    r.set("examples", entries);
    r
}

fn run_step(step: &Step, seed: u64) -> Result<Value, CliError> {
    let seed = seed.to_string();
    let argv = ["poisson"]
        .iter()
        .chain(step.args)
        .copied()
        .chain(["--seed", seed.as_str()]);
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = session(&cli.global)?;
    let report = dispatch(&cli.command, &cfg)?;
    let json = report.to_json();
    let failures: Vec<Value> = step
        .expect
        .iter()
        .filter_map(|(ptr, want)| {
            let got = json.pointer(ptr).cloned().unwrap_or(Value::Null);
            (got != want.value())
                .then(|| json!({"key": ptr, "expected": want.value(), "found": got}))
        })
        .collect();
    Ok(json!({
        "command": step.args.join(" "),
        "status": json["status"],
        "passed": failures.is_empty(),
        "failures": failures,
    }))
}

/// Runs one named example, or all of them when `name` is `None`.
pub fn run(name: Option<&str>, seed: u64) -> Result<Report, CliError> {
    let selected: Vec<&Example> = match name {
        None => BANK.iter().collect(),
        Some(n) => vec![BANK.iter().find(|e| e.name == n).ok_or_else(|| {
            let names: Vec<&str> = BANK.iter().map(|e| e.name).collect();
            CliError::Usage(format!(
                "unknown example `{n}`; available: {}",
                names.join(", ")
            ))
        })?],
    };
    let mut all_passed = true;
    let mut results = Vec::new();
    for ex in selected {
        let steps = ex
            .steps
            .iter()
            .map(|s| run_step(s, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let passed = steps.iter().all(|s| s["passed"] == json!(true));
        all_passed &= passed;
        results.push(json!({"name": ex.name, "passed": passed, "steps": steps}));
    }
    let mut r = Report::new("examples");
    r.set("passed", all_passed)
        .set("examples", results)
        .status(if all_passed {
            Status::Ok
        } else {
            Status::Violation
        });
    Ok(r)
}
