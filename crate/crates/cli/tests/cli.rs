use std::process::Command;

use poisson_cli::expr::{parse, render, Context, Value};
use poisson_cli::{run, Outcome};
use poisson_core::CoordinateRing;
use proptest::prelude::*;
use serde_json::Value as Json;

fn poisson(args: &[&str]) -> Outcome {
    run(std::iter::once("poisson").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (Json, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = poisson(&all);
    assert!(out.stderr.is_empty(), "{}", out.stderr);
    (serde_json::from_str(&out.stdout).unwrap(), out.code)
}

#[test]
fn modular_ax_b_is_nontrivial() {
    let (r, code) = json(&["modular", "--pi", "h*y*Dx^^Dy", "--omega", "dx^^dy"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "obstructed");
    assert_eq!(r["modular_field"], "-h*Dx");
    assert_eq!(r["class_trivial"], false);
    assert_eq!(r["obstruction"]["exhaustive"], true);
}

#[test]
fn unimodular_symplectic_finds_witness() {
    let (r, code) = json(&[
        "unimodular",
        "--pi",
        "h*Dx^^Dy",
        "--omega",
        "dx^^dy",
        "--order",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["witness"], "dx^^dy");
}

#[test]
fn moyal_product_of_coordinates() {
    let (r, code) = json(&[
        "star",
        "--provider",
        "moyal",
        "--pi",
        "h*Dx^^Dy",
        "--lhs",
        "x",
        "--rhs",
        "y",
        "--order",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["product"], "x*y + 1/2*h");
    assert_eq!(r["commutator"], "h");
}

#[test]
fn mixed_wedge_is_a_type_error() {
    let out = poisson(&["jacobi", "--pi", "Dx^^dx"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert_eq!(
        out.stderr,
        "error: in --pi: type error: cannot wedge a 1-vector with a 1-form\n  Dx^^dx\n  ^^^^^^\n"
    );
}

#[test]
fn usage_and_engine_errors_exit_2() {
    assert_eq!(poisson(&["frobnicate"]).code, 2);
    assert_eq!(poisson(&["jacobi"]).code, 2);
    let out = poisson(&["modular", "--pi", "x*Dx^^Dy", "--omega", "dx^^dy"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("hint:"), "{}", out.stderr);
    let out = poisson(&["crossed", "--pi", "h*t*Dx^^Dy", "--field", "h*Dx"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("`t` is reserved"));
    assert_eq!(
        poisson(&["hp", "--pi", "h*Dx^^Dy", "--from", "1", "--to", "0"]).code,
        2
    );
    assert_eq!(poisson(&["help"]).code, 0);
}

#[test]
fn jacobi_violation_exits_1() {
    let (r, code) = json(&["jacobi", "--pi", "h*y*Dx^^Dy + h*x*Dy^^Dz"]);
    assert_eq!(code, 1);
    assert_eq!(r["violation_order"], 2);
    assert_eq!(r["trivector"], "-2*x*Dx^^Dy^^Dz");
}

#[test]
fn every_command_reports_schema_1() {
    let cases: &[&[&str]] = &[
        &["jacobi", "--pi", "h*Dx^^Dy"],
        &[
            "logham",
            "--invertible",
            "y",
            "--pi",
            "h*y*Dx^^Dy",
            "--field",
            "-h*Dx",
        ],
        &["hamiltonian", "--pi", "h*Dx^^Dy", "--field", "h*Dx"],
        &["hp", "--pi", "h*y*Dx^^Dy", "--degree", "1", "--homology"],
        &[
            "derivation",
            "--pi",
            "h*y*Dx^^Dy",
            "--field",
            "h*Dx",
            "--apply",
            "x^2",
        ],
        &[
            "lift",
            "--invertible",
            "x,y",
            "--pi",
            "h*Dx^^Dy",
            "--unit",
            "x",
            "--order",
            "2",
        ],
        &[
            "crossed", "--pi", "h*Dx^^Dy", "--field", "h*Dx", "--order", "2",
        ],
        &["examples", "list"],
    ];
    for args in cases {
        let (r, code) = json(args);
        assert_eq!(code, 0, "{args:?}: {r}");
        assert_eq!(r["schema"], 1);
        assert_eq!(r["command"], args[0]);
        assert_eq!(r["status"], "ok");
    }
}

#[test]
fn hamiltonian_solution_is_reported() {
    let (r, _) = json(&["hamiltonian", "--pi", "h*Dx^^Dy", "--field", "h*Dx"]);
    assert_eq!(r["verified"], true);
    assert!(r["hamiltonian"].is_string());
}

#[test]
fn crossed_modular_shifts_x() {
    let (r, code) = json(&["crossed", "--pi", "h*y*Dx^^Dy", "--omega", "dx^^dy"]);
    assert_eq!(code, 0);
    assert_eq!(r["conjugation"]["x"], "x - h");
    assert_eq!(r["semiclassical"]["passed"], true);
}

#[test]
fn example_bank_passes() {
    let out = poisson(&["examples", "run", "--all", "--format", "json"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let r: Json = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r["examples"].as_array().unwrap().len(), 4);
    assert_eq!(poisson(&["examples", "run", "ax-b-laurent"]).code, 0);
    assert_eq!(poisson(&["examples", "run", "nope"]).code, 2);
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &[
            "star",
            "--provider",
            "universal2",
            "--pi",
            "h*y*Dx^^Dy",
            "--lhs",
            "x^2",
            "--rhs",
            "y",
            "--seed",
            "7",
        ][..],
        &["examples", "run", "--all"][..],
    ] {
        let a = poisson(args);
        let b = poisson(args);
        assert_eq!(a, b);
        assert_eq!(a.code, 0);
    }
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let path = std::env::temp_dir().join(format!("poisson-cli-test-{}.toml", std::process::id()));
    std::fs::write(
        &path,
        "invertible = [\"y\"]\nformat = \"json\"\norder = 1\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = poisson(&[
        "modular",
        "--config",
        p,
        "--pi",
        "h*y*Dx^^Dy",
        "--omega",
        "dx^^dy",
    ]);
    let r: Json = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(r["witness"], "y^-1");
    assert_eq!(r["order"], 1);
    let out = poisson(&[
        "jacobi", "--config", p, "--format", "text", "--order", "3", "--pi", "h*Dx^^Dy",
    ]);
    assert!(out.stdout.starts_with("command           jacobi\n"));
    assert!(out.stdout.contains("order             3\n"));
    std::fs::write(&path, "colour = 1\n").unwrap();
    assert_eq!(
        poisson(&["jacobi", "--config", p, "--pi", "h*Dx^^Dy"]).code,
        2
    );
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn binary_honours_seed_variable() {
    let bin = env!("CARGO_BIN_EXE_poisson");
    let args = [
        "star",
        "--provider",
        "universal2",
        "--pi",
        "h*y*Dx^^Dy",
        "--lhs",
        "x",
        "--rhs",
        "y",
        "--format",
        "json",
    ];
    let env_run = Command::new(bin)
        .args(args)
        .env("POISSON_SEED", "11")
        .output()
        .unwrap();
    let flag_run = Command::new(bin)
        .args(args)
        .args(["--seed", "11"])
        .env_remove("POISSON_SEED")
        .output()
        .unwrap();
    assert_eq!(env_run.status.code(), Some(0));
    assert_eq!(env_run.stdout, flag_run.stdout);
    let bad = Command::new(bin)
        .args(["jacobi", "--pi", "h*"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .contains("syntax error"));
}

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u32..20, 1u32..5).prop_map(|(n, d)| if d == 1 {
            n.to_string()
        } else {
            format!("{n}/{d}")
        }),
        Just("h".to_string()),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(str::to_string),
    ]
}

fn scalar_src() -> impl Strategy<Value = String> {
    atom().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), 0i64..3).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

/// Scalars, bivectors and 2-forms built from random scalar coefficients.
fn typed_src() -> impl Strategy<Value = String> {
    let basis = prop::sample::select(vec!["Dx^^Dy", "Dy^^Dz", "dx^^dz", "Dz", "dy", "y^-1", "1"]);
    (scalar_src(), basis, scalar_src()).prop_map(|(a, b, c)| format!("({a})*{b} + ({c})*{b}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_reparses_to_the_same_tree(src in typed_src()) {
        let e = parse(&src, &[]).unwrap();
        let again = parse(&render(&e), &[]).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(render(&again), render(&e));
    }

    #[test]
    fn engine_text_evaluates_back(src in typed_src()) {
        let ring = CoordinateRing::new(&["x", "y", "z"], &["y"]).unwrap();
        let ctx = Context { ring, order: 3, reserved: vec![] };
        let value = ctx.eval(&parse(&src, &[]).unwrap()).unwrap();
        let text = match &value {
            Value::Scalar(s) => s.to_string(),
            Value::Vector(v) => v.to_string(),
            Value::Form(w) => w.to_string(),
        };
        let back = ctx.eval(&parse(&text, &[]).unwrap()).unwrap();
        let value_is_zero = match &value {
            Value::Scalar(s) => s.is_zero(),
            Value::Vector(v) => v.is_zero(),
            Value::Form(w) => w.is_zero(),
        };
        // zero of any degree prints as `0`
        if value_is_zero {
            prop_assert_eq!(text, "0");
        } else {
            prop_assert_eq!(&back, &value, "{}", text);
        }
    }
}
