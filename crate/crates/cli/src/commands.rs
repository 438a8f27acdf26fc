//! Subcommand handlers. Each parses its inputs, calls one engine operation
//! and fills a [`Report`].

use poisson_core::calculus::{DiffForm, PolyVector};
use poisson_core::poisson::{
    hamiltonian_field, hp_cohomology, hp_homology, jacobi_check, log_hamiltonian_decompose,
    log_hamiltonian_field, modular_class, modular_vector_field, solve_hamiltonian,
    unimodularity_witness, JacobiOutcome, PoissonStructure, Solve,
};
use poisson_core::quantize::lift::conjugation_holds;
use poisson_core::quantize::star::{MOYAL_DEFAULT_ORDER, UNIVERSAL2_DEFAULT_ORDER};
use poisson_core::quantize::{
    euler_check, lift_log_hamiltonian, quantized_derivation, semiclassical_bracket_check,
    CrossedAlgebra, StarProvider,
};
use poisson_core::{Error as EngineError, HPoly, Poly, Ring};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::config::{ConfigError, SessionConfig};
use crate::examples;
use crate::expr::{identifiers, parse, Context, Diagnostic, Expr};
use crate::report::{Report, Status};
use crate::{Command, ExamplesAction, ProviderArg};

/// Truncation order of the Poisson-engine commands when `--order` is absent.
pub const POISSON_DEFAULT_ORDER: usize = 2;
/// Random samples used by star-product and crossed-product checks.
pub const CHECK_SAMPLES: usize = 20;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("in {flag}: {rendered}")]
    Parse { flag: String, rendered: String },
    #[error("{error}{}", hint_suffix(error))]
    Engine { error: EngineError },
}

impl From<EngineError> for CliError {
    fn from(error: EngineError) -> Self {
        CliError::Engine { error }
    }
}

fn hint_suffix(e: &EngineError) -> String {
    hint(e).map(|h| format!("\nhint: {h}")).unwrap_or_default()
}

/// A short pointer to the usual fix for an engine error.
pub fn hint(e: &EngineError) -> Option<&'static str> {
    Some(match e {
        EngineError::MalformedDeformation => {
            "every term of --pi needs a factor of h, e.g. h*y*Dx^^Dy"
        }
        EngineError::JacobiViolation { .. } => {
            "run `poisson jacobi` to see the offending trivector"
        }
        EngineError::NotAVolume(_) => "--omega must be a unit times the top form, e.g. dx^^dy",
        EngineError::NotAUnit(_) | EngineError::NegativeExponent(_) => {
            "declare the variables of the leading monomial with --invertible"
        }
        EngineError::NotPoisson { .. } => "the field w must satisfy [pi, w] = 0 at every order",
        EngineError::UnsupportedOrder { .. } => {
            "universal2 stops at order 2 for non-constant structures; pass --order 2"
        }
        EngineError::WrongProvider(_) => "use --provider universal2 or --provider auto",
        EngineError::NonzeroConstantTerm => "the field needs a factor of h",
        EngineError::WrongDegree { .. } => "check the degree of the expression",
        _ => return None,
    })
}

/// Parsed inputs of one command sharing a single coordinate ring.
struct Inputs {
    ring: Ring,
    reserved: Vec<String>,
    items: Vec<(&'static str, String, Expr)>,
}

fn diagnostic(flag: &str, src: &str, d: &Diagnostic) -> CliError {
    CliError::Parse {
        flag: flag.to_string(),
        rendered: d.render(src),
    }
}

impl Inputs {
    fn new(
        cfg: &SessionConfig,
        sources: &[(&'static str, &str)],
        reserved: &[&str],
    ) -> Result<Self, CliError> {
        let declared = cfg.vars.clone().unwrap_or_default();
        let mut found = Vec::new();
        let mut items = Vec::new();
        for &(flag, src) in sources {
            let e = parse(src, &declared).map_err(|d| diagnostic(flag, src, &d))?;
            found.extend(
                identifiers(&e)
                    .into_iter()
                    .filter(|n| !reserved.contains(&n.as_str())),
            );
            items.push((flag, src.to_string(), e));
        }
        Ok(Inputs {
            ring: cfg.ring(&found, reserved)?,
            reserved: reserved.iter().map(|s| s.to_string()).collect(),
            items,
        })
    }

    fn context(&self, order: usize) -> Context {
        Context {
            ring: self.ring.clone(),
            order,
            reserved: self.reserved.clone(),
        }
    }

    fn eval<T>(
        &self,
        i: usize,
        ctx: &Context,
        f: impl FnOnce(&Context, &Expr) -> Result<T, Diagnostic>,
    ) -> Result<T, CliError> {
        let (flag, src, e) = &self.items[i];
        f(ctx, e).map_err(|d| diagnostic(flag, src, &d))
    }

    fn vector(&self, i: usize, degree: usize, ctx: &Context) -> Result<PolyVector, CliError> {
        self.eval(i, ctx, |c, e| c.polyvector(e, degree))
    }

    fn form(&self, i: usize, ctx: &Context) -> Result<DiffForm, CliError> {
        self.eval(i, ctx, |c, e| c.form(e, c.ring.nvars()))
    }

    fn scalar(&self, i: usize, ctx: &Context) -> Result<HPoly, CliError> {
        self.eval(i, ctx, |c, e| c.scalar(e))
    }

    fn structure(&self, i: usize, ctx: &Context) -> Result<PoissonStructure, CliError> {
        Ok(PoissonStructure::certified(self.vector(i, 2, ctx)?)?)
    }
}

/// `Q[x, y, y^-1]` style description of a ring.
pub fn ring_label(ring: &Ring) -> String {
    let mut parts: Vec<String> = ring.names().to_vec();
    for i in 0..ring.nvars() {
        if ring.is_invertible(i) {
            parts.push(format!("{}^-1", ring.name(i)));
        }
    }
    format!("Q[{}]", parts.join(", "))
}

fn new_report(command: &str, ring: &Ring, order: usize) -> Report {
    let mut r = Report::new(command);
    r.set("ring", ring_label(ring)).set("order", order);
    r
}

fn solve_status<T>(s: &Solve<T>) -> Status {
    if s.is_found() {
        Status::Ok
    } else {
        Status::Obstructed
    }
}

fn check_status(passed: bool) -> Status {
    if passed {
        Status::Ok
    } else {
        Status::Violation
    }
}

pub fn dispatch(cmd: &Command, cfg: &SessionConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Jacobi { pi } => jacobi(cfg, pi),
        Command::Modular { pi, omega } => modular(cfg, pi, omega),
        Command::Unimodular { pi, omega } => unimodular(cfg, pi, omega),
        Command::Logham { pi, field } => logham(cfg, pi, field),
        Command::Hamiltonian { pi, field } => hamiltonian(cfg, pi, field),
        Command::Hp {
            pi,
            degree,
            homology,
            from,
            to,
        } => hp(cfg, pi, *degree, *homology, (*from, *to)),
        Command::Star {
            provider,
            pi,
            lhs,
            rhs,
        } => star(cfg, *provider, pi, lhs, rhs),
        Command::Derivation {
            provider,
            pi,
            field,
            apply,
        } => derivation(cfg, *provider, pi, field, apply.as_deref()),
        Command::Lift { provider, pi, unit } => lift(cfg, *provider, pi, unit),
        Command::Crossed {
            provider,
            pi,
            field,
            omega,
        } => crossed(cfg, *provider, pi, field.as_deref(), omega.as_deref()),
        Command::Examples { action } => match action {
            ExamplesAction::List => Ok(examples::list()),
            ExamplesAction::Run { all, name } => {
                let selected = if *all { None } else { name.as_deref() };
                examples::run(selected, cfg.seed)
            }
        },
    }
}

fn jacobi(cfg: &SessionConfig, pi: &str) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let pv = inputs.vector(0, 2, &ctx)?;
    let mut r = new_report("jacobi", &inputs.ring, order);
    r.set_display("structure", &pv);
    match jacobi_check(&pv)? {
        JacobiOutcome::Certified(_) => {
            r.set("certified", true);
        }
        JacobiOutcome::Violation { order, trivector } => {
            r.set("certified", false)
                .set("violation_order", order)
                .set_display("trivector", trivector)
                .status(Status::Violation);
        }
    }
    Ok(r)
}

fn modular(cfg: &SessionConfig, pi: &str, omega: &str) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--omega", omega)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let structure = inputs.structure(0, &ctx)?;
    let report = modular_class(&structure, &inputs.form(1, &ctx)?, &cfg.search)?;
    let status = if !report.poisson_field {
        Status::Violation
    } else if report.class_trivial {
        Status::Ok
    } else {
        Status::Obstructed
    };
    let mut r = new_report("modular", &inputs.ring, order);
    r.merge(&report).status(status);
    Ok(r)
}

fn unimodular(cfg: &SessionConfig, pi: &str, omega: &str) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--omega", omega)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let structure = inputs.structure(0, &ctx)?;
    let omega = inputs.form(1, &ctx)?;
    let solve = unimodularity_witness(&structure, &omega, &cfg.search)?;
    let mut r = new_report("unimodular", &inputs.ring, order);
    r.set_display("structure", structure.pi())
        .set_display("volume", &omega)
        .set("witness", solve.found().map(|w| w.to_string()))
        .set("obstruction", solve.obstruction())
        .status(solve_status(&solve));
    Ok(r)
}

fn logham(cfg: &SessionConfig, pi: &str, field: &str) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--field", field)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let structure = inputs.structure(0, &ctx)?;
    let v = inputs.vector(1, 1, &ctx)?;
    let solve = log_hamiltonian_decompose(&structure, &v, &cfg.search)?;
    let verified = match solve.found() {
        Some(f) => Some(log_hamiltonian_field(&structure, f)? == v),
        None => None,
    };
    let mut r = new_report("logham", &inputs.ring, order);
    r.set_display("field", &v)
        .set("witness", solve.found().map(|f| f.to_string()))
        .set("verified", verified)
        .set("obstruction", solve.obstruction())
        .status(if verified == Some(false) {
            Status::Violation
        } else {
            solve_status(&solve)
        });
    Ok(r)
}

fn hamiltonian(cfg: &SessionConfig, pi: &str, field: &str) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--field", field)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let structure = inputs.structure(0, &ctx)?;
    let v = inputs.vector(1, 1, &ctx)?;
    let solve = solve_hamiltonian(&structure, &v, &cfg.search)?;
    let verified = match solve.found() {
        Some(f) => Some(hamiltonian_field(&structure, f)? == v),
        None => None,
    };
    let mut r = new_report("hamiltonian", &inputs.ring, order);
    r.set_display("field", &v)
        .set("hamiltonian", solve.found().map(|f| f.to_string()))
        .set("verified", verified)
        .set("obstruction", solve.obstruction())
        .status(if verified == Some(false) {
            Status::Violation
        } else {
            solve_status(&solve)
        });
    Ok(r)
}

fn hp(
    cfg: &SessionConfig,
    pi: &str,
    degree: usize,
    homology: bool,
    window: (i64, i64),
) -> Result<Report, CliError> {
    if window.0 > window.1 {
        return Err(CliError::Usage(format!(
            "empty weight window: --from {} is above --to {}",
            window.0, window.1
        )));
    }
    let inputs = Inputs::new(cfg, &[("--pi", pi)], &[])?;
    let order = cfg.order_or(POISSON_DEFAULT_ORDER);
    let ctx = inputs.context(order);
    let structure = inputs.structure(0, &ctx)?;
    let report = if homology {
        hp_homology(&structure, degree, window, &cfg.search)?
    } else {
        hp_cohomology(&structure, degree, window, &cfg.search)?
    };
    let mut r = new_report("hp", &inputs.ring, order);
    r.set("total_dimension", report.total_dimension())
        .merge(&report);
    Ok(r)
}

/// Builds the star product. With `--order` absent the order is the
/// provider's default.
fn provider(
    cfg: &SessionConfig,
    inputs: &Inputs,
    choice: ProviderArg,
) -> Result<(StarProvider, Context), CliError> {
    let probe = inputs.context(cfg.order.unwrap_or(0).max(MOYAL_DEFAULT_ORDER));
    let constant = PoissonStructure::new(inputs.vector(0, 2, &probe)?)?.is_constant();
    let moyal = match choice {
        ProviderArg::Auto => constant,
        ProviderArg::Moyal => true,
        ProviderArg::Universal2 => false,
    };
    let default = if moyal {
        MOYAL_DEFAULT_ORDER
    } else {
        UNIVERSAL2_DEFAULT_ORDER
    };
    let ctx = inputs.context(cfg.order_or(default));
    let pi = inputs.structure(0, &ctx)?;
    let s = if moyal {
        StarProvider::moyal(&pi, ctx.order)?
    } else {
        StarProvider::universal2(&pi, ctx.order, cfg.seed)?
    };
    Ok((s, ctx))
}

fn quantize_report(command: &str, s: &StarProvider) -> Report {
    let mut r = new_report(command, s.ring(), s.order());
    r.set("provider", s.kind())
        .set_display("structure", s.poisson().pi());
    r
}

fn star(
    cfg: &SessionConfig,
    choice: ProviderArg,
    pi: &str,
    lhs: &str,
    rhs: &str,
) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--lhs", lhs), ("--rhs", rhs)], &[])?;
    let (s, ctx) = provider(cfg, &inputs, choice)?;
    let (a, b) = (inputs.scalar(1, &ctx)?, inputs.scalar(2, &ctx)?);
    let certification = s.certify(cfg.seed, CHECK_SAMPLES);
    let mut r = quantize_report("star", &s);
    r.set_display("lhs", &a)
        .set_display("rhs", &b)
        .set_display("product", s.star(&a, &b)?)
        .set_display("commutator", s.commutator(&a, &b)?)
        .set("certification", &certification)
        .status(check_status(certification.passed()));
    Ok(r)
}

fn generators(ring: &Ring, order: usize) -> Vec<(String, HPoly)> {
    (0..ring.nvars())
        .map(|i| {
            (
                ring.name(i).to_string(),
                HPoly::from_poly(Poly::var(ring, i), order),
            )
        })
        .collect()
}

fn derivation(
    cfg: &SessionConfig,
    choice: ProviderArg,
    pi: &str,
    field: &str,
    apply: Option<&str>,
) -> Result<Report, CliError> {
    let mut sources = vec![("--pi", pi), ("--field", field)];
    if let Some(a) = apply {
        sources.push(("--apply", a));
    }
    let inputs = Inputs::new(cfg, &sources, &[])?;
    let (s, ctx) = provider(cfg, &inputs, choice)?;
    let w = inputs.vector(1, 1, &ctx)?;
    let mut r = quantize_report("derivation", &s);
    r.set_display("field", &w);
    let d = match quantized_derivation(&w, &s, &cfg.search)? {
        Solve::Found(d) => d,
        Solve::Obstructed(o) => {
            r.set("obstruction", o).status(Status::Obstructed);
            return Ok(r);
        }
    };
    r.set_display("derivation", &d)
        .set("corrections", d.corrections());
    if apply.is_some() {
        r.set_display("applied", d.apply(&inputs.scalar(2, &ctx)?)?);
    }
    let gens = generators(s.ring(), s.order());
    let mut leibniz = true;
    for (_, a) in &gens {
        for (_, b) in &gens {
            leibniz &= d.leibniz_defect(a, b)?.is_zero();
        }
    }
    r.set("leibniz", leibniz).status(check_status(leibniz));
    Ok(r)
}

fn lift(
    cfg: &SessionConfig,
    choice: ProviderArg,
    pi: &str,
    unit: &str,
) -> Result<Report, CliError> {
    let inputs = Inputs::new(cfg, &[("--pi", pi), ("--unit", unit)], &[])?;
    let (s, ctx) = provider(cfg, &inputs, choice)?;
    let f = inputs.scalar(1, &ctx)?;
    let mut r = quantize_report("lift", &s);
    r.set_display("unit", &f);
    let lift = match lift_log_hamiltonian(&s, &f, &cfg.search)? {
        Solve::Found(l) => l,
        Solve::Obstructed(o) => {
            r.set("obstruction", o).status(Status::Obstructed);
            return Ok(r);
        }
    };
    let d = lift.derivation.clone();
    let verified = conjugation_holds(&s, &move |a: &HPoly| d.exp_power(1, a), &lift.unit)?;
    r.set_display("field", &lift.field)
        .set_display("derivation", &lift.derivation)
        .set_display("conjugating_unit", &lift.unit)
        .set("conjugation", verified)
        .status(check_status(verified));
    Ok(r)
}

fn crossed(
    cfg: &SessionConfig,
    choice: ProviderArg,
    pi: &str,
    field: Option<&str>,
    omega: Option<&str>,
) -> Result<Report, CliError> {
    const T: &str = "t";
    let second = match (field, omega) {
        (Some(f), None) => ("--field", f),
        (None, Some(o)) => ("--omega", o),
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --field and --omega".into(),
            ))
        }
    };
    let inputs = Inputs::new(cfg, &[("--pi", pi), second], &[T])?;
    let (s, ctx) = provider(cfg, &inputs, choice)?;
    let w = if field.is_some() {
        inputs.vector(1, 1, &ctx)?
    } else {
        modular_vector_field(s.poisson(), &inputs.form(1, &ctx)?)?
    };
    let mut r = quantize_report("crossed", &s);
    r.set_display("field", &w);
    let d = match quantized_derivation(&w, &s, &cfg.search)? {
        Solve::Found(d) => d,
        Solve::Obstructed(o) => {
            r.set("obstruction", o).status(Status::Obstructed);
            return Ok(r);
        }
    };
    let alg = CrossedAlgebra::new(d);
    let mut conjugation = Map::new();
    for (name, x) in generators(alg.ring(), alg.order()) {
        let image = alg
            .t_power(1)
            .mul(&alg.monomial(x, 0))?
            .mul(&alg.t_power(-1))?;
        conjugation.insert(name, Value::from(image.to_string()));
    }
    let semiclassical = semiclassical_bracket_check(&alg, T)?;
    let euler = euler_check(&alg, cfg.seed, CHECK_SAMPLES)?;
    r.set_display("derivation", alg.derivation())
        .set("conjugation", conjugation)
        .set("semiclassical", &semiclassical)
        .set("euler", &euler)
        .status(check_status(semiclassical.passed && euler.passed));
    Ok(r)
}
