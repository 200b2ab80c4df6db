//! qsym: command-line front end for the symbolic quantum toolkit.
//!
//! Subcommands: run, grad, optimize, kraus, random, equiv, testgen,
//! simplify. Machine-readable output is JSON on stdout; errors are
//! single-line JSON on stderr. Exit codes: 0 success, 1 usage,
//! 2 validation/schema, 3 semantic negative result.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qsym_core::backend::{qrun, BackendRegistry, RunOptions};
use qsym_core::channel::Channel;
use qsym_core::qstate::StateBody;
use qsym_core::random::{
    random_dynamical_matrix, random_ket, random_unitary, EntropySource, RandomFile, SeededPrng,
};
use qsym_core::symexpr::{parse_expr, Binding};
use qsym_core::testgen::{
    check_equivalence, generate_test_cases, run_suite, EquivMethod, Expected, Strategy, TestCase,
    Verdict,
};
use qsym_core::variational::{
    gradient_parameter_shift, gradient_symbolic, optimize, EvalMode, Method, Objective,
};

use qsym_cli::errors::CliError;
use qsym_cli::observable;
use qsym_cli::output::{
    channel_json, complex_json, matrix_json, run_result_json, state_json, trace_json,
};
use qsym_cli::schema::{load_circuit_file, parse_matrix};

#[derive(Parser)]
#[command(
    name = "qsym",
    version,
    about = "Symbolic quantum programming toolkit",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BindArgs {
    /// Bind a symbol: --bind name=expr (repeatable; expr in the toolkit
    /// grammar, e.g. "pi/4")
    #[arg(long = "bind", value_name = "NAME=EXPR")]
    bind: Vec<String>,
}

impl BindArgs {
    fn binding(&self) -> Result<Binding, CliError> {
        let mut binding = Binding::new();
        for item in &self.bind {
            let (name, expr_text) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--bind expects NAME=EXPR, got '{item}'")))?;
            let expr = parse_expr(expr_text)
                .map_err(|e| CliError::usage(format!("bad binding expression '{expr_text}': {e}")))?;
            let z = expr
                .to_complex()
                .map_err(|e| CliError::usage(format!("binding '{name}' is not numeric: {e}")))?;
            binding.bind(name, z).map_err(CliError::from)?;
        }
        Ok(binding)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute a circuit file on a backend
    Run {
        file: String,
        #[arg(long, default_value = "sv-ideal")]
        backend: String,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        bind: BindArgs,
    },
    /// Gradient of an observable expectation over a circuit file
    Grad {
        file: String,
        #[arg(long)]
        observable: String,
        #[arg(long, value_parser = ["shift", "symbolic"])]
        method: String,
        #[command(flatten)]
        bind: BindArgs,
    },
    /// Minimize an observable expectation over circuit parameters
    Optimize {
        file: String,
        #[arg(long)]
        observable: String,
        /// Initial parameter vector, comma-separated
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value = "gradient-descent",
              value_parser = ["gradient-descent", "adaptive"])]
        method: String,
        #[arg(long, default_value_t = 0.2)]
        lr: f64,
    },
    /// Convert channel representations
    Kraus {
        #[arg(value_parser = ["to-super", "to-kraus"])]
        direction: String,
        #[arg(long = "in")]
        input: String,
    },
    /// Sample random quantum objects (honors QSYM_RANDOM_FILE)
    Random {
        #[arg(value_parser = ["ket", "unitary", "channel"])]
        kind: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check two circuit files for equivalence (exit 3 when distinct)
    Equiv {
        file1: String,
        file2: String,
        #[arg(long, default_value = "exact_matrix",
              value_parser = ["exact_matrix", "randomized_states", "symbolic"])]
        method: String,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate (and optionally check) a test suite for a circuit file
    Testgen {
        file: String,
        #[arg(long, default_value = "basis",
              value_parser = ["basis", "symbolic_family", "random_kets"])]
        strategy: String,
        /// Number of random kets for the random_kets strategy
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the generated suite against the circuit; exit 3 on failure
        #[arg(long)]
        check: bool,
    },
    /// Canonicalize an expression
    Simplify { expr: String },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep clap's rendering for --help/--version (success paths)
            if e.use_stderr() {
                let code = CliError::usage(e.to_string()).print_and_code();
                std::process::exit(code);
            }
            e.exit();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => std::process::exit(e.print_and_code()),
    }
}

fn entropy_source(seed: u64) -> Result<Box<dyn EntropySource>, CliError> {
    match RandomFile::from_env().map_err(CliError::from)? {
        Some(file) => Ok(Box::new(file)),
        None => Ok(Box::new(SeededPrng::new(seed))),
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run { file, backend, shots, seed, bind } => {
            let loaded = load_circuit_file(&file)?;
            let binding = loaded.bindings.merged(&bind.binding()?);
            let registry = BackendRegistry::default();
            let chosen = registry.get(&backend).map_err(CliError::from)?;
            let options = RunOptions { shots, seed, noise: loaded.noise };
            let result =
                qrun(chosen.as_ref(), &loaded.circuit, &binding, &options).map_err(CliError::from)?;
            println!("{}", run_result_json(&result));
            Ok(0)
        }
        Command::Grad { file, observable, method, bind } => {
            let loaded = load_circuit_file(&file)?;
            let obs = observable::parse_observable(&observable)?;
            let obj = Objective::new(loaded.circuit, obs, EvalMode::Exact)
                .map_err(CliError::from)?;
            match method.as_str() {
                "shift" => {
                    let binding = loaded.bindings.merged(&bind.binding()?);
                    let params: Result<Vec<f64>, CliError> = obj
                        .param_names()
                        .iter()
                        .map(|name| {
                            binding
                                .get(name)
                                .map(|z| z.re)
                                .ok_or_else(|| {
                                    CliError::from(qsym_core::Error::UnboundSymbol(name.clone()))
                                })
                        })
                        .collect();
                    let params = params?;
                    let grad =
                        gradient_parameter_shift(&obj, &params).map_err(CliError::from)?;
                    println!(
                        "{}",
                        json!({
                            "method": "shift",
                            "params": obj.param_names(),
                            "at": params,
                            "gradient": grad,
                        })
                    );
                }
                _ => {
                    let grad = gradient_symbolic(&obj).map_err(CliError::from)?;
                    let rendered: Vec<String> = grad.iter().map(|e| e.to_string()).collect();
                    println!(
                        "{}",
                        json!({
                            "method": "symbolic",
                            "params": obj.param_names(),
                            "gradient": rendered,
                        })
                    );
                }
            }
            Ok(0)
        }
        Command::Optimize { file, observable, init, budget, tol, method, lr } => {
            let loaded = load_circuit_file(&file)?;
            let obs = observable::parse_observable(&observable)?;
            let obj = Objective::new(loaded.circuit, obs, EvalMode::Exact)
                .map_err(CliError::from)?;
            let init: Result<Vec<f64>, CliError> = init
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::usage(format!("bad init value '{s}'")))
                })
                .collect();
            let init = init?;
            if init.len() != obj.param_names().len() {
                return Err(CliError::usage(format!(
                    "--init has {} value(s) but the circuit has {} parameter(s): {:?}",
                    init.len(),
                    obj.param_names().len(),
                    obj.param_names()
                )));
            }
            let method = match method.as_str() {
                "adaptive" => Method::Adaptive { lr },
                _ => Method::GradientDescent { lr },
            };
            let trace = optimize(&obj, &init, method, budget, tol).map_err(CliError::from)?;
            let last = trace.iterations.last().expect("trace nonempty");
            println!(
                "{}",
                json!({
                    "params": obj.param_names(),
                    "final_params": last.params,
                    "final_value": last.value,
                    "trace": trace_json(&trace),
                })
            );
            Ok(0)
        }
        Command::Kraus { direction, input } => {
            let ch = load_channel_file(&input)?;
            match direction.as_str() {
                "to-super" => {
                    let m = ch.superoperator().map_err(CliError::from)?;
                    let out = Channel::from_superoperator(m, ch.dim_in(), ch.dim_out())
                        .map_err(CliError::from)?;
                    println!("{}", channel_json(&out));
                }
                _ => {
                    let ks = ch.kraus().map_err(CliError::from)?;
                    let out = Channel::from_kraus(ks, false).map_err(CliError::from)?;
                    println!("{}", channel_json(&out));
                }
            }
            Ok(0)
        }
        Command::Random { kind, dim, rank, seed } => {
            let mut src = entropy_source(seed)?;
            match kind.as_str() {
                "ket" => {
                    let ket = random_ket(dim, src.as_mut()).map_err(CliError::from)?;
                    let StateBody::Pure(v) = ket.body() else { unreachable!() };
                    let nv = v.to_numeric().map_err(CliError::from)?;
                    println!(
                        "{}",
                        json!({
                            "kind": "ket",
                            "dim": dim,
                            "amplitudes": nv.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                        })
                    );
                }
                "unitary" => {
                    let u = random_unitary(dim, src.as_mut()).map_err(CliError::from)?;
                    println!(
                        "{}",
                        json!({
                            "kind": "unitary",
                            "dim": dim,
                            "matrix": matrix_json(&u.to_numeric().map_err(CliError::from)?),
                        })
                    );
                }
                _ => {
                    let rank = rank.unwrap_or(dim * dim);
                    let ch =
                        random_dynamical_matrix(dim, rank, src.as_mut()).map_err(CliError::from)?;
                    let mut out = channel_json(&ch);
                    out["kraus_rank"] = json!(rank);
                    println!("{out}");
                }
            }
            Ok(0)
        }
        Command::Equiv { file1, file2, method, trials, seed } => {
            let a = load_circuit_file(&file1)?;
            let b = load_circuit_file(&file2)?;
            let method = match method.as_str() {
                "randomized_states" => EquivMethod::RandomizedStates,
                "symbolic" => EquivMethod::Symbolic,
                _ => EquivMethod::ExactMatrix,
            };
            let mut src = SeededPrng::new(seed);
            let bound_a = a.circuit.bind(&a.bindings).map_err(CliError::from)?;
            let bound_b = b.circuit.bind(&b.bindings).map_err(CliError::from)?;
            let report = check_equivalence(&bound_a, &bound_b, method, trials, &mut src)
                .map_err(CliError::from)?;
            let mut out = json!({
                "method": match report.method {
                    EquivMethod::ExactMatrix => "exact_matrix",
                    EquivMethod::RandomizedStates => "randomized_states",
                    EquivMethod::Symbolic => "symbolic",
                },
                "verdict": report.verdict.class(),
            });
            let exit = match &report.verdict {
                Verdict::Distinct(w) => {
                    out["witness"] = json!({
                        "input": state_json(&w.input),
                        "fidelity_deficit": w.fidelity_deficit,
                        "binding": w.binding.as_ref().map(|bd| {
                            bd.iter()
                                .map(|(k, v)| (k.to_string(), complex_json(v)))
                                .collect::<serde_json::Map<String, Value>>()
                        }),
                    });
                    3
                }
                _ => 0,
            };
            println!("{out}");
            Ok(exit)
        }
        Command::Testgen { file, strategy, count, seed, check } => {
            let loaded = load_circuit_file(&file)?;
            let circuit = loaded.circuit.bind(&loaded.bindings).map_err(CliError::from)?;
            let strategy = match strategy.as_str() {
                "symbolic_family" => Strategy::SymbolicFamily { pairs: vec![] },
                "random_kets" => Strategy::RandomKets { count },
                _ => Strategy::Basis,
            };
            let mut src = SeededPrng::new(seed);
            let cases =
                generate_test_cases(&circuit, &strategy, &mut src).map_err(CliError::from)?;
            let suite_json = json!({
                "num_qubits": circuit.num_qubits(),
                "cases": cases.iter().map(case_json).collect::<Vec<_>>(),
            });
            if !check {
                println!("{suite_json}");
                return Ok(0);
            }
            // run the generated suite; symbolic families are checked at
            // fixed sample points of the family parameter
            let symbolic = cases.iter().any(|c| !c.input.is_fully_numeric());
            let mut all_passed = true;
            let mut reports = Vec::new();
            if symbolic {
                for alpha in [0.0, 0.4, 1.1, 2.0, -0.9] {
                    let mut binding = Binding::new();
                    binding.bind_real("alpha", alpha).map_err(CliError::from)?;
                    let report =
                        run_suite(&circuit, &cases, &binding).map_err(CliError::from)?;
                    all_passed &= report.all_passed;
                    reports.push(json!({
                        "alpha": alpha,
                        "passed": report.all_passed,
                        "cases": report.cases.iter().map(|c| json!({
                            "index": c.index,
                            "fidelity": c.fidelity,
                            "passed": c.passed,
                        })).collect::<Vec<_>>(),
                    }));
                }
            } else {
                let report =
                    run_suite(&circuit, &cases, &Binding::new()).map_err(CliError::from)?;
                all_passed = report.all_passed;
                reports.push(json!({
                    "passed": report.all_passed,
                    "cases": report.cases.iter().map(|c| json!({
                        "index": c.index,
                        "fidelity": c.fidelity,
                        "passed": c.passed,
                    })).collect::<Vec<_>>(),
                }));
            }
            println!(
                "{}",
                json!({ "suite": suite_json, "check": reports, "all_passed": all_passed })
            );
            Ok(if all_passed { 0 } else { 3 })
        }
        Command::Simplify { expr } => {
            let parsed = parse_expr(&expr).map_err(|e| match e {
                qsym_core::Error::Syntax { pos, msg } => CliError::expr_syntax("/", pos, msg),
                other => CliError::from(other),
            })?;
            println!("{}", parsed.simplify());
            Ok(0)
        }
    }
}

fn case_json(case: &TestCase) -> Value {
    let input = state_spec_json(&case.input);
    let expected = match &case.expected {
        Expected::State(s) => json!({ "state": state_spec_json(s) }),
        Expected::Distribution(d) => json!({
            "distribution": d.iter()
                .map(|(k, e)| (k.clone(), Value::String(e.to_string())))
                .collect::<serde_json::Map<String, Value>>(),
        }),
    };
    json!({
        "input": input,
        "expected": expected,
        "tolerance": case.tolerance,
    })
}

/// State specification: basis index, amplitude list, or expression strings.
fn state_spec_json(state: &qsym_core::qstate::QState) -> Value {
    match state.body() {
        StateBody::Pure(v) => {
            if let Ok(nv) = v.to_numeric() {
                // detect a plain basis vector for the compact form
                let mut basis = None;
                let mut ok = true;
                for (k, z) in nv.iter().enumerate() {
                    if (z - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-15 {
                        if basis.replace(k).is_some() {
                            ok = false;
                        }
                    } else if z.norm() > 1e-15 {
                        ok = false;
                    }
                }
                if ok {
                    if let Some(b) = basis {
                        return json!({ "basis": b });
                    }
                }
                json!({
                    "amplitudes": nv.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                })
            } else {
                json!({
                    "expressions": (0..v.dim()).map(|k| v.entry(k).to_string()).collect::<Vec<_>>(),
                })
            }
        }
        StateBody::Mixed(_) => state_json(state),
    }
}

fn load_channel_file(path: &str) -> Result<Channel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read '{path}': {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::schema("/", format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::schema("/", "channel file must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "form" | "dim_in" | "dim_out" | "kraus" | "matrix" | "trace_preserving" | "kraus_rank"
        ) {
            return Err(CliError::schema(format!("/{key}"), "unknown field"));
        }
    }
    let form = obj
        .get("form")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::schema("/form", "expected \"kraus\", \"super\", or \"choi\""))?;
    let dim_in = obj
        .get("dim_in")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::schema("/dim_in", "expected an integer"))? as usize;
    let dim_out = obj
        .get("dim_out")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::schema("/dim_out", "expected an integer"))? as usize;
    let trace_preserving = obj
        .get("trace_preserving")
        .and_then(Value::as_bool)
        .unwrap_or(true);
    match form {
        "kraus" => {
            let matrices = obj
                .get("kraus")
                .and_then(Value::as_array)
                .ok_or_else(|| CliError::schema("/kraus", "expected an array of matrices"))?;
            let mut ks = Vec::new();
            for (i, m) in matrices.iter().enumerate() {
                ks.push(parse_matrix(m, &format!("/kraus/{i}"))?);
            }
            Channel::from_kraus(ks, trace_preserving).map_err(CliError::from)
        }
        "super" => {
            let m = parse_matrix(
                obj.get("matrix")
                    .ok_or_else(|| CliError::schema("/matrix", "missing"))?,
                "/matrix",
            )?;
            Channel::from_superoperator(m, dim_in, dim_out).map_err(CliError::from)
        }
        "choi" => {
            let m = parse_matrix(
                obj.get("matrix")
                    .ok_or_else(|| CliError::schema("/matrix", "missing"))?,
                "/matrix",
            )?;
            Channel::from_choi(m, dim_in, dim_out, trace_preserving).map_err(CliError::from)
        }
        other => Err(CliError::schema("/form", format!("unknown form '{other}'"))),
    }
}
