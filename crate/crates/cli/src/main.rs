mod parse;

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use milnor_forms::forms::{dlog_symbol, is_exact, nu_member, DifferentialForm, Frame, PureSymbol};
use milnor_forms::hypersurface::{
    analyze_hypersurface, kernel_verify_instance, restrict_form_to_fx, symbol_in_kernel_predicate, HypersurfaceAnalysis,
};
use milnor_forms::symbols::{prop41_decompose, thm14_decompose, SymbolDecomposition};
use milnor_forms::{random, Error, FieldContext, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const DEFAULT_FIELD: &str = "p=2,e=1,vars=x";
const DEFAULT_SEED: u64 = 20240601;

#[derive(Parser, Debug)]
#[command(name = "milnor", version, about = "Differential forms, logarithmic symbols and hypersurface kernels in characteristic p")]
struct Cli {
    /// Field declaration, e.g. p=2,e=1,vars=x,y or p=2,e=2,vars=x,modulus=w^2+w+1.
    #[arg(long, global = true, default_value = DEFAULT_FIELD)]
    field: String,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Bound on total degrees of numerators and denominators.
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    /// Number of random trials for randomized checks.
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a form is exact.
    IsExact {
        /// Form such as "x*dlog(x)^dlog(y)", or - for stdin.
        form: String,
    },
    /// Decide whether a form lies in the kernel of the Artin-Schreier operator.
    NuMember { form: String },
    /// The logarithmic form of a symbol such as "{x, y+1}".
    Dlog { symbol: String },
    /// Write a top-degree form in nu as a sum of dlogs of symbols.
    DecomposeNu { form: String },
    /// Write a form in nu divisible by dlog(a_1)^...^dlog(a_n) as dlogs of symbols whose entries generate each a_i.
    KernelDecompose {
        form: String,
        /// Distinguished element; repeat or separate with commas.
        #[arg(long = "a", required = true, value_delimiter = ',')]
        a: Vec<String>,
    },
    #[command(subcommand)]
    Hypersurface(HypersurfaceCommand),
    /// Run a quick randomized self-check.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum HypersurfaceCommand {
    /// Invariants and function field of a hypersurface such as "T1^2 + x*T2^2 + y".
    Analyze { poly: String },
    /// Randomized check that symbols die in the function field exactly when the predicate holds.
    KernelCheck {
        poly: String,
        /// Degree of the symbols checked.
        #[arg(long)]
        m: usize,
        /// Check this symbol instead of random ones.
        #[arg(long)]
        symbol: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::IsExact { .. } => "is-exact",
            Command::NuMember { .. } => "nu-member",
            Command::Dlog { .. } => "dlog",
            Command::DecomposeNu { .. } => "decompose-nu",
            Command::KernelDecompose { .. } => "kernel-decompose",
            Command::Hypersurface(HypersurfaceCommand::Analyze { .. }) => "hypersurface analyze",
            Command::Hypersurface(HypersurfaceCommand::KernelCheck { .. }) => "hypersurface kernel-check",
            Command::Selftest => "selftest",
        }
    }
}

/// A produced result; `negative` selects exit code 1.
struct Outcome {
    negative: bool,
    result: Value,
    text: Vec<String>,
}

impl Outcome {
    fn new(negative: bool, result: Value, text: Vec<String>) -> Self {
        Outcome { negative, result, text }
    }
}

fn read_input(arg: &str) -> Result<String> {
    if arg != "-" {
        return Ok(arg.to_string());
    }
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Error::Parse { line: 1, column: 1, message: format!("cannot read stdin: {e}") })?;
    Ok(s.trim().to_string())
}

fn symbol_strings(symbols: &[PureSymbol]) -> Value {
    symbols.iter().map(|s| s.entries.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect()
}

fn lifted(u: &DifferentialForm, dec: &SymbolDecomposition) -> Result<DifferentialForm> {
    if dec.context() == u.frame().ctx() {
        Ok(u.clone())
    } else {
        u.restrict_constants_to(&dec.frame)
    }
}

fn decomposition_text(dec: &SymbolDecomposition) -> Vec<String> {
    let mut text = vec![format!("extension degree: {}", dec.extension.d), format!("symbols: {}", dec.symbols.len())];
    text.extend(dec.symbols.iter().map(|s| format!("  {s}")));
    text
}

fn run(cli: &Cli, ctx: &FieldContext) -> Result<Outcome> {
    match &cli.command {
        Command::IsExact { form } => {
            let u = parse::parse_form(&read_input(form)?, ctx)?;
            let v = is_exact(&u)?;
            Ok(Outcome::new(!v, json!({ "exact": v }), vec![format!("exact: {v}")]))
        }
        Command::NuMember { form } => {
            let u = parse::parse_form(&read_input(form)?, ctx)?;
            let v = nu_member(&u)?;
            Ok(Outcome::new(!v, json!({ "member": v }), vec![format!("in nu: {v}")]))
        }
        Command::Dlog { symbol } => {
            let s = parse::parse_symbol(&read_input(symbol)?, ctx)?;
            let u = dlog_symbol(&s, &Frame::standard(ctx))?;
            let text = vec![format!("{s} -> {u}")];
            Ok(Outcome::new(false, json!({ "symbol": symbol_strings(&[s]).get(0).cloned(), "degree": u.degree(), "form": u.to_string() }), text))
        }
        Command::DecomposeNu { form } => {
            let u = parse::parse_form(&read_input(form)?, ctx)?;
            let dec = match prop41_decompose(&u) {
                Err(Error::NotInNu) => return Ok(not_in_nu()),
                r => r?,
            };
            let verified = dec.dlog_sum()? == lifted(&u, &dec)?;
            let result = json!({
                "symbols": symbol_strings(&dec.symbols),
                "extension_degree": dec.extension.d,
                "extension": dec.extension.description,
                "verified": verified,
            });
            Ok(Outcome::new(!verified, result, decomposition_text(&dec)))
        }
        Command::KernelDecompose { form, a } => {
            let u = parse::parse_form(&read_input(form)?, ctx)?;
            let a = a.iter().map(|t| parse::parse_element(t, ctx)).collect::<Result<Vec<_>>>()?;
            let dec = match thm14_decompose(&u, &a) {
                Err(Error::NotInNu) => return Ok(not_in_nu()),
                Err(Error::NotInWedgeIdeal) => {
                    let text = vec!["form is not divisible by the distinguished dlogs".to_string()];
                    return Ok(Outcome::new(true, json!({ "in_wedge_ideal": false }), text));
                }
                r => r?,
            };
            let verified = dec.dlog_sum()? == lifted(&u, &dec)?
                && dec.certificates.iter().all(|c| c.in_wedge_ideal && c.contains.iter().all(|&b| b));
            let certificates: Vec<Value> =
                dec.certificates.iter().map(|c| json!({ "contains": c.contains, "in_wedge_ideal": c.in_wedge_ideal })).collect();
            let result = json!({
                "symbols": symbol_strings(&dec.symbols),
                "extension_degree": dec.extension.d,
                "certificates": certificates,
                "verified": verified,
            });
            Ok(Outcome::new(!verified, result, decomposition_text(&dec)))
        }
        Command::Hypersurface(HypersurfaceCommand::Analyze { poly }) => {
            let f = parse::parse_hypersurface(&read_input(poly)?, ctx)?;
            let an = analyze_hypersurface(&f)?;
            Ok(analysis_outcome(&an))
        }
        Command::Hypersurface(HypersurfaceCommand::KernelCheck { poly, m, symbol }) => {
            let f = parse::parse_hypersurface(&read_input(poly)?, ctx)?;
            let an = analyze_hypersurface(&f)?;
            match symbol {
                Some(s) => check_symbol(&an, &parse::parse_symbol(&read_input(s)?, ctx)?),
                None => {
                    let report = kernel_verify_instance(&an, *m, cli.trials, cli.seed)?;
                    let result = json!({
                        "m": report.m,
                        "n": report.n,
                        "trials": report.trials,
                        "predicate_true": report.predicate_true,
                        "predicate_false": report.predicate_false,
                        "zero_dlog": report.zero_dlog,
                        "inclusion_checked": report.inclusion_checked,
                        "violations": report.violations,
                        "ok": report.ok(),
                    });
                    let mut text = vec![
                        format!("m = {}, n = {}", report.m, report.n),
                        format!("predicate true: {} (all restrict to 0)", report.predicate_true),
                        format!("predicate false: {} (all restrict to nonzero)", report.predicate_false),
                        format!("zero dlog skipped: {}", report.zero_dlog),
                        format!("omega ^ eta checked: {}", report.inclusion_checked),
                    ];
                    text.extend(report.violations.iter().map(|v| format!("violation: {v}")));
                    Ok(Outcome::new(!report.ok(), result, text))
                }
            }
        }
        Command::Selftest => selftest(cli.seed, cli.trials),
    }
}

fn not_in_nu() -> Outcome {
    Outcome::new(true, json!({ "member": false }), vec!["form is not in nu".to_string()])
}

fn analysis_outcome(an: &HypersurfaceAnalysis) -> Outcome {
    let strings = |v: &[milnor_forms::FieldElement]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>();
    let base = an.poly.base();
    let fx = an.fx.as_ref().map(|qf| {
        json!({
            "s_variable": an.poly.tvars()[qf.s_variable()],
            "g": qf.g().to_string(),
            "pivot": base.vars()[qf.pivot()],
            "basis": qf.basis_names(),
        })
    });
    let result = json!({
        "polynomial": an.poly.to_string(),
        "variables": an.poly.tvars(),
        "geometrically_nonreduced": an.geom_nonreduced,
        "coefficient_ratios": strings(&an.coeff_ratios),
        "gens": strings(&an.norm_gens),
        "n": an.n,
        "function_field": fx,
        "function_field_error": an.fx_error.as_ref().map(|e| e.to_string()),
    });
    let mut text = vec![
        format!("f = {}", an.poly),
        format!("geometrically nonreduced: {}", an.geom_nonreduced),
        format!("norm field generators: [{}] (n = {})", strings(&an.norm_gens).join(", "), an.n),
    ];
    match (&an.fx, &an.fx_error) {
        (Some(qf), _) => text.push(format!("function field: s^{} = {}, p-basis [{}]", base.p(), qf.g(), qf.basis_names().join(", "))),
        (None, Some(e)) => text.push(format!("no function field: {e}")),
        (None, None) => {}
    }
    Outcome::new(false, result, text)
}

fn check_symbol(an: &HypersurfaceAnalysis, s: &PureSymbol) -> Result<Outcome> {
    let qf = an.fx.as_ref().ok_or(Error::MissingFunctionField)?;
    let frame = Frame::standard(an.poly.base());
    let u = dlog_symbol(s, &frame)?;
    let predicate = symbol_in_kernel_predicate(s, an)?;
    let restricted = restrict_form_to_fx(&u, qf)?;
    let dies = restricted.is_zero();
    let consistent = u.is_zero() || predicate == dies;
    let result = json!({
        "symbol": symbol_strings(std::slice::from_ref(s)).get(0).cloned(),
        "predicate": predicate,
        "dlog_zero": u.is_zero(),
        "restriction_zero": dies,
        "restriction": restricted.format(qf),
        "consistent": consistent,
    });
    let text = vec![
        format!("predicate: {predicate}"),
        format!("restriction: {}", restricted.format(qf)),
        format!("consistent: {consistent}"),
    ];
    Ok(Outcome::new(!consistent, result, text))
}

fn selftest(seed: u64, trials: usize) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut record = |name: &str, passed: usize, total: usize| checks.push((name.to_string(), passed, total));

    for p in [2, 3] {
        let ctx = FieldContext::with_names(p, 1, &["x", "y"])?;
        let frame = Frame::standard(&ctx);
        let mut passed = 0;
        for i in 0..trials {
            let u = random::form(&mut rng, &frame, i % 2, 3)?;
            let du = u.differential()?;
            let mut ok = du.differential()?.is_zero();
            let mut sum = DifferentialForm::zero(&frame, u.degree());
            for c in u.components()?.values() {
                sum = sum.add(c)?;
            }
            ok &= sum == u;
            passed += ok as usize;
        }
        record(&format!("d^2 = 0 and component sum, p = {p}"), passed, trials);
    }

    let ctx = FieldContext::with_names(2, 1, &["x", "y"])?;
    let frame = Frame::standard(&ctx);
    let mut passed = 0;
    for i in 0..trials {
        let s = random::symbol(&mut rng, &ctx, 1 + i % 2, 2)?;
        passed += nu_member(&dlog_symbol(&s, &frame)?)? as usize;
    }
    record("dlog of symbols lies in nu", passed, trials);

    let mut passed = 0;
    for _ in 0..trials {
        let (_, u) = random::symbol_combination(&mut rng, &frame, 2, 2, 1)?;
        let dec = prop41_decompose(&u)?;
        passed += (dec.extension.d == 1 && dec.dlog_sum()? == u) as usize;
    }
    record("top-degree decomposition round trip, p = 2", passed, trials);

    let f = parse::parse_hypersurface("T1^2 + x*T2^2 + y", &ctx)?;
    let report = kernel_verify_instance(&analyze_hypersurface(&f)?, 2, trials, seed)?;
    record("hypersurface kernel T1^2 + x*T2^2 + y, m = 2", report.ok() as usize, 1);

    let ok = checks.iter().all(|(_, p, t)| p == t);
    let text = checks.iter().map(|(n, p, t)| format!("{} {n}: {p}/{t}", if p == t { "PASS" } else { "FAIL" })).collect();
    let result = json!({
        "checks": checks.iter().map(|(n, p, t)| json!({ "name": n, "passed": p, "total": t })).collect::<Vec<_>>(),
        "ok": ok,
    });
    Ok(Outcome::new(!ok, result, text))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidField(_)
        | Error::UnknownVariable(_)
        | Error::NotTopDegree { .. }
        | Error::DegreeZero
        | Error::ZeroElement
        | Error::ZeroEntry
        | Error::ZeroPolynomial => 2,
        Error::UnsupportedExtension(_) | Error::DegreeOverflow { .. } | Error::ExtensionRequired(_) => 3,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn config_echo(cli: &Cli, ctx: Option<&FieldContext>) -> Value {
    let field = match ctx {
        Some(c) => json!({
            "p": c.p(),
            "e": c.gf().degree(),
            "modulus": c.gf().modulus_string(),
            "vars": c.vars(),
        }),
        None => json!(cli.field),
    };
    json!({ "field": field, "seed": cli.seed, "max_degree": cli.max_degree, "trials": cli.trials })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = parse::parse_field_spec(&cli.field).map(|c| match cli.max_degree {
        Some(b) => c.with_max_degree(b),
        None => c,
    });
    let outcome = ctx.clone().and_then(|c| run(&cli, &c));
    let config = config_echo(&cli, ctx.as_ref().ok());
    let command = cli.command.name();
    match outcome {
        Ok(out) => {
            if cli.json {
                let env = json!({ "schema": 1, "status": "ok", "command": command, "config": config, "result": out.result });
                println!("{}", serde_json::to_string_pretty(&env).expect("serializable"));
            } else {
                for line in &out.text {
                    println!("{line}");
                }
            }
            ExitCode::from(if out.negative { 1 } else { 0 })
        }
        Err(e) => {
            if cli.json {
                let mut err = json!({ "kind": error_kind(&e), "message": e.to_string() });
                if let Error::Parse { line, column, .. } = &e {
                    err["line"] = json!(line);
                    err["column"] = json!(column);
                }
                let env = json!({ "schema": 1, "status": "error", "command": command, "config": config, "error": err });
                println!("{}", serde_json::to_string_pretty(&env).expect("serializable"));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
