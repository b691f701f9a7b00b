use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cmdiv_core::cartan::{c_eps, c_eps_prime, c_matrix, cartan_subgroup, CartanParams, Sign};
use cmdiv_core::classifier::{classify, ClassificationResult, CurveInput};
use cmdiv_core::modmat::{group_closure, FiniteMatrixGroup, Mat2, Modulus, DEFAULT_CLOSURE_CAP};
use cmdiv_core::verifier::{run_suite, Suite, VerifyConfig, DEFAULT_P_MAX};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "cmdiv",
    version,
    about = "Abelian and cyclotomic division fields of CM elliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether Gal(Q(j, E[n]) / Q(j)) is abelian, its structure, and
    /// whether the division field is cyclotomic.
    Classify(ClassifyArgs),
    /// Run the exhaustive verification suites.
    Verify(VerifyArgs),
    /// Build ⟨Cartan subgroup or chosen elements, extra generator⟩ mod n and
    /// describe it.
    Explore(ExploreArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("curve").required(true).args(["jzero", "j1728", "disc"])))]
struct ClassifyArgs {
    /// Curve y^2 = x^3 + D (j = 0).
    #[arg(long, value_name = "D", allow_hyphen_values = true)]
    jzero: Option<i64>,
    /// Curve y^2 = x^3 + A*x (j = 1728).
    #[arg(long, value_name = "A", allow_hyphen_values = true)]
    j1728: Option<i64>,
    /// Fundamental discriminant of the CM field (j not 0 or 1728).
    #[arg(
        long,
        value_name = "DISC",
        allow_hyphen_values = true,
        requires = "conductor"
    )]
    disc: Option<i64>,
    /// Conductor of the CM order.
    #[arg(long, value_name = "F", requires = "disc")]
    conductor: Option<u64>,
    /// Level N, or "all" for every N in 2..=12 (every level reduces to
    /// divisors of 12, so nothing beyond 12 can be abelian).
    #[arg(long, value_name = "N|all", value_parser = parse_levels)]
    n: Levels,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Debug)]
enum Levels {
    One(u64),
    All,
}

fn parse_levels(s: &str) -> Result<Levels, String> {
    if s == "all" {
        return Ok(Levels::All);
    }
    match s.parse::<u64>() {
        Ok(n) if n >= 1 => Ok(Levels::One(n)),
        _ => Err(format!("expected a level >= 1 or \"all\", got {s:?}")),
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// all, lemma33, cor34, lemma35, thm36, images, ladder, fixtures or oracle.
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    suite: Suite,
    /// Largest modulus in the group sweeps (defaults: 20 for lemma33/cor34,
    /// 30 for thm36).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=256))]
    n_max: Option<u64>,
    /// Largest prime used by the finite-field oracle.
    #[arg(long, default_value_t = DEFAULT_P_MAX, value_parser = clap::value_parser!(u64).range(5..=100_000))]
    p_max: u64,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
        .map_err(|e: cmdiv_core::verifier::UnknownSuite| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AdjoinArg {
    /// c_1 = [[-1, 0], [phi, 1]]
    C1,
    /// c_-1 = [[1, 0], [phi, -1]]
    CepsMinus,
    /// [[0, 1], [1, 0]]
    Cprime,
    None,
}

#[derive(Args)]
struct ExploreArgs {
    /// Numerator of delta.
    #[arg(long, allow_hyphen_values = true)]
    delta: i64,
    /// Denominator of delta; must be invertible mod n.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    delta_den: i64,
    #[arg(long, allow_hyphen_values = true)]
    phi: i64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=65536))]
    n: u64,
    /// Extra generator adjoined to the Cartan part.
    #[arg(long, value_enum, default_value_t = AdjoinArg::C1)]
    adjoin: AdjoinArg,
    /// Cartan coordinates "a,b;a,b;..." used instead of the whole Cartan
    /// subgroup.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_generators)]
    generators: Option<CartanCoords>,
    /// Print JSON, including every element.
    #[arg(long)]
    json: bool,
}

/// Parsed `--generators` list, wrapped so clap treats it as one value.
#[derive(Clone, Debug)]
struct CartanCoords(Vec<(i64, i64)>);

fn parse_generators(s: &str) -> Result<CartanCoords, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| format!("expected a,b in {pair:?}"))?;
            let a = a.trim().parse().map_err(|_| format!("bad integer {a:?}"))?;
            let b = b.trim().parse().map_err(|_| format!("bad integer {b:?}"))?;
            Ok((a, b))
        })
        .collect::<Result<_, _>>()
        .map(CartanCoords)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(args) => cmd_classify(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Explore(args) => cmd_explore(&args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn curve_from(args: &ClassifyArgs) -> Result<CurveInput, String> {
    let curve = match (args.jzero, args.j1728, args.disc, args.conductor) {
        (Some(d), None, None, None) => CurveInput::jzero(d),
        (None, Some(a), None, None) => CurveInput::j1728(a),
        (None, None, Some(disc), Some(f)) => CurveInput::general_cm(disc, f),
        _ => return Err("give exactly one of --jzero, --j1728 or --disc/--conductor".into()),
    };
    curve.map_err(|e| e.to_string())
}

fn result_json(r: &ClassificationResult, with_level: bool) -> Value {
    let mut v = json!({
        "abelian": r.abelian,
        "structure": r.structure,
        "cyclotomic": r.cyclotomic,
    });
    if with_level {
        v["n"] = json!(r.n);
    }
    v
}

fn cmd_classify(args: &ClassifyArgs) -> Result<ExitCode, String> {
    let curve = curve_from(args)?;
    let levels: Vec<u64> = match args.n {
        Levels::One(n) => vec![n],
        Levels::All => (2..=12).collect(),
    };
    let results = levels
        .iter()
        .map(|&n| classify(&curve, n).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if args.json {
        let out = match args.n {
            Levels::One(_) => result_json(&results[0], false),
            Levels::All => Value::Array(results.iter().map(|r| result_json(r, true)).collect()),
        };
        println!("{out}");
    } else {
        println!("curve: {curve}");
        for r in &results {
            let verdict = if r.abelian { "abelian" } else { "non-abelian" };
            let cyc = if r.cyclotomic {
                "cyclotomic"
            } else {
                "not cyclotomic"
            };
            println!("n = {}: {verdict}, structure {}, {cyc}", r.n, r.structure);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let config = VerifyConfig {
        n_max: args.n_max,
        p_max: args.p_max,
    };
    let report = run_suite(args.suite, &config);
    let doc = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
        std::fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if args.json {
        println!("{doc}");
    } else {
        println!("{report}");
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn group_json(g: &FiniteMatrixGroup, with_elements: bool) -> Value {
    let mut v = json!({
        "order": g.order(),
        "abelian": g.is_abelian(),
        "invariants": g.abelian_invariants().ok(),
        "is_s3": g.is_isomorphic_s3(),
        "element_orders": g.order_statistics(),
    });
    if with_elements {
        v["elements"] = g.elements().map(|m| m.entries().to_vec()).collect();
    }
    v
}

fn describe(name: &str, g: &FiniteMatrixGroup) {
    let kind = match g.abelian_invariants() {
        Ok(t) => format!("abelian, {t}"),
        Err(_) if g.is_isomorphic_s3() => "non-abelian, S3".to_string(),
        Err(_) => "non-abelian".to_string(),
    };
    println!("{name}: order {}, {kind}", g.order());
}

fn cmd_explore(args: &ExploreArgs) -> Result<ExitCode, String> {
    let n = Modulus::new(args.n).map_err(|e| e.to_string())?;
    let params = CartanParams::with_fraction(args.delta, args.delta_den, args.phi)
        .map_err(|e| e.to_string())?;
    let delta = params.delta_mod(n).map_err(|e| e.to_string())?;
    let cartan = cartan_subgroup(&params, n).map_err(|e| e.to_string())?;

    let mut gens: Vec<Mat2> = match &args.generators {
        None => cartan.generators().to_vec(),
        Some(CartanCoords(pairs)) => pairs
            .iter()
            .map(|&(a, b)| c_matrix(a, b, &params, n).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?,
    };
    match args.adjoin {
        AdjoinArg::C1 => gens.push(c_eps(Sign::Plus, &params, n)),
        AdjoinArg::CepsMinus => gens.push(c_eps(Sign::Minus, &params, n)),
        AdjoinArg::Cprime => gens.push(c_eps_prime(Sign::Plus, n)),
        AdjoinArg::None => {}
    }
    let group = group_closure(n, &gens, DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;

    if args.json {
        let doc = json!({
            "n": args.n,
            "delta": {"num": args.delta, "den": args.delta_den, "mod_n": delta},
            "phi": args.phi,
            "adjoin": format!("{:?}", args.adjoin).to_lowercase(),
            "cartan": group_json(&cartan, false),
            "group": group_json(&group, true),
        });
        println!("{doc}");
    } else {
        println!(
            "delta = {}/{} = {delta} mod {}, phi = {}",
            args.delta, args.delta_den, args.n, args.phi
        );
        describe("cartan subgroup", &cartan);
        describe("generated group", &group);
        let counts: Vec<String> = group
            .order_statistics()
            .iter()
            .map(|(ord, count)| format!("{ord}:{count}"))
            .collect();
        println!("elements by order: {}", counts.join(" "));
    }
    Ok(ExitCode::SUCCESS)
}
