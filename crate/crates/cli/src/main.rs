use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use unres_core::algebra::{
    evaluation_tensor, gorenstein_quotient, is_gorenstein, multiplication_tensor, FiniteAlgebra, Functional,
};
use unres_core::analysis::{analyze, border_rank_status, build_cactus_tensor, verify_cactus_certificate, CactusCertificate};
use unres_core::hompoly::HomPoly;
use unres_core::json::{
    algebra_to_json, border_rank_status_to_json, functional_to_json, matrix_to_json, parse_algebra,
    parse_functional, parse_matrix, parse_tensor, partial_certificate_to_json, scalar_to_json,
    segre_certificate_to_json, symmetric_to_json, tensor_to_json, TensorDocument,
};
use unres_core::repro::{run_reproduction, EXAMPLES};
use unres_core::segre::{unrestrict_full, Degeneration, MinorStrategy};
use unres_core::sigma2::{
    bb_motive, census, classify_rank2, compare_census, csigma2_motive_formula, enumerate_fixed_points,
    sigma2_motive_formula, tangent_weights, FixedKind, NormalKind, DEFAULT_SCAN_LIMIT,
};
use unres_core::veronese::{unrestrict_partial, unrestrict_symmetric};
use unres_core::{Scalar, Tensor};

#[derive(Parser)]
#[command(name = "unres", version, about = "Exact unrestriction of tensor degenerations")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concise unrestriction of a Segre-format degeneration.
    Segre(SegreArgs),
    /// Concise unrestriction of a symmetric degeneration (single factor format).
    Veronese(InputArgs),
    /// Concise unrestriction of a partially symmetric degeneration.
    Partial(OrderArgs),
    /// Conciseness, centroid, border rank and structure diagnostics of a constant tensor.
    Analyze(InputArgs),
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    #[command(subcommand)]
    Cactus(CactusCommand),
    #[command(subcommand)]
    Sigma2(Sigma2Command),
    /// Run a registered example (or `all`).
    Repro { name: String },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long)]
    input: PathBuf,
    /// 1-based coordinates in processing order.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
}

#[derive(Args)]
struct SegreArgs {
    #[command(flatten)]
    base: OrderArgs,
    #[arg(long, value_enum, default_value_t = Strategy::LexFirst)]
    strategy: Strategy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    LexFirst,
    LexLast,
    Random,
}

#[derive(Args)]
struct AlgebraArgs {
    /// `k[x,y]/(…)`, or a path to an algebra JSON document.
    #[arg(long)]
    algebra: String,
    /// Tensor order.
    #[arg(short = 'd', long, default_value_t = 3)]
    order: usize,
}

#[derive(Args)]
struct FunctionalArgs {
    #[command(flatten)]
    base: AlgebraArgs,
    /// Coordinates of the functional on the algebra basis, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Vec<String>,
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Multiplication tensor `A^{×(d−1)} → A`.
    Mult(AlgebraArgs),
    /// Evaluation tensor `(a_1, …, a_d) ↦ ε(a_1⋯a_d)`.
    Eval(FunctionalArgs),
    /// Decide whether the algebra is Gorenstein; print a dual generator if so.
    Gorenstein(AlgebraArgs),
    /// Gorenstein quotient by the annihilator of a functional.
    Quotient(FunctionalArgs),
}

#[derive(Subcommand)]
enum CactusCommand {
    /// Tensor of a certificate `{algebra, eps, maps, smoothable}`.
    Build {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Check a certificate against a tensor.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Bb,
    Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variety {
    Csigma2,
    Sigma2,
}

#[derive(Subcommand)]
enum Sigma2Command {
    /// Torus-fixed points with their tangent weights.
    FixedPoints {
        #[arg(short = 'd', long)]
        d: usize,
        /// Only print the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Motive as a polynomial in the Lefschetz class.
    Motive {
        #[arg(short = 'd', long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Via::Bb)]
        via: Via,
        #[arg(long, value_enum, default_value_t = Variety::Csigma2)]
        variety: Variety,
    },
    /// Point count over F_p compared with the motives.
    Count {
        #[arg(short = 'd', long)]
        d: usize,
        #[arg(short = 'p', long)]
        p: u64,
        #[arg(long, env = "UNRES_THREADS")]
        threads: Option<usize>,
        /// Refuse scans larger than this many vectors.
        #[arg(long, default_value_t = DEFAULT_SCAN_LIMIT)]
        limit: u128,
    },
    /// Normal form of a border rank two tensor in (k²)^{⊗d}.
    Classify(InputArgs),
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_tensor(path: &Path) -> Result<TensorDocument> {
    Ok(parse_tensor(&read_json(path)?)?)
}

fn read_constant(path: &Path) -> Result<Tensor<Scalar>> {
    read_tensor(path)?.constant().context("expected a tensor with constant entries")
}

fn zero_based(order: &Option<Vec<usize>>, n: usize) -> Result<Option<Vec<usize>>> {
    let Some(o) = order else { return Ok(None) };
    o.iter()
        .map(|&i| if (1..=n).contains(&i) { Ok(i - 1) } else { bail!("coordinate {i} out of range 1..={n}") })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn read_algebra(source: &str) -> Result<FiniteAlgebra> {
    let path = Path::new(source);
    if path.exists() {
        return Ok(parse_algebra(&read_json(path)?)?);
    }
    Ok(parse_algebra(&Value::String(source.to_string()))?)
}

fn read_functional(a: &FiniteAlgebra, eps: &[String]) -> Result<Functional> {
    let v = Value::Array(eps.iter().map(|s| Value::String(s.clone())).collect());
    let f = parse_functional(&v, a.field(), "/eps")?;
    if f.0.len() != a.dim() {
        bail!("functional has {} coordinates, the algebra has dimension {}", f.0.len(), a.dim());
    }
    Ok(f)
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn segre(args: &SegreArgs, seed: u64) -> Result<Value> {
    let doc = read_tensor(&args.base.input)?;
    let d = Degeneration::new(doc.tensor)?;
    let n = d.dims().len();
    let order = zero_based(&args.base.order, n)?.unwrap_or_else(|| (0..n).collect());
    let strategy = match args.strategy {
        Strategy::LexFirst => MinorStrategy::LexFirst,
        Strategy::LexLast => MinorStrategy::LexLast,
        Strategy::Random => MinorStrategy::Random(seed),
    };
    let mut cert = unrestrict_full(&d, &order, &strategy)?;
    if cert.limit.dims().iter().all(|&m| m == cert.limit.dims()[0]) {
        cert.border_rank_status = border_rank_status(&cert.limit);
    }
    Ok(segre_certificate_to_json(&cert, doc.field))
}

fn veronese(args: &InputArgs) -> Result<Value> {
    let doc = read_tensor(&args.input)?;
    let t = &doc.tensor;
    if t.format().len() != 1 {
        bail!("expected a single symmetric factor, got format {:?}", t.format());
    }
    let run = unrestrict_symmetric(&HomPoly::from_tensor(t))?;
    let mut v = symmetric_to_json(&run);
    let limit = run.limit.to_tensor().as_segre();
    v["border_rank_status"] = border_rank_status_to_json(&border_rank_status(&limit));
    Ok(v)
}

fn partial(args: &OrderArgs) -> Result<Value> {
    let doc = read_tensor(&args.input)?;
    let order = zero_based(&args.order, doc.tensor.coordinates())?;
    let cert = unrestrict_partial(&doc.tensor, order.as_deref())?;
    Ok(partial_certificate_to_json(&cert, doc.field))
}

fn analysis(args: &InputArgs, seed: u64) -> Result<Value> {
    let t = read_constant(&args.input)?;
    let r = analyze(&t, seed);
    let recovered = r.recovered.as_ref().map(|s| {
        json!({
            "algebra": algebra_to_json(&s.algebra),
            "eps": functional_to_json(&s.eps),
            "generators": s.generators.iter().map(functional_to_json).collect::<Vec<_>>(),
            "maps": s.maps.iter().map(matrix_to_json).collect::<Vec<_>>(),
        })
    });
    Ok(json!({
        "dims": t.dims(),
        "concise": r.concise,
        "centroid_dim": r.centroid_dim,
        "centroid_nilpotent": r.centroid_nilpotent,
        "border_rank_status": border_rank_status_to_json(&r.minimal_border_rank),
        "one_generic": r.one_generic,
        "recovered": recovered,
    }))
}

fn algebra(cmd: &AlgebraCommand, seed: u64) -> Result<Value> {
    Ok(match cmd {
        AlgebraCommand::Mult(a) => {
            let alg = read_algebra(&a.algebra)?;
            if a.order < 2 {
                bail!("multiplication tensors have order at least 2");
            }
            tensor_to_json(&multiplication_tensor(&alg, a.order))
        }
        AlgebraCommand::Eval(f) => {
            let alg = read_algebra(&f.base.algebra)?;
            let eps = read_functional(&alg, &f.eps)?;
            if f.base.order < 1 {
                bail!("evaluation tensors have order at least 1");
            }
            tensor_to_json(&evaluation_tensor(&alg, &eps, f.base.order))
        }
        AlgebraCommand::Gorenstein(a) => {
            let alg = read_algebra(&a.algebra)?;
            let g = is_gorenstein(&alg, seed)?;
            json!({
                "dim": alg.dim(),
                "gorenstein": g.is_some(),
                "dual_generator": g.as_ref().map(functional_to_json),
            })
        }
        AlgebraCommand::Quotient(f) => {
            let alg = read_algebra(&f.base.algebra)?;
            let eps = read_functional(&alg, &f.eps)?;
            let q = gorenstein_quotient(&alg, &eps);
            json!({
                "algebra": algebra_to_json(&q.algebra),
                "eps": functional_to_json(&q.eps),
                "projection": matrix_to_json(&q.projection),
                "evaluation_tensor": tensor_to_json(&evaluation_tensor(&q.algebra, &q.eps, f.base.order)),
            })
        }
    })
}

fn read_cactus(path: &Path) -> Result<CactusCertificate> {
    let v = read_json(path)?;
    let algebra = parse_algebra(v.get("algebra").context("certificate needs \"algebra\"")?)?;
    let field = algebra.field();
    let eps = parse_functional(v.get("eps").context("certificate needs \"eps\"")?, field, "/eps")?;
    let maps = v
        .get("maps")
        .and_then(Value::as_array)
        .context("certificate needs a \"maps\" array")?
        .iter()
        .enumerate()
        .map(|(i, m)| parse_matrix(m, field, &format!("/maps/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    if maps.iter().any(|m| m.cols() != algebra.dim()) {
        bail!("every map needs {} columns", algebra.dim());
    }
    let smoothable = v.get("smoothable").and_then(Value::as_bool).unwrap_or(false);
    Ok(CactusCertificate { algebra, eps, maps, smoothable })
}

fn cactus(cmd: &CactusCommand) -> Result<(Value, bool)> {
    Ok(match cmd {
        CactusCommand::Build { cert } => (tensor_to_json(&build_cactus_tensor(&read_cactus(cert)?)?), true),
        CactusCommand::Verify { input, cert } => {
            let t = read_constant(input)?;
            let r = verify_cactus_certificate(&t, &read_cactus(cert)?)?;
            let v = json!({
                "matches": r.matches,
                "cactus_rank_bound": r.cactus_rank_bound,
                "border_rank_bound": r.border_rank_bound,
            });
            (v, r.matches)
        }
    })
}

fn fixed_kind_json(k: &FixedKind) -> Value {
    match k {
        FixedKind::HeightOne { ys } => json!({ "height": 1, "ys": ys.iter().map(|y| y + 1).collect::<Vec<_>>() }),
        FixedKind::HeightTwo { j, kind } => json!({ "height": 2, "j": j + 1, "kind": kind }),
    }
}

fn sigma2(cmd: &Sigma2Command) -> Result<Value> {
    Ok(match cmd {
        Sigma2Command::FixedPoints { d, count_only } => {
            check_degree(*d)?;
            let pts = enumerate_fixed_points(*d);
            if *count_only {
                json!({ "d": d, "count": pts.len() })
            } else {
                let list: Vec<Value> = pts
                    .iter()
                    .map(|fp| {
                        let base: Vec<u8> = (0..*d).map(|i| (fp.base >> i & 1) as u8).collect();
                        json!({ "base_y": base, "kind": fixed_kind_json(&fp.kind), "weights": tangent_weights(fp, *d) })
                    })
                    .collect();
                json!({ "d": d, "count": pts.len(), "points": list })
            }
        }
        Sigma2Command::Motive { d, via, variety } => {
            check_degree(*d)?;
            let m = match (via, variety) {
                (Via::Bb, Variety::Csigma2) => bb_motive(*d, None)?,
                (Via::Formula, Variety::Csigma2) => csigma2_motive_formula(*d),
                (_, Variety::Sigma2) => sigma2_motive_formula(*d),
            };
            json!({ "d": d, "coefficients": m.coeffs(), "polynomial": m.to_string(), "euler": m.eval(1).to_string() })
        }
        Sigma2Command::Count { d, p, threads, limit } => {
            check_degree(*d)?;
            let run = || census(*d, *p, *limit);
            let c = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new().num_threads(*n).build()?.install(run)?,
                None => run()?,
            };
            let cmp = compare_census(&c);
            json!({
                "d": d,
                "p": p,
                "sigma2": { "count": cmp.sigma2_count.to_string(), "motive": cmp.sigma2_motive.to_string() },
                "csigma2": { "count": cmp.csigma2_count.to_string(), "motive": cmp.csigma2_motive.to_string() },
                "concise_on_exactly_one": cmp.concise_on_one,
                "by_concise_count": c.by_concise,
                "matches": cmp.matches(),
            })
        }
        Sigma2Command::Classify(a) => {
            let t = read_constant(&a.input)?;
            match classify_rank2(&t)? {
                None => json!({ "border_rank_at_most_two": false }),
                Some(nf) => json!({
                    "border_rank_at_most_two": true,
                    "kind": match nf.kind { NormalKind::B => "B", NormalKind::C => "C" },
                    "concise": nf.concise.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "discriminant": nf.discriminant.as_ref().map(scalar_to_json),
                    "split_over_q": nf.split_over_q,
                }),
            }
        }
    })
}

fn check_degree(d: usize) -> Result<()> {
    if !(3..=16).contains(&d) {
        bail!("d must lie in 3..=16");
    }
    Ok(())
}

fn repro(name: &str) -> Result<(Value, bool)> {
    let names: Vec<&str> = if name == "all" { EXAMPLES.to_vec() } else { vec![name] };
    let mut reports = Vec::new();
    let mut ok = true;
    for n in names {
        let r = run_reproduction(n).map_err(|e| anyhow::anyhow!("{e}; known examples: {}", EXAMPLES.join(", ")))?;
        ok &= r.passed();
        reports.push(r.to_json());
    }
    let v = if reports.len() == 1 { reports.pop().unwrap() } else { json!({ "passed": ok, "reports": reports }) };
    Ok((v, ok))
}

fn run(cli: &Cli) -> Result<bool> {
    let (value, ok) = match &cli.command {
        Command::Segre(a) => (segre(a, cli.seed)?, true),
        Command::Veronese(a) => (veronese(a)?, true),
        Command::Partial(a) => (partial(a)?, true),
        Command::Analyze(a) => (analysis(a, cli.seed)?, true),
        Command::Algebra(c) => (algebra(c, cli.seed)?, true),
        Command::Cactus(c) => cactus(c)?,
        Command::Sigma2(c) => (sigma2(c)?, true),
        Command::Repro { name } => repro(name)?,
    };
    emit(&cli.out, &value)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
