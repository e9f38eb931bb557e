//! `masf`: command-line front end to `masf-core`.

mod input;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use masf_core::affine_weyl::{AffineWeylGroup, ElementDoc};
use masf_core::intmat::Rational;
use masf_core::invariants::{kottwitz_class, mv_dimension, newton_point, partial_flag_dimension, FiberQuery, FiberReport};
use masf_core::loop_group::{iwahori_cell, iwahori_cell_fast, smith_cartan_exact, LoopMatrix, MatrixGroup};
use masf_core::oracle::{fiber_census, CensusConfig};
use masf_core::root_data::{Pi1Class, RootDatumDoc};
use masf_core::vinberg::{
    sl2_chi_plus, sl2_ext_discriminant, sl2_monoid_membership, sl3_vinberg_check, Sl2Membership, Sl2MembershipLabel,
    VinbergSL2Point, VinbergSL3Point,
};
use masf_core::{selftest, Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use input::*;
use render::{error_value, render, Format};

#[derive(Parser, Debug)]
#[command(name = "masf", version, about = "Parabolic multiplicative affine Springer fibers: admissible sets, invariants, censuses")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Default precision for Laurent series without an explicit O(t^k) term, and working precision.
    #[arg(long, global = true, default_value_t = 16, allow_hyphen_values = true)]
    prec: i64,
    /// Input document: inline JSON, a file path, or `-` for stdin. Flags override its fields.
    #[arg(long, global = true)]
    input: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a root datum.
    Datum(DatumFlags),
    /// The admissible set Adm(λ).
    Adm(AdmFlags),
    /// Non-emptiness verdict with the invariants of γ.
    Nonempty(FiberFlags),
    /// Fiber dimension; fails with EmptyFiber on empty queries.
    Dim(FiberFlags),
    /// MV-cycle dimension terms over the finite Weyl group.
    MvDim(MvFlags),
    /// Discriminant valuation of a split γ, root by root.
    Disc(DiscFlags),
    /// Iwahori double coset of a loop-group matrix.
    Cell(MatrixFlags),
    /// Cartan invariant (elementary divisors) of a loop-group matrix.
    Smith(MatrixFlags),
    /// Vinberg monoid checks.
    #[command(subcommand)]
    Vinberg(VinbergCommand),
    /// Finite-field point census of a GL2/SL2 fiber.
    Census(CensusFlags),
    /// Run the built-in invariant suites.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum VinbergCommand {
    /// Check the defining relations of an SL3 monoid point.
    Check(Sl3Flags),
    /// Membership of an SL2 monoid point in the level-n restricted monoids.
    Member(MemberFlags),
}

#[derive(Args, Debug)]
struct DatumFlags {
    /// Preset name (SL2, PGL2, GL2, SL3, GL3, Sp4) or an inline datum document.
    #[arg(long)]
    datum: Option<String>,
}

#[derive(Args, Debug)]
struct AdmFlags {
    #[arg(long)]
    datum: Option<String>,
    /// Dominant coweight, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    /// Only the Bruhat-maximal elements W·t^λ.
    #[arg(long)]
    maximal: bool,
}

#[derive(Args, Debug)]
struct GammaFlags {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma_mu: Option<Vec<i64>>,
    /// Unit parts as Laurent series, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma_units: Option<Vec<String>>,
    /// Coefficient field of the units: Q (default) or GF(p).
    #[arg(long)]
    gamma_field: Option<String>,
    /// Newton point of a non-split γ, entries like `1/2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma_nu: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma_kappa: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_d: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_c: Option<i64>,
}

impl GammaFlags {
    fn value(&self) -> Value {
        let nu = self.gamma_nu.as_ref().map(|xs| {
            xs.iter()
                .map(|s| s.trim().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(s.clone())))
                .collect::<Vec<_>>()
        });
        json!({
            "mu": self.gamma_mu, "units": self.gamma_units, "field": self.gamma_field,
            "nu": nu, "kappa": self.gamma_kappa, "d": self.gamma_d, "c": self.gamma_c,
        })
    }
}

#[derive(Args, Debug)]
struct FiberFlags {
    #[arg(long)]
    datum: Option<String>,
    #[command(flatten)]
    gamma: GammaFlags,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    /// spherical (default) or iwahori.
    #[arg(long)]
    level: Option<String>,
    /// closed (default) or open.
    #[arg(long)]
    variant: Option<String>,
}

impl FiberFlags {
    fn value(&self) -> Result<Value> {
        Ok(json!({
            "datum": datum_flag(&self.datum)?, "gamma": self.gamma.value(), "lambda": self.lambda,
            "level": self.level, "variant": self.variant,
        }))
    }
}

#[derive(Args, Debug)]
struct MvFlags {
    #[arg(long)]
    datum: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<i64>>,
    /// Finite Weyl word in 1-based simple reflections, e.g. `1,2`; `e` for the identity.
    #[arg(long)]
    w: Option<String>,
}

#[derive(Args, Debug)]
struct DiscFlags {
    #[arg(long)]
    datum: Option<String>,
    #[command(flatten)]
    gamma: GammaFlags,
    /// Optional dominant coweight; adds d₊ to the report.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
}

#[derive(Args, Debug)]
struct MatrixFlags {
    /// GL_n or SL_n datum; GL_n of the matrix size when absent.
    #[arg(long)]
    datum: Option<String>,
    /// Rows as a JSON array of arrays of Laurent strings.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    field: Option<String>,
    /// Cell algorithm: invariant (default) or fast.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct Sl3Flags {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// 3×3 JSON matrix of Laurent strings.
    #[arg(long)]
    a1: Option<String>,
    /// 3×3 JSON matrix of Laurent strings.
    #[arg(long)]
    a2: Option<String>,
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args, Debug)]
struct MemberFlags {
    /// 2×2 JSON matrix of Laurent strings.
    #[arg(long)]
    matrix: Option<String>,
    /// Level: the valuation of the determinant.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i64>,
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args, Debug)]
struct CensusFlags {
    #[arg(long)]
    datum: Option<String>,
    #[command(flatten)]
    gamma: GammaFlags,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<i64>>,
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    /// Residue field size (3 or 5 for rank one).
    #[arg(long)]
    q: Option<u64>,
    /// Jet level N (1..=6).
    #[arg(long)]
    jet_level: Option<u32>,
    /// Extra cell length beyond ⟨2ρ,λ⟩; default 2|d|+2.
    #[arg(long)]
    slack: Option<usize>,
    /// Cap on enumerated points.
    #[arg(long)]
    budget: Option<u64>,
    /// Second prime for the dimension estimate.
    #[arg(long)]
    companion: Option<u64>,
    #[arg(long)]
    no_estimate: bool,
    #[arg(long)]
    no_surjectivity: bool,
}

fn word_value(w: &Option<String>) -> Result<Value> {
    let Some(w) = w else { return Ok(Value::Null) };
    let w = w.trim();
    if w.is_empty() || w == "e" {
        return Ok(json!([]));
    }
    let letters = w
        .split(',')
        .map(|s| s.trim().trim_start_matches('s').parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Parse(format!("bad Weyl word `{w}`")))?;
    Ok(json!(letters))
}

fn rational(r: Rational) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

#[derive(Serialize)]
struct DatumReport {
    name: String,
    rank: usize,
    weight_lattice_rank: usize,
    cartan: Vec<Vec<i64>>,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    positive_roots: Vec<Vec<i64>>,
    two_rho: Vec<i64>,
    weyl_order: usize,
    pi1_moduli: Vec<i64>,
    document: RootDatumDoc,
}

#[derive(Serialize)]
struct MvRow {
    w: Vec<usize>,
    w_lambda_length: usize,
    value: Value,
}

#[derive(Serialize)]
struct MvReport {
    lambda: Vec<i64>,
    mu: Vec<i64>,
    partial_flag_dimension: usize,
    rows: Vec<MvRow>,
    max: Value,
}

#[derive(Serialize)]
struct RootTerm {
    root: Vec<i64>,
    term: i64,
}

#[derive(Serialize)]
struct DiscReport {
    d: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_plus: Option<i64>,
    newton: Vec<i64>,
    kottwitz: Pi1Class,
    root_terms: Vec<RootTerm>,
}

#[derive(Serialize)]
struct CellReport {
    #[serde(flatten)]
    cell: ElementDoc,
    method: &'static str,
}

#[derive(Serialize)]
struct SmithReport {
    cartan: Vec<i64>,
}

#[derive(Serialize)]
struct CheckReport {
    relations_hold: bool,
}

#[derive(Serialize)]
struct MemberReport {
    #[serde(flatten)]
    membership: Sl2Membership,
    label: Sl2MembershipLabel,
    det: String,
    trace: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ext_discriminant: Option<i64>,
}

/// Rendered output and exit status.
struct Outcome {
    text: String,
    status: u8,
}

fn ok<T: Serialize>(v: &T, f: Format) -> Result<Outcome> {
    Ok(Outcome { text: render(v, f), status: 0 })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    let prec = cli.prec;
    if prec < 1 {
        return Err(Error::InvalidArgument(format!("--prec must be positive, got {prec}")));
    }
    let inp = cli.input.as_deref();
    match &cli.command {
        Command::Datum(a) => {
            let i: DatumInput = resolve(json!({"datum": datum_flag(&a.datum)?}), inp)?;
            let d = i.datum.build()?;
            let positive_roots = (0..d.num_roots()).filter(|&b| d.is_positive_root(b)).map(|b| d.root(b).to_vec()).collect();
            ok(
                &DatumReport {
                    name: d.name().to_string(),
                    rank: d.rank(),
                    weight_lattice_rank: d.weight_lattice_rank(),
                    cartan: d.cartan().to_vec(),
                    simple_roots: d.simple_roots().to_vec(),
                    simple_coroots: d.simple_coroots().to_vec(),
                    positive_roots,
                    two_rho: d.two_rho().to_vec(),
                    weyl_order: d.weyl_order(),
                    pi1_moduli: d.pi1_moduli().to_vec(),
                    document: d.to_doc(),
                },
                f,
            )
        }
        Command::Adm(a) => {
            let flags = json!({
                "datum": datum_flag(&a.datum)?, "lambda": a.lambda, "maximal": a.maximal.then_some(true),
            });
            let i: AdmInput = resolve(flags, inp)?;
            let d = i.datum.build()?;
            let aw = AffineWeylGroup::new(&d);
            let xs = if i.maximal { aw.adm_maximal(&i.lambda)? } else { aw.admissible_set(&i.lambda)? };
            let docs: Vec<ElementDoc> = xs.iter().map(|x| aw.describe(x)).collect();
            ok(&docs, f)
        }
        Command::Nonempty(a) | Command::Dim(a) => {
            let i: FiberInput = resolve(a.value()?, inp)?;
            let d = i.datum.build()?;
            let gamma = i.gamma.invariants(&d, prec)?;
            let q = FiberQuery::new(&d, gamma, i.lambda, i.level, i.variant)?;
            let report: FiberReport = q.report(&d)?;
            if matches!(cli.command, Command::Dim(_)) && !report.nonempty {
                return Err(Error::EmptyFiber);
            }
            ok(&report, f)
        }
        Command::MvDim(a) => {
            let flags = json!({"datum": datum_flag(&a.datum)?, "lambda": a.lambda, "mu": a.mu, "w": word_value(&a.w)?});
            let i: MvInput = resolve(flags, inp)?;
            let d = i.datum.build()?;
            d.require_dominant(&i.lambda)?;
            d.check_coweight(&i.mu)?;
            let ws: Vec<usize> = match &i.w {
                Some(word) => {
                    if let Some(&bad) = word.iter().find(|&&s| s == 0 || s > d.rank()) {
                        return Err(Error::InvalidArgument(format!("simple reflection s{bad} out of range")));
                    }
                    let zero: Vec<usize> = word.iter().map(|s| s - 1).collect();
                    vec![d.from_word(&zero)]
                }
                None => (0..d.weyl_order()).collect(),
            };
            let stab = d.stabilizer_simple(&i.lambda);
            let mut rows = Vec::new();
            let mut best: Option<Rational> = None;
            for w in ws {
                let v = mv_dimension(&d, &i.lambda, &i.mu, w)?;
                best = Some(best.map_or(v, |b| b.max(v)));
                rows.push(MvRow {
                    w: d.weyl(w).word.iter().map(|s| s + 1).collect(),
                    w_lambda_length: d.length(d.min_coset_rep(w, &stab)),
                    value: rational(v),
                });
            }
            let report = MvReport {
                partial_flag_dimension: partial_flag_dimension(&d, &i.lambda),
                lambda: i.lambda,
                mu: i.mu,
                rows,
                max: best.map(rational).unwrap_or(Value::Null),
            };
            ok(&report, f)
        }
        Command::Disc(a) => {
            let flags = json!({"datum": datum_flag(&a.datum)?, "gamma": a.gamma.value(), "lambda": a.lambda});
            let i: DiscInput = resolve(flags, inp)?;
            let d = i.datum.build()?;
            let g = i.gamma.build(&d, prec)?;
            let root_terms = (0..d.num_roots())
                .map(|b| Ok(RootTerm { root: d.root(b).to_vec(), term: g.root_term(&d, b)? }))
                .collect::<Result<Vec<_>>>()?;
            let dv: i64 = root_terms.iter().map(|r| r.term).sum();
            let d_plus = match &i.lambda {
                Some(l) => {
                    d.require_dominant(l)?;
                    Some(d.pairing(d.two_rho(), l) + dv)
                }
                None => None,
            };
            ok(&DiscReport { d: dv, d_plus, newton: newton_point(&d, &g), kottwitz: kottwitz_class(&d, &g), root_terms }, f)
        }
        Command::Cell(a) | Command::Smith(a) => {
            let flags = json!({
                "datum": datum_flag(&a.datum)?, "matrix": json_flag("matrix", &a.matrix)?,
                "field": a.field, "method": a.method,
            });
            let i: MatrixInput = resolve(flags, inp)?;
            let (d, g) = i.build(prec)?;
            if matches!(cli.command, Command::Smith(_)) {
                return ok(&SmithReport { cartan: smith_cartan_exact(&g)? }, f);
            }
            let aw = AffineWeylGroup::new(&d);
            let (cell, method) = match i.method {
                CellMethod::Invariant => (iwahori_cell(&d, &g)?, "invariant"),
                CellMethod::Fast => (iwahori_cell_fast(&d, &g, prec)?, "fast"),
            };
            ok(&CellReport { cell: aw.describe(&cell), method }, f)
        }
        Command::Vinberg(VinbergCommand::Check(a)) => {
            let flags = json!({
                "x": a.x, "y": a.y, "a1": json_flag("a1", &a.a1)?, "a2": json_flag("a2", &a.a2)?, "field": a.field,
            });
            let i: Sl3Input = resolve(flags, inp)?;
            let field = i.field()?;
            let p = VinbergSL3Point {
                x: series(&i.x, field, prec)?,
                y: series(&i.y, field, prec)?,
                a1: LoopMatrix::new_unchecked(3, parse_square(&i.a1, 3, field, prec)?, MatrixGroup::GL)?,
                a2: LoopMatrix::new_unchecked(3, parse_square(&i.a2, 3, field, prec)?, MatrixGroup::GL)?,
            };
            ok(&CheckReport { relations_hold: sl3_vinberg_check(&p)? }, f)
        }
        Command::Vinberg(VinbergCommand::Member(a)) => {
            let flags = json!({"matrix": json_flag("matrix", &a.matrix)?, "n": a.n, "field": a.field});
            let i: MemberInput = resolve(flags, inp)?;
            let field = i.field()?;
            let entries = parse_square(&i.matrix, 2, field, prec)?;
            let p = VinbergSL2Point::new(entries.chunks(2).map(|r| r.to_vec()).collect())?;
            let membership = sl2_monoid_membership(&p, i.n)?;
            let (det, trace) = sl2_chi_plus(&p);
            let report = MemberReport {
                membership,
                label: membership.label(),
                ext_discriminant: sl2_ext_discriminant(&det, &trace).ok(),
                det: det.to_string(),
                trace: trace.to_string(),
            };
            ok(&report, f)
        }
        Command::Census(a) => {
            let flags = json!({
                "datum": datum_flag(&a.datum)?, "gamma": a.gamma.value(), "lambda": a.lambda,
                "level": a.level, "variant": a.variant, "q": a.q, "jet_level": a.jet_level,
                "slack": a.slack, "budget": a.budget, "companion": a.companion,
                "estimate_dimension": a.no_estimate.then_some(false),
                "check_surjectivity": a.no_surjectivity.then_some(false),
            });
            let i: CensusInput = resolve(flags, inp)?;
            let d = i.datum.build()?;
            let g = i.gamma.build(&d, prec)?;
            let mut config = CensusConfig::new(i.q, i.jet_level);
            config.slack = i.slack;
            if let Some(b) = i.budget {
                config.budget = b;
            }
            config.companion = i.companion;
            config.estimate_dimension = i.estimate_dimension;
            config.check_surjectivity = i.check_surjectivity;
            eprintln!("census: {} λ={:?} q={} N={} ...", d.name(), i.lambda, i.q, i.jet_level);
            let report = fiber_census(&d, &g, &i.lambda, i.level, i.variant, &config)?;
            eprintln!("census: {} points enumerated, {} solutions", report.points_enumerated, report.total);
            ok(&report, f)
        }
        Command::Selftest => {
            let report = selftest::run();
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", c.module, c.name);
            }
            Ok(Outcome { text: render(&report, f), status: if report.passed { 0 } else { 1 } })
        }
    }
}

/// A closed pipe downstream is not an error of ours.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_error(name: &str, message: &str, code: u8, format: Format) {
    let v = error_value(name, message, code as i32);
    emit(&render(&v, format));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(std::io::stdout(), "{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            let format = if std::env::args().any(|a| a == "tsv" || a == "--format=tsv") { Format::Tsv } else { Format::Json };
            print_error("Usage", e.kind().as_str().unwrap_or("invalid invocation"), 2, format);
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            emit(&out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            let code = if e.is_mathematical() { 3 } else { 2 };
            print_error(e.name(), &e.to_string(), code, cli.format);
            ExitCode::from(code)
        }
    }
}
