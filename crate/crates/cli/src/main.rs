//! `jordanpers`: batch front-end for the invariants in the `jordanpers` crate.
//!
//! Exit codes: 0 success, 1 validation failure, 2 schema or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jordanpers::distance::{erosion_distance_at_s, landscape, landscape_distance_at_s};
use jordanpers::examples;
use jordanpers::poset::{norm_slices, validate_slices};
use jordanpers::schema::{parse_slices, CertificateFile, ModuleFile};
use jordanpers::{
    barcode_from_r, check_stability, filtered_rank, jordan_type, planted_module, r_vector, Error, GridPoset,
    InterleavingCertificate, PersModule, Poset, PrimeField, SliceSequence, ZigzagPoset, DEFAULT_PRIME,
};

const PRIME_ENV: &str = "JORDANPERS_PRIME";

#[derive(Parser, Debug)]
#[command(name = "jordanpers", version, about = "Exact invariants of persistence modules")]
struct Cli {
    /// Prime modulus; overrides the file's "prime" and JORDANPERS_PRIME
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Seed for generators
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Slice sequence: "norm", an inline JSON list of lists of keys, or a file
    #[arg(long, global = true)]
    slices: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Treat slice warnings (comparable points in a slice, backward pairs,
    /// points without successors) as validation failures
    #[arg(long, global = true)]
    strict_slices: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check shapes and the functor law (and the slices, if any)
    Validate { file: PathBuf },
    /// Jordan type of the slice operator
    JordanType { file: PathBuf },
    /// R-vector of a zigzag module
    Multirank { file: PathBuf },
    /// Interval decomposition of a zigzag module
    Barcode { file: PathBuf },
    /// Rank tables of the Jordan modules of every degree
    FilteredRank { file: PathBuf },
    /// Erosion and landscape distances at the slice sequence
    Erosion { first: PathBuf, second: PathBuf },
    /// Verify a certificate and evaluate d_L <= d_E <= epsilon
    Stability { first: PathBuf, second: PathBuf, certificate: PathBuf },
    /// Landscape of one Jordan-module rank table, as CSV
    Landscape {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long)]
        k_max: Option<u64>,
    },
    /// Write a module file (or, for shift-pair, a directory with m.json, n.json, cert.json)
    Generate {
        #[arg(value_enum)]
        kind: GenKind,
        /// Grid shape, e.g. "3,2"
        #[arg(long, default_value = "2,2")]
        shape: String,
        /// Zigzag length
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Zigzag orientation, F/B per arrow; defaults to all F
        #[arg(long)]
        orientation: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 5)]
        bars: usize,
        #[arg(long, default_value_t = 2)]
        delta: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Grid,
    Zigzag,
    Planted,
    WorkedExample,
    CounterexampleX,
    CounterexampleY,
    ShiftPair,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn schema(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { .. } | Error::UnknownElement(_) | Error::NotPrime(_) | Error::WrongPosetKind(_) => {
                Failure::schema(e.to_string())
            }
            _ => Failure::invalid(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// A report plus whether it records a validation failure.
struct Report {
    json: Value,
    text: String,
    ok: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report { json, text, ok: true }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))
}

fn load_file(path: &Path) -> CliResult<ModuleFile> {
    ModuleFile::parse(&read(path)?).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))
}

fn env_prime() -> CliResult<Option<u64>> {
    match std::env::var(PRIME_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::schema(format!("{PRIME_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

/// `--prime`, then the files' "prime" (which must agree), then the environment, then the default.
fn resolve_prime(flag: Option<u64>, files: &[&ModuleFile]) -> CliResult<PrimeField> {
    let declared: Vec<u64> = files.iter().filter_map(|f| f.prime).collect();
    let p = match flag {
        Some(p) => p,
        None => {
            if declared.windows(2).any(|w| w[0] != w[1]) {
                return Err(Failure::schema("input files declare different primes; pass --prime"));
            }
            match declared.first() {
                Some(&p) => p,
                None => env_prime()?.unwrap_or(u64::from(DEFAULT_PRIME)),
            }
        }
    };
    PrimeField::new(p).map_err(|e| Failure::schema(format!("prime: {e}")))
}

struct Ctx {
    cli_prime: Option<u64>,
    slices: Option<String>,
    strict: bool,
}

impl Ctx {
    fn load(&self, path: &Path) -> CliResult<(ModuleFile, PersModule)> {
        let file = load_file(path)?;
        let field = resolve_prime(self.cli_prime, &[&file])?;
        let m = file.to_module(field).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))?;
        Ok((file, m))
    }

    fn load_pair(&self, a: &Path, b: &Path) -> CliResult<(ModuleFile, PersModule, PersModule)> {
        let fa = load_file(a)?;
        let fb = load_file(b)?;
        let field = resolve_prime(self.cli_prime, &[&fa, &fb])?;
        let ma = fa.to_module(field).map_err(|e| Failure::schema(format!("{}: {e}", a.display())))?;
        let mb = fb.to_module(field).map_err(|e| Failure::schema(format!("{}: {e}", b.display())))?;
        Ok((fa, ma, mb))
    }

    /// Flag, then the file's own slices, then norm slices on grids.
    fn slices_for(&self, file: &ModuleFile, m: &PersModule) -> CliResult<SliceSequence> {
        let poset = m.poset();
        let s = match self.slices.as_deref() {
            Some("norm") => norm_slices(poset.as_grid().ok_or_else(|| Failure::schema("norm slices need a grid"))?),
            Some(spec) if spec.trim_start().starts_with('[') => {
                parse_slices(poset, spec).map_err(|e| Failure::schema(format!("--slices: {e}")))?
            }
            Some(path) => {
                parse_slices(poset, &read(Path::new(path))?).map_err(|e| Failure::schema(format!("{path}: {e}")))?
            }
            None => match file.slice_sequence(poset).map_err(Failure::from)? {
                Some(s) => s,
                None => match poset.as_grid() {
                    Some(g) => norm_slices(g),
                    None => return Err(Failure::schema("no slice sequence: add \"slices\" or pass --slices")),
                },
            },
        };
        s.check_len()?;
        let warnings = validate_slices(poset, &s, self.strict)?;
        if !warnings.is_empty() {
            let msgs: Vec<String> = warnings.iter().map(|w| w.message.clone()).collect();
            return Err(Failure::invalid(format!("slice warnings: {}", msgs.join("; "))));
        }
        Ok(s)
    }
}

fn require_valid(m: &PersModule) -> CliResult<()> {
    m.validate().map_err(|v| Failure::invalid(format!("module is not a functor: {v}")))
}

fn cmd_validate(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let (file, m) = ctx.load(path)?;
    let mut json = json!({ "elements": m.poset().len(), "total_dim": m.total_dim() });
    let mut text = String::new();
    let mut ok = true;
    match m.validate() {
        Ok(()) => {
            json["functor"] = json!("ok");
            text.push_str("functor law: ok\n");
        }
        Err(v) => {
            ok = false;
            json["functor"] = json!({
                "lower": m.poset().key(&v.lower),
                "upper": m.poset().key(&v.upper),
                "left": v.left.to_signed_rows(),
                "right": v.right.to_signed_rows(),
            });
            text.push_str(&format!("functor law: violated, {v}\n"));
        }
    }
    let explicit = ctx.slices.is_some() || file.slices.is_some();
    if explicit {
        let s = ctx.slices_for(&file, &m)?;
        json["slices"] = json!({ "count": s.len(), "status": "ok" });
        text.push_str(&format!("slices: {} ok\n", s.len()));
    }
    json["valid"] = json!(ok);
    Ok(Report { json, text, ok })
}

fn cmd_jordan_type(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let (file, m) = ctx.load(path)?;
    require_valid(&m)?;
    let s = ctx.slices_for(&file, &m)?;
    let jt = jordan_type(&m, &s)?;
    Ok(Report::ok(json!({ "jordan_type": jt.counts, "n": jt.n(), "total_dim": jt.total_dim() }), format!("{jt}\n")))
}

fn cmd_multirank(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let (_, m) = ctx.load(path)?;
    require_valid(&m)?;
    let r = r_vector(&m)?;
    let pairs: Vec<[usize; 2]> = jordanpers::zigzag::pairs(r.n).into_iter().map(|(i, j)| [i, j]).collect();
    let flat: Vec<String> = r.values.iter().map(u64::to_string).collect();
    Ok(Report::ok(
        json!({ "n": r.n, "pairs": pairs, "values": r.values }),
        format!("{}flat: [{}]\n", r.to_triangular_string(), flat.join(", ")),
    ))
}

fn cmd_barcode(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let (_, m) = ctx.load(path)?;
    require_valid(&m)?;
    let b = barcode_from_r(&m)?;
    Ok(Report::ok(json!({ "bars": b.records() }), format!("{b}\n")))
}

fn cmd_filtered_rank(ctx: &Ctx, path: &Path) -> CliResult<Report> {
    let (file, m) = ctx.load(path)?;
    require_valid(&m)?;
    let s = ctx.slices_for(&file, &m)?;
    let tables = filtered_rank(&m, &s)?;
    let mut text = String::new();
    let mut degrees = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        text.push_str(&format!("degree {i}\n"));
        for (x, y, v) in t.support() {
            text.push_str(&format!("  ({x}) -> ({y}): {v}\n"));
        }
        degrees.push(json!({ "degree": i, "records": t.records() }));
    }
    Ok(Report::ok(json!({ "degrees": degrees }), text))
}

fn cmd_erosion(ctx: &Ctx, a: &Path, b: &Path) -> CliResult<Report> {
    let (fa, ma, mb) = ctx.load_pair(a, b)?;
    require_valid(&ma)?;
    require_valid(&mb)?;
    let s = ctx.slices_for(&fa, &ma)?;
    let e = erosion_distance_at_s(&ma, &mb, &s)?;
    let l = landscape_distance_at_s(&ma, &mb, &s, None)?;
    let mut text = format!("d_E = {}\nd_L = {l}\n", e.value);
    for (i, r) in e.per_degree.iter().enumerate() {
        text.push_str(&format!("degree {i}: {}\n", r.value));
    }
    Ok(Report::ok(json!({ "d_E": e.value, "d_L": l, "per_degree": e.per_degree }), text))
}

fn cmd_stability(ctx: &Ctx, a: &Path, b: &Path, cert: &Path) -> CliResult<Report> {
    let (fa, ma, mb) = ctx.load_pair(a, b)?;
    require_valid(&ma)?;
    require_valid(&mb)?;
    let s = ctx.slices_for(&fa, &ma)?;
    let cf = CertificateFile::parse(&read(cert)?).map_err(|e| Failure::schema(format!("{}: {e}", cert.display())))?;
    let c = cf.to_certificate(&ma, &mb).map_err(|e| match e {
        Error::Schema { .. } => Failure::schema(format!("{}: {e}", cert.display())),
        other => Failure::from(other),
    })?;
    let r = check_stability(&ma, &mb, &s, &c)?;
    let text = format!("d_L = {}\nd_E = {}\nepsilon = {}\nchain_ok = {}\n", r.d_l, r.d_e, r.epsilon, r.chain_ok);
    let json = serde_json::to_value(&r).expect("report serializes");
    Ok(Report { ok: r.chain_ok, json, text })
}

fn cmd_landscape(ctx: &Ctx, path: &Path, degree: usize, k_max: Option<u64>) -> CliResult<Report> {
    let (file, m) = ctx.load(path)?;
    require_valid(&m)?;
    let s = ctx.slices_for(&file, &m)?;
    let tables = filtered_rank(&m, &s)?;
    let t = tables
        .get(degree)
        .ok_or_else(|| Failure::schema(format!("degree {degree} out of range 0..{}", tables.len())))?;
    let k = k_max.unwrap_or_else(|| t.max_diagonal()).max(1);
    let l = landscape(t, k);
    Ok(Report::ok(json!({ "degree": degree, "k_max": k, "records": l.records() }), l.to_csv()))
}

fn parse_shape(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::schema(format!("--shape {s:?}: expected comma-separated sizes")))
}

struct GenArgs<'a> {
    kind: GenKind,
    shape: &'a str,
    n: usize,
    orientation: Option<&'a str>,
    max_dim: usize,
    bars: usize,
    delta: u64,
}

fn zigzag_of(n: usize, orientation: Option<&str>) -> CliResult<ZigzagPoset> {
    match orientation {
        Some(o) => ZigzagPoset::new(n, o).map_err(|e| Failure::schema(format!("--orientation: {e}"))),
        None if n >= 1 => Ok(ZigzagPoset::equioriented(n)),
        None => Err(Failure::schema("--n must be at least 1")),
    }
}

/// Returns files to write: (relative name or None for the main output, contents).
fn cmd_generate(field: PrimeField, seed: u64, g: &GenArgs) -> CliResult<Vec<(Option<&'static str>, String)>> {
    let module_json = |m: &PersModule| {
        let s = m.grid().map(norm_slices);
        ModuleFile::from_module(m, s.as_ref()).to_json()
    };
    let single = |m: PersModule| Ok(vec![(None, module_json(&m))]);
    match g.kind {
        GenKind::Grid => {
            let p = Poset::grid(GridPoset::new(parse_shape(g.shape)?));
            single(PersModule::random(&p, field, g.max_dim, seed))
        }
        GenKind::Zigzag => {
            let p = Poset::zigzag(zigzag_of(g.n, g.orientation)?);
            single(PersModule::random(&p, field, g.max_dim, seed))
        }
        GenKind::Planted => single(planted_module(&zigzag_of(g.n, g.orientation)?, field, g.bars, seed).0),
        GenKind::WorkedExample => {
            let m = examples::worked_example_over(field);
            let s = jordanpers::poset::SliceSequence::new(vec![
                vec![[0, 1].into(), [1, 0].into()],
                vec![[1, 1].into(), [2, 0].into()],
                vec![[2, 1].into()],
            ]);
            Ok(vec![(None, ModuleFile::from_module(&m, Some(&s)).to_json())])
        }
        GenKind::CounterexampleX => single(examples::counterexample_pair().0),
        GenKind::CounterexampleY => single(examples::counterexample_pair().1),
        GenKind::ShiftPair => {
            let p = Poset::grid(GridPoset::new(parse_shape(g.shape)?));
            let m = PersModule::random(&p, field, g.max_dim, seed);
            let (n, cert) = InterleavingCertificate::canonical_shift(&m, g.delta)?;
            Ok(vec![
                (Some("m.json"), module_json(&m)),
                (Some("n.json"), module_json(&n)),
                (Some("cert.json"), CertificateFile::from_certificate(&cert).to_json()),
            ])
        }
    }
}

fn emit(output: Option<&Path>, body: &str) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, body).map_err(|e| Failure::schema(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let ctx = Ctx { cli_prime: cli.prime, slices: cli.slices.clone(), strict: cli.strict_slices };
    let report = match &cli.command {
        Command::Validate { file } => cmd_validate(&ctx, file)?,
        Command::JordanType { file } => cmd_jordan_type(&ctx, file)?,
        Command::Multirank { file } => cmd_multirank(&ctx, file)?,
        Command::Barcode { file } => cmd_barcode(&ctx, file)?,
        Command::FilteredRank { file } => cmd_filtered_rank(&ctx, file)?,
        Command::Erosion { first, second } => cmd_erosion(&ctx, first, second)?,
        Command::Stability { first, second, certificate } => cmd_stability(&ctx, first, second, certificate)?,
        Command::Landscape { file, degree, k_max } => cmd_landscape(&ctx, file, *degree, *k_max)?,
        Command::Generate { kind, shape, n, orientation, max_dim, bars, delta } => {
            let field = resolve_prime(cli.prime, &[])?;
            let args = GenArgs {
                kind: *kind,
                shape,
                n: *n,
                orientation: orientation.as_deref(),
                max_dim: *max_dim,
                bars: *bars,
                delta: *delta,
            };
            let files = cmd_generate(field, cli.seed, &args)?;
            if files.iter().any(|(name, _)| name.is_some()) {
                let dir = cli.output.as_deref().ok_or_else(|| Failure::schema("shift-pair needs --output DIR"))?;
                fs::create_dir_all(dir).map_err(|e| Failure::schema(format!("{}: {e}", dir.display())))?;
                for (name, body) in &files {
                    emit(Some(&dir.join(name.unwrap())), body)?;
                }
            } else {
                emit(cli.output.as_deref(), &files[0].1)?;
            }
            return Ok(true);
        }
    };
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json value");
            s.push('\n');
            s
        }
        Format::Text => report.text,
    };
    emit(cli.output.as_deref(), &body)?;
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
