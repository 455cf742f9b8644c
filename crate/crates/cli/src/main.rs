use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lquasi::{commut, displ, LeftQuasigroup, Limits, Partition};
use serde_json::json;

use lquasi_cli::enumerate::{self, Filter};
use lquasi_cli::format::{self, StructureFile};
use lquasi_cli::harness::{self, Law, Scope};
use lquasi_cli::search::{self, SearchStatus};
use lquasi_cli::{report, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lquasi", version, about = "Congruences, displacement groups and commutators of finite left quasigroups")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for every sampled term and equivalence.
    #[arg(long, global = true, default_value_t = harness::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true)]
    max_group_order: Option<usize>,
    #[arg(long, global = true)]
    max_congruences: Option<usize>,
    /// Read tables with rows and columns swapped.
    #[arg(long, global = true)]
    transpose: bool,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Structure file, text or JSON.
    file: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a table is a left quasigroup, under both readings.
    Validate(Input),
    /// Full report: predicates, Galois data, center and nilpotency.
    Report(Input),
    /// Congruences, admissible subgroups and the four operators.
    Galois(Input),
    /// The commutator [alpha, beta].
    Commutator {
        #[command(flatten)]
        input: Input,
        /// Partition such as `0,1|2,3`; `0` and `1` are the trivial ones.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// The center.
    Center(Input),
    /// Upper central series and nilpotency class.
    Nilpotency(Input),
    /// Build Aff(Q, A, g, f, theta) from a JSON spec.
    Extend {
        spec: PathBuf,
        /// Write the table here; `.json` selects the JSON form.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List left quasigroups of one order.
    Enumerate {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        idempotent: bool,
        #[arg(long)]
        rack: bool,
        #[arg(long)]
        quandle: bool,
        #[arg(long)]
        latin: bool,
        #[arg(long)]
        connected: bool,
        /// One representative per isomorphism class.
        #[arg(long)]
        iso: bool,
        /// Print only the number of structures.
        #[arg(long)]
        count: bool,
    },
    /// Look for a quandle with CDOs that is not sharp.
    Search {
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Run the law suite, or the single-congruence laws at one congruence.
    VerifyTheorems {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 5)]
        quandle_order: usize,
        #[arg(long)]
        no_extensions: bool,
        /// Restrict to these laws; repeatable.
        #[arg(long = "law")]
        laws: Vec<String>,
        #[arg(long, default_value_t = 64)]
        lattice_cap: usize,
        /// List the laws and exit.
        #[arg(long)]
        list: bool,
        /// Check one structure instead of the families.
        #[arg(long, requires = "alpha")]
        input: Option<PathBuf>,
        #[arg(long, requires = "input")]
        alpha: Option<String>,
    },
}

struct Ctx {
    format: Format,
    seed: u64,
    limits: Limits,
    transpose: bool,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<LeftQuasigroup> {
        format::parse(path, self.transpose)
    }

    fn emit(&self, human: String, value: serde_json::Value) -> String {
        match self.format {
            Format::Human => human,
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn partition(q: &LeftQuasigroup, text: &str, what: &str) -> Result<Partition> {
    Partition::parse(q.order(), text).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn run(cli: Cli) -> Result<(String, u8)> {
    let defaults = Limits::default();
    let ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        limits: Limits {
            max_group_order: cli.max_group_order.unwrap_or(defaults.max_group_order),
            max_congruences: cli.max_congruences.unwrap_or(defaults.max_congruences),
            ..defaults
        },
        transpose: cli.transpose,
    };
    match cli.command {
        Command::Validate(input) => validate(&ctx, &input.file),
        Command::Report(input) => {
            let q = ctx.load(&input.file)?;
            let name = format::read_file(&input.file)?.name;
            let r = report::build(&q, name.as_deref(), &ctx.limits)?;
            let out = match ctx.format {
                Format::Human => report::render_human(&r),
                Format::Json => report::to_json(&r),
            };
            Ok((out, 0))
        }
        Command::Galois(input) => {
            let q = ctx.load(&input.file)?;
            let g = displ::full_report(&q, &ctx.limits).map_err(CliError::stage("galois report"))?;
            let mut human = String::new();
            report::render_galois(&mut human, &g);
            Ok((ctx.emit(human, json!(g)), 0))
        }
        Command::Commutator { input, alpha, beta } => {
            let q = ctx.load(&input.file)?;
            let (a, b) = (partition(&q, &alpha, "alpha")?, partition(&q, &beta, "beta")?);
            for (name, p) in [("alpha", &a), ("beta", &b)] {
                if !lquasi::congr::is_congruence(&q, p) {
                    return Err(CliError::Precondition(format!("{name} = {p} is not a congruence")));
                }
            }
            let c = commut::commutator(&q, &a, &b, &ctx.limits).map_err(CliError::stage("commutator"))?;
            let human = format!("[{a}, {b}] = {c}\n");
            Ok((ctx.emit(human, json!({"alpha": a, "beta": b, "commutator": c})), 0))
        }
        Command::Center(input) => {
            let q = ctx.load(&input.file)?;
            let z = commut::center(&q, &ctx.limits).map_err(CliError::stage("center"))?;
            Ok((ctx.emit(format!("center: {z}\n"), json!({"center": z})), 0))
        }
        Command::Nilpotency(input) => {
            let q = ctx.load(&input.file)?;
            let s = commut::nilpotency_series(&q, &ctx.limits).map_err(CliError::stage("nilpotency series"))?;
            let mut human = String::new();
            for (i, p) in s.series.iter().enumerate() {
                let _ = writeln!(human, "zeta_{}: {p}", i + 1);
            }
            let _ = match s.class() {
                Some(c) => writeln!(human, "nilpotency_class: {c}"),
                None => writeln!(human, "not nilpotent"),
            };
            Ok((ctx.emit(human, json!({"series": s.series, "class": s.class()})), 0))
        }
        Command::Extend { spec, output } => {
            let e = format::read_extension_spec(&spec)?.build()?;
            if let Some(path) = &output {
                format::emit(&e.algebra, path)?;
            }
            let file = StructureFile::from_algebra(&e.algebra);
            let out = match ctx.format {
                Format::Human => file.emit_text(),
                Format::Json => file.emit_json(),
            };
            Ok((out, 0))
        }
        Command::Enumerate {
            order,
            idempotent,
            rack,
            quandle,
            latin,
            connected,
            iso,
            count,
        } => {
            let filter = Filter {
                idempotent: idempotent || quandle,
                rack: rack || quandle,
                latin,
                connected,
            };
            let found = enumerate::enumerate(order, filter, iso)?;
            if count {
                return Ok((ctx.emit(format!("{}\n", found.len()), json!({"count": found.len()})), 0));
            }
            let out = match ctx.format {
                Format::Human => found
                    .iter()
                    .map(|q| StructureFile::from_algebra(q).emit_text())
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Json => found.iter().map(|q| StructureFile::from_algebra(q).emit_json()).collect(),
            };
            Ok((out, 0))
        }
        Command::Search { order, budget } => {
            let r = search::search_cdos_not_cdsg(order, budget, &ctx.limits)?;
            let mut human = format!("order {}: {:?} after {} nodes, {} candidates\n", r.order, r.status, r.nodes, r.candidates);
            if let Some(rows) = &r.witness {
                let q = LeftQuasigroup::validate(rows).map_err(CliError::stage("search witness"))?;
                human.push_str(&StructureFile::from_algebra(&q).emit_text());
            }
            let code = if r.status == SearchStatus::BudgetExhausted { 3 } else { 0 };
            Ok((ctx.emit(human, json!(r)), code))
        }
        Command::VerifyTheorems {
            order,
            quandle_order,
            no_extensions,
            laws,
            lattice_cap,
            list,
            input,
            alpha,
        } => {
            if list {
                let mut out = String::new();
                for law in Law::ALL {
                    let _ = writeln!(out, "{:<26} {}", law.name(), law.statement());
                }
                return Ok((out, 0));
            }
            if let (Some(path), Some(alpha)) = (input, alpha) {
                return verify_at(&ctx, &path, &alpha);
            }
            let laws = laws.iter().map(|s| s.parse()).collect::<Result<Vec<Law>>>()?;
            let scope = Scope {
                exhaustive_order: order,
                quandle_order,
                extensions: !no_extensions,
                seed: ctx.seed,
                lattice_cap,
                limits: ctx.limits,
                laws: (!laws.is_empty()).then_some(laws),
                ..Scope::default()
            };
            let results = harness::verify_theorems(&scope)?;
            let mut human = String::new();
            for r in &results {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    human,
                    "{verdict} {:<26} instances={} failures={} skipped={} ({:.2?})",
                    r.law.name(),
                    r.instances,
                    r.failures.len(),
                    r.skipped,
                    r.elapsed
                );
                for w in r.failures.iter().take(3) {
                    let _ = writeln!(human, "    {}: {}", w.instance, w.detail);
                }
            }
            let code = if results.iter().all(|r| r.passed()) { 0 } else { 1 };
            Ok((ctx.emit(human, json!(results)), code))
        }
    }
}

fn validate(ctx: &Ctx, path: &Path) -> Result<(String, u8)> {
    let file = format::read_file(path)?;
    let [plain, transposed] = file.readings();
    let mut human = String::new();
    let mut readings = Vec::new();
    for (label, reading) in [("rows", &plain), ("transposed", &transposed)] {
        let value = match reading {
            Ok(q) => {
                let p = q.predicates();
                let _ = writeln!(
                    human,
                    "{label}: valid, order {}, idempotent={} rack={} quandle={} latin={}",
                    q.order(),
                    p.idempotent,
                    p.rack,
                    p.quandle,
                    p.latin
                );
                json!({"reading": label, "valid": true, "predicates": p})
            }
            Err(e) => {
                let _ = writeln!(human, "{label}: invalid: {e}");
                json!({"reading": label, "valid": false, "error": e.to_string()})
            }
        };
        readings.push(value);
    }
    let chosen = if ctx.transpose { transposed } else { plain };
    let out = ctx.emit(human, json!({"order": file.order, "readings": readings}));
    match chosen {
        Ok(_) => Ok((out, 0)),
        Err(e) => {
            print!("{out}");
            Err(e)
        }
    }
}

fn verify_at(ctx: &Ctx, path: &Path, alpha: &str) -> Result<(String, u8)> {
    let q = ctx.load(path)?;
    let a = partition(&q, alpha, "alpha")?;
    let checks = harness::check_at_congruence(&q, &a, &ctx.limits)?;
    let mut human = String::new();
    for (law, w) in &checks {
        match w {
            None => {
                let _ = writeln!(human, "PASS {law}");
            }
            Some(w) => {
                let _ = writeln!(human, "FAIL {law}: {}", w.detail);
            }
        }
    }
    let code = if checks.iter().all(|(_, w)| w.is_none()) { 0 } else { 1 };
    let value = json!(checks.iter().map(|(l, w)| json!({"law": l, "failure": w})).collect::<Vec<_>>());
    Ok((ctx.emit(human, value), code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
