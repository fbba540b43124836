//! The `framekit` command line: catalog generation, per-frame reports, the
//! theorem suite runner, polarity computations, filter extensions, and DOT
//! export.
//!
//! Exit codes: 0 when everything passed, 1 when a verification failed (the
//! failing witnesses have been emitted), 2 on an input or usage error (the
//! message names the offending flag).

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use framekit::bitset::set_label;
use framekit::catalog::{build_catalog, default_families, Family};
use framekit::extensions::FilterExtension;
use framekit::filters::FilterClass;
use framekit::format::{self, LoadError};
use framekit::lattice::LatticeError;
use framekit::polarity::{check_gc_op, GaloisFamily, Polarity};
use framekit::theorems::{checker_ids, run_suite, subfitness_report, Caps, FrameContext};

#[derive(Parser)]
#[command(name = "framekit", version, about = "Compute with finite frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a JSON order is a frame.
    Validate {
        /// Frame spec to check.
        #[arg(long)]
        frame: PathBuf,
    },
    /// Summarize one frame: filter classes, subfitness, sublocales.
    Report {
        /// Frame spec to report on.
        #[arg(long)]
        frame: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value_t = TextFormat::Json)]
        format: TextFormat,
    },
    /// Run the theorem suite over a frame catalog.
    Verify {
        /// Comma-separated family specs, e.g. `chain:6,topologies:3`.
        #[arg(long, value_delimiter = ',')]
        catalog: Vec<String>,
        /// `all` or a comma-separated list of checker ids.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        suite: Vec<String>,
        #[command(flatten)]
        caps: CapArgs,
        /// Write the JSONL stream here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = VerifyFormat::Table)]
        format: VerifyFormat,
    },
    /// Compute the Galois-closed sets of a polarity context.
    Gc {
        /// Context spec file.
        #[arg(long, conflicts_with_all = ["random", "seed"])]
        context: Option<PathBuf>,
        /// Generate a random context: X-size, Y-size, density percent.
        #[arg(long, num_args = 3, value_names = ["X", "Y", "DENSITY"])]
        random: Vec<usize>,
        /// Seed for `--random`.
        #[arg(long, requires = "random")]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = StructureFormat::Json)]
        format: StructureFormat,
    },
    /// Build the polarity extension of a frame by a filter class.
    Extend {
        /// Frame spec to extend.
        #[arg(long)]
        frame: PathBuf,
        /// Filter class: filt, cp, so, ex, se, cl, of, lcl or r.
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = StructureFormat::Json)]
        format: StructureFormat,
    },
    /// List the frames a catalog spec generates.
    Catalog {
        /// Comma-separated family specs; defaults to the standard catalog.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        #[arg(long, value_enum, default_value_t = TextFormat::Json)]
        format: TextFormat,
    },
    /// Export a lattice as a DOT cover graph.
    Dot {
        /// Frame spec to draw.
        #[arg(long)]
        frame: PathBuf,
        /// Which lattice: the frame itself, its filters, or its sublocales.
        #[arg(long, value_enum, default_value_t = DotTarget::Frame)]
        what: DotTarget,
    },
}

#[derive(Args)]
struct CapArgs {
    /// Skip sublocale-side analyses on frames larger than this.
    #[arg(long, default_value_t = 12)]
    max_sublocale: usize,
    /// Reject frames larger than this outright.
    #[arg(long, default_value_t = 16)]
    max_filter: usize,
}

impl CapArgs {
    fn caps(&self) -> Result<Caps, CliError> {
        if self.max_sublocale == 0 {
            return Err(CliError::input("--max-sublocale", "the cap must be positive"));
        }
        if self.max_filter == 0 {
            return Err(CliError::input("--max-filter", "the cap must be positive"));
        }
        Ok(Caps {
            sublocale_max: self.max_sublocale,
            filter_max: self.max_filter,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyFormat {
    Jsonl,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StructureFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DotTarget {
    Frame,
    Filters,
    Sublocales,
}

/// A command failed. `Input` is an exit-2 problem with the invocation itself;
/// `Failure` is an exit-1 verification failure.
enum CliError {
    Input { flag: &'static str, message: String },
    Failure(String),
}

impl CliError {
    fn input(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Input {
            flag,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(message)) => {
            eprintln!("framekit: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Input { flag, message }) => {
            eprintln!("framekit: {flag}: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { frame } => validate(&frame),
        Command::Report { frame, caps, format } => report(&frame, &caps.caps()?, format),
        Command::Verify {
            catalog,
            suite,
            caps,
            output,
            format,
        } => verify(&catalog, &suite, &caps.caps()?, output.as_deref(), format),
        Command::Gc {
            context,
            random,
            seed,
            format,
        } => gc(context.as_deref(), &random, seed, format),
        Command::Extend { frame, class, format } => extend(&frame, &class, format),
        Command::Catalog { families, format } => catalog_cmd(&families, format),
        Command::Dot { frame, what } => dot_cmd(&frame, what),
    }
}

/// Map a load failure to the exit-2 error naming the flag that carried the
/// bad path.
fn input_error(flag: &'static str, err: LoadError) -> CliError {
    CliError::input(flag, err.to_string())
}

// --- validate ---------------------------------------------------------

fn validate(path: &std::path::Path) -> Result<(), CliError> {
    match format::load_frame(path) {
        Ok(frame) => {
            #[derive(Serialize)]
            struct Valid {
                elements: usize,
                frame: bool,
            }
            print_json(&Valid {
                elements: frame.n(),
                frame: true,
            });
            Ok(())
        }
        Err(LoadError::Lattice(LatticeError::NotAFrame(violation))) => {
            // The order is a lattice but breaks the frame law; the witness
            // triple goes to standard output so callers can consume it.
            print_json(&violation);
            Err(CliError::input("--frame", violation.to_string()))
        }
        Err(LoadError::Lattice(e)) => Err(CliError::input("--frame", e.to_string())),
        Err(e) => Err(input_error("--frame", e)),
    }
}

// --- report -----------------------------------------------------------

#[derive(Serialize)]
struct FrameReport {
    boolean: bool,
    class_sizes: BTreeMap<&'static str, usize>,
    elements: usize,
    filters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<bool>,
    subfit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    sublocale_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sublocales: Option<BTreeMap<&'static str, usize>>,
}

fn report(path: &std::path::Path, caps: &Caps, format: TextFormat) -> Result<(), CliError> {
    let frame = format::load_frame(path).map_err(|e| input_error("--frame", e))?;
    let ctx = FrameContext::with_caps("frame", &frame, caps)
        .map_err(|e| CliError::input("--frame", e.to_string()))?;
    let analysis = &ctx.analysis;

    let boolean = (0..frame.n()).all(|a| {
        frame.join(a, frame.pseudocomplement(a)) == frame.top()
    });
    let subfit = subfitness_report(analysis).map_err(|w| {
        CliError::Failure(format!("subfitness characterizations disagree: {w}"))
    })?;
    let class_sizes: BTreeMap<&'static str, usize> = FilterClass::ALL
        .iter()
        .map(|&c| (c.name(), analysis.members(c).count_ones() as usize))
        .collect();

    let (sublocales, fit, sublocale_note) = match ctx.sublocales() {
        Ok(sc) => {
            let counts: BTreeMap<&'static str, usize> = [
                ("all", sc.lat.len()),
                ("closed", sc.closed.len()),
                ("compact", sc.compact.len()),
                ("fitted", sc.fitted.len()),
                ("locally_closed", sc.locally_closed.len()),
                ("open", sc.open.len()),
                ("points", sc.points.len()),
                ("spatial", sc.spatial.len()),
            ]
            .into_iter()
            .collect();
            let fit = sc.fitted.len() == sc.lat.len();
            (Some(counts), Some(fit), None)
        }
        Err(note) => (None, None, Some(note.to_string())),
    };

    let report = FrameReport {
        boolean,
        class_sizes,
        elements: frame.n(),
        filters: analysis.filt.len(),
        fit,
        subfit,
        sublocale_note,
        sublocales,
    };
    match format {
        TextFormat::Json => print_json(&report),
        TextFormat::Table => {
            println!("elements        {}", report.elements);
            println!("filters         {}", report.filters);
            println!("boolean         {}", report.boolean);
            println!("subfit          {}", report.subfit);
            for (name, size) in &report.class_sizes {
                println!("class {name:<9} {size}");
            }
            match (&report.sublocales, &report.sublocale_note) {
                (Some(counts), _) => {
                    println!("fit             {}", report.fit.unwrap());
                    for (name, size) in counts {
                        println!("subl {name:<10} {size}");
                    }
                }
                (None, Some(note)) => println!("sublocales      skipped: {note}"),
                (None, None) => unreachable!(),
            }
        }
    }
    Ok(())
}

// --- verify -----------------------------------------------------------

fn parse_families(specs: &[String], flag: &'static str) -> Result<Vec<Family>, CliError> {
    if specs.is_empty() {
        return Ok(default_families());
    }
    specs
        .iter()
        .map(|s| Family::parse(s).map_err(|e| CliError::input(flag, e)))
        .collect()
}

fn parse_suite(suite: &[String]) -> Result<Option<std::collections::BTreeSet<String>>, CliError> {
    if suite.iter().any(|s| s == "all") {
        if suite.len() > 1 {
            return Err(CliError::input(
                "--suite",
                "`all` cannot be combined with individual checker ids",
            ));
        }
        return Ok(None);
    }
    let known = checker_ids();
    let mut selected = std::collections::BTreeSet::new();
    for id in suite {
        if !known.contains(&id.as_str()) {
            return Err(CliError::input(
                "--suite",
                format!("unknown checker `{id}`; see `framekit verify --help` for the list"),
            ));
        }
        selected.insert(id.clone());
    }
    Ok(Some(selected))
}

fn verify(
    catalog: &[String],
    suite: &[String],
    caps: &Caps,
    output: Option<&std::path::Path>,
    format: VerifyFormat,
) -> Result<(), CliError> {
    let families = parse_families(catalog, "--catalog")?;
    let selected = parse_suite(suite)?;
    let entries = build_catalog(&families);
    let run = run_suite(&entries, caps, selected.as_ref());
    let summary = run.summary();

    // The JSONL stream: per frame in catalog order, verdicts then skips,
    // closed by one summary object.
    let mut stream = String::new();
    for frame_run in &run.runs {
        for verdict in &frame_run.verdicts {
            stream.push_str(&to_json(verdict));
            stream.push('\n');
        }
        for skip in &frame_run.skips {
            stream.push_str(&to_json(skip));
            stream.push('\n');
        }
    }
    stream.push_str(&to_json(&summary));
    stream.push('\n');

    match (output, format) {
        (Some(path), _) => {
            fs::write(path, &stream).map_err(|e| {
                CliError::input("--output", format!("cannot write {}: {e}", path.display()))
            })?;
            print_verify_table(&mut io::stdout(), &run, &summary);
        }
        (None, VerifyFormat::Jsonl) => {
            print!("{stream}");
            print_verify_table(&mut io::stderr(), &run, &summary);
        }
        (None, VerifyFormat::Table) => {
            print_verify_table(&mut io::stdout(), &run, &summary);
        }
    }

    if summary.failed > 0 {
        return Err(CliError::Failure(format!(
            "{} of {} checks failed",
            summary.failed,
            summary.passed + summary.failed
        )));
    }
    Ok(())
}

fn print_verify_table(
    out: &mut impl Write,
    run: &framekit::theorems::SuiteRun,
    summary: &framekit::theorems::SuiteSummary,
) {
    let width = summary
        .theorems
        .keys()
        .map(|id| id.len())
        .max()
        .unwrap_or(7)
        .max("theorem".len());
    let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6}", "theorem", "pass", "fail", "skip");
    for (id, counts) in &summary.theorems {
        let _ = writeln!(
            out,
            "{id:<width$}  {:>6}  {:>6}  {:>6}",
            counts.passed, counts.failed, counts.skipped
        );
    }
    let _ = writeln!(
        out,
        "frames {}; checks {} passed, {} failed, {} skipped",
        summary.frames, summary.passed, summary.failed, summary.skipped
    );
    for verdict in run.failures() {
        let witness = verdict
            .witness
            .as_ref()
            .map(|w| w.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "FAIL {} on {}: {witness}",
            verdict.theorem_id, verdict.frame_id
        );
    }
}

// --- gc ---------------------------------------------------------------

#[derive(Serialize)]
struct GcReport {
    closed_sets: Vec<String>,
    items_ok: bool,
    op_ok: bool,
    size: usize,
    x_size: usize,
    y_size: usize,
}

fn gc(
    context: Option<&std::path::Path>,
    random: &[usize],
    seed: Option<u64>,
    format: StructureFormat,
) -> Result<(), CliError> {
    let pol = match (context, random.is_empty()) {
        (Some(path), true) => format::load_context(path)
            .and_then(|spec| spec.into_polarity())
            .map_err(|e| input_error("--context", e))?,
        (None, false) => {
            let (x, y, density) = (random[0], random[1], random[2]);
            if density > 100 {
                return Err(CliError::input(
                    "--random",
                    format!("density is a percentage, got {density}"),
                ));
            }
            let seed = seed.ok_or_else(|| {
                CliError::input("--seed", "random contexts need an explicit seed")
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rel = vec![vec![false; y]; x.max(1)];
            for row in rel.iter_mut().take(x) {
                for cell in row.iter_mut() {
                    *cell = rng.gen_range(0..100) < density;
                }
            }
            Polarity::new(x, y, |i, j| rel[i][j])
                .map_err(|e| CliError::input("--random", e.to_string()))?
        }
        (None, true) => {
            return Err(CliError::input(
                "--context",
                "provide a context file or --random X Y DENSITY",
            ))
        }
        (Some(_), false) => unreachable!("clap rejects --context with --random"),
    };

    let op = check_gc_op(&pol);
    let family = GaloisFamily::new(pol);
    let items = family.check_items_1_2();
    let report = GcReport {
        closed_sets: family.members().iter().map(|&m| set_label(m)).collect(),
        items_ok: items.is_ok(),
        op_ok: op.is_ok(),
        size: family.len(),
        x_size: family.polarity().x_size(),
        y_size: family.polarity().y_size(),
    };

    match format {
        StructureFormat::Json => print_json(&report),
        StructureFormat::Dot => {
            let lat = family.as_lattice().map_err(|e| {
                CliError::input("--format", format!("closed-set lattice too large for DOT: {e}"))
            })?;
            print!("{}", format::dot(&lat, "gc"));
        }
    }

    if let Err(e) = items {
        return Err(CliError::Failure(format!("closure laws failed: {e}")));
    }
    if let Err(e) = op {
        return Err(CliError::Failure(format!("opposite-polarity law failed: {e}")));
    }
    Ok(())
}

// --- extend -----------------------------------------------------------

#[derive(Serialize)]
struct ExtendReport {
    axioms: BTreeMap<&'static str, String>,
    class: &'static str,
    class_size: usize,
    elements: usize,
    extension_size: usize,
    filters: usize,
}

fn extend(path: &std::path::Path, class: &str, format: StructureFormat) -> Result<(), CliError> {
    let class = FilterClass::parse(class).ok_or_else(|| {
        CliError::input(
            "--class",
            format!("unknown class `{class}`; one of filt, cp, so, ex, se, cl, of, lcl, r"),
        )
    })?;
    let frame = format::load_frame(path).map_err(|e| input_error("--frame", e))?;
    let analysis = framekit::filters::FilterAnalysis::analyze(&frame)
        .map_err(|e| CliError::input("--frame", e.to_string()))?;
    let ext = FilterExtension::build(&analysis, class);

    let mut axioms = BTreeMap::new();
    let mut record = |name: &'static str, result: Result<(), String>| {
        axioms.insert(
            name,
            match result {
                Ok(()) => "pass".to_string(),
                Err(e) => e,
            },
        );
    };
    record("basic-properties", ext.basic_properties());
    record("closure-laws", ext.verify());
    record("meet-preservation", ext.meet_preservation_scan());
    record(
        "separability",
        ext.separability().map(|report| {
            // The report is informative even when no law fails; fold it into
            // the pass marker only when every flag that must hold does.
            if report.int_contains_principal && report.eps_principal {
                Ok(())
            } else {
                Err(format!(
                    "eps_principal={} int_contains_principal={}",
                    report.eps_principal, report.int_contains_principal
                ))
            }
        })
        .and_then(|r| r),
    );
    record("special-preservation", ext.special_preservation());

    let failed = axioms.values().any(|v| v != "pass");
    let report = ExtendReport {
        axioms,
        class: class.name(),
        class_size: ext.class_filters().len(),
        elements: frame.n(),
        extension_size: ext.len(),
        filters: analysis.filt.len(),
    };

    match format {
        StructureFormat::Json => print_json(&report),
        StructureFormat::Dot => {
            let lat = ext.gc().as_lattice().map_err(|e| {
                CliError::input("--format", format!("extension too large for DOT: {e}"))
            })?;
            print!("{}", format::dot(&lat, "extension"));
        }
    }

    if failed {
        return Err(CliError::Failure("an extension law failed; see the axioms map".into()));
    }
    Ok(())
}

// --- catalog ----------------------------------------------------------

#[derive(Serialize)]
struct CatalogRow {
    elements: usize,
    id: String,
    merged: Vec<String>,
}

fn catalog_cmd(families: &[String], format: TextFormat) -> Result<(), CliError> {
    let families = parse_families(families, "--families")?;
    let entries = build_catalog(&families);
    let rows: Vec<CatalogRow> = entries
        .iter()
        .map(|e| CatalogRow {
            elements: e.frame.n(),
            id: e.id.clone(),
            merged: e.merged.clone(),
        })
        .collect();
    match format {
        TextFormat::Json => print_json(&rows),
        TextFormat::Table => {
            for row in &rows {
                let merged = if row.merged.is_empty() {
                    String::new()
                } else {
                    format!("  (= {})", row.merged.join(", "))
                };
                println!("{:<24} {:>2} elements{merged}", row.id, row.elements);
            }
        }
    }
    Ok(())
}

// --- dot --------------------------------------------------------------

fn dot_cmd(path: &std::path::Path, what: DotTarget) -> Result<(), CliError> {
    let frame = format::load_frame(path).map_err(|e| input_error("--frame", e))?;
    let rendered = match what {
        DotTarget::Frame => format::dot(frame.lattice(), "frame"),
        DotTarget::Filters => {
            let analysis = framekit::filters::FilterAnalysis::analyze(&frame)
                .map_err(|e| CliError::input("--frame", e.to_string()))?;
            format::dot(analysis.filt.lat(), "filters")
        }
        DotTarget::Sublocales => {
            let sl = framekit::sublocales::SublocaleLattice::build(&frame)
                .map_err(|e| CliError::input("--frame", e.to_string()))?;
            let lat = sl
                .as_lattice()
                .map_err(|e| CliError::input("--frame", format!("sublocale lattice too large for DOT: {e}")))?;
            format::dot(&lat, "sublocales")
        }
    };
    print!("{rendered}");
    Ok(())
}

// --- output helpers ---------------------------------------------------

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}
