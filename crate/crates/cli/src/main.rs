//! `fractal`: exact perimeter/area scaling, construction and verification.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fractal_core::geometry::{
    dump_points, iterate_additive, iterate_subtractive, measured_perimeter, pieceset_measures,
    shoelace_area,
};
use fractal_core::overlap::{reports_to_json, verify_nonoverlap};
use fractal_core::params::{diagnose, ClassTag, ParamPoint};
use fractal_core::registry::{builtin, load_construction, ConstructionSpec, Provenance, Rule};
use fractal_core::render::{
    default_marks, render_chain, render_pieces, render_regime_plot, PlotStyle, RegimeMark, Style,
    DEFAULT_N_RANGE, DEFAULT_R_RANGE,
};
use fractal_core::series::{area_at_additive, area_at_subtractive, perimeter_at, series_table};
use fractal_core::{ElementCap, Error, Rat, DEFAULT_ELEMENT_CAP};

#[derive(Parser)]
#[command(
    name = "fractal",
    version,
    about = "Exact scaling laws for self-similar planar fractals"
)]
struct Cli {
    /// Maximum number of segments or pieces any operation may produce
    /// (`unlimited` to disable).
    #[arg(long, global = true, env = "FRACTAL_CAP", value_parser = parse_cap)]
    cap: Option<ElementCap>,

    #[command(subcommand)]
    command: Command,
}

fn parse_cap(s: &str) -> Result<ElementCap, String> {
    if s.eq_ignore_ascii_case("unlimited") {
        return Ok(ElementCap::unlimited());
    }
    s.trim()
        .parse::<u64>()
        .map(ElementCap::new)
        .map_err(|_| format!("expected a segment count or `unlimited`, got `{s}`"))
}

#[derive(Subcommand)]
enum Command {
    /// Growth ratios, dimension, regime and limit verdicts.
    Diagnose(DiagnoseArgs),
    /// Exact perimeter and area by depth.
    Series(SeriesArgs),
    /// Build a construction to some depth and render it.
    Iterate(IterateArgs),
    /// Certify non-overlap of an additive construction depth by depth.
    VerifyOverlap(VerifyArgs),
    /// Summary of all built-in constructions.
    Table(TableArgs),
    /// Draw the (r, N) regime diagram.
    RegimePlot(PlotArgs),
}

#[derive(Args)]
#[group(multiple = false)]
struct Source {
    /// Built-in construction name.
    #[arg(long)]
    construction: Option<String>,
    /// Construction file (JSON).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CsvOrJson {
    Csv,
    Json,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(short = 'N', value_name = "N")]
    n: Option<u64>,
    #[arg(short = 'r', value_name = "R")]
    r: Option<Rat>,
    #[arg(long, value_parser = parse_class)]
    class: Option<ClassTag>,
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

fn parse_class(s: &str) -> Result<ClassTag, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    depth: u32,
    #[arg(long, value_enum, default_value = "csv")]
    format: CsvOrJson,
}

#[derive(Args)]
struct IterateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    depth: u32,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional exact point dump, one `x y` pair per line.
    #[arg(long)]
    dump_points: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    max_depth: u32,
    #[arg(long, value_enum, default_value = "json")]
    format: TextOrJson,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    out: PathBuf,
    /// Extra mark as `N,r,label`; repeatable.
    #[arg(long = "mark", value_parser = parse_mark)]
    marks: Vec<RegimeMark>,
}

fn parse_mark(s: &str) -> Result<RegimeMark, String> {
    let mut parts = s.splitn(3, ',');
    let (Some(n), Some(r)) = (parts.next(), parts.next()) else {
        return Err(format!("expected `N,r,label`, got `{s}`"));
    };
    let label = parts.next().unwrap_or("").trim();
    let n: u64 = n.trim().parse().map_err(|_| format!("bad N in `{s}`"))?;
    let r: Rat = r.trim().parse().map_err(|e: Error| e.to_string())?;
    RegimeMark::new(label, r, n).map_err(|e| e.to_string())
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Validation(_) | Error::Document { .. } | Error::DegenerateGenerator => 3,
            Error::CapExceeded { .. } => 4,
            Error::NotRealizable(_) => 5,
            Error::UnknownName(_) | Error::InvalidParameter(_) | Error::Parse { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn resolve(source: &Source) -> Result<Option<ConstructionSpec>, Failure> {
    match (&source.construction, &source.file) {
        (Some(name), _) => Ok(Some(builtin(name)?)),
        (None, Some(path)) => {
            let spec = load_construction(&read_file(path)?)?;
            Ok(Some(spec.with_provenance(Provenance::UserFile(Some(
                path.display().to_string(),
            )))))
        }
        (None, None) => Ok(None),
    }
}

fn require(source: &Source) -> Result<ConstructionSpec, Failure> {
    resolve(source)?.ok_or_else(|| Failure::usage("one of --construction or --file is required"))
}

fn cmd_diagnose(args: &DiagnoseArgs) -> Outcome {
    let spec = resolve(&args.source)?;
    let name = spec.as_ref().map(|s| s.name().to_string());
    let diagnosis = match spec {
        Some(spec) => {
            let p = spec.params();
            let mismatch = args.n.is_some_and(|n| n != p.n_pieces())
                || args.r.as_ref().is_some_and(|r| r != p.scale())
                || args.class.is_some_and(|c| c != p.class());
            if mismatch {
                return Err(Failure::usage(format!(
                    "-N/-r/--class disagree with construction `{}` ({}, {}, {})",
                    spec.name(),
                    p.n_pieces(),
                    p.scale(),
                    p.class()
                )));
            }
            spec.diagnose()?
        }
        None => {
            let (Some(n), Some(r), Some(class)) = (args.n, args.r.clone(), args.class) else {
                return Err(Failure::usage("give -N, -r and --class, or a construction"));
            };
            let p = ParamPoint::new(n, r, class).map_err(|e| Failure::usage(e.to_string()))?;
            diagnose(&p, None)
        }
    };
    match args.format {
        TextOrJson::Text => print!("{}", output::diagnosis_text(&diagnosis, name.as_deref())),
        TextOrJson::Json => print!("{}", output::diagnosis_json(&diagnosis, name.as_deref())),
    }
    Ok(0)
}

fn cmd_series(args: &SeriesArgs, cap: ElementCap) -> Outcome {
    let spec = require(&args.source)?;
    let rows = series_table(&spec, args.depth, cap)?;
    let text = match args.format {
        CsvOrJson::Csv => output::series_csv(&rows),
        CsvOrJson::Json => output::series_json(&rows),
    };
    print!("{text}");
    Ok(0)
}

fn cmd_iterate(args: &IterateArgs, cap: ElementCap) -> Outcome {
    let spec = require(&args.source)?;
    let p = spec.params();
    let p0 = spec.initial_perimeter()?;
    let a0 = spec.initial_area()?;
    let style = Style::default();
    let (svg, dump, perimeter, area, expected_area, elements) = match spec.rule() {
        Rule::SeriesOnly { .. } => return Err(Error::NotRealizable(spec.name().into()).into()),
        Rule::Generator { .. } => {
            let chain = iterate_additive(&spec, args.depth, cap)?;
            let basis = spec
                .area_basis()?
                .expect("generator constructions have a basis");
            (
                render_chain(&chain, &style)?,
                dump_points(chain.points()),
                measured_perimeter(&chain)?,
                shoelace_area(&chain),
                area_at_additive(&basis, args.depth),
                format!("{} segments", chain.segment_count()),
            )
        }
        Rule::Subdivision(rule) => {
            let ps = iterate_subtractive(rule, args.depth, cap)?;
            let (edge, area) = pieceset_measures(&ps)?;
            let dump = ps
                .transforms()
                .iter()
                .map(|t| dump_points(&ps.piece_vertices(t)))
                .collect::<Vec<_>>()
                .join("\n");
            let beta = fractal_core::params::growth_ratios(p).beta;
            (
                render_pieces(&ps, &style),
                dump,
                edge,
                area,
                area_at_subtractive(&a0, &beta, args.depth),
                format!("{} pieces", ps.len()),
            )
        }
    };
    write_file(&args.out, &svg)?;
    if let Some(path) = &args.dump_points {
        write_file(path, &dump)?;
    }
    let expected_perimeter = perimeter_at(p, &p0, args.depth);
    print!(
        "{}",
        output::iterate_summary(
            &spec,
            args.depth,
            &elements,
            (&perimeter, &expected_perimeter),
            (&area, &expected_area)
        )
    );
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, cap: ElementCap) -> Outcome {
    let spec = require(&args.source)?;
    let reports = verify_nonoverlap(&spec, args.max_depth, cap)?;
    match args.format {
        TextOrJson::Json => print!("{}", reports_to_json(&reports)),
        TextOrJson::Text => print!("{}", output::overlap_text(&reports)),
    }
    Ok(if reports.iter().all(|r| r.certified) {
        0
    } else {
        1
    })
}

fn cmd_table(args: &TableArgs) -> Outcome {
    let rows = output::table_rows()?;
    match args.format {
        TextOrJson::Text => print!("{}", output::table_text(&rows)),
        TextOrJson::Json => print!("{}", output::table_json(&rows)),
    }
    Ok(0)
}

fn cmd_regime_plot(args: &PlotArgs) -> Outcome {
    let mut marks = default_marks();
    marks.extend(args.marks.iter().cloned());
    let svg = render_regime_plot(
        &marks,
        DEFAULT_R_RANGE,
        DEFAULT_N_RANGE,
        &PlotStyle::default(),
    )?;
    write_file(&args.out, &svg)?;
    println!("wrote {} ({} marks)", args.out.display(), marks.len());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.cap.unwrap_or(ElementCap::new(DEFAULT_ELEMENT_CAP));
    let outcome = match &cli.command {
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Series(a) => cmd_series(a, cap),
        Command::Iterate(a) => cmd_iterate(a, cap),
        Command::VerifyOverlap(a) => cmd_verify(a, cap),
        Command::Table(a) => cmd_table(a),
        Command::RegimePlot(a) => cmd_regime_plot(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
