use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evoqual::config::{AnalysisConfig, OutputFormat};
use evoqual::corpus::CorpusLayout;
use evoqual::detect::IssueKind;
use evoqual::pipeline::run_analysis;
use evoqual::report::{render_json, write_csv, write_json};

#[derive(Parser)]
#[command(name = "evoqual", version, about = "Detects quality issues in EvoSuite-generated JUnit tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every `*_ESTest.java` suite under a directory.
    Analyze(AnalyzeArgs),
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Directory holding the generated suites.
    test_root: PathBuf,
    /// Directory holding class-under-test sources (defaults to TEST_ROOT).
    #[arg(long)]
    cut_root: Option<PathBuf>,
    /// Project name for suites directly under TEST_ROOT.
    #[arg(long, default_value = "default")]
    project: String,
    /// Comma-separated issue kinds to detect, e.g. NASE,DS.
    #[arg(long, value_delimiter = ',')]
    issues: Option<Vec<IssueKind>>,
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Output file for JSON, or directory for CSV. JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Equal setup lines needed for duplicated setup.
    #[arg(long)]
    min_dup_lines: Option<usize>,
    /// Exit with status 1 when anything is found.
    #[arg(long)]
    fail_on_findings: bool,
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `SuiteName = path/to/Cut.java` pairs for suites the naming convention misses.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// `path/prefix = project` pairs.
    #[arg(long)]
    project_manifest: Option<PathBuf>,
}

fn run(args: AnalyzeArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let mut config = match &args.config {
        Some(path) => AnalysisConfig::from_file(path)?,
        None => AnalysisConfig::default(),
    };
    if let Some(issues) = args.issues {
        config.enabled_issues = issues.into_iter().collect();
    }
    if let Some(format) = args.format {
        config.output_format = format;
    }
    if let Some(n) = args.min_dup_lines {
        config.duplicated_setup_min_lines = n;
    }
    config.fail_on_findings |= args.fail_on_findings;
    config.validate()?;

    let mut layout = CorpusLayout::new(args.test_root);
    layout.cut_root = args.cut_root;
    layout.project_name = args.project;
    if let Some(m) = &args.mapping {
        layout.load_mapping(m)?;
    }
    if let Some(m) = &args.project_manifest {
        layout.load_projects(m)?;
    }

    let report = run_analysis(&layout, &config)?;
    for d in &report.meta.diagnostics {
        eprintln!("warning: {}: {}", d.suite, d.message);
    }
    match (config.output_format, &args.out) {
        (OutputFormat::Json, Some(path)) => write_json(&report, path)?,
        (OutputFormat::Json, None) => std::io::stdout().write_all(render_json(&report)?.as_bytes())?,
        (OutputFormat::Csv, Some(dir)) => write_csv(&report, dir)?,
        (OutputFormat::Csv, None) => return Err("--format csv needs --out DIR".into()),
    }
    Ok(config.fail_on_findings && !report.findings.is_empty())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Analyze(args) = cli.command;
    match run(args) {
        Ok(true) => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
