//! Command-line front end: analyze instances, decide the dichotomy, verify
//! certificates, export truncations, run the self-test suite.
//!
//! Exit codes form the scripting contract: 0 for the tough branch or an
//! accepted verification, 1 for the star branch, 2 for invalid input, 3 for
//! a rejected verification or failed self-test, 4 for internal errors.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use combdual::certificate::{CertificateDoc, CertificatePayload, DichotomyCertificate};
use combdual::corpus;
use combdual::decompose::CriticalPattern;
use combdual::duality::{decide, toughness, Toughness};
use combdual::instance::{instance_digest, parse_instance};
use combdual::presentation::{Presentation, TargetSet, WindowKind};
use combdual::truncation::{materialize, DEFAULT_VERTEX_BUDGET};
use combdual::verify;

const EXIT_TOUGH_OR_ACCEPT: u8 = 0;
const EXIT_STAR: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "combdual", version, about = "Toughness dichotomy with verifiable certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Report the critical vertex sets and the toughness verdict.
    Analyze {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Decide the dichotomy and write the winning branch's certificate.
    Decide {
        instance: PathBuf,
        /// Output path for the certificate document (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the undominating-star certificate when the target is not tough.
    Witness {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate document against an instance.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Materialize a finite truncation of the presented graph.
    Materialize {
        instance: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        copies: u32,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks on the bundled corpus plus random instances.
    Selftest {
        /// Directory holding the bundled instance documents.
        #[arg(long, default_value = "instances")]
        corpus: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of seeded random instances to decide and verify.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Tamper with one constructed certificate to prove the suite can
        /// fail; the run must then exit nonzero.
        #[arg(long, hide = true)]
        inject_mutant: bool,
    },
}

fn budget() -> usize {
    std::env::var("COMBDUAL_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_VERTEX_BUDGET)
}

fn load_instance(path: &Path) -> Result<(Presentation, TargetSet), u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INVALID_INPUT
    })?;
    parse_instance(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INVALID_INPUT
    })
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), u8> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_INTERNAL
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn pattern_description(pat: &CriticalPattern) -> String {
    match pat {
        CriticalPattern::Explicit { set, witnesses } => {
            let names: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            format!("{{{}}} (classes {witnesses:?})", names.join(", "))
        }
        CriticalPattern::Graded { class, window, .. } => match window {
            WindowKind::Prefix => format!("{{s0..sn}} for all n (graded class {class})"),
            WindowKind::Band { width } => {
                format!("{{s(n-{})..sn}} for all n (graded class {class})", width - 1)
            }
        },
    }
}

fn run_analyze(instance: &Path, format: ReportFormat) -> Result<u8, u8> {
    let (p, t) = load_instance(instance)?;
    let patterns = combdual::decompose::critical_sets(&p);
    let verdict = toughness(&p, &t);
    match format {
        ReportFormat::Text => {
            if patterns.is_empty() {
                println!("no critical vertex sets");
            } else {
                println!("critical vertex sets:");
                for pat in &patterns {
                    println!("  {}", pattern_description(pat));
                }
            }
            match &verdict {
                Toughness::Tough => println!("target set is tough"),
                Toughness::NotTough(w) => {
                    let names: Vec<String> = w.witness.iter().map(|v| v.to_string()).collect();
                    println!(
                        "target set is not tough: class {} floods {{{}}}",
                        w.class,
                        names.join(", ")
                    );
                }
            }
        }
        ReportFormat::Json => {
            let doc = serde_json::json!({
                "criticalPatterns": patterns,
                "tough": matches!(verdict, Toughness::Tough),
                "witnessClass": match &verdict {
                    Toughness::Tough => None,
                    Toughness::NotTough(w) => Some(w.class),
                },
                "witnessSet": match &verdict {
                    Toughness::Tough => None,
                    Toughness::NotTough(w) => Some(w.witness.clone()),
                },
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(EXIT_TOUGH_OR_ACCEPT)
}

fn run_decide(instance: &Path, out: &Option<PathBuf>) -> Result<u8, u8> {
    let (p, t) = load_instance(instance)?;
    let digest = instance_digest(&p, &t);
    let cert = decide(&p, &t).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INTERNAL
    })?;
    let code = match &cert {
        DichotomyCertificate::Star(_) => EXIT_STAR,
        DichotomyCertificate::Tough { .. } => EXIT_TOUGH_OR_ACCEPT,
    };
    let doc = CertificateDoc::new(digest, CertificatePayload::Dichotomy(cert));
    emit(out, &doc.to_json())?;
    Ok(code)
}

fn run_witness(instance: &Path, out: &Option<PathBuf>) -> Result<u8, u8> {
    let (p, t) = load_instance(instance)?;
    match toughness(&p, &t) {
        Toughness::Tough => {
            println!("target set is tough; no undominating star exists");
            Ok(EXIT_TOUGH_OR_ACCEPT)
        }
        Toughness::NotTough(w) => {
            let cert = combdual::duality::extract_undominating_star(&p, &t, &w).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INTERNAL
            })?;
            let payload = CertificatePayload::UndominatingStar(cert);
            let report = verify::verify_payload(&p, &t, &payload);
            if !report.accepted() {
                eprintln!(
                    "error: extracted star failed its own verification at {}",
                    report.first_failure().unwrap_or_default()
                );
                return Err(EXIT_INTERNAL);
            }
            let doc = CertificateDoc::new(instance_digest(&p, &t), payload);
            emit(out, &doc.to_json())?;
            Ok(EXIT_STAR)
        }
    }
}

fn run_verify(instance: &Path, certificate: &Path, format: ReportFormat) -> Result<u8, u8> {
    let (p, t) = load_instance(instance)?;
    let text = std::fs::read_to_string(certificate).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", certificate.display());
        EXIT_INVALID_INPUT
    })?;
    let doc = CertificateDoc::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", certificate.display());
        EXIT_INVALID_INPUT
    })?;
    if doc.presentation_digest != instance_digest(&p, &t) {
        eprintln!("error: certificate was issued for a different instance (digest mismatch)");
        return Err(EXIT_INVALID_INPUT);
    }
    let report = verify::verify_payload(&p, &t, &doc.payload);
    match format {
        ReportFormat::Text => {
            for c in report.sorted_checks() {
                let mark = if c.passed { "pass" } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("{mark}  {}", c.name);
                } else {
                    println!("{mark}  {}: {}", c.name, c.detail);
                }
            }
            println!("verdict: {}", if report.accepted() { "accept" } else { "reject" });
        }
        ReportFormat::Json => {
            let checks: Vec<serde_json::Value> = report
                .sorted_checks()
                .into_iter()
                .map(|c| {
                    serde_json::json!({ "name": c.name, "passed": c.passed, "detail": c.detail })
                })
                .collect();
            let doc = serde_json::json!({
                "verdict": if report.accepted() { "accept" } else { "reject" },
                "checks": checks,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(if report.accepted() { EXIT_TOUGH_OR_ACCEPT } else { EXIT_REJECTED })
}

fn dot_export(p: &Presentation, depth: u32, copies: u32) -> Result<String, u8> {
    let t = materialize(p, depth, copies, budget()).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID_INPUT
    })?;
    let mut s = String::new();
    let _ = writeln!(s, "graph truncation {{");
    for i in 0..t.vertex_count() as u32 {
        let _ = writeln!(s, "  v{i} [label=\"{}\"];", t.name_of(i));
    }
    for &(a, b) in &t.graph.edges {
        let _ = writeln!(s, "  v{a} -- v{b};");
    }
    let _ = writeln!(s, "}}");
    Ok(s)
}

fn run_materialize(
    instance: &Path,
    depth: u32,
    copies: u32,
    format: GraphFormat,
    out: &Option<PathBuf>,
) -> Result<u8, u8> {
    let (p, _) = load_instance(instance)?;
    let content = match format {
        GraphFormat::Dot => dot_export(&p, depth, copies)?,
        GraphFormat::Json => {
            let t = materialize(&p, depth, copies, budget()).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_INVALID_INPUT
            })?;
            let names: Vec<String> =
                (0..t.vertex_count() as u32).map(|i| t.name_of(i).to_string()).collect();
            let doc = serde_json::json!({
                "vertices": names,
                "edges": t.graph.edges,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    };
    emit(out, &content)?;
    Ok(EXIT_TOUGH_OR_ACCEPT)
}

fn run_selftest(corpus_dir: &Path, seed: u64, count: usize, inject_mutant: bool) -> Result<u8, u8> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(corpus_dir)
        .map_err(|e| {
            eprintln!("error: cannot read corpus directory {}: {e}", corpus_dir.display());
            EXIT_INVALID_INPUT
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        eprintln!("error: corpus directory {} holds no instances", corpus_dir.display());
        return Err(EXIT_INVALID_INPUT);
    }
    let mut failures = 0usize;
    let mut lines: Vec<String> = Vec::new();

    let run_instance = |name: String,
                            p: &Presentation,
                            t: &TargetSet,
                            mutate: bool,
                            lines: &mut Vec<String>,
                            failures: &mut usize| {
        match decide(p, t) {
            Ok(cert) => {
                let mut payload = CertificatePayload::Dichotomy(cert);
                if mutate {
                    match &mut payload {
                        CertificatePayload::Dichotomy(DichotomyCertificate::Tough {
                            tough_subgraph,
                            ..
                        }) => {
                            tough_subgraph.part_b = combdual::symbolic::SymbolicVertexSet::default();
                        }
                        CertificatePayload::Dichotomy(DichotomyCertificate::Star(star)) => {
                            star.witness_x = BTreeSet::new();
                        }
                        _ => {}
                    }
                }
                let report = verify::verify_payload(p, t, &payload);
                if report.accepted() {
                    lines.push(format!("pass  {name}"));
                } else {
                    let why = report.first_failure().unwrap_or_default();
                    lines.push(format!("FAIL  {name}: {why}"));
                    *failures += 1;
                }
            }
            Err(e) => {
                lines.push(format!("FAIL  {name}: {e}"));
                *failures += 1;
            }
        }
    };

    for path in &entries {
        let (p, t) = load_instance(path)?;
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let oracle = verify::oracle_check(
            &p,
            &t,
            &verify::OracleKind::Critical { max_size: 3 },
            8,
            5,
            budget(),
        );
        if oracle.accepted() {
            lines.push(format!("pass  {name} (oracle)"));
        } else {
            lines.push(format!("FAIL  {name} (oracle)"));
            failures += 1;
        }
        let suite = verify::property_suite(&p, &t, seed, 25);
        if suite.accepted() {
            lines.push(format!("pass  {name} (properties)"));
        } else {
            lines.push(format!("FAIL  {name} (properties)"));
            failures += 1;
        }
        // Negative control and tamper round on tough instances: dropping the
        // linkage or a target vertex must flip the verdict.
        if matches!(toughness(&p, &t), Toughness::Tough) {
            match combdual::duality::build_tough_subgraph(&p, &t) {
                Ok(cert) => {
                    let mut naive = cert.clone();
                    naive.spine_pair_rule = false;
                    naive.explicit_paths.clear();
                    let has_linkage = cert.spine_pair_rule || !cert.explicit_paths.is_empty();
                    let rejected = !verify::verify_tough_subgraph(&p, &t, &naive).accepted();
                    if !has_linkage || rejected {
                        lines.push(format!("pass  {name} (negative control)"));
                    } else {
                        lines.push(format!("FAIL  {name} (negative control)"));
                        failures += 1;
                    }
                    let mut tampered = cert;
                    tampered.part_b = combdual::symbolic::SymbolicVertexSet::default();
                    if verify::verify_tough_subgraph(&p, &t, &tampered).accepted() {
                        lines.push(format!("FAIL  {name} (tamper survived)"));
                        failures += 1;
                    } else {
                        lines.push(format!("pass  {name} (tamper killed)"));
                    }
                }
                Err(e) => {
                    lines.push(format!("FAIL  {name} (construction): {e}"));
                    failures += 1;
                }
            }
        }
        run_instance(name, &p, &t, false, &mut lines, &mut failures);
    }
    for i in 0..count {
        let (p, t) = corpus::random_fan_instance(seed.wrapping_add(i as u64));
        let mutate = inject_mutant && i == 0;
        run_instance(format!("random-{i}"), &p, &t, mutate, &mut lines, &mut failures);
    }
    for line in &lines {
        println!("{line}");
    }
    println!("selftest: {} checks, {failures} failures", lines.len());
    Ok(if failures == 0 { EXIT_TOUGH_OR_ACCEPT } else { EXIT_REJECTED })
}

fn main() -> ExitCode {
    // Die quietly when the consumer of a pipe goes away, as line tools do.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze { instance, format } => run_analyze(instance, *format),
        Command::Decide { instance, out } => run_decide(instance, out),
        Command::Witness { instance, out } => run_witness(instance, out),
        Command::Verify { instance, certificate, format } => {
            run_verify(instance, certificate, *format)
        }
        Command::Materialize { instance, depth, copies, format, out } => {
            run_materialize(instance, *depth, *copies, *format, out)
        }
        Command::Selftest { corpus, seed, count, inject_mutant } => {
            run_selftest(corpus, *seed, *count, *inject_mutant)
        }
    };
    match outcome {
        Ok(code) | Err(code) => ExitCode::from(code),
    }
}
