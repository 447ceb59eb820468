use std::fmt;
use std::fs;
use std::path::Path;

use latheta::analytic::{self, ExtremumReport, RatioScan};
use latheta::codes::{format_weight_enumerator, LinearCode};
use latheta::dsp::{self, HierarchyOptions};
use latheta::exact::{self, format_rational, parse_rational, IntRows};
use latheta::gts::{generalized_theta_with, GtsOptions};
use latheta::repro::{self, ReproOptions};
use latheta::{builtin_code, builtin_lattice, theta_spectrum, Limits, QuadraticLattice, Rational};
use serde_json::json;

use crate::{Cli, CodeSource, Command, Format, LatticeSource};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Library(latheta::Error),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(e) if e.is_capacity() => EXIT_CAPACITY,
            CliError::Library(latheta::Error::Consistency(_)) => 1,
            _ => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Input(msg) => f.write_str(msg),
        }
    }
}

impl From<latheta::Error> for CliError {
    fn from(e: latheta::Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_lattice(source: &LatticeSource) -> CliResult<QuadraticLattice> {
    match (&source.lattice, &source.lattice_file) {
        (Some(name), _) => Ok(builtin_lattice(name)?),
        (None, Some(path)) => Ok(QuadraticLattice::from_json(&read(path)?)?),
        (None, None) => Err(CliError::Input("give --lattice or --lattice-file".into())),
    }
}

fn load_code(source: &CodeSource) -> CliResult<LinearCode> {
    match (&source.code, &source.code_file) {
        (Some(name), _) => Ok(builtin_code(name)?),
        (None, Some(path)) => Ok(LinearCode::from_json(&read(path)?)?),
        (None, None) => Err(CliError::Input("give --code or --code-file".into())),
    }
}

fn positive_real(text: &str, what: &str) -> CliResult<f64> {
    let value = exact::to_f64(&parse_rational(text)?);
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Input(format!("{what} must be positive, got {text}")))
    }
}

fn no_csv(format: Format, command: &str) -> CliResult<()> {
    if format == Format::Csv {
        Err(CliError::Input(format!("--format csv is not available for {command}")))
    } else {
        Ok(())
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serialises")
}

fn rows_text(rows: &IntRows) -> String {
    rows.iter()
        .map(|r| format!("    {r:?}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn run(cli: &Cli) -> CliResult<u8> {
    let mut limits = Limits::from_env();
    if let Some(cap) = cli.max_vectors {
        if cap == 0 {
            return Err(CliError::Input("--max-vectors must be positive".into()));
        }
        limits.max_vectors = cap;
    }
    let format = cli.format;
    match &cli.command {
        Command::Theta { source, bound } => theta(&load_lattice(source)?, bound, format, &limits),
        Command::Gts { source, r, m, coeff_box } => {
            no_csv(format, "gts")?;
            let lattice = load_lattice(source)?;
            let series = generalized_theta_with(&lattice, *r, *m, GtsOptions { coeff_box: *coeff_box }, &limits)?;
            match format {
                Format::Json => println!("{}", series.to_json()),
                _ => {
                    println!("{}", series.to_q_series());
                    for t in &series.terms {
                        println!(
                            "  m={} exponent {} count {} ball radius^2 {}{}",
                            t.m,
                            format_rational(&t.mu),
                            t.count,
                            format_rational(&t.ball_sq),
                            if t.guaranteed { " (guaranteed)" } else { "" }
                        );
                    }
                }
            }
            Ok(0)
        }
        Command::Norms { source, no_duality } => {
            no_csv(format, "norms")?;
            let lattice = load_lattice(source)?;
            let options = HierarchyOptions { use_duality: !no_duality };
            let h = dsp::norm_hierarchy_with(&lattice, &limits, options)?;
            match format {
                Format::Json => println!("{}", h.to_json()),
                _ => {
                    for (r, v) in h.values.iter().enumerate() {
                        let note = if h.exact_flags[r] { "" } else { "  (short-list search, not certified)" };
                        println!("nu_{} = {} ~ {:.4}{note}", r + 1, format_rational(v), exact::to_f64(v));
                    }
                }
            }
            Ok(0)
        }
        Command::Stable { source } => {
            no_csv(format, "stable")?;
            let lattice = load_lattice(source)?;
            let cert = dsp::is_stable(&lattice, &limits)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&cert).expect("certificate serialises")),
                _ => {
                    if cert.stable {
                        println!("stable");
                    } else if !cert.volume_ok {
                        println!(
                            "unstable: volume^2 is {}, not 1",
                            format_rational(&lattice.volume_sq())
                        );
                    }
                    if let (Some(r), Some(w), Some(v)) = (cert.violating_r, &cert.witness, &cert.violating_value) {
                        println!("unstable at r={r}: nu_{r} = {} < 1, witness rows:", format_rational(v));
                        println!("{}", rows_text(w));
                    }
                    if !cert.exact {
                        println!("note: some hierarchy entries come from a short-list search");
                    }
                }
            }
            Ok(0)
        }
        Command::Ratio { source, from, to, steps, tol } => {
            let lattice = load_lattice(source)?;
            let (a, b) = (positive_real(from, "--from")?, positive_real(to, "--to")?);
            let scan = analytic::ratio_scan(&lattice, a, b, *steps, *tol, &limits)?;
            let report = analytic::extremum_scan(&scan)?;
            print_scan(&scan, &report, format);
            Ok(0)
        }
        Command::Symmetry { source, tau0, samples, tol } => {
            no_csv(format, "symmetry")?;
            let lattice = load_lattice(source)?;
            let t0 = positive_real(tau0, "--tau0")?;
            let dev = analytic::symmetry_check(&lattice, t0, *samples, *tol, &limits)?;
            match format {
                Format::Json => println!("{}", pretty(&json!({"tau0": t0, "samples": samples, "max_deviation": dev}))),
                _ => println!("max |Delta(tau0 t) - Delta(tau0/t)| over t in [1,4]: {dev:.3e}"),
            }
            Ok(0)
        }
        Command::Ghw { source } => {
            no_csv(format, "ghw")?;
            let code = load_code(source)?;
            let enumerator = code.weight_enumerator()?;
            let hierarchy = code.weight_hierarchy()?;
            match format {
                Format::Json => println!(
                    "{}",
                    pretty(&json!({
                        "weight_enumerator": enumerator,
                        "weight_enumerator_text": format_weight_enumerator(&enumerator),
                        "weight_hierarchy": hierarchy.values,
                    }))
                ),
                _ => {
                    println!("W(x,y) = {}", format_weight_enumerator(&enumerator));
                    println!("d = {:?}", hierarchy.values);
                }
            }
            Ok(0)
        }
        Command::Constructa { source, output } => {
            let lattice = load_code(source)?.construction_a()?;
            let text = lattice.to_json();
            match output {
                Some(path) => {
                    fs::write(path, text + "\n")
                        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
                    eprintln!(
                        "wrote {} (dimension {}, volume^2 {})",
                        path.display(),
                        lattice.dim(),
                        format_rational(&lattice.volume_sq())
                    );
                }
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::PaperRepro { strict_gts_example3, json, seed } => {
            let options = ReproOptions {
                strict_gts_example3: *strict_gts_example3,
                seed: *seed,
            };
            let report = repro::run(&limits, &options);
            if *json || format == Format::Json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render());
            }
            Ok(if report.passed() { 0 } else { EXIT_ACCEPTANCE })
        }
    }
}

fn theta(lattice: &QuadraticLattice, bound: &str, format: Format, limits: &Limits) -> CliResult<u8> {
    let bound: Rational = parse_rational(bound)?;
    let spectrum = theta_spectrum(lattice, &bound, limits.max_vectors)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&spectrum).expect("spectrum serialises")),
        Format::Csv => {
            println!("mu,count");
            for t in &spectrum.terms {
                println!("{},{}", format_rational(&t.mu), t.count);
            }
        }
        Format::Human => {
            println!("1 + {}", spectrum.to_q_series());
            for t in &spectrum.terms {
                println!("  {}:{}", format_rational(&t.mu), t.count);
            }
        }
    }
    Ok(0)
}

fn print_scan(scan: &RatioScan, report: &ExtremumReport, format: Format) {
    match format {
        Format::Csv => print!("{}", scan.to_csv()),
        Format::Json => println!("{}", pretty(&json!({"scan": scan, "extremum": report}))),
        Format::Human => {
            print!("{}", scan.to_csv());
            println!(
                "# grid point nearest tau=1: tau={:.6} delta={:.9} -> {}{}",
                report.tau,
                report.delta,
                report.classification,
                if report.extreme_over_grid {
                    " (extreme over the scanned interval only)"
                } else {
                    ""
                }
            );
            println!(
                "# min delta {:.9}, max delta {:.9} on [{}, {}]",
                scan.min_delta(),
                scan.max_delta(),
                scan.grid.first().copied().unwrap_or(0.0),
                scan.grid.last().copied().unwrap_or(0.0)
            );
        }
    }
}
