use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use tropmono::fan::Fan;
use tropmono::localization::{sample_variety, CutoffParams, SamplingSpec};
use tropmono::poly::ParseError;
use tropmono::report::{analysis_json, analysis_text, analyze, run_verify, verify_json, AnalyzeError, VerifyOptions};
use tropmono::svg::{render, PlotOptions};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_SMOOTH: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tropmono", version, about = "Tropical hypersurfaces, their monodromy and numeric localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolyArgs {
    /// Polynomial text, or a file containing it.
    #[arg(long)]
    poly: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Subdivision, tropical complex, strata and monodromy as JSON.
    Analyze {
        #[command(flatten)]
        input: PolyArgs,
        /// JSON file with "rays" and maximal "cones".
        #[arg(long)]
        fan: Option<PathBuf>,
        /// Write the JSON report here and a summary to stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// SVG of a plane curve next to its dual subdivision.
    Plot {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long)]
        out: PathBuf,
        /// Overlay an amoeba sample of V_q at q = R.
        #[arg(long)]
        amoeba: bool,
        /// Shade the regions around cells.
        #[arg(long)]
        regions: bool,
        #[arg(long, default_value_t = 20.0)]
        clip: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "R", default_value = "e^6", value_parser = parse_radius)]
        r: f64,
        #[arg(long = "C0", default_value_t = 0.1)]
        c0: f64,
        #[arg(long = "C1", default_value_t = 0.05)]
        c1: f64,
    },
    /// Numeric checks of the localization; one pass/fail entry per check.
    Verify {
        #[command(flatten)]
        input: PolyArgs,
        #[arg(long)]
        seed: u64,
        /// Base radius; sampling also runs at R², where the region checks happen.
        #[arg(long = "R", default_value = "e^6", value_parser = parse_radius)]
        r: f64,
        #[arg(long = "C0", default_value_t = 0.1)]
        c0: f64,
        #[arg(long = "C1", default_value_t = 0.05)]
        c1: f64,
        /// Export the amoeba sample at R as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// `12.5`, `e^6` or `exp(6)`.
fn parse_radius(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let exponent = t.strip_prefix("e^").or_else(|| t.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')));
    let r = match exponent {
        Some(e) => e.parse::<f64>().map_err(|e| e.to_string())?.exp(),
        None => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if r > 1.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(format!("R must be a finite number above 1, got {s}"))
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

fn read_poly(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    } else {
        Ok(arg.to_string())
    }
}

fn caret(text: &str, err: &AnalyzeError) -> String {
    match err {
        AnalyzeError::Parse(ParseError::Syntax { pos, .. }) => {
            let line = text.replace('\n', " ");
            let col = line.char_indices().take_while(|(i, _)| i < pos).count();
            format!("error: {err}\n  {line}\n  {}^", " ".repeat(col))
        }
        _ => format!("error: {err}"),
    }
}

fn params(c0: f64, c1: f64, r: f64) -> Result<CutoffParams, Failure> {
    match CutoffParams::new(c0, c1, r) {
        Ok(p) => Ok(p),
        Err(_) if 0.0 < c1 && c1 < c0 => {
            eprintln!("warning: C0 = {c0} exceeds 0.25; regions may overlap");
            Ok(CutoffParams::unchecked(c0, c1, r))
        }
        Err(e) => Err(Failure::usage(e.to_string())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze { input, fan, json } => {
            let text = read_poly(&input.poly)?;
            let dim = input.dim as usize;
            let fan = match fan {
                Some(p) => {
                    let raw = std::fs::read_to_string(&p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
                    Some(Fan::from_json(&raw, dim).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?)
                }
                None => None,
            };
            let a = analyze(&text, dim, fan.as_ref()).map_err(|e| Failure::usage(caret(&text, &e)))?;
            let report = serde_json::to_string_pretty(&analysis_json(&a)).expect("report serializes");
            match json {
                Some(p) => {
                    write_file(&p, &(report + "\n"))?;
                    print!("{}", analysis_text(&a));
                }
                None => println!("{report}"),
            }
            if let Err(f) = &a.smoothness {
                eprintln!("not smooth: {f}");
                return Ok(EXIT_NOT_SMOOTH);
            }
            Ok(0)
        }
        Command::Plot { input, out, amoeba, regions, clip, seed, r, c0, c1 } => {
            let text = read_poly(&input.poly)?;
            let a = analyze(&text, input.dim as usize, None).map_err(|e| Failure::usage(caret(&text, &e)))?;
            let p = params(c0, c1, r)?;
            let cloud = if amoeba {
                let spec = SamplingSpec { range: (-clip, clip), ..SamplingSpec::default() };
                Some(sample_variety(&a.poly, Complex64::new(r, 0.0), &p, &spec, seed).map_err(|e| Failure::usage(e.to_string()))?)
            } else {
                None
            };
            let opts = PlotOptions { clip, amoeba: cloud.as_ref(), regions: regions.then_some(p), ..PlotOptions::default() };
            let svg = render(&a.complex, &a.subdivision, &opts).map_err(|e| Failure::usage(e.to_string()))?;
            write_file(&out, &svg)?;
            Ok(0)
        }
        Command::Verify { input, seed, r, c0, c1, csv } => {
            let text = read_poly(&input.poly)?;
            let a = analyze(&text, input.dim as usize, None).map_err(|e| Failure::usage(caret(&text, &e)))?;
            if let Err(f) = &a.smoothness {
                eprintln!("error: verification needs a smooth tropical curve: {f}");
                return Ok(EXIT_NOT_SMOOTH);
            }
            let opts = VerifyOptions::new(seed, params(c0, c1, r)?);
            let summary = run_verify(&a.complex, &opts).map_err(|e| Failure::usage(e.to_string()))?;
            if let Some(path) = csv {
                let cloud = sample_variety(&a.poly, Complex64::new(r, 0.0), &opts.params, &opts.sampling, seed)
                    .map_err(|e| Failure::usage(e.to_string()))?;
                write_file(&path, &cloud.to_csv())?;
            }
            println!("{}", serde_json::to_string_pretty(&verify_json(&summary, &opts)).expect("report serializes"));
            for c in &summary.checks {
                eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if summary.passed() { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
