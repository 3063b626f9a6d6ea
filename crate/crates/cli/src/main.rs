use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use catalan_core::iso::inverse_matrix;
use catalan_core::verify::{self, Counterexample, Mode, VerifyOptions, VerifyReport};
use catalan_core::{
    enumerate_monoid, enumerate_pairs, phi, phi_inverse, phi_matrix, CMap, CompositionRule, Error, IncidenceElement,
    MonoidElement, PosetPair, RingSpec, MATRIX_MAX_DEGREE,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Default bound on `--n` for `enumerate`.
const ENUMERATE_DEFAULT_BOUND: usize = 12;

#[derive(Parser)]
#[command(version, about = "Catalan monoid algebras and the incidence algebra of P_n")]
struct Cli {
    /// Override the size bound of the subcommand (also read from CATALAN_MAX_N).
    #[arg(long, global = true, env = "CATALAN_MAX_N")]
    max_n: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Every `--n K` is the degree `K = n+1` of the monoid `C_K`; the matching
/// poset is `P_{K-1}`.
#[derive(Subcommand)]
enum Command {
    /// List the elements of C_K, or the pairs X <= Y of P_{K-1}.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pairs: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print the composite fg (i ↦ f(g(i))).
    Compose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Image of a monoid element under the isomorphism.
    Phi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "Z")]
        ring: RingSpec,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Preimage of a basis pair "X<Y", e.g. "{1}<{2}".
    PhiInv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pair: String,
        #[arg(long, default_value = "Z")]
        ring: RingSpec,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Export the matrix of the isomorphism (or its inverse) as CSV.
    Matrix {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "Z")]
        ring: RingSpec,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Run the verification suite; exit 1 on any failure.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "Z")]
        ring: RingSpec,
        /// Seed for randomized mode.
        #[arg(long, requires = "samples")]
        seed: Option<u64>,
        /// Number of random draws; switches to randomized mode.
        #[arg(long)]
        samples: Option<usize>,
        /// Rerun one counterexample, as printed by a failing run.
        #[arg(long)]
        replay: Option<String>,
        /// Self-test: use the incidence product with its condition flipped.
        #[arg(long)]
        mutate_incidence: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::Usage(format!("i/o: {e}"))
}

fn check_bound(n: usize, bound: usize) -> Result<(), Error> {
    if n > bound {
        return Err(Error::Resource {
            what: "--n",
            requested: n,
            bound,
        });
    }
    if n == 0 {
        return Err(Error::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn parse_map(s: &str, degree: usize) -> Result<CMap, Error> {
    let f = CMap::parse(s)?;
    if f.degree() != degree {
        return Err(Error::Usage(format!(
            "{f} has degree {}, but --n is {degree}",
            f.degree()
        )));
    }
    Ok(f)
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Error> {
    let s = serde_json::to_string(value).map_err(|e| Error::Usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::Enumerate { n, pairs, format } => {
            check_bound(n, cli.max_n.unwrap_or(ENUMERATE_DEFAULT_BOUND))?;
            let mut out = BufWriter::new(stdout.lock());
            if pairs {
                let all = enumerate_pairs(n - 1, n)?;
                match format {
                    Format::Json => serde_json::to_writer(&mut out, &all).map_err(|e| Error::Usage(e.to_string()))?,
                    Format::Text => all.iter().try_for_each(|p| writeln!(out, "{p}")).map_err(io_err)?,
                }
            } else {
                let all = enumerate_monoid(n, n)?;
                match format {
                    Format::Json => serde_json::to_writer(&mut out, &all).map_err(|e| Error::Usage(e.to_string()))?,
                    Format::Text => all.iter().try_for_each(|f| writeln!(out, "{f}")).map_err(io_err)?,
                }
            }
            if let Format::Json = format {
                writeln!(out).map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
        }
        Command::Compose { n, f, g } => {
            let (f, g) = (parse_map(&f, n)?, parse_map(&g, n)?);
            println!("{}", f.compose(&g)?);
        }
        Command::Phi { n, f, ring, format } => {
            let f = parse_map(&f, n)?;
            let image = phi(&MonoidElement::basis(ring, f));
            match format {
                Format::Json => print_json(&image)?,
                Format::Text => println!("{image}"),
            }
        }
        Command::PhiInv { n, pair, ring, format } => {
            check_bound(n, cli.max_n.unwrap_or(MATRIX_MAX_DEGREE).min(MATRIX_MAX_DEGREE))?;
            let p = PosetPair::parse(&pair, n - 1)?;
            let pre = phi_inverse(&IncidenceElement::basis(ring, p))?;
            match format {
                Format::Json => print_json(&pre)?,
                Format::Text => println!("{pre}"),
            }
        }
        Command::Matrix { n, ring, out, inverse } => {
            check_bound(n, cli.max_n.unwrap_or(MATRIX_MAX_DEGREE).min(MATRIX_MAX_DEGREE))?;
            let m = if inverse {
                inverse_matrix(n - 1, ring)?
            } else {
                phi_matrix(n - 1, ring)?
            };
            let file = File::create(&out).map_err(io_err)?;
            m.write_csv(BufWriter::new(file)).map_err(io_err)?;
            eprintln!("wrote {}x{} matrix to {}", m.dim(), m.dim(), out.display());
        }
        Command::Verify {
            n,
            ring,
            seed,
            samples,
            replay,
            mutate_incidence,
            format,
        } => {
            let rule = if mutate_incidence {
                CompositionRule::Reversed
            } else {
                CompositionRule::Standard
            };
            if let Some(cx) = replay {
                let cx: Counterexample =
                    serde_json::from_str(&cx).map_err(|e| Error::Parse(format!("counterexample: {e}")))?;
                return Ok(if verify::replay(n, ring, rule, &cx)? {
                    eprintln!("{}: case holds", cx.check);
                    0
                } else {
                    eprintln!("{}: case fails (reproduced)", cx.check);
                    1
                });
            }
            let mode = match samples {
                Some(samples) => Mode::Randomized {
                    seed: seed.unwrap_or(0),
                    samples,
                },
                None => Mode::Exhaustive,
            };
            let options = VerifyOptions {
                mode,
                rule,
                exhaustive_bound: cli.max_n.unwrap_or(verify::DEFAULT_EXHAUSTIVE_BOUND),
            };
            let report = verify::verify_all(n, ring, options)?;
            match format {
                Format::Json => print_json(&report)?,
                Format::Text => print_text(&report),
            }
            if let Some(failed) = report.first_failure() {
                if let Some(cx) = &failed.counterexample {
                    let cx_json = serde_json::to_string(cx).map_err(|e| Error::Usage(e.to_string()))?;
                    eprintln!("counterexample: {cx_json}");
                    let mutant = if mutate_incidence { " --mutate-incidence" } else { "" };
                    eprintln!("replay with: catalan verify --n {n} --ring {ring}{mutant} --replay '{cx_json}'");
                }
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn print_text(report: &VerifyReport) {
    println!("C_{} over {}", report.n, report.ring);
    for c in &report.checks {
        let status = if c.failures == 0 { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<26} cases={:<9} failures={:<6} {:?} {:.1}ms",
            c.name, c.cases, c.failures, c.coverage, c.wall_ms
        );
    }
    for s in &report.skipped {
        println!("SKIP {s}");
    }
    if let Some(s) = &report.sampling {
        println!("sampling: {s}");
    }
    println!("{}", if report.pass { "verified" } else { "FAILED" });
}
