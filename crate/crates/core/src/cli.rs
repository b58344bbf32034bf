//! Command-line front end. Reports go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 a check came out false, 2 usage, parse or
//! input errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::family::{default_u_samples, default_v_samples, verify_section4, Family, FamilyLabel, FamilyParams};
use crate::format::{parse_dimvec, parse_quiver, parse_rep, serialize_quiver, serialize_rep};
use crate::geometry::{a_dim, euler_form, gl_dim_group, regularity_certificate, tits_form};
use crate::homological::{iso_probable, IsoVerdict, DEFAULT_ISO_TRIALS};
use crate::report::invariant_report;
use crate::{QBoundQuiver, QRepresentation, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(name = "qvar", version, about = "Exact invariants of representations of bound quivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Table,
    Kv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a quiver file and print its canonical form.
    Validate { file: PathBuf },
    /// Hom, Ext, Euler and orbit data for one or two representations.
    Invariants {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        rep2: Option<PathBuf>,
        #[arg(long)]
        assume_gldim2: bool,
    },
    /// Euler form, Tits form and a(d) of dimension vectors `name=value,...`.
    Euler {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        #[arg(long)]
        dim2: Option<String>,
    },
    /// Regularity certificate for a point of a module variety.
    Certify {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        assume_gldim2: bool,
    },
    /// Write the five-parameter family quiver, optionally with H'(u) + H''(v).
    Family {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        emit_quiver: PathBuf,
        #[arg(long, requires_all = ["u", "v"])]
        emit_rep: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Run the Z_S decomposition and bound checks over the family grid.
    PaperVerify {
        #[command(flatten)]
        params: ParamArgs,
        /// Scalar samples for both H' and H'' (comma separated).
        #[arg(long, allow_hyphen_values = true)]
        samples: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u_samples: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v_samples: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
    /// Randomised isomorphism test with exact certificates.
    Iso {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        rep2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ISO_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DecompositionMismatch { .. }
            | Error::InequalityViolated { .. }
            | Error::CheckFailed { .. }
            | Error::NegativeExt2 { .. }
            | Error::NotAVarietyPoint { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_quiver(path: &Path) -> Result<QBoundQuiver, Failure> {
    parse_quiver(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_rep(bq: &QBoundQuiver, path: &Path) -> Result<QRepresentation, Failure> {
    parse_rep(bq.quiver(), &read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn params(p: ParamArgs) -> Result<FamilyParams, Failure> {
    Ok(FamilyParams::new(p.p, p.q, p.r, p.s, p.t)?)
}

fn scalar_list(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Rational::parse_exact(s).ok_or_else(|| usage(format!("bad scalar `{s}`"))))
        .collect()
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut emit = |text: &str| -> Result<(), Failure> {
        out.write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}")))
    };
    match command {
        Command::Validate { file } => {
            let bq = load_quiver(&file)?;
            let q = bq.quiver();
            emit(&format!(
                "# {} vertices, {} arrows, {} relations, admissible={}, triangular={}\n",
                q.vertex_count(),
                q.arrow_count(),
                bq.relations().len(),
                bq.is_admissible(),
                bq.is_triangular()
            ))?;
            emit(&serialize_quiver(&bq))?;
            Ok(0)
        }
        Command::Invariants {
            quiver,
            rep,
            rep2,
            assume_gldim2,
        } => {
            let bq = load_quiver(&quiver)?;
            let m = load_rep(&bq, &rep)?;
            let n = rep2.map(|p| load_rep(&bq, &p)).transpose()?;
            let report = invariant_report(&m, n.as_ref(), &bq, assume_gldim2)?;
            emit(&report.to_string())?;
            Ok(0)
        }
        Command::Euler { quiver, dim, dim2 } => {
            let bq = load_quiver(&quiver)?;
            let q = bq.quiver();
            let d1 = parse_dimvec(q, &dim)?;
            let d2 = match dim2 {
                Some(s) => parse_dimvec(q, &s)?,
                None => d1.clone(),
            };
            let mut text = String::new();
            text += &format!("d1 = {}\nd2 = {}\n", d1.display(q), d2.display(q));
            text += &format!("<d1,d2> = {}\n", euler_form(&d1, &d2, &bq)?);
            text += &format!("<d2,d1> = {}\n", euler_form(&d2, &d1, &bq)?);
            for (name, d) in [("d1", &d1), ("d2", &d2)] {
                text += &format!(
                    "q({name}) = {}\na({name}) = {}\ndimGL({name}) = {}\n",
                    tits_form(d, &bq)?,
                    a_dim(d, &bq)?,
                    gl_dim_group(d)
                );
            }
            emit(&text)?;
            Ok(0)
        }
        Command::Certify {
            quiver,
            rep,
            assume_gldim2,
        } => {
            let bq = load_quiver(&quiver)?;
            let m = load_rep(&bq, &rep)?;
            let cert = regularity_certificate(&m, &bq, assume_gldim2)?;
            let ext2 = cert.ext2_self.map_or("n/a".to_string(), |x| x.to_string());
            emit(&format!(
                "verdict = {}\ndim Z(M,M) = {}\na(d) = {}\next2(M,M) = {}\n{}\n",
                cert.verdict.label(),
                cert.z_self_dim,
                cert.a_dim,
                ext2,
                cert.narrative
            ))?;
            Ok(0)
        }
        Command::Family {
            params: p,
            emit_quiver,
            emit_rep,
            u,
            v,
        } => {
            let family = Family::<Rational>::new(params(p)?)?;
            write_file(&emit_quiver, &serialize_quiver(&family.bq))?;
            let (h1, h2, d) = family.canonical_dimvecs();
            let q = family.quiver();
            let mut text = format!(
                "wrote {}\nh' = {}\nh'' = {}\nd = {}\nadmissible = {}\n",
                emit_quiver.display(),
                h1.display(q),
                h2.display(q),
                d.display(q),
                family.bq.is_admissible()
            );
            if let (Some(path), Some(u), Some(v)) = (emit_rep, u, v) {
                let m = family
                    .build_h1(&FamilyLabel::parse(&u))?
                    .direct_sum(&family.build_h2(&FamilyLabel::parse(&v))?)?;
                write_file(&path, &serialize_rep(&m))?;
                text += &format!("wrote {} (H'({u}) + H''({v}))\n", path.display());
            }
            emit(&text)?;
            Ok(0)
        }
        Command::PaperVerify {
            params: p,
            samples,
            u_samples,
            v_samples,
            seed,
            out: out_path,
            format,
        } => {
            let shared = samples.as_deref().map(scalar_list).transpose()?;
            let us = match (u_samples, &shared) {
                (Some(s), _) => scalar_list(&s)?,
                (None, Some(s)) => s.clone(),
                (None, None) => default_u_samples(),
            };
            let vs = match (v_samples, &shared) {
                (Some(s), _) => scalar_list(&s)?,
                (None, Some(s)) => s.clone(),
                (None, None) => default_v_samples(),
            };
            let report = verify_section4(params(p)?, &us, &vs, seed)?;
            let text = match format {
                ReportFormat::Table => report.to_table(),
                ReportFormat::Kv => report.to_key_value(),
            };
            if let Some(path) = out_path {
                write_file(&path, &text)?;
            }
            emit(&text)?;
            report.check()?;
            Ok(0)
        }
        Command::Iso {
            quiver,
            rep,
            rep2,
            trials,
            seed,
        } => {
            let bq = load_quiver(&quiver)?;
            let m = load_rep(&bq, &rep)?;
            let n = load_rep(&bq, &rep2)?;
            let verdict = iso_probable(&m, &n, trials, seed)?;
            let mut text = format!("verdict = {}\n", verdict.label());
            if let IsoVerdict::Isomorphic(maps) = &verdict {
                for (x, f) in maps.iter().enumerate() {
                    text += &format!("f[{}] = {f}\n", bq.quiver().vertex_name(x));
                }
            }
            emit(&text)?;
            Ok(if matches!(verdict, IsoVerdict::NotIsomorphic) { 1 } else { 0 })
        }
    }
}

/// Runs the CLI on `args`, writing the report to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
