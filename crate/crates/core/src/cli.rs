//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::algebra::Mat;
use crate::ap::{build_ap_witness, occurs_in_ap, verify_witness, ApWitness, OccursRecord};
use crate::error::{Error, Result};
use crate::geodesics::{bits_for_digits, enumerate_length_set_prec, format_sig, OUTPUT_DIGITS, PRECISION_BITS};
use crate::orders::bianchi::{order_p_bianchi, BianchiMat};
use crate::orders::sl3::{companion_from_poly, image_order, order_p_parabolic, ParabolicSpec};
use crate::orders::{crt_check, find_modulus_with_p, order_p, prime_tower, ModulusSearch, DEFAULT_BUDGET};
use crate::progressions::{
    find_almost_ap, find_almost_ap_scan, float, growth_ratio, parse_rational, GrowthModel, RealMultiset,
};
use crate::ramsey::{double_transfer, transfer_ap, vdw_number, CoverSpec, VdwOutcome};

pub const PRECISION_ENV: &str = "GEOAP_DIGITS";

#[derive(Debug, Parser)]
#[command(name = "geoap", version, about = "Arithmetic progressions in geodesic length spectra")]
pub struct Cli {
    /// Significant digits for printed lengths (at least 25).
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = OUTPUT_DIGITS)]
    pub digits: usize,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the length set {2 arccosh(m/2) : 3 <= m <= max} as CSV.
    Spectrum {
        #[arg(long)]
        max_trace: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// P(γ, m), or the tower P(γ, p^k) for k = 1..depth.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, conflicts_with_all = ["prime", "depth"])]
        modulus: Option<u64>,
        #[arg(long, requires = "depth")]
        prime: Option<u64>,
        #[arg(long, requires = "prime")]
        depth: Option<u32>,
    },
    /// Compare P(γ, mn) with lcm(P(γ, m), P(γ, n)).
    Crt {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// Search for m with P(γ, m) = target.
    FindModulus {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, default_value_t = 0)]
        prime_floor: u64,
    },
    /// Build a k-term progression witness.
    Ap {
        #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
        trace: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Progression of integral multiples of the length of a trace.
    Occurs {
        #[arg(long)]
        trace: String,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a witness file.
    Check { file: PathBuf },
    /// Bucket search for an ε-almost progression.
    AlmostAp {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u64,
        /// Bucket width; without it widths 20/(20+i) are scanned.
        #[arg(long)]
        t: Option<String>,
        #[arg(long, default_value_t = 400)]
        scan_steps: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S(x − t)/S(x) against the model limit e^{−ht}.
    Growth {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
    },
    /// Exhaustive Van der Waerden number W(colors, k).
    Vdw {
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        n_max: u64,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget_secs: Option<u64>,
    },
    /// Transfer a progression through a cover (or two, with --up/--down).
    Transfer {
        #[arg(long, conflicts_with_all = ["up", "down"], required_unless_present = "up")]
        cover: Option<PathBuf>,
        #[arg(long, requires = "down")]
        up: Option<PathBuf>,
        #[arg(long, requires = "up")]
        down: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        /// Comma-separated exact values; defaults to 1..N (single) or C·D·n (double).
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 1)]
        j: u64,
        #[arg(long, default_value_t = 1)]
        i: u64,
    },
    /// Parabolic orders in SL(3, Z).
    Sl3 {
        #[command(subcommand)]
        command: Sl3Command,
    },
    /// P(γ, α) in SL(2, O_K) for a rational integer α.
    Bianchi {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        /// Four entries u:v in the basis {1, ω}.
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long)]
        alpha: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Sl3Command {
    Order {
        #[command(flatten)]
        input: Sl3Input,
        #[arg(long)]
        parabolic: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
    ImageOrder {
        #[command(flatten)]
        input: Sl3Input,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Sl3Input {
    /// Monic cubic as 1,c2,c1,c0.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Nine row-major integers.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Source {
    /// Lengths of the modular surface up to --max-trace.
    Modular,
    /// {ln n : n <= --max-n}.
    Log,
    /// A CSV file given by --input.
    Csv,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value_t = Source::Modular)]
    source: Source,
    #[arg(long)]
    max_trace: Option<u64>,
    #[arg(long)]
    max_n: Option<u64>,
    #[arg(long)]
    input: Option<PathBuf>,
}

impl SourceArgs {
    fn load(&self) -> Result<RealMultiset> {
        let missing = |flag: &str| Error::InvalidArgument(format!("this source needs {flag}"));
        match self.source {
            Source::Modular => {
                let max = self.max_trace.ok_or_else(|| missing("--max-trace"))?;
                if max < 3 {
                    return Err(Error::InvalidArgument(format!("max trace {max} < 3")));
                }
                let traces: Vec<Integer> = (3..=max).map(Integer::from).collect();
                RealMultiset::from_traces(&traces)
            }
            Source::Log => {
                let n = self.max_n.ok_or_else(|| missing("--max-n"))?;
                let values = (1..=n).map(|i| Float::with_val(PRECISION_BITS, i).ln()).collect();
                RealMultiset::from_values(values)
            }
            Source::Csv => {
                let path = self.input.as_ref().ok_or_else(|| missing("--input"))?;
                RealMultiset::load_csv(fs::File::open(path)?)
            }
        }
    }
}

fn parse_gamma(s: &str) -> Result<Mat> {
    Mat::parse(s)
}

fn parse_int(s: &str) -> Result<Integer> {
    s.trim()
        .parse::<Integer>()
        .map_err(|_| Error::InvalidArgument(format!("bad integer {s:?}")))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, body)?,
        None => writeln!(out, "{body}")?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses the command line; clap errors are returned with their exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Executes a parsed command and returns its exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    if cli.digits < OUTPUT_DIGITS {
        return Err(Error::InvalidArgument(format!("precision {} < {OUTPUT_DIGITS} digits", cli.digits)));
    }
    if cli.threads > 0 {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match &cli.command {
        Command::Spectrum { max_trace, out: path } => {
            let prec = bits_for_digits(cli.digits).max(PRECISION_BITS);
            let set = enumerate_length_set_prec(*max_trace, prec)?;
            match path {
                Some(p) => {
                    set.write_csv_digits(fs::File::create(p)?, cli.digits)?;
                    writeln!(out, "{} rows written to {}", set.len(), p.display())?;
                }
                None => set.write_csv_digits(&mut *out, cli.digits)?,
            }
        }
        Command::Order { gamma, modulus, prime, depth } => {
            let g = parse_gamma(gamma)?;
            match (modulus, prime, depth) {
                (Some(m), None, None) => writeln!(out, "{}", order_p(&g, *m)?)?,
                (None, Some(p), Some(k)) => writeln!(out, "{}", join(&prime_tower(&g, *p, *k)?.values))?,
                _ => return Err(Error::InvalidArgument("give --modulus or --prime with --depth".into())),
            }
        }
        Command::Crt { gamma, m, n } => {
            let c = crt_check(&parse_gamma(gamma)?, *m, *n)?;
            writeln!(out, "P(mn) = {}, lcm = {}, equal = {}", c.lhs, c.rhs, c.equal)?;
            if !c.equal {
                return Ok(4);
            }
        }
        Command::FindModulus { gamma, target, budget, prime_floor } => {
            match find_modulus_with_p(&parse_gamma(gamma)?, *target, *budget, *prime_floor)? {
                ModulusSearch::Found(m) => writeln!(out, "{m}")?,
                ModulusSearch::NotFound(progress) => {
                    writeln!(out, "{}", to_json(&progress)?)?;
                    return Err(Error::CapExceeded(format!("no modulus with order {target} found")));
                }
            }
        }
        Command::Ap { trace, gamma, k, budget, out: path } => {
            let witness = match (trace, gamma) {
                (Some(t), None) => occurs_in_ap(&parse_int(t)?, *k, *budget)?.witness,
                (None, Some(g)) => build_ap_witness(&parse_gamma(g)?, *k, *budget)?,
                _ => return Err(Error::InvalidArgument("give exactly one of --trace, --gamma".into())),
            };
            let json = witness.to_json()?;
            if let Some(p) = path {
                fs::write(p, &json)?;
            }
            writeln!(out, "C = {}", witness.c)?;
            writeln!(out, "multipliers = {}", join(&witness.multipliers()))?;
            writeln!(out, "verified = {}", witness.verified)?;
            if !witness.is_complete() {
                for f in &witness.failures {
                    writeln!(out, "r = {}: {}", f.r, f.reason)?;
                }
                return Err(Error::CapExceeded("witness is incomplete".into()));
            }
        }
        Command::Occurs { trace, k, budget, out: path } => {
            let rec = occurs_in_ap(&parse_int(trace)?, *k, *budget)?;
            emit(out, path.as_deref(), &to_json(&rec)?)?;
        }
        Command::Check { file } => {
            let text = fs::read_to_string(file)?;
            let witness = match ApWitness::from_json(&text) {
                Ok(w) => w,
                Err(_) => serde_json::from_str::<OccursRecord>(&text)?.witness,
            };
            let v = verify_witness(&witness);
            if v.ok {
                writeln!(out, "verified")?;
            } else {
                writeln!(out, "FAILED")?;
                for r in &v.reasons {
                    writeln!(out, "  {r}")?;
                }
                return Ok(4);
            }
        }
        Command::AlmostAp { source, eps, k, t, scan_steps, out: path } => {
            let s = source.load()?;
            let eps = parse_rational(eps)?;
            let outcome = match t {
                Some(t) => find_almost_ap(&s, &eps, *k, &parse_rational(t)?)?,
                None => find_almost_ap_scan(&s, &eps, *k, 20, *scan_steps)?,
            };
            emit(out, path.as_deref(), &to_json(&outcome)?)?;
        }
        Command::Growth { source, t, x, h } => {
            let s = source.load()?;
            let (t, x) = (float(*t), float(*x));
            let ratio = growth_ratio(&s, &t, &x)?;
            let limit = GrowthModel::new(*h)?.limiting_ratio(&t);
            writeln!(out, "ratio = {}", format_sig(&ratio, cli.digits))?;
            writeln!(out, "limit = {}", format_sig(&limit, cli.digits))?;
        }
        Command::Vdw { colors, k, n_max, budget_secs } => {
            match vdw_number(*colors, *k, *n_max, budget_secs.map(Duration::from_secs))? {
                VdwOutcome::Exact { n, witness } => {
                    writeln!(out, "{n}")?;
                    writeln!(out, "witness = {}", join(&witness.colors))?;
                }
                VdwOutcome::Unknown { reason, longest_free } => {
                    writeln!(out, "unknown: {reason} (longest free coloring {longest_free})")?;
                    return Ok(3);
                }
            }
        }
        Command::Transfer { cover, up, down, k, values, c, j, i } => {
            let load = |p: &PathBuf| -> Result<CoverSpec> {
                let spec: CoverSpec = serde_json::from_str(&fs::read_to_string(p)?)?;
                spec.validate()?;
                Ok(spec)
            };
            if let Some(p) = cover {
                let spec = load(p)?;
                let vals: Vec<Rational> = match values {
                    Some(v) => v.split(',').map(parse_rational).collect::<Result<_>>()?,
                    None => (1..=spec.lift_divisor.len() as u64).map(Rational::from).collect(),
                };
                writeln!(out, "{}", to_json(&transfer_ap(&vals, &spec, *k)?)?)?;
            } else if let (Some(u), Some(d)) = (up, down) {
                let (u, d) = (load(u)?, load(d)?);
                let vals: Vec<Integer> = match values {
                    Some(v) => v.split(',').map(parse_int).collect::<Result<_>>()?,
                    None => crate::ramsey::proof_base_values(*c, d.degree, u.degree, u.lift_divisor.len() as u64),
                };
                writeln!(out, "{}", to_json(&double_transfer(&vals, &u, &d, *k, *j, *i)?)?)?;
            }
        }
        Command::Sl3 { command } => {
            let load = |inp: &Sl3Input| -> Result<Mat> {
                match (&inp.poly, &inp.gamma) {
                    (Some(p), None) => {
                        let coeffs = p
                            .split(',')
                            .map(|c| c.trim().parse::<i64>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| Error::InvalidArgument(format!("bad polynomial {p:?}")))?;
                        companion_from_poly(&coeffs)
                    }
                    (None, Some(g)) => Mat::parse(g),
                    _ => Err(Error::InvalidArgument("give exactly one of --poly, --gamma".into())),
                }
            };
            match command {
                Sl3Command::Order { input, parabolic, prime, depth } => {
                    let spec: ParabolicSpec = parabolic.parse()?;
                    writeln!(out, "{}", order_p_parabolic(&load(input)?, spec, *prime, *depth)?)?;
                }
                Sl3Command::ImageOrder { input, prime, depth } => {
                    writeln!(out, "{}", image_order(&load(input)?, *prime, *depth)?)?;
                }
            }
        }
        Command::Bianchi { d, gamma, alpha } => {
            let g = BianchiMat::parse(*d, gamma)?;
            writeln!(out, "{}", order_p_bianchi(&g, *alpha)?)?;
        }
    }
    Ok(0)
}
