//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctasep::count::{s_w0, w0};
use ctasep::Permutation;

use crate::emit::Format;

#[derive(Debug, Parser)]
#[command(
    name = "ctasep",
    version,
    about = "Exact and Monte Carlo computations for the multi-type TASEP on a ring"
)]
pub struct Cli {
    /// Master seed for every Monte Carlo computation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for cached results.
    #[arg(long, global = true, env = "CTASEP_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Share of cache hits recomputed and compared.
    #[arg(long, global = true, default_value_t = crate::cache::DEFAULT_AUDIT_RATE, hide = true)]
    pub cache_audit: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The discrete multi-type TASEP.
    #[command(subcommand)]
    Tasep(TasepCmd),
    /// Multiline queues.
    #[command(subcommand)]
    Mlq(MlqCmd),
    /// MLQs with a given bottom-row pattern (same as `mlq count`).
    Count(CountArgs),
    /// The continuous TASEP.
    #[command(subcommand)]
    Continuum(ContinuumCmd),
    /// Polynomials and differential operators.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Young tableaux counts and the MLQ bijection.
    #[command(subcommand)]
    Tab(TabCmd),
    /// Linking patterns and the Temperley–Lieb chain.
    #[command(subcommand)]
    Rs(RsCmd),
    /// Run verification checks.
    Verify(VerifyArgs),
}

/// A type vector `m` and a ring size `N`.
#[derive(Debug, Args)]
pub struct TypeArgs {
    /// Class counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    /// Ring size.
    #[arg(long = "N", alias = "sites")]
    pub sites: usize,
}

#[derive(Debug, Subcommand)]
pub enum TasepCmd {
    /// Stationary distribution, exact or simulated.
    Stationary {
        #[command(flatten)]
        ty: TypeArgs,
        /// Exact rational solve (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        #[arg(long)]
        mc: bool,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: u64,
        #[arg(long, value_parser = parse_count, default_value = "10000")]
        burn_in: u64,
    },
    /// Ring the bell at one site.
    Step {
        /// Word with `.` for vacancies, e.g. `2.1.`.
        #[arg(long)]
        word: String,
        #[arg(long)]
        site: usize,
    },
    /// Compare the k-TASEP stationary law with the usual one.
    KCheck {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        k: usize,
    },
    /// Check that the last-row operator fixes the stationary law.
    LastRow {
        #[command(flatten)]
        ty: TypeArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum MlqCmd {
    /// Label an MLQ given by its rows.
    Label {
        #[command(flatten)]
        ty: TypeArgs,
        /// Rows top to bottom, `;` between rows, 0-based positions.
        #[arg(long)]
        rows: String,
    },
    /// MLQs whose bottom row shows `pi` at positions `b`.
    Count(CountArgs),
    /// Number of MLQs projecting to each word.
    Census {
        #[command(flatten)]
        ty: TypeArgs,
    },
}

/// A closed-form family for `G_pi(b; N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaSpec {
    W0,
    Skw0(usize),
    Sw0(Vec<usize>),
}

impl FormulaSpec {
    pub fn permutation(&self, n: usize) -> Permutation {
        match self {
            FormulaSpec::W0 => w0(n),
            FormulaSpec::Skw0(k) => s_w0(n, &[*k]),
            FormulaSpec::Sw0(ks) => s_w0(n, ks),
        }
    }
}

impl FromStr for FormulaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let list = |t: &str| -> Result<Vec<usize>, String> {
            t.split(',')
                .map(|x| x.trim().parse().map_err(|_| format!("bad index {x:?}")))
                .collect()
        };
        match s.split_once(':') {
            None if s == "w0" => Ok(FormulaSpec::W0),
            Some(("skw0", k)) => Ok(FormulaSpec::Skw0(
                k.trim().parse().map_err(|_| format!("bad index {k:?}"))?,
            )),
            Some(("sw0", ks)) => Ok(FormulaSpec::Sw0(list(ks)?)),
            _ => Err(format!("{s:?}: expected w0, skw0:K or sw0:K1,K2,...")),
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Bottom-row permutation, e.g. `4,3,2,1`. Implied by `--formula` when
    /// omitted.
    #[arg(long)]
    pub pi: Option<String>,
    /// Increasing 0-based positions of the classes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<usize>,
    #[arg(long = "N", alias = "sites")]
    pub sites: usize,
    /// Also evaluate a closed form: `w0`, `skw0:K` or `sw0:K1,K2`.
    #[arg(long, value_parser = FormulaSpec::from_str)]
    pub formula: Option<FormulaSpec>,
}

#[derive(Debug, Subcommand)]
pub enum ContinuumCmd {
    /// `p_pi` for every permutation.
    Pdist {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mc: bool,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: u64,
    },
    /// The density `g_pi` as a polynomial.
    Gpoly {
        #[arg(long)]
        pi: String,
    },
    /// Two-point correlation table.
    Corr {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        mc: bool,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: u64,
    },
    /// `p_{w0}` exactly and by its closed form.
    Pw0 {
        #[arg(long)]
        n: usize,
    },
    /// Harmonicity of `g_pi` per cyclic class.
    Harmonic {
        #[arg(long)]
        n: usize,
    },
    /// Named comparisons.
    Verify {
        #[arg(value_enum)]
        what: ContinuumCheck,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContinuumCheck {
    /// Exact correlations against the conjectured closed form.
    CorrConjecture,
}

#[derive(Debug, Subcommand)]
pub enum PolyCmd {
    /// `prod_{k<l} (q_l - q_k)`.
    Vandermonde {
        #[arg(long)]
        n: usize,
    },
    /// Apply a differential operator such as `1/2*d3*d4 - 1` to `g_pi`.
    Apply {
        #[arg(long)]
        op: String,
        #[arg(long)]
        pi: String,
    },
    /// Laplacian of `g_pi`.
    Laplacian {
        #[arg(long)]
        pi: String,
        /// Must equal the length of `pi` when given.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SsytRoute {
    Hook,
    Jt,
    Brute,
}

#[derive(Debug, Subcommand)]
pub enum TabCmd {
    /// Number of SSYT of a shape with entries at most `t`.
    SsytCount {
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        #[arg(long)]
        t: u64,
        #[arg(long, value_enum, default_value_t = SsytRoute::Hook)]
        route: SsytRoute,
    },
    /// MLQs whose bottom row starts `n (n-1) ... 2`. `--m` may omit the
    /// last part, which is then `N - sum`.
    Fw {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long = "N", alias = "sites")]
        sites: usize,
        /// Also count by enumerating MLQs.
        #[arg(long)]
        brute: bool,
    },
    /// Probability that the ring word starts with `x_n, ..., x_2`.
    Fpi {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<usize>,
        #[arg(long = "N", alias = "sites")]
        sites: usize,
    },
    /// Map an MLQ (rows 0-based, `;` separated) to its tableau.
    Ssyt {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long = "N", alias = "sites")]
        sites: usize,
        #[arg(long)]
        rows: String,
    },
    /// Gelfand–Tsetlin pattern count.
    Gt {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RsCmd {
    /// All linking patterns of `2n` points.
    Patterns {
        #[arg(long)]
        n: usize,
    },
    /// Apply `e_i` or `e_S` to a pattern such as `{1-4,2-3,5-6}`.
    Apply {
        #[arg(long)]
        pattern: String,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<usize>,
    },
    /// Exact stationary law of the `k`-chain.
    Stationary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check-id glob.
    #[arg(default_value = "*")]
    pub filter: String,
    /// Include long-running checks.
    #[arg(long)]
    pub slow: bool,
    /// List matching checks without running them.
    #[arg(long)]
    pub list: bool,
}

/// Accepts plain integers and scientific notation such as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        return Err(format!("{s:?} is not a whole nonnegative count"));
    }
    Ok(f as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e7"), Ok(10_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
    }

    #[test]
    fn formula_specs() {
        assert_eq!("w0".parse(), Ok(FormulaSpec::W0));
        assert_eq!("skw0:3".parse(), Ok(FormulaSpec::Skw0(3)));
        assert_eq!("sw0:3,1".parse(), Ok(FormulaSpec::Sw0(vec![3, 1])));
        assert!("sw1:2".parse::<FormulaSpec>().is_err());
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "ctasep",
            "continuum",
            "corr",
            "--n",
            "6",
            "--mc",
            "--samples",
            "1e7",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert!(matches!(
            cli.command,
            Command::Continuum(ContinuumCmd::Corr {
                n: 6,
                mc: true,
                samples: 10_000_000
            })
        ));
    }
}
