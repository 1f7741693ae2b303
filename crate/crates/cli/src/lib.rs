//! Argument parsing and dispatch for the `hypercount` binary.

pub mod commands;
pub mod output;
pub mod parse;

use clap::{Args, Parser, Subcommand};

pub use output::{Format, VERSION};

#[derive(Parser, Debug)]
#[command(name = "hypercount", version, about = "Counting quadratic irrationals and form representations")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Worker threads for enumeration (output does not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fundamental solution of t^2 - D u^2 = 4.
    Pell(PellArgs),
    #[command(subcommand)]
    Form(FormCmd),
    #[command(subcommand)]
    Irr(IrrCmd),
    #[command(subcommand)]
    Count(CountCmd),
    /// Counts over a threshold ladder against the predicted constant.
    Asym(AsymArgs),
    /// Pushed-geodesic histogram on the modular surface.
    Equi(EquiArgs),
    #[command(subcommand)]
    Bianchi(BianchiCmd),
    #[command(subcommand)]
    Geom(GeomCmd),
}

#[derive(Args, Debug)]
pub struct PellArgs {
    #[arg(long = "D", allow_negative_numbers = true)]
    pub d: String,
    /// Also report the least power with p | u.
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct FormArg {
    /// Coefficients `a,b,c` of a X^2 + b XY + c Y^2.
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
}

#[derive(Subcommand, Debug)]
pub enum FormCmd {
    Classify(FormArg),
    Reduce(FormArg),
    Equivalent {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, allow_hyphen_values = true)]
        other: String,
    },
    /// The automorph attached to (t, u), by default the fundamental one.
    Automorph {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    Alpha(FormArg),
}

#[derive(Args, Debug, Clone)]
pub struct AlphaArg {
    /// `(P+sqrt(D))/Q`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
}

#[derive(Subcommand, Debug)]
pub enum IrrCmd {
    Cf(AlphaArg),
    H(AlphaArg),
    Reciprocal(AlphaArg),
    Canonical {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 1)]
        q: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EngineArg {
    Fast,
    Oracle,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Joint,
    Single,
}

#[derive(Subcommand, Debug)]
pub enum CountCmd {
    /// Orbits of proper representations with |Q(x, y)| <= s.
    Reps {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        s: String,
        /// `full`, `gamma:p` or `gamma0:p`.
        #[arg(long, default_value = "full")]
        group: String,
        #[arg(long, value_enum, default_value = "fast")]
        engine: EngineArg,
    },
    /// Quadratic irrationals with h <= s in a group orbit.
    Orbit {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "full")]
        group: String,
        #[arg(long, value_enum, default_value = "joint")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "fast")]
        engine: EngineArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AsymKind {
    Reps,
    Orbit,
}

#[derive(Args, Debug)]
pub struct AsymArgs {
    #[arg(long, value_enum)]
    pub kind: AsymKind,
    #[arg(long, allow_hyphen_values = true)]
    pub form: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, default_value = "full")]
    pub group: String,
    #[arg(long, value_enum, default_value = "joint")]
    pub mode: ModeArg,
    /// Comma-separated thresholds or `geometric:a:b:n`.
    #[arg(long = "s-list")]
    pub s_list: String,
}

#[derive(Args, Debug)]
pub struct EquiArgs {
    #[command(flatten)]
    pub form: FormArg,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value_t = 4.0)]
    pub ymax: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Push to one side of the geodesic only.
    #[arg(long)]
    pub one_sided: bool,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArg {
    /// -3, -4, -7, -8 or -11.
    #[arg(long = "D", allow_negative_numbers = true)]
    pub d: i64,
}

#[derive(Subcommand, Debug)]
pub enum BianchiCmd {
    Zeta {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 12)]
        digits: u32,
    },
    Volume(FieldArg),
    Fib {
        #[command(flatten)]
        field: FieldArg,
        /// Generator `a+b*w` of the ideal.
        #[arg(long, allow_hyphen_values = true)]
        ideal: String,
    },
    Count {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        ideal: String,
        /// A threshold, or a list as for `asym`.
        #[arg(long)]
        s: String,
        #[arg(long, value_enum, default_value = "joint")]
        mode: ModeArg,
        /// Also run the breadth-first oracle (unit ideal only).
        #[arg(long, value_enum, default_value = "fast")]
        engine: EngineArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GeomTheorem {
    Perpendiculars,
    FixedPointOrbit,
}

#[derive(Subcommand, Debug)]
pub enum GeomCmd {
    /// Volume of the t-neighborhood of a totally geodesic submanifold.
    Tube {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long = "vol-c")]
        vol_c: f64,
        #[arg(long)]
        t: f64,
    },
    /// Leading constant of a counting asymptotic from geometric data.
    Constant {
        #[arg(long, value_enum)]
        theorem: GeomTheorem,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long = "vol-c", default_value_t = 0.0)]
        vol_c: f64,
        #[arg(long = "vol-h")]
        vol_h: Option<f64>,
        #[arg(long = "vol-dh")]
        vol_dh: Option<f64>,
        #[arg(long = "vol-m")]
        vol_m: f64,
        #[arg(long, default_value_t = 0.0)]
        ell0: f64,
        #[arg(long = "a-inf", default_value_t = 0.0)]
        a_inf: f64,
        #[arg(long = "n-g0", default_value_t = 1)]
        n_g0: u32,
    },
}

/// Exit status, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let work = || commands::dispatch(&cli);
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(commands::Failure::Usage(e.to_string())),
        },
        None => work(),
    };
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(commands::Failure::Usage(msg)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(commands::Failure::Disagreement { stdout, msg }) => Outcome { code: 3, stdout, stderr: format!("error: {msg}\n") },
    }
}
