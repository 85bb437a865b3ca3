use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iquantum::{init_workers, run, Command, RunConfig};

#[derive(Parser)]
#[command(name = "iquantum", version, about = "Exact checks for quasi-split ıquantum groups and their Hall algebras")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Braid relations on every generator (`--diagram suite` runs the standard list).
    VerifyBraid,
    /// The ı-admissible sequence and restricted Weyl data.
    Iseq,
    /// q-root vectors, each round-tripped through the braid operators.
    RootVectors,
    /// PBW independence and spanning spot check.
    Pbw,
    /// Hall products over F_q and the class inventory.
    Hall,
    /// The Hall-algebra map against the symbolic layer.
    CrossCheck,
    /// Reflection functors and Hall identities of the reflected ıquiver.
    Reflect,
    /// Number of indecomposable modules.
    CountIndec,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// TOML file with RunConfig keys; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// What to print on standard output.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, global = true)]
    diagram: Option<String>,
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    orientation: Option<String>,
    #[arg(long, global = true)]
    symmetric_labels: bool,
    /// universal | distinguished | non-distinguished | parameter
    #[arg(long, global = true)]
    level: Option<String>,
    /// Parameter entries `label=value`, e.g. `1=-v^-4`.
    #[arg(long = "param", global = true)]
    params: Vec<String>,
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, global = true)]
    inv_cap: Option<usize>,
    /// Field size; repeat or comma-separate for several.
    #[arg(long = "q", global = true, value_delimiter = ',')]
    primes: Vec<u32>,
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[arg(long, global = true)]
    extended: bool,
    #[arg(long, global = true)]
    pair: Option<String>,
    #[arg(long, global = true)]
    ideal: bool,
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    box_exp: Option<i16>,
    #[arg(long, global = true)]
    span_len: Option<usize>,
    #[arg(long, global = true)]
    words: Option<usize>,
    #[arg(long, global = true)]
    word_len: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    product: Option<String>,
    #[arg(long, global = true)]
    untwisted: bool,
    #[arg(long, global = true)]
    inventory: Option<usize>,
    #[arg(long, global = true)]
    sink: Option<String>,
    #[arg(long, global = true)]
    expect: Option<usize>,
}

impl Common {
    fn into_config(self) -> Result<RunConfig, String> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_toml_file(p).map_err(|e| e.to_string())?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(diagram, tau, level, cap, inv_cap, max_dim, degree, box_exp, span_len, words, word_len, seed, inventory);
        if self.orientation.is_some() {
            c.orientation = self.orientation;
        }
        for (flag, field) in [(self.symmetric_labels, &mut c.symmetric_labels), (self.extended, &mut c.extended), (self.ideal, &mut c.ideal), (self.untwisted, &mut c.untwisted)] {
            *field |= flag;
        }
        for (src, dst) in [(self.pair, &mut c.pair), (self.product, &mut c.product), (self.sink, &mut c.sink)] {
            if src.is_some() {
                *dst = src;
            }
        }
        if self.expect.is_some() {
            c.expect = self.expect;
        }
        if !self.primes.is_empty() {
            c.primes = self.primes;
        }
        if !self.params.is_empty() {
            if c.level == "universal" {
                c.level = "parameter".into();
            }
            for p in self.params {
                let (k, v) = p.split_once('=').ok_or_else(|| format!("parameter '{}' is not label=value", p))?;
                c.params.insert(k.trim().into(), v.trim().into());
            }
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_workers();
    let cmd = match cli.command {
        Cmd::VerifyBraid => Command::VerifyBraid,
        Cmd::Iseq => Command::Iseq,
        Cmd::RootVectors => Command::RootVectors,
        Cmd::Pbw => Command::Pbw,
        Cmd::Hall => Command::Hall,
        Cmd::CrossCheck => Command::CrossCheck,
        Cmd::Reflect => Command::Reflect,
        Cmd::CountIndec => Command::CountIndec,
    };
    let format = cli.common.format;
    let report_path = cli.common.report.clone();
    let cfg = match cli.common.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": {"kind": "Config", "message": e}}));
            return ExitCode::from(2);
        }
    };
    let report = run(cmd, &cfg);
    let json = report.to_json();
    if let Some(p) = report_path {
        if let Err(e) = std::fs::write(&p, &json) {
            eprintln!("cannot write {}: {}", p.display(), e);
            return ExitCode::from(2);
        }
    }
    match format {
        Format::Text => print!("{}", report.summary()),
        Format::Json => println!("{}", json),
    }
    ExitCode::from(report.exit_code() as u8)
}
