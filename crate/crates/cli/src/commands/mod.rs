pub mod pdf;
pub mod quantum;
pub mod solve;
pub mod sweep;
pub mod walk;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{archive, check_keys, merge, read_config_file, resolve_globals, Cli, Command, Globals};
use crate::error::Result;
use crate::output::Output;

/// One subcommand: its settings, their defaults and checks, and the run.
pub trait Experiment: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;

    /// Fills in defaults and checks preconditions before any computation.
    fn resolve(self) -> Result<Self>;

    fn run(&self, globals: &Globals, out: &Output) -> Result<()>;
}

pub fn run(cli: Cli) -> Result<()> {
    let file = read_config_file(cli.global.config.as_ref())?;
    let globals = resolve_globals(&cli.global, &file)?;
    match &cli.command {
        Command::Pdf(a) => execute(a, &file, &globals),
        Command::Solve(a) => execute(a, &file, &globals),
        Command::Walk(a) => execute(a, &file, &globals),
        Command::Quantum(a) => execute(a, &file, &globals),
        Command::Sweep(a) => execute(a, &file, &globals),
    }
}

fn execute<E: Experiment>(flags: &E, file: &Map<String, Value>, globals: &Globals) -> Result<()> {
    check_keys::<E>(file, E::NAME)?;
    let args = merge(flags, file)?.resolve()?;
    let out = Output::create(&globals.out, globals.format, globals.svg)?;
    out.archive(&archive(E::NAME, globals, &args)?)?;
    args.run(globals, &out)
}

/// `n` evenly spaced values from `a` to `b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Trapezoid rule over tabulated points.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
