use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;

use nccech::scheme::Window;

/// Exact Cech cohomology, deformation and tilting computations for NC
/// schemes over finite meet-posets.
#[derive(Parser)]
#[command(name = "nccech", version)]
struct Cli {
    /// computation command (validate-scheme, ext, tower, tilt-check, ...)
    command: String,

    /// command arguments as `key=value` pairs, e.g. `F=T N=O(-2)`
    args: Vec<String>,

    /// workspace file
    #[arg(long)]
    input: PathBuf,

    /// weight window override, `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,

    /// word length cap override
    #[arg(long)]
    length_cap: Option<usize>,

    /// maximal cohomological degree override
    #[arg(long)]
    pmax: Option<usize>,

    /// also write the JSON report to this path
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let text = std::fs::read_to_string(&cli.input)
        .with_context(|| format!("reading {}", cli.input.display()))?;
    let mut ws = nccech::input::parse(&text)?;
    if let Some(spec) = &cli.window {
        let Some((lo, hi)) = spec.split_once(':') else {
            bail!("--window expects `lo:hi`");
        };
        let lo: i64 = lo.parse().context("bad window lower bound")?;
        let hi: i64 = hi.parse().context("bad window upper bound")?;
        ws.window = Window::new(lo, hi, ws.window.length_cap)?;
    }
    if let Some(cap) = cli.length_cap {
        ws.window.length_cap = cap;
    }
    if let Some(p) = cli.pmax {
        ws.pmax = p;
    }
    let mut args = Vec::new();
    for raw in &cli.args {
        let Some((k, v)) = raw.split_once('=') else {
            bail!("command argument `{raw}` is not of the form key=value");
        };
        args.push((k.to_string(), v.to_string()));
    }
    let report = nccech::cli::run(&ws, &cli.command, &args, &text)?;
    let out = report.to_string_pretty();
    print!("{out}");
    if let Some(path) = &cli.json {
        std::fs::write(path, &out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
