use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use drcss::ambiguity::{af_surface, metrics};
use drcss::constructions::{construct, Construction, SequenceSet};
use drcss::finite_field::{make_field, prime_power, ExtensionTower, PhiMap};
use drcss::orthomatrix::{character_matrix, dft_matrix, example_matrix_q5, OrthoMatrix};
use drcss::toolkit::{
    example_construction, expected_example, heatmap_pgm, set_papr, table, table_csv,
    verify_example_against, HeatmapScale, TABLE_PRIMES,
};

#[derive(Parser)]
#[command(
    name = "drcss",
    version,
    about = "Doppler-resilient complementary sequence set toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sequence set and write it as JSON or CSV.
    Generate(GenerateArgs),
    /// Measure ambiguity metrics of a set file, optionally exporting surfaces.
    Metrics(MetricsArgs),
    /// Parameter table (q, K, M, N, theta_max, theta_opt, rho) for one construction.
    Tables(TablesArgs),
    /// Regenerate a worked example and diff it against its printed matrices.
    VerifyExample(VerifyArgs),
    /// Column PAPR of every matrix in a set file.
    Papr(PaprArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pgm,
}

#[derive(Args)]
struct GenerateArgs {
    /// T1..T5 (or 1..5).
    #[arg(long)]
    construction: Construction,
    /// Field size q = p^n.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Base field modulus, ascending coefficients, e.g. `2,1,1`.
    #[arg(long)]
    modulus: Option<String>,
    /// Modulus of F_{q^2} over F_p, ascending coefficients.
    #[arg(long)]
    ext_modulus: Option<String>,
    /// `default` or a JSON file holding a permutation of 0..q.
    #[arg(long, default_value = "default")]
    phi: String,
    /// `character`, `dft`, `example_q5`, or an orthogonal-matrix JSON file.
    #[arg(long, default_value = "character")]
    psi: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    /// Sequence set JSON written by `generate`.
    set: PathBuf,
    /// Delay extent of the zone; defaults to N.
    #[arg(long)]
    zx: Option<usize>,
    /// Doppler extent of the zone; defaults to N.
    #[arg(long)]
    zy: Option<usize>,
    /// Pair `k1:k2` whose surface is exported; repeatable.
    #[arg(long = "pair", value_parser = parse_pair)]
    pairs: Vec<(usize, usize)>,
    /// Surface export formats for the requested pairs; repeatable.
    #[arg(long, value_enum)]
    format: Vec<Format>,
    /// Log-scale heatmaps instead of linear.
    #[arg(long)]
    log_scale: bool,
    /// Output directory; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    construction: Construction,
    /// Comma-separated q values; defaults to the primes 5..=43.
    #[arg(long, value_delimiter = ',')]
    q: Vec<u32>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Example number 1..=5; all five when omitted.
    id: Option<u8>,
    /// Compare against this `[k][m][t]` exponent JSON instead of the built-in table.
    #[arg(long)]
    expected: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PaprArgs {
    set: PathBuf,
    #[arg(long, default_value_t = 64)]
    oversample: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected k1:k2, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_coeffs(s: &str) -> anyhow::Result<Vec<u32>> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .with_context(|| format!("bad coefficient {c:?}"))
        })
        .collect()
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn read_set(path: &Path) -> anyhow::Result<SequenceSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SequenceSet::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Outcome of a subcommand that ran to completion.
enum Verdict {
    Pass,
    Mismatch,
}

fn generate(args: GenerateArgs) -> anyhow::Result<Verdict> {
    let (p, n) = match (args.q, args.p, args.n) {
        (Some(q), None, None) => prime_power(q as u64)?,
        (q, Some(p), n) => {
            let n = n.unwrap_or(1);
            if let Some(q) = q {
                if (p as u64).checked_pow(n as u32) != Some(q as u64) {
                    bail!("q = {q} is not p^n = {p}^{n}");
                }
            }
            (p, n)
        }
        (Some(_), None, Some(_)) | (None, None, Some(_)) => bail!("--n requires --p"),
        (None, None, None) => bail!("give --q or --p/--n"),
    };
    let q = (p as u64).pow(n as u32);
    let q = u32::try_from(q).context("q too large")?;
    args.construction.check_q(q)?;

    let modulus = args.modulus.as_deref().map(parse_coeffs).transpose()?;
    let ext_modulus = args.ext_modulus.as_deref().map(parse_coeffs).transpose()?;
    let base = make_field(p, n, modulus.as_deref())?;
    let tower = ExtensionTower::quadratic(base, ext_modulus.as_deref())?;

    let phi = match args.phi.as_str() {
        "default" | "identity" => PhiMap::identity(tower.base()),
        file => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
            let table: Vec<u32> = serde_json::from_str(&text).context("phi file")?;
            PhiMap::from_permutation(table)?
        }
    };
    let psi = if args.construction.uses_psi() {
        Some(match args.psi.as_str() {
            "character" => character_matrix(tower.base()),
            "dft" => {
                if n != 1 {
                    bail!("--psi dft needs a prime field");
                }
                dft_matrix(p)
            }
            "example_q5" => example_matrix_q5(),
            file => {
                let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
                let (m, reduced) = OrthoMatrix::from_json(&text)?;
                if reduced > 0 {
                    eprintln!("note: {reduced} psi exponents reduced mod {}", m.p());
                }
                m
            }
        })
    } else {
        None
    };

    let set = construct(args.construction, &tower, &phi, psi.as_ref())?;
    let body = match args.format {
        Format::Json => set.to_json() + "\n",
        Format::Csv => set.to_csv(),
        Format::Pgm => bail!("generate writes json or csv"),
    };
    emit(args.out.as_deref(), body.as_bytes())?;
    Ok(Verdict::Pass)
}

fn run_metrics(args: MetricsArgs) -> anyhow::Result<Verdict> {
    let set = read_set(&args.set)?;
    let (k, m, n) = set.shape();
    let region = (args.zx.unwrap_or(n), args.zy.unwrap_or(n));
    let report = metrics(&set, region)?;
    let json = report.to_json() + "\n";

    let exports: Vec<Format> = args
        .format
        .iter()
        .copied()
        .filter(|f| *f != Format::Json)
        .collect();
    if !args.pairs.is_empty() && !exports.is_empty() && args.out.is_none() {
        bail!("surface export needs --out DIR");
    }
    if let Some(&(a, b)) = args.pairs.iter().find(|&&(a, b)| a >= k || b >= k) {
        bail!("pair {a}:{b} out of range for K = {k}");
    }
    let Some(dir) = args.out.as_deref() else {
        emit(None, json.as_bytes())?;
        return Ok(Verdict::Pass);
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    emit(Some(&dir.join("metrics.json")), json.as_bytes())?;
    let scale = if args.log_scale {
        HeatmapScale::Log
    } else {
        HeatmapScale::Linear
    };
    for &(a, b) in &args.pairs {
        let surface = af_surface(&set.matrices[a], &set.matrices[b])?;
        for f in &exports {
            let name = format!("af_{a}_{b}");
            match f {
                Format::Csv => emit(Some(&dir.join(name + ".csv")), surface.to_csv().as_bytes())?,
                Format::Pgm => emit(
                    Some(&dir.join(name + ".pgm")),
                    &heatmap_pgm(&surface, (m * n) as f64, scale),
                )?,
                Format::Json => {}
            }
        }
    }
    Ok(Verdict::Pass)
}

fn run_tables(args: TablesArgs) -> anyhow::Result<Verdict> {
    let qs = if args.q.is_empty() {
        TABLE_PRIMES.to_vec()
    } else {
        args.q
    };
    let rows = table(args.construction, &qs)?;
    let body = match args.format {
        Format::Csv => table_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Pgm => bail!("tables writes csv or json"),
    };
    emit(args.out.as_deref(), body.as_bytes())?;
    Ok(Verdict::Pass)
}

fn verify(args: VerifyArgs) -> anyhow::Result<Verdict> {
    let ids: Vec<u8> = match args.id {
        Some(id) if example_construction(id).is_some() => vec![id],
        Some(id) => bail!("no worked example {id}; choose 1..=5"),
        None if args.expected.is_some() => bail!("--expected needs an example id"),
        None => (1..=5).collect(),
    };
    let mut reports = Vec::new();
    for id in ids {
        let expected = match &args.expected {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).context("expected table")?
            }
            None => expected_example(id).expect("id checked above"),
        };
        let r = verify_example_against(id, &expected)?;
        eprintln!(
            "example {id} ({}): {} ({} of {} matrices matched, {} diffs, theta_max {:.4} vs {})",
            r.construction,
            if r.pass { "PASS" } else { "FAIL" },
            r.matrices_matched,
            r.expected_shape.0,
            r.diffs.len(),
            r.theta_max,
            r.theta_claim
        );
        for d in &r.diffs {
            eprintln!(
                "  C^{} row {} col {}: expected {:?}, got {:?}",
                d.k, d.m, d.t, d.expected, d.actual
            );
        }
        reports.push(r);
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let body = serde_json::to_string_pretty(&reports)? + "\n";
    emit(args.out.as_deref(), body.as_bytes())?;
    Ok(if all_pass {
        Verdict::Pass
    } else {
        Verdict::Mismatch
    })
}

fn run_papr(args: PaprArgs) -> anyhow::Result<Verdict> {
    let set = read_set(&args.set)?;
    let report = set_papr(&set, args.oversample)?;
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => report.to_csv(),
        Format::Pgm => bail!("papr writes json or csv"),
    };
    emit(args.out.as_deref(), body.as_bytes())?;
    Ok(Verdict::Pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Metrics(a) => run_metrics(a),
        Command::Tables(a) => run_tables(a),
        Command::VerifyExample(a) => verify(a),
        Command::Papr(a) => run_papr(a),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
