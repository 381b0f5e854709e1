use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use recomp::convert::{lz_to_slg, prune_slp, slg_to_slp};
use recomp::format::{read_factorization, read_grammar, write_factorization, write_grammar};
use recomp::grammar::Grammar;
use recomp::lz::{parse_bentley_mcilroy, parse_exact_lz77, LzFactorization, DEFAULT_BLOCK_SIZE};
use recomp::pipeline::{
    bench, gen_dataset, run_pipeline, verify, BenchConfig, PipelineConfig, Stage, TrackingAllocator, VerifyReport,
    SAMPLE_DNA,
};
use recomp::recompression::reference::recompress_naive;
use recomp::recompression::{recompress, Strategy, Telemetry};

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

#[derive(Parser)]
#[command(name = "recomp", version, about = "Grammar compression via LZ77-like parsing and recompression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RecompressArgs {
    /// Partition strategy: det, rand or mixed.
    #[arg(long, default_value = "mixed")]
    strategy: Strategy,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Per-phase telemetry as TSV.
    #[arg(long)]
    telemetry_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Duplicate a base sequence to a target size and mutate it.
    GenDataset {
        /// Base sequence; the bundled DNA sample if omitted.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        target_size: u64,
        #[arg(long, default_value_t = 0.0)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Bentley–McIlroy parse of a text into an LZPF file.
    ParseBm {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: usize,
    },
    /// Greedy LZ77 parse of a text into an LZPF file.
    ParseExact {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// LZPF factorization to SLGF grammar.
    LzToSlg {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Binarize an SLGF grammar.
    SlgToSlp {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Remove unreachable, unary and duplicate rules.
    Prune {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recompress an SLGF grammar into an RLSLP.
    Recompress {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: RecompressArgs,
    },
    /// Recompress a text by rewriting it explicitly, round by round.
    RecompressNaive {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: RecompressArgs,
    },
    /// Check that a grammar expands to a text.
    Verify { grammar: PathBuf, text: PathBuf },
    /// Run parse-bm → lz-to-slg → slg-to-slp → prune → recompress.
    Pipeline {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        block_size: usize,
        #[arg(long, default_value = "mixed")]
        strategy: Strategy,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Stop after this stage (parse-bm or lz-only, lz-to-slg, slg-to-slp, prune, recompress).
        #[arg(long, default_value = "recompress")]
        stop_after: Stage,
        #[arg(long)]
        stats_out: Option<PathBuf>,
        #[arg(long)]
        telemetry_out: Option<PathBuf>,
        /// Compare the expansion of the result with the input.
        #[arg(long)]
        verify: bool,
        /// Also write <output>.lzpf, .slg, .slp and .pruned.
        #[arg(long)]
        keep_intermediates: bool,
    },
    /// Pipeline over a grid of block sizes and strategies.
    Bench {
        /// Input texts; each is one dataset.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "50")]
        block_size: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "mixed")]
        strategy: Vec<Strategy>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Add string-level recompression rows.
        #[arg(long)]
        reference: bool,
        /// Table destination; stdout if omitted.
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    read_grammar(&mut r).with_context(|| format!("reading {}", path.display()))
}

fn save_grammar(g: &Grammar, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    write_grammar(g, &mut w)?;
    w.flush()?;
    Ok(())
}

fn load_factorization(path: &Path) -> Result<LzFactorization> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    read_factorization(&mut r).with_context(|| format!("reading {}", path.display()))
}

fn save_factorization(fz: &LzFactorization, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    write_factorization(fz, &mut w)?;
    w.flush()?;
    Ok(())
}

fn read_text(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if text.is_empty() {
        bail!("{} is empty", path.display());
    }
    Ok(text)
}

fn save_telemetry(t: &Telemetry, path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        let mut w = create(p)?;
        t.write_tsv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn summarize(stage: &str, g: &Grammar) {
    let s = g.grammar_size();
    eprintln!("{stage}: {} productions, size {}", s.productions, s.size);
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenDataset { base, target_size, mutation_rate, seed, output } => {
            let base = match base {
                Some(p) => read_text(&p).context("gen-dataset")?,
                None => SAMPLE_DNA.to_vec(),
            };
            let text = gen_dataset(&base, target_size, mutation_rate, seed).context("gen-dataset")?;
            fs::write(&output, text).with_context(|| format!("gen-dataset: writing {}", output.display()))?;
        }
        Command::ParseBm { input, output, block_size } => {
            if block_size < 2 {
                bail!("parse-bm: block size must be at least 2");
            }
            let text = read_text(&input).context("parse-bm")?;
            let fz = parse_bentley_mcilroy(&text, block_size);
            save_factorization(&fz, &output).context("parse-bm")?;
            eprintln!("parse-bm: {} phrases", fz.len());
        }
        Command::ParseExact { input, output } => {
            let text = read_text(&input).context("parse-exact")?;
            let fz = parse_exact_lz77(&text);
            save_factorization(&fz, &output).context("parse-exact")?;
            eprintln!("parse-exact: {} phrases", fz.len());
        }
        Command::LzToSlg { input, output } => {
            let fz = load_factorization(&input).context("lz-to-slg")?;
            let g = lz_to_slg(&fz).context("lz-to-slg")?;
            save_grammar(&g, &output).context("lz-to-slg")?;
            summarize("lz-to-slg", &g);
        }
        Command::SlgToSlp { input, output } => {
            let g = slg_to_slp(&load_grammar(&input).context("slg-to-slp")?);
            save_grammar(&g, &output).context("slg-to-slp")?;
            summarize("slg-to-slp", &g);
        }
        Command::Prune { input, output } => {
            let g = prune_slp(&load_grammar(&input).context("prune")?);
            save_grammar(&g, &output).context("prune")?;
            summarize("prune", &g);
        }
        Command::Recompress { input, output, opts } => {
            let g = load_grammar(&input).context("recompress")?;
            let r = recompress(&g, opts.strategy, opts.seed).context("recompress")?;
            save_grammar(&r.rlslp, &output).context("recompress")?;
            save_telemetry(&r.telemetry, opts.telemetry_out.as_deref()).context("recompress")?;
            summarize("recompress", &r.rlslp);
        }
        Command::RecompressNaive { input, output, opts } => {
            let text = read_text(&input).context("recompress-naive")?;
            let r = recompress_naive(&text, opts.strategy, opts.seed).context("recompress-naive")?;
            save_grammar(&r.rlslp, &output).context("recompress-naive")?;
            save_telemetry(&r.telemetry, opts.telemetry_out.as_deref()).context("recompress-naive")?;
            summarize("recompress-naive", &r.rlslp);
        }
        Command::Verify { grammar, text } => {
            return match verify(&grammar, &text)? {
                VerifyReport::Match { len } => {
                    println!("match: {len} bytes");
                    Ok(true)
                }
                VerifyReport::Mismatch { offset, expected, found } => {
                    println!("mismatch at offset {offset}: text has {expected:?}, grammar has {found:?}");
                    Ok(false)
                }
            };
        }
        Command::Pipeline {
            input,
            output,
            block_size,
            strategy,
            seed,
            stop_after,
            stats_out,
            telemetry_out,
            verify,
            keep_intermediates,
        } => {
            if !matches!(
                stop_after,
                Stage::ParseBm | Stage::LzToSlg | Stage::SlgToSlp | Stage::Prune | Stage::Recompress
            ) {
                bail!("pipeline: cannot stop after {stop_after}");
            }
            let cfg = PipelineConfig { block_size, strategy, seed, stop_after, verify, keep_intermediates };
            let run = run_pipeline(&input, &output, &cfg)?;
            match &stats_out {
                Some(p) => {
                    let mut w = create(p).context("pipeline")?;
                    run.report.write_tsv(&mut w)?;
                    w.flush()?;
                }
                None => run.report.write_tsv(&mut std::io::stdout().lock())?,
            }
            if let Some(t) = &run.telemetry {
                save_telemetry(t, telemetry_out.as_deref()).context("pipeline")?;
            }
        }
        Command::Bench { inputs, block_size, strategy, seed, reference, stats_out } => {
            if block_size.iter().any(|&b| b < 2) {
                bail!("bench: block sizes must be at least 2");
            }
            let mut datasets = Vec::new();
            for p in &inputs {
                let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into());
                datasets.push((name, read_text(p).context("bench")?));
            }
            let cfg = BenchConfig { block_sizes: block_size, strategies: strategy, seed, reference };
            let table = bench(&datasets, &cfg)?;
            match &stats_out {
                Some(p) => {
                    let mut w = create(p).context("bench")?;
                    table.write_tsv(&mut w)?;
                    w.flush()?;
                }
                None => table.write_tsv(&mut std::io::stdout().lock())?,
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
