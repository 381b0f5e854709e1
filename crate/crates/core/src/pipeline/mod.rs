//! End-to-end pipeline, statistics and benchmark grid.

mod dataset;
mod memory;
mod verify;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

pub use dataset::{gen_dataset, DatasetError, SAMPLE_DNA};
pub use memory::{
    current_heap_bytes, current_rss_bytes, heap_tracking_active, peak_rss_bytes, MemoryProbe, MemorySample,
    TrackingAllocator,
};
pub use verify::{verify_stream, VerifyError, VerifyReport};

use crate::convert::{lz_to_slg, prune_slp, slg_to_slp};
use crate::format::{read_grammar, write_factorization, write_grammar, FormatError};
use crate::grammar::Grammar;
use crate::lz::{parse_bentley_mcilroy, LzFactorization, DEFAULT_BLOCK_SIZE};
use crate::recompression::reference::recompress_naive;
use crate::recompression::{Recompressor, Strategy, Telemetry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Load,
    ParseBm,
    LzToSlg,
    SlgToSlp,
    Prune,
    Recompress,
    Verify,
    RecompressNaive,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Load,
        Stage::ParseBm,
        Stage::LzToSlg,
        Stage::SlgToSlp,
        Stage::Prune,
        Stage::Recompress,
        Stage::Verify,
        Stage::RecompressNaive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Load => "load",
            Stage::ParseBm => "parse-bm",
            Stage::LzToSlg => "lz-to-slg",
            Stage::SlgToSlp => "slg-to-slp",
            Stage::Prune => "prune",
            Stage::Recompress => "recompress",
            Stage::Verify => "verify",
            Stage::RecompressNaive => "recompress-naive",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "lz-only" {
            return Ok(Stage::ParseBm);
        }
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub block_size: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Last grammar stage to run (`ParseBm` stops after the parse).
    pub stop_after: Stage,
    pub verify: bool,
    /// Write every intermediate artifact next to the output.
    pub keep_intermediates: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            block_size: DEFAULT_BLOCK_SIZE,
            strategy: Strategy::Mixed,
            seed: 42,
            stop_after: Stage::Recompress,
            verify: false,
            keep_intermediates: false,
        }
    }
}

/// One executed stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRow {
    pub stage: Stage,
    pub seconds: f64,
    pub peak_heap_bytes: Option<u64>,
    pub peak_rss_bytes: Option<u64>,
    /// Bytes for `load`/`verify`, phrases for the parse, rules otherwise.
    pub count: u64,
    /// Grammar size `|G|` for grammar stages; equals `count` elsewhere.
    pub size: u64,
}

impl StageRow {
    pub fn peak_mem_bytes(&self) -> u64 {
        self.peak_heap_bytes.or(self.peak_rss_bytes).unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsReport {
    pub rows: Vec<StageRow>,
}

const REPORT_HEADER: &str = "stage\tseconds\tpeak_heap_bytes\tpeak_rss_bytes\tcount\tsize";

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

impl StatsReport {
    pub fn get(&self, stage: Stage) -> Option<&StageRow> {
        self.rows.iter().find(|r| r.stage == stage)
    }

    /// Seconds over all stages except `load` and `verify`.
    pub fn grammar_seconds(&self) -> f64 {
        self.rows.iter().filter(|r| !matches!(r.stage, Stage::Load | Stage::Verify)).map(|r| r.seconds).sum()
    }

    pub fn write_tsv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{REPORT_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{}\t{:.6}\t{}\t{}\t{}\t{}",
                r.stage,
                r.seconds,
                opt(r.peak_heap_bytes),
                opt(r.peak_rss_bytes),
                r.count,
                r.size
            )?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn parse_tsv(s: &str) -> Result<Self, String> {
        let mut lines = s.lines();
        if lines.next() != Some(REPORT_HEADER) {
            return Err("missing stats header".into());
        }
        let num = |f: &str| -> Result<Option<u64>, String> {
            if f == "NA" {
                Ok(None)
            } else {
                f.parse().map(Some).map_err(|e| format!("{f:?}: {e}"))
            }
        };
        let mut rows = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(format!("expected 6 fields in {line:?}"));
            }
            rows.push(StageRow {
                stage: f[0].parse()?,
                seconds: f[1].parse().map_err(|e| format!("{:?}: {e}", f[1]))?,
                peak_heap_bytes: num(f[2])?,
                peak_rss_bytes: num(f[3])?,
                count: num(f[4])?.ok_or("count is NA")?,
                size: num(f[5])?.ok_or("size is NA")?,
            });
        }
        Ok(StatsReport { rows })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{stage}: {error}")]
    Stage { stage: Stage, error: Box<dyn std::error::Error + Send + Sync> },
    #[error("verify: expansion differs from input: {0:?}")]
    VerifyFailed(VerifyReport),
    #[error("block size {0} is below 2")]
    BadBlockSize(usize),
    #[error("input is empty")]
    EmptyInput,
}

fn at<E: std::error::Error + Send + Sync + 'static>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, error: Box::new(e) }
}

/// Everything produced by one pipeline run.
#[derive(Debug)]
pub struct PipelineRun {
    pub factorization: Option<LzFactorization>,
    /// Output of the last grammar stage that ran.
    pub grammar: Option<Grammar>,
    pub telemetry: Option<Telemetry>,
    pub report: StatsReport,
}

fn timed<T>(stage: Stage, report: &mut StatsReport, f: impl FnOnce() -> (T, u64, u64)) -> T {
    let probe = MemoryProbe::start();
    let t0 = Instant::now();
    let (out, count, size) = f();
    let seconds = t0.elapsed().as_secs_f64();
    let mem = probe.finish();
    report.rows.push(StageRow {
        stage,
        seconds,
        peak_heap_bytes: mem.peak_heap,
        peak_rss_bytes: mem.peak_rss,
        count,
        size,
    });
    out
}

fn grammar_counts(g: &Grammar) -> (u64, u64) {
    let s = g.grammar_size();
    (s.productions, s.size)
}

/// Runs the grammar stages on an in-memory text. When `artifacts` is given,
/// intermediates are written to `<artifacts>.lzpf`, `<artifacts>.slg`,
/// `<artifacts>.slp` and `<artifacts>.pruned`.
pub fn run_pipeline_text(
    text: &[u8],
    cfg: &PipelineConfig,
    artifacts: Option<&Path>,
) -> Result<PipelineRun, PipelineError> {
    run_stages(text, cfg, artifacts, StatsReport::default())
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn save_grammar(g: &Grammar, path: &Path, stage: Stage) -> Result<(), PipelineError> {
    let mut w = BufWriter::new(File::create(path).map_err(at(stage))?);
    write_grammar(g, &mut w).and_then(|_| w.flush()).map_err(at(stage))
}

fn run_stages(
    text: &[u8],
    cfg: &PipelineConfig,
    artifacts: Option<&Path>,
    mut report: StatsReport,
) -> Result<PipelineRun, PipelineError> {
    if cfg.block_size < 2 {
        return Err(PipelineError::BadBlockSize(cfg.block_size));
    }
    if text.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let fz = timed(Stage::ParseBm, &mut report, || {
        let fz = parse_bentley_mcilroy(text, cfg.block_size);
        let f = fz.len() as u64;
        (fz, f, f)
    });
    if let Some(base) = artifacts {
        let path = with_ext(base, "lzpf");
        let mut w = BufWriter::new(File::create(&path).map_err(at(Stage::ParseBm))?);
        write_factorization(&fz, &mut w).and_then(|_| w.flush()).map_err(at(Stage::ParseBm))?;
    }
    if cfg.stop_after == Stage::ParseBm {
        return Ok(PipelineRun { factorization: Some(fz), grammar: None, telemetry: None, report });
    }

    let slg = timed(Stage::LzToSlg, &mut report, || {
        let g = lz_to_slg(&fz);
        let (c, s) = g.as_ref().map(grammar_counts).unwrap_or_default();
        (g, c, s)
    })
    .map_err(at(Stage::LzToSlg))?;
    drop(fz);
    if let Some(base) = artifacts {
        save_grammar(&slg, &with_ext(base, "slg"), Stage::LzToSlg)?;
    }
    if cfg.stop_after == Stage::LzToSlg {
        return Ok(PipelineRun { factorization: None, grammar: Some(slg), telemetry: None, report });
    }

    let slp = timed(Stage::SlgToSlp, &mut report, || {
        let g = slg_to_slp(&slg);
        let (c, s) = grammar_counts(&g);
        (g, c, s)
    });
    drop(slg);
    if let Some(base) = artifacts {
        save_grammar(&slp, &with_ext(base, "slp"), Stage::SlgToSlp)?;
    }
    if cfg.stop_after == Stage::SlgToSlp {
        return Ok(PipelineRun { factorization: None, grammar: Some(slp), telemetry: None, report });
    }

    let pruned = timed(Stage::Prune, &mut report, || {
        let g = prune_slp(&slp);
        let (c, s) = grammar_counts(&g);
        (g, c, s)
    });
    drop(slp);
    if let Some(base) = artifacts {
        save_grammar(&pruned, &with_ext(base, "pruned"), Stage::Prune)?;
    }
    if cfg.stop_after == Stage::Prune {
        return Ok(PipelineRun { factorization: None, grammar: Some(pruned), telemetry: None, report });
    }

    let rec = timed(Stage::Recompress, &mut report, || {
        let r = Recompressor::with_strategy(cfg.strategy, cfg.seed).run(&pruned);
        let (c, s) = r.as_ref().map(|r| grammar_counts(&r.rlslp)).unwrap_or_default();
        (r, c, s)
    })
    .map_err(at(Stage::Recompress))?;
    drop(pruned);

    if cfg.verify {
        let verdict = timed(Stage::Verify, &mut report, || {
            let v = verify_stream(&rec.rlslp, &mut &text[..]);
            (v, text.len() as u64, text.len() as u64)
        })
        .map_err(at(Stage::Verify))?;
        if !verdict.is_match() {
            return Err(PipelineError::VerifyFailed(verdict));
        }
    }
    Ok(PipelineRun { factorization: None, grammar: Some(rec.rlslp), telemetry: Some(rec.telemetry), report })
}

/// Runs the pipeline on a file and writes the last artifact to `output`:
/// an LZPF file when stopping after the parse, an SLGF file otherwise.
/// The report has a `load` row for reading the input.
pub fn run_pipeline(input: &Path, output: &Path, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    let mut report = StatsReport::default();
    let text = timed(Stage::Load, &mut report, || {
        let t = fs::read(input);
        let n = t.as_ref().map_or(0, |t| t.len() as u64);
        (t, n, n)
    })
    .map_err(at(Stage::Load))?;
    let artifacts = cfg.keep_intermediates.then_some(output);
    let run = run_stages(&text, cfg, artifacts, report)?;
    match (&run.grammar, &run.factorization) {
        (Some(g), _) => save_grammar(g, output, cfg.stop_after)?,
        (None, Some(fz)) => {
            let mut w = BufWriter::new(File::create(output).map_err(at(Stage::ParseBm))?);
            write_factorization(fz, &mut w).and_then(|_| w.flush()).map_err(at(Stage::ParseBm))?;
        }
        (None, None) => unreachable!("every pipeline run yields an artifact"),
    }
    Ok(run)
}

/// Compares the expansion of the grammar in `grammar_file` with `text_file`
/// without materializing either.
pub fn verify(grammar_file: &Path, text_file: &Path) -> Result<VerifyReport, PipelineError> {
    let mut r = BufReader::new(File::open(grammar_file).map_err(at(Stage::Verify))?);
    let g = read_grammar(&mut r).map_err(at::<FormatError>(Stage::Verify))?;
    let mut text = BufReader::new(File::open(text_file).map_err(at(Stage::Verify))?);
    verify_stream(&g, &mut text).map_err(at(Stage::Verify))
}

/// Grid of configurations for [`bench`].
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub block_sizes: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    /// Also run the string-level reference once per dataset.
    pub reference: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            block_sizes: vec![DEFAULT_BLOCK_SIZE],
            strategies: vec![Strategy::Mixed],
            seed: 42,
            reference: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub dataset: String,
    /// `compressed` or `reference`.
    pub algorithm: &'static str,
    pub block_size: Option<usize>,
    pub strategy: Strategy,
    pub input_bytes: u64,
    pub report: StatsReport,
}

impl BenchRow {
    fn count(&self, stage: Stage) -> Option<u64> {
        self.report.get(stage).map(|r| r.count)
    }

    pub fn phrases(&self) -> Option<u64> {
        self.count(Stage::ParseBm)
    }

    /// Productions of the final RLSLP.
    pub fn productions(&self) -> Option<u64> {
        self.count(Stage::Recompress).or(self.count(Stage::RecompressNaive))
    }

    pub fn rlslp_size(&self) -> Option<u64> {
        let stage = if self.algorithm == "reference" { Stage::RecompressNaive } else { Stage::Recompress };
        self.report.get(stage).map(|r| r.size)
    }

    pub fn total_seconds(&self) -> f64 {
        self.report.grammar_seconds()
    }

    /// Largest stage peak minus the input text buffer.
    pub fn peak_mem_excluding_text(&self) -> u64 {
        self.report
            .rows
            .iter()
            .filter(|r| !matches!(r.stage, Stage::Load | Stage::Verify))
            .map(|r| r.peak_mem_bytes())
            .max()
            .unwrap_or(0)
            .saturating_sub(self.input_bytes)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

const STAGE_COLUMNS: [Stage; 6] =
    [Stage::ParseBm, Stage::LzToSlg, Stage::SlgToSlp, Stage::Prune, Stage::Recompress, Stage::RecompressNaive];

impl BenchTable {
    /// One row per (dataset, algorithm, block size, strategy). Missing
    /// values are `NA`.
    pub fn write_tsv(&self, w: &mut impl Write) -> io::Result<()> {
        write!(
            w,
            "dataset\talgorithm\tblock_size\tstrategy\tinput_bytes\tphrases\tslg_rules\tslp_rules\tpruned_rules\t\
             rlslp_productions\trlslp_size\ttotal_seconds\tpeak_mem_bytes"
        )?;
        for s in STAGE_COLUMNS {
            let col = s.name().replace('-', "_");
            write!(w, "\t{col}_seconds\t{col}_peak_mem_bytes")?;
        }
        writeln!(w)?;
        for r in &self.rows {
            write!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
                r.dataset,
                r.algorithm,
                r.block_size.map_or_else(|| "NA".into(), |b| b.to_string()),
                r.strategy,
                r.input_bytes,
                opt(r.phrases()),
                opt(r.count(Stage::LzToSlg)),
                opt(r.count(Stage::SlgToSlp)),
                opt(r.count(Stage::Prune)),
                opt(r.productions()),
                opt(r.rlslp_size()),
                r.total_seconds(),
                r.peak_mem_excluding_text() + r.input_bytes,
            )?;
            for s in STAGE_COLUMNS {
                match r.report.get(s) {
                    Some(row) => write!(w, "\t{:.6}\t{}", row.seconds, row.peak_mem_bytes())?,
                    None => write!(w, "\tNA\tNA")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii")
    }
}

/// String-level baseline over a whole text, reported as one stage.
pub fn run_reference(text: &[u8], strategy: Strategy, seed: u64) -> Result<(Grammar, StatsReport), PipelineError> {
    let mut report = StatsReport::default();
    let run = timed(Stage::RecompressNaive, &mut report, || {
        let r = recompress_naive(text, strategy, seed);
        let (c, s) = r.as_ref().map(|r| grammar_counts(&r.rlslp)).unwrap_or_default();
        (r, c, s)
    })
    .map_err(at(Stage::RecompressNaive))?;
    Ok((run.rlslp, report))
}

/// Runs the compressed pipeline for every block size × strategy on every
/// dataset, plus the reference once per dataset and strategy if requested.
/// Cells run one after another so per-stage memory peaks do not mix.
pub fn bench(datasets: &[(String, Vec<u8>)], cfg: &BenchConfig) -> Result<BenchTable, PipelineError> {
    let mut table = BenchTable::default();
    for (name, text) in datasets {
        for &strategy in &cfg.strategies {
            for &b in &cfg.block_sizes {
                let pc = PipelineConfig { block_size: b, strategy, seed: cfg.seed, ..PipelineConfig::default() };
                let run = run_pipeline_text(text, &pc, None)?;
                table.rows.push(BenchRow {
                    dataset: name.clone(),
                    algorithm: "compressed",
                    block_size: Some(b),
                    strategy,
                    input_bytes: text.len() as u64,
                    report: run.report,
                });
            }
            if cfg.reference {
                let (_, report) = run_reference(text, strategy, cfg.seed)?;
                table.rows.push(BenchRow {
                    dataset: name.clone(),
                    algorithm: "reference",
                    block_size: None,
                    strategy,
                    input_bytes: text.len() as u64,
                    report,
                });
            }
        }
    }
    Ok(table)
}
