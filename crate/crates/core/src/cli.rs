//! `rtlnp` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::geometry::RtlnpParams;
use crate::imaging::load_grayscale;
use crate::metrics::{evaluate, EvalConfig, EvaluationRun, RecallDenominator};
use crate::parallel::with_workers;
use crate::retrieval::{build_index, DescriptorKind, GalleryIndex};
use crate::{Error, ErrorKind, Result};

#[derive(Debug, Parser)]
#[command(name = "rtlnp", version, about = "RTLNP/LBP texture descriptors and leave-one-out retrieval benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract histograms for a `root/<class>/<image>` dataset and write an index.
    Extract {
        dataset: PathBuf,
        #[command(flatten)]
        descriptor: DescriptorArgs,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the feature image of one image as PGM.
    FeatureImage {
        image: PathBuf,
        #[command(flatten)]
        descriptor: DescriptorArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the entries of an index against one image.
    Query {
        image: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Leave-one-out evaluation; writes report.json and report.csv (and index.json
    /// when built from a dataset) into `--out`.
    Benchmark {
        #[arg(long, conflicts_with = "index", required_unless_present = "index")]
        dataset: Option<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[command(flatten)]
        descriptor: DescriptorArgs,
        #[arg(long, default_value_t = 10)]
        lambda_max: usize,
        #[arg(long, default_value_t = 10)]
        cmc_max_rank: usize,
        #[arg(long, value_enum, default_value_t = RecallMode::Literal)]
        recall_denominator: RecallMode,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DescriptorChoice {
    Rtlnp,
    Lbp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecallMode {
    Literal,
    ExclQuery,
}

impl From<RecallMode> for RecallDenominator {
    fn from(m: RecallMode) -> Self {
        match m {
            RecallMode::Literal => RecallDenominator::Literal,
            RecallMode::ExclQuery => RecallDenominator::ExcludeQuery,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DescriptorArgs {
    #[arg(long, value_enum, default_value_t = DescriptorChoice::Rtlnp)]
    pub descriptor: DescriptorChoice,
    #[arg(long, default_value_t = 3)]
    pub rin: u32,
    #[arg(long, default_value_t = 6)]
    pub rout: u32,
    /// Sector width in whole degrees.
    #[arg(long, default_value_t = 36)]
    pub theta: u32,
}

impl DescriptorArgs {
    pub fn kind(&self) -> Result<DescriptorKind> {
        Ok(match self.descriptor {
            DescriptorChoice::Rtlnp => DescriptorKind::Rtlnp(RtlnpParams::new(self.rin, self.rout, self.theta)?),
            DescriptorChoice::Lbp => DescriptorKind::Lbp,
        })
    }
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::NotFound => 3,
            ErrorKind::Io => 4,
            ErrorKind::Format => 5,
            ErrorKind::Params => 6,
            ErrorKind::Bounds => 7,
            ErrorKind::Dataset => 8,
            ErrorKind::Index => 9,
            ErrorKind::Metric => 10,
        }
    }
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Runs one parsed command, writing human-readable progress to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let say = |out: &mut dyn Write, msg: String| {
        // progress output is best effort
        let _ = writeln!(out, "{msg}");
    };
    match cli.command {
        Command::Extract { dataset, descriptor, workers, out: dest } => {
            let kind = descriptor.kind()?;
            let t = Instant::now();
            let index = with_workers(workers, || build_index(&dataset, kind))?;
            index.save(&dest)?;
            say(out, format!("{} entries, {} in {:.3}s -> {}", index.len(), kind.name(), t.elapsed().as_secs_f64(), dest.display()));
        }
        Command::FeatureImage { image, descriptor, out: dest } => {
            let d = descriptor.kind()?.instantiate()?;
            let img = load_grayscale(&image)?;
            let f = d.feature_image(&img)?;
            f.to_visual().save_pgm(&dest)?;
            say(out, format!("{}x{} {} feature image -> {}", f.width(), f.height(), d.name(), dest.display()));
        }
        Command::Query { image, index, top } => {
            let index = GalleryIndex::load(&index)?;
            let d = index.kind().instantiate()?;
            let h = d.histogram(&load_grayscale(&image)?)?;
            let ranked = index.rank_feature(&h.normalized())?;
            say(out, "rank\tdistance\tclass\tpath".to_owned());
            for (rank, (id, dist)) in ranked.iter().take(top).enumerate() {
                let e = &index.entries()[*id];
                say(out, format!("{}\t{dist:.6}\t{}\t{}", rank + 1, e.class_label, e.path));
            }
        }
        Command::Benchmark {
            dataset,
            index,
            descriptor,
            lambda_max,
            cmc_max_rank,
            recall_denominator,
            workers,
            out: dest,
        } => {
            fs::create_dir_all(&dest).map_err(|e| Error::io(&dest, e))?;
            let t = Instant::now();
            let (index, report) = with_workers(workers, || -> Result<_> {
                let index = match (&dataset, &index) {
                    (Some(root), _) => {
                        let idx = build_index(root, descriptor.kind()?)?;
                        idx.save(dest.join("index.json"))?;
                        idx
                    }
                    (None, Some(path)) => GalleryIndex::load(path)?,
                    (None, None) => return Err(Error::Dataset("either --dataset or --index is required".into())),
                };
                let run = EvaluationRun::from_index(&index)?;
                let config = EvalConfig { lambda_max, cmc_max_rank, recall_denominator: recall_denominator.into() };
                let report = evaluate(&run, index.descriptor_name(), config)?;
                Ok((index, report))
            })?;
            write_file(&dest.join("report.json"), report.to_json())?;
            write_file(&dest.join("report.csv"), report.to_csv())?;

            for n in &report.notices {
                say(out, format!("notice: {n}"));
            }
            say(out, format!("descriptor        {}", index.descriptor_name()));
            say(out, format!("images / classes  {} / {}", report.dataset_size, report.class_count));
            say(out, format!("ARP / ARR         {:.4} / {:.4}", report.arp, report.arr));
            say(out, format!("F-score           {:.4}", report.f_score));
            match report.anmrr {
                Some(a) => say(out, format!("ANMRR             {a:.4}")),
                None => say(out, "ANMRR             skipped".to_owned()),
            }
            say(out, format!("recognition rate  {:.2}%", report.recognition_rate));
            say(out, format!("done in {:.3}s -> {}", t.elapsed().as_secs_f64(), dest.display()));
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
/// Failures print a single `error[<category>]: <message>` line on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.kind().as_str(), e.to_string().replace('\n', " "));
            e.kind().exit_code()
        }
    }
}
