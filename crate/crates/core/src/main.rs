use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use product_gft::dataset::{
    load_dataset, save_dataset, save_readings, synthetic_dataset, Dataset, FixtureSpec,
};
use product_gft::error::{Error, Result};
use product_gft::experiments::{
    add_uniform_noise, denoise, isnr, snr, timing_compare, NoiseModel, TransformKind,
};
use product_gft::graph::DistanceMetric;
use product_gft::pipeline::{
    build_graphs, build_plans, export_frequencies, export_spectrum, run_with_plans, write_report,
    ExperimentConfig, TransformSelection,
};

#[derive(Parser)]
#[command(name = "pgft", version)]
#[command(
    about = "Graph Fourier transforms on products of directed graphs: spectra, bandlimiting and denoising sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic station dataset
    Fixture {
        /// Output directory (gets stations.csv and readings/)
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 24)]
        hours: usize,
        #[arg(long, default_value_t = 32)]
        stations: usize,
        #[arg(long, default_value_t = 1)]
        days: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build plans and print frequency summaries
    Plan {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Transform::Both)]
        transform: Transform,
        /// Write the frequency table (k, sigma, mu, mu - sigma) as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export transform coefficients of one day as CSV
    Spectrum {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Transform::Both)]
        transform: Transform,
        /// Day index in file name order
        #[arg(long, default_value_t = 0)]
        day: usize,
        /// Output CSV; with --transform both, `_square`/`_otimes` is appended to the stem
        #[arg(long)]
        out: PathBuf,
    },
    /// Add noise to one day and bandlimit it
    Denoise {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Transform::Both)]
        transform: Transform,
        #[arg(long, default_value_t = 0)]
        day: usize,
        /// Noise level: entries drawn uniform on [-c, c]
        #[arg(long)]
        c: f64,
        /// Bandwidth (number of frequencies kept)
        #[arg(long)]
        m: usize,
        /// Write the denoised readings as CSV (suffixed per transform with --transform both)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average ISNR/SNR over a grid of noise levels and bandwidths
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Transform::Both)]
        transform: Transform,
        /// Comma-separated noise levels
        #[arg(long, default_value = "1,2,4,8")]
        c: ListArg<f64>,
        /// Comma-separated bandwidths
        #[arg(long, default_value = "32")]
        m: ListArg<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Report path (JSON); a CSV copy is written with the .csv extension
        #[arg(long)]
        out: PathBuf,
    },
    /// Time plan construction for both transforms
    Bench {
        /// Use the graphs of this dataset instead of a synthetic one
        #[command(flatten)]
        data: OptionalDataArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// Hours of the synthetic dataset
        #[arg(long, default_value_t = 24)]
        n1: usize,
        /// Stations of the synthetic dataset
        #[arg(long, default_value_t = 32)]
        n2: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Stations CSV (id,x,y)
    #[arg(long)]
    stations: PathBuf,
    /// Readings CSV, or a directory with one CSV per day
    #[arg(long)]
    readings: PathBuf,
}

#[derive(Args)]
struct OptionalDataArgs {
    #[arg(long, requires = "readings")]
    stations: Option<PathBuf>,
    #[arg(long, requires = "stations")]
    readings: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    /// Neighbors per station
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Edge weight range lo:hi
    #[arg(long, default_value = "0.8:1.2")]
    weights: WeightRange,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    metric: Metric,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Square,
    Otimes,
    Both,
}

impl From<Transform> for TransformSelection {
    fn from(t: Transform) -> Self {
        match t {
            Transform::Square => TransformSelection::Square,
            Transform::Otimes => TransformSelection::Otimes,
            Transform::Both => TransformSelection::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Euclidean,
    Haversine,
}

#[derive(Clone, Copy)]
struct WeightRange(f64, f64);

impl FromStr for WeightRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
        let lo = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad lower weight {lo:?}"))?;
        let hi = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad upper weight {hi:?}"))?;
        Ok(WeightRange(lo, hi))
    }
}

#[derive(Clone)]
struct ListArg<T>(Vec<T>);

impl<T: FromStr> FromStr for ListArg<T> {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| format!("bad list entry {p:?}"))
            })
            .collect::<std::result::Result<_, _>>()
            .map(ListArg)
    }
}

impl GraphArgs {
    fn config(&self, transform: Transform) -> ExperimentConfig {
        ExperimentConfig {
            k: self.k,
            weight_lo: self.weights.0,
            weight_hi: self.weights.1,
            seed: self.seed,
            transform: transform.into(),
            metric: match self.metric {
                Metric::Euclidean => DistanceMetric::Euclidean,
                Metric::Haversine => DistanceMetric::Haversine,
            },
            ..ExperimentConfig::default()
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fixture {
            out,
            hours,
            stations,
            days,
            seed,
        } => {
            let ds = synthetic_dataset(FixtureSpec {
                hours,
                stations,
                days,
                seed,
            })?;
            save_dataset(&out, &ds)?;
            println!(
                "wrote {} stations x {} hours x {} days to {}",
                stations,
                hours,
                days,
                out.display()
            );
            Ok(())
        }
        Command::Plan {
            data,
            graph,
            transform,
            out,
        } => {
            let ds = load(&data)?;
            let config = graph.config(transform);
            let plans = build_plans(&config, &ds)?;
            let mut square = None;
            let mut otimes = None;
            for plan in &plans {
                let f = plan.frequencies();
                println!(
                    "{}: N = {}, min = {}, median = {}, max = {}, zero = {}",
                    plan.kind().name(),
                    f.len(),
                    f[0],
                    f[f.len() / 2],
                    f[f.len() - 1],
                    f.iter().filter(|&&v| v == 0.0).count()
                );
                match plan.kind() {
                    TransformKind::Square => square = Some(f),
                    TransformKind::Otimes => otimes = Some(f),
                }
            }
            if let (Some(s), Some(m)) = (&square, &otimes) {
                let gaps: Vec<f64> = s.iter().zip(m).map(|(a, b)| b - a).collect();
                let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                println!("mu - sigma: min = {lo}, max = {hi}");
            }
            if let Some(out) = out {
                export_frequencies(square.as_deref(), otimes.as_deref(), &out)?;
                println!("wrote {}", out.display());
            }
            Ok(())
        }
        Command::Spectrum {
            data,
            graph,
            transform,
            day,
            out,
        } => {
            let ds = load(&data)?;
            let x = &day_of(&ds, day)?.signal;
            let plans = build_plans(&graph.config(transform), &ds)?;
            let many = plans.len() > 1;
            for plan in &plans {
                let path = output_path(&out, plan.kind(), many);
                export_spectrum(plan, x, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Denoise {
            data,
            graph,
            transform,
            day,
            c,
            m,
            out,
        } => {
            let ds = load(&data)?;
            let config = graph.config(transform);
            let plans = build_plans(&config, &ds)?;
            let x = &day_of(&ds, day)?.signal;
            let noisy = add_uniform_noise(x, NoiseModel::new(c, config.seed)?);
            println!("isnr_db = {}", isnr(x, &noisy)?);
            let many = plans.len() > 1;
            for plan in &plans {
                let estimate = denoise(plan.as_bandlimiter(), &noisy, m)?;
                println!("{}: snr_db = {}", plan.kind().name(), snr(x, &estimate)?);
                if let Some(out) = &out {
                    let path = output_path(out, plan.kind(), many);
                    save_readings(&path, &ds.stations, &estimate)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Sweep {
            data,
            graph,
            transform,
            c,
            m,
            trials,
            out,
        } => {
            let ds = load(&data)?;
            let config = ExperimentConfig {
                noise_levels: c.0,
                bandwidths: m.0,
                trials,
                ..graph.config(transform)
            };
            let plans = build_plans(&config, &ds)?;
            let report = run_with_plans(&config, &ds, &plans)?;
            write_report(&out, &report)?;
            for r in &report.rows {
                println!(
                    "c = {}, m = {}, {}: isnr_db = {}, snr_db = {}",
                    r.c,
                    r.m,
                    r.transform.name(),
                    r.isnr_db,
                    r.snr_db
                );
            }
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Bench {
            data,
            graph,
            n1,
            n2,
            reps,
        } => {
            let ds = match (&data.stations, &data.readings) {
                (Some(s), Some(r)) => load_dataset(s, r)?,
                _ => synthetic_dataset(FixtureSpec {
                    hours: n1,
                    stations: n2,
                    days: 1,
                    seed: graph.seed,
                })?,
            };
            let (temporal, spatial) = build_graphs(&graph.config(Transform::Both), &ds)?;
            let t = timing_compare(&temporal, &spatial, reps)?;
            println!(
                "N1 = {}, N2 = {}: square = {:.6} s, otimes = {:.6} s, ratio = {:.1}",
                ds.n1(),
                ds.n2(),
                t.square_seconds,
                t.otimes_seconds,
                t.ratio()
            );
            Ok(())
        }
    }
}

fn load(data: &DataArgs) -> Result<Dataset> {
    load_dataset(&data.stations, &data.readings)
}

fn day_of(ds: &Dataset, day: usize) -> Result<&product_gft::dataset::Day> {
    ds.days.get(day).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "day {day} out of range: dataset has {} days",
            ds.days.len()
        ))
    })
}

fn output_path(out: &Path, kind: TransformKind, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let ext = out
        .extension()
        .map_or_else(|| "csv".to_string(), |e| e.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_{}.{ext}", kind.name()))
}
