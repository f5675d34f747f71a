use crate::config::{PipelineConfig, Settings};
use crate::error::CliError;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use undither_core::dither::{is_bilevel, DitherMethod};
use undither_core::pipeline::{
    format_sig9, metrics_csv, undither, MetricsRow, UnditherConfig, UnditherOutcome, CSV_HEADER,
};
use undither_core::raster::{histogram, read_pgm, to_gray, write_pgm};
use undither_core::stats::Direction;
use undither_core::GrayImage;

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const FILTERED_FILE: &str = "filtered.pgm";
pub const BEST_SNAPSHOT: &str = "snapshot_best.pgm";
pub const FINAL_SNAPSHOT: &str = "snapshot_final.pgm";

pub fn step_snapshot_name(step: usize) -> String {
    format!("snapshot_step_{step}.pgm")
}

pub fn load_image(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    read_pgm(&bytes).map_err(|source| CliError::Decode {
        path: path.to_path_buf(),
        source,
    })
}

fn save(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn save_image(path: &Path, img: &GrayImage) -> Result<(), CliError> {
    save(path, &write_pgm(img, true))
}

pub fn cmd_dither(input: &Path, method: DitherMethod, output: &Path) -> Result<(), CliError> {
    let img = load_image(input)?;
    save_image(output, &method.apply(&img))
}

/// Files written by [`cmd_undither`].
#[derive(Debug, Clone)]
pub struct UnditherReport {
    pub outcome: UnditherOutcome,
    pub written: Vec<PathBuf>,
}

pub fn cmd_undither(config: &PipelineConfig) -> Result<UnditherReport, CliError> {
    let input = load_image(&config.input)?;
    if !config.force && !is_bilevel(&input) {
        return Err(CliError::Usage(format!(
            "{} is not bilevel (values other than 0 and 255); pass --force to undither it anyway",
            config.input.display()
        )));
    }
    let reference = config.reference.as_deref().map(load_image).transpose()?;
    if let Some(r) = &reference {
        if r.dimensions() != input.dimensions() {
            return Err(CliError::Stats(
                undither_core::stats::StatsError::DimensionMismatch {
                    left: r.dimensions(),
                    right: input.dimensions(),
                },
            ));
        }
    }

    let pipeline = UnditherConfig {
        filter: config.filter,
        diffusion: config.diffusion,
        direction: config.direction,
        distance: config.distance,
        stride: config.stride,
        keep_steps: config.snapshot.fixed_step().into_iter().collect(),
    };
    let outcome = undither(&input, reference.as_ref(), &pipeline)?;

    fs::create_dir_all(&config.out_dir).map_err(|e| CliError::io(&config.out_dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<(), CliError> {
        let path = config.out_dir.join(name);
        save(&path, &bytes)?;
        written.push(path);
        Ok(())
    };

    emit(METRICS_FILE, metrics_csv(&outcome.rows).into_bytes())?;
    emit(SUMMARY_FILE, summary(config, &outcome).into_bytes())?;
    let filtered = to_gray(&outcome.filtered).expect("finite");
    emit(FILTERED_FILE, write_pgm(&filtered, true))?;
    if config.snapshot.wants_best() {
        if let Some(best) = &outcome.best {
            emit(BEST_SNAPSHOT, write_pgm(&best.image, true))?;
        }
    }
    if let Some(k) = config.snapshot.fixed_step() {
        let img = outcome
            .kept
            .iter()
            .find(|(s, _)| *s == k)
            .map(|(_, img)| img.clone())
            .expect("requested step is retained");
        emit(&step_snapshot_name(k), write_pgm(&img, true))?;
    }
    if config.snapshot.wants_final() {
        let last = to_gray(&outcome.final_image).expect("finite");
        emit(FINAL_SNAPSHOT, write_pgm(&last, true))?;
    }

    Ok(UnditherReport { outcome, written })
}

fn summary(config: &PipelineConfig, outcome: &UnditherOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input={}", config.input.display());
    match &config.reference {
        Some(r) => {
            let _ = writeln!(s, "reference={}", r.display());
        }
        None => s.push_str("reference=none\n"),
    }
    let d = &config.diffusion;
    let _ = writeln!(
        s,
        "window={}\npasses={}\np={}\nepsilon={}\ndt={}\niterations={}\ntheta={}\nd={}\nstride={}",
        config.filter.window(),
        config.filter.passes(),
        format_sig9(d.p()),
        format_sig9(d.epsilon()),
        format_sig9(d.dt()),
        d.iterations(),
        config.direction.degrees(),
        config.distance,
        config.stride,
    );
    match &outcome.best {
        Some(best) => {
            let psnr = outcome
                .step_rows()
                .find(|r| r.step == best.step as i64)
                .and_then(|r| r.fidelity)
                .map(|f| f.psnr)
                .unwrap_or(f64::NAN);
            let _ = writeln!(
                s,
                "best_mse_step={}\nbest_mse={}\nbest_psnr={}",
                best.step,
                format_sig9(best.mse),
                format_sig9(psnr)
            );
        }
        None => s.push_str("best_mse_step=none\n"),
    }
    if let Some(last) = outcome.rows.last() {
        let _ = writeln!(s, "final_step={}", last.step);
        let columns = CSV_HEADER.split(',').skip(1);
        let line = last.to_csv();
        for (name, value) in columns.zip(line.split(',').skip(1)) {
            let _ = writeln!(s, "final_{name}={value}");
        }
    }
    let _ = writeln!(
        s,
        "max_principle_violations={}\nmax_step_change={}",
        outcome.range_violations.len(),
        format_sig9(outcome.max_step_change)
    );
    s
}

pub fn cmd_metrics(
    image: &Path,
    other: Option<&Path>,
    direction: Direction,
    distance: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let a = load_image(image)?;
    let b = other.map(load_image).transpose()?;
    let row = MetricsRow::measure(0, &a, b.as_ref(), direction, distance)?;
    writeln!(out, "{CSV_HEADER}\n{}", row.to_csv()).map_err(CliError::Output)
}

pub fn cmd_histogram(input: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let hist = histogram(&load_image(input)?);
    let mut text = String::with_capacity(256 * 8);
    for (level, count) in hist.counts().iter().enumerate() {
        let _ = writeln!(text, "{level},{count}");
    }
    out.write_all(text.as_bytes()).map_err(CliError::Output)
}

pub fn cmd_profile(input: &Path, row: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let img = load_image(input)?;
    let line = img.row(row).ok_or_else(|| {
        CliError::Usage(format!(
            "row {row} is out of range for an image of height {}",
            img.height()
        ))
    })?;
    let mut text = String::new();
    for (col, v) in line.iter().enumerate() {
        let _ = writeln!(text, "{col},{v}");
    }
    out.write_all(text.as_bytes()).map_err(CliError::Output)
}

/// Dispatches a parsed command line, writing report text to `out`.
pub fn run(cli: crate::args::Cli, out: &mut dyn Write) -> Result<(), CliError> {
    use crate::args::Command;
    match cli.command {
        Command::Dither {
            input,
            output,
            method,
            order,
            config,
        } => {
            let flags = Settings {
                method,
                order,
                ..Default::default()
            };
            let file = config
                .as_deref()
                .map(Settings::load)
                .transpose()?
                .unwrap_or_default();
            let method = flags.over(file).dither_method()?;
            cmd_dither(&input, method, &output)
        }
        Command::Undither { input, flags } => {
            let file = flags
                .config
                .as_deref()
                .map(Settings::load)
                .transpose()?
                .unwrap_or_default();
            let config = flags.settings().over(file).resolve(input)?;
            let report = cmd_undither(&config)?;
            let best = match &report.outcome.best {
                Some(b) => format!("best MSE {} at step {}", format_sig9(b.mse), b.step),
                None => "no reference, MSE not tracked".to_string(),
            };
            writeln!(
                out,
                "undithered {} in {} steps; {best}; wrote {} files to {}",
                config.input.display(),
                config.diffusion.iterations(),
                report.written.len(),
                config.out_dir.display()
            )
            .map_err(CliError::Output)
        }
        Command::Metrics {
            image,
            other,
            theta,
            d,
        } => {
            let direction = Direction::from_degrees(theta.unwrap_or(0))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let distance = d.unwrap_or(1);
            if distance == 0 {
                return Err(CliError::Usage("--d must be at least 1".into()));
            }
            cmd_metrics(&image, other.as_deref(), direction, distance, out)
        }
        Command::Histogram { input } => cmd_histogram(&input, out),
        Command::Profile { input, row } => cmd_profile(&input, row, out),
    }
}
