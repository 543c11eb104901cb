//! Command-line front end.
//!
//! Exit statuses: 0 success, 2 usage error, 3 I/O error, 4 validation error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::attacks::{
    apply_attack, default_suite, validate_suite, Attack, AttackKind, DEFAULT_SEED,
};
use crate::bitplane::{embed, extract_plane, PlaneIndex};
use crate::corpus;
use crate::error::Error;
use crate::metrics::{psnr, WeightProfile};
use crate::optimizer::{evaluate_combination, sweep, PlaneCombination, SweepPlan};
use crate::raster::{load_pgm, save_pgm, GrayImage};
use crate::report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "planemark",
    version,
    about = "Bit-plane image watermarking toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a watermark bit plane into a cover image bit plane.
    Embed(EmbedArgs),
    /// Read one bit plane out of an image, written as a 0/255 PGM.
    Extract(ExtractArgs),
    /// Apply a single attack to an image.
    Attack(AttackArgs),
    /// Score one plane combination against the attack suite (JSON record).
    Evaluate(EvaluateArgs),
    /// Sweep plane combinations and select the best one per weight profile.
    Optimize(OptimizeArgs),
}

#[derive(Args, Debug)]
struct ConfigArg {
    /// JSON config file; command-line flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long, value_name = "PGM")]
    cover: Option<PathBuf>,
    #[arg(long, value_name = "PGM")]
    watermark: Option<PathBuf>,
    /// Image plane receiving the watermark (1 = MSB, 8 = LSB).
    #[arg(long, allow_negative_numbers = true)]
    image_plane: Option<i64>,
    /// Watermark plane to embed (1 = MSB, 8 = LSB).
    #[arg(long, allow_negative_numbers = true)]
    wm_plane: Option<i64>,
    #[arg(long, value_name = "PGM")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long = "in", value_name = "PGM")]
    input: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    plane: Option<i64>,
    /// Output PGM; standard output when omitted.
    #[arg(long, value_name = "PGM")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[arg(long = "in", value_name = "PGM")]
    input: Option<PathBuf>,
    /// One of: angle-rotation, rotate-transform, crop, low-pass-filter,
    /// quantization, translation, contrast-stretch, salt-pepper, compression, shrink.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    degrees: Option<f64>,
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    size: Option<u32>,
    #[arg(long)]
    step: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    dx: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    dy: Option<i64>,
    #[arg(long)]
    density: Option<f64>,
    /// Noise seed (default 42).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quality: Option<u8>,
    #[arg(long)]
    factor: Option<u32>,
    #[arg(long, value_name = "PGM")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Cover image; the bundled 256×256 cover when omitted.
    #[arg(long, value_name = "PGM")]
    cover: Option<PathBuf>,
    /// Watermark image; the bundled signature when omitted.
    #[arg(long, value_name = "PGM")]
    watermark: Option<PathBuf>,
    /// Weight profile: a preset name (table1-p1 … table1-p4). Repeatable.
    #[arg(long = "profile", value_name = "NAME")]
    profiles: Vec<String>,
    /// Seed for salt-and-pepper noise and the pseudorandom baseline (default 42).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    suite: SuiteArgs,
    #[arg(long, allow_negative_numbers = true)]
    image_plane: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    wm_plane: Option<i64>,
    /// JSON record path; standard output when omitted.
    #[arg(long, value_name = "JSON")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Summary,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    suite: SuiteArgs,
    /// Image planes to try (default 7,8).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    image_planes: Option<Vec<i64>>,
    /// Watermark planes to try (default 1..8).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    wm_planes: Option<Vec<i64>>,
    /// Sweep all 64 combinations.
    #[arg(long, conflicts_with = "image_planes")]
    all_planes: bool,
    /// Skip the pseudorandom baseline.
    #[arg(long)]
    no_baseline: bool,
    /// JSON report path.
    #[arg(long, value_name = "JSON")]
    out: Option<PathBuf>,
    /// CSV matrix path.
    #[arg(long, value_name = "CSV")]
    csv: Option<PathBuf>,
    /// What to print on standard output.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Options that can be given in the JSON config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    subcommand: Option<String>,
    cover: Option<PathBuf>,
    watermark: Option<PathBuf>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    image_plane: Option<i64>,
    wm_plane: Option<i64>,
    plane: Option<i64>,
    image_planes: Option<Vec<i64>>,
    wm_planes: Option<Vec<i64>>,
    attack: Option<Attack>,
    attacks: Option<Vec<Attack>>,
    profiles: Option<Vec<ProfileSpec>>,
    seed: Option<u64>,
    format: Option<Format>,
    baseline: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ProfileSpec {
    Preset(String),
    Inline { name: String, weights: Vec<f64> },
}

impl ProfileSpec {
    fn resolve(&self) -> CliResult<WeightProfile> {
        Ok(match self {
            ProfileSpec::Preset(name) => WeightProfile::preset(name)?,
            ProfileSpec::Inline { name, weights } => WeightProfile::new(name.clone(), weights)?,
        })
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Embed(args) => cmd_embed(args, stdout),
        Command::Extract(args) => cmd_extract(args, stdout),
        Command::Attack(args) => cmd_attack(args),
        Command::Evaluate(args) => cmd_evaluate(args, stdout),
        Command::Optimize(args) => cmd_optimize(args, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn load_config(arg: &ConfigArg, subcommand: &str) -> CliResult<RunConfig> {
    let Some(path) = &arg.config else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))?;
    if let Some(name) = &config.subcommand {
        if name != subcommand {
            return Err(CliError::Usage(format!(
                "config is for subcommand {name:?}, not {subcommand:?}"
            )));
        }
    }
    Ok(config)
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}

fn read_image(path: &Path) -> CliResult<GrayImage> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    load_pgm(&bytes).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn say(stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
}

fn cmd_embed(args: EmbedArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config, "embed")?;
    let cover_path = required(args.cover.or(cfg.cover), "cover")?;
    let wm_path = required(args.watermark.or(cfg.watermark), "watermark")?;
    let l = required(args.image_plane.or(cfg.image_plane), "image-plane")?;
    let k = required(args.wm_plane.or(cfg.wm_plane), "wm-plane")?;
    let out = required(args.out.or(cfg.out), "out")?;
    let (l, k) = (PlaneIndex::new(l)?, PlaneIndex::new(k)?);

    let cover = read_image(&cover_path)?;
    let watermark = read_image(&wm_path)?;
    let marked = embed(&cover, &watermark, l, k)?;
    write_file(&out, &save_pgm(&marked))?;
    let fidelity = psnr(&cover, &marked)?;
    say(
        stdout,
        &format!("fidelity PSNR: {} dB\n", report::psnr_text(fidelity)),
    )
}

fn cmd_extract(args: ExtractArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config, "extract")?;
    let input = required(args.input.or(cfg.input), "in")?;
    let plane = PlaneIndex::new(required(args.plane.or(cfg.plane), "plane")?)?;
    let img = read_image(&input)?;
    let bits = extract_plane(&img, plane);
    emit(
        args.out.or(cfg.out).as_deref(),
        &save_pgm(&bits.to_image()),
        stdout,
    )
}

fn build_attack(args: &AttackArgs, cfg: &RunConfig) -> CliResult<Attack> {
    let kind = match (&args.kind, &cfg.attack) {
        (Some(name), _) => name.parse::<AttackKind>()?,
        (None, Some(a)) => a.kind(),
        (None, None) => return Err(CliError::Usage("missing required option --kind".into())),
    };
    let base = match cfg.attack {
        Some(a) if a.kind() == kind => a,
        _ => kind
            .default_attack()
            .with_seed(cfg.seed.unwrap_or(DEFAULT_SEED)),
    };

    let mut unused = Vec::new();
    let mut check = |present: bool, name: &str, applies: bool| {
        if present && !applies {
            unused.push(format!("--{name}"));
        }
    };
    let rotation = matches!(
        kind,
        AttackKind::AngleRotation | AttackKind::RotateTransform
    );
    check(args.degrees.is_some(), "degrees", rotation);
    check(
        args.fraction.is_some(),
        "fraction",
        kind == AttackKind::Crop,
    );
    check(
        args.size.is_some(),
        "size",
        kind == AttackKind::LowPassFilter,
    );
    check(
        args.step.is_some(),
        "step",
        kind == AttackKind::Quantization,
    );
    check(args.dx.is_some(), "dx", kind == AttackKind::Translation);
    check(args.dy.is_some(), "dy", kind == AttackKind::Translation);
    check(
        args.density.is_some(),
        "density",
        kind == AttackKind::SaltPepper,
    );
    check(args.seed.is_some(), "seed", kind == AttackKind::SaltPepper);
    check(
        args.quality.is_some(),
        "quality",
        kind == AttackKind::Compression,
    );
    check(args.factor.is_some(), "factor", kind == AttackKind::Shrink);
    if !unused.is_empty() {
        return Err(CliError::Usage(format!(
            "{} not applicable to attack {kind}",
            unused.join(", ")
        )));
    }

    let attack = match base {
        Attack::AngleRotation { degrees } => Attack::AngleRotation {
            degrees: args.degrees.unwrap_or(degrees),
        },
        Attack::RotateTransform { degrees } => Attack::RotateTransform {
            degrees: args.degrees.unwrap_or(degrees),
        },
        Attack::Crop { fraction } => Attack::Crop {
            fraction: args.fraction.unwrap_or(fraction),
        },
        Attack::LowPassFilter { size } => Attack::LowPassFilter {
            size: args.size.unwrap_or(size),
        },
        Attack::Quantization { step } => Attack::Quantization {
            step: args.step.unwrap_or(step),
        },
        Attack::Translation { dx, dy } => Attack::Translation {
            dx: args.dx.unwrap_or(dx),
            dy: args.dy.unwrap_or(dy),
        },
        Attack::ContrastStretch => Attack::ContrastStretch,
        Attack::SaltPepper { density, seed } => Attack::SaltPepper {
            density: args.density.unwrap_or(density),
            seed: args.seed.unwrap_or(seed),
        },
        Attack::Compression { quality } => Attack::Compression {
            quality: args.quality.unwrap_or(quality),
        },
        Attack::Shrink { factor } => Attack::Shrink {
            factor: args.factor.unwrap_or(factor),
        },
    };
    attack.validate()?;
    Ok(attack)
}

fn cmd_attack(args: AttackArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, "attack")?;
    let attack = build_attack(&args, &cfg)?;
    let input = required(args.input.clone().or(cfg.input), "in")?;
    let out = required(args.out.clone().or(cfg.out), "out")?;
    let img = read_image(&input)?;
    let attacked = apply_attack(&img, &attack)?;
    write_file(&out, &save_pgm(&attacked))
}

struct Suite {
    cover: GrayImage,
    watermark: GrayImage,
    attacks: Vec<Attack>,
    profiles: Vec<WeightProfile>,
    seed: u64,
}

fn build_suite(args: &SuiteArgs, cfg: &RunConfig) -> CliResult<Suite> {
    let cover = match args.cover.as_ref().or(cfg.cover.as_ref()) {
        Some(p) => read_image(p)?,
        None => corpus::cover(),
    };
    let watermark = match args.watermark.as_ref().or(cfg.watermark.as_ref()) {
        Some(p) => read_image(p)?,
        None => corpus::signature(),
    };
    let explicit_seed = args.seed.or(cfg.seed);
    let seed = explicit_seed.unwrap_or(DEFAULT_SEED);
    let mut attacks = match &cfg.attacks {
        Some(list) => list.clone(),
        None => default_suite(seed).to_vec(),
    };
    if let Some(s) = explicit_seed {
        attacks = attacks.into_iter().map(|a| a.with_seed(s)).collect();
    }
    validate_suite(&attacks)?;

    let profiles = if !args.profiles.is_empty() {
        args.profiles
            .iter()
            .map(|n| WeightProfile::preset(n).map_err(CliError::from))
            .collect::<CliResult<Vec<_>>>()?
    } else if let Some(specs) = &cfg.profiles {
        specs
            .iter()
            .map(ProfileSpec::resolve)
            .collect::<CliResult<Vec<_>>>()?
    } else {
        WeightProfile::presets()
    };
    Ok(Suite {
        cover,
        watermark,
        attacks,
        profiles,
        seed,
    })
}

fn cmd_evaluate(args: EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config, "evaluate")?;
    let l = required(args.image_plane.or(cfg.image_plane), "image-plane")?;
    let k = required(args.wm_plane.or(cfg.wm_plane), "wm-plane")?;
    let combo = PlaneCombination::new(l, k)?;
    let suite = build_suite(&args.suite, &cfg)?;
    let record = evaluate_combination(
        &suite.cover,
        &suite.watermark,
        combo,
        &suite.attacks,
        &suite.profiles,
    )?;
    let json = report::record_json(&record, &suite.attacks, &suite.profiles);
    emit(args.out.or(cfg.out).as_deref(), json.as_bytes(), stdout)
}

fn planes(list: &[i64]) -> CliResult<Vec<PlaneIndex>> {
    list.iter()
        .map(|&p| PlaneIndex::new(p).map_err(CliError::from))
        .collect()
}

fn cmd_optimize(args: OptimizeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = load_config(&args.config, "optimize")?;
    let suite = build_suite(&args.suite, &cfg)?;
    let defaults = SweepPlan::default();
    let image_planes = if args.all_planes {
        PlaneIndex::all().collect()
    } else {
        match args.image_planes.as_ref().or(cfg.image_planes.as_ref()) {
            Some(list) => planes(list)?,
            None => defaults.image_planes,
        }
    };
    let watermark_planes = match args.wm_planes.as_ref().or(cfg.wm_planes.as_ref()) {
        Some(list) => planes(list)?,
        None => defaults.watermark_planes,
    };
    let baseline = !args.no_baseline && cfg.baseline.unwrap_or(true);
    let plan = SweepPlan {
        image_planes,
        watermark_planes,
        attacks: suite.attacks,
        profiles: suite.profiles,
        baseline_seed: baseline.then_some(suite.seed),
    };
    let report = sweep(&suite.cover, &suite.watermark, &plan)?;

    let json = report::report_json(&report);
    let csv = report::report_csv(&report);
    let out = args.out.or(cfg.out);
    let csv_path = args.csv.or(cfg.csv);
    if let Some(p) = &out {
        write_file(p, json.as_bytes())?;
    }
    if let Some(p) = &csv_path {
        write_file(p, csv.as_bytes())?;
    }
    match args.format.or(cfg.format).unwrap_or(Format::Summary) {
        Format::Summary => say(stdout, &report::selection_summary(&report)),
        Format::Json => say(stdout, &json),
        Format::Csv => say(stdout, &csv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("planemark").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8_lossy(&out).into_owned(),
            String::from_utf8_lossy(&err).into_owned(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = run_args(&["extract", "--plane", "7"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--in"));
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("optimize"));
    }

    #[test]
    fn missing_input_is_io_error() {
        let (code, _, err) = run_args(&["extract", "--in", "/nonexistent/x.pgm", "--plane", "7"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn bad_plane_is_validation_error() {
        let (code, _, _) = run_args(&["evaluate", "--image-plane", "0", "--wm-plane", "1"]);
        assert_eq!(code, EXIT_VALIDATION);
        let (code, _, _) = run_args(&["optimize", "--profile", "table1-p7"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn inapplicable_attack_parameter_is_rejected() {
        let args = AttackArgs::parse_from_for_test(&["--kind", "crop", "--density", "0.1"]);
        assert!(matches!(
            build_attack(&args, &RunConfig::default()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn attack_defaults_and_overrides() {
        let args = AttackArgs::parse_from_for_test(&["--kind", "salt-pepper"]);
        assert_eq!(
            build_attack(&args, &RunConfig::default()).unwrap(),
            Attack::SaltPepper {
                density: 0.02,
                seed: 42
            }
        );
        let args = AttackArgs::parse_from_for_test(&["--kind", "translation", "--dx", "-3"]);
        assert_eq!(
            build_attack(&args, &RunConfig::default()).unwrap(),
            Attack::Translation { dx: -3, dy: 5 }
        );
        let args = AttackArgs::parse_from_for_test(&["--kind", "blur"]);
        assert!(matches!(
            build_attack(&args, &RunConfig::default()),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn config_profiles_accept_presets_and_inline() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"profiles": ["table1-p2", {"name": "mine", "weights": [0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.1]}]}"#,
        )
        .unwrap();
        let resolved: Vec<_> = cfg
            .profiles
            .unwrap()
            .iter()
            .map(|p| p.resolve().unwrap())
            .collect();
        assert_eq!(resolved[0].name(), "table1-p2");
        assert_eq!(resolved[1].name(), "mine");
        assert!(serde_json::from_str::<RunConfig>(r#"{"colour": true}"#).is_err());
    }

    impl AttackArgs {
        fn parse_from_for_test(args: &[&str]) -> AttackArgs {
            #[derive(Parser)]
            struct Wrapper {
                #[command(flatten)]
                inner: AttackArgs,
            }
            Wrapper::parse_from(std::iter::once("attack").chain(args.iter().copied())).inner
        }
    }
}
