use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand};
use craft_core::evalkit::Metric;
use craft_core::matching::builtin_scene;
use craft_core::pipeline::{self, PipelineConfig};
use craft_core::Camera;

/// Craft proposals from part-labeled silhouettes.
#[derive(Parser)]
#[command(name = "craft", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Views per batch for pose fitting.
    #[arg(long, global = true)]
    views: Option<usize>,
    #[arg(long, global = true)]
    batches: Option<usize>,
    /// Optimization steps per hypothesis.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Surface samples per shape for primitive selection.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Directory of .obj templates.
    #[arg(long, global = true)]
    templates: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit templates to an instance-labeled input.
    Pose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Turn a pose result into a primitive model.
    Simplify {
        #[arg(long)]
        pose: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Assign scene objects to the parts of a primitive model.
    Match {
        #[arg(long)]
        model: PathBuf,
        /// Scene file, or `scene1` / `scene2`.
        #[arg(long)]
        scene: String,
    },
    /// Score a proposal against a ground-truth annotation.
    Evaluate {
        #[arg(long)]
        proposal: PathBuf,
        #[arg(long)]
        gt: PathBuf,
    },
    /// Exhaustive search over scene combinations.
    Baseline {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        scene: String,
        /// `miou` or `emax`.
        #[arg(long, default_value = "miou")]
        metric: String,
    },
    /// Pose, simplify, match and render (and evaluate with --gt).
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        scene: String,
        #[arg(long)]
        gt: Option<PathBuf>,
    },
    /// Render a template as an input with its ground truth.
    Synth {
        #[arg(long)]
        template: String,
        /// Degrees.
        #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
        azimuth: f64,
        /// Degrees.
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        elevation: f64,
        #[arg(long, default_value_t = 2.5)]
        distance: f64,
        #[arg(long, default_value_t = 256)]
        size: usize,
    },
}

fn usage_error(msg: String) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn require_file(path: &Path, what: &str) {
    if !path.is_file() {
        usage_error(format!("{what} file not found: {}", path.display()));
    }
}

fn require_scene(scene: &str) {
    if !Path::new(scene).is_file() && builtin_scene::<f64>(scene).is_none() {
        usage_error(format!("scene file not found: {scene}"));
    }
}

fn load_config(c: &Common) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &c.config {
        Some(path) => PipelineConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(v) = c.views {
        cfg.pose.n_views = v;
    }
    if let Some(b) = c.batches {
        cfg.pose.n_batches = b;
    }
    if let Some(s) = c.steps {
        cfg.pose.steps = s;
    }
    if let Some(n) = c.samples {
        cfg.samples = n;
    }
    if let Some(t) = &c.templates {
        cfg.templates = Some(t.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    let cfg = load_config(&cli.common)?;
    let out = &cli.common.out;
    Ok(match cli.command {
        Command::Pose { input } => {
            require_file(&input, "input");
            vec![pipeline::cmd_pose(&input, &cfg, out)?]
        }
        Command::Simplify { pose, input } => {
            require_file(&pose, "pose");
            require_file(&input, "input");
            vec![pipeline::cmd_simplify(&pose, &input, &cfg, out)?]
        }
        Command::Match { model, scene } => {
            require_file(&model, "model");
            require_scene(&scene);
            vec![pipeline::cmd_match(&model, &scene, &cfg, out)?]
        }
        Command::Evaluate { proposal, gt } => {
            require_file(&proposal, "proposal");
            require_file(&gt, "ground truth");
            vec![pipeline::cmd_evaluate(&proposal, &gt, &cfg, out)?]
        }
        Command::Baseline { gt, scene, metric } => {
            require_file(&gt, "ground truth");
            require_scene(&scene);
            let metric: Metric = metric
                .parse()
                .unwrap_or_else(|_| usage_error(format!("unknown metric {metric}, expected miou or emax")));
            vec![pipeline::cmd_baseline(&gt, &scene, metric, &cfg, out)?]
        }
        Command::Pipeline { input, scene, gt } => {
            require_file(&input, "input");
            require_scene(&scene);
            if let Some(g) = &gt {
                require_file(g, "ground truth");
            }
            pipeline::cmd_pipeline(&input, &scene, gt.as_deref(), &cfg, out)?
        }
        Command::Synth {
            template,
            azimuth,
            elevation,
            distance,
            size,
        } => {
            let cam = Camera {
                fov_y: cfg.pose.fov_y_deg.to_radians(),
                ..Camera::new(azimuth.to_radians(), elevation.to_radians(), distance, size, size)
            };
            pipeline::cmd_synth(&template, &cam, &cfg, out)?
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
