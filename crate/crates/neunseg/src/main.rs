//! Batch command-line driver; all functionality lives in the library.
//!
//! Exit codes: 0 success, 1 hard error, 2 success with warnings.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use neunseg::batch;
use neunseg::io as formats;
use neunseg::raster::Connectivity;
use neunseg::scene::{self, SceneParams};
use neunseg::schemes::{run_scheme, PipelineConfig, Scheme};
use neunseg::synthesis;
use neunseg::tiling;

#[derive(Parser)]
#[command(
    name = "neunseg",
    version,
    about = "Morphological instance segmentation of stained neurons: mask synthesis, \
             probability-map post-processing, comparison and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Disk radius for ultimate erosion and reconstruction (px)
    #[arg(long = "se-radius", default_value_t = 10)]
    se_radius: u32,
    /// Neuron-channel threshold used by the comparator schemes
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Minimum peak spacing for the distance scheme (px)
    #[arg(long = "min-distance", default_value_t = 20)]
    min_distance: u32,
    /// Pixel connectivity: four or eight
    #[arg(long, default_value = "eight")]
    connectivity: Connectivity,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig, String> {
        let cfg = PipelineConfig {
            se_radius: self.se_radius,
            ws_threshold: self.threshold,
            min_distance: self.min_distance,
            connectivity: self.connectivity,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build instance labels and a three-class mask from point annotations
    /// and a binary segmentation
    Synthesize {
        /// Binary foreground segmentation (8-bit PNG, 0/255)
        #[arg(long = "binary-mask")]
        binary_mask: PathBuf,
        /// Centroid annotations, one x,y pair per line
        #[arg(long)]
        points: PathBuf,
        /// Output directory for instances.png and classes.png
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        /// Inter-cell contour thickness (px, even)
        #[arg(long, default_value_t = 4)]
        thickness: u32,
    },
    /// Convert a probability map into labeled instances
    Postprocess {
        /// Input probability map (8-bit RGB PNG)
        #[arg(long)]
        probmap: PathBuf,
        /// Output label map (16-bit PNG)
        #[arg(long)]
        out: PathBuf,
        /// proposed, baseline, distance or contour-strip
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Score predicted label maps against ground truth and centroids
    Evaluate {
        /// Directory of predicted label maps (<id>.png)
        #[arg(long)]
        pred: PathBuf,
        /// Directory of ground-truth label maps (<id>.png)
        #[arg(long)]
        gt: PathBuf,
        /// Directory of centroid annotations (<id>.txt)
        #[arg(long)]
        points: PathBuf,
        /// Output CSV report
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run all four schemes over a directory and report instance metrics
    Compare {
        /// Directory of probability maps (<id>.png)
        #[arg(long)]
        probmaps: PathBuf,
        /// Directory of ground-truth label maps (<id>.png)
        #[arg(long)]
        gt: PathBuf,
        /// Output CSV report (metrics only)
        #[arg(long)]
        out: PathBuf,
        /// Timing CSV; defaults to <out stem>_timing.csv
        #[arg(long = "timing-out")]
        timing_out: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Generate a synthetic scene: probability map, instance labels,
    /// class mask and centroids
    Genfix {
        /// Output directory (probmaps/, instances/, classes/, points/)
        #[arg(long)]
        out: PathBuf,
        /// Image id used for the file names
        #[arg(long, default_value = "scene")]
        id: String,
        #[arg(long, default_value_t = 512)]
        width: u32,
        #[arg(long, default_value_t = 512)]
        height: u32,
        #[arg(long, default_value_t = 40)]
        cells: u32,
        #[arg(long = "radius-min", default_value_t = 12)]
        radius_min: u32,
        #[arg(long = "radius-max", default_value_t = 18)]
        radius_max: u32,
        /// Fraction of cells placed as touching pairs
        #[arg(long = "touching-fraction", default_value_t = 0.0)]
        touching_fraction: f64,
        /// Minimum boundary gap between cell groups (px)
        #[arg(long, default_value_t = 3)]
        gap: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the tile grid covering an image
    TilePlan {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        #[arg(long = "patch-size", default_value_t = tiling::DEFAULT_PATCH_SIZE)]
        patch_size: u32,
        #[arg(long, default_value_t = tiling::DEFAULT_OVERLAP)]
        overlap: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            let rendered = e.to_string();
            if !rendered.contains("Usage:") {
                use clap::CommandFactory;
                eprintln!("{}", Cli::command().render_usage());
            }
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Synthesize { binary_mask, points, out_dir, thickness } => {
            if thickness < 2 || thickness % 2 != 0 {
                return Err("thickness must be even and at least 2".into());
            }
            let mask = formats::read_binary_mask(&binary_mask).map_err(stringify)?;
            let seeds =
                formats::read_points(&points, mask.width(), mask.height()).map_err(stringify)?;
            let result = synthesis::synthesize(&mask, &seeds, thickness);
            std::fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
            formats::write_label_map(&out_dir.join("instances.png"), &result.instances)
                .map_err(stringify)?;
            formats::write_class_map(&out_dir.join("classes.png"), &result.classes)
                .map_err(stringify)?;
            if result.skipped_seeds.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for p in &result.skipped_seeds {
                    eprintln!("warning: seed {p} lies on background, skipped");
                }
                Ok(ExitCode::from(2))
            }
        }
        Command::Postprocess { probmap, out, scheme, pipeline } => {
            let cfg = pipeline.config()?;
            let pm = formats::read_probability_map(&probmap).map_err(stringify)?;
            let start = Instant::now();
            let labels = run_scheme(&pm, scheme, &cfg);
            let seconds = start.elapsed().as_secs_f64();
            formats::write_label_map(&out, &labels).map_err(stringify)?;
            eprintln!("{scheme}\t{seconds:.3}s");
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate { pred, gt, points, out, workers } => {
            let rows =
                batch::evaluate_directory(&pred, &gt, &points, workers).map_err(stringify)?;
            batch::write_metrics_csv(&out, &rows).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { probmaps, gt, out, timing_out, pipeline, workers } => {
            let cfg = pipeline.config()?;
            let rows =
                batch::compare_directory(&probmaps, &gt, &cfg, workers).map_err(stringify)?;
            batch::write_compare_csv(&out, &rows).map_err(stringify)?;
            let timing_path = timing_out.unwrap_or_else(|| timing_sibling(&out));
            batch::write_timing_csv(&timing_path, &rows).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Genfix {
            out,
            id,
            width,
            height,
            cells,
            radius_min,
            radius_max,
            touching_fraction,
            gap,
            seed,
        } => {
            let params = SceneParams {
                width,
                height,
                cells,
                radius_min,
                radius_max,
                touching_fraction,
                gap,
            };
            params.validate()?;
            let scene = scene::generate(&params, seed);
            for sub in ["probmaps", "instances", "classes", "points"] {
                std::fs::create_dir_all(out.join(sub))
                    .map_err(|e| format!("{}: {e}", out.join(sub).display()))?;
            }
            formats::write_probability_map(
                &out.join("probmaps").join(format!("{id}.png")),
                &scene.probability,
            )
            .map_err(stringify)?;
            formats::write_label_map(
                &out.join("instances").join(format!("{id}.png")),
                &scene.instances,
            )
            .map_err(stringify)?;
            formats::write_class_map(&out.join("classes").join(format!("{id}.png")), &scene.classes)
                .map_err(stringify)?;
            formats::write_points(&out.join("points").join(format!("{id}.txt")), &scene.centroids)
                .map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TilePlan { width, height, patch_size, overlap } => {
            if patch_size <= overlap {
                return Err("patch-size must exceed overlap".into());
            }
            if width == 0 || height == 0 {
                return Err("image must be at least 1x1".into());
            }
            let grid = tiling::plan_tiles(width, height, patch_size, overlap);
            println!(
                "tiles: {} ({} x {}), tile size {}x{}, overlap {}",
                grid.tiles.len(),
                grid.cols,
                grid.rows,
                grid.tile_width,
                grid.tile_height,
                grid.overlap
            );
            for (i, t) in grid.tiles.iter().enumerate() {
                println!("{i}\t{},{}\t{}x{}", t.x0, t.y0, t.width, t.height);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn timing_sibling(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("compare");
    out.with_file_name(format!("{stem}_timing.csv"))
}

fn stringify(e: impl std::fmt::Display) -> String {
    e.to_string()
}
