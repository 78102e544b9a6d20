//! `platerec`: batch plate localization, recognition, training and evaluation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use plate_core::neural::{read_network, write_network};
use plate_core::pipeline::{
    detect_plate, evaluate, generate_scene, load_pgm, load_scenes, recognize, save_pgm, save_scene,
    train_glyph_network, PipelineConfig, SceneConfig, DEFAULT_BLUR_SIGMAS,
    DEFAULT_SAMPLES_PER_CLASS,
};
use plate_core::{Bbox, GrayImage64, SnrbNetwork64};

#[derive(Parser)]
#[command(
    name = "platerec",
    version,
    about = "Licence-plate localization and recognition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the plate in a PGM image.
    Detect {
        image: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the wavelet magnitude, binary grid and CA fixpoint as PGM files here.
        #[arg(long)]
        dump_intermediates: Option<PathBuf>,
    },
    /// Locate and read the plate in a PGM image.
    Recognize {
        image: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train a glyph classifier on the embedded font.
    TrainGlyphs {
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_CLASS)]
        samples: usize,
        /// Comma-separated blur sigmas, cycled over each class's samples.
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write seeded synthetic scenes with ground-truth sidecars.
    GenScenes {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model on a scene directory.
    Eval {
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    NotFound,
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn load_image(path: &Path) -> Result<GrayImage64> {
    load_pgm(path).with_context(|| format!("image {}", path.display()))
}

fn load_model(path: &Path) -> Result<SnrbNetwork64> {
    let f = File::open(path).with_context(|| format!("model {}", path.display()))?;
    read_network(BufReader::new(f)).with_context(|| format!("model {}", path.display()))
}

fn bbox_field(b: &Bbox) -> String {
    format!("{},{},{},{}", b.x_min, b.y_min, b.x_max, b.y_max)
}

fn detect(image: &Path, config: Option<&Path>, dump: Option<&Path>) -> Result<Outcome> {
    let cfg = load_config(config)?;
    let img = load_image(image)?;
    let search = detect_plate(&img, &cfg)?;
    if let Some(dir) = dump {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("dump directory {}", dir.display()))?;
        save_pgm(&search.magnitude, dir.join("magnitude.pgm"), 65535)?;
        save_pgm(
            &search.binary.to_image::<f64>(),
            dir.join("binary.pgm"),
            255,
        )?;
        save_pgm(
            &search.fixpoint.to_image::<f64>(),
            dir.join("fixpoint.pgm"),
            255,
        )?;
    }
    match search.region {
        Some(r) => {
            println!("bbox={} pixels={}", bbox_field(&r.bbox), r.pixel_count);
            Ok(Outcome::Done)
        }
        None => {
            println!("bbox=none");
            Ok(Outcome::NotFound)
        }
    }
}

fn recognize_cmd(image: &Path, model: &Path, config: Option<&Path>) -> Result<Outcome> {
    let cfg = load_config(config)?;
    let net = load_model(model)?;
    let img = load_image(image)?;
    let det = recognize(&img, &net, &cfg)?;
    let bbox = det.plate_bbox.as_ref().map_or("none".into(), bbox_field);
    let text = det.text.as_deref().unwrap_or("none");
    println!("bbox={bbox} text={text}");
    for (ch, scores) in det
        .text
        .iter()
        .flat_map(|t| t.chars())
        .zip(&det.per_char_scores)
    {
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("  {ch} score={best:.4}");
    }
    Ok(if det.text.is_some() {
        Outcome::Done
    } else {
        Outcome::NotFound
    })
}

fn train(
    alphabet: &str,
    out: &Path,
    samples: usize,
    sigmas: Option<&[f64]>,
    config: Option<&Path>,
) -> Result<Outcome> {
    let cfg = load_config(config)?;
    if samples == 0 {
        bail!("--samples must be positive");
    }
    let sigmas = sigmas.unwrap_or(&DEFAULT_BLUR_SIGMAS);
    let net: SnrbNetwork64 = train_glyph_network(alphabet, samples, sigmas, &cfg)?;
    let f = File::create(out).with_context(|| format!("model {}", out.display()))?;
    let mut w = BufWriter::new(f);
    write_network(&net, &mut w)?;
    w.flush()?;
    println!(
        "classes={} hidden_units={} layers={} pca_components={}",
        net.labels.len(),
        net.hidden_unit_count(),
        net.hidden_layers.len(),
        net.pca.as_ref().map_or(0, |p| p.components())
    );
    Ok(Outcome::Done)
}

fn gen_scenes(count: usize, seed: u64, out: &Path) -> Result<Outcome> {
    if count == 0 {
        bail!("--count must be positive");
    }
    std::fs::create_dir_all(out).with_context(|| format!("output directory {}", out.display()))?;
    let cfg = SceneConfig::default();
    (0..count).into_par_iter().try_for_each(|i| -> Result<()> {
        let scene = generate_scene::<f64>(seed.wrapping_add(i as u64), None, &cfg)?;
        save_scene(&scene, out, i)?;
        Ok(())
    })?;
    println!("wrote {count} scenes to {}", out.display());
    Ok(Outcome::Done)
}

fn eval(scenes: &Path, model: &Path, config: Option<&Path>) -> Result<Outcome> {
    let cfg = load_config(config)?;
    let net = load_model(model)?;
    let scenes =
        load_scenes::<f64>(scenes).with_context(|| format!("scenes {}", scenes.display()))?;
    if scenes.is_empty() {
        bail!("no scene_*.pgm files found");
    }
    let (m, _) = evaluate(&scenes, &net, &cfg)?;
    println!("{m}");
    println!();
    println!("{:<16}{:>10}", "metric", "value");
    println!("{:<16}{:>10}", "scenes", m.scenes);
    println!("{:<16}{:>10.4}", "detection rate", m.detection_rate);
    println!("{:<16}{:>10.4}", "mean IoU", m.mean_iou);
    println!("{:<16}{:>10.4}", "text rate", m.text_rate);
    println!("{:<16}{:>10.4}", "char accuracy", m.char_acc);
    println!("{:<16}{:>10.2}", "ms per image", m.ms_per_image);
    Ok(Outcome::Done)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Detect {
            image,
            config,
            dump_intermediates,
        } => detect(&image, config.as_deref(), dump_intermediates.as_deref()),
        Command::Recognize {
            image,
            model,
            config,
        } => recognize_cmd(&image, &model, config.as_deref()),
        Command::TrainGlyphs {
            alphabet,
            out,
            samples,
            sigmas,
            config,
        } => train(
            &alphabet,
            &out,
            samples,
            sigmas.as_deref(),
            config.as_deref(),
        ),
        Command::GenScenes { count, seed, out } => gen_scenes(count, seed, &out),
        Command::Eval {
            scenes,
            model,
            config,
        } => eval(&scenes, &model, config.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotFound) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
