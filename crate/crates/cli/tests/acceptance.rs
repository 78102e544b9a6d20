//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plate_core::grid::{binarize_percentile, ca_iterate, ca_step, BinaryGrid, CaRule};
use plate_core::neural::{
    make_two_spirals, read_network, snrb_classify, snrb_train, write_network, SnrbNetwork,
    TrainConfig,
};
use plate_core::pipeline::{
    evaluate, generate_scene, make_glyph_training_set, train_glyph_network, PipelineConfig,
    SceneConfig, DEFAULT_BLUR_SIGMAS, DEFAULT_SAMPLES_PER_CLASS, DIGITS, PLATE_LETTERS,
};
use plate_core::wavelet::{cwt_row, gaussian_wavelet, transform_image, WaveletSpec};
use plate_core::GrayImage64;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> (bool, String) {
    let s = elapsed.as_secs_f64();
    (s < limit_s, format!("runtime {s:.2}s < {limit_s}s"))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut s = f(a) + f(b);
    for i in 1..steps {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn c1_wavelet() -> Verdict {
    let start = Instant::now();
    let mut worst_mean = 0.0f64;
    let mut energy_range = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=8 {
        let g = |x: f64| gaussian_wavelet::<f64>(n, x).unwrap();
        worst_mean = worst_mean.max(simpson(g, -12.0, 12.0, 24_000).abs());
        let e = simpson(|x| g(x).powi(2), -12.0, 12.0, 24_000);
        energy_range = (energy_range.0.min(e), energy_range.1.max(e));
    }
    let mut changes = 0;
    let mut prev = gaussian_wavelet::<f64>(6, -5.0).unwrap();
    for i in 1..=10_000 {
        let v = gaussian_wavelet::<f64>(6, -5.0 + i as f64 * 1e-3).unwrap();
        if v != 0.0 && prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            changes += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    let (fast, time) = within(start.elapsed(), 1.0);
    let pass = worst_mean < 1e-6
        && energy_range.0 >= 0.999
        && energy_range.1 <= 1.001
        && changes == 6
        && fast;
    verdict(
        pass,
        format!(
            "max|int g_n|={worst_mean:.2e} (<1e-6), int g_n^2 in [{:.6}, {:.6}] (within [0.999, 1.001]), g_6 sign changes={changes} (=6), {time}",
            energy_range.0, energy_range.1
        ),
    )
}

fn c2_cwt() -> Verdict {
    let start = Instant::now();
    let spec = WaveletSpec::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_const = 0.0f64;
    for c in [0.0, 0.3, 1.0, -4.2, 17.0] {
        let w = cwt_row(&vec![c; 256], &spec).unwrap();
        worst_const = worst_const.max(w.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let mut worst_lin = 0.0f64;
    let mut worst_shift = 0.0f64;
    for _ in 0..20 {
        let f: Vec<f64> = (0..256).map(|_| rng.random::<f64>()).collect();
        let alpha = rng.random_range(-5.0..5.0);
        let w = cwt_row(&f, &spec).unwrap();
        let scaled: Vec<f64> = f.iter().map(|v| alpha * v).collect();
        let ws = cwt_row(&scaled, &spec).unwrap();
        let norm = w.iter().fold(0.0f64, |m, v| m.max((alpha * v).abs()));
        for (a, b) in w.iter().zip(&ws) {
            worst_lin = worst_lin.max((alpha * a - b).abs() / norm);
        }
        let k = rng.random_range(1..16);
        let mut base = vec![0.5; 256];
        let mut moved = vec![0.5; 256];
        base[60..180].copy_from_slice(&f[..120]);
        moved[60 + k..180 + k].copy_from_slice(&f[..120]);
        let wb = cwt_row(&base, &spec).unwrap();
        let wm = cwt_row(&moved, &spec).unwrap();
        for b in 40..216 - k {
            worst_shift = worst_shift.max((wb[b] - wm[b + k]).abs());
        }
    }
    let (fast, time) = within(start.elapsed(), 1.0);
    let pass = worst_const < 1e-8 * 256.0 && worst_lin < 1e-12 && worst_shift < 1e-9 && fast;
    verdict(
        pass,
        format!(
            "constant max|W|={worst_const:.2e} (<{:.2e}), linearity rel={worst_lin:.2e} (<1e-12), shift dev={worst_shift:.2e} (<1e-9), {time}",
            1e-8 * 256.0
        ),
    )
}

fn c3_plateau() -> Verdict {
    let start = Instant::now();
    let spec = WaveletSpec::<f64>::default();
    let mut hits = 0;
    let mut lowest = f64::INFINITY;
    for seed in 0..20 {
        let s = generate_scene::<f64>(seed, None, &SceneConfig::default()).unwrap();
        let dom = transform_image(&s.image, &spec).unwrap();
        let mut mags: Vec<f64> = dom.coeffs.iter().map(|c| c.abs()).collect();
        let b = s.truth_bbox;
        let mut inside = 0.0;
        for y in b.y_min..=b.y_max {
            for x in b.x_min..=b.x_max {
                inside += dom.get(x, y).abs();
            }
        }
        inside /= b.area() as f64;
        mags.sort_by(|a, b| a.total_cmp(b));
        let n = mags.len();
        let median = if n % 2 == 1 {
            mags[n / 2]
        } else {
            0.5 * (mags[n / 2 - 1] + mags[n / 2])
        };
        let ratio = inside / median;
        lowest = lowest.min(ratio);
        hits += usize::from(ratio >= 3.0);
    }
    let (fast, time) = within(start.elapsed(), 10.0);
    verdict(
        hits >= 18 && fast,
        format!("{hits}/20 scenes with ratio >= 3 (need >= 18), lowest ratio {lowest:.2}, {time}"),
    )
}

fn c4_binarize() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut exact = 0;
    let mut repeatable = 0;
    for i in 0..50 {
        let (w, h) = (rng.random_range(1..80), rng.random_range(1..80));
        // every other image draws from at most three grey levels
        let levels = if i % 2 == 0 {
            rng.random_range(1..=3)
        } else {
            1_000_000
        };
        let img = GrayImage64::from_fn(w, h, |_, _| {
            rng.random_range(0..levels) as f64 / levels as f64
        });
        let g = binarize_percentile(&img, 0.3).unwrap();
        exact += usize::from(g.white_count() == (0.3 * (w * h) as f64).round() as usize);
        repeatable += usize::from((0..3).all(|_| binarize_percentile(&img, 0.3).unwrap() == g));
    }
    verdict(
        exact == 50 && repeatable == 50,
        format!("exact count on {exact}/50, repeat-identical on {repeatable}/50 (need 50/50)"),
    )
}

fn oracle_step(cells: &[Vec<bool>], survival_min: usize) -> Vec<Vec<bool>> {
    let (h, w) = (cells.len() as i64, cells[0].len() as i64);
    (0..h)
        .map(|y| {
            (0..w)
                .map(|x| {
                    let mut n = 0;
                    for dy in -1..=1 {
                        for dx in -1..=1 {
                            let (nx, ny) = (x + dx, y + dy);
                            if (dx, dy) != (0, 0)
                                && nx >= 0
                                && ny >= 0
                                && nx < w
                                && ny < h
                                && cells[ny as usize][nx as usize]
                            {
                                n += 1;
                            }
                        }
                    }
                    cells[y as usize][x as usize] && n >= survival_min
                })
                .collect()
        })
        .collect()
}

fn cells_of(g: &BinaryGrid) -> Vec<Vec<bool>> {
    (0..g.height())
        .map(|y| (0..g.width()).map(|x| g.get(x, y)).collect())
        .collect()
}

fn grid_of(c: &[Vec<bool>]) -> BinaryGrid {
    BinaryGrid::from_fn(c[0].len(), c.len(), |x, y| c[y][x])
}

fn c5_ca() -> Verdict {
    let rule = CaRule {
        survival_min: 4,
        max_iterations: 1000,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut monotone = 0;
    let mut idempotent = 0;
    for _ in 0..100 {
        let g = BinaryGrid::from_fn(32, 32, |_, _| rng.random_bool(0.3));
        let next = ca_step(&g, &rule);
        monotone += usize::from(next.cells().iter().zip(g.cells()).all(|(a, b)| !a || *b));
        let (fix, _) = ca_iterate(&g, &rule);
        idempotent += usize::from(ca_step(&fix, &rule) == fix);
    }
    let field = |pts: &[(usize, usize)]| -> Vec<Vec<bool>> {
        (0..11)
            .map(|y| (0..11).map(|x| pts.contains(&(x, y))).collect())
            .collect()
    };
    let isolated = field(&[(5, 5)]);
    let block: Vec<(usize, usize)> = (4..7).flat_map(|y| (4..7).map(move |x| (x, y))).collect();
    let block = field(&block);
    let plus = field(&[(5, 4), (4, 5), (5, 5), (6, 5), (5, 6)]);
    let empty = field(&[]);
    let step = |c: &[Vec<bool>]| cells_of(&ca_step(&grid_of(c), &rule));
    let run = |c: &[Vec<bool>]| cells_of(&ca_iterate(&grid_of(c), &rule).0);
    let patterns = [
        step(&isolated) == oracle_step(&isolated, 4) && step(&isolated) == empty,
        step(&block) == oracle_step(&block, 4) && step(&block) == plus,
        run(&plus) == oracle_step(&oracle_step(&plus, 4), 4) && run(&plus) == empty,
    ];
    let matched = patterns.iter().filter(|&&p| p).count();
    verdict(
        monotone == 100 && idempotent == 100 && matched == 3,
        format!("monotone {monotone}/100, fixpoint idempotent {idempotent}/100, hand patterns {matched}/3 (need all)"),
    )
}

fn c6_spirals() -> Verdict {
    let start = Instant::now();
    let set = make_two_spirals::<f64>(97, 2.0, 0.0, 0);
    let net = snrb_train(&set, &TrainConfig::default(), false).unwrap();
    let acc = net.accuracy(&set).unwrap();
    let units = net.hidden_unit_count();
    let (fast, time) = within(start.elapsed(), 60.0);
    verdict(
        acc == 1.0 && units < 194 && fast,
        format!("training accuracy {acc:.4} (=1), hidden units {units} (<194), {time}"),
    )
}

fn c7_glyphs() -> Verdict {
    let start = Instant::now();
    let set = make_glyph_training_set::<f64>(DIGITS, 50, &[0.0, 0.5, 1.0], 7, 16).unwrap();
    let mut idx: Vec<usize> = (0..set.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in (1..idx.len()).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let held = set.len() / 10;
    let hold: Vec<_> = idx[..held].iter().map(|&i| set[i].clone()).collect();
    let train: Vec<_> = idx[held..].iter().map(|&i| set[i].clone()).collect();
    let net = snrb_train(&train, &TrainConfig::default(), true).unwrap();
    let acc = net.accuracy(&hold).unwrap();
    let (fast, time) = within(start.elapsed(), 120.0);
    verdict(
        acc >= 0.95 && fast,
        format!(
            "holdout accuracy {acc:.4} on {held} glyphs (>= 0.95), {} hidden units, {time}",
            net.hidden_unit_count()
        ),
    )
}

fn plate_alphabet() -> String {
    format!("{DIGITS}{PLATE_LETTERS}")
}

fn c8_end_to_end() -> Verdict {
    let cfg = PipelineConfig::default();
    let net: SnrbNetwork<f64> = train_glyph_network(
        &plate_alphabet(),
        DEFAULT_SAMPLES_PER_CLASS,
        &DEFAULT_BLUR_SIGMAS,
        &cfg,
    )
    .unwrap();
    let scenes: Vec<_> = (0..100)
        .map(|s| generate_scene::<f64>(1000 + s, None, &SceneConfig::default()).unwrap())
        .collect();
    let (m, _) = evaluate(&scenes, &net, &cfg).unwrap();
    let pass = m.detection_rate >= 0.90
        && m.text_rate >= 0.70
        && m.char_acc >= 0.90
        && m.ms_per_image <= 3000.0;
    verdict(
        pass,
        format!(
            "detection {:.3} (>= 0.90), text {:.3} (>= 0.70), per-char {:.3} (>= 0.90), {:.1} ms/image (<= 3000), mean IoU {:.3}",
            m.detection_rate, m.text_rate, m.char_acc, m.ms_per_image, m.mean_iou
        ),
    )
}

fn platerec(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_platerec"))
        .args(args)
        .output()
        .expect("run platerec");
    assert!(
        out.status.success(),
        "platerec {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn eval_record(root: &Path, tag: &str) -> (String, Vec<u8>) {
    let scenes = root.join(format!("scenes_{tag}"));
    let model = root.join(format!("model_{tag}.snrb"));
    platerec(&[
        "gen-scenes",
        "--count",
        "20",
        "--seed",
        "500",
        "--out",
        scenes.to_str().unwrap(),
    ]);
    platerec(&[
        "train-glyphs",
        "--alphabet",
        &plate_alphabet(),
        "--out",
        model.to_str().unwrap(),
    ]);
    let out = platerec(&[
        "eval",
        "--scenes",
        scenes.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ]);
    (
        out.lines().next().unwrap_or("").to_string(),
        std::fs::read(model).unwrap(),
    )
}

/// Drops the wall-clock field, the one part of the record that is not a function of the inputs.
fn mask_timing(record: &str) -> String {
    record
        .split(' ')
        .filter(|f| !f.starts_with("ms_per_image="))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c9_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (a, model_a) = eval_record(dir.path(), "a");
    let (b, model_b) = eval_record(dir.path(), "b");
    let same = mask_timing(&a) == mask_timing(&b) && !mask_timing(&a).is_empty();
    verdict(
        same && model_a == model_b && a.starts_with("detection_rate="),
        format!(
            "records equal with ms_per_image masked: {same}; model files byte-identical: {}; run 1 `{a}`, run 2 `{b}`",
            model_a == model_b
        ),
    )
}

fn c10_serialization() -> Verdict {
    let set = make_glyph_training_set::<f64>(DIGITS, 10, &[0.0, 0.5, 1.0], 10, 16).unwrap();
    let net = snrb_train(&set, &TrainConfig::default(), true).unwrap();
    let mut buf = Vec::new();
    write_network(&net, &mut buf).unwrap();
    let back: SnrbNetwork<f64> = read_network(&buf[..]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut exact = 0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..256).map(|_| rng.random::<f64>()).collect();
        let (la, sa) = snrb_classify(&net, &x).unwrap();
        let (lb, sb) = snrb_classify(&back, &x).unwrap();
        exact +=
            usize::from(la == lb && sa.iter().zip(&sb).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
    verdict(
        exact == 100 && back == net,
        format!(
            "bit-exact classify outputs on {exact}/100 inputs; network equal: {}",
            back == net
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("wavelet correctness", c1_wavelet),
        ("CWT properties", c2_cwt),
        ("plateau detection", c3_plateau),
        ("binarization exact count", c4_binarize),
        ("CA properties", c5_ca),
        ("two spirals", c6_spirals),
        ("glyph classifier", c7_glyphs),
        ("end-to-end floor", c8_end_to_end),
        ("determinism", c9_determinism),
        ("serialization", c10_serialization),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.pass);
        println!(
            "{} criterion {:>2} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
