use std::path::Path;
use std::process::{Command, Output};

use plate_core::pipeline::{load_pgm, save_pgm};
use plate_core::GrayImage64;

fn platerec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platerec"))
        .args(args)
        .output()
        .expect("run platerec")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_dumps_full_size_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let scenes = dir.path().join("scenes");
    assert!(platerec(&[
        "gen-scenes",
        "--count",
        "2",
        "--seed",
        "9",
        "--out",
        s(&scenes)
    ])
    .status
    .success());
    let image = scenes.join("scene_0001.pgm");
    assert!(scenes.join("scene_0001.txt").exists());
    let dump = dir.path().join("dump");
    let out = platerec(&["detect", s(&image), "--dump-intermediates", s(&dump)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("bbox="));
    for name in ["magnitude.pgm", "binary.pgm", "fixpoint.pgm"] {
        let img: GrayImage64 = load_pgm(dump.join(name)).unwrap();
        assert_eq!((img.width(), img.height()), (640, 480), "{name}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.pgm");
    save_pgm(&GrayImage64::filled(128, 64, 0.0), &flat, 255).unwrap();
    assert_eq!(platerec(&["detect", s(&flat)]).status.code(), Some(1));

    let tiny = dir.path().join("tiny.pgm");
    save_pgm(&GrayImage64::filled(10, 10, 0.5), &tiny, 255).unwrap();
    assert_eq!(platerec(&["detect", s(&tiny)]).status.code(), Some(2));

    let garbage = dir.path().join("garbage.pgm");
    std::fs::write(&garbage, b"P7 not an image").unwrap();
    assert_eq!(platerec(&["detect", s(&garbage)]).status.code(), Some(2));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "wavelet.scale=2.0\nplate.colour=blue\n").unwrap();
    assert_eq!(
        platerec(&["detect", s(&flat), "--config", s(&cfg)])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        platerec(&[
            "recognize",
            s(&flat),
            "--model",
            s(&dir.path().join("missing"))
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        platerec(&[
            "train-glyphs",
            "--alphabet",
            "a#",
            "--out",
            s(&dir.path().join("m"))
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(platerec(&["bogus"]).status.code(), Some(2));
}

#[test]
fn train_then_recognize() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("plate.snrb");
    let out = platerec(&[
        "train-glyphs",
        "--alphabet",
        "0123456789ABCEHKMPTXY",
        "--out",
        s(&model),
        "--samples",
        "20",
    ]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&model)
        .unwrap()
        .starts_with("SNRB v1"));

    let scenes = dir.path().join("scenes");
    assert!(platerec(&[
        "gen-scenes",
        "--count",
        "1",
        "--seed",
        "4",
        "--out",
        s(&scenes)
    ])
    .status
    .success());
    let out = platerec(&[
        "recognize",
        s(&scenes.join("scene_0000.pgm")),
        "--model",
        s(&model),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let truth = std::fs::read_to_string(scenes.join("scene_0000.txt")).unwrap();
    let text = truth.lines().find_map(|l| l.strip_prefix("text=")).unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout
            .lines()
            .next()
            .unwrap()
            .ends_with(&format!("text={text}")),
        "{stdout}"
    );

    let flat = dir.path().join("flat.pgm");
    save_pgm(&GrayImage64::filled(128, 64, 0.2), &flat, 255).unwrap();
    let out = platerec(&["recognize", s(&flat), "--model", s(&model)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "bbox=none text=none"
    );

    let out = platerec(&["eval", "--scenes", s(&scenes), "--model", s(&model)]);
    assert!(out.status.success());
    let record = String::from_utf8_lossy(&out.stdout)
        .lines()
        .next()
        .unwrap()
        .to_string();
    let keys: Vec<&str> = record
        .split(' ')
        .map(|f| f.split('=').next().unwrap())
        .collect();
    assert_eq!(
        keys,
        [
            "detection_rate",
            "mean_iou",
            "text_rate",
            "char_acc",
            "ms_per_image"
        ]
    );
}
