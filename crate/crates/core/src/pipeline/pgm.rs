//! Portable graymap (PGM) reading and writing, plain (P2) and raw (P5).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII samples.
    Plain,
    /// Binary samples, one byte for `maxval < 256`, else two big-endian bytes.
    Raw,
}

fn parse_err<X>(message: impl Into<String>) -> Result<X> {
    Err(Error::Parse {
        line: 0,
        message: message.into(),
    })
}

/// Header tokens, skipping whitespace and `#` comments.
fn next_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut tok = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            break;
        }
        match byte[0] {
            b'#' if tok.is_empty() => {
                let mut skip = Vec::new();
                r.read_until(b'\n', &mut skip)?;
            }
            b if b.is_ascii_whitespace() => {
                if !tok.is_empty() {
                    break;
                }
            }
            b => tok.push(b),
        }
    }
    if tok.is_empty() {
        return parse_err("truncated PGM header");
    }
    String::from_utf8(tok).or_else(|_| parse_err("non-ASCII PGM header"))
}

fn number<R: BufRead>(r: &mut R, what: &str) -> Result<u32> {
    let tok = next_token(r)?;
    tok.parse()
        .or_else(|_| parse_err(format!("bad PGM {what}: {tok:?}")))
}

/// Decodes a PGM stream; samples are divided by `maxval`.
pub fn read_pgm<T: Scalar, R: BufRead>(mut r: R) -> Result<GrayImage<T>> {
    let magic = next_token(&mut r)?;
    let format = match magic.as_str() {
        "P2" => PgmFormat::Plain,
        "P5" => PgmFormat::Raw,
        other => return parse_err(format!("not a PGM file (magic {other:?})")),
    };
    let width = number(&mut r, "width")? as usize;
    let height = number(&mut r, "height")? as usize;
    let maxval = number(&mut r, "maxval")?;
    if width == 0 || height == 0 {
        return parse_err("PGM dimensions must be positive");
    }
    if maxval == 0 || maxval > 65535 {
        return parse_err(format!("PGM maxval {maxval} outside 1..=65535"));
    }
    let n = width * height;
    let mut samples = Vec::with_capacity(n);
    match format {
        PgmFormat::Plain => {
            for _ in 0..n {
                samples.push(number(&mut r, "sample")?);
            }
        }
        PgmFormat::Raw => {
            let bytes = if maxval < 256 { 1 } else { 2 };
            let mut buf = vec![0u8; n * bytes];
            r.read_exact(&mut buf)
                .or_else(|_| parse_err("truncated PGM raster"))?;
            if bytes == 1 {
                samples.extend(buf.iter().map(|&b| b as u32));
            } else {
                samples.extend(
                    buf.chunks_exact(2)
                        .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]]))),
                );
            }
        }
    }
    if let Some(s) = samples.iter().find(|&&s| s > maxval) {
        return parse_err(format!("PGM sample {s} exceeds maxval {maxval}"));
    }
    let m = maxval as f64;
    GrayImage::new(
        width,
        height,
        samples.into_iter().map(|s| T::of(s as f64 / m)).collect(),
    )
}

/// Encodes `img` with samples `round(v * maxval)`.
pub fn write_pgm<T: Scalar, W: Write>(
    img: &GrayImage<T>,
    mut w: W,
    format: PgmFormat,
    maxval: u16,
) -> Result<()> {
    if maxval == 0 {
        return Err(Error::InvalidArgument("PGM maxval must be positive".into()));
    }
    let m = maxval as f64;
    let quantize = |v: T| (v.as_f64() * m).round().clamp(0.0, m) as u16;
    match format {
        PgmFormat::Plain => {
            writeln!(w, "P2\n{} {}\n{}", img.width(), img.height(), maxval)?;
            for row in img.rows() {
                let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
        }
        PgmFormat::Raw => {
            write!(w, "P5\n{} {}\n{}\n", img.width(), img.height(), maxval)?;
            let mut buf = Vec::with_capacity(img.len() * 2);
            for &v in img.pixels() {
                let q = quantize(v);
                if maxval < 256 {
                    buf.push(q as u8);
                } else {
                    buf.extend_from_slice(&q.to_be_bytes());
                }
            }
            w.write_all(&buf)?;
        }
    }
    Ok(())
}

pub fn load_pgm<T: Scalar>(path: impl AsRef<std::path::Path>) -> Result<GrayImage<T>> {
    let f = std::fs::File::open(path)?;
    read_pgm(std::io::BufReader::new(f))
}

/// Writes a raw PGM with the given `maxval`.
pub fn save_pgm<T: Scalar>(
    img: &GrayImage<T>,
    path: impl AsRef<std::path::Path>,
    maxval: u16,
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_pgm(img, &mut w, PgmFormat::Raw, maxval)?;
    w.flush()?;
    Ok(())
}
