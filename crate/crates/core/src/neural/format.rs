//! Versioned plain-text model format.
//!
//! ```text
//! SNRB v1
//! pca <components> <input_dim> | pca none
//! explained <fraction>
//! mean <input_dim reals>
//! variances <components reals>
//! <components lines of input_dim reals>
//! layers <count>
//! layer <units> <input_dim>
//! <per unit: width then center reals>
//! weights <rows> <cols>
//! <rows lines of cols reals>
//! labels <count>
//! <one label per line>
//! ```
//!
//! Reals are written with 17 significant digits so every `f64` (and every
//! `f32`, widened) reads back bit-exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::pca::PcaProjection;
use super::rbf::{RbfLayer, RbfUnit};
use super::snrb::SnrbNetwork;

pub const FORMAT_HEADER: &str = "SNRB v1";

fn real<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

fn reals<T: Scalar>(values: &[T]) -> String {
    values
        .iter()
        .map(|&v| real(v))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_network<T: Scalar, W: Write>(net: &SnrbNetwork<T>, mut out: W) -> Result<()> {
    for label in &net.labels {
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "label {label:?} cannot be serialized"
            )));
        }
    }
    writeln!(out, "{FORMAT_HEADER}")?;
    match &net.pca {
        None => writeln!(out, "pca none")?,
        Some(p) => {
            writeln!(out, "pca {} {}", p.components(), p.input_dim())?;
            writeln!(out, "explained {}", real(p.explained_fraction))?;
            writeln!(out, "mean {}", reals(&p.mean))?;
            writeln!(out, "variances {}", reals(&p.variances))?;
            for row in &p.basis {
                writeln!(out, "{}", reals(row))?;
            }
        }
    }
    writeln!(out, "layers {}", net.hidden_layers.len())?;
    for layer in &net.hidden_layers {
        writeln!(out, "layer {} {}", layer.len(), layer.input_dim())?;
        for u in &layer.units {
            writeln!(out, "{} {}", real(u.width), reals(&u.center))?;
        }
    }
    let cols = net.labels.len();
    writeln!(out, "weights {} {}", net.output_weights.len(), cols)?;
    for row in &net.output_weights {
        writeln!(out, "{}", reals(row))?;
    }
    writeln!(out, "labels {}", net.labels.len())?;
    for label in &net.labels {
        writeln!(out, "{label}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn err<X>(&self, message: impl Into<String>) -> Result<X> {
        Err(Error::Parse {
            line: self.line,
            message: message.into(),
        })
    }

    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => self.err("unexpected end of file"),
        }
    }

    /// Reads `<keyword> <n>...` and returns the integers.
    fn header(&mut self, keyword: &str, count: usize) -> Result<Vec<usize>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(keyword) {
            return self.err(format!("expected `{keyword}`, found {line:?}"));
        }
        let nums: std::result::Result<Vec<usize>, _> = parts.map(str::parse).collect();
        match nums {
            Ok(v) if v.len() == count => Ok(v),
            _ => self.err(format!("malformed `{keyword}` line {line:?}")),
        }
    }

    fn reals<T: Scalar>(&mut self, prefix: Option<&str>, expected: usize) -> Result<Vec<T>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if let Some(p) = prefix {
            if parts.next() != Some(p) {
                return self.err(format!("expected `{p}`"));
            }
        }
        let mut values = Vec::with_capacity(expected);
        for tok in parts {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(T::of(v)),
                _ => return self.err(format!("bad real {tok:?}")),
            }
        }
        if values.len() != expected {
            return self.err(format!(
                "expected {expected} values, found {}",
                values.len()
            ));
        }
        Ok(values)
    }
}

pub fn read_network<T: Scalar, R: BufRead>(input: R) -> Result<SnrbNetwork<T>> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    if lines.next_line()?.trim_end() != FORMAT_HEADER {
        return lines.err(format!("missing `{FORMAT_HEADER}` header"));
    }
    let pca_line = lines.next_line()?;
    let pca = if pca_line.trim() == "pca none" {
        None
    } else {
        let dims: Vec<usize> = pca_line
            .strip_prefix("pca ")
            .map(|rest| {
                rest.split_whitespace()
                    .filter_map(|t| t.parse().ok())
                    .collect()
            })
            .unwrap_or_default();
        if dims.len() != 2 {
            return lines.err(format!("malformed pca line {pca_line:?}"));
        }
        let (components, dim) = (dims[0], dims[1]);
        let explained = lines.reals::<T>(Some("explained"), 1)?[0];
        let mean = lines.reals(Some("mean"), dim)?;
        let variances = lines.reals(Some("variances"), components)?;
        let basis = (0..components)
            .map(|_| lines.reals(None, dim))
            .collect::<Result<Vec<_>>>()?;
        Some(PcaProjection {
            mean,
            basis,
            variances,
            explained_fraction: explained,
        })
    };
    let layer_count = lines.header("layers", 1)?[0];
    let mut hidden_layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let dims = lines.header("layer", 2)?;
        let mut units = Vec::with_capacity(dims[0]);
        for _ in 0..dims[0] {
            let mut v = lines.reals::<T>(None, dims[1] + 1)?;
            let width = v.remove(0);
            units.push(RbfUnit { center: v, width });
        }
        hidden_layers.push(RbfLayer { units });
    }
    let wdims = lines.header("weights", 2)?;
    let output_weights = (0..wdims[0])
        .map(|_| lines.reals(None, wdims[1]))
        .collect::<Result<Vec<_>>>()?;
    let label_count = lines.header("labels", 1)?[0];
    let labels = (0..label_count)
        .map(|_| lines.next_line().map(|l| l.trim_end().to_string()))
        .collect::<Result<Vec<_>>>()?;
    let net = SnrbNetwork {
        pca,
        hidden_layers,
        output_weights,
        labels,
    };
    if let Err(e) = net.validate() {
        return lines.err(format!("inconsistent network: {e}"));
    }
    Ok(net)
}
