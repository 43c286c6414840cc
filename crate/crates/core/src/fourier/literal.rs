//! Plain-text field literals.
//!
//! ```text
//! field d=2 n=4 rank=vector real=true mean_zero=true s=2.5
//! component 0
//! 1 0 0.5 0
//! -1 0 0.5 0
//! component 1
//! 0 1 0 -0.25
//! 0 -1 0 0.25
//! ```
//!
//! The header names dimension, cutoff, rank (`scalar`, `vector` or
//! `matrix:<q>`) and flags; `real` and `mean_zero` default to false, `s` is
//! optional. Each entry line is `m_1 … m_d re im`. Scalar fields may omit the
//! `component` line. Unlisted modes are zero; `#` starts a comment.

use std::fmt::Write as _;

use super::{Lattice, PeriodicField, Rank};
use crate::{Error, Result, C64};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Literal {
        line,
        message: message.into(),
    }
}

pub fn parse_field(text: &str) -> Result<PeriodicField> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty field literal"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("field") {
        return Err(err(hline, "literal must start with a `field` header"));
    }
    let (mut d, mut n, mut rank) = (None, None, None);
    let (mut real, mut mean_zero, mut s) = (false, false, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err(hline, format!("header token `{tok}` is not key=value")))?;
        let bad = |what: &str| err(hline, format!("invalid {what} `{value}`"));
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(|_| bad("d"))?),
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
            "rank" => {
                rank = Some(match value {
                    "scalar" => Rank::Scalar,
                    "vector" => Rank::Vector,
                    v => match v.strip_prefix("matrix:") {
                        Some(q) => Rank::Matrix(q.parse().map_err(|_| bad("rank"))?),
                        None => return Err(bad("rank")),
                    },
                })
            }
            "real" => real = value.parse().map_err(|_| bad("real flag"))?,
            "mean_zero" => mean_zero = value.parse().map_err(|_| bad("mean_zero flag"))?,
            "s" => s = Some(value.parse::<f64>().map_err(|_| bad("s"))?),
            other => return Err(err(hline, format!("unknown header key `{other}`"))),
        }
    }
    let d = d.ok_or_else(|| err(hline, "header is missing d"))?;
    let n = n.ok_or_else(|| err(hline, "header is missing n"))?;
    let rank = rank.unwrap_or(Rank::Scalar);
    let lattice = Lattice::new(d, n)?;
    let mut field = PeriodicField::zeros(&lattice, rank);
    let mut seen = vec![false; field.coefficients().len()];
    let mut component = 0usize;

    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "component" {
            let idx: Vec<usize> = parts[1..]
                .iter()
                .map(|p| p.parse().map_err(|_| err(ln, format!("bad component index `{p}`"))))
                .collect::<Result<_>>()?;
            component = match (rank, idx.as_slice()) {
                (Rank::Matrix(q), [i, j]) if *i < q && *j < q => i * q + j,
                (_, [c]) if *c < field.components() => *c,
                _ => return Err(err(ln, format!("component {idx:?} invalid for {rank:?}"))),
            };
            continue;
        }
        if parts.len() != d + 2 {
            return Err(err(ln, format!("expected {} numbers, found {}", d + 2, parts.len())));
        }
        let m: Vec<i64> = parts[..d]
            .iter()
            .map(|p| p.parse().map_err(|_| err(ln, format!("bad mode entry `{p}`"))))
            .collect::<Result<_>>()?;
        let re: f64 = parts[d].parse().map_err(|_| err(ln, format!("bad real part `{}`", parts[d])))?;
        let im: f64 = parts[d + 1]
            .parse()
            .map_err(|_| err(ln, format!("bad imaginary part `{}`", parts[d + 1])))?;
        let i = lattice
            .index_of(&m)
            .ok_or_else(|| err(ln, format!("mode {m:?} outside the lattice (N={n})")))?;
        let slot = component * lattice.len() + i;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(err(ln, format!("duplicate entry for mode {m:?}")));
        }
        field.component_mut(component)[i] = C64::new(re, im);
    }

    if real {
        field = field.into_real()?;
    }
    if mean_zero {
        field = field.into_mean_zero()?;
    }
    Ok(field.with_smoothness(s))
}

/// Renders a field in the literal format; only nonzero coefficients are
/// listed, floats with 17 significant digits.
pub fn format_field(field: &PeriodicField) -> String {
    let lat = field.lattice();
    let rank = match field.rank() {
        Rank::Scalar => "scalar".to_string(),
        Rank::Vector => "vector".to_string(),
        Rank::Matrix(q) => format!("matrix:{q}"),
    };
    let mut out = format!(
        "field d={} n={} rank={rank} real={} mean_zero={}",
        lat.dim(),
        lat.cutoff(),
        field.is_real(),
        field.is_mean_zero()
    );
    if let Some(s) = field.smoothness() {
        let _ = write!(out, " s={s:.16e}");
    }
    out.push('\n');
    for c in 0..field.components() {
        match field.rank() {
            Rank::Scalar => {}
            Rank::Vector => {
                let _ = writeln!(out, "component {c}");
            }
            Rank::Matrix(q) => {
                let _ = writeln!(out, "component {} {}", c / q, c % q);
            }
        }
        for (m, v) in lat.modes().zip(field.component(c)) {
            if *v == C64::new(0.0, 0.0) {
                continue;
            }
            for x in m {
                let _ = write!(out, "{x} ");
            }
            let _ = writeln!(out, "{:.16e} {:.16e}", v.re, v.im);
        }
    }
    out
}
