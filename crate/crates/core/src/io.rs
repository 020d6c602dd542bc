//! Text encodings: CSV tables and JSON reports.
//!
//! Floats are written like C's `%.12g`, with `-0` printed as `0`, so output
//! is byte-stable across platforms and thread counts. Lines end in `\n`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{Alpha0Fit, FidelityTrace, GroundStateRecord};
use crate::momentum::{MomentumMap, Peak};
use crate::spectrum::ButterflySpectrum;

const SIG_DIGITS: usize = 12;

/// `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::invalid(format!("write failed: {e}"))
}

pub fn write_butterfly_csv<W: Write>(mut w: W, bf: &ButterflySpectrum) -> std::io::Result<()> {
    writeln!(w, "alpha,index,energy")?;
    for (alpha, energies) in bf.alphas.iter().zip(&bf.energies) {
        let a = fmt_num(*alpha);
        for (k, e) in energies.iter().enumerate() {
            writeln!(w, "{a},{k},{}", fmt_num(*e))?;
        }
    }
    Ok(())
}

pub fn write_ground_csv<W: Write>(mut w: W, g: &GroundStateRecord) -> std::io::Result<()> {
    writeln!(w, "p,q,re,im,abs2")?;
    for (site, z) in g.lattice.sites().zip(&g.amplitudes) {
        writeln!(
            w,
            "{},{},{},{},{}",
            site.p,
            site.q,
            fmt_num(z.re),
            fmt_num(z.im),
            fmt_num(z.norm_sqr())
        )?;
    }
    Ok(())
}

pub fn write_density_csv<W: Write>(mut w: W, g: &GroundStateRecord) -> std::io::Result<()> {
    writeln!(w, "p,q,density")?;
    for (site, z) in g.lattice.sites().zip(&g.amplitudes) {
        writeln!(w, "{},{},{}", site.p, site.q, fmt_num(z.norm_sqr()))?;
    }
    Ok(())
}

pub fn write_fidelity_csv<W: Write>(mut w: W, t: &FidelityTrace) -> std::io::Result<()> {
    writeln!(w, "alpha,fidelity")?;
    for (a, f) in t.alphas.iter().zip(&t.fidelities) {
        writeln!(w, "{},{}", fmt_num(*a), fmt_num(*f))?;
    }
    Ok(())
}

/// Full momentum grid, row-major over `(m, n)`.
pub fn write_momentum_csv<W: Write>(mut w: W, map: &MomentumMap) -> std::io::Result<()> {
    writeln!(w, "kp,kq,magnitude")?;
    for m in 1..=map.rows {
        for n in 1..=map.cols {
            writeln!(
                w,
                "{},{},{}",
                fmt_num(map.kp(m)),
                fmt_num(map.kq(n)),
                fmt_num(map.magnitude(m, n))
            )?;
        }
    }
    Ok(())
}

pub fn write_peaks_csv<W: Write>(mut w: W, peaks: &[Peak]) -> std::io::Result<()> {
    writeln!(w, "kp,kq,magnitude")?;
    for p in peaks {
        writeln!(
            w,
            "{},{},{}",
            fmt_num(p.kp),
            fmt_num(p.kq),
            fmt_num(p.magnitude)
        )?;
    }
    Ok(())
}

pub fn write_fit_csv<W: Write>(mut w: W, fits: &[Alpha0Fit]) -> std::io::Result<()> {
    writeln!(w, "L,alpha0,prediction,deviation")?;
    for f in fits {
        writeln!(
            w,
            "{},{},{},{}",
            f.size,
            fmt_num(f.alpha0),
            fmt_num(f.prediction),
            fmt_num(f.deviation)
        )?;
    }
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::invalid(format!("JSON encoding failed: {e}")))?;
    writeln!(w).map_err(io_err)
}

fn reader<'a>(text: &'a str, header: &[&str]) -> Result<csv::Reader<&'a [u8]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = rdr.headers().map_err(|e| csv_err(&e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{}'", header.join(",")),
        });
    }
    Ok(rdr)
}

fn csv_err(e: &csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        message: e.to_string(),
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line() as usize);
    let raw = rec.get(i).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing column '{name}'"),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {name} value '{raw}'"),
    })
}

fn finite(x: f64, rec: &csv::StringRecord, name: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse {
            line: rec.position().map_or(0, |p| p.line() as usize),
            message: format!("{name} must be finite"),
        })
    }
}

/// A state read back from `p,q,re,im,abs2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedGround {
    pub rows: usize,
    pub cols: usize,
    /// Row-major amplitudes.
    pub amplitudes: Vec<Complex64>,
}

/// Parses a ground-state table. Every site of the `max p x max q` grid
/// must appear exactly once; row order is free.
pub fn read_ground_csv(text: &str) -> Result<ParsedGround> {
    let mut rdr = reader(text, &["p", "q", "re", "im", "abs2"])?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&e))?;
        let p: usize = field(&rec, 0, "p")?;
        let q: usize = field(&rec, 1, "q")?;
        let re = finite(field(&rec, 2, "re")?, &rec, "re")?;
        let im = finite(field(&rec, 3, "im")?, &rec, "im")?;
        finite(field(&rec, 4, "abs2")?, &rec, "abs2")?;
        if p == 0 || q == 0 {
            return Err(Error::Parse {
                line: rec.position().map_or(0, |x| x.line() as usize),
                message: "site labels start at 1".into(),
            });
        }
        entries.push((p, q, Complex64::new(re, im)));
    }
    let rows = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let cols = entries.iter().map(|e| e.1).max().unwrap_or(0);
    let cells = rows
        .checked_mul(cols)
        .filter(|&c| c > 0 && c == entries.len());
    let Some(cells) = cells else {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "{} rows do not cover a {rows}x{cols} lattice",
                entries.len()
            ),
        });
    };
    let mut amplitudes = vec![None; cells];
    for (p, q, z) in entries {
        let slot = &mut amplitudes[(p - 1) * cols + (q - 1)];
        if slot.is_some() {
            return Err(Error::Parse {
                line: 0,
                message: format!("site ({p}, {q}) listed twice"),
            });
        }
        *slot = Some(z);
    }
    Ok(ParsedGround {
        rows,
        cols,
        amplitudes: amplitudes
            .into_iter()
            .map(|z| z.expect("all sites filled"))
            .collect(),
    })
}

/// A spectrum read back from `alpha,index,energy`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedButterfly {
    pub alphas: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

/// Parses a butterfly table. Rows must be grouped by `alpha` with indices
/// `0, 1, ..` in order and the same count for every `alpha`.
pub fn read_butterfly_csv(text: &str) -> Result<ParsedButterfly> {
    let mut rdr = reader(text, &["alpha", "index", "energy"])?;
    let mut alphas: Vec<f64> = Vec::new();
    let mut energies: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(&e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let alpha = finite(field(&rec, 0, "alpha")?, &rec, "alpha")?;
        let index: usize = field(&rec, 1, "index")?;
        let energy = finite(field(&rec, 2, "energy")?, &rec, "energy")?;
        if index == 0 {
            if let (Some(first), Some(last)) = (energies.first(), energies.last()) {
                if last.len() != first.len() {
                    return Err(Error::Parse {
                        line,
                        message: "alpha blocks have different lengths".into(),
                    });
                }
            }
            if alphas.last().is_some_and(|&a| alpha <= a) {
                return Err(Error::Parse {
                    line,
                    message: "alpha values must increase".into(),
                });
            }
            alphas.push(alpha);
            energies.push(vec![energy]);
        } else {
            let block = energies.last_mut().filter(|b| b.len() == index);
            let same_alpha = alphas.last() == Some(&alpha);
            match block {
                Some(b) if same_alpha => b.push(energy),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unexpected index {index} at alpha {alpha}"),
                    })
                }
            }
        }
    }
    if let (Some(first), Some(last)) = (energies.first(), energies.last()) {
        if last.len() != first.len() {
            return Err(Error::Parse {
                line: 0,
                message: "alpha blocks have different lengths".into(),
            });
        }
    }
    Ok(ParsedButterfly { alphas, energies })
}
