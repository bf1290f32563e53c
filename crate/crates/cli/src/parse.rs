//! Parsers for the compact command-line value syntax.

use homolog::prob::{parse_prob, Pmf};
use homolog::{Error, Result};

/// Parses per-sender input laws, one entry per sender separated by commas.
///
/// An entry is `u` (uniform), a single probability `p` (Bernoulli with
/// `P(1) = p`, binary alphabets only) or a `:`-separated probability vector.
/// Probabilities may be written as fractions such as `1/3`.
pub fn parse_pmf_spec(spec: &str, sizes: &[usize]) -> Result<Vec<Pmf>> {
    let entries: Vec<&str> = spec.split(',').map(str::trim).collect();
    if entries.len() != sizes.len() {
        return Err(Error::Parse(format!(
            "{} input laws for {} senders",
            entries.len(),
            sizes.len()
        )));
    }
    entries
        .iter()
        .zip(sizes)
        .map(|(&e, &size)| {
            if e == "u" {
                return Pmf::uniform(size);
            }
            if e.contains(':') {
                let probs = e.split(':').map(parse_prob).collect::<Result<Vec<_>>>()?;
                if probs.len() != size {
                    return Err(Error::Parse(format!(
                        "law {e:?} has {} entries, alphabet has {size}",
                        probs.len()
                    )));
                }
                return Pmf::indexed(probs);
            }
            if size != 2 {
                return Err(Error::Parse(format!(
                    "single probability {e:?} needs a binary alphabet, not one of size {size}"
                )));
            }
            Pmf::bernoulli(parse_prob(e)?)
        })
        .collect()
}

/// Parses a comma-separated list of numbers (fractions allowed).
pub fn parse_numbers(spec: &str) -> Result<Vec<f64>> {
    spec.split(',').map(parse_prob).collect()
}

/// Parses a comma-separated list of nonnegative integers.
pub fn parse_counts(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad count {s:?}")))
        })
        .collect()
}

/// Parses binary generator rows such as `11111110,00001111`.
pub fn parse_binary_rows(spec: &str) -> Result<Vec<Vec<u32>>> {
    let rows: Vec<Vec<u32>> = spec
        .split(',')
        .map(|r| {
            r.trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("bad binary digit {c:?} in {r:?}"))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.iter().any(|r| r.len() != rows[0].len() || r.is_empty()) {
        return Err(Error::Parse("generator rows must be nonempty and of equal length".into()));
    }
    Ok(rows)
}

/// Parses `q`, `p^m` or `GF(p^m)` into `(p, m)`, checking only the syntax.
pub fn parse_field(spec: &str) -> Result<(u64, u32)> {
    let s = spec.trim();
    let s = s
        .strip_prefix("GF(")
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(s);
    let bad = || Error::Parse(format!("bad field {spec:?}"));
    match s.split_once('^') {
        Some((p, m)) => Ok((p.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?)),
        None => {
            let q: u64 = s.parse().map_err(|_| bad())?;
            prime_power(q).ok_or_else(|| Error::Parse(format!("{q} is not a prime power")))
        }
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut m) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}
