//! JSON and CSV forms of [`MomentSequence`].
//!
//! Log-magnitudes are written with 17 significant digits, which round-trips
//! every f64 exactly. In JSON they are strings so that no intermediate JSON
//! tooling reformats them.
//!
//! JSON:
//!
//! ```json
//! {"support": "stieltjes", "n_max": 2, "family": "exp",
//!  "moments": [{"sign": 1, "logmag": "0.0000000000000000e0"}, ...]}
//! ```
//!
//! CSV starts with a `#` metadata line, then `n,sign,logmag` rows where `n`
//! is the moment order (2k for the stored m_{2k} of a symmetric sequence).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{FamilySpec, MomentSequence, Support};
use crate::error::{Error, Result};
use crate::signed_log::SignedLogValue;

#[derive(Serialize, Deserialize)]
struct SequenceFile {
    support: Support,
    n_max: usize,
    family: Option<String>,
    moments: Vec<MomentEntry>,
}

#[derive(Serialize, Deserialize)]
struct MomentEntry {
    sign: i8,
    logmag: String,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    n: usize,
    sign: i8,
    logmag: String,
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad log-magnitude {s:?}")))
}

fn parse_family(label: Option<&str>) -> Result<Option<FamilySpec>> {
    label.map(str::parse::<FamilySpec>).transpose()
}

fn assemble(
    support: Support,
    n_max: usize,
    family: Option<FamilySpec>,
    signs: Vec<(i8, f64)>,
) -> Result<MomentSequence> {
    if signs.len() != n_max + 1 {
        return Err(Error::Parse(format!(
            "n_max is {n_max} but {} moments are present",
            signs.len()
        )));
    }
    let entries = signs
        .into_iter()
        .map(|(s, l)| SignedLogValue::new(s, l))
        .collect();
    MomentSequence::new(support, entries, family)
}

pub fn to_json(seq: &MomentSequence) -> Result<String> {
    let file = SequenceFile {
        support: seq.support(),
        n_max: seq.n_max(),
        family: seq.family().map(|f| f.label.clone()),
        moments: seq
            .entries()
            .iter()
            .map(|m| MomentEntry {
                sign: m.sign(),
                logmag: format_f64(m.logmag()),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn from_json(text: &str) -> Result<MomentSequence> {
    let file: SequenceFile = serde_json::from_str(text)?;
    let family = parse_family(file.family.as_deref())?;
    let signs = file
        .moments
        .iter()
        .map(|e| Ok((e.sign, parse_f64(&e.logmag)?)))
        .collect::<Result<Vec<_>>>()?;
    assemble(file.support, file.n_max, family, signs)
}

pub fn write_csv<W: Write>(seq: &MomentSequence, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# support={} n_max={} family={}",
        seq.support().as_str(),
        seq.n_max(),
        seq.family().map_or("-", |f| f.label.as_str())
    )?;
    let step = match seq.support() {
        Support::Stieltjes => 1,
        Support::HamburgerSymmetric => 2,
    };
    let mut wtr = csv::Writer::from_writer(out);
    for (k, m) in seq.entries().iter().enumerate() {
        wtr.serialize(CsvRow {
            n: step * k,
            sign: m.sign(),
            logmag: format_f64(m.logmag()),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn to_csv(seq: &MomentSequence) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(seq, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv<R: Read>(mut input: R) -> Result<MomentSequence> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    from_csv(&text)
}

pub fn from_csv(text: &str) -> Result<MomentSequence> {
    let (meta, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::Parse("empty CSV moment file".into()))?;
    let meta = meta.strip_prefix('#').ok_or_else(|| {
        Error::Parse("CSV moment file must start with a '#' metadata line".into())
    })?;
    let mut support = None;
    let mut n_max = None;
    let mut family = None;
    for token in meta.split_whitespace() {
        match token.split_once('=') {
            Some(("support", v)) => {
                support = Some(match v {
                    "stieltjes" => Support::Stieltjes,
                    "hamburger-symmetric" => Support::HamburgerSymmetric,
                    _ => return Err(Error::Parse(format!("unknown support {v:?}"))),
                })
            }
            Some(("n_max", v)) => {
                n_max = Some(
                    v.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad n_max {v:?}")))?,
                )
            }
            Some(("family", "-")) => {}
            Some(("family", v)) => family = Some(v.to_string()),
            _ => return Err(Error::Parse(format!("unexpected metadata {token:?}"))),
        }
    }
    let support = support.ok_or_else(|| Error::Parse("metadata lacks support".into()))?;
    let n_max = n_max.ok_or_else(|| Error::Parse("metadata lacks n_max".into()))?;
    let step = match support {
        Support::Stieltjes => 1,
        Support::HamburgerSymmetric => 2,
    };

    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let mut signs = Vec::new();
    for (k, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row?;
        if row.n != step * k {
            return Err(Error::Parse(format!(
                "row {k} has order {} (expected {})",
                row.n,
                step * k
            )));
        }
        signs.push((row.sign, parse_f64(&row.logmag)?));
    }
    assemble(support, n_max, parse_family(family.as_deref())?, signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::generate_moments;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let seq = generate_moments(&FamilySpec::x(1.0, 0.5).unwrap(), 40).unwrap();
        let back = from_json(&to_json(&seq).unwrap()).unwrap();
        assert_eq!(back.family(), seq.family());
        for (a, b) in seq.entries().iter().zip(back.entries()) {
            assert_eq!(a.logmag().to_bits(), b.logmag().to_bits());
        }
    }

    #[test]
    fn csv_round_trip_symmetric() {
        let fam = FamilySpec::x(1.0, 1.0).unwrap().symmetric_root().unwrap();
        let seq = generate_moments(&fam, 10).unwrap();
        let text = to_csv(&seq).unwrap();
        assert!(text
            .starts_with("# support=hamburger-symmetric n_max=10 family=symroot[(1,1),(1,1)]\n"));
        assert!(text.contains("\n4,1,"));
        let back = from_csv(&text).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn truncated_inputs_fail() {
        let seq = generate_moments(&FamilySpec::exponential(), 10).unwrap();
        let json = to_json(&seq).unwrap();
        assert!(from_json(&json[..json.len() / 2]).is_err());
        let csv = to_csv(&seq).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(from_csv(&lines[..lines.len() - 2].join("\n")).is_err());
        assert!(from_csv("n,sign,logmag\n0,1,0\n").is_err());
    }
}
