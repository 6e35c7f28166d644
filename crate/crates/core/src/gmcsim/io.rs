use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sampler::{GridMeta, MassSampleSet};
use crate::error::{GmcError, Result};

/// Size of the JSON header that precedes the binary sample column.
pub const BINARY_HEADER: usize = 64;

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    count: u64,
    seed: u64,
}

fn parse_err(msg: impl Into<String>) -> GmcError {
    GmcError::Parse(msg.into())
}

/// CSV: a `# seed=.. grid=.. mu=.. epsilon=.. kernel=..` line, a `mass` header, one sample per line.
pub fn write_csv(set: &MassSampleSet, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "# seed={} grid={} mu={:e} epsilon={:e} kernel={}",
        set.seed, set.grid.n, set.grid.mu, set.grid.epsilon, set.grid.kernel
    )?;
    writeln!(w, "mass")?;
    for v in &set.samples {
        writeln!(w, "{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<MassSampleSet> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let meta = lines.next().ok_or_else(|| parse_err("empty file"))??;
    let meta = meta.strip_prefix("# ").ok_or_else(|| parse_err("missing metadata line"))?;
    let mut seed = None;
    let mut grid = GridMeta {
        n: 0,
        epsilon: 0.0,
        mu: 0.0,
        kernel: String::new(),
    };
    for field in meta.split(' ') {
        let (k, v) = field.split_once('=').ok_or_else(|| parse_err(format!("bad field '{field}'")))?;
        let bad = || parse_err(format!("bad value for {k}: '{v}'"));
        match k {
            "seed" => seed = Some(v.parse().map_err(|_| bad())?),
            "grid" => grid.n = v.parse().map_err(|_| bad())?,
            "mu" => grid.mu = v.parse().map_err(|_| bad())?,
            "epsilon" => grid.epsilon = v.parse().map_err(|_| bad())?,
            "kernel" => grid.kernel = v.to_string(),
            _ => return Err(parse_err(format!("unknown field '{k}'"))),
        }
    }
    if lines.next().transpose()?.as_deref() != Some("mass") {
        return Err(parse_err("missing 'mass' header"));
    }
    let samples = lines
        .map(|l| {
            let l = l?;
            l.trim().parse::<f64>().map_err(|_| parse_err(format!("bad sample '{l}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MassSampleSet {
        samples,
        seed: seed.ok_or_else(|| parse_err("missing seed"))?,
        grid,
    })
}

/// Binary: a 64-byte space-padded JSON header ending in a newline, then little-endian f64 values.
pub fn write_binary(set: &MassSampleSet, path: &Path) -> Result<()> {
    let header = serde_json::to_string(&BinaryHeader {
        count: set.samples.len() as u64,
        seed: set.seed,
    })
    .map_err(|e| GmcError::Io(e.to_string()))?;
    if header.len() >= BINARY_HEADER {
        return Err(GmcError::Io("binary header overflow".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    let mut head = header.into_bytes();
    head.resize(BINARY_HEADER - 1, b' ');
    head.push(b'\n');
    w.write_all(&head)?;
    for v in &set.samples {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Samples and seed from a binary file; grid metadata is not stored there.
pub fn read_binary(path: &Path) -> Result<(Vec<f64>, u64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut head = [0u8; BINARY_HEADER];
    r.read_exact(&mut head)?;
    let text = std::str::from_utf8(&head).map_err(|_| parse_err("header is not UTF-8"))?;
    let h: BinaryHeader = serde_json::from_str(text.trim_end()).map_err(|e| parse_err(e.to_string()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() as u64 != 8 * h.count {
        return Err(parse_err(format!("expected {} values, found {} bytes", h.count, bytes.len())));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((samples, h.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> MassSampleSet {
        MassSampleSet {
            samples: vec![1.0, 0.1 + 0.2, 1e-300, 7.5e12],
            seed: 42,
            grid: GridMeta {
                n: 2048,
                epsilon: 4.0 / 2048.0,
                mu: 0.5,
                kernel: "circle".into(),
            },
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_csv(&set(), &p).unwrap();
        assert_eq!(read_csv(&p).unwrap(), set());
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        write_binary(&set(), &p).unwrap();
        let raw = std::fs::read(&p).unwrap();
        assert_eq!(raw.len(), BINARY_HEADER + 8 * 4);
        assert_eq!(raw[BINARY_HEADER - 1], b'\n');
        let (s, seed) = read_binary(&p).unwrap();
        assert_eq!(s, set().samples);
        assert_eq!(seed, 42);
    }
}
