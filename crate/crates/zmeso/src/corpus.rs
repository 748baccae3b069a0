//! Zero-ordinate tables and the deterministic parts of the zero count.
//!
//! A [`ZeroCorpus`] is an immutable ascending table of ordinates gamma
//! (zeros 1/2 + i*gamma). On top of it sit the smooth main term of the
//! counting function, the fluctuating remainder `S(t) = N(t) - main_term(t)`,
//! and the archimedean density `Omega(xi)` whose `Omega/2pi` is the local
//! mean density of zeros.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma};

const CACHE_MAGIC: &[u8; 4] = b"ZMC1";

/// Immutable ascending table of zero ordinates with provenance.
#[derive(Debug, Clone)]
pub struct ZeroCorpus {
    ordinates: Vec<f64>,
    max_height: f64,
    source: String,
}

impl ZeroCorpus {
    /// Build from an ascending, positive ordinate list.
    pub fn new(ordinates: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        for (i, w) in ordinates.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedTable {
                    line: i + 2,
                    reason: format!("ordinates not strictly ascending: {} then {}", w[0], w[1]),
                });
            }
        }
        if let Some(&first) = ordinates.first() {
            if !(first > 0.0) {
                return Err(Error::MalformedTable {
                    line: 1,
                    reason: format!("nonpositive ordinate {first}"),
                });
            }
        }
        let max_height = ordinates.last().copied().unwrap_or(0.0);
        Ok(Self { ordinates, max_height, source: source.into() })
    }

    /// Parse a text table: one decimal ordinate per line, `#` comments and
    /// blank lines ignored. Compatible with the published Odlyzko files.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut ordinates = Vec::new();
        let mut prev = 0.0f64;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let tok = line.trim();
            if tok.is_empty() || tok.starts_with('#') {
                continue;
            }
            let gamma: f64 = tok.parse().map_err(|_| Error::MalformedTable {
                line: line_no,
                reason: format!("unparsable ordinate {tok:?}"),
            })?;
            if !gamma.is_finite() || gamma <= prev {
                return Err(Error::MalformedTable {
                    line: line_no,
                    reason: format!("ordinate {gamma} not above previous {prev}"),
                });
            }
            ordinates.push(gamma);
            prev = gamma;
        }
        Self::new(ordinates, "")
    }

    pub fn load_text(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        let mut corpus = Self::parse(std::io::BufReader::new(file))?;
        corpus.source = path.as_ref().display().to_string();
        Ok(corpus)
    }

    pub fn set_source(&mut self, source: impl Into<String>) {
        self.source = source.into();
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn count(&self) -> usize {
        self.ordinates.len()
    }

    pub fn max_height(&self) -> f64 {
        self.max_height
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    /// N(T): zeros with 0 < gamma <= T (boundary inclusive).
    pub fn count_upto(&self, t: f64) -> Result<usize> {
        if t > self.max_height {
            return Err(Error::OutOfTabulatedRange { requested: t, max_height: self.max_height });
        }
        Ok(self.ordinates.partition_point(|&g| g <= t))
    }

    /// Contiguous view of ordinates in the half-open window [a, b).
    pub fn zeros_in_window(&self, a: f64, b: f64) -> Result<&[f64]> {
        if b > self.max_height {
            return Err(Error::OutOfTabulatedRange { requested: b, max_height: self.max_height });
        }
        if a >= b {
            return Ok(&[]);
        }
        let lo = self.ordinates.partition_point(|&g| g < a);
        let hi = self.ordinates.partition_point(|&g| g < b);
        Ok(&self.ordinates[lo..hi])
    }

    /// S(t) = N(t) - main_term(t).
    pub fn s_of(&self, t: f64) -> Result<f64> {
        Ok(self.count_upto(t)? as f64 - main_term(t))
    }

    /// Binary cache: magic "ZMC1", LE u64 count, LE f64 ordinates.
    pub fn write_cache(&self, mut w: impl Write) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&(self.ordinates.len() as u64).to_le_bytes())?;
        for g in &self.ordinates {
            w.write_all(&g.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_cache(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::MalformedTable { line: 0, reason: "bad cache magic".into() });
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let count = u64::from_le_bytes(buf8) as usize;
        let mut ordinates = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut buf8)?;
            ordinates.push(f64::from_le_bytes(buf8));
        }
        Self::new(ordinates, "cache")
    }
}

/// Smooth main term of the zero count:
/// (1/pi) arg Gamma(1/4 + iT/2) - (T/2pi) log pi + 1.
pub fn main_term(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t.abs());
    let arg_gamma = ln_gamma(z).im * t.signum();
    arg_gamma / std::f64::consts::PI
        - t / (2.0 * std::f64::consts::PI) * std::f64::consts::PI.ln()
        + 1.0
}

/// Archimedean density Omega(xi) = Re psi(1/4 + i xi/2) - log pi.
///
/// Even in xi; Omega(xi)/2pi is the local mean density of zeros.
pub fn omega(xi: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * xi.abs());
    digamma(z).re - std::f64::consts::PI.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_corpus() -> ZeroCorpus {
        let text = "# first three ordinates\n14.134725\n\n21.022040\n25.010858\n";
        ZeroCorpus::parse(std::io::Cursor::new(text)).unwrap()
    }

    #[test]
    fn parse_three_lines() {
        let c = small_corpus();
        assert_eq!(c.count(), 3);
        assert_relative_eq!(c.max_height(), 25.010858);
    }

    #[test]
    fn parse_empty_stream() {
        let c = ZeroCorpus::parse(std::io::Cursor::new("")).unwrap();
        assert_eq!(c.count(), 0);
        assert_eq!(c.max_height(), 0.0);
    }

    #[test]
    fn parse_rejects_non_monotone() {
        let err = ZeroCorpus::parse(std::io::Cursor::new("14.1\n13.9\n")).unwrap_err();
        match err {
            Error::MalformedTable { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_garbage_token() {
        let err = ZeroCorpus::parse(std::io::Cursor::new("14.1\nxyz\n")).unwrap_err();
        match err {
            Error::MalformedTable { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn count_boundaries() {
        let c = small_corpus();
        assert_eq!(c.count_upto(10.0).unwrap(), 0);
        assert_eq!(c.count_upto(0.0).unwrap(), 0);
        assert_eq!(c.count_upto(14.134725).unwrap(), 1);
        assert!(c.count_upto(30.0).is_err());
    }

    #[test]
    fn window_half_open() {
        let c = small_corpus();
        assert_eq!(c.zeros_in_window(14.0, 14.2).unwrap(), &[14.134725]);
        assert_eq!(c.zeros_in_window(14.134725, 14.2).unwrap(), &[14.134725]);
        assert_eq!(c.zeros_in_window(14.0, 14.134725).unwrap(), &[] as &[f64]);
        assert_eq!(c.zeros_in_window(15.0, 15.0).unwrap(), &[] as &[f64]);
        assert!(c.zeros_in_window(0.0, 25.1).is_err());
    }

    #[test]
    fn main_term_at_zero_and_symmetry() {
        assert_relative_eq!(main_term(0.0), 1.0, max_relative = 1e-14);
        // arg Gamma conjugate symmetry gives main_term(-T) = 2 - main_term(T)
        for t in [3.0, 25.0, 100.0, 5000.0] {
            assert_relative_eq!(main_term(-t), 2.0 - main_term(t), max_relative = 1e-11);
        }
    }

    #[test]
    fn main_term_at_100() {
        // frozen from a 30-digit evaluation; N(100) = 29 so S(100) ~ -0.0024
        assert_relative_eq!(main_term(100.0), 29.002_409_902_271_817, max_relative = 1e-12);
    }

    #[test]
    fn omega_at_zero_and_symmetry() {
        // psi(1/4) - log pi
        assert_relative_eq!(omega(0.0), -5.372_183_419_225_665_6, max_relative = 1e-13);
        for xi in [0.5, 3.0, 40.0, 1e4] {
            assert_eq!(omega(xi), omega(-xi));
        }
    }

    #[test]
    fn omega_stirling_asymptotic() {
        // |Omega(xi)/2pi - log((|xi|+2)/2pi)/2pi| < 10/(|xi|+2)
        let tau = 2.0 * std::f64::consts::PI;
        for xi in [1e2, 1e3, 1e4] {
            let lhs = (omega(xi) / tau - ((xi + 2.0) / tau).ln() / tau).abs();
            assert!(lhs < 10.0 / (xi + 2.0), "xi={xi}: {lhs}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let c = small_corpus();
        let mut buf = Vec::new();
        c.write_cache(&mut buf).unwrap();
        let back = ZeroCorpus::read_cache(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.ordinates(), c.ordinates());
    }
}
