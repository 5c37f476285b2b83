//! Ten-variable non-monotone linear complementarity family over the
//! nonnegative orthant: `0 <= x  perp  E[(M + eps M_w) x + q + eps q_w] >= 0`
//! with `q` ranging over the coordinate directions.
//!
//! The matrix ships as a checksummed plain-text data file; its defining
//! structural property is an indefinite symmetric part.

use std::path::Path;
use std::sync::Arc;

use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::problem::{Matrix, Vector, ViProblem};
use crate::problems::{Family, NOISE_EPS};
use crate::rng::Draw;

const WATSON_TEXT: &str = include_str!("../../data/watson10.txt");

/// FNV-1a 64 checksum of the bundled matrix file.
pub const WATSON_CHECKSUM: u64 = 0x251a_c6b5_f6e9_09f8;

const DIM: usize = 10;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

/// Parse a 10 x 10 whitespace-separated matrix.
pub fn parse_watson_matrix(text: &str) -> Result<Matrix> {
    let mut rows = Vec::with_capacity(DIM);
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Data(format!("row {}: bad entry '{tok}'", i + 1)))
            })
            .collect::<Result<_>>()?;
        if row.len() != DIM {
            return Err(Error::Data(format!(
                "row {}: expected {DIM} entries, found {}",
                i + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != DIM {
        return Err(Error::Data(format!(
            "expected {DIM} rows, found {}",
            rows.len()
        )));
    }
    Ok(Matrix::from_fn(DIM, DIM, |r, c| rows[r][c]))
}

fn verified(bytes: &[u8]) -> Result<()> {
    let found = fnv1a64(bytes);
    if found != WATSON_CHECKSUM {
        return Err(Error::Data(format!(
            "matrix checksum mismatch: found {found:#018x}, manifest records {WATSON_CHECKSUM:#018x}"
        )));
    }
    Ok(())
}

/// The bundled matrix, checksum-verified.
pub fn watson_matrix() -> Result<Matrix> {
    verified(WATSON_TEXT.as_bytes())?;
    parse_watson_matrix(WATSON_TEXT)
}

/// Load the matrix from an external copy of the data file, verifying the
/// manifest checksum before parsing.
pub fn load_watson_matrix(path: &Path) -> Result<Matrix> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    verified(&bytes)?;
    parse_watson_matrix(std::str::from_utf8(&bytes).map_err(|e| Error::Data(e.to_string()))?)
}

/// LCP instance with `q` the `q_index`-th coordinate direction (1-based).
pub fn gen_watson(q_index: usize, instance_seed: u64) -> Result<ViProblem> {
    gen_watson_with(q_index, instance_seed, true)
}

pub fn gen_watson_with(q_index: usize, instance_seed: u64, noise: bool) -> Result<ViProblem> {
    if !(1..=DIM).contains(&q_index) {
        return Err(Error::Parameter(format!(
            "q_index must lie in 1..={DIM}, got {q_index}"
        )));
    }
    // The matrix and q are fixed; the seed only labels the instance.
    let _ = instance_seed;
    let m = Arc::new(watson_matrix()?);
    let q = Arc::new(Vector::from_fn(DIM, |i, _| if i + 1 == q_index { 1.0 } else { 0.0 }));
    let set = FeasibleSet::orthant(DIM)?;

    let sample = {
        let m = m.clone();
        let q = q.clone();
        move |x: &Vector, draw: &Draw| -> Result<Vector> {
            if !noise {
                return Ok(m.as_ref() * x + q.as_ref());
            }
            let mut rng = draw.rng();
            let m_w = Matrix::from_fn(DIM, DIM, |_, _| {
                rand::Rng::sample::<f64, _>(&mut rng, StandardNormal)
            });
            let q_w = Vector::from_fn(DIM, |_, _| {
                rand::Rng::sample::<f64, _>(&mut rng, StandardNormal)
            });
            Ok(m.as_ref() * x + &m_w * x * NOISE_EPS + q.as_ref() + q_w * NOISE_EPS)
        }
    };
    let mean = {
        let m = m.clone();
        let q = q.clone();
        move |x: &Vector| -> Result<Vector> { Ok(m.as_ref() * x + q.as_ref()) }
    };

    Ok(ViProblem::new(
        set,
        format!("{}-q{}", Family::Watson.name(), q_index),
        Arc::new(sample),
    )
    .with_mean(Arc::new(mean)))
}
