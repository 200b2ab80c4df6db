//! Random quantum objects over a pluggable entropy source: Haar-random kets
//! and unitaries and Ginibre-induced random CPTP channels.
//!
//! Entropy enters exclusively through [`EntropySource`]. The default
//! [`SeededPrng`] wraps ChaCha8 (documented, stable across platforms);
//! [`RandomFile`] serves raw entropy files word-by-word and persists a
//! crash-safe consumption ledger so no byte is ever served twice, even
//! across process restarts.
//!
//! Gaussians derive from uniforms via the Marsaglia polar method with the
//! second variate of each accepted pair discarded; the transform is frozen
//! so file-based entropy consumption is reproducible byte-for-byte.
//!
//! Sources are stateful and accessed by a single consumer at a time;
//! parallel sampling should use independent sources (distinct seeds or
//! disjoint file regions).

use std::fs::File;
use std::io::Write;
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::numeric::{self, CMatrix};
use crate::qstate::{QState, RegisterShape};
use crate::symlinalg::{SymMatrix, SymVector};

/// Environment variable selecting a raw entropy file for the CLI and other
/// front ends; the consumption ledger lives at `<path>.ledger`.
pub const RANDOM_FILE_ENV: &str = "QSYM_RANDOM_FILE";

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Stream of randomness behind every sampler.
pub trait EntropySource {
    /// Uniform double in [0, 1) (53-bit resolution).
    fn next_uniform(&mut self) -> Result<f64>;

    /// Standard normal via the Marsaglia polar method (second variate of
    /// each accepted pair discarded).
    fn next_gaussian(&mut self) -> Result<f64> {
        loop {
            let u = 2.0 * self.next_uniform()? - 1.0;
            let v = 2.0 * self.next_uniform()? - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return Ok(u * (-2.0 * s.ln() / s).sqrt());
            }
        }
    }
}

/// Deterministic PRNG source: ChaCha8 keyed by a 64-bit seed; uniforms are
/// `(next_u64() >> 11) * 2^-53`.
pub struct SeededPrng {
    rng: ChaCha8Rng,
}

impl SeededPrng {
    pub fn new(seed: u64) -> Self {
        SeededPrng { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl EntropySource for SeededPrng {
    fn next_uniform(&mut self) -> Result<f64> {
        Ok((self.rng.next_u64() >> 11) as f64 * INV_2_53)
    }
}

/// Off-line true-randomness source: interprets a file as a stream of
/// little-endian 8-byte words mapped to [0, 1) uniforms.
///
/// A sidecar text ledger (`<path>.ledger`) holds the next unread byte
/// offset. It advances monotonically, is persisted with write-then-rename
/// after every draw, and survives process restarts, so consumed bytes are
/// never re-served. A depleted file reports `EntropyExhausted`.
pub struct RandomFile {
    file: File,
    len: u64,
    offset: u64,
    ledger_path: PathBuf,
}

impl RandomFile {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        let ledger_path = ledger_path_for(path);
        let offset = match std::fs::read_to_string(&ledger_path) {
            Ok(text) => text.trim().parse::<u64>().map_err(|_| {
                Error::domain(format!(
                    "corrupt entropy ledger {}",
                    ledger_path.display()
                ))
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e.into()),
        };
        Ok(RandomFile { file, len, offset, ledger_path })
    }

    /// Source selected by the `QSYM_RANDOM_FILE` environment variable, if
    /// set.
    pub fn from_env() -> Result<Option<Self>> {
        match std::env::var_os(RANDOM_FILE_ENV) {
            Some(path) => Ok(Some(RandomFile::open(Path::new(&path))?)),
            None => Ok(None),
        }
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    fn persist_ledger(&self) -> Result<()> {
        let tmp = self.ledger_path.with_extension("ledger.tmp");
        {
            let mut f = File::create(&tmp)?;
            writeln!(f, "{}", self.offset)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &self.ledger_path)?;
        Ok(())
    }
}

pub fn ledger_path_for(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".ledger");
    PathBuf::from(os)
}

impl EntropySource for RandomFile {
    fn next_uniform(&mut self) -> Result<f64> {
        if self.offset + 8 > self.len {
            return Err(Error::EntropyExhausted);
        }
        let mut buf = [0u8; 8];
        self.file.read_exact_at(&mut buf, self.offset)?;
        self.offset += 8;
        self.persist_ledger()?;
        let word = u64::from_le_bytes(buf);
        Ok((word >> 11) as f64 * INV_2_53)
    }
}

/// Complex standard Gaussian (g1 + i g2) / sqrt(2).
pub fn complex_gaussian(src: &mut dyn EntropySource) -> Result<Complex64> {
    let re = src.next_gaussian()?;
    let im = src.next_gaussian()?;
    Ok(Complex64::new(re, im) / Complex64::new(2f64.sqrt(), 0.0))
}

/// Ginibre matrix: independent complex standard Gaussian entries, sampled
/// in row-major order.
pub fn ginibre(rows: usize, cols: usize, src: &mut dyn EntropySource) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            out[(r, c)] = complex_gaussian(src)?;
        }
    }
    Ok(out)
}

/// Haar-random pure state: a normalized Ginibre column.
pub fn random_ket(dim: usize, src: &mut dyn EntropySource) -> Result<QState> {
    if dim < 2 {
        return Err(Error::domain("random_ket needs dim >= 2"));
    }
    let g = ginibre(dim, 1, src)?;
    let norm = g.norm();
    let v = g.map(|z| z / norm);
    QState::pure(
        RegisterShape::new(vec![dim])?,
        SymVector::from_numeric(nalgebra::DVector::from_column_slice(v.as_slice())),
    )
}

/// Complex Householder QR: returns (Q, R) with A = Q R, Q unitary, R upper
/// triangular. The R diagonal carries data-dependent phases; see
/// [`random_unitary`] for the correction that makes Q R sampling Haar.
fn householder_qr(mut a: CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut q = CMatrix::identity(n, n);
    for k in 0..n.saturating_sub(1) {
        // reflector for column k below the diagonal
        let mut v = nalgebra::DVector::<Complex64>::zeros(n - k);
        for r in k..n {
            v[r - k] = a[(r, k)];
        }
        let norm = v.norm();
        if norm < 1e-300 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() < 1e-300 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // alpha = -e^{i arg(x0)} ||x||: the classic choice, leaving a
        // non-uniform phase on r_kk
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm < 1e-300 {
            continue;
        }
        let v = v.map(|z| z / vnorm);
        // apply H = I - 2 v v† to the trailing block of A
        for col in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for r in k..n {
                dot += v[r - k].conj() * a[(r, col)];
            }
            for r in k..n {
                a[(r, col)] -= 2.0 * v[r - k] * dot;
            }
        }
        // accumulate Q = Q H (columns k.. of Q)
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for cc in k..n {
                dot += q[(row, cc)] * v[cc - k];
            }
            for cc in k..n {
                q[(row, cc)] -= 2.0 * dot * v[cc - k].conj();
            }
        }
    }
    (q, a)
}

/// Haar-random unitary: QR-factorize a Ginibre matrix, then multiply Q by
/// the phases of the R diagonal (`Λ = diag(r_kk / |r_kk|)`, `U = Q Λ`) so
/// the effective R has a positive diagonal. Plain QR output is *not*
/// Haar-distributed; the phase correction is essential.
pub fn random_unitary(dim: usize, src: &mut dyn EntropySource) -> Result<SymMatrix> {
    if dim < 2 {
        return Err(Error::domain("random_unitary needs dim >= 2"));
    }
    let g = ginibre(dim, dim, src)?;
    let (q, r) = householder_qr(g);
    let mut u = q;
    for k in 0..dim {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() < 1e-300 {
            Complex64::new(1.0, 0.0)
        } else {
            rkk / rkk.norm()
        };
        for row in 0..dim {
            u[(row, k)] *= phase;
        }
    }
    Ok(SymMatrix::from_numeric(u))
}

/// Negative control for the Haar construction: the raw Householder Q of a
/// Ginibre matrix, without the R-diagonal phase correction. This is
/// unitary but *not* Haar-distributed (its eigenvalue angles cluster);
/// kept public so tests can demonstrate why the correction in
/// [`random_unitary`] is required.
pub fn random_unitary_uncorrected(dim: usize, src: &mut dyn EntropySource) -> Result<SymMatrix> {
    if dim < 2 {
        return Err(Error::domain("random_unitary needs dim >= 2"));
    }
    let g = ginibre(dim, dim, src)?;
    let (q, _) = householder_qr(g);
    Ok(SymMatrix::from_numeric(q))
}

/// Number of resampling attempts before a singular marginal aborts
/// [`random_dynamical_matrix`].
pub const SINGULAR_MARGINAL_ATTEMPTS: usize = 8;

/// Random CPTP channel from the Ginibre-induced measure: W = G G† with G a
/// (dim^2) x kraus_rank Ginibre block, Y = Tr_out W, and Choi
/// D = (I ⊗ Y^{-1/2}) W (I ⊗ Y^{-1/2}).
///
/// Marginals with an eigenvalue below 1e-12 are resampled up to
/// [`SINGULAR_MARGINAL_ATTEMPTS`] times before reporting
/// `SingularMarginal`.
pub fn random_dynamical_matrix(
    dim: usize,
    kraus_rank: usize,
    src: &mut dyn EntropySource,
) -> Result<Channel> {
    if dim < 2 {
        return Err(Error::domain("random_dynamical_matrix needs dim >= 2"));
    }
    if kraus_rank < 1 || kraus_rank > dim * dim {
        return Err(Error::domain(format!(
            "kraus_rank {kraus_rank} outside 1..={}",
            dim * dim
        )));
    }
    let shape = RegisterShape::new(vec![dim, dim])?;
    for _ in 0..SINGULAR_MARGINAL_ATTEMPTS {
        let g = ginibre(dim * dim, kraus_rank, src)?;
        let w = &g * g.adjoint();
        // Y = partial trace of W over the output (first) factor
        let y = crate::qstate::partial_trace_matrix(
            &SymMatrix::from_numeric(w.clone()),
            &shape,
            &[1],
        )?
        .to_numeric()?;
        let y_inv_sqrt = match numeric::hermitian_inv_sqrt(&y, 1e-12) {
            Ok(m) => m,
            Err(Error::SingularMarginal) => continue,
            Err(e) => return Err(e),
        };
        let corrector = numeric::identity(dim).kronecker(&y_inv_sqrt);
        let choi = &corrector * w * corrector.adjoint();
        return Channel::from_choi(SymMatrix::from_numeric(choi), dim, dim, true);
    }
    Err(Error::SingularMarginal)
}

#[cfg(test)]
mod tests;
