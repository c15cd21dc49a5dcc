//! Stabilizer codes from generator lists.

use std::io::BufRead;

use crate::codespace::{dotc, CodeSubspace};
use crate::error::{Error, Result};
use crate::pauli::{PhasedPauli, C64, MAX_DENSE_QUBITS};

const STEANE: [&str; 6] = [
    "XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ", "IIIZZZZ",
];

const SHAW623: [&str; 5] = ["YIZXXY", "ZXIIXZ", "IZXXXX", "IIIZIZ", "ZZZIZI"];

/// Names accepted by [`StabilizerCode::builtin`].
pub const BUILTIN_NAMES: [&str; 2] = ["steane", "shaw623"];

/// A validated list of commuting, independent, Hermitian Pauli generators.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<PhasedPauli>,
}

impl StabilizerCode {
    /// Validates the generators. Pairs and indices in errors are 1-based rows.
    pub fn new(generators: Vec<PhasedPauli>) -> Result<Self> {
        let n = generators
            .first()
            .map(|g| g.n())
            .ok_or_else(|| Error::Domain("no generators given".into()))?;
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: g.n(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::Validation(format!(
                    "generator {} has non-Hermitian phase {}",
                    i + 1,
                    g.phase
                )));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].word.commutes_with(&generators[j].word) {
                    return Err(Error::Anticommuting {
                        first: i + 1,
                        second: j + 1,
                    });
                }
            }
        }
        // GF(2) elimination on the symplectic (x | z) vectors
        let mut pivots: Vec<u128> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            let mut v = (g.word.x_mask() as u128) << 64 | g.word.z_mask() as u128;
            for &p in &pivots {
                let lead = 1u128 << (127 - p.leading_zeros());
                if v & lead != 0 {
                    v ^= p;
                }
            }
            if v == 0 {
                return Err(Error::DependentGenerator { index: i + 1 });
            }
            pivots.push(v);
            pivots.sort_unstable_by(|a, b| b.cmp(a));
        }
        Ok(StabilizerCode { n, generators })
    }

    /// Parses rows such as `"XIXIXIX"`, `"- Z Z I"` or `"+ZZI"`.
    pub fn parse_generators<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let gens = rows
            .iter()
            .map(|row| parse_row(row.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        StabilizerCode::new(gens)
    }

    /// Reads one generator per line; blank lines and `#` comments are skipped.
    pub fn read_generators<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                rows.push(body.to_string());
            }
        }
        StabilizerCode::parse_generators(&rows)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "steane" => StabilizerCode::parse_generators(&STEANE),
            "shaw623" => StabilizerCode::parse_generators(&SHAW623),
            _ => Err(Error::UnknownName(name.to_string())),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PhasedPauli] {
        &self.generators
    }

    /// Code dimension `2^(n - #generators)`.
    pub fn k(&self) -> usize {
        1 << (self.n - self.generators.len())
    }

    /// `prod_g (I + g)/2` applied in place.
    pub fn project(&self, state: &mut [C64]) {
        let mut image = vec![C64::new(0.0, 0.0); state.len()];
        for g in &self.generators {
            g.word.apply(state, &mut image);
            let phase = g.phase.to_complex();
            for (s, gi) in state.iter_mut().zip(&image) {
                *s = (*s + phase * gi) * 0.5;
            }
        }
    }

    /// Orthonormal basis of the joint +1 eigenspace.
    ///
    /// Columns are `P|b>` normalized, picked greedily by largest residual
    /// norm (ties to the lowest `b`) and orthogonalized against earlier picks.
    pub fn codespace(&self) -> Result<CodeSubspace> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                value: self.n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let k = self.k();
        let zero = C64::new(0.0, 0.0);
        let projected = |b: usize| {
            let mut v = vec![zero; dim];
            v[b] = C64::new(1.0, 0.0);
            self.project(&mut v);
            v
        };
        // <b|P|b> = |P|b>|^2, reduced by |<q|b>|^2 for every chosen q
        let mut residual: Vec<f64> = (0..dim)
            .map(|b| projected(b).iter().map(|c| c.norm_sqr()).sum())
            .collect();
        let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(k);
        while chosen.len() < k {
            let (b, best) =
                residual
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| {
                        if r > acc.1 + 1e-12 {
                            (i, r)
                        } else {
                            acc
                        }
                    });
            if best < 1e-8 {
                return Err(Error::Inconsistent {
                    expected: k,
                    found: chosen.len(),
                });
            }
            let mut v = projected(b);
            for _ in 0..2 {
                for q in &chosen {
                    let overlap = dotc(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= overlap * qi;
                    }
                }
            }
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|c| *c /= norm);
            for (r, c) in residual.iter_mut().zip(&v) {
                *r -= c.norm_sqr();
            }
            chosen.push(v);
        }
        CodeSubspace::new(self.n, chosen)
    }
}

fn parse_row(row: &str) -> Result<PhasedPauli> {
    let compact: String = row.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse()
}
