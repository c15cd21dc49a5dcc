//! Exact n-qubit Pauli algebra.
//!
//! Words are stored as a pair of bit masks (`x`, `z`). Qubit 1 is the leftmost
//! letter of the text form and the most significant bit of a computational
//! basis index, so `|q1 q2 ... qn>` has index `sum_k q_k 2^(n-k)`.
//!
//! Phases are tracked exactly as powers of `i`; no floating point enters the
//! group law.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest register for which a dense matrix is ever materialized.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Largest register a [`PauliString`] can address.
pub const MAX_QUBITS: usize = 64;

/// A single-qubit Pauli letter, ordered `I < X < Y < Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-site product `self * other` as (power of i, letter).
    fn product(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    /// 2x2 matrix in the computational basis.
    pub fn matrix(self) -> nalgebra::Matrix2<C64> {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => nalgebra::Matrix2::new(l, o, o, l),
            Pauli::X => nalgebra::Matrix2::new(o, l, l, o),
            Pauli::Y => nalgebra::Matrix2::new(o, -i, i, o),
            Pauli::Z => nalgebra::Matrix2::new(l, o, o, -l),
        }
    }
}

/// A scalar in `{+1, +i, -1, -i}`, stored as the exponent of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(power: u8) -> Self {
        Phase(power % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// A phase-free n-qubit Pauli word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n),
            "register size {n} out of range"
        );
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        if n == 0 {
            return Err(Error::Domain("empty Pauli word".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                value: n,
                limit: MAX_QUBITS,
            });
        }
        let mut word = PauliString::identity(n);
        for (k, &p) in letters.iter().enumerate() {
            word.set(k + 1, p);
        }
        Ok(word)
    }

    /// Word with letter `p` on each of the given 1-based `sites`, identity elsewhere.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut word = PauliString::identity(n);
        for &(site, p) in sites {
            if site == 0 || site > n {
                return Err(Error::Domain(format!("qubit {site} outside 1..={n}")));
            }
            word.set(site, p);
        }
        Ok(word)
    }

    /// The word whose base-4 digits (I=0, X=1, Y=2, Z=3, qubit 1 most
    /// significant) spell `index`. Enumerating `0..4^n` visits every word in
    /// lexicographic order.
    pub fn from_index(n: usize, mut index: u64) -> Self {
        let mut word = PauliString::identity(n);
        for k in (1..=n).rev() {
            let p = match index & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            word.set(k, p);
            index >>= 2;
        }
        word
    }

    fn bit(&self, site: usize) -> u64 {
        1u64 << (self.n - site)
    }

    fn set(&mut self, site: usize, p: Pauli) {
        let b = self.bit(site);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Letter on 1-based `site`.
    pub fn get(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (1..=self.n).map(|k| self.get(k)).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// 1-based sites carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.n).filter(|&k| self.get(k) != Pauli::I).collect()
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Whether the two words commute (even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let overlap = (self.x & other.z) ^ (self.z & other.x);
        overlap.count_ones() % 2 == 0
    }

    /// Base-4 lexicographic key; see [`PauliString::from_index`].
    pub fn lex_index(&self) -> u64 {
        (1..=self.n).fold(0u64, |acc, k| {
            let d = match self.get(k) {
                Pauli::I => 0,
                Pauli::X => 1,
                Pauli::Y => 2,
                Pauli::Z => 3,
            };
            (acc << 2) | d
        })
    }

    /// Phase picked up by basis state `b`: `O|b> = phase(b) |b ^ x>`.
    #[inline]
    fn phase_on(&self, b: usize, base: C64) -> C64 {
        if (b as u64 & self.z).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    #[inline]
    fn y_phase(&self) -> C64 {
        Phase::from_power((self.y_count() % 4) as u8).to_complex()
    }

    /// `dst = O src` on a 2^n amplitude vector.
    pub fn apply(&self, src: &[C64], dst: &mut [C64]) {
        debug_assert_eq!(src.len(), 1usize << self.n);
        debug_assert_eq!(dst.len(), src.len());
        let base = self.y_phase();
        let x = self.x as usize;
        for (b, &amp) in src.iter().enumerate() {
            dst[b ^ x] = self.phase_on(b, base) * amp;
        }
    }

    /// `<bra| O |ket>` without materializing `O |ket>`.
    pub fn sandwich(&self, bra: &[C64], ket: &[C64]) -> C64 {
        let base = self.y_phase();
        let x = self.x as usize;
        let mut acc = C64::new(0.0, 0.0);
        for (b, &amp) in ket.iter().enumerate() {
            acc += bra[b ^ x].conj() * self.phase_on(b, base) * amp;
        }
        acc
    }

    /// Dense `2^n x 2^n` realization, built as an iterated Kronecker product.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count for dense matrices",
                value: self.n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let mut out = CMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for k in 1..=self.n {
            let m = self.get(k).matrix();
            let site = CMatrix::from_iterator(2, 2, m.iter().copied());
            out = out.kronecker(&site);
        }
        Ok(out)
    }
}

impl Ord for PauliString {
    /// Weight first, then lexicographic on letters with `I < X < Y < Z`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.weight().cmp(&other.weight()))
            .then(self.lex_index().cmp(&other.lex_index()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.n {
            write!(f, "{}", self.get(k).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .enumerate()
            .map(|(position, c)| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                found => Err(Error::Parse { position, found }),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_letters(&letters)
    }
}

/// A Pauli word with an exact phase in `{+1, +i, -1, -i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: Phase,
    pub word: PauliString,
}

impl PhasedPauli {
    pub fn new(phase: Phase, word: PauliString) -> Self {
        PhasedPauli { phase, word }
    }

    pub fn n(&self) -> usize {
        self.word.n()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Group product `self * other`.
    pub fn multiply(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        let n = self.n();
        if other.n() != n {
            return Err(Error::Dimension {
                expected: n,
                found: other.n(),
            });
        }
        let mut power = self.phase.power() + other.phase.power();
        let mut word = PauliString::identity(n);
        for k in 1..=n {
            let (p, letter) = self.word.get(k).product(other.word.get(k));
            power += p;
            word.set(k, letter);
        }
        Ok(PhasedPauli {
            phase: Phase::from_power(power),
            word,
        })
    }

    pub fn dense_matrix(&self) -> Result<CMatrix> {
        Ok(self.word.dense_matrix()? * self.phase.to_complex())
    }
}

impl From<PauliString> for PhasedPauli {
    fn from(word: PauliString) -> Self {
        PhasedPauli::new(Phase::ONE, word)
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase, self.word)
    }
}

impl FromStr for PhasedPauli {
    type Err = Error;

    /// Accepts an optional prefix `+`, `+i`, `-`, `-i` (the Unicode minus
    /// sign is accepted as well) followed by the letters.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (sign, rest) = if let Some(r) = text.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = text.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = text.strip_prefix('\u{2212}') {
            (2, r)
        } else {
            (0, text)
        };
        let (imag, letters) = match rest.strip_prefix('i') {
            Some(r) => (1u8, r),
            None => (0, rest),
        };
        let offset = text.len() - letters.len();
        let word = letters.parse::<PauliString>().map_err(|e| match e {
            Error::Parse { position, found } => Error::Parse {
                position: position + offset,
                found,
            },
            other => other,
        })?;
        Ok(PhasedPauli::new(Phase::from_power(sign + imag), word))
    }
}

/// Number of Pauli words with `0 < weight < d` on `n` qubits.
pub fn error_basis_size(n: usize, d: usize) -> usize {
    (1..d.min(n + 1))
        .map(|w| binomial(n, w) * 3usize.pow(w as u32))
        .sum()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The canonical error operators `{O : 0 < wt(O) < d}` in (weight, lexicographic) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorBasis {
    n: usize,
    d: usize,
    ops: Vec<PauliString>,
}

impl ErrorBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Domain(format!("qubit count {n} out of range")));
        }
        if d < 2 {
            return Err(Error::Domain(format!(
                "distance {d} < 2 has no correctable error set"
            )));
        }
        if d > n + 1 {
            return Err(Error::Domain(format!(
                "distance {d} exceeds n + 1 = {}",
                n + 1
            )));
        }
        let mut ops = Vec::with_capacity(error_basis_size(n, d));
        let mut sites = Vec::new();
        for w in 1..d {
            push_weight_class(n, w, 1, &mut sites, &mut ops);
        }
        ops.sort();
        Ok(ErrorBasis { n, d, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[PauliString] {
        &self.ops
    }

    pub fn get(&self, index: usize) -> &PauliString {
        &self.ops[index]
    }

    pub fn position(&self, word: &PauliString) -> Option<usize> {
        self.ops.binary_search(word).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliString> {
        self.ops.iter()
    }
}

/// Appends every word of weight `w` supported on sites chosen from `start..=n`.
fn push_weight_class(
    n: usize,
    w: usize,
    start: usize,
    sites: &mut Vec<usize>,
    out: &mut Vec<PauliString>,
) {
    if sites.len() == w {
        for mut code in 0..3usize.pow(w as u32) {
            let mut word = PauliString::identity(n);
            for &s in sites.iter().rev() {
                let p = [Pauli::X, Pauli::Y, Pauli::Z][code % 3];
                code /= 3;
                word.set(s, p);
            }
            out.push(word);
        }
        return;
    }
    for s in start..=n {
        sites.push(s);
        push_weight_class(n, w, s + 1, sites, out);
        sites.pop();
    }
}

/// Hermiticity defect `max |M - M^dagger|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|c| c.norm()).fold(0.0, f64::max)
}
