//! ((7,2,3)) codes: permutation-invariant endpoints and the cyclic family
//! interpolating down to the Steane code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dicke;
use crate::codespace::CodeSubspace;
use crate::error::{Error, Result};
use crate::pauli::{ErrorBasis, C64};

const N723: usize = 7;
const FULL: usize = (1 << N723) - 1;
/// Residual bound for accepting cyclic coefficients.
pub const COEFF_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '+' => Ok(Branch::Plus),
            '-' | '\u{2212}' => Ok(Branch::Minus),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

/// Parses a two-character branch label such as `"+-"` (c1 sign, then c3 sign).
pub fn parse_branch_pair(text: &str) -> Result<(Branch, Branch)> {
    let chars: Vec<char> = text.trim().chars().collect();
    match chars.as_slice() {
        [a, b] => Ok((Branch::from_char(*a)?, Branch::from_char(*b)?)),
        _ => Err(Error::UnknownName(text.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermVariant {
    Plus,
    Minus,
}

impl FromStr for PermVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(PermVariant::Plus),
            "minus" | "-" => Ok(PermVariant::Minus),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// `|0_L> = (sqrt15 D0 -+ sqrt7 D2 + sqrt21 D4 +- sqrt21 D6)/8`, `|1_L> = X^7 |0_L>`.
pub fn perm_code_723(variant: PermVariant) -> Result<CodeSubspace> {
    let sign = match variant {
        PermVariant::Plus => 1.0,
        PermVariant::Minus => -1.0,
    };
    let terms = [
        (0, 15f64.sqrt()),
        (2, -sign * 7f64.sqrt()),
        (4, 21f64.sqrt()),
        (6, sign * 21f64.sqrt()),
    ];
    let mut zero = vec![C64::new(0.0, 0.0); 1 << N723];
    for (k, coeff) in terms {
        for (z, d) in zero.iter_mut().zip(dicke(N723, k)?) {
            *z += d * (coeff / 8.0);
        }
    }
    logical_pair(zero)
}

fn logical_pair(zero: Vec<C64>) -> Result<CodeSubspace> {
    let one: Vec<C64> = (0..zero.len()).map(|b| zero[FULL - b]).collect();
    CodeSubspace::new(N723, vec![zero, one])
}

/// Orbit representatives of the cyclic basis, `q1` leftmost.
pub const CYCLIC_REPRESENTATIVES: [&str; 10] = [
    "0000000", "0000011", "0000101", "0001001", "0001111", "0011011", "0011101", "0101011",
    "0010111", "0111111",
];

fn rotate(b: usize) -> usize {
    ((b << 1) | (b >> (N723 - 1))) & FULL
}

/// Normalized uniform superpositions over the cyclic orbits of the representatives.
pub fn cyclic_basis_723() -> Vec<Vec<C64>> {
    CYCLIC_REPRESENTATIVES
        .iter()
        .map(|rep| {
            let start = usize::from_str_radix(rep, 2).expect("binary literal");
            let mut orbit = vec![start];
            let mut b = rotate(start);
            while b != start {
                orbit.push(b);
                b = rotate(b);
            }
            let amp = 1.0 / (orbit.len() as f64).sqrt();
            let mut v = vec![C64::new(0.0, 0.0); 1 << N723];
            for b in orbit {
                v[b] = C64::new(amp, 0.0);
            }
            v
        })
        .collect()
}

/// Coefficients `(c0, .., c4)` of the cyclic parameterization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicCoeffs {
    pub c: [f64; 5],
    pub branch_c1: Branch,
    pub branch_c3: Branch,
}

impl CyclicCoeffs {
    /// Closed-form solution with `lambda* in [0, sqrt 7]`; `branch_c1`
    /// is the sign of `c1`, `branch_c3` the sign in front of the root in `c3`.
    pub fn from_lambda(lambda_star: f64, branch_c1: Branch, branch_c3: Branch) -> Result<Self> {
        let s7 = 7f64.sqrt();
        if !(0.0..=s7 + 1e-12).contains(&lambda_star) {
            return Err(Error::Domain(format!(
                "lambda* = {lambda_star} outside [0, sqrt 7]"
            )));
        }
        let lam = lambda_star.min(s7);
        let c0 = (s7 * lam + 8.0).sqrt() / 8.0;
        let c1 = branch_c1.sign() * (s7 * lam).sqrt() / 8.0;
        let c4 = -(3f64.sqrt()) * c1;
        let mut disc = 7.0 * c0 * c0 - 15.0 * s7 * lam / 64.0;
        if disc < 0.0 {
            if disc < -1e-12 {
                return Err(Error::Domain(format!(
                    "negative discriminant {disc:e} at lambda* = {lambda_star}"
                )));
            }
            disc = 0.0;
        }
        let c3 = 0.4 * (s7 * c0 + branch_c3.sign() * disc.sqrt());
        let c2 = -2.0 * c3 + s7 * c0;
        Ok(CyclicCoeffs {
            c: [c0, c1, c2, c3, c4],
            branch_c1,
            branch_c3,
        })
    }

    pub fn residuals(&self) -> EliminationReport {
        elimination_residuals(&self.c)
    }
}

/// Residuals of the normalization and KL constraints on `(c0..c4)` and of
/// the quartic in `(c1, c4)` obtained by eliminating the rest.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EliminationReport {
    /// Normalization, diagonal balance and the two off-diagonal constraints.
    pub e: [f64; 4],
    /// Difference and half-sum of the two off-diagonal constraints.
    pub e5: f64,
    pub e6: f64,
    /// Quartic evaluated expanded and factored.
    pub quartic: f64,
    pub quartic_factored: f64,
    /// The linear factor `c4 + sqrt3 c1`.
    pub linear_factor: f64,
    /// Left minus right side of the intermediate relation, equal to `quartic / 56`.
    pub e18: f64,
}

impl EliminationReport {
    pub fn max_constraint(&self) -> f64 {
        self.e.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

pub fn elimination_residuals(c: &[f64; 5]) -> EliminationReport {
    let [c0, c1, c2, c3, c4] = *c;
    let (s3, s7) = (3f64.sqrt(), 7f64.sqrt());
    let e1 = c.iter().map(|x| x * x).sum::<f64>() - 1.0;
    let e2 = 7.0 * c0 * c0 + 3.0 * c1 * c1 - c2 * c2 - c3 * c3 - 5.0 * c4 * c4;
    let common = 2.0 * s7 * c0 * c4 + 2.0 * s3 * c1 * c2 + 4.0 * s3 * c1 * c3;
    let tail = 4.0 * s3 * c1 * c4 + 4.0 * c2 * c3 + 3.0 * c3 * c3;
    let e3 = common + tail;
    let e4 = common - tail;
    let e5 = tail;
    let e6 = s7 * c0 * c4 + s3 * c1 * c2 + 2.0 * s3 * c1 * c3;
    let quartic = 28.0 * c4.powi(4)
        + (7.0 + 8.0 * c1 * c1) * c4 * c4
        + 96.0 * s3 * c1.powi(3) * c4
        + (12.0 * c1.powi(4) - 21.0 * c1 * c1);
    let cubic = 28.0 * c4.powi(3) - 28.0 * s3 * c1 * c4 * c4
        + (92.0 * c1 * c1 + 7.0) * c4
        + s3 * (4.0 * c1.powi(3) - 7.0 * c1);
    let linear_factor = c4 + s3 * c1;
    let lhs = (0.125 - c1 * c1 / 2.0 + c4 * c4 / 2.0) * c4 * c4;
    let rhs = 3.0 / 7.0 * c1 * c1 * (0.875 - c1 * c1 / 2.0 - 1.5 * c4 * c4 - 4.0 * s3 * c1 * c4);
    EliminationReport {
        e: [e1, e2, e3, e4],
        e5,
        e6,
        quartic,
        quartic_factored: linear_factor * cubic,
        linear_factor,
        e18: lhs - rhs,
    }
}

/// `|0_L> = c0|{0}> + c1/sqrt3 (three weight-2 orbits) + c2|{0010111}>
/// + c3/2 (four weight-4 orbits) + c4|{0111111}>`, `|1_L> = X^7 |0_L>`.
pub fn cyclic_code_723(coeffs: &CyclicCoeffs) -> Result<CodeSubspace> {
    let report = coeffs.residuals();
    if report.max_constraint() > COEFF_TOL {
        return Err(Error::InvalidCoefficients(report.e));
    }
    let [c0, c1, c2, c3, c4] = coeffs.c;
    let weights = [
        c0,
        c1 / 3f64.sqrt(),
        c1 / 3f64.sqrt(),
        c1 / 3f64.sqrt(),
        c3 / 2.0,
        c3 / 2.0,
        c3 / 2.0,
        c3 / 2.0,
        c2,
        c4,
    ];
    let mut zero = vec![C64::new(0.0, 0.0); 1 << N723];
    for (state, w) in cyclic_basis_723().iter().zip(weights) {
        for (z, s) in zero.iter_mut().zip(state) {
            *z += s * w;
        }
    }
    let code = logical_pair(zero)?;
    let violation = code.kl_violation(&ErrorBasis::new(N723, 3)?)?;
    if violation > COEFF_TOL {
        return Err(Error::Construction(violation));
    }
    Ok(code)
}

/// Spectrum of `(1-s) I + s J` on `dim` coordinates: `1-s` (dim-1 times), then `1 + (dim-1) s`.
pub fn all_equal_block_eigenvalues(dim: usize, s: f64) -> Vec<f64> {
    let mut out = vec![1.0 - s; dim.saturating_sub(1)];
    out.push(1.0 + (dim as f64 - 1.0) * s);
    out
}
