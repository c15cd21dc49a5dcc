//! Quantum weight enumerators.
//!
//! `A_j = K^-2 sum_{wt O = j} |Tr(O P)|^2` and
//! `B_j = K^-1 sum_{wt O = j} Tr(O P O^dagger P)`, summed over all `4^n`
//! Pauli words. With `T = Psi^dagger O Psi` both traces come from the `K x K`
//! block: `Tr(O P) = tr T` and `Tr(O P O P) = sum |T_ij|^2`.

use std::fmt;
use std::io::Write;

use crate::codespace::{dotc, CodeSubspace};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, pairwise_sum, Execution};
use crate::pauli::{PauliString, C64};

/// Largest register for which the full Pauli sum is attempted.
pub const MAX_ENUMERATOR_QUBITS: usize = 8;

/// Coefficients `A_0..A_n` and `B_0..B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEnumerator {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl WeightEnumerator {
    /// `A_1 + A_2`, which equals `lambda*^2` for a distance-3 code.
    pub fn lambda_star_sq(&self) -> f64 {
        self.a.get(1).copied().unwrap_or(0.0) + self.a.get(2).copied().unwrap_or(0.0)
    }

    /// Largest coefficientwise difference to `other`.
    pub fn max_deviation(&self, other: &WeightEnumerator) -> f64 {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with header `j,A_j,B_j`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["j", "A_j", "B_j"])?;
        for j in 0..=self.n {
            out.write_record([
                j.to_string(),
                format!("{:.15e}", self.a[j]),
                format!("{:.15e}", self.b[j]),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// The two polynomials in `z`, coefficients rounded to `digits` decimals.
    pub fn polynomials(&self, digits: usize) -> (String, String) {
        (poly(&self.a, digits), poly(&self.b, digits))
    }
}

impl fmt::Display for WeightEnumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.polynomials(6);
        writeln!(f, "A(z) = {a}")?;
        write!(f, "B(z) = {b}")
    }
}

fn poly(coeffs: &[f64], digits: usize) -> String {
    let tol = 0.5 * 10f64.powi(-(digits as i32));
    let mut out = String::new();
    for (j, &c) in coeffs.iter().enumerate() {
        if c.abs() < tol {
            continue;
        }
        let mag = format!("{:.*}", digits, c.abs());
        let mag = mag.trim_end_matches('0').trim_end_matches('.');
        let sign = if c < 0.0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        match j {
            0 => out.push_str(mag),
            1 => out.push_str(&format!("{mag} z")),
            _ => out.push_str(&format!("{mag} z^{j}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn weight_enumerators(code: &CodeSubspace) -> Result<WeightEnumerator> {
    weight_enumerators_with(code, Execution::default())
}

pub fn weight_enumerators_with(code: &CodeSubspace, exec: Execution) -> Result<WeightEnumerator> {
    let n = code.n();
    if n > MAX_ENUMERATOR_QUBITS {
        return Err(Error::Capacity {
            what: "qubit count for weight enumerators",
            value: n,
            limit: MAX_ENUMERATOR_QUBITS,
        });
    }
    let k = code.k();
    let dim = code.dim();
    let cols: Vec<&[C64]> = (0..k).map(|j| code.column(j)).collect();
    let words = 1usize << (2 * n);
    let terms = map_indexed(words, exec, |idx| {
        let word = PauliString::from_index(n, idx as u64);
        let mut image = vec![C64::new(0.0, 0.0); dim];
        let mut trace = C64::new(0.0, 0.0);
        let mut frob = 0.0;
        for j in 0..k {
            word.apply(cols[j], &mut image);
            for (i, col) in cols.iter().enumerate() {
                let t = dotc(col, &image);
                frob += t.norm_sqr();
                if i == j {
                    trace += t;
                }
            }
        }
        (word.weight(), trace.norm_sqr(), frob)
    });
    let mut a_terms = vec![Vec::new(); n + 1];
    let mut b_terms = vec![Vec::new(); n + 1];
    for (w, a, b) in terms {
        a_terms[w].push(a);
        b_terms[w].push(b);
    }
    let kf = k as f64;
    Ok(WeightEnumerator {
        n,
        a: a_terms
            .iter()
            .map(|t| pairwise_sum(t) / (kf * kf))
            .collect(),
        b: b_terms.iter().map(|t| pairwise_sum(t) / kf).collect(),
    })
}

/// Closed forms for the ((7,2,3)) cyclic family.
pub fn closed_form_723(lambda_star: f64) -> WeightEnumerator {
    let l2 = lambda_star * lambda_star;
    WeightEnumerator {
        n: 7,
        a: vec![1.0, 0.0, l2, 0.0, 21.0 - 2.0 * l2, 0.0, 42.0 + l2, 0.0],
        b: vec![
            1.0,
            0.0,
            l2,
            3.0 * (7.0 + l2),
            21.0 - 2.0 * l2,
            6.0 * (21.0 - l2),
            42.0 + l2,
            3.0 * (15.0 + l2),
        ],
    }
}

/// Closed forms for the single-parameter ((6,2,3)) family.
pub fn closed_form_623(theta: f64) -> WeightEnumerator {
    let c2 = (2.0 * theta).cos();
    let c4 = (4.0 * theta).cos();
    let t = 3.0 / 16.0 * c2 + 5.0 / 64.0 * c4;
    WeightEnumerator {
        n: 6,
        a: vec![
            1.0,
            0.0,
            t + 47.0 / 64.0,
            -t + 17.0 / 64.0,
            -t + 721.0 / 64.0,
            t + 1007.0 / 64.0,
            3.0,
        ],
        b: vec![
            1.0,
            0.0,
            t + 47.0 / 64.0,
            2.0 * t + 751.0 / 32.0,
            -4.0 * t + 577.0 / 16.0,
            -2.0 * t + 1297.0 / 32.0,
            3.0 * t + 1677.0 / 64.0,
        ],
    }
}
