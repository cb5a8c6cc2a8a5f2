use crate::error::{Error, Result};
use crate::linalg::{qubit_count, trace, Pauli};
use crate::scalar::{cr, lit, CMatrix, Real};
use std::fmt;

/// Tensor product of Paulis, written most significant site first ("ZII"
/// acts with Z on the highest site).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn parse(text: &str) -> Result<Self> {
        let ops: Option<Vec<_>> = text.chars().map(Pauli::from_char).collect();
        match ops {
            Some(ops) if !ops.is_empty() => Ok(PauliString(ops)),
            _ => Err(Error::InvalidArgument(format!("bad Pauli string {text:?}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pauli acting on `site` (site 0 is the last character).
    pub fn on_site(&self, site: usize) -> Pauli {
        self.0[self.0.len() - 1 - site]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| *p == Pauli::I)
    }

    /// Sites carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.on_site(s) != Pauli::I).collect()
    }

    pub fn matrix<T: Real>(&self) -> CMatrix<T> {
        self.0.iter().fold(CMatrix::<T>::identity(1, 1), |acc, p| acc.kronecker(&p.matrix::<T>()))
    }

    /// Whether two strings commute (even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    pub coefficient: T,
    pub string: PauliString,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(coefficient: T, string: &str) -> Result<Self> {
        Ok(PauliTerm { coefficient, string: PauliString::parse(string)? })
    }
}

/// `sum_k c_k P_k` as a dense matrix.
pub fn reconstruct<T: Real>(terms: &[PauliTerm<T>]) -> Result<CMatrix<T>> {
    let first = terms.first().ok_or_else(|| Error::InvalidArgument("no Pauli terms".into()))?;
    let dim = 1usize << first.string.len();
    let mut out = CMatrix::<T>::zeros(dim, dim);
    for term in terms {
        if term.string.len() != first.string.len() {
            return Err(Error::InvalidArgument("Pauli strings of different lengths".into()));
        }
        out += term.string.matrix::<T>() * cr(term.coefficient);
    }
    Ok(out)
}

/// Projects a Hermitian matrix onto all Pauli strings, keeping the terms
/// whose coefficient magnitude exceeds `cutoff`.
pub fn pauli_decompose<T: Real>(h: &CMatrix<T>, cutoff: T) -> Result<Vec<PauliTerm<T>>> {
    let n = qubit_count(h.nrows())?;
    let norm: T = lit(1.0 / h.nrows() as f64);
    let mut terms = Vec::new();
    for code in 0..(1usize << (2 * n)) {
        let ops: Vec<Pauli> = (0..n)
            .rev()
            .map(|s| match (code >> (2 * s)) & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        let string = PauliString(ops);
        let c = trace(&(string.matrix::<T>() * h)).re * norm;
        if c.abs() > cutoff {
            terms.push(PauliTerm { coefficient: c, string });
        }
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn string_order_is_msb_first() {
        let s = PauliString::parse("ZIX").unwrap();
        assert_eq!(s.on_site(0), Pauli::X);
        assert_eq!(s.on_site(2), Pauli::Z);
        assert_eq!(s.support(), vec![0, 2]);
        assert_eq!(s.to_string(), "ZIX");
    }

    #[test]
    fn decompose_round_trip() {
        let terms = vec![
            PauliTerm::new(0.3, "XY").unwrap(),
            PauliTerm::new(-1.2, "ZI").unwrap(),
            PauliTerm::new(0.7, "II").unwrap(),
        ];
        let h = reconstruct(&terms).unwrap();
        let back = pauli_decompose(&h, 1e-14).unwrap();
        assert_eq!(back.len(), 3);
        assert!(max_abs_diff(&reconstruct(&back).unwrap(), &h) < 1e-14);
    }

    #[test]
    fn commutation() {
        let xx = PauliString::parse("IXX").unwrap();
        let yy = PauliString::parse("IYY").unwrap();
        let zi = PauliString::parse("IZI").unwrap();
        assert!(xx.commutes_with(&yy));
        assert!(!xx.commutes_with(&zi));
    }
}
