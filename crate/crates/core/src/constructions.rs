//! The five trace-function DRCSS families.
//!
//! All five read the quadratic m-sequence `s(t) = Tr(beta^t)` through the
//! bijection `phi`. T1-T3 use `phi(s(..))` to pick a column of the
//! orthogonal matrix `Psi` (row `m` gives flock member `m`); T4-T5 use it as a
//! multiplier of `xi_{q-1}^m`. Matrices are stored as exponent tables.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::finite_field::{make_field, prime_power, ExtensionTower, MSequence, PhiMap};
use crate::orthomatrix::{character_matrix, OrthoMatrix, RootTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Construction {
    T1,
    T2,
    T3,
    T4,
    T5,
}

impl Construction {
    pub const ALL: [Construction; 5] = [Self::T1, Self::T2, Self::T3, Self::T4, Self::T5];

    pub fn name(self) -> &'static str {
        match self {
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::T3 => "T3",
            Self::T4 => "T4",
            Self::T5 => "T5",
        }
    }

    /// Smallest excluded `q`: the family needs `q > min_q_exclusive()`.
    pub fn min_q_exclusive(self) -> u32 {
        match self {
            Self::T1 => 2,
            Self::T2 | Self::T3 | Self::T4 => 3,
            Self::T5 => 4,
        }
    }

    pub fn uses_psi(self) -> bool {
        matches!(self, Self::T1 | Self::T2 | Self::T3)
    }

    /// `(K, M, N)` for a given `q`.
    pub fn shape(self, q: usize) -> (usize, usize, usize) {
        match self {
            Self::T1 => (q + 1, q, q),
            Self::T2 => (q + 1, q, q - 1),
            Self::T3 => (q - 1, q, q + 1),
            Self::T4 => (q - 1, q - 1, q),
            Self::T5 => (q - 1, q - 1, q - 1),
        }
    }

    pub fn alphabet(self, q: u32, p: u32) -> u32 {
        if self.uses_psi() {
            p
        } else {
            q - 1
        }
    }

    /// Maximum off-peak ambiguity magnitude the family guarantees.
    pub fn theta_claim(self, q: u32) -> u32 {
        if self.uses_psi() {
            q
        } else {
            q - 1
        }
    }

    pub fn check_q(self, q: u32) -> Result<()> {
        if q <= self.min_q_exclusive() {
            return Err(Error::ParameterTooSmall {
                construction: self.name(),
                min: self.min_q_exclusive(),
                q,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(Self::T1),
            "T2" | "2" => Ok(Self::T2),
            "T3" | "3" => Ok(Self::T3),
            "T4" | "4" => Ok(Self::T4),
            "T5" | "5" => Ok(Self::T5),
            _ => Err(Error::Malformed(format!("unknown construction {s:?}"))),
        }
    }
}

/// One complementary matrix `C^k`: `M` rows of length `N` over `Z_alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementaryMatrix {
    index_k: usize,
    alphabet: u32,
    exponents: Vec<Vec<u32>>,
}

impl ComplementaryMatrix {
    pub fn new(index_k: usize, alphabet: u32, exponents: Vec<Vec<u32>>) -> Result<Self> {
        let cols = exponents.first().map_or(0, Vec::len);
        if exponents.is_empty() || cols == 0 || exponents.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed(format!(
                "matrix {index_k} is empty or ragged"
            )));
        }
        if alphabet == 0 || exponents.iter().flatten().any(|&e| e >= alphabet) {
            return Err(Error::Malformed(format!(
                "matrix {index_k} has an exponent outside Z_{alphabet}"
            )));
        }
        Ok(Self {
            index_k,
            alphabet,
            exponents,
        })
    }

    pub fn index_k(&self) -> usize {
        self.index_k
    }

    pub fn rows(&self) -> usize {
        self.exponents.len()
    }

    pub fn cols(&self) -> usize {
        self.exponents[0].len()
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn row(&self, m: usize) -> &[u32] {
        &self.exponents[m]
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex64>> {
        let roots = RootTable::new(self.alphabet);
        self.exponents
            .iter()
            .map(|row| row.iter().map(|&e| roots.get(e as i64)).collect())
            .collect()
    }
}

/// A DRCSS together with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    pub construction: Construction,
    pub q: u32,
    pub p: u32,
    pub n: usize,
    /// Base field modulus, ascending coefficients.
    pub modulus: Vec<u32>,
    /// Modulus of the degree-`2n` field holding `beta`.
    pub ext_modulus: Vec<u32>,
    /// Coefficients of `beta` in the extension's polynomial basis.
    pub beta: Vec<u32>,
    pub e: Option<u32>,
    pub phi: Vec<u32>,
    pub psi: Option<OrthoMatrix>,
    pub alphabet: u32,
    pub matrices: Vec<ComplementaryMatrix>,
}

#[allow(non_snake_case)]
#[derive(Serialize, Deserialize)]
struct SequenceSetFile {
    construction: Construction,
    q: u32,
    p: u32,
    n: usize,
    modulus: Vec<u32>,
    ext_modulus: Vec<u32>,
    beta: Vec<u32>,
    K: usize,
    M: usize,
    N: usize,
    alphabet: u32,
    e: Option<u32>,
    phi: Vec<u32>,
    psi: Option<OrthoMatrix>,
    matrices: Vec<Vec<Vec<u32>>>,
}

impl SequenceSet {
    /// `(K, M, N)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        let first = &self.matrices[0];
        (self.matrices.len(), first.rows(), first.cols())
    }

    pub fn to_json(&self) -> String {
        let (k, m, n) = self.shape();
        let file = SequenceSetFile {
            construction: self.construction,
            q: self.q,
            p: self.p,
            n: self.n,
            modulus: self.modulus.clone(),
            ext_modulus: self.ext_modulus.clone(),
            beta: self.beta.clone(),
            K: k,
            M: m,
            N: n,
            alphabet: self.alphabet,
            e: self.e,
            phi: self.phi.clone(),
            psi: self.psi.clone(),
            matrices: self.matrices.iter().map(|c| c.exponents.clone()).collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: SequenceSetFile =
            serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
        let matrices = file
            .matrices
            .into_iter()
            .enumerate()
            .map(|(k, ex)| ComplementaryMatrix::new(k, file.alphabet, ex))
            .collect::<Result<Vec<_>>>()?;
        if matrices.is_empty() {
            return Err(Error::Malformed("set has no matrices".into()));
        }
        let set = Self {
            construction: file.construction,
            q: file.q,
            p: file.p,
            n: file.n,
            modulus: file.modulus,
            ext_modulus: file.ext_modulus,
            beta: file.beta,
            e: file.e,
            phi: file.phi,
            psi: file.psi,
            alphabet: file.alphabet,
            matrices,
        };
        let (_, m, n) = set.shape();
        if set.matrices.iter().any(|c| c.rows() != m || c.cols() != n) {
            return Err(Error::Malformed("matrices differ in shape".into()));
        }
        if set.shape() != (file.K, file.M, file.N) {
            return Err(Error::Malformed(format!(
                "declared shape ({}, {}, {}) does not match matrices {:?}",
                file.K,
                file.M,
                file.N,
                set.shape()
            )));
        }
        Ok(set)
    }

    /// Flat CSV with header `k,m,t,exponent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,m,t,exponent\n");
        for c in &self.matrices {
            for (m, row) in c.exponents.iter().enumerate() {
                for (t, e) in row.iter().enumerate() {
                    out.push_str(&format!("{},{m},{t},{e}\n", c.index_k));
                }
            }
        }
        out
    }
}

/// Builds any of the five families from a quadratic tower.
pub fn construct(
    construction: Construction,
    tower: &ExtensionTower,
    phi: &PhiMap,
    psi: Option<&OrthoMatrix>,
) -> Result<SequenceSet> {
    let q = tower.q() as u32;
    let p = tower.base().p();
    construction.check_q(q)?;
    if tower.degree() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "tower of degree 2".into(),
            got: format!("degree {}", tower.degree()),
        });
    }
    if phi.len() != q as usize {
        return Err(Error::DimensionMismatch {
            expected: format!("phi over {q} elements"),
            got: format!("{} entries", phi.len()),
        });
    }
    let seq = tower.m_sequence();
    let qu = q as usize;
    let (k_count, m_count, n_count) = construction.shape(qu);
    let alphabet = construction.alphabet(q, p);

    let (matrices, e, psi) = if construction.uses_psi() {
        let psi =
            psi.ok_or_else(|| Error::Malformed(format!("{construction} needs a Psi matrix")))?;
        if psi.q() != qu || psi.p() != p {
            return Err(Error::DimensionMismatch {
                expected: format!("{q}x{q} matrix of {p}-th roots"),
                got: format!("{}x{} matrix of {}-th roots", psi.q(), psi.q(), psi.p()),
            });
        }
        // T3 steps k by q+1, T1/T2 by q-1.
        let stride = if construction == Construction::T3 {
            q + 1
        } else {
            q - 1
        } as i64;
        let matrices = (0..k_count)
            .map(|k| {
                let cols: Vec<u32> = (0..n_count)
                    .map(|t| phi.apply(seq.at(k as i64 * stride + t as i64)))
                    .collect();
                let exponents = (0..m_count)
                    .map(|m| cols.iter().map(|&c| psi.exponent(m, c as usize)).collect())
                    .collect();
                ComplementaryMatrix::new(k, alphabet, exponents)
            })
            .collect::<Result<Vec<_>>>()?;
        (matrices, None, Some(psi.clone()))
    } else {
        // Nonzero trace values must stay distinct mod q-1, which holds for a
        // bijection onto Z_q exactly when phi(0) is 0 or q-1.
        let phi_zero = phi.apply(0);
        if phi_zero != 0 && phi_zero != q - 1 {
            return Err(Error::PhiCollision);
        }
        let e = tower.find_zero_exponent()?;
        let matrices = (0..k_count)
            .map(|k| t45_matrix(&seq, phi, q, e, k, m_count, n_count))
            .collect::<Result<Vec<_>>>()?;
        (matrices, Some(e), None)
    };

    Ok(SequenceSet {
        construction,
        q,
        p,
        n: tower.base().n(),
        modulus: tower.base().modulus().to_vec(),
        ext_modulus: tower.ext().modulus().to_vec(),
        beta: tower.beta().coeffs().to_vec(),
        e,
        phi: phi.table().to_vec(),
        psi,
        alphabet,
        matrices,
    })
}

fn t45_matrix(
    seq: &MSequence,
    phi: &PhiMap,
    q: u32,
    e: u32,
    k: usize,
    rows: usize,
    cols: usize,
) -> Result<ComplementaryMatrix> {
    let modulus = (q - 1) as u64;
    let values: Vec<u64> = (0..cols)
        .map(|t| {
            let idx = e as i64 + k as i64 * (q as i64 + 1) + t as i64 + 1;
            phi.apply(seq.at(idx)) as u64
        })
        .collect();
    let exponents = (0..rows as u64)
        .map(|m| values.iter().map(|&v| (m * v % modulus) as u32).collect())
        .collect();
    ComplementaryMatrix::new(k, q - 1, exponents)
}

/// `(q+1, q, q, q)` family.
pub fn construct_t1(
    tower: &ExtensionTower,
    phi: &PhiMap,
    psi: &OrthoMatrix,
) -> Result<SequenceSet> {
    construct(Construction::T1, tower, phi, Some(psi))
}

/// `(q+1, q, q-1, q)` family; T1 truncated to `q - 1` columns.
pub fn construct_t2(
    tower: &ExtensionTower,
    phi: &PhiMap,
    psi: &OrthoMatrix,
) -> Result<SequenceSet> {
    construct(Construction::T2, tower, phi, Some(psi))
}

/// `(q-1, q, q+1, q)` family.
pub fn construct_t3(
    tower: &ExtensionTower,
    phi: &PhiMap,
    psi: &OrthoMatrix,
) -> Result<SequenceSet> {
    construct(Construction::T3, tower, phi, Some(psi))
}

/// `(q-1, q-1, q, q-1)` family over `Z_{q-1}`.
pub fn construct_t4(tower: &ExtensionTower, phi: &PhiMap) -> Result<SequenceSet> {
    construct(Construction::T4, tower, phi, None)
}

/// `(q-1, q-1, q-1, q-1)` family; T4 truncated to `q - 1` columns.
pub fn construct_t5(tower: &ExtensionTower, phi: &PhiMap) -> Result<SequenceSet> {
    construct(Construction::T5, tower, phi, None)
}

/// Default tower for `q`: smallest-index moduli for both fields.
pub fn default_tower(q: u32) -> Result<ExtensionTower> {
    let (p, n) = prime_power(q as u64)?;
    ExtensionTower::quadratic(make_field(p, n, None)?, None)
}

/// Builds a family with the default tower, identity `phi` and the
/// character matrix as `Psi`.
pub fn default_set(construction: Construction, q: u32) -> Result<SequenceSet> {
    construction.check_q(q)?;
    let tower = default_tower(q)?;
    let phi = PhiMap::identity(tower.base());
    let psi = construction
        .uses_psi()
        .then(|| character_matrix(tower.base()));
    construct(construction, &tower, &phi, psi.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthomatrix::example_matrix_q5;

    fn example_tower() -> ExtensionTower {
        ExtensionTower::quadratic(make_field(5, 1, None).unwrap(), Some(&[2, 1, 1])).unwrap()
    }

    fn example(c: Construction) -> SequenceSet {
        let tower = example_tower();
        let phi = PhiMap::identity(tower.base());
        let psi = example_matrix_q5();
        construct(c, &tower, &phi, Some(&psi)).unwrap()
    }

    #[test]
    fn t1_rows_match_worked_example() {
        let set = example(Construction::T1);
        assert_eq!(set.shape(), (6, 5, 5));
        assert_eq!(set.matrices[0].row(1), &[2, 3, 2, 0, 1]);
        assert_eq!(set.matrices[2].row(0), &[0, 0, 0, 0, 0]);
        assert_eq!(set.alphabet, 5);
    }

    #[test]
    fn t2_rows_and_truncation() {
        let t1 = example(Construction::T1);
        let t2 = example(Construction::T2);
        assert_eq!(t2.shape(), (6, 5, 4));
        assert_eq!(t2.matrices[1].row(1), &[1, 3, 3, 4]);
        for (a, b) in t1.matrices.iter().zip(&t2.matrices) {
            for m in 0..5 {
                assert_eq!(&a.row(m)[..4], b.row(m));
            }
        }
    }

    #[test]
    fn t3_rows() {
        let set = example(Construction::T3);
        assert_eq!(set.shape(), (4, 5, 6));
        assert_eq!(set.matrices[0].row(1), &[2, 3, 2, 0, 1, 3]);
        assert_eq!(set.matrices[3].row(4), &[3, 1, 3, 0, 2, 1]);
    }

    #[test]
    fn t4_t5_rows() {
        let t4 = example(Construction::T4);
        assert_eq!(t4.e, Some(3));
        assert_eq!(t4.shape(), (4, 4, 5));
        assert_eq!(t4.alphabet, 4);
        assert_eq!(t4.matrices[0].row(1), &[1, 0, 0, 3, 0]);
        assert_eq!(t4.matrices[3].row(2), &[2, 0, 0, 0, 0]);
        assert!(t4.matrices.iter().all(|c| c.row(0).iter().all(|&e| e == 0)));

        let t5 = example(Construction::T5);
        assert_eq!(t5.shape(), (4, 4, 4));
        assert_eq!(t5.matrices[1].row(3), &[2, 1, 1, 3]);
        for (a, b) in t4.matrices.iter().zip(&t5.matrices) {
            for m in 0..4 {
                assert_eq!(&a.row(m)[..4], b.row(m));
            }
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            default_set(Construction::T1, 2),
            Err(Error::ParameterTooSmall { q: 2, .. })
        ));
        assert!(matches!(
            default_set(Construction::T2, 3),
            Err(Error::ParameterTooSmall { .. })
        ));
        assert!(matches!(
            default_set(Construction::T5, 4),
            Err(Error::ParameterTooSmall { .. })
        ));
        assert!(default_set(Construction::T4, 4).is_ok());
        assert!(default_set(Construction::T1, 3).is_ok());
        assert_eq!(
            default_set(Construction::T1, 6).unwrap_err(),
            Error::NotPrimePower(6)
        );

        let tower = example_tower();
        let phi = PhiMap::identity(tower.base());
        let wrong = crate::orthomatrix::dft_matrix(7);
        assert!(matches!(
            construct_t1(&tower, &phi, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
        let shifted = PhiMap::from_permutation(vec![1, 2, 3, 4, 0]).unwrap();
        assert_eq!(construct_t4(&tower, &shifted), Err(Error::PhiCollision));
        let swapped = PhiMap::from_permutation(vec![4, 1, 2, 3, 0]).unwrap();
        assert!(construct_t4(&tower, &swapped).is_ok());
    }

    #[test]
    fn shapes_and_alphabet_for_prime_powers() {
        for q in [5u32, 7, 8, 9] {
            for c in Construction::ALL {
                let set = default_set(c, q).unwrap();
                assert_eq!(set.shape(), c.shape(q as usize), "{c} q={q}");
                let a = set.alphabet;
                assert!(set.matrices.iter().all(|m| m.alphabet() == a));
                assert!(set
                    .matrices
                    .iter()
                    .flat_map(|m| m.exponents().iter().flatten())
                    .all(|&e| e < a));
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = default_set(Construction::T3, 9).unwrap();
        let b = default_set(Construction::T3, 9).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        for c in [Construction::T1, Construction::T4] {
            let json = example(c).to_json();
            let back = SequenceSet::from_json(&json).unwrap();
            assert_eq!(back.to_json(), json);
        }
        let json = example(Construction::T1).to_json();
        assert!(json.starts_with(r#"{"construction":"T1","q":5,"p":5,"n":1,"modulus":[0,1]"#));
        assert!(json.contains(r#""K":6,"M":5,"N":5,"alphabet":5,"e":null"#));
    }

    #[test]
    fn corrupt_json_is_rejected() {
        let json = example(Construction::T5)
            .to_json()
            .replace(r#""K":4"#, r#""K":3"#);
        assert!(SequenceSet::from_json(&json).is_err());
        assert!(SequenceSet::from_json("{").is_err());
    }

    #[test]
    fn csv_export() {
        let csv = example(Construction::T1).to_csv();
        assert!(csv.starts_with("k,m,t,exponent\n0,0,0,0\n"));
        assert_eq!(csv.lines().count(), 1 + 6 * 5 * 5);
    }

    /// Direct check of the collision count behind the T1 magnitude classes.
    #[test]
    fn t1_trace_collisions_at_most_one() {
        for q in [5u32, 7, 8, 9] {
            let tower = default_tower(q).unwrap();
            let beta = tower.beta().clone();
            let ext = tower.ext();
            for k in 0..=q as u64 {
                for tau in 1..q as u64 {
                    let factor = &ext.one() - &beta.pow(tau);
                    let count = (0..q as u64 - tau)
                        .filter(|&t| {
                            let x = &beta.pow(k * (q as u64 - 1) + t) * &factor;
                            tower.rel_trace(&x).unwrap().is_zero()
                        })
                        .count();
                    assert!(count <= 1, "q={q} k={k} tau={tau}");
                }
            }
        }
    }
}
