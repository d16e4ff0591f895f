//! Column-orthogonal matrices of `p`-th roots of unity and multicarrier PAPR.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::finite_field::{is_prime, FiniteField};
use crate::{Error, Result};

/// `exp(2 pi i * exponent / order)`, with the exponent reduced first.
pub fn unit_root(order: u32, exponent: i64) -> Complex64 {
    let e = exponent.rem_euclid(order as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * e / order as f64)
}

/// Precomputed `xi_order^k` for `k in 0..order`.
#[derive(Debug, Clone)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(order: u32) -> Self {
        Self {
            roots: (0..order as i64).map(|k| unit_root(order, k)).collect(),
        }
    }

    pub fn get(&self, exponent: i64) -> Complex64 {
        self.roots[exponent.rem_euclid(self.roots.len() as i64) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixLabel {
    Character,
    Dft,
    ExampleQ5,
    User,
}

/// A `q x q` matrix whose entry `(i, j)` is `xi_p^{exponents[i][j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoMatrix {
    q: usize,
    p: u32,
    label: MatrixLabel,
    exponents: Vec<Vec<u32>>,
}

impl OrthoMatrix {
    /// Builds a matrix from raw exponents, reducing them mod `p`. Returns the
    /// matrix and the number of entries that needed reduction.
    pub fn new(p: u32, exponents: Vec<Vec<u32>>, label: MatrixLabel) -> Result<(Self, usize)> {
        if p < 2 {
            return Err(Error::Malformed(format!("root order {p} is below 2")));
        }
        let q = exponents.len();
        if q == 0 || exponents.iter().any(|row| row.len() != q) {
            return Err(Error::DimensionMismatch {
                expected: format!("{q}x{q} square matrix"),
                got: format!(
                    "rows of lengths {:?}",
                    exponents.iter().map(Vec::len).collect::<Vec<_>>()
                ),
            });
        }
        let mut reduced = 0;
        let exponents = exponents
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| {
                        if e >= p {
                            reduced += 1;
                        }
                        e % p
                    })
                    .collect()
            })
            .collect();
        Ok((
            Self {
                q,
                p,
                label,
                exponents,
            },
            reduced,
        ))
    }

    /// Parses the `{"q","p","label","exponents"}` JSON schema.
    pub fn from_json(json: &str) -> Result<(Self, usize)> {
        let raw: OrthoMatrix =
            serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
        if raw.q != raw.exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("q = {}", raw.q),
                got: format!("{} rows", raw.exponents.len()),
            });
        }
        Self::new(raw.p, raw.exponents, raw.label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn label(&self) -> MatrixLabel {
        self.label
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn exponent(&self, row: usize, col: usize) -> u32 {
        self.exponents[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        self.exponents
            .iter()
            .map(|row| unit_root(self.p, row[col] as i64))
            .collect()
    }
}

/// Additive-character table `xi_p^{Tr(x_i x_j)}` over the canonical ordering.
pub fn character_matrix(field: &FiniteField) -> OrthoMatrix {
    let elements: Vec<_> = field.elements().collect();
    let exponents = elements
        .iter()
        .map(|xi| elements.iter().map(|xj| (xi * xj).abs_trace()).collect())
        .collect();
    let label = if field.n() == 1 {
        MatrixLabel::Dft
    } else {
        MatrixLabel::Character
    };
    OrthoMatrix {
        q: field.q() as usize,
        p: field.p(),
        label,
        exponents,
    }
}

/// The `p x p` DFT matrix, `exponents[i][j] = i*j mod p`.
pub fn dft_matrix(p: u32) -> OrthoMatrix {
    let exponents = (0..p)
        .map(|i| (0..p).map(|j| i * j % p).collect())
        .collect();
    OrthoMatrix {
        q: p as usize,
        p,
        label: MatrixLabel::Dft,
        exponents,
    }
}

/// The 5x5 matrix used by the worked `q = 5` examples.
pub fn example_matrix_q5() -> OrthoMatrix {
    OrthoMatrix {
        q: 5,
        p: 5,
        label: MatrixLabel::ExampleQ5,
        exponents: vec![
            vec![0, 0, 0, 0, 0],
            vec![0, 1, 2, 4, 3],
            vec![0, 2, 4, 3, 1],
            vec![0, 4, 3, 1, 2],
            vec![0, 3, 1, 2, 4],
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub pass: bool,
    /// True when the verdict comes from exponent counting rather than floats.
    pub exact: bool,
    pub worst_residual: f64,
    pub failing_pairs: Vec<(usize, usize)>,
}

/// Checks every column pair for a vanishing inner product.
///
/// For prime `p` a sum of `p`-th roots of unity with integer multiplicities
/// vanishes exactly when all multiplicities agree, so the exponent-difference
/// histogram decides orthogonality without rounding. Other root orders fall
/// back to a numeric threshold of `1e-9 * q`.
pub fn validate_orthogonality(m: &OrthoMatrix) -> OrthogonalityReport {
    let exact = is_prime(m.p);
    let roots = RootTable::new(m.p);
    let tol = 1e-9 * m.q as f64;
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for j in 0..m.q {
        for k in j + 1..m.q {
            let mut counts = vec![0usize; m.p as usize];
            for row in &m.exponents {
                counts[((row[j] + m.p - row[k]) % m.p) as usize] += 1;
            }
            let residual = counts
                .iter()
                .enumerate()
                .map(|(d, &c)| roots.get(d as i64) * c as f64)
                .sum::<Complex64>()
                .norm();
            worst = worst.max(residual);
            let ok = if exact {
                counts.iter().all(|&c| c == counts[0])
            } else {
                residual <= tol
            };
            if !ok {
                failing.push((j, k));
            }
        }
    }
    OrthogonalityReport {
        pass: failing.is_empty(),
        exact,
        worst_residual: worst,
        failing_pairs: failing,
    }
}

const UNIMODULAR_TOL: f64 = 1e-9;

fn check_inputs(u: &[Complex64], oversampling: usize) -> Result<()> {
    if oversampling < 4 {
        return Err(Error::InvalidOversampling(oversampling));
    }
    if u.is_empty() {
        return Err(Error::Malformed("empty sequence".into()));
    }
    if let Some(i) = u
        .iter()
        .position(|z| (z.norm() - 1.0).abs() > UNIMODULAR_TOL)
    {
        return Err(Error::NonUnimodularInput(i));
    }
    Ok(())
}

/// Instantaneous-to-average power ratio `|s_u(k / (L M))|^2 / M` on the
/// `L M`-point grid over one symbol period.
pub fn iapr_curve(u: &[Complex64], oversampling: usize) -> Result<Vec<f64>> {
    check_inputs(u, oversampling)?;
    let m = u.len();
    let len = m * oversampling;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    buf[..m].copy_from_slice(u);
    // Unnormalized inverse FFT gives sum_m u_m exp(+2 pi i m k / len).
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    Ok(buf.iter().map(|z| z.norm_sqr() / m as f64).collect())
}

/// Grid approximation of `max_t |s_u(t)|^2 / M` for a unimodular sequence.
pub fn papr(u: &[Complex64], oversampling: usize) -> Result<f64> {
    Ok(iapr_curve(u, oversampling)?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaprReport {
    pub per_column: Vec<f64>,
    pub max_papr: f64,
    pub oversampling: usize,
}

impl PaprReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column_index,papr\n");
        for (j, v) in self.per_column.iter().enumerate() {
            out.push_str(&format!("{j},{v}\n"));
        }
        out
    }
}

/// PAPR of every column (a length-`M` sequence) of an `M x N` matrix given as rows.
pub fn max_column_papr(rows: &[Vec<Complex64>], oversampling: usize) -> Result<PaprReport> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Malformed("ragged matrix".into()));
    }
    let per_column = (0..cols)
        .map(|j| {
            let column: Vec<Complex64> = rows.iter().map(|r| r[j]).collect();
            papr(&column, oversampling)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PaprReport {
        max_papr: per_column.iter().copied().fold(0.0, f64::max),
        per_column,
        oversampling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::make_field;
    use approx::assert_abs_diff_eq;

    /// Direct evaluation of the multicarrier signal, independent of the FFT path.
    fn papr_direct(u: &[Complex64], oversampling: usize) -> f64 {
        let m = u.len();
        let grid = m * oversampling;
        (0..grid)
            .map(|k| {
                let t = k as f64 / grid as f64;
                u.iter()
                    .enumerate()
                    .map(|(i, &c)| c * Complex64::from_polar(1.0, 2.0 * PI * i as f64 * t))
                    .sum::<Complex64>()
                    .norm_sqr()
                    / m as f64
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn character_matrix_of_prime_field_is_dft() {
        let f = make_field(7, 1, None).unwrap();
        assert_eq!(character_matrix(&f).exponents(), dft_matrix(7).exponents());
    }

    #[test]
    fn character_matrix_over_f4_is_binary() {
        let f = make_field(2, 2, None).unwrap();
        let m = character_matrix(&f);
        assert!(m.exponents().iter().flatten().all(|&e| e <= 1));
        assert!(validate_orthogonality(&m).pass);
    }

    #[test]
    fn example_matrix_entries() {
        let m = example_matrix_q5();
        assert_eq!(m.exponents()[1], vec![0, 1, 2, 4, 3]);
        assert_eq!(m.exponent(2, 3), 3);
        let report = validate_orthogonality(&m);
        assert!(report.pass && report.exact);
        assert!(report.worst_residual < 1e-9);
    }

    #[test]
    fn identical_columns_fail() {
        let (m, _) = OrthoMatrix::new(2, vec![vec![0, 0], vec![0, 0]], MatrixLabel::User).unwrap();
        let report = validate_orthogonality(&m);
        assert!(!report.pass);
        assert_eq!(report.failing_pairs, vec![(0, 1)]);
        assert_abs_diff_eq!(report.worst_residual, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn numeric_fallback_for_composite_order() {
        // 4x4 Fourier matrix with root order 4 is orthogonal but not prime-order.
        let ex = (0..4)
            .map(|i| (0..4).map(|j| i * j % 4).collect())
            .collect();
        let (m, _) = OrthoMatrix::new(4, ex, MatrixLabel::User).unwrap();
        let report = validate_orthogonality(&m);
        assert!(report.pass);
        assert!(!report.exact);
    }

    #[test]
    fn user_matrix_json() {
        let json = r#"{"q":2,"p":2,"label":"user","exponents":[[0,0],[0,3]]}"#;
        let (m, reduced) = OrthoMatrix::from_json(json).unwrap();
        assert_eq!(reduced, 1);
        assert_eq!(m.exponents(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(
            m.to_json(),
            r#"{"q":2,"p":2,"label":"user","exponents":[[0,0],[0,1]]}"#
        );
        assert!(
            OrthoMatrix::from_json(r#"{"q":2,"p":2,"label":"user","exponents":[[0,0]]}"#).is_err()
        );
    }

    #[test]
    fn papr_of_constant_sequence() {
        let u = vec![Complex64::new(1.0, 0.0); 5];
        assert_abs_diff_eq!(papr(&u, 64).unwrap(), 5.0, epsilon = 1e-9);
    }

    #[test]
    fn papr_of_dft_columns_hits_peak() {
        let dft = dft_matrix(5);
        for j in 0..5 {
            let col = dft.column(j);
            let got = papr(&col, 64).unwrap();
            assert_abs_diff_eq!(got, 5.0, epsilon = 1e-9);
            assert_abs_diff_eq!(got, papr_direct(&col, 64), epsilon = 1e-9);
        }
    }

    #[test]
    fn papr_input_errors() {
        let u = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert_eq!(papr(&u, 64), Err(Error::NonUnimodularInput(1)));
        assert_eq!(papr(&u[..1], 2), Err(Error::InvalidOversampling(2)));
    }

    #[test]
    fn column_report() {
        let rows = vec![vec![Complex64::new(1.0, 0.0)]; 4];
        let report = max_column_papr(&rows, 8).unwrap();
        assert_abs_diff_eq!(report.max_papr, 4.0, epsilon = 1e-9);
        assert!(report.to_csv().starts_with("column_index,papr\n0,"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unimodular() -> impl Strategy<Value = Vec<Complex64>> {
            prop::collection::vec(0.0..(2.0 * PI), 1..24).prop_map(|ph| {
                ph.into_iter()
                    .map(|a| Complex64::from_polar(1.0, a))
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn papr_bounds_and_monotone(u in unimodular(), l in 4usize..20) {
                let m = u.len() as f64;
                let coarse = papr(&u, l).unwrap();
                let fine = papr(&u, 2 * l).unwrap();
                prop_assert!(coarse >= 1.0 - 1e-9);
                prop_assert!(coarse <= m + 1e-9);
                prop_assert!(fine >= coarse - 1e-12);
                prop_assert!((coarse - papr_direct(&u, l)).abs() < 1e-9);
            }
        }
    }
}
