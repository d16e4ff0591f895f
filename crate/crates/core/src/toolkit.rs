//! Batch verification tasks shared by the CLI and the browser demo: parameter
//! tables, worked-example reproduction, PAPR over whole sets and heatmaps.

use serde::Serialize;

use crate::ambiguity::{wide_zone_bound, metrics, optimality_factor, AfSurface};
use crate::constructions::{construct, default_set, Construction, SequenceSet};
use crate::finite_field::{make_field, ExtensionTower, PhiMap};
use crate::orthomatrix::{example_matrix_q5, max_column_papr, MatrixLabel, PaprReport};
use crate::Result;

/// Primes `5 <= q <= 43` swept by the parameter tables.
pub const TABLE_PRIMES: [u32; 12] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub q: u32,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub theta_max: f64,
    pub theta_opt: f64,
    pub rho: f64,
}

/// One table row with `theta_max` measured by exhaustive scan over the full plane.
pub fn table_row(construction: Construction, q: u32) -> Result<TableRow> {
    let set = default_set(construction, q)?;
    let (k, m, n) = set.shape();
    let report = metrics(&set, (n, n))?;
    let theta_opt = wide_zone_bound(k, m, n, n)?;
    Ok(TableRow {
        q,
        k,
        m,
        n,
        theta_max: report.theta_max,
        theta_opt,
        rho: optimality_factor(report.theta_max, theta_opt)?,
    })
}

pub fn table(construction: Construction, qs: &[u32]) -> Result<Vec<TableRow>> {
    qs.iter().map(|&q| table_row(construction, q)).collect()
}

/// CSV `q,K,M,N,theta_max,theta_opt,rho` with four decimals on the real columns.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("q,K,M,N,theta_max,theta_opt,rho\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{:.4},{:.4}\n",
            r.q, r.k, r.m, r.n, r.theta_max, r.theta_opt, r.rho
        ));
    }
    out
}

/// Printed exponent tables of the five `q = 5` worked examples.
pub mod reference {
    pub const T1: [[[u32; 5]; 5]; 6] = [
        [
            [0, 0, 0, 0, 0],
            [2, 3, 2, 0, 1],
            [4, 1, 4, 0, 2],
            [3, 2, 3, 0, 4],
            [1, 4, 1, 0, 3],
        ],
        [
            [0, 0, 0, 0, 0],
            [1, 3, 3, 4, 3],
            [2, 1, 1, 3, 1],
            [4, 2, 2, 1, 2],
            [3, 4, 4, 2, 4],
        ],
        [
            [0, 0, 0, 0, 0],
            [3, 0, 2, 4, 4],
            [1, 0, 4, 3, 3],
            [2, 0, 3, 1, 1],
            [4, 0, 1, 2, 2],
        ],
        [
            [0, 0, 0, 0, 0],
            [2, 1, 2, 0, 3],
            [4, 2, 4, 0, 1],
            [3, 4, 3, 0, 2],
            [1, 3, 1, 0, 4],
        ],
        [
            [0, 0, 0, 0, 0],
            [3, 1, 1, 2, 1],
            [1, 2, 2, 4, 2],
            [2, 4, 4, 3, 4],
            [4, 3, 3, 1, 3],
        ],
        [
            [0, 0, 0, 0, 0],
            [1, 0, 4, 2, 2],
            [2, 0, 3, 4, 4],
            [4, 0, 1, 3, 3],
            [3, 0, 2, 1, 1],
        ],
    ];

    pub const T2: [[[u32; 4]; 5]; 6] = [
        [
            [0, 0, 0, 0],
            [2, 3, 2, 0],
            [4, 1, 4, 0],
            [3, 2, 3, 0],
            [1, 4, 1, 0],
        ],
        [
            [0, 0, 0, 0],
            [1, 3, 3, 4],
            [2, 1, 1, 3],
            [4, 2, 2, 1],
            [3, 4, 4, 2],
        ],
        [
            [0, 0, 0, 0],
            [3, 0, 2, 4],
            [1, 0, 4, 3],
            [2, 0, 3, 1],
            [4, 0, 1, 2],
        ],
        [
            [0, 0, 0, 0],
            [2, 1, 2, 0],
            [4, 2, 4, 0],
            [3, 4, 3, 0],
            [1, 3, 1, 0],
        ],
        [
            [0, 0, 0, 0],
            [3, 1, 1, 2],
            [1, 2, 2, 4],
            [2, 4, 4, 3],
            [4, 3, 3, 1],
        ],
        [
            [0, 0, 0, 0],
            [1, 0, 4, 2],
            [2, 0, 3, 4],
            [4, 0, 1, 3],
            [3, 0, 2, 1],
        ],
    ];

    pub const T3: [[[u32; 6]; 5]; 4] = [
        [
            [0, 0, 0, 0, 0, 0],
            [2, 3, 2, 0, 1, 3],
            [4, 1, 4, 0, 2, 1],
            [3, 2, 3, 0, 4, 2],
            [1, 4, 1, 0, 3, 4],
        ],
        [
            [0, 0, 0, 0, 0, 0],
            [3, 4, 3, 0, 2, 4],
            [1, 3, 1, 0, 4, 3],
            [2, 1, 2, 0, 3, 1],
            [4, 2, 4, 0, 1, 2],
        ],
        [
            [0, 0, 0, 0, 0, 0],
            [4, 1, 4, 0, 3, 1],
            [3, 2, 3, 0, 1, 2],
            [1, 4, 1, 0, 2, 4],
            [2, 3, 2, 0, 4, 3],
        ],
        [
            [0, 0, 0, 0, 0, 0],
            [1, 2, 1, 0, 4, 2],
            [2, 4, 2, 0, 3, 4],
            [4, 3, 4, 0, 1, 3],
            [3, 1, 3, 0, 2, 1],
        ],
    ];

    pub const T4: [[[u32; 5]; 4]; 4] = [
        [
            [0, 0, 0, 0, 0],
            [1, 0, 0, 3, 0],
            [2, 0, 0, 2, 0],
            [3, 0, 0, 1, 0],
        ],
        [
            [0, 0, 0, 0, 0],
            [2, 3, 3, 1, 3],
            [0, 2, 2, 2, 2],
            [2, 1, 1, 3, 1],
        ],
        [
            [0, 0, 0, 0, 0],
            [0, 1, 1, 2, 1],
            [0, 2, 2, 0, 2],
            [0, 3, 3, 2, 3],
        ],
        [
            [0, 0, 0, 0, 0],
            [3, 2, 2, 0, 2],
            [2, 0, 0, 0, 0],
            [1, 2, 2, 0, 2],
        ],
    ];

    pub const T5: [[[u32; 4]; 4]; 4] = [
        [[0, 0, 0, 0], [1, 0, 0, 3], [2, 0, 0, 2], [3, 0, 0, 1]],
        [[0, 0, 0, 0], [2, 3, 3, 1], [0, 2, 2, 2], [2, 1, 1, 3]],
        [[0, 0, 0, 0], [0, 1, 1, 2], [0, 2, 2, 0], [0, 3, 3, 2]],
        [[0, 0, 0, 0], [3, 2, 2, 0], [2, 0, 0, 0], [1, 2, 2, 0]],
    ];

    pub(crate) fn to_vecs<const N: usize, const M: usize, const K: usize>(
        t: &[[[u32; N]; M]; K],
    ) -> Vec<Vec<Vec<u32>>> {
        t.iter()
            .map(|c| c.iter().map(|r| r.to_vec()).collect())
            .collect()
    }
}

/// Printed matrices for example `id` (1..=5), as `[k][m][t]`.
pub fn expected_example(id: u8) -> Option<Vec<Vec<Vec<u32>>>> {
    use reference::*;
    Some(match id {
        1 => to_vecs(&T1),
        2 => to_vecs(&T2),
        3 => to_vecs(&T3),
        4 => to_vecs(&T4),
        5 => to_vecs(&T5),
        _ => return None,
    })
}

pub fn example_construction(id: u8) -> Option<Construction> {
    Construction::ALL.get(id.checked_sub(1)? as usize).copied()
}

/// The worked-example setup: `F_25` with `beta^2 + beta + 2 = 0`, identity
/// `phi` and the fixed 5x5 `Psi`.
pub fn example_set(construction: Construction) -> Result<SequenceSet> {
    let tower = ExtensionTower::quadratic(make_field(5, 1, None)?, Some(&[2, 1, 1]))?;
    let phi = PhiMap::identity(tower.base());
    let psi = example_matrix_q5();
    construct(construction, &tower, &phi, Some(&psi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryDiff {
    pub k: usize,
    pub m: usize,
    pub t: usize,
    pub expected: Option<u32>,
    pub actual: Option<u32>,
}

/// Entry-by-entry comparison; missing entries on either side are reported too.
pub fn diff_matrices(set: &SequenceSet, expected: &[Vec<Vec<u32>>]) -> Vec<EntryDiff> {
    let mut diffs = Vec::new();
    let k_max = set.matrices.len().max(expected.len());
    for k in 0..k_max {
        let actual = set.matrices.get(k).map(|c| c.exponents());
        let want = expected.get(k).map(Vec::as_slice);
        let m_max = actual.map_or(0, <[_]>::len).max(want.map_or(0, <[_]>::len));
        for m in 0..m_max {
            let ar = actual.and_then(|a| a.get(m));
            let wr = want.and_then(|w| w.get(m));
            let t_max = ar.map_or(0, Vec::len).max(wr.map_or(0, Vec::len));
            for t in 0..t_max {
                let a = ar.and_then(|r| r.get(t)).copied();
                let w = wr.and_then(|r| r.get(t)).copied();
                if a != w {
                    diffs.push(EntryDiff {
                        k,
                        m,
                        t,
                        expected: w,
                        actual: a,
                    });
                }
            }
        }
    }
    diffs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleReport {
    pub id: u8,
    pub construction: Construction,
    pub shape: (usize, usize, usize),
    pub expected_shape: (usize, usize, usize),
    pub matrices_matched: usize,
    pub diffs: Vec<EntryDiff>,
    pub e: Option<u32>,
    pub theta_max: f64,
    pub theta_claim: u32,
    pub pass: bool,
}

/// Tolerance on measured `theta_max` relative to `M N`.
pub const THETA_REL_TOL: f64 = 1e-6;

/// Regenerates example `id` and checks it against `expected`.
pub fn verify_example_against(id: u8, expected: &[Vec<Vec<u32>>]) -> Result<ExampleReport> {
    let construction = example_construction(id)
        .ok_or_else(|| crate::Error::Malformed(format!("no worked example {id}")))?;
    let set = example_set(construction)?;
    let diffs = diff_matrices(&set, expected);
    let matrices_matched = set
        .matrices
        .iter()
        .zip(expected)
        .filter(|(c, w)| c.exponents() == w.as_slice())
        .count();
    let (k, m, n) = set.shape();
    let report = metrics(&set, (n, n))?;
    let theta_claim = construction.theta_claim(set.q);
    let expected_shape = construction.shape(set.q as usize);
    let theta_ok = (report.theta_max - theta_claim as f64).abs() <= THETA_REL_TOL * (m * n) as f64;
    Ok(ExampleReport {
        id,
        construction,
        shape: (k, m, n),
        expected_shape,
        matrices_matched,
        pass: diffs.is_empty() && theta_ok && (k, m, n) == expected_shape,
        diffs,
        e: set.e,
        theta_max: report.theta_max,
        theta_claim,
    })
}

pub fn verify_example(id: u8) -> Result<ExampleReport> {
    let expected = expected_example(id)
        .ok_or_else(|| crate::Error::Malformed(format!("no worked example {id}")))?;
    verify_example_against(id, &expected)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetPaprReport {
    pub per_matrix: Vec<PaprReport>,
    pub global_max: f64,
    /// Grid factor actually used, after rounding up for character matrices.
    pub oversampling: usize,
    /// Whether `global_max <= p` (only meaningful for T1-T3).
    pub within_p: Option<bool>,
}

impl SetPaprReport {
    /// CSV with header `k,column_index,papr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,column_index,papr\n");
        for (k, r) in self.per_matrix.iter().enumerate() {
            for (j, v) in r.per_column.iter().enumerate() {
                out.push_str(&format!("{k},{j},{v}\n"));
            }
        }
        out
    }
}

/// Column PAPR of every matrix. With a character or DFT `Psi` the grid
/// factor is rounded up to a multiple of `p` so the analytic peaks lie on it.
pub fn set_papr(set: &SequenceSet, oversampling: usize) -> Result<SetPaprReport> {
    let mut l = oversampling;
    let character_psi = set
        .psi
        .as_ref()
        .is_some_and(|psi| matches!(psi.label(), MatrixLabel::Character | MatrixLabel::Dft));
    if character_psi {
        let p = set.p as usize;
        l = l.div_ceil(p) * p;
    }
    let per_matrix = set
        .matrices
        .iter()
        .map(|c| max_column_papr(&c.to_complex(), l))
        .collect::<Result<Vec<_>>>()?;
    let global_max = per_matrix.iter().map(|r| r.max_papr).fold(0.0, f64::max);
    Ok(SetPaprReport {
        per_matrix,
        global_max,
        oversampling: l,
        within_p: set
            .construction
            .uses_psi()
            .then_some(global_max <= set.p as f64 * (1.0 + 1e-9)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapScale {
    Linear,
    /// `log10`, clipped at 60 dB below the normalisation.
    Log,
}

/// Gray levels of `|AF| / norm`, `(2N-1)^2` bytes, row-major from the top.
/// Columns run over `tau` left to right, rows over `v` from `N-1` down to
/// `1-N`, so `(0, 0)` sits at the exact centre.
pub fn heatmap_gray(surface: &AfSurface, norm: f64, scale: HeatmapScale) -> Vec<u8> {
    let n = surface.n() as i64;
    let mut out = Vec::with_capacity(((2 * n - 1) * (2 * n - 1)) as usize);
    for v in (-(n - 1)..n).rev() {
        for tau in -(n - 1)..n {
            let x = (surface.get(tau, v).norm() / norm).clamp(0.0, 1.0);
            let level = match scale {
                HeatmapScale::Linear => x,
                HeatmapScale::Log => (1.0 + x.max(1e-3).log10() / 3.0).clamp(0.0, 1.0),
            };
            out.push((level * 255.0).round() as u8);
        }
    }
    out
}

/// Binary PGM (`P5`) rendering of [`heatmap_gray`].
pub fn heatmap_pgm(surface: &AfSurface, norm: f64, scale: HeatmapScale) -> Vec<u8> {
    let side = 2 * surface.n() - 1;
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    out.extend(heatmap_gray(surface, norm, scale));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::af_surface;

    #[test]
    fn examples_three_to_five_match_exactly() {
        for id in 3..=5 {
            let r = verify_example(id).unwrap();
            assert!(r.pass, "example {id}: {r:?}");
            assert_eq!(r.matrices_matched, r.shape.0);
        }
        assert_eq!(verify_example(4).unwrap().e, Some(3));
        assert!(verify_example(6).is_err());
    }

    /// The printed C^3 of the first two examples shows trace value 2 at
    /// t = 0 and t = 2, i.e. at beta^12 and beta^14. Since beta^12 = -1,
    /// Tr(beta^12) = -2 = 3, so the printed columns cannot come from the
    /// stated field. Every other entry matches.
    #[test]
    fn examples_one_and_two_differ_only_in_printed_c3_columns() {
        for id in 1..=2 {
            let r = verify_example(id).unwrap();
            assert!(!r.pass);
            assert_eq!(r.shape, r.expected_shape);
            assert!((r.theta_max - 5.0).abs() < 1e-9);
            assert_eq!(r.matrices_matched, 5);
            assert_eq!(r.diffs.len(), 8);
            assert!(r
                .diffs
                .iter()
                .all(|d| d.k == 3 && d.m >= 1 && (d.t == 0 || d.t == 2)));
        }
        let tower =
            ExtensionTower::quadratic(make_field(5, 1, None).unwrap(), Some(&[2, 1, 1])).unwrap();
        let beta12 = tower.beta().pow(12);
        assert!((&beta12 + &tower.ext().one()).is_zero());
        assert_eq!(tower.rel_trace(&beta12).unwrap().index(), 3);
    }

    #[test]
    fn printed_c3_breaks_the_magnitude_bound() {
        let mut printed = example_set(Construction::T1).unwrap();
        let ex = expected_example(1).unwrap();
        printed.matrices[3] =
            crate::constructions::ComplementaryMatrix::new(3, 5, ex[3].clone()).unwrap();
        let r = metrics(&printed, (5, 5)).unwrap();
        assert!((r.theta_max - 15.0).abs() < 1e-6);
    }

    #[test]
    fn mutated_table_is_located() {
        let mut expected = expected_example(3).unwrap();
        expected[2][4][5] = (expected[2][4][5] + 1) % 5;
        let r = verify_example_against(3, &expected).unwrap();
        assert!(!r.pass);
        assert_eq!(r.matrices_matched, 3);
        assert_eq!(r.diffs.len(), 1);
        let d = &r.diffs[0];
        assert_eq!((d.k, d.m, d.t), (2, 4, 5));
        assert_eq!(d.actual, Some(3));

        let mut short = expected_example(5).unwrap();
        short.pop();
        let r = verify_example_against(5, &short).unwrap();
        assert_eq!(r.diffs.len(), 16);
        assert!(r.diffs.iter().all(|d| d.k == 3 && d.expected.is_none()));
    }

    #[test]
    fn table_rows_small_q() {
        let rows = table(Construction::T1, &[5, 7]).unwrap();
        let csv = table_csv(&rows);
        assert_eq!(
            csv,
            "q,K,M,N,theta_max,theta_opt,rho\n\
             5,6,5,5,5.0000,3.6352,1.3754\n\
             7,8,7,7,7.0000,5.3848,1.3000\n"
        );
    }

    #[test]
    fn heatmap_layout() {
        let set = example_set(Construction::T1).unwrap();
        let c = &set.matrices;
        let auto = af_surface(&c[1], &c[1]).unwrap();
        let pgm = heatmap_pgm(&auto, 25.0, HeatmapScale::Linear);
        let header = b"P5\n9 9\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        let pixels = &pgm[header.len()..];
        assert_eq!(pixels.len(), 81);
        assert_eq!(pixels[40], 255);
        assert_eq!(pixels.iter().filter(|&&g| g == 255).count(), 1);

        let cross = af_surface(&c[1], &c[3]).unwrap();
        let gray = heatmap_gray(&cross, 25.0, HeatmapScale::Linear);
        assert!(gray.iter().all(|&g| g == 0 || g == 51), "{gray:?}");

        let log = heatmap_gray(&auto, 25.0, HeatmapScale::Log);
        assert_eq!(log[40], 255);
    }

    #[test]
    fn papr_for_defaults() {
        let t1 = default_set(Construction::T1, 5).unwrap();
        let r = set_papr(&t1, 64).unwrap();
        assert_eq!(r.oversampling, 65);
        assert!((r.global_max - 5.0).abs() < 1e-9);
        assert_eq!(r.within_p, Some(true));

        let t4 = default_set(Construction::T4, 5).unwrap();
        let r = set_papr(&t4, 64).unwrap();
        assert_eq!(r.oversampling, 64);
        assert!((r.global_max - 4.0).abs() < 1e-9);
        assert_eq!(r.within_p, None);
        assert!(r.to_csv().starts_with("k,column_index,papr\n0,0,"));
    }
}
