//! Aperiodic ambiguity functions, DRCSS metrics and lower bounds.
//!
//! [`cross_af`] and [`set_af`] evaluate the definition point by point.
//! [`af_surface`] produces the whole `(tau, v)` plane for a pair of
//! complementary matrices: for each delay it folds the flock into a single
//! lag product and transforms that over Doppler with one length-`N` FFT.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::constructions::{ComplementaryMatrix, SequenceSet};
use crate::orthomatrix::unit_root;
use crate::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cross-ambiguity of two equal-length sequences at delay `tau`, Doppler `v`.
/// Zero for `|tau| >= N`.
pub fn cross_af(a: &[Complex64], b: &[Complex64], tau: i64, v: i64) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len() as i64;
    if tau.abs() >= n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = if tau >= 0 { (0, n - tau) } else { (-tau, n) };
    Ok((lo..hi)
        .map(|i| a[i as usize] * b[(i + tau) as usize].conj() * unit_root(n as u32, i * v))
        .sum())
}

fn check_pair(c1: &ComplementaryMatrix, c2: &ComplementaryMatrix) -> Result<()> {
    let s1 = (c1.rows(), c1.cols());
    let s2 = (c2.rows(), c2.cols());
    if s1 != s2 || c1.alphabet() != c2.alphabet() {
        return Err(Error::ShapeMismatch(s1, s2));
    }
    Ok(())
}

/// Sum over the flock of row-wise cross-ambiguities.
pub fn set_af(
    c1: &ComplementaryMatrix,
    c2: &ComplementaryMatrix,
    tau: i64,
    v: i64,
) -> Result<Complex64> {
    check_pair(c1, c2)?;
    let a = c1.to_complex();
    let b = c2.to_complex();
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| cross_af(ra, rb, tau, v))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AfKind {
    Auto,
    Cross,
}

/// Ambiguity values over `(-N, N) x (-N, N)`.
#[derive(Debug, Clone)]
pub struct AfSurface {
    n: usize,
    kind: AfKind,
    subjects: (usize, usize),
    /// Row-major over `tau`, then `v`, both offset by `N - 1`.
    values: Vec<Complex64>,
}

impl AfSurface {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> AfKind {
        self.kind
    }

    pub fn subjects(&self) -> (usize, usize) {
        self.subjects
    }

    /// Value at `(tau, v)`; zero outside the stored plane in `tau`, periodic in `v`.
    pub fn get(&self, tau: i64, v: i64) -> Complex64 {
        let n = self.n as i64;
        if tau.abs() >= n {
            return Complex64::new(0.0, 0.0);
        }
        let side = 2 * n - 1;
        let vi = if v.abs() < n { v } else { v.rem_euclid(n) };
        self.values[((tau + n - 1) * side + vi + n - 1) as usize]
    }

    /// All grid points as `(tau, v, value)`.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let n = self.n as i64;
        let side = (2 * n - 1) as usize;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &z)| ((i / side) as i64 - (n - 1), (i % side) as i64 - (n - 1), z))
    }

    /// CSV with header `tau,v,re,im,mag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,v,re,im,mag\n");
        for (tau, v, z) in self.points() {
            out.push_str(&format!("{tau},{v},{},{},{}\n", z.re, z.im, z.norm()));
        }
        out
    }
}

/// Full ambiguity surface of `C^{k1}` against `C^{k2}`.
pub fn af_surface(c1: &ComplementaryMatrix, c2: &ComplementaryMatrix) -> Result<AfSurface> {
    check_pair(c1, c2)?;
    let a = c1.to_complex();
    let b = c2.to_complex();
    Ok(surface_from_rows(
        &a,
        &b,
        (c1.index_k(), c2.index_k()),
        &mut FftPlanner::new(),
    ))
}

fn surface_from_rows(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    subjects: (usize, usize),
    planner: &mut FftPlanner<f64>,
) -> AfSurface {
    let n = a[0].len();
    let ni = n as i64;
    let side = 2 * n - 1;
    let fft = planner.plan_fft_inverse(n);
    let zero = Complex64::new(0.0, 0.0);
    let mut values = vec![zero; side * side];
    let mut lag = vec![zero; n];
    for tau in -(ni - 1)..ni {
        lag.iter_mut().for_each(|z| *z = zero);
        let (lo, hi) = if tau >= 0 { (0, ni - tau) } else { (-tau, ni) };
        for i in lo..hi {
            let j = (i + tau) as usize;
            lag[i as usize] = a
                .iter()
                .zip(b)
                .map(|(ra, rb)| ra[i as usize] * rb[j].conj())
                .sum();
        }
        // inverse FFT: H[v] = sum_i lag[i] xi_N^{i v}
        fft.process(&mut lag);
        let row = ((tau + ni - 1) as usize) * side;
        for v in -(ni - 1)..ni {
            values[row + (v + ni - 1) as usize] = lag[v.rem_euclid(ni) as usize];
        }
    }
    AfSurface {
        n,
        kind: if subjects.0 == subjects.1 {
            AfKind::Auto
        } else {
            AfKind::Cross
        },
        subjects,
        values,
    }
}

/// Magnitude class and how often it occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeCount {
    pub magnitude: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub theta_a: f64,
    pub theta_c: f64,
    pub theta_max: f64,
    pub region: (usize, usize),
    /// `None` when the bound is vacuous for these parameters.
    pub zone_bound: Option<f64>,
    pub wide_zone_bound: Option<f64>,
    pub rho: Option<f64>,
    /// Magnitudes over every scanned point (auto peaks included), rounded to `1e-6`.
    pub magnitude_histogram: Vec<MagnitudeCount>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

struct PairScan {
    auto: bool,
    max: f64,
    hist: BTreeMap<i64, u64>,
}

fn scan_pair(
    rows: &[Vec<Vec<Complex64>>],
    k1: usize,
    k2: usize,
    zx: i64,
    zy: i64,
    planner: &mut FftPlanner<f64>,
) -> PairScan {
    let surface = surface_from_rows(&rows[k1], &rows[k2], (k1, k2), planner);
    let auto = k1 == k2;
    let mut max: f64 = 0.0;
    let mut hist = BTreeMap::new();
    for (tau, v, z) in surface.points() {
        if tau.abs() >= zx || v.abs() >= zy {
            continue;
        }
        let mag = z.norm();
        *hist.entry((mag * 1e6).round() as i64).or_insert(0) += 1;
        if !(auto && tau == 0 && v == 0) {
            max = max.max(mag);
        }
    }
    PairScan { auto, max, hist }
}

/// Exhaustive auto/cross scan over `|tau| < zx`, `|v| < zy`.
pub fn metrics(set: &SequenceSet, region: (usize, usize)) -> Result<MetricsReport> {
    let (k, m, n) = set.shape();
    let (zx, zy) = region;
    if zx < 1 || zy < 1 || zx > n || zy > n {
        return Err(Error::RegionOutOfRange { zx, zy, n });
    }
    let rows: Vec<Vec<Vec<Complex64>>> = set.matrices.iter().map(|c| c.to_complex()).collect();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();

    #[cfg(feature = "parallel")]
    let scans: Vec<PairScan> = pairs
        .par_iter()
        .map_init(FftPlanner::new, |planner, &(a, b)| {
            scan_pair(&rows, a, b, zx as i64, zy as i64, planner)
        })
        .collect();
    #[cfg(not(feature = "parallel"))]
    let scans: Vec<PairScan> = {
        let mut planner = FftPlanner::new();
        pairs
            .iter()
            .map(|&(a, b)| scan_pair(&rows, a, b, zx as i64, zy as i64, &mut planner))
            .collect()
    };

    let mut theta_a: f64 = 0.0;
    let mut theta_c: f64 = 0.0;
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for s in scans {
        if s.auto {
            theta_a = theta_a.max(s.max);
        } else {
            theta_c = theta_c.max(s.max);
        }
        for (key, c) in s.hist {
            *hist.entry(key).or_insert(0) += c;
        }
    }
    let theta_max = theta_a.max(theta_c);
    let zone_b = zone_bound(k, m, n, zx, zy).ok();
    let wide_b = wide_zone_bound(k, m, n, zy).ok();
    let rho = wide_b.and_then(|b| optimality_factor(theta_max, b).ok());
    Ok(MetricsReport {
        theta_a,
        theta_c,
        theta_max,
        region,
        zone_bound: zone_b,
        wide_zone_bound: wide_b,
        rho,
        magnitude_histogram: hist
            .into_iter()
            .map(|(key, count)| MagnitudeCount {
                magnitude: key as f64 * 1e-6,
                count,
            })
            .collect(),
    })
}

/// `(MN / sqrt(Zy)) * sqrt((K Zx Zy / (M (N + Zx - 1)) - 1) / (K Zx - 1))`.
pub fn zone_bound(k: usize, m: usize, n: usize, zx: usize, zy: usize) -> Result<f64> {
    if zx < 1 || zy < 1 || zx > n || zy > n {
        return Err(Error::RegionOutOfRange { zx, zy, n });
    }
    let (k, m, n, zx, zy) = (k as f64, m as f64, n as f64, zx as f64, zy as f64);
    if k * zx <= 1.0 {
        return Err(Error::NotApplicable("K * Zx must exceed 1"));
    }
    let inner = k * zx * zy / (m * (n + zx - 1.0)) - 1.0;
    if inner < 0.0 {
        return Err(Error::NotApplicable("negative radicand"));
    }
    Ok(m * n / zy.sqrt() * (inner / (k * zx - 1.0)).sqrt())
}

/// `sqrt(MN (1 - 2 sqrt(M / (3 K Zy))))`, valid for `K > 3M / Zy`.
pub fn wide_zone_bound(k: usize, m: usize, n: usize, zy: usize) -> Result<f64> {
    let (kf, mf, nf, zyf) = (k as f64, m as f64, n as f64, zy as f64);
    if zy == 0 || k * zy <= 3 * m {
        return Err(Error::NotApplicable("requires K > 3M / Zy"));
    }
    Ok((mf * nf * (1.0 - 2.0 * (mf / (3.0 * kf * zyf)).sqrt())).sqrt())
}

/// Smallest `Zx` for which [`wide_zone_bound`] is stated: `N sqrt(3M / (K Zy))`.
pub fn wide_zone_min_zx(k: usize, m: usize, n: usize, zy: usize) -> f64 {
    n as f64 * (3.0 * m as f64 / (k as f64 * zy as f64)).sqrt()
}

pub fn optimality_factor(theta_max: f64, bound: f64) -> Result<f64> {
    if bound.is_nan() || bound <= 0.0 {
        return Err(Error::NonPositiveBound(bound));
    }
    Ok(theta_max / bound)
}
