//! Exhaustive enumeration of short lattice vectors and theta spectra.
//!
//! The search is a depth-first coordinate recursion over a floating-point
//! Cholesky factorisation of the Gram matrix (Fincke-Pohst). The radius carries
//! a relative slack of `2^-20`; every candidate is then admitted or rejected by
//! an exact integer norm check, so the output is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, serde_rational, Rational};
use crate::lattice::{LatticeVector, QuadraticLattice};

/// Relative slack on the floating-point search radius.
pub const RADIUS_SLACK: f64 = 1.0 / (1u64 << 20) as f64;

/// Histogram of the nonzero lattice vectors by exact squared norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpectrum {
    pub terms: Vec<SpectrumTerm>,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumTerm {
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    pub count: u64,
}

impl ThetaSpectrum {
    pub fn pairs(&self) -> Vec<(Rational, u64)> {
        self.terms.iter().map(|t| (t.mu.clone(), t.count)).collect()
    }

    pub fn total(&self) -> u64 {
        self.terms.iter().map(|t| t.count).sum()
    }

    /// `6 q^{1} + 6 q^{3} + ...`
    pub fn to_q_series(&self) -> String {
        q_series(self.terms.iter().map(|t| (t.count, &t.mu)))
    }
}

pub(crate) fn q_series<'a>(terms: impl Iterator<Item = (u64, &'a Rational)>) -> String {
    let parts: Vec<String> = terms
        .map(|(count, mu)| format!("{count} q^{{{}}}", format_rational(mu)))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// A vector found by the enumerator; `norm` is `u G u^T` times the Gram scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawVector {
    pub norm: i128,
    pub coeffs: Vec<i64>,
}

/// Largest integer `t` with `t / D <= bound`, `D` the lattice's Gram scale.
pub(crate) fn scaled_threshold(lattice: &QuadraticLattice, bound: &Rational) -> Result<i128> {
    let scaled = bound * BigInt::from(lattice.gram_scale());
    scaled
        .floor()
        .to_integer()
        .to_i128()
        .ok_or_else(|| Error::Domain(format!("bound {} is too large", format_rational(bound))))
}

fn check_bound(bound: &Rational) -> Result<()> {
    if !bound.is_positive() {
        return Err(Error::Domain(format!(
            "enumeration bound must be positive, got {}",
            format_rational(bound)
        )));
    }
    Ok(())
}

/// Fincke-Pohst factorisation: `Q(u) = sum_i d_i (u_i + sum_{j>i} m_ij u_j)^2`.
struct Factor {
    n: usize,
    diag: Vec<f64>,
    mu: Vec<f64>,
}

impl Factor {
    fn new(lattice: &QuadraticLattice) -> Self {
        let n = lattice.dim();
        let mut q = lattice.gram_f64();
        for i in 0..n {
            for j in i + 1..n {
                q[j * n + i] = q[i * n + j];
                q[i * n + j] /= q[i * n + i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k * n + l] -= q[k * n + i] * q[i * n + l];
                }
            }
        }
        let diag = (0..n).map(|i| q[i * n + i]).collect();
        Self { n, diag, mu: q }
    }
}

/// Calls `visit` for every nonzero `u` with exact scaled norm `<= threshold`,
/// in an unspecified order. Stops with a capacity error after `cap` hits.
pub(crate) fn for_each_within<F>(
    lattice: &QuadraticLattice,
    threshold: i128,
    cap: usize,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(&[i64], i128),
{
    let f = Factor::new(lattice);
    let n = f.n;
    let radius = threshold as f64 / lattice.gram_scale() as f64 * (1.0 + RADIUS_SLACK);
    let mut u = vec![0i64; n];
    let mut hi = vec![0i64; n];
    let mut partial = vec![0f64; n + 1];
    let mut found = 0usize;

    // Bounds for coordinate `i` given the coordinates above it.
    let range = |i: usize, u: &[i64], partial: &[f64]| -> Option<(i64, i64)> {
        let center: f64 = -(i + 1..n).map(|j| f.mu[i * n + j] * u[j] as f64).sum::<f64>();
        let room = (radius - partial[i + 1]).max(0.0) / f.diag[i];
        let width = room.sqrt() * (1.0 + RADIUS_SLACK) + 1e-9;
        let lo = (center - width).ceil();
        let up = (center + width).floor();
        (lo <= up).then_some((lo as i64, up as i64))
    };

    let mut i = n - 1;
    let (lo, up) = range(i, &u, &partial).expect("origin is always inside");
    u[i] = lo;
    hi[i] = up;
    loop {
        if u[i] > hi[i] {
            if i == n - 1 {
                break;
            }
            i += 1;
            u[i] += 1;
            continue;
        }
        let center: f64 = -(i + 1..n).map(|j| f.mu[i * n + j] * u[j] as f64).sum::<f64>();
        let t = u[i] as f64 - center;
        partial[i] = partial[i + 1] + f.diag[i] * t * t;
        if i == 0 {
            if u.iter().any(|&x| x != 0) {
                let norm = lattice.inner_int(&u, &u);
                if norm <= threshold {
                    found += 1;
                    if found > cap {
                        return Err(Error::capacity(
                            format!(
                                "number of lattice vectors within squared radius {}",
                                format_rational(&lattice.scaled_to_rational(threshold))
                            ),
                            cap as u64,
                        ));
                    }
                    visit(&u, norm);
                }
            }
            u[0] += 1;
            continue;
        }
        match range(i - 1, &u, &partial) {
            Some((lo, up)) => {
                i -= 1;
                u[i] = lo;
                hi[i] = up;
            }
            None => u[i] += 1,
        }
    }
    Ok(found)
}

/// All nonzero vectors with scaled norm `<= threshold`, in canonical order.
pub(crate) fn raw_within(lattice: &QuadraticLattice, threshold: i128, cap: usize) -> Result<Vec<RawVector>> {
    let mut out = Vec::new();
    for_each_within(lattice, threshold, cap, |u, norm| {
        out.push(RawVector {
            norm,
            coeffs: u.to_vec(),
        })
    })?;
    out.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}

/// Shell counts keyed by scaled norm.
pub(crate) fn shells_within(
    lattice: &QuadraticLattice,
    threshold: i128,
    cap: usize,
) -> Result<BTreeMap<i128, u64>> {
    let mut shells = BTreeMap::new();
    for_each_within(lattice, threshold, cap, |_, norm| {
        *shells.entry(norm).or_insert(0) += 1;
    })?;
    Ok(shells)
}

/// Every nonzero `u` with `u G u^T <= bound`, both signs, ordered by norm then
/// lexicographically by coefficients.
pub fn vectors_within(lattice: &QuadraticLattice, bound: &Rational, cap: usize) -> Result<Vec<LatticeVector>> {
    check_bound(bound)?;
    let threshold = scaled_threshold(lattice, bound)?;
    Ok(raw_within(lattice, threshold, cap)?
        .into_iter()
        .map(|v| LatticeVector {
            norm_sq: lattice.scaled_to_rational(v.norm),
            coeffs: v.coeffs,
        })
        .collect())
}

/// Theta series coefficients of all shells with squared norm `<= bound`.
pub fn theta_spectrum(lattice: &QuadraticLattice, bound: &Rational, cap: usize) -> Result<ThetaSpectrum> {
    check_bound(bound)?;
    let threshold = scaled_threshold(lattice, bound)?;
    let shells = shells_within(lattice, threshold, cap)?;
    Ok(ThetaSpectrum {
        terms: shells
            .into_iter()
            .map(|(norm, count)| SpectrumTerm {
                mu: lattice.scaled_to_rational(norm),
                count,
            })
            .collect(),
        bound: bound.clone(),
        complete: true,
    })
}

/// First `m` distinct squared norms `mu_1 < ... < mu_m` of nonzero vectors.
pub fn lambda_sequence(lattice: &QuadraticLattice, m: usize, cap: usize) -> Result<Vec<Rational>> {
    Ok(lambda_sequence_scaled(lattice, m, cap)?
        .into_iter()
        .map(|x| lattice.scaled_to_rational(x))
        .collect())
}

pub(crate) fn lambda_sequence_scaled(lattice: &QuadraticLattice, m: usize, cap: usize) -> Result<Vec<i128>> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let n = lattice.dim();
    // Some basis vector always lies inside the smallest diagonal entry.
    let mut threshold = (0..n)
        .map(|i| lattice.int_gram()[i * n + i] as i128)
        .min()
        .expect("dim >= 1");
    loop {
        let shells = shells_within(lattice, threshold, cap)?;
        if shells.len() >= m {
            return Ok(shells.keys().take(m).copied().collect());
        }
        threshold = threshold
            .checked_mul(2)
            .ok_or_else(|| Error::Domain("enumeration bound overflow".into()))?;
    }
}

/// Squared minimum `lambda_1^2` as a scaled integer.
pub(crate) fn min_norm_scaled(lattice: &QuadraticLattice, cap: usize) -> Result<i128> {
    Ok(lambda_sequence_scaled(lattice, 1, cap)?[0])
}
