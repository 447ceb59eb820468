//! Generalized theta series: unordered rank-`r` sets of lattice vectors
//! counted by the exact determinant of their Gram matrix.
//!
//! Term `m` of the `r`-th series is read off the ball of squared radius
//! `r^2 mu_m`, where `mu_m` is the `m`-th distinct squared norm of the lattice:
//! its exponent is the `m`-th smallest determinant realised by rank-`r` sets
//! inside that ball and its coefficient is the number of such sets.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, q_series, RawVector};
use crate::error::{Error, Result};
use crate::exact::{self, serde_rational, Rational};
use crate::lattice::{LatticeVector, QuadraticLattice};
use crate::limits::Limits;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtsTerm {
    pub m: usize,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    pub count: u64,
    #[serde(with = "serde_rational")]
    pub ball_sq: Rational,
    /// Only the leading term is backed by the minimum-volume guarantee.
    pub guaranteed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtsSeries {
    pub r: usize,
    pub terms: Vec<GtsTerm>,
}

impl GtsSeries {
    pub fn pairs(&self) -> Vec<(Rational, u64)> {
        self.terms.iter().map(|t| (t.mu.clone(), t.count)).collect()
    }

    /// `36 q^{3/4} + 156 q^{3} + ...`
    pub fn to_q_series(&self) -> String {
        q_series(self.terms.iter().map(|t| (t.count, &t.mu)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series serialises")
    }
}

fn check_rank(lattice: &QuadraticLattice, r: usize) -> Result<()> {
    if r == 0 || r > lattice.dim() {
        return Err(Error::Domain(format!(
            "r = {r} is outside [1, {}]",
            lattice.dim()
        )));
    }
    Ok(())
}

/// One representative per antipodal pair: first nonzero coefficient positive.
fn is_representative(coeffs: &[i64]) -> bool {
    coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Tally of rank-`r` subsets of `reps` keyed by `(bucket, scaled determinant)`.
/// `reps` must be sorted by norm; the bucket of a subset is `bucket_of` applied
/// to its last (longest) member. Counts are per representative set.
fn tally_subsets(
    lattice: &QuadraticLattice,
    r: usize,
    reps: &[RawVector],
    bucket_of: &(dyn Fn(usize) -> usize + Sync),
    max_visits: u64,
) -> Result<BTreeMap<(usize, BigInt), u64>> {
    let visits = AtomicU64::new(0);
    let overflow = AtomicBool::new(false);
    let partials: Vec<BTreeMap<(usize, BigInt), u64>> = (0..reps.len())
        .into_par_iter()
        .map(|first| {
            let mut local = BTreeMap::new();
            let mut chosen = vec![first];
            let mut ips = vec![0i128; r * r];
            ips[0] = reps[first].norm;
            let mut pending = 0u64;
            walk(
                lattice, r, reps, bucket_of, &mut chosen, &mut ips, &mut local, &mut pending, &visits,
                &overflow, max_visits,
            );
            visits.fetch_add(pending, Ordering::Relaxed);
            local
        })
        .collect();
    if overflow.load(Ordering::Relaxed) || visits.load(Ordering::Relaxed) > max_visits {
        return Err(Error::capacity("number of visited subsets", max_visits));
    }
    let mut total = BTreeMap::new();
    for part in partials {
        for (k, v) in part {
            *total.entry(k).or_insert(0) += v;
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    lattice: &QuadraticLattice,
    r: usize,
    reps: &[RawVector],
    bucket_of: &(dyn Fn(usize) -> usize + Sync),
    chosen: &mut Vec<usize>,
    ips: &mut [i128],
    tally: &mut BTreeMap<(usize, BigInt), u64>,
    pending: &mut u64,
    visits: &AtomicU64,
    overflow: &AtomicBool,
    max_visits: u64,
) {
    let depth = chosen.len();
    *pending += 1;
    if *pending >= 4096 {
        if visits.fetch_add(*pending, Ordering::Relaxed) + *pending > max_visits {
            overflow.store(true, Ordering::Relaxed);
        }
        *pending = 0;
    }
    if overflow.load(Ordering::Relaxed) {
        return;
    }
    let mut sub = vec![0i128; depth * depth];
    for i in 0..depth {
        for j in 0..depth {
            sub[i * depth + j] = ips[i * r + j];
        }
    }
    let det = exact::det_small(&sub, depth);
    if det == BigInt::from(0) {
        return;
    }
    let last = *chosen.last().expect("nonempty");
    if depth == r {
        *tally.entry((bucket_of(last), det)).or_insert(0) += 1;
        return;
    }
    for next in last + 1..reps.len() {
        for (i, &c) in chosen.iter().enumerate() {
            let v = lattice.inner_int(&reps[c].coeffs, &reps[next].coeffs);
            ips[i * r + depth] = v;
            ips[depth * r + i] = v;
        }
        ips[depth * r + depth] = reps[next].norm;
        chosen.push(next);
        walk(
            lattice, r, reps, bucket_of, chosen, ips, tally, pending, visits, overflow, max_visits,
        );
        chosen.pop();
    }
}

fn det_to_rational(lattice: &QuadraticLattice, r: usize, det: &BigInt) -> Rational {
    Rational::new(det.clone(), num_traits::pow(BigInt::from(lattice.gram_scale()), r))
}

/// Counts unordered rank-`r` sets drawn from `vectors` (any order, both signs
/// allowed, duplicates ignored) by exact Gram determinant.
pub fn determinant_census(
    lattice: &QuadraticLattice,
    r: usize,
    vectors: &[LatticeVector],
    limits: &Limits,
) -> Result<BTreeMap<Rational, u64>> {
    check_rank(lattice, r)?;
    let mut raw: Vec<RawVector> = vectors
        .iter()
        .filter(|v| !v.is_zero())
        .map(|v| RawVector {
            norm: lattice.inner_int(&v.coeffs, &v.coeffs),
            coeffs: v.coeffs.clone(),
        })
        .collect();
    raw.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.coeffs.cmp(&b.coeffs)));
    raw.dedup();
    // A set containing both v and -v is rank deficient, so a rank-r set is a
    // choice of r antipodal classes and, within each present class, a sign.
    let mut classes: Vec<(RawVector, u64)> = Vec::new();
    for v in raw {
        let rep = if is_representative(&v.coeffs) {
            v
        } else {
            RawVector {
                norm: v.norm,
                coeffs: v.coeffs.iter().map(|c| -c).collect(),
            }
        };
        match classes.iter_mut().find(|(c, _)| c.coeffs == rep.coeffs) {
            Some((_, k)) => *k += 1,
            None => classes.push((rep, 1)),
        }
    }
    classes.sort_by(|a, b| a.0.norm.cmp(&b.0.norm).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
    let reps: Vec<RawVector> = classes.iter().map(|(v, _)| v.clone()).collect();
    let multiplicity: Vec<u64> = classes.iter().map(|(_, k)| *k).collect();
    if multiplicity.iter().all(|&k| k == 2) {
        let tally = tally_subsets(lattice, r, &reps, &|_| 0, limits.gts_max_subsets)?;
        let mut out = BTreeMap::new();
        for ((_, det), count) in tally {
            *out.entry(det_to_rational(lattice, r, &det)).or_insert(0) += count << r;
        }
        return Ok(out);
    }
    // Mixed multiplicities: weight each representative set by the product of
    // its sign choices. Buckets carry the set's class index to recover weights.
    census_weighted(lattice, r, &reps, &multiplicity, limits)
}

fn census_weighted(
    lattice: &QuadraticLattice,
    r: usize,
    reps: &[RawVector],
    multiplicity: &[u64],
    limits: &Limits,
) -> Result<BTreeMap<Rational, u64>> {
    let mut out = BTreeMap::new();
    let mut visits = 0u64;
    let mut combo: Vec<usize> = (0..r).collect();
    if reps.len() < r {
        return Ok(out);
    }
    loop {
        visits += 1;
        if visits > limits.gts_max_subsets {
            return Err(Error::capacity("number of visited subsets", limits.gts_max_subsets));
        }
        let rows: Vec<Vec<i64>> = combo.iter().map(|&i| reps[i].coeffs.clone()).collect();
        let det = lattice.subset_gram_det(&rows)?;
        if det != Rational::from_integer(BigInt::from(0)) {
            let weight: u64 = combo.iter().map(|&i| multiplicity[i]).product();
            *out.entry(det).or_insert(0) += weight;
        }
        if !exact::next_combination(&mut combo, reps.len()) {
            break;
        }
    }
    Ok(out)
}

fn ball_vectors(lattice: &QuadraticLattice, threshold: i128, limits: &Limits) -> Result<Vec<RawVector>> {
    let cap = limits.gts_max_candidates.min(limits.max_vectors);
    enumerate::raw_within(lattice, threshold, cap).map_err(|e| match e {
        Error::Capacity { .. } => Error::capacity(
            format!(
                "number of candidate vectors in the ball of squared radius {}",
                exact::format_rational(&lattice.scaled_to_rational(threshold))
            ),
            cap as u64,
        ),
        other => other,
    })
}

/// Number of unordered `r`-sets of distinct nonzero vectors with squared norm
/// at most `ball_sq`, of rank `r`, whose Gram determinant equals `target`.
pub fn count_subsets_with_det(
    lattice: &QuadraticLattice,
    r: usize,
    ball_sq: &Rational,
    target: &Rational,
    limits: &Limits,
) -> Result<u64> {
    check_rank(lattice, r)?;
    if *ball_sq <= Rational::from_integer(BigInt::from(0)) {
        return Err(Error::Domain("ball radius must be positive".into()));
    }
    let threshold = enumerate::scaled_threshold(lattice, ball_sq)?;
    let reps: Vec<RawVector> = ball_vectors(lattice, threshold, limits)?
        .into_iter()
        .filter(|v| is_representative(&v.coeffs))
        .collect();
    let tally = tally_subsets(lattice, r, &reps, &|_| 0, limits.gts_max_subsets)?;
    Ok(tally
        .into_iter()
        .filter(|((_, det), _)| det_to_rational(lattice, r, det) == *target)
        .map(|(_, count)| count << r)
        .sum())
}

/// Optional restrictions on the vectors a series is counted over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GtsOptions {
    /// Keep only vectors whose basis coefficients all satisfy `|u_i| <= b`.
    /// The ball alone is the mathematical definition; a box additionally
    /// emulates enumerations that truncate coefficients, and makes counts
    /// depend on the chosen basis.
    pub coeff_box: Option<i64>,
}

/// The first `m_max` terms of the `r`-th generalized theta series.
pub fn generalized_theta(
    lattice: &QuadraticLattice,
    r: usize,
    m_max: usize,
    limits: &Limits,
) -> Result<GtsSeries> {
    generalized_theta_with(lattice, r, m_max, GtsOptions::default(), limits)
}

pub fn generalized_theta_with(
    lattice: &QuadraticLattice,
    r: usize,
    m_max: usize,
    options: GtsOptions,
    limits: &Limits,
) -> Result<GtsSeries> {
    check_rank(lattice, r)?;
    if let Some(b) = options.coeff_box {
        if b < 1 {
            return Err(Error::Domain(format!("coefficient box must be at least 1, got {b}")));
        }
    }
    if m_max == 0 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let mus = enumerate::lambda_sequence_scaled(lattice, m_max, limits.max_vectors)?;
    let r2 = (r * r) as i128;
    let balls: Vec<i128> = mus.iter().map(|&mu| mu * r2).collect();
    let reps: Vec<RawVector> = ball_vectors(lattice, *balls.last().expect("m_max >= 1"), limits)?
        .into_iter()
        .filter(|v| is_representative(&v.coeffs))
        .filter(|v| options.coeff_box.is_none_or(|b| v.coeffs.iter().all(|c| c.abs() <= b)))
        .collect();
    let bucket_of = |idx: usize| -> usize {
        let norm = reps[idx].norm;
        balls.iter().position(|&b| norm <= b).expect("inside the largest ball")
    };
    let tally = tally_subsets(lattice, r, &reps, &bucket_of, limits.gts_max_subsets)?;

    let mut terms: Vec<GtsTerm> = Vec::with_capacity(m_max);
    let mut inside: BTreeMap<BigInt, u64> = BTreeMap::new();
    for (m, ball) in balls.iter().enumerate() {
        for ((bucket, det), count) in &tally {
            if *bucket == m {
                *inside.entry(det.clone()).or_insert(0) += count << r;
            }
        }
        let Some((det, &count)) = inside.iter().nth(m) else {
            return Err(Error::Domain(format!(
                "the ball of term {} holds only {} distinct determinants",
                m + 1,
                inside.len()
            )));
        };
        let mu = det_to_rational(lattice, r, det);
        if let Some(prev) = terms.last() {
            if prev.mu >= mu {
                return Err(Error::Consistency(format!(
                    "term {} exponent {} does not exceed term {} exponent {}",
                    m + 1,
                    exact::format_rational(&mu),
                    m,
                    exact::format_rational(&prev.mu)
                )));
            }
        }
        terms.push(GtsTerm {
            m: m + 1,
            mu,
            count,
            ball_sq: lattice.scaled_to_rational(*ball),
            guaranteed: m == 0,
        });
    }
    Ok(GtsSeries { r, terms })
}
