//! Densest sublattice problem: minimum `r`-dimensional sublattice volume,
//! the full norm hierarchy `nu_1..nu_n`, and stability certificates.
//!
//! A minimum-volume sublattice is saturated, so it equals the saturation of
//! any `r` independent vectors it contains, in particular of vectors realising
//! its successive minima. The search walks sets of antipodal representatives
//! in order of non-decreasing norm. Minkowski's second theorem,
//! `prod lambda_i(S)^2 <= gamma_r^r det(S)`, bounds every partial set: once the
//! product of chosen norms (padded with the current norm) exceeds
//! `gamma_r^r * best`, no completion can be the successive-minima basis of a
//! better sublattice and the branch is cut. The same bound limits the search
//! radius, which is further capped by the `r^2 lambda_1^2` ball.

use log::warn;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, RawVector};
use crate::error::{Error, Result};
use crate::exact::{self, format_rational, serde_rational, serde_rational_vec, IntRows, Rational};
use crate::lattice::QuadraticLattice;
use crate::limits::Limits;

/// Exact `gamma_r^r` (Hermite constants) for `r = 1..=8`.
pub fn hermite_constant_power(r: usize) -> Option<Rational> {
    let (p, q) = match r {
        1 => (1, 1),
        2 => (4, 3),
        3 => (2, 1),
        4 => (4, 1),
        5 => (8, 1),
        6 => (64, 3),
        7 => (64, 1),
        8 => (256, 1),
        _ => return None,
    };
    Some(exact::rat(p, q))
}

/// Result of one `r`-DSP search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeMinimum {
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// Hermite basis of a saturated sublattice attaining `value`.
    pub witness: IntRows,
    /// False when the candidate set was a short list rather than the full ball.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormHierarchy {
    #[serde(with = "serde_rational_vec")]
    pub values: Vec<Rational>,
    #[serde(rename = "exact")]
    pub exact_flags: Vec<bool>,
    pub witnesses: Vec<IntRows>,
}

impl NormHierarchy {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hierarchy serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("hierarchy JSON: {e}")))
    }

    pub fn all_exact(&self) -> bool {
        self.exact_flags.iter().all(|&x| x)
    }

    /// Values rounded to `digits` decimals, for comparison with printed tables.
    pub fn rounded(&self, digits: i32) -> Vec<f64> {
        let scale = 10f64.powi(digits);
        self.values
            .iter()
            .map(|v| (exact::to_f64(v) * scale).round() / scale)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub stable: bool,
    pub volume_ok: bool,
    pub violating_r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub violating_value: Option<Rational>,
    pub witness: Option<IntRows>,
    /// Whether every hierarchy entry behind the verdict was searched exhaustively.
    pub exact: bool,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let raw: Option<String> = Option::deserialize(d)?;
        raw.map(|s| exact::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Per-`r` comparison of `nu_r(scale(L, c))` with `c^r nu_r(L)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub r: usize,
    #[serde(with = "serde_rational")]
    pub base: Rational,
    #[serde(with = "serde_rational")]
    pub scaled: Rational,
    #[serde(with = "serde_rational")]
    pub expected: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingReport {
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// How `norm_hierarchy` computes entries with `r > n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HierarchyOptions {
    /// Use `nu_r(L) = vol(L)^2 nu_{n-r}(L*)` for `r > n/2`.
    pub use_duality: bool,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        Self { use_duality: true }
    }
}

fn is_representative(coeffs: &[i64]) -> bool {
    coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn identity_rows(n: usize) -> IntRows {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

fn rational_floor_scaled(lattice: &QuadraticLattice, value: &Rational) -> Result<i128> {
    enumerate::scaled_threshold(lattice, value)
}

/// Minimum Gram determinant of a rank-`r` sublattice, with a witness.
pub fn min_sublattice_det(lattice: &QuadraticLattice, r: usize, limits: &Limits) -> Result<SublatticeMinimum> {
    let n = lattice.dim();
    if r == 0 || r > n {
        return Err(Error::Domain(format!("r = {r} is outside [1, {n}]")));
    }
    if r == n {
        return Ok(SublatticeMinimum {
            r,
            value: lattice.volume_sq(),
            witness: identity_rows(n),
            exact: true,
        });
    }
    let lambda = enumerate::min_norm_scaled(lattice, limits.max_vectors)?;
    if r == 1 {
        let shortest = enumerate::raw_within(lattice, lambda, limits.max_vectors)?;
        let rep = shortest
            .into_iter()
            .find(|v| is_representative(&v.coeffs))
            .expect("a shortest vector and its negative");
        return Ok(SublatticeMinimum {
            r,
            value: lattice.scaled_to_rational(lambda),
            witness: vec![rep.coeffs],
            exact: true,
        });
    }
    let gamma = hermite_constant_power(r)
        .ok_or_else(|| Error::Unsupported(format!("sublattice search for r = {r} > 8")))?;

    let seed = greedy_seed(lattice, r, lambda, limits)?;
    let lambda_sq = lattice.scaled_to_rational(lambda);
    let minkowski = &seed.0 * &gamma / num_traits::pow(lambda_sq.clone(), r - 1);
    let lemma = &lambda_sq * Rational::from_integer(BigInt::from((r * r) as u64));
    let radius = if minkowski < lemma { minkowski } else { lemma };
    let threshold = rational_floor_scaled(lattice, &radius)?;

    let cap = limits.dsp_max_candidates.min(limits.max_vectors);
    let (reps, exact_search) = match enumerate::raw_within(lattice, threshold, cap) {
        Ok(all) => (
            all.into_iter().filter(|v| is_representative(&v.coeffs)).collect::<Vec<_>>(),
            true,
        ),
        Err(e) if e.is_capacity() && limits.dsp_allow_shortlist => {
            warn!(
                "r = {r}: ball of squared radius {} exceeds {cap} vectors; searching the {} shortest instead (result not certified)",
                format_rational(&radius),
                limits.dsp_shortlist
            );
            (shortlist(lattice, lambda, limits)?, false)
        }
        Err(e) => return Err(e),
    };

    let mut search = Search {
        lattice,
        r,
        reps: &reps,
        gamma: exact::to_f64(&gamma),
        denom_r: num_traits::pow(BigInt::from(lattice.gram_scale()), r),
        scale: lattice.gram_scale() as f64,
        best: seed.0,
        best_witness: seed.1,
    };
    search.run();
    Ok(SublatticeMinimum {
        r,
        value: search.best,
        witness: search.best_witness,
        exact: exact_search,
    })
}

/// First `r` independent vectors in canonical order, saturated: an upper bound.
fn greedy_seed(lattice: &QuadraticLattice, r: usize, lambda: i128, limits: &Limits) -> Result<(Rational, IntRows)> {
    let mut threshold = lambda;
    loop {
        let vectors = enumerate::raw_within(lattice, threshold, limits.max_vectors)?;
        let mut chosen: IntRows = Vec::new();
        for v in vectors.iter().filter(|v| is_representative(&v.coeffs)) {
            chosen.push(v.coeffs.clone());
            if exact::integer_rank(&chosen) < chosen.len() {
                chosen.pop();
            } else if chosen.len() == r {
                let sat = exact::saturate_rows(&chosen)?;
                return Ok((lattice.subset_gram_det(&sat)?, sat));
            }
        }
        threshold = threshold
            .checked_mul(2)
            .ok_or_else(|| Error::Domain("enumeration bound overflow".into()))?;
    }
}

/// The `dsp_shortlist` shortest antipodal representatives.
fn shortlist(lattice: &QuadraticLattice, lambda: i128, limits: &Limits) -> Result<Vec<RawVector>> {
    let want = limits.dsp_shortlist;
    let mut threshold = lambda;
    loop {
        let all = enumerate::raw_within(lattice, threshold, limits.max_vectors)?;
        if all.len() >= 2 * want {
            return Ok(all
                .into_iter()
                .filter(|v| is_representative(&v.coeffs))
                .take(want)
                .collect());
        }
        threshold *= 2;
    }
}

struct Search<'a> {
    lattice: &'a QuadraticLattice,
    r: usize,
    reps: &'a [RawVector],
    gamma: f64,
    denom_r: BigInt,
    scale: f64,
    best: Rational,
    best_witness: IntRows,
}

impl Search<'_> {
    fn run(&mut self) {
        let r = self.r;
        let mut chosen = Vec::with_capacity(r);
        let mut ips = vec![0i128; r * r];
        self.extend(&mut chosen, &mut ips, 1.0);
    }

    /// `product` is the product of the chosen (real) squared norms.
    fn extend(&mut self, chosen: &mut Vec<usize>, ips: &mut [i128], product: f64) {
        let r = self.r;
        let depth = chosen.len();
        let start = chosen.last().map_or(0, |&i| i + 1);
        let limit = exact::to_f64(&self.best) * self.gamma * (1.0 + 1e-9);
        for next in start..self.reps.len() {
            let norm = self.reps[next].norm as f64 / self.scale;
            if product * norm.powi((r - depth) as i32) > limit {
                break;
            }
            for (i, &c) in chosen.iter().enumerate() {
                let v = self.lattice.inner_int(&self.reps[c].coeffs, &self.reps[next].coeffs);
                ips[i * r + depth] = v;
                ips[depth * r + i] = v;
            }
            ips[depth * r + depth] = self.reps[next].norm;
            let k = depth + 1;
            let mut sub = vec![0i128; k * k];
            for i in 0..k {
                for j in 0..k {
                    sub[i * k + j] = ips[i * r + j];
                }
            }
            let det = exact::det_small(&sub, k);
            if det.is_zero() {
                continue;
            }
            chosen.push(next);
            if k == r {
                self.leaf(chosen, det);
            } else {
                self.extend(chosen, ips, product * norm);
            }
            chosen.pop();
        }
    }

    fn leaf(&mut self, chosen: &[usize], det: BigInt) {
        let rows: IntRows = chosen.iter().map(|&i| self.reps[i].coeffs.clone()).collect();
        let index = exact::maximal_minor_gcd(&rows, self.r, self.lattice.dim());
        let value = Rational::new(det, &self.denom_r * &index * &index);
        if value > self.best {
            return;
        }
        let witness = exact::saturate_rows(&rows).expect("independent rows");
        if value < self.best || witness < self.best_witness {
            self.best = value;
            self.best_witness = witness;
        }
    }
}

/// `nu_1..nu_n` with witnesses.
pub fn norm_hierarchy(lattice: &QuadraticLattice, limits: &Limits) -> Result<NormHierarchy> {
    norm_hierarchy_with(lattice, limits, HierarchyOptions::default())
}

pub fn norm_hierarchy_with(
    lattice: &QuadraticLattice,
    limits: &Limits,
    options: HierarchyOptions,
) -> Result<NormHierarchy> {
    let n = lattice.dim();
    let dual = options.use_duality.then(|| lattice.dual());
    let mut out = NormHierarchy {
        values: Vec::with_capacity(n),
        exact_flags: Vec::with_capacity(n),
        witnesses: Vec::with_capacity(n),
    };
    for r in 1..=n {
        let entry = match &dual {
            Some(dual) if r > 1 && r < n && 2 * r > n => via_dual(lattice, dual, r, limits)?,
            _ => min_sublattice_det(lattice, r, limits)?,
        };
        out.values.push(entry.value);
        out.exact_flags.push(entry.exact);
        out.witnesses.push(entry.witness);
    }
    Ok(out)
}

/// `nu_r(L)` from `nu_{n-r}(L*)`: the orthogonal complement of a primitive
/// dual sublattice `T` is a primitive sublattice of volume `vol(L) vol(T)`.
/// In coefficient coordinates it is the integer kernel of `T`'s witness.
pub fn via_dual(lattice: &QuadraticLattice, dual: &QuadraticLattice, r: usize, limits: &Limits) -> Result<SublatticeMinimum> {
    let n = lattice.dim();
    let t = min_sublattice_det(dual, n - r, limits)?;
    let value = lattice.volume_sq() * &t.value;
    let witness = exact::integer_kernel(&t.witness, n)?;
    let check = lattice.subset_gram_det(&witness)?;
    if witness.len() != r || check != value {
        return Err(Error::Consistency(format!(
            "dual route for r = {r}: complement has determinant {}, expected {}",
            format_rational(&check),
            format_rational(&value)
        )));
    }
    Ok(SublatticeMinimum {
        r,
        value,
        witness,
        exact: t.exact,
    })
}

/// Direct and dual-route values of `nu_r` for every `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityRow {
    pub r: usize,
    pub direct: Rational,
    pub via_dual: Rational,
}

pub fn duality_cross_check(lattice: &QuadraticLattice, limits: &Limits) -> Result<Vec<DualityRow>> {
    let n = lattice.dim();
    let dual = lattice.dual();
    let vol = lattice.volume_sq();
    let direct: Vec<Rational> = (1..=n)
        .map(|r| min_sublattice_det(lattice, r, limits).map(|m| m.value))
        .collect::<Result<_>>()?;
    let dual_values: Vec<Rational> = (1..=n)
        .map(|r| min_sublattice_det(&dual, r, limits).map(|m| m.value))
        .collect::<Result<_>>()?;
    Ok((1..=n)
        .map(|r| DualityRow {
            r,
            direct: direct[r - 1].clone(),
            via_dual: if r == n {
                vol.clone()
            } else {
                &vol * &dual_values[n - r - 1]
            },
        })
        .collect())
}

pub fn is_stable(lattice: &QuadraticLattice, limits: &Limits) -> Result<StabilityCertificate> {
    let hierarchy = norm_hierarchy(lattice, limits)?;
    Ok(certify(lattice, &hierarchy))
}

/// Stability verdict from an already computed hierarchy.
pub fn certify(lattice: &QuadraticLattice, hierarchy: &NormHierarchy) -> StabilityCertificate {
    let volume_ok = lattice.volume_sq().is_one();
    let one = Rational::one();
    let violation = hierarchy.values.iter().position(|v| *v < one);
    StabilityCertificate {
        stable: volume_ok && violation.is_none(),
        volume_ok,
        violating_r: violation.map(|i| i + 1),
        violating_value: violation.map(|i| hierarchy.values[i].clone()),
        witness: violation.map(|i| hierarchy.witnesses[i].clone()),
        exact: hierarchy.all_exact(),
    }
}

/// Checks `nu_r(scale(L, c)) = c^r nu_r(L)` for every `r`.
pub fn check_scaling_law(lattice: &QuadraticLattice, c: &Rational, limits: &Limits) -> Result<ScalingReport> {
    if !c.is_positive() {
        return Err(Error::Domain("scale factor must be positive".into()));
    }
    let base = norm_hierarchy(lattice, limits)?;
    let scaled = norm_hierarchy(&lattice.scale(c)?, limits)?;
    let rows = base
        .values
        .into_iter()
        .zip(scaled.values)
        .enumerate()
        .map(|(i, (b, s))| {
            let expected = num_traits::pow(c.clone(), i + 1) * &b;
            ScalingRow {
                r: i + 1,
                pass: s == expected,
                base: b,
                scaled: s,
                expected,
            }
        })
        .collect();
    Ok(ScalingReport { c: c.clone(), rows })
}
