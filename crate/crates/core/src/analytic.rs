//! Floating-point evaluation of `Theta_L(i tau)` and of the ratio
//! `Delta_L(tau) = Theta_L(i tau) / Theta_{Z^n}(i tau)` for unit-volume lattices.

use std::f64::consts::PI;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;
use crate::limits::Limits;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_TAU_MIN: f64 = 0.25;
pub const DEFAULT_TAU_MAX: f64 = 4.0;

/// Theta series shells of one lattice, enumerated up to a growing bound.
///
/// Once prepared for some `(tau, tol)`, the cached shells also certify every
/// larger `tau` at the same tolerance, so a whole scan shares one enumeration.
#[derive(Clone, Debug)]
pub struct ThetaEvaluator {
    lattice: QuadraticLattice,
    limits: Limits,
    /// `(mu, count)` for every shell with scaled norm `<= threshold`.
    shells: Vec<(f64, u64)>,
    threshold: i128,
}

impl ThetaEvaluator {
    pub fn new(lattice: &QuadraticLattice, limits: &Limits) -> Self {
        Self {
            lattice: lattice.clone(),
            limits: limits.clone(),
            shells: Vec::new(),
            threshold: 0,
        }
    }

    pub fn lattice(&self) -> &QuadraticLattice {
        &self.lattice
    }

    /// Largest enumerated squared norm bound.
    pub fn bound(&self) -> f64 {
        self.threshold as f64 / self.lattice.gram_scale() as f64
    }

    fn enumerate_to(&mut self, threshold: i128) -> Result<()> {
        let shells = enumerate::shells_within(&self.lattice, threshold, self.limits.max_vectors)?;
        let scale = self.lattice.gram_scale() as f64;
        self.shells = shells.into_iter().map(|(k, c)| (k as f64 / scale, c)).collect();
        self.threshold = threshold;
        Ok(())
    }

    /// Tail estimate at `tau` for the current cache: the last shell's term
    /// times the geometric factor `1 / (1 - exp(-pi tau gap))`.
    pub fn tail_estimate(&self, tau: f64) -> f64 {
        let Some(&(last, count)) = self.shells.last() else {
            return f64::INFINITY;
        };
        if self.shells.len() < 2 {
            return f64::INFINITY;
        }
        let gap = self
            .shells
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(f64::INFINITY, f64::min);
        count as f64 * (-PI * tau * last).exp() / (1.0 - (-PI * tau * gap).exp())
    }

    /// Grows the enumeration until the tail estimate at `tau` is below `tol`.
    pub fn prepare(&mut self, tau: f64, tol: f64) -> Result<()> {
        check_positive("tau", tau)?;
        check_positive("tol", tol)?;
        if !self.shells.is_empty() && self.tail_estimate(tau) < tol {
            return Ok(());
        }
        let scale = self.lattice.gram_scale() as f64;
        // Start where the Gaussian factor alone reaches tol.
        let guess = (1.0 / tol).ln() / (PI * tau);
        let mut threshold = ((guess * scale).ceil() as i128).max(self.threshold + 1).max(1);
        loop {
            self.enumerate_to(threshold)?;
            if self.tail_estimate(tau) < tol {
                return Ok(());
            }
            threshold = threshold + threshold / 2 + 1;
        }
    }

    /// `1 + sum count * exp(-pi tau mu)` over the cached shells.
    pub fn sum(&self, tau: f64) -> f64 {
        // Smallest terms first to limit rounding.
        1.0 + self
            .shells
            .iter()
            .rev()
            .map(|&(mu, c)| c as f64 * (-PI * tau * mu).exp())
            .sum::<f64>()
    }

    pub fn value(&mut self, tau: f64, tol: f64) -> Result<f64> {
        self.prepare(tau, tol)?;
        Ok(self.sum(tau))
    }

    /// Prepares for `(tau, tol)`, then reports how much the value moves when
    /// the enumeration bound is doubled. Truncation is honest when this is
    /// below `tol`.
    pub fn doubling_gap(&mut self, tau: f64, tol: f64) -> Result<f64> {
        let before = self.value(tau, tol)?;
        let mut wider = self.clone();
        wider.enumerate_to(2 * self.threshold)?;
        Ok((wider.sum(tau) - before).abs())
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be a positive real, got {x}")))
    }
}

/// `Theta_L(i tau)` with truncation tail below `tol`.
pub fn theta_value(lattice: &QuadraticLattice, tau: f64, tol: f64, limits: &Limits) -> Result<f64> {
    ThetaEvaluator::new(lattice, limits).value(tau, tol)
}

/// `(sum_k exp(-pi tau k^2))^n`.
pub fn theta_zn(n: usize, tau: f64, tol: f64) -> f64 {
    let eps = tol / (4.0 * n.max(1) as f64);
    let mut s = 1.0;
    let mut k = 1.0f64;
    loop {
        let term = 2.0 * (-PI * tau * k * k).exp();
        s += term;
        if term < eps * 1e-3 {
            break;
        }
        k += 1.0;
    }
    s.powi(n as i32)
}

fn require_unit_volume(lattice: &QuadraticLattice) -> Result<()> {
    if lattice.volume_sq().is_one() {
        Ok(())
    } else {
        Err(Error::Domain(
            "the theta series ratio is defined only for lattices of volume 1".into(),
        ))
    }
}

/// `Delta_L(tau)`.
pub fn ratio(lattice: &QuadraticLattice, tau: f64, tol: f64, limits: &Limits) -> Result<f64> {
    require_unit_volume(lattice)?;
    let theta = theta_value(lattice, tau, tol, limits)?;
    Ok(theta / theta_zn(lattice.dim(), tau, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub grid: Vec<f64>,
    pub deltas: Vec<f64>,
    pub tol: f64,
}

/// `steps` points spaced evenly in `log tau` from `tau_min` to `tau_max`.
pub fn log_grid(tau_min: f64, tau_max: f64, steps: usize) -> Result<Vec<f64>> {
    check_positive("tau_min", tau_min)?;
    check_positive("tau_max", tau_max)?;
    if tau_min >= tau_max {
        return Err(Error::Domain(format!("need tau_min < tau_max, got {tau_min} and {tau_max}")));
    }
    if steps < 2 {
        return Err(Error::Domain("a scan needs at least 2 grid points".into()));
    }
    let (a, b) = (tau_min.ln(), tau_max.ln());
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| match i {
            0 => tau_min,
            i if i == steps - 1 => tau_max,
            i => (a + (b - a) * i as f64 / last).exp(),
        })
        .collect())
}

/// `Delta_L` at each point of `grid` (points must be positive).
pub fn ratio_on_grid(lattice: &QuadraticLattice, grid: &[f64], tol: f64, limits: &Limits) -> Result<RatioScan> {
    require_unit_volume(lattice)?;
    check_positive("tol", tol)?;
    for &t in grid {
        check_positive("tau", t)?;
    }
    let Some(smallest) = grid.iter().copied().reduce(f64::min) else {
        return Ok(RatioScan {
            grid: Vec::new(),
            deltas: Vec::new(),
            tol,
        });
    };
    let mut evaluator = ThetaEvaluator::new(lattice, limits);
    evaluator.prepare(smallest, tol)?;
    let n = lattice.dim();
    let deltas = grid
        .par_iter()
        .map(|&t| evaluator.sum(t) / theta_zn(n, t, tol))
        .collect();
    Ok(RatioScan {
        grid: grid.to_vec(),
        deltas,
        tol,
    })
}

pub fn ratio_scan(
    lattice: &QuadraticLattice,
    tau_min: f64,
    tau_max: f64,
    steps: usize,
    tol: f64,
    limits: &Limits,
) -> Result<RatioScan> {
    ratio_on_grid(lattice, &log_grid(tau_min, tau_max, steps)?, tol, limits)
}

/// `x` with `digits` significant digits in positional notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl RatioScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,delta\n");
        for (t, d) in self.grid.iter().zip(&self.deltas) {
            out.push_str(&format_significant(*t, 12));
            out.push(',');
            out.push_str(&format_significant(*d, 12));
            out.push('\n');
        }
        out
    }

    pub fn min_delta(&self) -> f64 {
        self.deltas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_delta(&self) -> f64 {
        self.deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `max |Delta(tau0 t) - Delta(tau0 / t)|` over `samples` points `t` spread
/// log-evenly on `[1, 4]`.
pub fn symmetry_check(lattice: &QuadraticLattice, tau0: f64, samples: usize, tol: f64, limits: &Limits) -> Result<f64> {
    check_positive("tau0", tau0)?;
    let ts = match samples {
        0 => return Err(Error::Domain("need at least one sample".into())),
        1 => vec![2.0],
        s => log_grid(1.0, 4.0, s)?,
    };
    let mut grid = Vec::with_capacity(2 * ts.len());
    for &t in &ts {
        grid.push(tau0 * t);
        grid.push(tau0 / t);
    }
    let scan = ratio_on_grid(lattice, &grid, tol, limits)?;
    Ok(scan
        .deltas
        .chunks(2)
        .map(|p| (p[0] - p[1]).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Min,
    Max,
    Neither,
}

impl std::fmt::Display for Extremum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Extremum::Min => "min",
            Extremum::Max => "max",
            Extremum::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub classification: Extremum,
    /// Grid point nearest `tau = 1` (in `log tau`).
    pub tau: f64,
    pub delta: f64,
    /// Whether the value at `tau` is also the extreme value over the whole
    /// scanned grid. Says nothing about `tau` outside the grid.
    pub extreme_over_grid: bool,
}

/// Classifies the grid point nearest `tau = 1` as a local min, max or neither.
///
/// Neighbouring values within `10 tol` of the centre are treated as equal and
/// absorbed into a plateau, so a grid that straddles a symmetric extremum
/// (two equal centre values) is still classified; the plateau is then
/// compared with its first distinct neighbours on each side.
pub fn extremum_scan(scan: &RatioScan) -> Result<ExtremumReport> {
    if scan.grid.len() < 3 {
        return Err(Error::Domain("extremum classification needs at least 3 grid points".into()));
    }
    let centre = (0..scan.grid.len())
        .min_by(|&a, &b| {
            scan.grid[a]
                .ln()
                .abs()
                .total_cmp(&scan.grid[b].ln().abs())
        })
        .expect("nonempty grid");
    let d = &scan.deltas;
    let eps = 10.0 * scan.tol;
    let same = |j: usize| (d[j] - d[centre]).abs() <= eps;
    let mut lo = centre;
    while lo > 0 && same(lo - 1) {
        lo -= 1;
    }
    let mut hi = centre;
    while hi + 1 < d.len() && same(hi + 1) {
        hi += 1;
    }
    let classification = if lo == 0 || hi + 1 == d.len() {
        Extremum::Neither
    } else {
        let (left, right, here) = (d[lo - 1], d[hi + 1], d[centre]);
        if left < here && right < here {
            Extremum::Max
        } else if left > here && right > here {
            Extremum::Min
        } else {
            Extremum::Neither
        }
    };
    let extreme_over_grid = match classification {
        Extremum::Max => scan.max_delta() <= d[centre] + eps,
        Extremum::Min => scan.min_delta() >= d[centre] - eps,
        Extremum::Neither => false,
    };
    Ok(ExtremumReport {
        classification,
        tau: scan.grid[centre],
        delta: d[centre],
        extreme_over_grid,
    })
}
