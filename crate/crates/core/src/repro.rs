//! Reproduction harness: every reference value and property family, checked
//! against the library and reported as a PASS/FAIL (or WARN) table.

use std::time::Instant;

use num_traits::{One, Signed};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::analytic::{self, Extremum};
use crate::codes::{builtin_code, format_weight_enumerator};
use crate::dsp;
use crate::enumerate;
use crate::error::Result;
use crate::exact::{self, format_rational, int, rat, IntRows, Rational, RationalMatrix};
use crate::gts::{self, GtsOptions};
use crate::lattice::QuadraticLattice;
use crate::limits::Limits;
use crate::registry::{builtin_lattice, BUILTIN_LATTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReproReport {
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One line per check: `PASS  3  title (0.01 s) detail`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4}  {:<4} {} ({:.2} s, budget {} s)\n      {}\n",
                c.status, c.id, c.title, c.seconds, c.budget_seconds, c.detail
            ));
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let warned = self.checks.iter().filter(|c| c.status == Status::Warn).count();
        out.push_str(&format!(
            "{} checks, {} failed, {} warnings\n",
            self.checks.len(),
            failed,
            warned
        ));
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ReproOptions {
    /// Also compare the non-leading second-order coefficients of the two
    /// six-dimensional binary-code lattices; mismatches are warnings.
    pub strict_gts_example3: bool,
    /// Seed for the randomised property families.
    pub seed: u64,
}

impl Default for ReproOptions {
    fn default() -> Self {
        Self {
            strict_gts_example3: false,
            seed: 0x5eed,
        }
    }
}

type Outcome = Result<(bool, String)>;

fn timed(id: &str, title: &str, budget: f64, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    let (status, mut detail) = match outcome {
        Ok((true, d)) => (Status::Pass, d),
        Ok((false, d)) => (Status::Fail, d),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    let status = if status == Status::Pass && seconds > budget {
        detail.push_str(&format!("; over the {budget} s budget"));
        Status::Fail
    } else {
        status
    };
    Check {
        id: id.into(),
        title: title.into(),
        status,
        detail,
        seconds,
        budget_seconds: budget,
    }
}

fn show(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn run(limits: &Limits, options: &ReproOptions) -> ReproReport {
    let mut checks = vec![
        timed("1", "theta series of A2", 1.0, || theta_a2(limits)),
        timed("2", "second-order series of A2", 120.0, || gts_a2(limits)),
        timed("3", "norm hierarchies of D4 and D4/2", 30.0, || hierarchy_d4(limits)),
        timed("4", "norm hierarchies of the code lattices", 600.0, || hierarchy_codes(limits)),
        timed("5", "stability verdicts", 600.0, || stability(limits)),
        timed("6", "weight hierarchies of C1, C2", 1.0, weight_hierarchies),
        timed("7", "equal theta series of A2(C1), A2(C2)", 30.0, || isospectral(limits)),
        timed("8", "series of A4(C3)", 120.0, || series_a4_c3(limits)),
        timed("9", "theta ratio of A4(C3)", 60.0, || ratio_a4_c3(limits)),
        timed("10", "theta ratio of A4(C4)", 60.0, || ratio_a4_c4(limits)),
        timed("11", "property families", 300.0, || properties(limits, options.seed)),
    ];
    if options.strict_gts_example3 {
        checks.extend(strict_example3(limits));
    }
    ReproReport { checks }
}

fn theta_a2(limits: &Limits) -> Outcome {
    let s = enumerate::theta_spectrum(&builtin_lattice("a2")?, &int(9), limits.max_vectors)?;
    let want = vec![(int(1), 6), (int(3), 6), (int(4), 6), (int(7), 12), (int(9), 6)];
    Ok((s.pairs() == want, s.to_q_series()))
}

fn gts_a2(limits: &Limits) -> Outcome {
    let a2 = builtin_lattice("a2")?;
    let want = vec![(rat(3, 4), 36), (int(3), 156), (rat(27, 4), 168), (int(12), 380)];
    let ball = gts::generalized_theta(&a2, 2, 4, limits)?;
    let boxed = gts::generalized_theta_with(&a2, 2, 4, GtsOptions { coeff_box: Some(5) }, limits)?;
    let ok = ball.pairs()[..3] == want[..3] && ball.terms[3].mu == int(12) && boxed.pairs() == want;
    Ok((
        ok,
        format!(
            "{}; term 4 counts {} sets in the rotation-invariant ball of radius^2 28, {} with coefficients |u_i| <= 5",
            boxed.to_q_series(),
            ball.terms[3].count,
            boxed.terms[3].count
        ),
    ))
}

fn hierarchy_d4(limits: &Limits) -> Outcome {
    let d4 = dsp::norm_hierarchy(&builtin_lattice("d4")?, limits)?;
    let bar = dsp::norm_hierarchy(&builtin_lattice("d4bar")?, limits)?;
    let ok = d4.values == vec![int(2), int(3), int(4), int(4)]
        && bar.values == vec![int(1), rat(3, 4), rat(1, 2), rat(1, 4)];
    Ok((ok, format!("D4 {}, D4/2 {}", show(&d4.values), show(&bar.values))))
}

fn hierarchy_codes(limits: &Limits) -> Outcome {
    let exact_cases = [
        ("a2_c1", vec![int(1); 6]),
        ("a2_c2", vec![int(1), rat(3, 4), rat(1, 2), rat(3, 4), int(1), int(1)]),
        ("a4_c3", vec![int(1), rat(3, 4), rat(1, 2), rat(3, 4), int(1), int(1)]),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, want) in exact_cases {
        let h = dsp::norm_hierarchy(&builtin_lattice(name)?, limits)?;
        ok &= h.values == want;
        detail.push(format!("{name} {} exact={}", show(&h.values), h.all_exact()));
    }
    let h = dsp::norm_hierarchy(&builtin_lattice("a4_c4")?, limits)?;
    let rounded = h.rounded(2);
    ok &= rounded == [0.75, 0.88, 0.77, 0.88, 0.75, 1.0];
    detail.push(format!("a4_c4 {} ~ {:?} exact={}", show(&h.values), rounded, h.all_exact()));
    Ok((ok, detail.join("; ")))
}

fn stability(limits: &Limits) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, want_stable) in [("a2_c1", true), ("a2_c2", false), ("a4_c3", false), ("a4_c4", false)] {
        let lattice = builtin_lattice(name)?;
        let cert = dsp::is_stable(&lattice, limits)?;
        ok &= cert.stable == want_stable && cert.volume_ok;
        if let Some(w) = &cert.witness {
            let det = lattice.subset_gram_det(w)?;
            ok &= det < Rational::one();
            detail.push(format!(
                "{name} unstable at r={} (witness det {})",
                cert.violating_r.unwrap_or(0),
                format_rational(&det)
            ));
        } else {
            ok &= want_stable;
            detail.push(format!("{name} stable"));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn weight_hierarchies() -> Outcome {
    let c1 = builtin_code("c1")?;
    let c2 = builtin_code("c2")?;
    let (h1, h2) = (c1.weight_hierarchy()?, c2.weight_hierarchy()?);
    let (e1, e2) = (c1.weight_enumerator()?, c2.weight_enumerator()?);
    let text = format_weight_enumerator(&e1);
    let ok = h1.values == [2, 4, 6]
        && h2.values == [2, 3, 6]
        && e1 == e2
        && text == "x^6 + 3x^4y^2 + 3x^2y^4 + y^6";
    Ok((ok, format!("d(C1)={:?}, d(C2)={:?}, W={text}", h1.values, h2.values)))
}

fn isospectral(limits: &Limits) -> Outcome {
    let want = vec![(int(1), 12), (int(2), 60), (int(3), 160), (int(4), 252)];
    let a = enumerate::theta_spectrum(&builtin_lattice("a2_c1")?, &int(4), limits.max_vectors)?;
    let b = enumerate::theta_spectrum(&builtin_lattice("a2_c2")?, &int(4), limits.max_vectors)?;
    Ok((a.pairs() == want && b.pairs() == want, format!("both {}", a.to_q_series())))
}

fn series_a4_c3(limits: &Limits) -> Outcome {
    let lattice = builtin_lattice("a4_c3")?;
    let theta = enumerate::theta_spectrum(&lattice, &rat(9, 4), limits.max_vectors)?;
    let want = vec![(int(1), 12), (rat(7, 4), 16), (int(2), 8), (rat(9, 4), 32)];
    let second = gts::generalized_theta(&lattice, 2, 1, limits)?;
    let lead = &second.terms[0];
    let ok = theta.pairs() == want && lead.mu == rat(3, 4) && lead.count == 144 && lead.guaranteed;
    Ok((ok, format!("{}; leading second-order term {}", theta.to_q_series(), second.to_q_series())))
}

fn ratio_a4_c3(limits: &Limits) -> Outcome {
    let lattice = builtin_lattice("a4_c3")?;
    let tol = analytic::DEFAULT_TOL;
    let at_one = analytic::ratio(&lattice, 1.0, tol, limits)?;
    let scan = analytic::ratio_scan(&lattice, 0.25, 4.0, analytic::DEFAULT_STEPS, tol, limits)?;
    let report = analytic::extremum_scan(&scan)?;
    let ok = (at_one - 1.0026).abs() <= 1e-3 && scan.min_delta() > 1.0 && report.classification == Extremum::Max;
    Ok((
        ok,
        format!(
            "Delta(1)={at_one:.6}, min over grid {:.10}, {} at tau={:.4}",
            scan.min_delta(),
            report.classification,
            report.tau
        ),
    ))
}

fn ratio_a4_c4(limits: &Limits) -> Outcome {
    let lattice = builtin_lattice("a4_c4")?;
    let scan = analytic::ratio_scan(&lattice, 0.25, 4.0, analytic::DEFAULT_STEPS, analytic::DEFAULT_TOL, limits)?;
    let report = analytic::extremum_scan(&scan)?;
    let above = scan.deltas.iter().filter(|&&d| d > 1.0).count();
    let ok = report.classification == Extremum::Min && above > 0;
    Ok((
        ok,
        format!(
            "{} at tau={:.4} (Delta={:.6}), {above} grid points above 1, max {:.6}",
            report.classification,
            report.tau,
            report.delta,
            scan.max_delta()
        ),
    ))
}

/// A random lattice of dimension `dim` from a small integer basis divided by
/// a random denominator.
pub fn random_lattice(rng: &mut impl Rng, dim: usize) -> QuadraticLattice {
    loop {
        let rows: IntRows = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        if exact::integer_rank(&rows) < dim {
            continue;
        }
        let d = rng.gen_range(1..=3);
        let basis = RationalMatrix::from_int_rows(&rows)
            .expect("square")
            .scaled(&rat(1, d));
        return QuadraticLattice::from_rational_basis(&basis).expect("nonsingular basis");
    }
}

fn random_full_rank(rng: &mut impl Rng, r: usize, n: usize) -> IntRows {
    loop {
        let rows: IntRows = (0..r)
            .map(|_| (0..n).map(|_| rng.gen_range(-4..=4)).collect())
            .collect();
        if exact::integer_rank(&rows) == r {
            return rows;
        }
    }
}

/// Naive enumeration over the box `|u_i| <= sqrt(bound (G^-1)_ii) + 1`.
fn box_oracle(lattice: &QuadraticLattice, bound: &Rational) -> Vec<Vec<i64>> {
    let n = lattice.dim();
    let inverse = lattice.gram().inverse().ok().flatten().expect("positive definite");
    let reach: Vec<i64> = (0..n)
        .map(|i| (exact::to_f64(&(bound * inverse.get(i, i)))).sqrt().floor() as i64 + 1)
        .collect();
    let mut out = Vec::new();
    let mut u: Vec<i64> = reach.iter().map(|r| -r).collect();
    loop {
        if u.iter().any(|&c| c != 0) && lattice.norm_sq(&u) <= *bound {
            out.push((lattice.norm_sq(&u), u.clone()));
        }
        let mut i = 0;
        while i < n && u[i] == reach[i] {
            u[i] = -reach[i];
            i += 1;
        }
        if i == n {
            break;
        }
        u[i] += 1;
    }
    out.sort();
    out.into_iter().map(|(_, u)| u).collect()
}

fn properties(limits: &Limits, seed: u64) -> Outcome {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();

    for _ in 0..20 {
        let dim = rng.gen_range(1..=4);
        let lattice = random_lattice(&mut rng, dim);
        let c = rat(rng.gen_range(1..=6), rng.gen_range(1..=6));
        if !dsp::check_scaling_law(&lattice, &c, limits)?.all_pass() {
            failures.push(format!("scaling law for c={}", format_rational(&c)));
        }
    }

    let mut names: Vec<String> = BUILTIN_LATTICES.iter().map(|s| s.to_string()).collect();
    names.push("zn:3".into());
    for name in &names {
        let rows = dsp::duality_cross_check(&builtin_lattice(name)?, limits)?;
        if rows.iter().any(|r| r.direct != r.via_dual) {
            failures.push(format!("duality on {name}"));
        }
    }

    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let r = rng.gen_range(1..=n);
        let u = random_full_rank(&mut rng, r, n);
        let lattice = random_lattice(&mut rng, n);
        let s = exact::saturate_rows(&u)?;
        let k = exact::saturation_index(&u)?;
        let k2 = Rational::from_integer(&k * &k);
        let mut stacked = s.clone();
        stacked.extend(u.iter().cloned());
        let law = lattice.subset_gram_det(&u)? == k2 * lattice.subset_gram_det(&s)?;
        let same_span = exact::integer_rank(&stacked) == r;
        let idempotent = exact::saturate_rows(&s)? == s && exact::saturation_index(&s)?.is_one();
        if !(law && same_span && idempotent && k.is_positive()) {
            failures.push(format!("saturation law for {u:?}"));
        }
    }

    let tol = analytic::DEFAULT_TOL;
    for (name, tau) in [("a2", 0.25), ("a2", 1.0), ("zn:3", 0.5), ("d4", 0.5), ("a4_c3", 1.0), ("a4_c4", 2.0)] {
        let mut evaluator = analytic::ThetaEvaluator::new(&builtin_lattice(name)?, limits);
        let gap = evaluator.doubling_gap(tau, tol)?;
        if gap >= tol {
            failures.push(format!("doubling moved theta of {name} at tau={tau} by {gap:e}"));
        }
    }

    for _ in 0..30 {
        let dim = rng.gen_range(1..=3);
        let lattice = random_lattice(&mut rng, dim);
        let bound = rat(rng.gen_range(1..=24), 4);
        let fast: Vec<Vec<i64>> = enumerate::vectors_within(&lattice, &bound, limits.max_vectors)?
            .into_iter()
            .map(|v| v.coeffs)
            .collect();
        if fast != box_oracle(&lattice, &bound) {
            failures.push(format!("box oracle at bound {}", format_rational(&bound)));
        }
    }

    let detail = if failures.is_empty() {
        "scaling x20, duality on registry, saturation x50, doubling x6, box oracle x30".to_string()
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

fn strict_example3(limits: &Limits) -> Vec<Check> {
    let cases = [("a2_c1", [(int(1), 300), (int(2), 3936), (int(3), 9984)]), (
        "a2_c2",
        [(rat(3, 4), 144), (int(1), 92), (rat(7, 4), 1920)],
    )];
    let mut out = Vec::new();
    for (name, want) in cases {
        let id = format!("E3-{name}");
        let check = timed(&id, &format!("second-order terms of {name}"), 120.0, || {
            let series = gts::generalized_theta(&builtin_lattice(name)?, 2, 3, limits)?;
            let got = series.pairs();
            let leading_ok = got[0] == want[0];
            let others: Vec<String> = got
                .iter()
                .zip(&want)
                .skip(1)
                .map(|((mu, c), (wmu, wc))| {
                    format!("q^{} {c} (reference q^{} {wc})", format_rational(mu), format_rational(wmu))
                })
                .collect();
            Ok((
                leading_ok,
                format!(
                    "leading {}:{}; {}; {}",
                    format_rational(&got[0].0),
                    got[0].1,
                    others.join(", "),
                    if got[1..] == want[1..] { "all match" } else { "non-leading terms differ" }
                ),
            ))
        });
        let status = match check.status {
            Status::Pass if check.detail.ends_with("non-leading terms differ") => Status::Warn,
            s => s,
        };
        out.push(Check { status, ..check });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_oracle_matches_on_a2() {
        let a2 = builtin_lattice("a2").unwrap();
        let fast: Vec<Vec<i64>> = enumerate::vectors_within(&a2, &int(7), 1000)
            .unwrap()
            .into_iter()
            .map(|v| v.coeffs)
            .collect();
        assert_eq!(fast, box_oracle(&a2, &int(7)));
        assert_eq!(fast.len(), 30);
    }

    #[test]
    fn report_rendering() {
        let report = ReproReport {
            checks: vec![timed("x", "trivial", 1.0, || Ok((true, "fine".into())))],
        };
        assert!(report.passed());
        assert!(report.render().starts_with("PASS  x"));
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["checks"][0]["status"], "PASS");
    }
}
