//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or runs over its time budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use latheta::analytic::{self, Extremum};
use latheta::codes::format_weight_enumerator;
use latheta::dsp::{self, duality_cross_check};
use latheta::exact::{int, rat, IntRows};
use latheta::gts::{generalized_theta, generalized_theta_with, GtsOptions};
use latheta::{
    builtin_code, builtin_lattice, exact, format_rational, theta_spectrum, vectors_within, Limits, QuadraticLattice,
    Rational, RationalMatrix,
};
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lat(name: &str) -> QuadraticLattice {
    builtin_lattice(name).expect("registry lattice")
}

fn series(pairs: &[(Rational, u64)]) -> String {
    pairs
        .iter()
        .map(|(m, c)| format!("{}:{c}", format_rational(m)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn c1_theta_a2(l: &Limits) -> Verdict {
    let s = theta_spectrum(&lat("a2"), &int(9), l.max_vectors).map_err(|e| e.to_string())?;
    let want = [(int(1), 6), (int(3), 6), (int(4), 6), (int(7), 12), (int(9), 6)];
    ensure(s.pairs() == want, series(&s.pairs()))
}

fn c2_gts_a2(l: &Limits) -> Verdict {
    let a2 = lat("a2");
    let want = [(rat(3, 4), 36), (int(3), 156), (rat(27, 4), 168), (int(12), 380)];
    let ball = generalized_theta(&a2, 2, 4, l).map_err(|e| e.to_string())?;
    let boxed = generalized_theta_with(&a2, 2, 4, GtsOptions { coeff_box: Some(5) }, l).map_err(|e| e.to_string())?;
    let ok = ball.pairs()[..3] == want[..3] && ball.terms[3].mu == int(12) && boxed.pairs() == want;
    ensure(
        ok,
        format!(
            "{} (term 4: ball count {}, coefficient box 5 count {})",
            boxed.to_q_series(),
            ball.terms[3].count,
            boxed.terms[3].count
        ),
    )
}

fn c3_d4(l: &Limits) -> Verdict {
    let a = dsp::norm_hierarchy(&lat("d4"), l).map_err(|e| e.to_string())?;
    let b = dsp::norm_hierarchy(&lat("d4bar"), l).map_err(|e| e.to_string())?;
    let ok = a.values == [int(2), int(3), int(4), int(4)] && b.values == [int(1), rat(3, 4), rat(1, 2), rat(1, 4)];
    ensure(ok, format!("D4 {:?} / D4bar {:?}", a.rounded(4), b.rounded(4)))
}

fn c4_code_hierarchies(l: &Limits) -> Verdict {
    let three_quarters = rat(3, 4);
    let half = rat(1, 2);
    let one = int(1);
    let unstable = vec![
        one.clone(),
        three_quarters.clone(),
        half,
        three_quarters,
        one.clone(),
        one.clone(),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, want) in [("a2_c1", vec![one; 6]), ("a2_c2", unstable.clone()), ("a4_c3", unstable)] {
        let h = dsp::norm_hierarchy(&lat(name), l).map_err(|e| e.to_string())?;
        ok &= h.values == want;
        notes.push(format!("{name} exact_flags={:?}", h.exact_flags));
    }
    let h = dsp::norm_hierarchy(&lat("a4_c4"), l).map_err(|e| e.to_string())?;
    let r = h.rounded(2);
    ok &= r == [0.75, 0.88, 0.77, 0.88, 0.75, 1.0];
    notes.push(format!(
        "a4_c4 {} exact_flags={:?}",
        h.values.iter().map(format_rational).collect::<Vec<_>>().join(","),
        h.exact_flags
    ));
    ensure(ok, notes.join("; "))
}

fn c5_stability(l: &Limits) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, stable) in [("a2_c1", true), ("a2_c2", false), ("a4_c3", false), ("a4_c4", false)] {
        let lattice = lat(name);
        let cert = dsp::is_stable(&lattice, l).map_err(|e| e.to_string())?;
        ok &= cert.stable == stable;
        match &cert.witness {
            Some(w) => {
                let det = lattice.subset_gram_det(w).map_err(|e| e.to_string())?;
                ok &= !stable && det < Rational::one() && w.len() == cert.violating_r.unwrap_or(0);
                notes.push(format!("{name}: r={} det={}", w.len(), format_rational(&det)));
            }
            None => {
                ok &= stable;
                notes.push(format!("{name}: stable"));
            }
        }
    }
    ensure(ok, notes.join(", "))
}

fn c6_codes(_: &Limits) -> Verdict {
    let c1 = builtin_code("c1").map_err(|e| e.to_string())?;
    let c2 = builtin_code("c2").map_err(|e| e.to_string())?;
    let h1 = c1.weight_hierarchy().map_err(|e| e.to_string())?.values;
    let h2 = c2.weight_hierarchy().map_err(|e| e.to_string())?.values;
    let w1 = c1.weight_enumerator().map_err(|e| e.to_string())?;
    let w2 = c2.weight_enumerator().map_err(|e| e.to_string())?;
    let text = format_weight_enumerator(&w1);
    let ok = h1 == [2, 4, 6] && h2 == [2, 3, 6] && w1 == w2 && text == "x^6 + 3x^4y^2 + 3x^2y^4 + y^6";
    ensure(ok, format!("{h1:?} {h2:?} {text}"))
}

fn c7_isospectral(l: &Limits) -> Verdict {
    let want = [(int(1), 12), (int(2), 60), (int(3), 160), (int(4), 252)];
    let a = theta_spectrum(&lat("a2_c1"), &int(4), l.max_vectors).map_err(|e| e.to_string())?;
    let b = theta_spectrum(&lat("a2_c2"), &int(4), l.max_vectors).map_err(|e| e.to_string())?;
    ensure(a.pairs() == want && b.pairs() == want, format!("{} | {}", series(&a.pairs()), series(&b.pairs())))
}

fn c8_a4_c3(l: &Limits) -> Verdict {
    let lattice = lat("a4_c3");
    let s = theta_spectrum(&lattice, &rat(9, 4), l.max_vectors).map_err(|e| e.to_string())?;
    let want = [(int(1), 12), (rat(7, 4), 16), (int(2), 8), (rat(9, 4), 32)];
    let g = generalized_theta(&lattice, 2, 1, l).map_err(|e| e.to_string())?;
    let t = &g.terms[0];
    ensure(
        s.pairs() == want && t.mu == rat(3, 4) && t.count == 144 && t.guaranteed,
        format!("{} ; {} guaranteed={}", series(&s.pairs()), g.to_q_series(), t.guaranteed),
    )
}

fn c9_ratio_a4_c3(l: &Limits) -> Verdict {
    let lattice = lat("a4_c3");
    let d1 = analytic::ratio(&lattice, 1.0, 1e-9, l).map_err(|e| e.to_string())?;
    let scan = analytic::ratio_scan(&lattice, 0.25, 4.0, 200, 1e-9, l).map_err(|e| e.to_string())?;
    let ext = analytic::extremum_scan(&scan).map_err(|e| e.to_string())?;
    let all_above = scan.deltas.iter().all(|&d| d > 1.0);
    ensure(
        (d1 - 1.0026).abs() <= 1e-3 && all_above && ext.classification == Extremum::Max,
        format!("Delta(1)={d1:.6} all>1={all_above} tau~1: {}", ext.classification),
    )
}

fn c10_ratio_a4_c4(l: &Limits) -> Verdict {
    let scan = analytic::ratio_scan(&lat("a4_c4"), 0.25, 4.0, 200, 1e-9, l).map_err(|e| e.to_string())?;
    let ext = analytic::extremum_scan(&scan).map_err(|e| e.to_string())?;
    let above = scan.deltas.iter().any(|&d| d > 1.0);
    ensure(
        ext.classification == Extremum::Min && above,
        format!("tau~1: {} some>1={above}", ext.classification),
    )
}

fn random_basis_lattice(rng: &mut StdRng, n: usize) -> QuadraticLattice {
    loop {
        let rows: IntRows = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=3)).collect()).collect();
        if exact::integer_rank(&rows) == n {
            let b = RationalMatrix::from_int_rows(&rows).unwrap();
            return QuadraticLattice::from_rational_basis(&b).unwrap();
        }
    }
}

fn c11_properties(l: &Limits) -> Verdict {
    let mut rng = StdRng::seed_from_u64(2718);
    let mut failures = Vec::new();

    // Scaling law on 20 random pairs.
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let lattice = random_basis_lattice(&mut rng, n);
        let c = rat(rng.gen_range(1..=7), rng.gen_range(1..=5));
        let base = dsp::norm_hierarchy(&lattice, l).map_err(|e| e.to_string())?;
        let scaled = dsp::norm_hierarchy(&lattice.scale(&c).unwrap(), l).map_err(|e| e.to_string())?;
        for (r, (b, s)) in base.values.iter().zip(&scaled.values).enumerate() {
            if *s != num_traits::pow(c.clone(), r + 1) * b {
                failures.push(format!("scaling r={} c={}", r + 1, format_rational(&c)));
            }
        }
    }

    // Duality on every registry lattice.
    for name in ["a2", "d4", "d4bar", "a2_c1", "a2_c2", "a4_c3", "a4_c4", "zn:4"] {
        for row in duality_cross_check(&lat(name), l).map_err(|e| e.to_string())? {
            if row.direct != row.via_dual {
                failures.push(format!("duality {name} r={}", row.r));
            }
        }
    }

    // Saturation index^2 law.
    for _ in 0..40 {
        let n = rng.gen_range(2..=5);
        let r = rng.gen_range(1..=n);
        let u: IntRows = (0..r).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        if exact::integer_rank(&u) < r {
            continue;
        }
        let g = random_basis_lattice(&mut rng, n);
        let s = exact::saturate_rows(&u).unwrap();
        let k = exact::saturation_index(&u).unwrap();
        let lhs = g.subset_gram_det(&u).unwrap();
        let rhs = g.subset_gram_det(&s).unwrap() * Rational::from_integer(&k * &k);
        if lhs != rhs {
            failures.push(format!("saturation {u:?}"));
        }
    }

    // Enumeration doubling: a theta value is stable when the bound doubles.
    for (name, tau) in [("a2", 0.3), ("d4bar", 1.0), ("a4_c3", 1.5), ("zn:2", 0.25)] {
        let mut ev = analytic::ThetaEvaluator::new(&lat(name), l);
        let gap = ev.doubling_gap(tau, 1e-9).map_err(|e| e.to_string())?;
        if gap >= 1e-9 {
            failures.push(format!("doubling {name} {tau}: {gap:e}"));
        }
    }

    // Box oracle in dimension <= 3.
    for _ in 0..25 {
        let n = rng.gen_range(1..=3);
        let lattice = random_basis_lattice(&mut rng, n);
        let bound = rat(rng.gen_range(1..=40), 2);
        let inv = lattice.gram().inverse().unwrap().unwrap();
        let reach: Vec<i64> = (0..n)
            .map(|i| exact::to_f64(&(&bound * inv.get(i, i))).sqrt() as i64 + 1)
            .collect();
        let mut naive: Vec<(Rational, Vec<i64>)> = Vec::new();
        let mut u = vec![0i64; n];
        fn rec(
            i: usize,
            u: &mut Vec<i64>,
            reach: &[i64],
            lattice: &QuadraticLattice,
            bound: &Rational,
            out: &mut Vec<(Rational, Vec<i64>)>,
        ) {
            if i == u.len() {
                let norm = lattice.norm_sq(u);
                if u.iter().any(|&c| c != 0) && norm <= *bound {
                    out.push((norm, u.clone()));
                }
                return;
            }
            for c in -reach[i]..=reach[i] {
                u[i] = c;
                rec(i + 1, u, reach, lattice, bound, out);
            }
        }
        rec(0, &mut u, &reach, &lattice, &bound, &mut naive);
        naive.sort();
        let fast = vectors_within(&lattice, &bound, l.max_vectors).map_err(|e| e.to_string())?;
        let fast: Vec<(Rational, Vec<i64>)> = fast.into_iter().map(|v| (v.norm_sq, v.coeffs)).collect();
        if fast != naive {
            failures.push(format!("box oracle n={n} bound={}", format_rational(&bound)));
        }
    }

    ensure(
        failures.is_empty(),
        if failures.is_empty() {
            "scaling x20, duality x8 lattices, saturation, doubling, box oracle".into()
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let limits = Limits::default();
    type Criterion = fn(&Limits) -> Verdict;
    let criteria: [(u32, &str, u64, Criterion); 11] = [
        (1, "theta series of A2", 1, c1_theta_a2),
        (2, "second-order series of A2", 120, c2_gts_a2),
        (3, "norm hierarchies of D4 and D4/2", 30, c3_d4),
        (4, "norm hierarchies of A2(C1), A2(C2), A4(C3), A4(C4)", 600, c4_code_hierarchies),
        (5, "stability verdicts with witnesses", 600, c5_stability),
        (6, "weight hierarchies and enumerators of C1, C2", 1, c6_codes),
        (7, "theta series of A2(C1) and A2(C2)", 30, c7_isospectral),
        (8, "theta series and leading second-order term of A4(C3)", 120, c8_a4_c3),
        (9, "theta ratio of A4(C3) on [1/4, 4]", 60, c9_ratio_a4_c3),
        (10, "theta ratio of A4(C4) on [1/4, 4]", 60, c10_ratio_a4_c4),
        (11, "property families", 300, c11_properties),
    ];
    let mut failed = 0;
    for (id, title, budget, check) in criteria {
        let start = Instant::now();
        let verdict = check(&limits);
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (status, detail) = match (&verdict, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d} (over {budget} s budget)")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {id:>2}: {title} [{:.2} s / {budget} s] {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
