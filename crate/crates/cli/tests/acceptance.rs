//! Acceptance suite. Every criterion is an exact rational identity; the
//! harness prints one PASS/FAIL line per criterion and exits nonzero if any
//! fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use bdk_core::durrmeyer::{apply_operator, compose_apply, composition_coefficients, DurrmeyerOperator};
use bdk_core::kernels::{
    inner_sum_lemma, kernel_closed_twofold, kernel_definition_threefold, kernel_definition_twofold,
    kernel_legendre, kernel_single, univariate_threefold_closed, univariate_twofold_closed,
};
use bdk_core::rational::{int, ratio};
use bdk_core::{
    BarycentricPoint, CartesianPolynomial, KernelPolynomial, OperatorSpec, Rational,
    VerificationReport,
};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Two-fold degree caps per dimension.
const TWOFOLD_CAPS: [(usize, u32); 3] = [(1, 8), (2, 6), (3, 4)];

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn kernel_diff(left: &KernelPolynomial, right: &KernelPolynomial) -> String {
    match left.first_difference(right) {
        Some(t) => format!(
            "x^{:?} y^{:?}: {} vs {}",
            t.x_exp, t.y_exp, t.left, t.right
        ),
        None => "equal".into(),
    }
}

fn monomials(d: usize, max_degree: u32) -> Vec<CartesianPolynomial> {
    let mut out = Vec::new();
    let mut exp = vec![0u32; d];
    loop {
        if exp.iter().sum::<u32>() <= max_degree {
            out.push(CartesianPolynomial::monomial(d, exp.clone(), Rational::one()));
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            exp[i] += 1;
            if exp[i] <= max_degree {
                break;
            }
            exp[i] = 0;
            i += 1;
        }
    }
}

fn twofold_multivariate() -> Outcome {
    let mut count = 0;
    for (d, cap) in TWOFOLD_CAPS {
        for m in 0..=cap {
            for n in 0..=cap {
                let def = kernel_definition_twofold(m, n, d).map_err(|e| e.to_string())?;
                let closed = kernel_closed_twofold(m, n, d).map_err(|e| e.to_string())?.to_canonical();
                ensure(def == closed, || {
                    format!("d={d} m={m} n={n}: {}", kernel_diff(&def, &closed))
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} kernels"))
}

fn twofold_univariate() -> Outcome {
    let mut count = 0;
    for m in 0..=10 {
        for n in 0..=10 {
            let uni = univariate_twofold_closed(m, n).map_err(|e| e.to_string())?.to_canonical();
            let closed = kernel_closed_twofold(m, n, 1).map_err(|e| e.to_string())?.to_canonical();
            let def = kernel_definition_twofold(m, n, 1).map_err(|e| e.to_string())?;
            ensure(uni == closed, || format!("m={m} n={n} vs closed: {}", kernel_diff(&uni, &closed)))?;
            ensure(uni == def, || format!("m={m} n={n} vs definition: {}", kernel_diff(&uni, &def)))?;
            count += 1;
        }
    }
    Ok(format!("{count} kernels"))
}

fn legendre() -> Outcome {
    let mut count = 0;
    for m in 0..=8 {
        for n in 0..=8 {
            let leg = kernel_legendre(m, n).map_err(|e| e.to_string())?;
            let uni = univariate_twofold_closed(m, n).map_err(|e| e.to_string())?.to_canonical();
            ensure(leg == uni, || format!("m={m} n={n}: {}", kernel_diff(&leg, &uni)))?;
            count += 1;
        }
    }
    Ok(format!("{count} kernels"))
}

fn threefold() -> Outcome {
    let mut count = 0;
    for a in 0..=5 {
        for b in 0..=5 {
            for c in 0..=5 {
                let def = kernel_definition_threefold(a, b, c, 1).map_err(|e| e.to_string())?;
                let closed = univariate_threefold_closed(a, b, c).map_err(|e| e.to_string())?;
                let canon = closed.to_canonical();
                ensure(def == canon, || format!("({a},{b},{c}): {}", kernel_diff(&def, &canon)))?;
                for (p, q, r) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                    let perm = univariate_threefold_closed(p, q, r).map_err(|e| e.to_string())?;
                    ensure(perm.to_canonical() == canon, || {
                        format!("({a},{b},{c}) differs from permutation ({p},{q},{r})")
                    })?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} triples, 6 permutations each"))
}

fn linear_combination() -> Outcome {
    let mut count = 0;
    for d in 1..=2 {
        for m in 0..=5 {
            for n in 0..=5 {
                let c = composition_coefficients(m, n, d).map_err(|e| e.to_string())?;
                let sum: Rational = c.iter().sum();
                ensure(sum.is_one(), || format!("d={d} m={m} n={n}: sum {sum}"))?;
                ensure(c.iter().all(|v| v > &Rational::zero()), || {
                    format!("d={d} m={m} n={n}: nonpositive coefficient")
                })?;
                let mut combo = KernelPolynomial::zero(d);
                for (k, ck) in c.iter().enumerate() {
                    let single = kernel_single(k as u32, d).map_err(|e| e.to_string())?;
                    combo = combo
                        .checked_add(&single.to_canonical().scale(ck))
                        .map_err(|e| e.to_string())?;
                }
                let def = kernel_definition_twofold(m, n, d).map_err(|e| e.to_string())?;
                ensure(combo == def, || format!("d={d} m={m} n={n}: {}", kernel_diff(&combo, &def)))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} compositions"))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> BarycentricPoint {
    let coords = (0..d)
        .map(|_| {
            let q = rng.gen_range(1..=97i64);
            ratio(rng.gen_range(0..=q), q)
        })
        .collect();
    BarycentricPoint::new(coords).expect("d >= 1")
}

fn inner_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e44a);
    let mut count = 0;
    for d in 1..=2usize {
        for b in 0..=4 {
            for beta in bdk_core::combinat::enumerate_multi_indices(b, d as i64).map_err(|e| e.to_string())? {
                let points: Vec<_> = (0..5).map(|_| random_point(&mut rng, d)).collect();
                for n in 0..=4 {
                    for y in &points {
                        let (l, r) = inner_sum_lemma(n, &beta, y).map_err(|e| e.to_string())?;
                        ensure(l == r, || format!("n={n} beta={beta} y={:?}: {l} vs {r}", y.coords()))?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} evaluations"))
}

fn operator_invariants() -> Outcome {
    let mut count = 0;
    for d in 1..=2 {
        let basis = monomials(d, 4);
        let one = CartesianPolynomial::one(d);
        let mut images = Vec::new();
        for n in 0..=5 {
            let op = DurrmeyerOperator::new(OperatorSpec::new(n, d).map_err(|e| e.to_string())?);
            ensure(op.apply(&one).map_err(|e| e.to_string())? == one, || {
                format!("d={d} n={n}: M_n 1 != 1")
            })?;
            let img: Vec<_> = basis
                .iter()
                .map(|f| op.apply(f))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for (f, mf) in basis.iter().zip(&img) {
                ensure(mf.integrate_simplex() == f.integrate_simplex(), || {
                    format!("d={d} n={n}: integral of {} not preserved", f.to_json())
                })?;
                for g in &basis {
                    let lhs = mf.inner_product(g).map_err(|e| e.to_string())?;
                    let rhs = f.inner_product(&op.apply(g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, || format!("d={d} n={n}: not self-adjoint on {} , {}", f.to_json(), g.to_json()))?;
                    count += 1;
                }
            }
            images.push(op);
        }
        for m in 0..=5usize {
            for n in m..=5usize {
                for f in &basis {
                    let mn = images[m].apply(&images[n].apply(f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    let nm = images[n].apply(&images[m].apply(f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                    ensure(mn == nm, || format!("d={d} m={m} n={n}: M_m M_n != M_n M_m on {}", f.to_json()))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} identities"))
}

fn stochastic(kind: &str, k: &KernelPolynomial) -> Result<(), String> {
    ensure(k.is_stochastic(), || format!("{kind}: integral over y is {}", k.integrate_y().to_json()))
}

fn stochasticity() -> Outcome {
    let mut count = 0;
    for (d, cap) in TWOFOLD_CAPS {
        for n in 0..=cap {
            let single = kernel_single(n, d).map_err(|e| e.to_string())?;
            stochastic(&format!("single d={d} n={n}"), &single.to_canonical())?;
            count += 1;
            for m in 0..=cap {
                let def = kernel_definition_twofold(m, n, d).map_err(|e| e.to_string())?;
                stochastic(&format!("definition d={d} m={m} n={n}"), &def)?;
                let closed = kernel_closed_twofold(m, n, d).map_err(|e| e.to_string())?;
                stochastic(&format!("closed d={d} m={m} n={n}"), &closed.to_canonical())?;
                count += 2;
                if d == 1 {
                    let uni = univariate_twofold_closed(m, n).map_err(|e| e.to_string())?;
                    stochastic(&format!("univariate m={m} n={n}"), &uni.to_canonical())?;
                    let leg = kernel_legendre(m, n).map_err(|e| e.to_string())?;
                    stochastic(&format!("legendre m={m} n={n}"), &leg)?;
                    count += 2;
                }
            }
        }
    }
    Ok(format!("{count} kernels"))
}

fn first_moment() -> Outcome {
    let x = CartesianPolynomial::variable(1, 1);
    for n in 0..=6u32 {
        let image = apply_operator(OperatorSpec::new(n, 1).map_err(|e| e.to_string())?, &x)
            .map_err(|e| e.to_string())?;
        let denom = int(i64::from(n) + 2);
        let expected = CartesianPolynomial::from_terms(
            1,
            [(vec![0], Rational::one() / &denom), (vec![1], int(n.into()) / &denom)],
        )
        .map_err(|e| e.to_string())?;
        ensure(image == expected, || format!("n={n}: got {}", image.to_json()))?;
    }
    let by_hand = compose_apply(&[OperatorSpec::new(1, 1).map_err(|e| e.to_string())?], &x)
        .map_err(|e| e.to_string())?;
    ensure(by_hand.coefficient(&[0]) == ratio(1, 3) && by_hand.coefficient(&[1]) == ratio(1, 3), || {
        format!("M_1 x = {}", by_hand.to_json())
    })?;
    Ok("n = 0..6".into())
}

fn run_verify(dir: &std::path::Path, name: &str, threads: &str) -> Result<(String, VerificationReport), String> {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_bdk"))
        .args(["verify", "--seed", "12345", "--threads", threads, "--report"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || {
        format!("bdk verify exited with {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))
    })?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let report: VerificationReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((text, report))
}

fn strip_timing(text: &str) -> &str {
    text.find("\n  \"timing\"").map_or(text, |i| &text[..i])
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (text_a, a) = run_verify(dir.path(), "a.json", "0")?;
    let (text_b, b) = run_verify(dir.path(), "b.json", "1")?;
    ensure(strip_timing(&text_a) == strip_timing(&text_b), || "report bodies differ".into())?;
    ensure(a.body_json() == b.body_json(), || "parsed bodies differ".into())?;
    ensure(a.body_sha256 == b.body_sha256, || "body digests differ".into())?;
    Ok(format!("{} checks, body sha256 {}", a.body.summary.total, &a.body_sha256[..16]))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("multivariate two-fold closed form equals definition", twofold_multivariate),
        ("univariate two-fold closed form equals closed and definition", twofold_univariate),
        ("Legendre expansion equals univariate closed form", legendre),
        ("three-fold closed form equals definition with permutation symmetry", threefold),
        ("composition is a positive combination of single operators", linear_combination),
        ("inner-sum identity at seeded rational points", inner_sum),
        ("operator invariants and commutativity", operator_invariants),
        ("every kernel form integrates to one in y", stochasticity),
        ("first moment (nx+1)/(n+2)", first_moment),
        ("verification report is deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{detail}] ({secs:.1} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
