//! Worked examples and reduced property sweeps, one line per check.

use std::process::ExitCode;
use std::sync::Arc;

use holant_core::basis::dense;
use holant_core::{
    check_transform, default_tolerance, factored_pairing_check, hat_transform, holant_value, holant_value_transformed,
    pairing_form, random_basis, random_instance, reconstruct, relative_error, verify_holant, verify_with_fault,
    Alphabet, BAssignment, Basis, EdgeSet, FaultInjection, FnTable, HolantInstance, InstanceSpec, Result, Scalar,
    Scope, Side,
};

struct Check {
    name: &'static str,
    outcome: Result<Option<String>>,
}

fn spec(k: usize, n: usize, p: usize, r: usize) -> InstanceSpec {
    InstanceSpec { alphabet_size: k, edge_count: n, generator_parts: p, recognizer_parts: r, magnitude: 1.0 }
}

/// Deterministic sweep shape for `seed`: |A| in {2, 3}, |E| in 1..=max_edges.
fn shape(seed: u64, max_edges: usize) -> (usize, usize, usize, usize) {
    let k = 2 + (seed % 2) as usize;
    let n = 1 + (seed / 2) as usize % max_edges;
    let p = 1 + (seed / 7) as usize % n;
    let r = 1 + (seed / 11) as usize % n;
    (k, n, p, r)
}

fn fail(msg: String) -> Result<Option<String>> {
    Ok(Some(format!("FAILED: {msg}")))
}

fn worked_example() -> Result<Option<String>> {
    let a = Arc::new(Alphabet::numeric(2)?);
    let e = Arc::new(EdgeSet::new(["e"])?);
    let table = |v: [f64; 2]| FnTable::new(a.clone(), Scope::full(e.clone()), v.map(|x| Scalar::new(x, 0.0)).to_vec());
    let (g, h) = (table([2.0, 3.0])?, table([5.0, 7.0])?);
    let inst = HolantInstance::new(a.clone(), e.clone(), vec![g.clone()], vec![h.clone()])?;
    let basis = Basis::cumulative(a);
    let report = verify_holant(&inst, &basis, None)?;
    let ghat = hat_transform(&g, &basis)?;
    let hcheck = check_transform(&h, &basis)?;
    let want = |v: [f64; 2]| v.map(|x| Scalar::new(x, 0.0)).to_vec();
    if report.lhs != Scalar::new(31.0, 0.0) || report.rhs != Scalar::new(31.0, 0.0) {
        return fail(format!("lhs {} rhs {}", report.lhs, report.rhs));
    }
    if ghat.values() != want([-1.0, 3.0]) || hcheck.values() != want([5.0, 12.0]) {
        return fail(format!("hat {:?} check {:?}", ghat.values(), hcheck.values()));
    }
    Ok(None)
}

fn standard_fixed_point() -> Result<Option<String>> {
    for seed in 0..20 {
        let (k, n, p, r) = shape(seed, 6);
        let inst = random_instance(seed, spec(k, n, p, r))?;
        let std = Basis::standard(inst.alphabet().clone());
        if holant_value_transformed(&inst, &std)? != holant_value(&inst)? {
            return fail(format!("seed {seed}"));
        }
    }
    Ok(Some("20 instances bit-exact".into()))
}

fn invariance_sweep() -> Result<Option<String>> {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let (k, n, p, r) = shape(seed, 6);
        let inst = random_instance(seed, spec(k, n, p, r))?;
        let basis = random_basis(seed, k, 100.0)?;
        let report = verify_holant(&inst, &basis, None)?;
        if !report.pass {
            return fail(format!("seed {seed}: rel_error {:e} > {:e}", report.rel_error, report.tolerance));
        }
        worst = worst.max(report.rel_error);
    }
    Ok(Some(format!("100 instances, worst rel_error {worst:.2e}")))
}

fn paths_agree() -> Result<Option<String>> {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let (k, n, p, r) = shape(seed, 6);
        let inst = random_instance(seed, spec(k, n, p, r))?;
        let gap = relative_error(holant_value(&inst)?, pairing_form(&inst)?);
        if gap > 1e-12 {
            return fail(format!("seed {seed}: gap {gap:e}"));
        }
        worst = worst.max(gap);
    }
    Ok(Some(format!("100 instances, worst gap {worst:.2e}")))
}

fn max_gap(a: &FnTable, b: &FnTable) -> f64 {
    let scale = a.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm() / scale).fold(0.0, f64::max)
}

fn transforms() -> Result<Option<String>> {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let k = 2 + (seed % 3) as usize;
        let n = 1 + (seed / 3) as usize % 4;
        let f = random_instance(seed, spec(k, n, 1, 1))?.generators()[0].clone();
        let basis = random_basis(seed, k, 100.0)?;
        let hat = hat_transform(&f, &basis)?;
        let gaps = [
            max_gap(&f, &reconstruct(&hat, &basis)?),
            max_gap(&hat, &dense::hat_transform(&f, &basis)?),
            max_gap(&check_transform(&f, &basis)?, &dense::check_transform(&f, &basis)?),
        ];
        for g in gaps {
            if g > 1e-10 {
                return fail(format!("seed {seed}: gap {g:e}"));
            }
            worst = worst.max(g);
        }
    }
    Ok(Some(format!("50 tables, worst gap {worst:.2e}")))
}

fn factorization() -> Result<Option<String>> {
    for seed in 0..50 {
        let (k, n, p, _) = shape(seed, 5);
        let inst = random_instance(seed, spec(k, n, p, 1))?;
        let basis = random_basis(seed, k, 100.0)?;
        let b = BAssignment::from_index(Scope::full(inst.edges().clone()), &basis, seed as usize % k.pow(n as u32))?;
        let (lhs, rhs) = factored_pairing_check(inst.generators(), &b, &basis)?;
        if relative_error(lhs, rhs) > 1e-12 {
            return fail(format!("seed {seed}: {lhs} vs {rhs}"));
        }
    }
    Ok(Some("50 draws".into()))
}

fn negative_control() -> Result<Option<String>> {
    for seed in 0..20u64 {
        let inst = random_instance(seed, spec(2, 4, 2, 2))?;
        let basis = random_basis(seed, 2, 10.0)?;
        let side = if seed % 2 == 0 { Side::Generator } else { Side::Recognizer };
        let report = verify_with_fault(&inst, &basis, None, FaultInjection { side, index: seed as usize % 2 })?;
        if report.pass {
            return fail(format!("seed {seed}: corrupted table still passed"));
        }
    }
    Ok(Some("20 corrupted runs rejected".into()))
}

fn tolerance_floor() -> Result<Option<String>> {
    let basis = Basis::standard(Arc::new(Alphabet::numeric(3)?));
    let t = default_tolerance(&basis, 4);
    if t != 1e-9 {
        return fail(format!("{t:e}"));
    }
    Ok(None)
}

pub fn run() -> ExitCode {
    let checks = [
        Check { name: "worked example (31)", outcome: worked_example() },
        Check { name: "standard basis fixed point", outcome: standard_fixed_point() },
        Check { name: "holant invariance sweep", outcome: invariance_sweep() },
        Check { name: "direct sum vs pairing form", outcome: paths_agree() },
        Check { name: "fast vs dense transforms", outcome: transforms() },
        Check { name: "pairing factorization", outcome: factorization() },
        Check { name: "negative control", outcome: negative_control() },
        Check { name: "tolerance floor", outcome: tolerance_floor() },
    ];
    let mut ok = true;
    for c in &checks {
        let (pass, detail) = match &c.outcome {
            Ok(None) => (true, String::new()),
            Ok(Some(d)) if d.starts_with("FAILED") => (false, d.clone()),
            Ok(Some(d)) => (true, d.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        ok &= pass;
        println!("[{}] {:<28} {}", if pass { "PASS" } else { "FAIL" }, c.name, detail);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
