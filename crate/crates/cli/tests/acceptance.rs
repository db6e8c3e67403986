//! Acceptance suite: one `[PASS]` / `[FAIL]` line per criterion.
//!
//! Runs without the libtest harness so the summary lines always reach the
//! output; the process exits non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;

use holant_core::basis::dense;
use holant_core::io::{
    basis_digest, instance_digest, load_basis, load_instance, save_basis, save_instance, save_instance_document, InstanceDocument};
use holant_core::{
    c_tensor, c_tensor_multi, check_transform, factored_pairing_check, hat_transform, holant_value,
    holant_value_transformed, kron, pairing_form, random_basis, random_instance, reconstruct, relative_error,
    verify_holant, vectorize, BAssignment, Basis, EdgeSet, FnTable, HolantInstance, InstanceSpec, Scalar, Scope,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn spec(k: usize, n: usize, p: usize, r: usize, magnitude: f64) -> InstanceSpec {
    InstanceSpec { alphabet_size: k, edge_count: n, generator_parts: p, recognizer_parts: r, magnitude }
}

fn holant(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_holant")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

/// The random-pair sweep: |A| in {2, 3}, |E| in 1..=8, random partitions,
/// bases with condition number at most 100.
fn sweep() -> Vec<(u64, HolantInstance, Basis)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    (0..500)
        .map(|i| {
            let k = rng.random_range(2..=3);
            let n = rng.random_range(1..=8);
            let p = rng.random_range(1..=n);
            let r = rng.random_range(1..=n);
            let seed = rng.random::<u64>();
            let inst = random_instance(seed, spec(k, n, p, r, 1.0)).expect("valid shape");
            let basis = random_basis(seed, k, 100.0).expect("basis found");
            (i, inst, basis)
        })
        .collect()
}

/// Tables for the transform criteria: |A| in {2, 3, 4}, |E| in 1..=5.
fn tables() -> Vec<(FnTable, Basis)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e);
    (0..200)
        .map(|_| {
            let k = rng.random_range(2..=4);
            let n = rng.random_range(1..=5);
            let seed = rng.random::<u64>();
            let f = random_instance(seed, spec(k, n, 1, 1, 1.0)).unwrap().generators()[0].clone();
            (f, random_basis(seed, k, 100.0).unwrap())
        })
        .collect()
}

fn max_rel_gap(a: &[Scalar], b: &[Scalar]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm() / scale).fold(0.0, f64::max)
}

fn ac1(sweep: &[(u64, HolantInstance, Basis)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (i, inst, basis) in sweep {
        let r = verify_holant(inst, basis, None).map_err(|e| e.to_string())?;
        if !r.pass {
            failures.push(format!("#{i} rel {:e} tol {:e}", r.rel_error, r.tolerance));
        }
        worst = worst.max(r.rel_error / r.tolerance);
    }
    if failures.is_empty() {
        Ok(format!("500 pairs, 0 failures, worst rel_error/tol {worst:.2e}"))
    } else {
        Err(format!("{} failures: {}", failures.len(), failures.join("; ")))
    }
}

fn ac2() -> Outcome {
    let out = holant(&["verify", &fixture("fixture31.json")]);
    let text = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(0) || !text.contains("lhs         31\n") || !text.contains("rhs         31\n") {
        return Err(format!("exit {:?}: {text}", out.status.code()));
    }
    let g = String::from_utf8_lossy(&holant(&["transform", &fixture("fixture31.json"), "--side", "gen"]).stdout).into_owned();
    let h = String::from_utf8_lossy(&holant(&["transform", &fixture("fixture31.json"), "--side", "rec"]).stdout).into_owned();
    if !g.ends_with("b1\t-1\nb2\t3\n") || !h.ends_with("b1\t5\nb2\t12\n") {
        return Err(format!("transforms: {g:?} {h:?}"));
    }
    Ok("Holant 31 on both sides, hat (-1, 3), check (5, 12), exit 0".into())
}

fn ac3(sweep: &[(u64, HolantInstance, Basis)]) -> Outcome {
    for (i, inst, _) in sweep.iter().take(100) {
        let std = Basis::standard(inst.alphabet().clone());
        for f in inst.generators() {
            if hat_transform(f, &std).unwrap().values() != f.values() {
                return Err(format!("#{i}: hat is not the identity"));
            }
        }
        for f in inst.recognizers() {
            if check_transform(f, &std).unwrap().values() != f.values() {
                return Err(format!("#{i}: check is not the identity"));
            }
        }
        if holant_value_transformed(inst, &std).unwrap() != holant_value(inst).unwrap() {
            return Err(format!("#{i}: transformed sum differs"));
        }
    }
    Ok("100 instances bit-exact".into())
}

fn ac4(tables: &[(FnTable, Basis)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, (f, basis)) in tables.iter().enumerate() {
        let back = reconstruct(&hat_transform(f, basis).unwrap(), basis).unwrap();
        let gap = max_rel_gap(f.values(), back.values());
        let g = f.with_alphabet(basis.element_alphabet().clone()).unwrap();
        let forth = hat_transform(&reconstruct(&g, basis).unwrap(), basis).unwrap();
        let gap = gap.max(max_rel_gap(g.values(), forth.values()));
        // f-check pairs with each E^[b]-slice to give the coordinates back
        let fc = check_transform(f, basis).unwrap();
        let m = dense::slice_matrix(f.scope(), basis).unwrap();
        let via_m: Vec<Scalar> = (0..m.ncols())
            .map(|c| (0..m.nrows()).map(|r| m[(r, c)] * f.values()[r]).sum())
            .collect();
        let gap = gap.max(max_rel_gap(fc.values(), &via_m));
        if gap > 1e-10 {
            return Err(format!("table {i}: gap {gap:e}"));
        }
        worst = worst.max(gap);
    }
    Ok(format!("200 tables, worst gap {worst:.2e}"))
}

fn ac5(tables: &[(FnTable, Basis)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, (f, basis)) in tables.iter().enumerate() {
        let hat = max_rel_gap(hat_transform(f, basis).unwrap().values(), dense::hat_transform(f, basis).unwrap().values());
        let check =
            max_rel_gap(check_transform(f, basis).unwrap().values(), dense::check_transform(f, basis).unwrap().values());
        let gap = hat.max(check);
        if gap > 1e-10 {
            return Err(format!("table {i}: gap {gap:e}"));
        }
        worst = worst.max(gap);
    }
    Ok(format!("200 tables, worst gap {worst:.2e}"))
}

fn gaussian(f: &FnTable) -> FnTable {
    let values = f.values().iter().map(|v| Scalar::new((v.re * 8.0).round(), (v.im * 8.0).round())).collect();
    FnTable::new(f.alphabet().clone(), f.scope().clone(), values).unwrap()
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc7e);
    for t in 0..100 {
        let k = rng.random_range(2..=3);
        let n = rng.random_range(3..=7);
        let seed = rng.random::<u64>();
        let inst = random_instance(seed, spec(k, n, 3, 1, 1.0)).unwrap();
        let [f, g, h] = [0, 1, 2].map(|i| gaussian(&inst.generators()[i]));
        let fg = c_tensor(&f, &g).unwrap();
        if fg != c_tensor(&g, &f).unwrap() {
            return Err(format!("triple {t}: not commutative"));
        }
        if c_tensor(&fg, &h).unwrap() != c_tensor(&f, &c_tensor(&g, &h).unwrap()).unwrap() {
            return Err(format!("triple {t}: not associative"));
        }
        if c_tensor_multi(&[h.clone(), f.clone(), g.clone()]).unwrap() != c_tensor(&fg, &h).unwrap() {
            return Err(format!("triple {t}: operand order matters"));
        }
        // bilinearity in the first slot
        let alpha = Scalar::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let f2 = inst.generators()[0].clone();
        let lhs = c_tensor(&f.add(&f2.scale(alpha)).unwrap(), &g).unwrap();
        let rhs = fg.add(&c_tensor(&f2, &g).unwrap().scale(alpha)).unwrap();
        let gap = max_rel_gap(lhs.values(), rhs.values());
        if gap > 1e-12 {
            return Err(format!("triple {t}: bilinearity gap {gap:e}"));
        }
        // edge-precedence split: coordinates are the Kronecker product, exactly
        let m = rng.random_range(1..n);
        let edges = Arc::new(EdgeSet::numbered(n).unwrap());
        let a = inst.alphabet().clone();
        let src = random_instance(seed ^ 1, spec(k, n, 1, 1, 1.0)).unwrap();
        let vals = src.generators()[0].values();
        let u = FnTable::new(a.clone(), Scope::from_positions(edges.clone(), (0..m).collect()).unwrap(), vals[..k.pow(m as u32)].to_vec()).unwrap();
        let v = FnTable::new(a, Scope::from_positions(edges, (m..n).collect()).unwrap(), vals[..k.pow((n - m) as u32)].to_vec()).unwrap();
        if vectorize(&c_tensor(&v, &u).unwrap()) != kron(&vectorize(&u), &vectorize(&v)) {
            return Err(format!("triple {t}: Kronecker mismatch"));
        }
    }
    Ok("100 triples: commutative, associative, order-free, bilinear, Kronecker-exact".into())
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfac7);
    let mut worst: f64 = 0.0;
    for d in 0..200 {
        let k = rng.random_range(2..=3);
        let n = rng.random_range(1..=6);
        let p = rng.random_range(1..=n);
        let seed = rng.random::<u64>();
        let inst = random_instance(seed, spec(k, n, p, 1, 1.0)).unwrap();
        let basis = random_basis(seed, k, 100.0).unwrap();
        let index = rng.random_range(0..k.pow(n as u32));
        let b = BAssignment::from_index(Scope::full(inst.edges().clone()), &basis, index).unwrap();
        let (lhs, rhs) = factored_pairing_check(inst.generators(), &b, &basis).unwrap();
        let gap = relative_error(lhs, rhs);
        if gap > 1e-12 {
            return Err(format!("draw {d}: gap {gap:e}"));
        }
        worst = worst.max(gap);
    }
    Ok(format!("200 draws, worst gap {worst:.2e}"))
}

fn ac8(sweep: &[(u64, HolantInstance, Basis)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, inst, _) in sweep {
        let gap = relative_error(holant_value(inst).unwrap(), pairing_form(inst).unwrap());
        if gap > 1e-12 {
            return Err(format!("#{i}: gap {gap:e}"));
        }
        worst = worst.max(gap);
    }
    Ok(format!("500 instances, worst gap {worst:.2e}"))
}

fn ac9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xfa17);
    for run in 0..50 {
        let k = rng.random_range(2..=3);
        let n = rng.random_range(1..=4);
        let p = rng.random_range(1..=n);
        let r = rng.random_range(1..=n);
        let seed = rng.random::<u64>();
        let inst = random_instance(seed, spec(k, n, p, r, 1.0)).unwrap();
        let basis = random_basis(seed, k, 10.0).unwrap();
        let path = dir.path().join(format!("i{run}.json"));
        let bpath = dir.path().join(format!("b{run}.json"));
        save_basis(&basis, &bpath).unwrap();
        let mut doc = InstanceDocument::from_instance(&inst);
        doc.basis = Some(format!("b{run}.json"));
        save_instance_document(&doc, &path).unwrap();
        let (side, count) = if run % 2 == 0 { ("gen", p) } else { ("rec", r) };
        let fault = format!("{side}:{}", rng.random_range(0..count));
        let clean = holant(&["verify", path.to_str().unwrap()]);
        let faulty = holant(&["verify", path.to_str().unwrap(), "--inject-fault", &fault]);
        if clean.status.code() != Some(0) || faulty.status.code() != Some(1) {
            return Err(format!("run {run}: clean exit {:?}, faulted exit {:?}", clean.status.code(), faulty.status.code()));
        }
    }
    Ok("50 corrupted runs exit 1 (clean runs exit 0)".into())
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (run, args) in [["7", "2", "6", "3", "2"], ["8", "3", "5", "1", "5"], ["9", "4", "3", "2", "2"]].iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("g{run}_{rep}.json"));
            let status = holant(&[
                "gen", "--seed", args[0], "--alphabet", args[1], "--edges", args[2], "--gen-parts", args[3],
                "--rec-parts", args[4], "--basis-cond", "30", "-o", out.to_str().unwrap(),
            ]);
            if status.status.code() != Some(0) {
                return Err(format!("gen run {run} failed"));
            }
            let basis = dir.path().join(format!("g{run}_{rep}.basis.json"));
            let inst = load_instance(&out).map_err(|e| e.to_string())?;
            let b = load_basis(&basis).map_err(|e| e.to_string())?;
            let (inst2, b2) = (dir.path().join("resaved.json"), dir.path().join("resaved.basis.json"));
            save_instance(&inst, &inst2).unwrap();
            save_basis(&b, &b2).unwrap();
            if instance_digest(&load_instance(&inst2).unwrap()) != instance_digest(&inst)
                || basis_digest(&load_basis(&b2).unwrap()) != basis_digest(&b)
            {
                return Err(format!("gen run {run}: digest changed on re-save"));
            }
            bytes.push((std::fs::read(&out).unwrap(), std::fs::read(basis).unwrap()));
        }
        // basis references differ by file name only
        let strip = |b: &[u8]| String::from_utf8_lossy(b).replace(&format!("g{run}_1"), &format!("g{run}_0"));
        if strip(&bytes[0].0) != strip(&bytes[1].0) || bytes[0].1 != bytes[1].1 {
            return Err(format!("gen run {run} not byte-identical"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xd16);
    for i in 0..50 {
        let k = rng.random_range(1..=4);
        let n = rng.random_range(1..=5);
        let inst = random_instance(rng.random(), spec(k, n, rng.random_range(1..=n), rng.random_range(1..=n), 5.0)).unwrap();
        let path = dir.path().join(format!("rt{i}.json"));
        save_instance(&inst, &path).unwrap();
        let back = load_instance(&path).unwrap();
        if instance_digest(&back) != instance_digest(&inst) || back != inst {
            return Err(format!("round trip {i} changed the instance"));
        }
    }
    Ok("gen byte-identical across runs, outputs digest-stable; 50 save/load round trips digest-stable".into())
}

fn main() -> ExitCode {
    let sweep = sweep();
    let tables = tables();
    let results: [(&str, Outcome); 10] = [
        ("AC-1 holant invariance sweep", ac1(&sweep)),
        ("AC-2 worked example", ac2()),
        ("AC-3 standard basis fixed point", ac3(&sweep)),
        ("AC-4 round trips", ac4(&tables)),
        ("AC-5 fast vs dense transforms", ac5(&tables)),
        ("AC-6 c-tensor laws", ac6()),
        ("AC-7 pairing factorization", ac7()),
        ("AC-8 direct sum vs pairing form", ac8(&sweep)),
        ("AC-9 negative control", ac9()),
        ("AC-10 determinism and round trip", ac10()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
