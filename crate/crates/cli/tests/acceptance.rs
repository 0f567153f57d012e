use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::Value;
use tessera::analysis::{dominant_eigen, lattice_multiplier, recurrence_sequence, silver_identity_check, z_rho_member};
use tessera::engine::{
    attractor_hulls, decompose, expansion_from_pieces, project_to_1d, verify_geometry, DEFAULT_TILE_CAP,
};
use tessera::numberfield::{silver_root, AlgebraicNumber, FieldElement, SilverIndex, DEFAULT_PRECISION_BITS};
use tessera::rules::{build_1d_silver_rule, catalog, derotate, list, PartitionMatrix};

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        // NaN fails the check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn root(bits: &str) -> AlgebraicNumber {
    silver_root(&SilverIndex::parse(bits).unwrap(), DEFAULT_PRECISION_BITS).unwrap()
}

fn matrix(rows: &[&[u64]]) -> Vec<Vec<u64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn big(rows: Vec<Vec<BigUint>>) -> Vec<Vec<u64>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|x| x.to_u64().unwrap()).collect())
        .collect()
}

fn eq24() -> Vec<Vec<u64>> {
    matrix(&[&[1, 1, 1, 1], &[1, 0, 1, 0], &[1, 1, 0, 0], &[1, 0, 0, 0]])
}

fn eq25() -> Vec<Vec<u64>> {
    matrix(&[
        &[1, 2, 2, 1, 2, 1],
        &[1, 1, 1, 0, 0, 0],
        &[0, 1, 0, 1, 1, 0],
        &[1, 0, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0, 0],
        &[0, 0, 0, 1, 0, 0],
    ])
}

fn proportional(v: &[f64], want: &[f64], tol: f64) -> Check {
    let sv: f64 = v.iter().sum();
    let sw: f64 = want.iter().sum();
    for (a, b) in v.iter().zip(want) {
        ensure!((a / sv - b / sw).abs() < tol, "{v:?} not proportional to {want:?}");
    }
    Ok(())
}

fn silver_roots() -> Check {
    let g = root("11").to_f64();
    ensure!((g - phi()).abs() < 1e-10, "golden root {g}");
    let t = root("111").to_f64();
    ensure!((t - 1.839).abs() < 1e-3, "tribonacci root {t}");
    // independent bisection on x^3 - x^2 - x - 1 over [1, 2]
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if mid * mid * mid - mid * mid - mid - 1.0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ensure!((t - lo).abs() < 1e-12, "bisection {lo} vs {t}");
    let a = root("0101").to_f64();
    ensure!((a * a - g).abs() < 1e-10, "ammann root squared {}", a * a);
    Ok(())
}

fn partition_matrices() -> Check {
    let r = build_1d_silver_rule(&SilverIndex::parse("11").unwrap()).map_err(|e| e.to_string())?;
    let u = r.partition_matrix();
    ensure!(u.rows() == matrix(&[&[1, 1], &[1, 0]]).as_slice(), "golden U {u}");
    ensure!(big(u.pow(2)) == matrix(&[&[2, 1], &[1, 1]]), "golden U² {:?}", u.pow(2));
    let c2 = catalog("cartesian:11:translation-only").unwrap().partition_matrix();
    ensure!(c2.rows() == eq24().as_slice(), "N=2 translation-only {c2}");
    let c3 = catalog("cartesian:111:isometry").unwrap().partition_matrix();
    ensure!(c3.rows() == eq25().as_slice(), "N=3 isometry {c3}");
    Ok(())
}

fn eigen_structure() -> Check {
    let p = phi();
    let g = dominant_eigen(&PartitionMatrix::new(matrix(&[&[1, 1], &[1, 0]])).unwrap()).unwrap();
    ensure!((g.eigenvalue - p).abs() < 1e-9, "golden λ {}", g.eigenvalue);
    proportional(&g.eigenvector, &[1.0 / p, 1.0 / (p * p)], 1e-9)?;
    let e = dominant_eigen(&PartitionMatrix::new(eq24()).unwrap()).unwrap();
    ensure!((e.eigenvalue - p * p).abs() < 1e-9, "cartesian λ {}", e.eigenvalue);
    proportional(&e.eigenvector, &[p * p, p, p, 1.0], 1e-9)
}

fn tile_counts() -> Check {
    // golden U² is indexed (larger, smaller); row i counts the tiles in an
    // inflated tile i, reported here as (larger, smaller)
    let u2 = big(PartitionMatrix::new(matrix(&[&[1, 1], &[1, 0]])).unwrap().pow(2));
    let inflate = |u: &Vec<Vec<u64>>, i: usize| u[i].clone();
    ensure!(
        inflate(&u2, 1) == vec![1, 1],
        "smaller tile gives {:?}",
        inflate(&u2, 1)
    );
    ensure!(inflate(&u2, 0) == vec![2, 1], "larger tile gives {:?}", inflate(&u2, 0));
    // the Penrose matrix is indexed (smaller, larger)
    let pen = catalog("penrose").unwrap().partition_matrix().rows().to_vec();
    ensure!(
        inflate(&pen, 0) == vec![1, 1],
        "Penrose smaller tile gives {:?}",
        pen[0]
    );
    ensure!(inflate(&pen, 1) == vec![1, 2], "Penrose larger tile gives {:?}", pen[1]);
    let a = recurrence_sequence(&SilverIndex::parse("11").unwrap(), 42);
    let head: Vec<u64> = a[..6].iter().map(|x| x.to_u64().unwrap()).collect();
    ensure!(head == [1, 1, 2, 3, 5, 8], "sequence {head:?}");
    let (mut x, mut y) = (BigUint::from(1u32), BigUint::from(1u32));
    for (k, ak) in a.iter().enumerate() {
        ensure!(*ak == x, "a_{k} = {ak}, Fibonacci gives {x}");
        (x, y) = (y.clone(), x + y);
    }
    let q = a[41].to_f64().unwrap() / a[40].to_f64().unwrap();
    ensure!((q - phi()).abs() < 1e-8, "a41/a40 = {q}");
    Ok(())
}

fn geometric_soundness() -> Check {
    let mut names: Vec<String> = list().into_iter().map(|e| e.name).collect();
    names.extend(
        [
            "cartesian:11:translation-only",
            "cartesian:11:isometry",
            "cartesian:111:isometry",
            "cartesian:101:rotation-only",
        ]
        .map(String::from),
    );
    let mut checked = 0;
    for name in names {
        let Ok(r) = catalog(&name) else { continue };
        if r.dimension != 2 || !r.has_geometry() {
            continue;
        }
        let (depth, tol) = if name == "taylor-trapezoid" {
            (8, 1e-6)
        } else {
            (6, 1e-9)
        };
        let u = r.partition_matrix();
        for root in 0..r.type_count() {
            let t = decompose(&r, root, depth, DEFAULT_TILE_CAP).map_err(|e| e.to_string())?;
            let expected: BigUint = u.pow(depth)[root].iter().sum();
            ensure!(
                BigUint::from(t.tiles.len()) == expected,
                "{name} root {root}: count {}",
                t.tiles.len()
            );
            let g = verify_geometry(&t).map_err(|e| e.to_string())?;
            ensure!(g.area_deficit < tol, "{name} root {root}: deficit {}", g.area_deficit);
            ensure!(g.max_overlap < tol, "{name} root {root}: overlap {}", g.max_overlap);
            ensure!(g.outside == 0, "{name} root {root}: {} tiles outside", g.outside);
            checked += 1;
        }
    }
    ensure!(checked > 10, "only {checked} patches checked");
    Ok(())
}

fn silver_identities() -> Check {
    let f = Arc::new(root("11"));
    let rho = FieldElement::generator(&f);
    let inv = rho.inv().unwrap();
    ensure!(&inv + &(&inv * &inv) == FieldElement::one(&f), "(0·11)_φ ≠ 1");
    let rep = silver_identity_check(&SilverIndex::parse("11").unwrap()).map_err(|e| e.to_string())?;
    let names: Vec<&str> = rep.chain.iter().map(|(s, _)| s.as_str()).collect();
    for want in ["0·1", "0·011", "0·01011"] {
        ensure!(names.contains(&want), "chain lacks {want}: {names:?}");
    }
    ensure!(rep.holds(), "golden chain {:?}", rep.chain);
    let all = SilverIndex::enumerate(6);
    for b in &all {
        let r = silver_identity_check(b).map_err(|e| e.to_string())?;
        ensure!(r.identity, "identity fails for {b}");
    }
    // b_N = 1 gives 2^(N-1) indices per length; 0…01 has root 1 and is excluded
    ensure!(all.len() == 63 - 6, "{} indices enumerated", all.len());
    Ok(())
}

fn z_rho_gap() -> Check {
    let f = Arc::new(root("11"));
    let two = FieldElement::from_int(&f, 2);
    let w = z_rho_member(&two, 20).map_err(|e| e.to_string())?;
    ensure!(w.is_none(), "2 found in Z[φ]: {}", w.unwrap());
    let f2 = Arc::new(AlgebraicNumber::integer(2));
    let w = z_rho_member(&FieldElement::from_int(&f2, 2), 20).map_err(|e| e.to_string())?;
    ensure!(
        w.as_ref().map(|w| w.to_string()) == Some("10".into()),
        "radix 2 witness {w:?}"
    );
    let s = Arc::new(
        AlgebraicNumber::from_isolating_interval(
            tessera::numberfield::IntPolynomial::from_i64(&[-2, 0, 1]).unwrap(),
            "1".parse().unwrap(),
            "2".parse().unwrap(),
            DEFAULT_PRECISION_BITS,
        )
        .map_err(|e| e.to_string())?,
    );
    let rho = FieldElement::generator(&s);
    for n in 1..=50 {
        let x = FieldElement::from_int(&s, n);
        let w = z_rho_member(&x, 20).map_err(|e| e.to_string())?;
        let w = w.ok_or_else(|| format!("no witness for {n} in Z[√2]"))?;
        ensure!(w.evaluate(&rho) == x, "witness {w} for {n} evaluates wrongly");
    }
    Ok(())
}

fn lattice_multipliers() -> Check {
    let i = Complex64::new(0.0, 1.0);
    let rho = Complex64::new(1.0, 1.0);
    let a = lattice_multiplier(i, rho, 20)
        .map_err(|e| e.to_string())?
        .ok_or("no matrix for (i, 1+i)")?;
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    ensure!(tr == 2 && det == 2, "trace {tr} det {det} for {a:?}");
    ensure!((rho * rho - 2.0 * rho + 2.0).norm() < 1e-9, "ρ² − 2ρ + 2 ≠ 0");
    // Cayley-Hamilton: A² − 2A + 2I = 0
    for r in 0..2 {
        for c in 0..2 {
            let sq: i64 = (0..2).map(|k| a[r][k] * a[k][c]).sum();
            let id = if r == c { 2 } else { 0 };
            ensure!(sq - 2 * a[r][c] + id == 0, "A² − 2A + 2I ≠ 0 for {a:?}");
        }
    }
    let none = lattice_multiplier(i, Complex64::new(phi(), 0.0), 20).map_err(|e| e.to_string())?;
    ensure!(none.is_none(), "unexpected matrix for (i, φ): {none:?}");
    Ok(())
}

fn path_endpoint() -> Check {
    let r = catalog("penrose").unwrap();
    let e = expansion_from_pieces(&r, 0, &[1; 8]).map_err(|e| e.to_string())?;
    let s5 = 5f64.sqrt();
    let want = Complex64::new(-35.0 / 2.0 + 8.0 * s5, 0.5 * (85.0 - 38.0 * s5).sqrt());
    ensure!((e.value() - want).norm() < 1e-9, "endpoint {} vs {want}", e.value());
    Ok(())
}

fn derotation() -> Check {
    let d = derotate(&catalog("penrose").unwrap()).map_err(|e| e.to_string())?;
    ensure!(d.type_count() == 20, "{} types", d.type_count());
    let e = dominant_eigen(&d.partition_matrix()).map_err(|e| e.to_string())?;
    ensure!((e.eigenvalue - phi() * phi()).abs() < 1e-9, "λ = {}", e.eigenvalue);
    Ok(())
}

fn projection() -> Check {
    let pen = catalog("penrose").unwrap();
    let p = project_to_1d(&pen).map_err(|e| e.to_string())?;
    ensure!(p.warnings.is_empty(), "warnings {:?}", p.warnings);
    let f = &p.rule.field;
    let rho = FieldElement::generator(f);
    let inv = rho.inv().unwrap();
    let lengths: Vec<FieldElement> = p
        .rule
        .types
        .iter()
        .map(|t| t.measure.clone().ok_or("missing length"))
        .collect::<Result<_, _>>()?;
    let mut want = vec![&inv * &inv, inv.clone()];
    for l in &lengths {
        let k = want
            .iter()
            .position(|w| w == l)
            .ok_or_else(|| format!("unexpected length {l}"))?;
        want.remove(k);
    }
    ensure!(want.is_empty() && lengths.len() == 2, "lengths {lengths:?}");
    ensure!(
        p.rule.partition_matrix() == pen.partition_matrix(),
        "matrix {}",
        p.rule.partition_matrix()
    );
    let digits: Vec<FieldElement> = p
        .rule
        .pieces
        .iter()
        .flatten()
        .filter_map(|x| x.digit.as_real(f))
        .collect();
    for (name, d) in [("0", FieldElement::zero(f)), ("1", FieldElement::one(f)), ("1/ρ", inv)] {
        ensure!(digits.contains(&d), "digit {name} missing from {digits:?}");
    }
    Ok(())
}

fn taylor() -> Check {
    let r = catalog("taylor-trapezoid").unwrap();
    ensure!(
        r.partition_matrix().rows() == matrix(&[&[4]]).as_slice(),
        "matrix {}",
        r.partition_matrix()
    );
    ensure!(
        r.multiplier() == FieldElement::from_int(&r.field, 4),
        "ρ² = {}",
        r.multiplier()
    );
    let kids = decompose(&r, 0, 1, DEFAULT_TILE_CAP).map_err(|e| e.to_string())?;
    let areas: Vec<f64> = kids.polygons().ok_or("no polygons")?.iter().map(|p| p.area()).collect();
    ensure!(areas.len() == 4, "{} children", areas.len());
    for a in &areas {
        ensure!((a - areas[0]).abs() < 1e-6, "child areas {areas:?}");
    }
    let shape = r.types[0].polygon().ok_or("no trapezoid")?;
    let hull = &attractor_hulls(&r, 40)[0];
    for v in shape.vertices() {
        let d = hull.iter().map(|h| (h - v).norm()).fold(f64::INFINITY, f64::min);
        ensure!(d < 1e-6, "trapezoid vertex {v} is {d} from the attractor hull");
    }
    let t = decompose(&r, 0, 8, DEFAULT_TILE_CAP).map_err(|e| e.to_string())?;
    let g = verify_geometry(&t).map_err(|e| e.to_string())?;
    ensure!(
        g.area_deficit < 1e-6 && g.max_overlap < 1e-6 && g.outside == 0,
        "depth 8: {g:?}"
    );
    Ok(())
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, String, Vec<u8>) {
    let out = dir.join("out.svg");
    let _ = std::fs::remove_file(&out);
    let mut full: Vec<String> = vec!["tessera".into()];
    full.extend(args.iter().map(|s| s.to_string()));
    if full.iter().any(|a| a == "render") {
        full.push("--out".into());
        full.push(out.display().to_string());
    }
    let o = tessera_cli::run(full);
    let file = std::fs::read(&out).unwrap_or_default();
    (o.code, o.stdout, file)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["list"],
        vec!["verify", "penrose", "--depth", "5"],
        vec!["verify", "silver-1d:111", "--depth", "6"],
        vec!["analyze", "penrose"],
        vec!["analyze", "silver-1d:1011"],
        vec!["analyze", "cartesian:11:isometry"],
        vec!["analyze", "taylor-trapezoid"],
        vec!["project", "penrose"],
        vec!["expand", "penrose", "--depth", "3"],
        vec!["render", "penrose", "tiles", "--depth", "5"],
        vec!["render", "penrose", "tiles", "--depth", "4", "--mode", "inflate"],
        vec!["render", "penrose", "tiles", "--depth", "3", "--pinwheel", "10"],
        vec!["render", "silver-1d:11", "barcode", "--depth", "6"],
        vec!["render", "complex-base:1+i", "points", "--depth", "8"],
        vec!["render", "taylor-trapezoid", "curves", "--depth", "3"],
        vec![
            "render",
            "penrose",
            "path",
            "--depth",
            "3",
            "--pieces",
            "1,1,1,1,1,1,1,1",
        ],
    ];
    for c in commands {
        let a = run_cli(&c, dir.path());
        let b = run_cli(&c, dir.path());
        ensure!(a.0 == 0, "{c:?} exited {}", a.0);
        ensure!(a == b, "{c:?} differs between runs");
        if c[0] == "render" {
            ensure!(String::from_utf8_lossy(&a.2).contains("<svg "), "{c:?} wrote no SVG");
        }
    }
    Ok(())
}

fn verdict(rule: &str) -> std::result::Result<Value, String> {
    let o = tessera_cli::run(["tessera", "analyze", rule]);
    ensure!(o.code == 0, "analyze {rule} exited {}: {}", o.code, o.stderr);
    serde_json::from_str(&o.stdout).map_err(|e| e.to_string())
}

fn aperiodicity() -> Check {
    let mut aperiodic: Vec<String> = SilverIndex::enumerate(5)
        .iter()
        .map(|b| format!("silver-1d:{b}"))
        .collect();
    aperiodic.push("penrose".into());
    for b in SilverIndex::enumerate(3) {
        for eq in ["translation-only", "rotation-only", "isometry"] {
            aperiodic.push(format!("cartesian:{b}:{eq}"));
        }
    }
    for r in &aperiodic {
        let v = verdict(r)?;
        ensure!(v["verdict"] == "aperiodic", "{r}: {}", v["aperiodicity"]);
    }
    for r in list().into_iter().filter(|e| e.types == Some(1)).map(|e| e.name) {
        let v = verdict(&r)?;
        ensure!(
            v["aperiodicity"]["method"] == "inapplicable",
            "{r}: {}",
            v["aperiodicity"]
        );
        ensure!(v["verdict"] == "inapplicable", "{r}: headline {}", v["verdict"]);
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("silver roots", silver_roots),
        ("companion and partition matrices", partition_matrices),
        ("eigen-structure", eigen_structure),
        ("tile-count combinatorics", tile_counts),
        ("geometric soundness", geometric_soundness),
        ("silver identities", silver_identities),
        ("Z[ρ] gap", z_rho_gap),
        ("lattice multipliers", lattice_multipliers),
        ("path endpoint", path_endpoint),
        ("derotation", derotation),
        ("projection", projection),
        ("Taylor trapezoid", taylor),
        ("determinism", determinism),
        ("aperiodicity verdicts", aperiodicity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(()) => println!("PASS {:>2} {name}", k + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
