//! Acceptance suite: one line per criterion, with the tolerances pinned
//! below. Runs without the libtest harness so the lines always print.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use orthwalk::counting::{count_excursions, verify_prediction, CountMode, CountOptions, VerifyOptions};
use orthwalk::coxeter::catalog::{irreducible_types, product_roots, TypeName};
use orthwalk::coxeter::closure::{generate_roots, generic_direction, matrix_group_closure};
use orthwalk::coxeter::{classify, diagram_from_angles, prop_app_test, Label, DEFAULT_DENOM_CAP};
use orthwalk::critical::{exact_critical_point, exact_hessian};
use orthwalk::nodal::{build_p0, catalog_tuples, check_harmonic, classify_nodal, weyl_chamber, WeylType};
use orthwalk::spectral::angle_geometry;
use orthwalk::walkgroup::{
    fixed_point_scan, g_vs_h_report, generator_set, property_suite, ExactCovariance, FixedPointGrid, GeneratorSet,
    GvsHOptions, PairOrderResult, MODULUS_TOL,
};
use orthwalk::{critical_point, models, CriticalData, WalkModel};

const COORD_TOL: f64 = 1e-10;
const GENERATOR_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-8;
const HARMONIC_TOL: f64 = 1e-9;
const WEYL_TOL: f64 = 1e-12;
const MORPHISM_TOL: f64 = 1e-8;
const INVARIANCE_TOL: f64 = 1e-8;
const ISOMETRY_TOL: f64 = 1e-10;
const CONJUGATION_TOL: f64 = 1e-8;
const ALPHA_REL_TOL: f64 = 0.05;
const RHO_REL_TOL: f64 = 1e-3;

enum Outcome {
    Pass(String),
    /// Met, except for a documented disagreement with the expected data.
    Deviation(String),
    Fail(String),
}

type Check = Result<String, String>;
type Criterion = Box<dyn Fn() -> Outcome>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_budget(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed <= budget, format!("took {elapsed:.2?}, budget {budget:.0?}"))
}

fn setup(m: &WalkModel) -> (CriticalData, GeneratorSet) {
    let c = critical_point(m).expect("critical point");
    let exact = exact_critical_point(m, &c.x0).map(|x| ExactCovariance::from_hessian(&exact_hessian(m, &x)));
    let g = generator_set(m, &c, DEFAULT_DENOM_CAP, exact.as_ref()).expect("small-step model");
    (c, g)
}

fn c1() -> Check {
    let t = Instant::now();
    let c = critical_point(&models::two_fifths_rotation()).map_err(|e| e.to_string())?;
    let want = [1.0, 2.0 / 3f64.sqrt(), 1.0];
    let dev = c.x0.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(dev < COORD_TOL, format!("x0 deviates by {dev:e}"))?;
    let a13 = c.delta[(0, 2)];
    let da = (a13 - 70f64.sqrt() / 10.0).abs();
    ensure(da < COORD_TOL, format!("a_13 = {a13}"))?;
    within_budget(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max |x0 − x0*| = {dev:.1e}, |a_13 − √70/10| = {da:.1e}"))
}

fn c2() -> Check {
    let t = Instant::now();
    let (_, g) = setup(&models::two_fifths_rotation());
    let s1 = &g.s[0];
    let row = [-1.0, 0.0, -7.0 / 5.0];
    let dev = (0..3).map(|k| (s1[(0, k)] - row[k]).abs()).fold(0.0, f64::max);
    ensure(dev < GENERATOR_TOL, format!("S_1 row deviates by {dev:e}"))?;
    let mut ev: Vec<_> = (s1 * &g.s[2]).complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.im.total_cmp(&b.im));
    let r = 21f64.sqrt() / 5.0;
    let want = [(0.4, -r), (1.0, 0.0), (0.4, r)];
    let edev = ev.iter().zip(want).map(|(z, (re, im))| (z.re - re).abs().max((z.im - im).abs())).fold(0.0, f64::max);
    ensure(edev < EIGEN_TOL, format!("eigenvalues deviate by {edev:e}"))?;
    let po = g.pair_orders.iter().find(|p| (p.i, p.j) == (0, 2)).ok_or("no pair (0, 2)")?;
    ensure(po.result == PairOrderResult::Infinite, format!("pair order {:?}", po.result))?;
    ensure((po.rotation_cosine - 0.4).abs() < 1e-12, format!("rotation cosine {}", po.rotation_cosine))?;
    within_budget(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("S_1 row dev {dev:.1e}, eigenvalue dev {edev:.1e}, pair (1,3) infinite via {:?}", po.rule))
}

fn c3() -> Check {
    for (name, m) in [("minus-third", models::minus_third_covariance()), ("skew 4d", models::skew_4d())] {
        let t = Instant::now();
        let c = critical_point(&m).map_err(|e| e.to_string())?;
        ensure(prop_app_test(&c.delta).is_some(), format!("{name}: no witness"))?;
        within_budget(t.elapsed(), Duration::from_secs(1))?;
    }
    let t = Instant::now();
    let c = critical_point(&models::identity_covariance()).map_err(|e| e.to_string())?;
    ensure(prop_app_test(&c.delta).is_none(), "identity covariance: unexpected witness")?;
    let h = classify(&diagram_from_angles(&angle_geometry(&c.delta).map_err(|e| e.to_string())?, DEFAULT_DENOM_CAP));
    ensure(h.verdict.order() == Some(8), format!("H = {:?}", h.verdict.status))?;
    within_budget(t.elapsed(), Duration::from_secs(1))?;
    Ok("witnesses for both infinite models; none for Δ = I, H finite of order 8".into())
}

fn c4() -> Check {
    let t = Instant::now();
    let m = models::identity_covariance();
    let (c, g) = setup(&m);
    let grid = FixedPointGrid::default();
    let witnesses: Vec<_> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .flat_map(|&(i, j)| fixed_point_scan(&g.involutions, i, j, &grid))
        .collect();
    let w = witnesses.first().ok_or("no fixed-point witness")?;
    ensure(w.moduli.iter().any(|m| (m - 1.0).abs() > MODULUS_TOL), "witness moduli on the unit circle")?;
    let h = classify(&diagram_from_angles(&angle_geometry(&c.delta).map_err(|e| e.to_string())?, DEFAULT_DENOM_CAP));
    let r = g_vs_h_report(&g, &h, &GvsHOptions::default());
    ensure(r.g.is_infinite() && r.h.order() == Some(8), format!("conclusion: {}", r.conclusion))?;
    within_budget(t.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "pair {:?} at {:?}: moduli {:?}; {}",
        w.pair,
        w.point.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
        w.moduli.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
        r.conclusion
    ))
}

fn c5() -> Check {
    let t = Instant::now();
    for d in 2..=6usize {
        let m = models::tandem(d);
        let (c, g) = setup(&m);
        let diagram = diagram_from_angles(&angle_geometry(&c.delta).map_err(|e| e.to_string())?, DEFAULT_DENOM_CAP);
        for (i, j, l) in diagram.pairs() {
            let want = if j == i + 1 { 3 } else { 2 };
            ensure(matches!(l, Label::Order { m, chamber: true } if m == want), format!("d = {d}: label ({i},{j}) = {l:?}"))?;
        }
        let h = classify(&diagram);
        let fact: u64 = (1..=d as u64 + 1).product();
        ensure(h.types() == vec![TypeName::A(d as u32)], format!("d = {d}: H types {:?}", h.types()))?;
        ensure(h.verdict.order() == Some(fact), format!("d = {d}: |H| = {:?}", h.verdict.order()))?;
        let r = g_vs_h_report(&g, &h, &GvsHOptions::default());
        ensure(r.k_order == Some(fact), format!("d = {d}: |K_d| = {:?}", r.k_order))?;
        ensure(r.isomorphic == Some(true), format!("d = {d}: {}", r.conclusion))?;
    }
    within_budget(t.elapsed(), Duration::from_secs(5))?;
    Ok("chains for d = 2..6, |K_d| = |H| = (d+1)!, G ≅ H".into())
}

fn catalog_column(dim: usize) -> Result<Vec<String>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_orthwalk"))
        .args(["catalog", "--dim", &dim.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("catalog --dim {dim} exited with {}", out.status))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok(text.lines().skip(1).map(|l| l.rsplit('\t').next().unwrap_or("").to_string()).collect())
}

fn c6() -> Outcome {
    let run = || -> Result<Outcome, String> {
        let d3 = catalog_column(3)?;
        let want3 = ["12", "(k+1)(k+2)", "42", "90", "240"];
        ensure(d3 == want3, format!("dim 3 column {d3:?}"))?;
        let d4 = catalog_column(4)?;
        let listed = ["24", "(k+2)(k+4)", "(k+k')(k+k'+2)", "63", "120", "288", "120", "272", "168", "624", "3720"];
        ensure(d4.len() == listed.len(), format!("dim 4 has {} rows", d4.len()))?;
        let mismatches: Vec<usize> = (0..listed.len()).filter(|&i| d4[i] != listed[i]).collect();
        // The B4 row (index 7) has 16 hyperplanes, so k(d−2+k) = 16·18 = 288.
        match mismatches.as_slice() {
            [] => Ok(Outcome::Pass("dim 3 and dim 4 columns match exactly".into())),
            [7] if d4[7] == "288" => Ok(Outcome::Deviation(
                "dim 3 exact; dim 4 exact except B4, emitted 288 = 16·(4−2+16) where the expected list has 272".into(),
            )),
            _ => Err(format!("dim 4 column {d4:?}")),
        }
    };
    run().unwrap_or_else(Outcome::Fail)
}

fn c7() -> Check {
    let t = Instant::now();
    for (ty, k) in [(TypeName::A(3), 6), (TypeName::B(3), 9), (TypeName::H3, 15)] {
        let rs = generate_roots(&ty.simple_roots(), 10_000).map_err(|e| format!("{ty}: {e:?}"))?;
        ensure(rs.k() == k, format!("{ty}: k = {}", rs.k()))?;
    }
    let mut counts = Vec::new();
    for row in catalog_tuples(4).map_err(|e| e.to_string())? {
        let params: Vec<u32> = [5, 3][..row.parameters()].to_vec();
        let inst = row.instantiate(&params);
        let geo = inst.geometry().ok_or("angle data not positive definite")?;
        let rs = generate_roots(&geo.u, 10_000).map_err(|e| format!("{}: {e:?}", row.group))?;
        ensure(rs.k() as u64 == inst.k, format!("{}: k = {} vs {}", row.group, rs.k(), inst.k))?;
        counts.push(rs.k());
    }
    let gens: Vec<_> = TypeName::H3
        .simple_roots()
        .iter()
        .map(|r| {
            let n2: f64 = r.iter().map(|x| x * x).sum();
            nalgebra::DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * r[i] * r[j] / n2)
        })
        .collect();
    let order = matrix_group_closure(&gens, 20_000).map_err(|e| format!("{e:?}"))?;
    ensure(order == 120, format!("|H3| = {order}"))?;
    within_budget(t.elapsed(), Duration::from_secs(10))?;
    Ok(format!("A3/B3/H3 = 6/9/15, d = 4 rows {counts:?}, |⟨H3⟩| = 120"))
}

fn c8() -> Check {
    let t = Instant::now();
    let mut systems: Vec<Vec<TypeName>> = irreducible_types(3, 12).into_iter().map(|t| vec![t]).collect();
    systems.push(vec![TypeName::A(1), TypeName::A(1)]);
    systems.push(vec![TypeName::A(1), TypeName::A(1), TypeName::A(1)]);
    for m in 3..=12 {
        systems.push(vec![TypeName::A(1), TypeName::dihedral(m)]);
    }
    systems.push(vec![TypeName::F4]);
    let mut worst = 0.0f64;
    let mut exact = 0;
    for types in &systems {
        let rs = generate_roots(&product_roots(types), 10_000).map_err(|e| format!("{types:?}: {e:?}"))?;
        let roots = rs.positive(&generic_direction(&rs.roots));
        let k: u64 = types.iter().map(TypeName::reflections).sum();
        let p = build_p0(&roots).map_err(|e| e.to_string())?;
        ensure(p.degree() == Some(k as u32), format!("{types:?}: degree {:?} vs k = {k}", p.degree()))?;
        let res = check_harmonic(&p);
        if p.is_exact() {
            ensure(res == 0.0, format!("{types:?}: exact Laplacian nonzero ({res:e})"))?;
            exact += 1;
        }
        ensure(res < HARMONIC_TOL, format!("{types:?}: residual {res:e}"))?;
        worst = worst.max(res);
    }
    within_budget(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{} systems ({exact} exact), worst float residual {worst:.1e}", systems.len()))
}

fn c9() -> Check {
    for d in 2..=8usize {
        let a = weyl_chamber(WeylType::A, d).alpha.ok_or(format!("A{d} not nodal"))?;
        ensure((a - (d * d) as f64 / 2.0).abs() < WEYL_TOL, format!("A, d = {d}: α = {a}"))?;
        let b = weyl_chamber(WeylType::B, d).alpha.ok_or(format!("B{d} not nodal"))?;
        ensure((b - ((d * d) as f64 + d as f64 / 2.0)).abs() < WEYL_TOL, format!("B, d = {d}: α = {b}"))?;
    }
    Ok("α = d²/2 and d² + d/2 for d = 2..8".into())
}

fn c10() -> Check {
    let c = critical_point(&models::a4_chamber_4d()).map_err(|e| e.to_string())?;
    let r = classify_nodal(&angle_geometry(&c.delta).map_err(|e| e.to_string())?);
    ensure(r.lambda1 == Some(120), format!("λ₁ = {:?}", r.lambda1))?;
    ensure(r.alpha == Some(12.0), format!("α = {:?}", r.alpha))?;
    Ok(format!("type {}, λ₁ = 120, α = 12", r.coxeter_type.join(" x ")))
}

fn c11() -> Check {
    let t = Instant::now();
    let test_models = [
        models::simple_walk(2),
        models::tandem(3),
        models::two_fifths_rotation(),
        models::minus_third_covariance(),
        models::identity_covariance(),
    ];
    let (mut morph, mut inv, mut iso, mut conj) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for m in &test_models {
        let (c, g) = setup(m);
        let geo = angle_geometry(&c.delta).map_err(|e| e.to_string())?;
        let r = property_suite(&g, &c, &geo, 50, 6, 0);
        morph = morph.max(r.morphism_residual);
        inv = inv.max(r.invariance_residual);
        iso = iso.max(r.isometry_residual);
        conj = conj.max(r.conjugation_residual);
    }
    ensure(morph < MORPHISM_TOL, format!("morphism {morph:e}"))?;
    ensure(inv < INVARIANCE_TOL, format!("invariance {inv:e}"))?;
    ensure(iso < ISOMETRY_TOL, format!("isometry {iso:e}"))?;
    ensure(conj < CONJUGATION_TOL, format!("conjugation {conj:e}"))?;
    within_budget(t.elapsed(), Duration::from_secs(30))?;
    Ok(format!("morphism {morph:.1e}, invariance {inv:.1e}, isometry {iso:.1e}, conjugation {conj:.1e}"))
}

fn c12() -> Check {
    let t = Instant::now();
    let mut parts = Vec::new();
    for (name, m, n_max, alpha) in [
        ("simple 2d", models::simple_walk(2), 400, 3.0),
        ("tandem 2d", models::tandem(2), 400, 4.0),
        ("simple 3d", models::simple_walk(3), 300, 4.5),
    ] {
        let opts = VerifyOptions { n_max, alpha_tol: ALPHA_REL_TOL, rho_tol: RHO_REL_TOL, ..VerifyOptions::default() };
        let v = verify_prediction(&m, &opts).map_err(|e| format!("{name}: {e}"))?;
        ensure(v.predicted_alpha == Some(alpha), format!("{name}: predicted α {:?}", v.predicted_alpha))?;
        let ea = v.alpha_rel_error.unwrap_or(f64::INFINITY);
        ensure(ea < ALPHA_REL_TOL, format!("{name}: α̂ = {} (rel err {ea:.3})", v.fit.alpha_hat))?;
        ensure(v.rho_rel_error < RHO_REL_TOL, format!("{name}: ρ̂ = {} (rel err {:e})", v.fit.rho_hat, v.rho_rel_error))?;
        parts.push(format!("{name}: α̂ = {:.4} (α = {alpha}), ρ̂ rel err {:.1e}", v.fit.alpha_hat, v.rho_rel_error));
    }
    within_budget(t.elapsed(), Duration::from_secs(600))?;
    Ok(parts.join("; "))
}

/// Step-sequence enumeration: Σ over orthant paths of Π p_s, with integer
/// step weights p_s = w_s·L.
fn enumerate(steps: &[(Vec<i32>, u128)], x: &mut [i64], end: &[usize], left: usize, acc: u128, out: &mut u128) {
    if left == 0 {
        if x.iter().zip(end).all(|(&a, &b)| a == b as i64) {
            *out += acc;
        }
        return;
    }
    for (v, w) in steps {
        if x.iter().zip(v).any(|(&a, &b)| a + i64::from(b) < 0) {
            continue;
        }
        x.iter_mut().zip(v).for_each(|(a, &b)| *a += i64::from(b));
        enumerate(steps, x, end, left - 1, acc * w, out);
        x.iter_mut().zip(v).for_each(|(a, &b)| *a -= i64::from(b));
    }
}

fn c13() -> Check {
    const N: usize = 8;
    let mut compared = 0;
    for (idx, m) in models::small_step_models().into_iter().enumerate() {
        let d = m.dim();
        let lcm = m.steps().iter().fold(1u128, |l, s| {
            let den: u128 = s.weight.denom().try_into().expect("small denominator");
            l / gcd(l, den) * den
        });
        let origin = vec![0usize; d];
        let other: Vec<usize> = (0..d).map(|i| i % 2).collect();
        for (p, q) in [(&origin, &origin), (&other, &origin)] {
            for mode in [CountMode::Weighted, CountMode::Unweighted] {
                let steps: Vec<(Vec<i32>, u128)> = m
                    .steps()
                    .iter()
                    .map(|s| {
                        let w = match mode {
                            CountMode::Unweighted => 1,
                            CountMode::Weighted => {
                                let num: u128 = s.weight.numer().try_into().expect("small numerator");
                                let den: u128 = s.weight.denom().try_into().expect("small denominator");
                                num * (lcm / den)
                            }
                        };
                        (s.vector.clone(), w)
                    })
                    .collect();
                let table = count_excursions(&m, p, q, N, &CountOptions { mode, ..CountOptions::default() })
                    .map_err(|e| e.to_string())?;
                for n in 0..=N {
                    let mut x: Vec<i64> = p.iter().map(|&c| c as i64).collect();
                    let mut total = 0u128;
                    enumerate(&steps, &mut x, q, n, 1, &mut total);
                    let scale = match mode {
                        CountMode::Unweighted => BigUint::from(1u32),
                        CountMode::Weighted => BigUint::from(lcm).pow(n as u32),
                    };
                    let want = BigRational::new(BigUint::from(total).into(), scale.into());
                    ensure(table.value(n) == want, format!("model #{idx} {mode:?} n = {n}: {} vs {want}", table.value(n)))?;
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} exact values agree (n ≤ {N}, weighted and unweighted)"))
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn main() {
    let checks: Vec<(&str, Criterion)> = vec![
        ("critical point and covariance entry", Box::new(|| from(c1()))),
        ("Jacobian generators and rotation order", Box::new(|| from(c2()))),
        ("admissible-cosine infinite-group test", Box::new(|| from(c3()))),
        ("fixed-point eigenvalue witness", Box::new(|| from(c4()))),
        ("tandem family G ≅ H", Box::new(|| from(c5()))),
        ("catalog reproduction", Box::new(c6)),
        ("root and closure counts", Box::new(|| from(c7()))),
        ("harmonicity of P0", Box::new(|| from(c8()))),
        ("Weyl-chamber exponents", Box::new(|| from(c9()))),
        ("A4 chamber model exponent", Box::new(|| from(c10()))),
        ("morphism/invariance/isometry/conjugation suite", Box::new(|| from(c11()))),
        ("empirical exponent and growth fit", Box::new(|| from(c12()))),
        ("DP equals exhaustive enumeration", Box::new(|| from(c13()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(s) => ("PASS", s),
            Outcome::Deviation(s) => ("PASS (deviation)", s),
            Outcome::Fail(s) => {
                failed += 1;
                ("FAIL", s)
            }
        };
        println!("criterion {:>2} [{tag}] {name} ({secs:.2}s): {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria met", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn from(c: Check) -> Outcome {
    match c {
        Ok(s) => Outcome::Pass(s),
        Err(s) => Outcome::Fail(s),
    }
}
