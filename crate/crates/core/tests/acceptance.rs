//! Acceptance harness: one pass/fail line per criterion.
//!
//! All checks are exact rational equalities; there are no tolerances.

use std::process::ExitCode;
use std::time::Instant;

use kaehler_core::curvature::{
    curvature_at, d_omega_linearization, kaehler_form_d, kaehler_form_d_at, random_points, Point,
};
use kaehler_core::decomposition::{
    pi1, pi2, phi, psi, tv_project_closed_form, tv_project_gram, TVSplit, TvSubspaces,
};
use kaehler_core::fixtures::{kaehler_surface_product, para_surface_product, AlmostComplexJet};
use kaehler_core::identities::{
    check_gray, check_kaehler, contractions, kaehler_space_basis, random_model,
};
use kaehler_core::linalg::{nullspace, rank, Matrix};
use kaehler_core::poly::Poly;
use kaehler_core::potential::{metric_series, scalar_curvature_series, solve_csc};
use kaehler_core::rational::{int, rat};
use kaehler_core::realization::{
    apply_K, metric_from_theta, random_theta, realize, surface_product_theta, theta_coordinates,
    Realizer, K_kernel_basis, L,
};
use kaehler_core::structure::{tensor_ip, CurvatureModel, Kind, Structure, SymBil, Tensor4};
use kaehler_core::{Rational, Result};

type Outcome = std::result::Result<String, String>;

fn st(m: usize, kind: Kind) -> Structure {
    Structure::standard(m, kind).expect("standard structure")
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> std::result::Result<(), String> {
    ensure(got == want, format!("{what}: got {got:?}, expected {want:?}"))
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn model(s: &Structure, a: Tensor4) -> std::result::Result<CurvatureModel, String> {
    lift(CurvatureModel::new(s.clone(), a))
}

// (e3, e4, e4, e3)
const Q3443: [usize; 4] = [2, 3, 3, 2];

fn paper_values() -> Outcome {
    let s = st(4, Kind::Complex);
    let g = SymBil::inner_product(&s);
    eq("π1", pi1(&s).get(Q3443).clone(), int(1))?;
    eq("π2", pi2(&s).get(Q3443).clone(), int(3))?;
    eq("φ(g)", lift(phi(&g, &s))?.get(Q3443).clone(), int(2))?;
    eq("ψ(g)", lift(psi(&g, &s))?.get(Q3443).clone(), int(6))?;
    let fx = kaehler_surface_product();
    let c = contractions(&fx.model);
    eq("φ(ρ)", lift(phi(&c.rho, &s))?.get(Q3443).clone(), int(0))?;
    eq("ψ(ρ)", lift(psi(&c.rho, &s))?.get(Q3443).clone(), int(0))?;
    eq("τ", c.tau.clone(), int(2))?;
    eq("τ⋆", c.tau_star.clone(), int(2))?;
    eq("ρ(e1,e1)", c.rho.get(0, 0).clone(), int(1))?;
    let split = lift(tv_project_closed_form(&fx.model))?;
    eq("p1", split.p1.get(Q3443).clone(), rat(1, 3))?;
    eq("p2", split.p2.get(Q3443).clone(), rat(-1, 2))?;
    eq("p3", split.p3.get(Q3443).clone(), rat(1, 6))?;
    Ok("π1=1 π2=3 φ=2 ψ=6 φ(ρ)=ψ(ρ)=0 τ=τ⋆=2 ρ11=1 p=(1/3,-1/2,1/6)".into())
}

fn convention_anchor() -> Outcome {
    for kind in [Kind::Complex, Kind::Para] {
        let s = st(4, kind);
        for seed in 0..100 {
            let theta = random_theta(&s, seed);
            let r = lift(curvature_at(&metric_from_theta(&theta), &Point::origin(4)))?;
            ensure(r == L(&theta), format!("{kind} seed {seed}: engine differs from L"))?;
        }
    }
    let fx = kaehler_surface_product();
    let r = lift(curvature_at(&fx.metric(), &Point::origin(4)))?;
    let v = r.get([0, 1, 1, 0]).clone();
    eq("R(e1,e2,e2,e1)", v.clone(), int(-1))?;
    eq("|R(e1,e2,e2,e1)| vs printed 1", v.clone() * &v, int(1))?;
    Ok("200 random Θ: engine = L exactly; fixture R(e1,e2,e2,e1) = -1".into())
}

fn kernel_equivalence() -> Outcome {
    let mut dims = Vec::new();
    for kind in [Kind::Complex, Kind::Para] {
        let s = st(4, kind);
        let engine = nullspace(&d_omega_linearization(&s));
        let ours: Vec<Vec<Rational>> = K_kernel_basis(&s)
            .iter()
            .map(|t| theta_coordinates(t).ok_or("kernel element outside theta span"))
            .collect::<std::result::Result<_, _>>()?;
        let r = |v: &[Vec<Rational>]| if v.is_empty() { 0 } else { rank(&Matrix::from_rows(v.to_vec())) };
        let joint = [engine.clone(), ours.clone()].concat();
        eq("rank(engine)", r(&engine), engine.len())?;
        eq("rank(K)", r(&ours), ours.len())?;
        eq("rank(joint)", r(&joint), ours.len())?;
        eq("dims", engine.len(), ours.len())?;
        dims.push(ours.len());
    }
    Ok(format!("ker K = ker dΩ-linearization (dim {} complex, {} para)", dims[0], dims[1]))
}

fn realize_suite(s: &Structure, count: u64) -> std::result::Result<(), String> {
    for seed in 0..count {
        let m = random_model(s, 1000 + seed, true);
        let theta = lift(realize(&m))?;
        ensure(L(&theta) == *m.tensor(), format!("{} m={} seed {seed}: L(Θ) ≠ A", s.kind(), s.m()))?;
        let g = metric_from_theta(&theta);
        for p in random_points(&g, 5, seed) {
            ensure(lift(kaehler_form_d_at(&g, &p))?.is_zero(), format!("dΩ ≠ 0 at {p}"))?;
        }
        for p in random_points(&g, 3, 500 + seed) {
            let r = model(s, lift(curvature_at(&g, &p))?)?;
            let rep = check_kaehler(&r);
            ensure(rep.holds, format!("Kaehler identity fails at {p}: {:?}", rep.at))?;
        }
    }
    Ok(())
}

fn realization_round_trip() -> Outcome {
    realize_suite(&st(4, Kind::Complex), 25)?;
    realize_suite(&st(4, Kind::Para), 25)?;
    realize_suite(&st(6, Kind::Complex), 5)?;
    realize_suite(&st(6, Kind::Para), 5)?;
    Ok("25+25 models at m=4, 5+5 at m=6 realized exactly".into())
}

fn gray_property() -> Outcome {
    let s = st(4, Kind::Complex);
    let mut violations = 0;
    let mut seed = 0;
    let mut tested = 0;
    while tested < 25 {
        let theta = random_theta(&s, 7000 + seed);
        seed += 1;
        if apply_K(&theta).is_zero() {
            continue;
        }
        tested += 1;
        let g = metric_from_theta(&theta);
        let mut violated = false;
        for p in random_points(&g, 3, seed) {
            let r = model(&s, lift(curvature_at(&g, &p))?)?;
            let gray = check_gray(&r);
            ensure(gray.holds, format!("Gray identity fails at {p}: {:?}", gray.at))?;
            violated |= !check_kaehler(&r).holds;
        }
        violations += usize::from(violated);
    }
    ensure(violations > 0, "no Kaehler-identity violation observed")?;
    Ok(format!("25 Θ ∉ ker K: Gray holds everywhere; Kaehler fails for {violations}"))
}

fn nonintegrable_fixture() -> Outcome {
    let jet = AlmostComplexJet::nonintegrable_r6();
    let n = jet.nijenhuis(0, 4);
    let mut dx2 = vec![int(0); 6];
    dx2[2] = int(1);
    eq("N(∂x1, ∂x3)", n, dx2)?;
    let g = jet.metric();
    ensure(g.degree() == 0, "metric is not constant")?;
    for p in random_points(&g, 3, 1) {
        ensure(lift(curvature_at(&g, &p))?.is_zero(), "metric is not flat")?;
    }
    Ok("N(∂x1,∂x3) = ∂x2 ≠ 0 on a flat metric".into())
}

fn check_split_properties(s: &Structure, split: &TVSplit) -> std::result::Result<(), String> {
    let parts = split.parts();
    for (i, p) in parts.iter().enumerate() {
        let again = lift(tv_project_gram(&model(s, (*p).clone())?))?;
        for (j, q) in again.parts().iter().enumerate() {
            if i == j {
                ensure(q == p, format!("projector {} not idempotent", i + 1))?;
            } else {
                ensure(q.is_zero(), format!("P{} P{} ≠ 0", j + 1, i + 1))?;
            }
        }
        for q in &parts[i + 1..] {
            ensure(tensor_ip(p, q, s) == int(0), "parts not orthogonal")?;
        }
    }
    Ok(())
}

fn decomposition_structure() -> Outcome {
    eq("dim K(4)", kaehler_space_basis(&st(4, Kind::Complex)).len(), 9)?;
    eq("dim K(4) para", kaehler_space_basis(&st(4, Kind::Para)).len(), 9)?;
    eq("dim K(6)", kaehler_space_basis(&st(6, Kind::Complex)).len(), 36)?;
    eq("dim K(6) para", kaehler_space_basis(&st(6, Kind::Para)).len(), 36)?;
    for kind in [Kind::Complex, Kind::Para] {
        eq("W dims", lift(TvSubspaces::for_structure(&st(4, kind)))?.dims(), [1, 3, 5])?;
    }
    let s = st(4, Kind::Complex);
    for seed in 0..50 {
        let m = random_model(&s, 2000 + seed, true);
        let a = lift(tv_project_closed_form(&m))?;
        let b = lift(tv_project_gram(&m))?;
        ensure(a == b, format!("closed form and Gram differ for seed {seed}"))?;
        if seed < 5 {
            check_split_properties(&s, &b)?;
        }
    }
    let p = st(4, Kind::Para);
    for seed in 0..5 {
        check_split_properties(&p, &lift(tv_project_gram(&random_model(&p, 3000 + seed, true)))?)?;
    }
    eq("rank L|ker K, m=6", Realizer::for_structure(&st(6, Kind::Complex)).l_rank(), 36)?;
    Ok("dims 9/36, W 1/3/5; closed form = Gram on 50 models; projectors idempotent, orthogonal".into())
}

fn csc_case(theta: &kaehler_core::structure::ThetaTensor, c: &Rational, n: u32) -> std::result::Result<(), String> {
    let s = theta.structure().clone();
    let pot = lift(solve_csc(theta, c, n))?;
    eq("residual_zero_through", pot.residual_zero_through, n - 4)?;
    ensure(pot.cauchy_data_vanish(), "Cauchy data do not vanish")?;
    ensure(pot.four_jet_vanishes(), "4-jet of phi is nonzero")?;
    let g = lift(pot.corrected_metric(theta))?;
    let top = n - 4;
    let tau = lift(scalar_curvature_series(&metric_series(&g, top + 2), &s, top))?;
    let residual = tau.sub(&kaehler_core::poly::TruncSeries::constant(s.m(), c.clone(), top));
    ensure(residual.is_zero(), format!("residual nonzero: {:?}", residual.poly()))?;
    eq("origin curvature", lift(curvature_at(&g, &Point::origin(s.m())))?, L(theta))?;
    ensure(kaehler_form_d(&g).iter().all(Poly::is_zero), "dΩ of corrected metric ≠ 0")?;
    Ok(())
}

fn csc_solver() -> Outcome {
    let k = kaehler_surface_product();
    csc_case(&k.theta, &int(-2), 8)?;
    let p = para_surface_product();
    let c = contractions(&model(p.model.structure(), L(&p.theta))?).tau;
    csc_case(&surface_product_theta(p.model.structure()), &c, 8)?;
    Ok(format!("N=8: residual zero through degree 4, Φ = O(|u|^5), both kinds (para c = {c})"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 paper-value regression", paper_values),
        ("2 convention anchor", convention_anchor),
        ("3 kernel equivalence", kernel_equivalence),
        ("4 realization round-trip", realization_round_trip),
        ("5 Gray property", gray_property),
        ("6 non-integrable flat fixture", nonintegrable_fixture),
        ("7 decomposition structure", decomposition_structure),
        ("8 CK solver", csc_solver),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {name}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1}s) {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
