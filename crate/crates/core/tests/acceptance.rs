//! One pass/fail line per acceptance criterion.

mod common;

use std::time::{Duration, Instant};

use common::*;
use stochsym::expr::{is_zero, simplify, Domains, Expr, VarSpace, ZeroConfig, ZeroVerdict};
use stochsym::kozlov::reduce_scalar;
use stochsym::mc::{change_consistency_test, flow_invariance_test, McConfig};
use stochsym::sde::{ito_laplacian, ito_to_stratonovich, rho, stratonovich_to_ito, ItoSde, Sde};
use stochsym::symmetry::{
    check_symmetry, check_tau_condition, determining_system_strat, lie_derivative_residuals, sigma_operator,
    verify_unal_identity, FieldKind, TauCandidate, VectorField,
};
use stochsym::transform::{
    make_scrambled_instance, pushforward, verify_symmetry_preserved, CoordinateChange, MapKind, SCRAMBLED_DOMAIN,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn y_space() -> VarSpace {
    VarSpace::new(&["y"], "t", &["w"]).unwrap()
}

fn example1() -> (ItoSde, VectorField) {
    let s = y_space();
    let sde = ItoSde::new(s.clone(), vec![e("exp(-y) - 1/2*exp(-2*y)", &s)], vec![vec![e("exp(-y)", &s)]]).unwrap();
    (sde, VectorField::deterministic(s.clone(), vec![e("exp(-y)", &s)]).unwrap())
}

fn example2() -> (ItoSde, VectorField) {
    let s = y_space();
    let sde = ItoSde::new(
        s.clone(),
        vec![e("exp(-t)*(1+y^2)^2/(8*y^3) * (-4*y^2 + exp(t)*(3*y^4 + 2*y^2 - 1))", &s)],
        vec![vec![e("-(1+y^2)^2/(2*y)", &s)]],
    )
    .unwrap();
    (sde, VectorField::deterministic(s.clone(), vec![e("-(1+y^2)^2/(2*y)", &s)]).unwrap())
}

fn symbolic(e: &Expr) -> bool {
    simplify(e).is_zero_literal()
}

fn criterion1() -> Outcome {
    let (sde, x) = example1();
    let cfg = ZeroConfig::default();
    let report = check_symmetry(&sde.clone().into(), &x, &cfg).map_err(|e| e.to_string())?;
    ensure(report.residuals.iter().all(|r| r.outcome == Ok(ZeroVerdict::SymbolicZero)), || "residual not symbolic zero".into())?;
    let r = reduce_scalar(&sde, &x, &cfg).map_err(|e| e.to_string())?;
    ensure(r.drift_t == Expr::one() && r.noise_t == Expr::one(), || format!("reduced to ({}, {})", r.drift_t, r.noise_t))?;
    Ok(format!("{} = {}, d{} = {} dt + {} dw", r.space.states()[0], r.change.forward()[0], r.space.states()[0], r.drift_t, r.noise_t))
}

fn criterion2() -> Outcome {
    let (sde, x) = example2();
    let cfg = ZeroConfig::default();
    let r = reduce_scalar(&sde, &x, &cfg).map_err(|e| e.to_string())?;
    let exp_t = e("exp(-t)", &r.space);
    ensure(r.drift_t == exp_t && r.noise_t == Expr::one(), || format!("reduced to ({}, {})", r.drift_t, r.noise_t))?;
    let pushed = pushforward(&x, &r.change).map_err(|e| e.to_string())?;
    let v = is_zero(&Expr::sub(pushed.phi()[0].clone(), Expr::one()), &cfg).map_err(|e| e.to_string())?;
    ensure(v.is_symbolic(), || format!("pushforward {} is not 1 symbolically", pushed.phi()[0]))?;
    Ok(format!("{} = {}, drift {}, noise {}, pushforward {}", r.space.states()[0], r.change.forward()[0], r.drift_t, r.noise_t, pushed.phi()[0]))
}

fn criterion3() -> Outcome {
    let corpus = ito_corpus(0xc0ffee, 50);
    let mut constant = 0;
    for (i, (sde, constant_noise)) in corpus.iter().enumerate() {
        let strat = ito_to_stratonovich(sde);
        let back = stratonovich_to_ito(&strat);
        for (a, b) in sde.drift().iter().zip(back.drift()) {
            ensure(symbolic(&Expr::sub(a.clone(), b.clone())), || format!("instance {i}: drift {a} came back as {b}"))?;
        }
        ensure(back.noise() == sde.noise(), || format!("instance {i}: noise changed"))?;
        let again = ito_to_stratonovich(&stratonovich_to_ito(&strat));
        for (a, b) in strat.drift().iter().zip(again.drift()) {
            ensure(symbolic(&Expr::sub(a.clone(), b.clone())), || format!("instance {i}: Stratonovich drift {a} came back as {b}"))?;
        }
        if *constant_noise {
            constant += 1;
            ensure(strat.drift() == sde.drift(), || format!("instance {i}: constant noise but b != f"))?;
            ensure(rho(sde).rho.iter().all(Expr::is_zero_literal), || format!("instance {i}: rho != 0"))?;
        }
    }
    Ok(format!("{} instances round-trip, {constant} with constant noise keep b = f", corpus.len()))
}

fn criterion4() -> Outcome {
    let cfg = ZeroConfig::default();
    let corpus = noise_compatible_pairs(0xa11ce, 50);
    let mut symbolic_count = 0;
    for (i, (sde, x)) in corpus.iter().enumerate() {
        let v = verify_unal_identity(sde, x, &cfg).map_err(|err| format!("instance {i}: {err}"))?;
        ensure(v.is_zero(), || format!("instance {i}: {v:?}"))?;
        symbolic_count += v.is_symbolic() as usize;
    }
    let s = VarSpace::new(&["x"], "t", &["w"]).unwrap();
    let sde = ItoSde::new(s.clone(), vec![Expr::zero()], vec![vec![e("x^2", &s)]]).unwrap();
    let x = VectorField::deterministic(s.clone(), vec![e("x^2", &s)]).unwrap();
    let lap = ito_laplacian(&x.phi()[0], &sde);
    let sig = sigma_operator(&x, &rho(&sde)).remove(0);
    let want = e("2*x^4", &s);
    ensure(lap == want && sig == want, || format!("laplacian {lap}, sigma {sig}"))?;
    ensure(verify_unal_identity(&sde, &x, &cfg) == Ok(ZeroVerdict::SymbolicZero), || "hand case not symbolic".into())?;
    Ok(format!("{} instances ({symbolic_count} symbolic), sigma = x^2: both sides {want}", corpus.len()))
}

fn criterion5() -> Outcome {
    let pairs = strat_pairs(0x1e44a, 50);
    let mut random = 0;
    for (i, (sde, x)) in pairs.iter().enumerate() {
        let a = determining_system_strat(sde, x).map_err(|e| e.to_string())?;
        let b = lie_derivative_residuals(sde, x).map_err(|e| e.to_string())?;
        for ((la, ea), (_, eb)) in a.residuals().iter().zip(b.residuals()) {
            ensure(symbolic(&Expr::sub((*ea).clone(), eb.clone())), || format!("pair {i} {la}: {ea} vs {eb}"))?;
        }
        random += (x.kind() == FieldKind::Random) as usize;
    }
    Ok(format!("{} pairs agree ({random} random fields)", pairs.len()))
}

fn criterion6() -> Outcome {
    let bases = reduced_bases(0x5c4a, 20);
    let cfg = ZeroConfig::default().with_domains(Domains::new().with_default(SCRAMBLED_DOMAIN));
    let mut numeric = 0;
    for (i, base) in bases.iter().enumerate() {
        let kind = MapKind::ALL[i % MapKind::ALL.len()];
        let inst = make_scrambled_instance(base, kind, 100 + i as u64).map_err(|e| format!("instance {i}: {e}"))?;
        let unit = VectorField::deterministic(base.space().clone(), vec![Expr::one()]).unwrap();
        verify_symmetry_preserved(base, &unit, &inst.change, &ZeroConfig::default())
            .map_err(|e| format!("instance {i} ({kind:?}): {e}"))?;
        let r = reduce_scalar(&inst.sde, &inst.field, &cfg).map_err(|e| format!("instance {i} ({kind:?}): {e}"))?;
        for (got, want) in [(&r.drift_t, &base.drift()[0]), (&r.noise_t, &base.noise()[0][0])] {
            let v = is_zero(&Expr::sub(got.clone(), want.clone()), &cfg).map_err(|e| e.to_string())?;
            ensure(v.is_zero(), || format!("instance {i} ({kind:?}): recovered {got}, base {want}"))?;
            numeric += !v.is_symbolic() as usize;
        }
    }
    Ok(format!("{} instances preserved and reduced ({numeric} numeric comparisons)", bases.len()))
}

fn criterion7() -> Outcome {
    let s = y_space();
    let xs = VarSpace::new(&["x"], "t", &["w"]).unwrap();
    let zcfg = ZeroConfig::default();
    let mut lines = Vec::new();
    let cases = [
        (example1().0, "exp(y)", "log(x)", 0.25, 0.5, (-3.0, 6.0)),
        (example2().0, "1/(1+y^2)", "sqrt(1/x - 1)", 1.0 / 32.0, 1.0, (0.001, 1000.0)),
    ];
    for (k, (sde, fwd, inv, horizon, y0, clip)) in cases.into_iter().enumerate() {
        let ch = CoordinateChange::new(
            s.clone(),
            vec!["x".into()],
            vec![e(fwd, &s)],
            vec![e(inv, &xs)],
            Domains::new().with("y", 0.3, 2.0),
            &zcfg,
        )
        .map_err(|e| e.to_string())?;
        let mut cfg = McConfig::standard(2024, horizon);
        cfg.x0 = Some(vec![y0]);
        cfg.clip = Domains::new().with("y", clip.0, clip.1);
        let r = change_consistency_test(&sde, &ch, &cfg).map_err(|e| e.to_string())?;
        let slope = r.slope.unwrap_or(f64::NAN);
        ensure(r.passed && r.monotone && (0.3..=0.7).contains(&slope), || format!("example {}: {r:?}", k + 1))?;
        lines.push(format!("example {} slope {slope:.3} ({} excluded)", k + 1, r.excluded));
        let id = CoordinateChange::identity(s.clone(), Domains::new().with("y", 0.3, 2.0));
        let r = change_consistency_test(&sde, &id, &cfg).map_err(|e| e.to_string())?;
        ensure(r.exact_zero && r.levels.iter().all(|l| l.mean_discrepancy == 0.0), || format!("identity: {r:?}"))?;
    }
    lines.push("identity exact zero".into());
    Ok(lines.join(", "))
}

fn criterion8() -> Outcome {
    let cfg = ZeroConfig::default();
    let corpus = ito_corpus(0xc0ffee, 50);
    for (i, (sde, _)) in corpus.iter().enumerate() {
        let tau = TauCandidate { tau: e("t^2", sde.space()) };
        let c = check_tau_condition(sde, &tau, &cfg).map_err(|e| e.to_string())?;
        ensure(c.verdict == ZeroVerdict::SymbolicZero, || format!("instance {i}: {:?}", c.verdict))?;
    }
    let s = VarSpace::new(&["x"], "t", &["w"]).unwrap();
    let sde = ItoSde::new(s.clone(), vec![e("x", &s)], vec![vec![Expr::one()]]).unwrap();
    let c = check_tau_condition(&sde, &TauCandidate { tau: e("x", &s) }, &cfg).map_err(|e| e.to_string())?;
    ensure(matches!(c.verdict, ZeroVerdict::NonZero { .. }), || format!("tau = x gave {:?}", c.verdict))?;
    Ok(format!("t^2 symbolic zero on {} instances, tau = x nonzero ({})", corpus.len(), c.expressions[0]))
}

fn criterion9() -> Outcome {
    let (sde, x) = example1();
    let mut cfg = McConfig::standard(2024, 0.25);
    cfg.x0 = Some(vec![0.5]);
    cfg.clip = Domains::new().with("y", -3.0, 6.0);
    let good = flow_invariance_test(&sde, &x, 0.01, &cfg).map_err(|e| e.to_string())?;
    ensure(good.passed && good.finest_discrepancy <= 1e-3, || format!("symmetry rejected: {}", good.finest_discrepancy))?;
    let s = VarSpace::new(&["x"], "t", &["w"]).unwrap();
    let bm = ItoSde::new(s.clone(), vec![Expr::zero()], vec![vec![Expr::one()]]).unwrap();
    let scale = VectorField::deterministic(s.clone(), vec![e("x", &s)]).unwrap();
    cfg.clip = Domains::new();
    let bad = flow_invariance_test(&bm, &scale, 0.01, &cfg).map_err(|e| e.to_string())?;
    ensure(!bad.passed, || format!("non-symmetry accepted: {}", bad.finest_discrepancy))?;
    Ok(format!(
        "symmetry {:.2e} <= {:.0e}, non-symmetry {:.2e} rejected",
        good.finest_discrepancy, good.threshold, bad.finest_discrepancy
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("example 1 end to end", criterion1, Duration::from_secs(1)),
        ("example 2 end to end", criterion2, Duration::from_secs(1)),
        ("Ito/Stratonovich round trip", criterion3, Duration::MAX),
        ("Laplacian equals sigma operator", criterion4, Duration::MAX),
        ("two determining-system constructions agree", criterion5, Duration::MAX),
        ("scramble oracle", criterion6, Duration::from_secs(30)),
        ("Monte Carlo consistency", criterion7, Duration::from_secs(120)),
        ("time-component condition", criterion8, Duration::MAX),
        ("flow invariance", criterion9, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > *limit => Err(format!("{d}; took {took:.2?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
