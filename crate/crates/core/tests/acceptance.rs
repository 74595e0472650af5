//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs the full Monte Carlo protocol (2×10⁴ trials per point) by default;
//! `TOPOMAP_ACCEPT_TRIALS` lowers it for quick looks and the line then says
//! so. The process exits 0 so that a workspace test run completes; set
//! `TOPOMAP_ACCEPT_STRICT=1` to exit 1 when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use topomap::anyons::*;
use topomap::codes::*;
use topomap::decoder::*;
use topomap::gf2::{to_sym, Basis};
use topomap::mapper::*;
use topomap::matching::{brute_force_min_matching, min_weight_perfect_matching};
use topomap::pauli::{Pauli, Template, X, Y, Z};
use topomap::threshold::{estimate_threshold, parse_grid, scan};
use topomap::toric::ToricGeometry;
use topomap::Result;

type Check = Result<(bool, String)>;

const FULL_TRIALS: u64 = 20_000;

fn trials() -> u64 {
    std::env::var("TOPOMAP_ACCEPT_TRIALS").ok().and_then(|v| v.parse().ok()).filter(|&t| t > 0).unwrap_or(FULL_TRIALS)
}

fn threshold(code: &str, kind: ChannelKind, grid: &str, band: (f64, f64)) -> Check {
    let t = trials();
    let pts = scan(code, kind, &parse_grid(grid)?, &[8, 12, 16], t, 2024, None)?;
    let est = estimate_threshold(&pts)?;
    let cross: Vec<String> = est
        .crossings
        .iter()
        .map(|((a, b), c)| format!("{a}/{b}:{}", c.map_or("none".into(), |p| format!("{p:.4}"))))
        .collect();
    let reduced = if t < FULL_TRIALS { format!(", REDUCED to {t} trials/point") } else { String::new() };
    let detail = match est.p_star {
        Some(p) => format!("p* = {p:.4} in [{}, {}]? crossings {}{reduced}", band.0, band.1, cross.join(" ")),
        None => format!("no crossing on the grid; crossings {}{reduced}", cross.join(" ")),
    };
    let pass = est.p_star.is_some_and(|p| p >= band.0 && p <= band.1) && t >= FULL_TRIALS;
    Ok((pass, detail))
}

fn map_witness() -> Check {
    let t0 = Instant::now();
    let m = find_registered("tcc48", "ktc-stack:2", 1)?;
    let secs = t0.elapsed().as_secs_f64();
    let mut ok = m.v() <= 2 && m.ancilla_in.is_empty() && m.ancilla_out.is_empty() && secs < 60.0;
    let mut notes = vec![format!("v = {}, ancillas {}/{}, search {secs:.1}s", m.v(), m.ancilla_in.len(), m.ancilla_out.len())];
    ok &= verify_symplectic(&m).symplectic_ok;
    for l in [2, 3, 4] {
        let (s, t) = padded_pair(&m, l)?;
        let r = verify_code_map(&m, &s, &t, l);
        ok &= r.symplectic_ok && r.group_map_ok;
        notes.push(format!("L={l} {}", if r.group_map_ok && r.symplectic_ok { "ok" } else { "FAILED" }));
    }
    Ok((ok, notes.join(", ")))
}

fn charge_tables() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();

    let t0 = Instant::now();
    let ktc = charge_table(&AnyonFrame::direct(&build_ktc(4)?)?, None)?;
    let (e, m) = (Charge::e(0, 1), Charge::m(0, 1));
    let mut k_ok = ktc.charges.len() == 4 && ktc.fermions() == vec![e.fuse(m)] && ktc.consistency_failures().is_empty();
    for &a in &ktc.charges {
        for &b in &ktc.charges {
            if !a.is_vacuum() && !b.is_vacuum() && a != b {
                k_ok &= ktc.stat(a, b) == -1;
            }
        }
    }
    ok &= k_ok && t0.elapsed().as_secs_f64() < 1.0;
    notes.push(format!("KTC {} ({:.2}s)", if k_ok { "ok" } else { "FAILED" }, t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let map = builtin_map("tcc48").expect("shipped map");
    let tcc = charge_table(&AnyonFrame::mapped(&build_tcc_48(4)?, &map)?, None)?;
    let c_ok = tcc.charges.len() == 16 && tcc.consistency_failures().is_empty() && find_isomorphism(&tcc, &stack_table(2), &|_| true).is_some();
    ok &= c_ok && t0.elapsed().as_secs_f64() < 1.0;
    notes.push(format!("TCC {} ({:.2}s)", if c_ok { "ok" } else { "FAILED" }, t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let tscc = build_tscc_48(4)?;
    let sz = build_intermediate_sz(&tscc)?;
    let t = charge_table(&AnyonFrame::mapped(&sz, &builtin_map("tscc48").expect("shipped map"))?, Some(&tscc))?;
    let proper = t.proper.clone().unwrap_or_default();
    let mut s_ok = proper.len() == 4 && proper.iter().filter(|c| c.is_vacuum()).count() == 1;
    for &a in proper.iter().filter(|c| !c.is_vacuum()) {
        s_ok &= a.spin() == -1;
        for &b in proper.iter().filter(|c| !c.is_vacuum()) {
            if a != b {
                // the third fermion is the fusion of the other two
                s_ok &= t.stat(a, b) == -1 && proper.contains(&a.fuse(b)) && !a.fuse(b).is_vacuum();
            }
        }
    }
    // explicit automorphism of the 2-copy table onto the reference labels
    let ids = identify_fermions(&t).unwrap_or_default();
    let by = |lab: &str| ids.iter().find(|x| x.1 == lab).map(|x| x.0);
    s_ok &= ids.len() == 3 && matches!((by("f1"), by("f2"), by("f3")), (Some(a), Some(b), Some(c)) if a.fuse(b) == c);
    ok &= s_ok && t0.elapsed().as_secs_f64() < 1.0;
    let shown: Vec<String> = ids.iter().map(|(c, l)| format!("{l}={c}")).collect();
    notes.push(format!("TSCC {} [{}] ({:.2}s)", if s_ok { "ok" } else { "FAILED" }, shown.join(" "), t0.elapsed().as_secs_f64()));
    Ok((ok, notes.join("; ")))
}

fn subsystem_structure() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for l in [3, 4] {
        let g = tscc_gauge_code(l)?;
        let center = compute_stabilizer_from_gauge(&g)?;
        let gauge = g.gauge_instances();
        let stabs = instances(&center.templates, g.lattice);
        let gs = span_of(&gauge);
        let commute = stabs.iter().all(|s| gauge.iter().all(|x| x.commutes(s)));
        let in_gauge = stabs.iter().all(|s| gs.contains(&to_sym(s)));
        let maxw = center.templates.iter().map(Template::weight).max().unwrap_or(0);
        // S ⊂ S′ ⊂ G
        let tscc = build_tscc_48(l)?;
        let sp = build_intermediate_sz(&tscc)?;
        let spb = span_of(&sp.stabilizer_instances());
        let nested = tscc.stabilizer_instances().iter().all(|s| spb.contains(&to_sym(s)))
            && sp.stabilizer_instances().iter().all(|s| gs.contains(&to_sym(s)));
        let this = commute && in_gauge && maxw <= 24 && nested;
        ok &= this;
        notes.push(format!("L={l}: {} generators, max weight {maxw}, commute {commute}, in G {in_gauge}, S⊂S′⊂G {nested}", center.templates.len()));
    }
    let tscc = build_tscc_48(4)?;
    let sz = build_intermediate_sz(&tscc)?;
    let t = charge_table(&AnyonFrame::mapped(&sz, &builtin_map("tscc48").expect("shipped map"))?, Some(&tscc))?;
    let (proper, gauge) = (t.proper.clone().unwrap_or_default(), t.gauge.clone().unwrap_or_default());
    let plus = !gauge.is_empty() && proper.iter().all(|&a| gauge.iter().all(|&g| t.stat(a, g) == 1));
    ok &= plus;
    notes.push(format!("proper-gauge statistics all +1: {plus}"));
    Ok((ok, notes.join("; ")))
}

fn span_of(ps: &[Pauli]) -> Basis {
    let mut b = Basis::new(2 * ps.first().map_or(0, |p| p.lattice().n()));
    for v in syms(ps) {
        b.insert(v);
    }
    b
}

fn lcg(s: &mut u64) -> u64 {
    *s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    *s >> 33
}

fn decoder_exactness() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["ktc", "tcc48", "tscc48"] {
        let dec = Decoder::new(name, 4)?;
        let group = match dec.code.kind {
            CodeKind::Stabilizer => span_of(&dec.code.stabilizer_instances()),
            CodeKind::Subsystem => span_of(&dec.code.gauge_instances()),
        };
        let lat = dec.code.lattice;
        let mut bad = 0;
        for q in 0..dec.code.n() {
            for b in [X, Y, Z] {
                let e = Pauli::single(lat, q, b);
                let out = dec.decode(&e)?;
                let r = e.mul(&out.correction);
                if out.verdict != Verdict::Success || !group.contains(&to_sym(&r)) {
                    bad += 1;
                }
            }
        }
        ok &= bad == 0;
        notes.push(format!("{name} weight-1: {} errors, {bad} failures", 3 * dec.code.n()));
    }

    // MWPM on random toric-code syndromes: correction weight equals the
    // brute-force minimum over pairings under the torus metric
    let l = 8i64;
    let geom = ToricGeometry::plain(1, l as usize);
    let tor = |a: i64, b: i64| {
        let d = (a - b).rem_euclid(l);
        d.min(l - d)
    };
    let mut s = 7u64;
    let mut mismatches = 0;
    for trial in 0..1000 {
        let k = 2 * (1 + (lcg(&mut s) % 4) as usize);
        let t = trial % 2;
        let mut cells: Vec<usize> = Vec::new();
        while cells.len() < k {
            let c = (lcg(&mut s) % (l * l) as u64) as usize;
            if !cells.contains(&c) {
                cells.push(c);
            }
        }
        let mut syn = vec![false; 2 * (l * l) as usize];
        for &c in &cells {
            syn[t * (l * l) as usize + c] = true;
        }
        let corr = mwpm_decode_ktc(&geom, &syn)?;
        let pos = |c: usize| ((c as i64) % l, (c as i64) / l);
        let d = |i: usize, j: usize| {
            let (a, b) = (pos(cells[i]), pos(cells[j]));
            tor(a.0, b.0) + tor(a.1, b.1)
        };
        let best = brute_force_min_matching(k, &d);
        let pairs = min_weight_perfect_matching(k, d);
        let total: i64 = pairs.iter().map(|&(a, b)| d(a, b)).sum();
        let clears = extract_syndrome(&geom.code()?, &corr) == syn;
        if corr.weight() as i64 != best || total != best || !clears {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    notes.push(format!("MWPM vs brute force: 1000 syndromes (2-8 defects), {mismatches} mismatches"));
    Ok((ok, notes.join("; ")))
}

fn centralizer_checks() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    let tscc = build_tscc_48(6)?;
    let cases = [
        ("KTC", build_ktc(6)?),
        ("TCC", build_tcc_48(6)?),
        ("S′", build_intermediate_sz(&tscc)?),
        ("TSCC vs G", tscc),
    ];
    for (label, code) in cases {
        let r = local_centralizer_check(&code, 2)?;
        ok &= r.pass;
        notes.push(format!("{label} {} ({} checked)", if r.pass { "pass" } else { "FAIL" }, r.checked));
    }
    let mut hole = build_ktc(6)?;
    hole.stabilizers.remove(0);
    let r = local_centralizer_check(&hole, 2)?;
    let caught = !r.pass && !r.counterexamples.is_empty();
    ok &= caught;
    notes.push(format!(
        "mutilated KTC rejected: {caught}{}",
        r.counterexamples.first().map_or(String::new(), |p| format!(" (witness {})", p.to_text()))
    ));
    Ok((ok, notes.join(", ")))
}

fn cli_determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("topomap-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut notes = Vec::new();
    let mut ok = true;
    let runs = [("ktc", "bit_flip", "0.08:0.12:0.02", "4,6"), ("tscc48", "depolarizing", "0.01,0.03", "4")];
    for (code, ch, p, l) in runs {
        let mut outs = Vec::new();
        for w in ["1", "2", "5"] {
            let path = dir.join(format!("{code}-{w}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_topomap"))
                .args(["threshold", "--code", code, "--channel", ch, "--p", p, "--L", l, "--trials", "400", "--seed", "11", "--out"])
                .arg(&path)
                .env("TOPOMAP_WORKERS", w)
                .output()?;
            ok &= status.status.success();
            outs.push(std::fs::read(&path)?);
        }
        let same = outs.windows(2).all(|w| w[0] == w[1]);
        ok &= same;
        notes.push(format!("{code}: workers 1/2/5 {}", if same { "identical" } else { "DIFFER" }));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok((ok, notes.join(", ")))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("TCC threshold, bit flip", Box::new(|| threshold("tcc48", ChannelKind::BitFlip, "0.06:0.12:0.005", (0.08, 0.11)))),
        ("TSCC threshold, depolarizing", Box::new(|| threshold("tscc48", ChannelKind::Depolarizing, "0.010:0.030:0.002", (0.015, 0.025)))),
        ("KTC threshold, bit flip", Box::new(|| threshold("ktc", ChannelKind::BitFlip, "0.06:0.12:0.005", (0.095, 0.115)))),
        ("TCC -> 2 KTC map witness", Box::new(map_witness)),
        ("charge tables", Box::new(charge_tables)),
        ("subsystem structure", Box::new(subsystem_structure)),
        ("decoder exactness", Box::new(decoder_exactness)),
        ("local centralizer checks", Box::new(centralizer_checks)),
        ("CLI determinism", Box::new(cli_determinism)),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(|| f())) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        passed += pass as usize;
        println!("{} {}. {name}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, i + 1, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    let strict = std::env::var("TOPOMAP_ACCEPT_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < criteria.len() {
        std::process::exit(1);
    }
}
