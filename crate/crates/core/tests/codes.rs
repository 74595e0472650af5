use topomap::codes::*;
use topomap::gf2;
use topomap::pauli::{Pauli, Template};

fn all_commute(ps: &[Pauli]) -> bool {
    ps.iter().all(|a| ps.iter().all(|b| a.commutes(b)))
}

#[test]
fn ktc_l3_counts() {
    let c = build_ktc(3).unwrap();
    assert_eq!(c.n(), 18);
    let inst = c.stabilizer_instances();
    assert_eq!(inst.len(), 18);
    assert_eq!(gf2::rank(&syms(&inst)), 16);
    assert_eq!(c.logical_count(), 2);
    assert!(all_commute(&inst));
    assert!(c.stabilizers.iter().all(|t| t.range() == 2));
    assert!(build_ktc(1).is_err());
}

#[test]
fn stack_is_additive() {
    let one = build_ktc_stack(1, 3).unwrap();
    let base = build_ktc(3).unwrap();
    assert_eq!(one.stabilizers, base.stabilizers);
    assert_eq!(one.lattice, base.lattice);
    let two = build_ktc_stack(2, 3).unwrap();
    assert_eq!(two.logical_count(), 4);
    let inst = two.stabilizer_instances();
    assert!(all_commute(&inst));
    assert!(build_ktc_stack(0, 3).is_err());
}

#[test]
fn tcc_counts_and_weights() {
    let c = build_tcc_48(2).unwrap();
    assert_eq!(c.n(), 32);
    assert_eq!(c.logical_count(), 4);
    let mut w: Vec<usize> = c.stabilizers.iter().map(Template::weight).collect();
    w.sort();
    assert_eq!(w, vec![4, 4, 4, 4, 8, 8, 8, 8]);
    for l in [3, 4] {
        let c = c.at(l);
        assert!(all_commute(&c.stabilizer_instances()));
        assert_eq!(c.logical_count(), 4);
    }
}

#[test]
fn tscc_structure() {
    let g = tscc_gauge_code(3).unwrap();
    assert_eq!(g.gauge.len(), 48);
    // every qubit: two solid edges, one XX link, one YY link
    for s in 0..24 {
        let mut ls: Vec<u8> = g
            .gauge
            .iter()
            .flat_map(|t| t.terms().iter().filter(|e| e.0.s as usize == s).map(|e| e.1).collect::<Vec<_>>())
            .collect();
        ls.sort();
        assert_eq!(ls, vec![1, 2, 2, 3]);
    }
    let c = build_tscc_48(3).unwrap();
    assert!(!c.stabilizers.is_empty());
    let gauge = c.gauge_instances();
    let stabs = c.stabilizer_instances();
    for s in &stabs {
        assert!(gauge.iter().all(|g| g.commutes(s)));
    }
    let gs = syms(&gauge);
    for s in &stabs {
        assert!(gf2::in_span(&gf2::to_sym(s), &gs).is_some());
    }
    let maxw = c.stabilizers.iter().map(Template::weight).max().unwrap();
    assert!(maxw <= 24 && maxw >= 10, "max weight {maxw}");
    for l in [2, 3, 4] {
        assert_eq!(c.at(l).logical_count(), 2, "L = {l}");
    }
}

#[test]
fn intermediate_code() {
    let t = build_tscc_48(3).unwrap();
    let sz = build_intermediate_sz(&t).unwrap();
    assert_eq!(sz.logical_count(), 4);
    assert!(all_commute(&sz.stabilizer_instances()));
    let sp = syms(&sz.stabilizer_instances());
    for s in t.stabilizer_instances() {
        assert!(gf2::in_span(&gf2::to_sym(&s), &sp).is_some());
    }
    let gs = syms(&t.gauge_instances());
    for s in &sp {
        assert!(gf2::in_span(s, &gs).is_some());
    }
    assert!(build_intermediate_sz(&build_ktc(3).unwrap()).is_err());
}

#[test]
fn ktc_as_subsystem_regenerates_stabilizer() {
    let k = build_ktc(3).unwrap();
    let sub = CodeDef { gauge: k.stabilizers.clone(), stabilizers: vec![], kind: CodeKind::Subsystem, ..k.clone() };
    let s = compute_stabilizer_from_gauge(&sub).unwrap();
    let a = syms(&instances(&s.templates, k.lattice));
    let b = syms(&k.stabilizer_instances());
    assert_eq!(gf2::rank(&a), gf2::rank(&b));
    for v in &a {
        assert!(gf2::in_span(v, &b).is_some());
    }
}

#[test]
fn centralizer_checks() {
    for c in [build_ktc(6).unwrap(), build_tcc_48(6).unwrap()] {
        let r = local_centralizer_check(&c, 2).unwrap();
        assert!(r.pass, "{}", c.name);
    }
    let mut hole = build_ktc(6).unwrap();
    hole.stabilizers.remove(0);
    let r = local_centralizer_check(&hole, 2).unwrap();
    assert!(!r.pass);
    assert!(!r.counterexamples.is_empty());
    assert!(local_centralizer_check(&build_ktc(3).unwrap(), 2).is_err());
}

#[test]
fn registry() {
    for n in ["ktc", "ktc-stack:3", "tcc48"] {
        assert!(by_name(n, 3).is_ok());
    }
    assert!(by_name("nope", 3).is_err());
}

#[test]
#[ignore]
fn dump_tscc_stabilizers() {
    let c = build_tscc_48(3).unwrap();
    for t in &c.stabilizers {
        println!("{} {}", t.weight(), t);
    }
}
