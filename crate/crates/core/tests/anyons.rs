use std::time::Instant;

use topomap::anyons::*;
use topomap::codes::*;
use topomap::mapper::*;
use topomap::pauli::{Pauli, Z};

fn ktc_frame(l: usize) -> AnyonFrame {
    AnyonFrame::direct(&build_ktc(l).unwrap()).unwrap()
}

#[test]
fn charge_algebra() {
    let (e, m) = (Charge::e(0, 1), Charge::m(0, 1));
    let f = e.fuse(m);
    assert_eq!(f.name(), "f");
    assert_eq!(f.fuse(f), Charge::vacuum(1));
    assert_eq!((e.spin(), m.spin(), f.spin()), (1, 1, -1));
    let mf = Charge::parse("[m,f]", 2).unwrap();
    assert_eq!(mf.spin(), -1);
    assert_eq!(mf.name(), "[m,f]");
    assert!(Charge::parse("[x,f]", 2).is_err());
    let [f1, f2, f3] = reference_fermions();
    assert_eq!(f1.1.fuse(f2.1), f3.1);
}

#[test]
fn ktc_table() {
    let t0 = Instant::now();
    let fr = ktc_frame(4);
    let t = charge_table(&fr, None).unwrap();
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    assert_eq!(t.charges.len(), 4);
    assert_eq!(t.fermions().len(), 1);
    for &a in &t.charges {
        for &b in &t.charges {
            let want = if a.is_vacuum() || b.is_vacuum() || a == b { 1 } else { -1 };
            assert_eq!(t.stat(a, b), want, "{a} {b}");
        }
    }
    assert!(t.consistency_failures().is_empty());
    assert_eq!(logical_count(&build_ktc(4).unwrap(), 4), 2);
}

#[test]
fn ktc_strings_and_region_charges() {
    let fr = ktc_frame(6);
    let s = fr.build_string(0, (1, 1), (1, 1)).unwrap();
    assert!(s.operator.is_identity());
    // e-string of length 3 violates exactly two plaquettes
    let s = fr.build_string(0, (0, 2), (3, 2)).unwrap();
    assert_eq!(s.operator.weight(), 3);
    assert_eq!(fr.violated(&s.operator).len(), 2);
    assert!(fr.build_string(2, (0, 0), (1, 0)).is_err());
    let code = build_ktc(6).unwrap();
    let stabs = code.stabilizer_instances();
    let syn = |p: &Pauli| stabs.iter().map(|g| !g.commutes(p)).collect::<Vec<_>>();
    let none = vec![false; stabs.len()];
    assert!(fr.syndrome_charge(&none, (0, 0, 6, 6)).unwrap().is_vacuum());
    // one star from an m-string, the other end outside the region
    let m = fr.build_string(1, (1, 1), (4, 1)).unwrap();
    assert_eq!(fr.syndrome_charge(&syn(&m.operator), (0, 0, 3, 3)).unwrap(), Charge::m(0, 1));
    assert!(fr.syndrome_charge(&syn(&s.operator), (0, 0, 6, 6)).unwrap().is_vacuum());
    assert!(matches!(fr.syndrome_charge(&none, (4, 0, 3, 3)), Err(topomap::Error::IllDefinedCharge(_))));
    assert!(fr.mutual_statistics(Charge::e(0, 1), Charge::e(0, 1)).unwrap() == 1);
    assert!(AnyonFrame::direct(&build_ktc(3).unwrap()).unwrap().mutual_statistics(Charge::e(0, 1), Charge::m(0, 1)).is_err());
}

#[test]
fn tcc_table_is_two_toric_codes() {
    let m = find_registered("tcc48", "ktc-stack:2", 1).unwrap();
    let code = build_tcc_48(4).unwrap();
    let t0 = Instant::now();
    let fr = AnyonFrame::mapped(&code, &m).unwrap();
    let t = charge_table(&fr, None).unwrap();
    assert!(t0.elapsed().as_secs_f64() < 1.0, "{:?}", t0.elapsed());
    assert_eq!(t.charges.len(), 16);
    assert!(t.consistency_failures().is_empty());
    let st = stack_table(2);
    assert!(find_isomorphism(&t, &st, &|_| true).is_some());
    // pulled-back strings only violate generators near their endpoints
    let s = fr.charge_string(Charge::parse("[f,e]", 2).unwrap(), (0, 0), (2, 1)).unwrap();
    let v = fr.violated(&s.operator);
    assert!(!v.is_empty());
    assert!(v.len() <= 2 * 16);
}

#[test]
fn tscc_proper_and_gauge_charges() {
    let tscc = build_tscc_48(4).unwrap();
    let sz = build_intermediate_sz(&tscc).unwrap();
    let m = find_registered("tscc48-sz", "ktc-stack:2", 2).unwrap();
    let fr = AnyonFrame::mapped(&sz, &m).unwrap();
    let t = charge_table(&fr, Some(&tscc)).unwrap();
    let proper = t.proper.clone().unwrap();
    let gauge = t.gauge.clone().unwrap();
    assert_eq!(proper.len(), 4);
    assert_eq!(gauge.len(), 4);
    for &a in &proper {
        if !a.is_vacuum() {
            assert_eq!(a.spin(), -1);
        }
        for &b in &proper {
            if !a.is_vacuum() && !b.is_vacuum() && a != b {
                assert_eq!(t.stat(a, b), -1);
                assert!(proper.contains(&a.fuse(b)));
            }
        }
        for &g in &gauge {
            assert_eq!(t.stat(a, g), 1);
        }
    }
    let ids = identify_fermions(&t).unwrap();
    assert_eq!(ids.len(), 3);
    // f1 × f2 = f3 holds for the identified labels
    let by = |l: &str| ids.iter().find(|x| x.1 == l).unwrap().0;
    assert_eq!(by("f1").fuse(by("f2")), by("f3"));
    // a pulled-back f3 string only violates S′ generators near its ends
    let s = fr.charge_string(by("f3"), (0, 0), (2, 0)).unwrap();
    let lat = sz.lattice;
    for i in fr.violated(&s.operator) {
        let cell = i % 16;
        let (x, y) = ((cell % 4) as i64, (cell / 4) as i64);
        let near = |cx: i64| lat.delta(x as usize, cx as usize).abs() <= 1 && lat.delta(y as usize, 0).abs() <= 1;
        assert!(near(0) || near(2), "violation at cell ({x},{y})");
    }
    let _ = Pauli::single(lat, 0, Z);
}
