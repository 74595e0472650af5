use topomap::decoder::{ChannelKind, Decoder, NoiseChannel};
use topomap::threshold::*;

fn synthetic(rate: impl Fn(f64, usize) -> f64, grid: &[f64], sizes: &[usize]) -> Vec<ThresholdPoint> {
    let trials = 1_000_000u64;
    let mut out = Vec::new();
    for &l in sizes {
        for &p in grid {
            out.push(ThresholdPoint {
                code: "ktc".into(),
                decoder: "mwpm".into(),
                channel: "bit_flip".into(),
                l,
                p,
                trials,
                failures: (rate(p, l) * trials as f64).round() as u64,
                seed: 0,
            });
        }
    }
    out
}

#[test]
fn grid_syntax() {
    let g = parse_grid("0.06:0.12:0.005").unwrap();
    assert_eq!(g.len(), 13);
    assert_eq!((g[0], g[3], g[12]), (0.06, 0.075, 0.12));
    assert_eq!(parse_grid("0.010:0.030:0.002").unwrap().len(), 11);
    assert_eq!(parse_grid("0.08").unwrap(), vec![0.08]);
    assert_eq!(parse_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
    for bad in ["0.2:0.1:0.01", "0:1:0", "a:b:c", "1.5", "0:1", ""] {
        assert!(parse_grid(bad).is_err(), "{bad}");
    }
    assert_eq!(parse_sizes("8,12,16").unwrap(), vec![8, 12, 16]);
    assert!(parse_sizes("8,x").is_err());
}

#[test]
fn point_statistics() {
    let pt = synthetic(|_, _| 0.25, &[0.1], &[8]).remove(0);
    assert_eq!(pt.failure_rate(), 0.25);
    assert_eq!(pt.stderr(), (0.25f64 * 0.75 / 1e6).sqrt());
    let z = NoiseChannel::new(ChannelKind::Depolarizing, 0.0).unwrap();
    let p0 = run_point("ktc", &z, 4, 200, 1).unwrap();
    assert_eq!(p0.failures, 0);
    assert!(run_point("ktc", &z, 4, 0, 1).is_err());
}

#[test]
fn worker_count_does_not_change_results() {
    let dec = Decoder::new("tcc48", 6).unwrap();
    let ch = NoiseChannel::new(ChannelKind::BitFlip, 0.04).unwrap();
    let a = count_failures(&dec, &ch, 300, 5, 1).unwrap();
    let b = count_failures(&dec, &ch, 300, 5, 3).unwrap();
    let c = count_failures(&dec, &ch, 300, 5, 8).unwrap();
    assert_eq!((a, a), (b, c));
    assert!(a > 0 && a < 300);
}

#[test]
fn larger_lattice_wins_below_threshold() {
    let ch = NoiseChannel::new(ChannelKind::BitFlip, 0.05).unwrap();
    let small = run_point("ktc", &ch, 8, 4000, 3).unwrap();
    let large = run_point("ktc", &ch, 16, 4000, 3).unwrap();
    let sigma = (small.stderr().powi(2) + large.stderr().powi(2)).sqrt();
    assert!(small.failure_rate() - large.failure_rate() > 3.0 * sigma, "{} vs {}", small.failure_rate(), large.failure_rate());
}

#[test]
fn scan_is_the_product_of_points() {
    let mut sink = Vec::new();
    let pts = scan("ktc", ChannelKind::BitFlip, &[0.12, 0.08], &[6, 4], 50, 9, Some(&mut sink)).unwrap();
    assert_eq!(pts.len(), 4);
    let keys: Vec<(usize, f64)> = pts.iter().map(|p| (p.l, p.p)).collect();
    assert_eq!(keys, vec![(4, 0.08), (4, 0.12), (6, 0.08), (6, 0.12)]);
    assert_eq!(String::from_utf8(sink).unwrap().lines().count(), 4);
    let one = scan("ktc", ChannelKind::BitFlip, &[0.1], &[6], 80, 2, None).unwrap();
    let direct = run_point("ktc", &NoiseChannel::new(ChannelKind::BitFlip, 0.1).unwrap(), 6, 80, 2).unwrap();
    assert_eq!(one, vec![direct]);
    assert!(scan("ktc", ChannelKind::BitFlip, &[], &[6], 10, 1, None).is_err());
}

#[test]
fn estimator_on_synthetic_curves() {
    let grid = parse_grid("0.05:0.15:0.01").unwrap();
    let flat = estimate_threshold(&synthetic(|p, _| p, &grid, &[8, 12, 16])).unwrap();
    assert_eq!(flat.p_star, None);
    assert!(flat.crossings.iter().all(|c| c.1.is_none()));

    // crossing exactly at p = 0.1, on and off the grid
    let cross = |p: f64, l: usize| (0.5 + (p - 0.1) * l as f64).clamp(0.0, 1.0);
    let e = estimate_threshold(&synthetic(cross, &grid, &[8, 12, 16])).unwrap();
    assert!((e.p_star.unwrap() - 0.1).abs() < 0.01, "{:?}", e);
    let off = parse_grid("0.055:0.145:0.01").unwrap();
    let e = estimate_threshold(&synthetic(cross, &off, &[8, 12, 16])).unwrap();
    assert!((e.p_star.unwrap() - 0.1).abs() < 0.01, "{:?}", e);
    assert_eq!(e.crossings.len(), 2);

    assert!(estimate_threshold(&synthetic(cross, &grid, &[8])).is_err());
    assert!(estimate_threshold(&synthetic(cross, &[0.1, 0.2], &[8, 12])).is_err());
}

#[test]
fn csv_round_trip() {
    let grid = parse_grid("0.05:0.15:0.01").unwrap();
    let pts = synthetic(|p, l| (0.3 + (p - 0.11) * l as f64 * 1.37).clamp(0.0, 1.0), &grid, &[8, 12, 16]);
    let est = estimate_threshold(&pts).unwrap();
    let text = emit_csv(&pts, Some(&est));
    assert!(text.starts_with("code,decoder,channel,L,p,trials,failures,failure_rate,stderr,seed\n"));
    assert!(text.lines().last().unwrap().starts_with('#'));
    let back = parse_csv(&text).unwrap();
    assert_eq!(back, pts);
    assert_eq!(estimate_threshold(&back).unwrap(), est);
    // printed rate and stderr reproduce the binomial formula exactly
    for (line, p) in text.lines().skip(1).zip(&pts) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[7].parse::<f64>().unwrap(), p.failure_rate());
        assert_eq!(f[8].parse::<f64>().unwrap(), p.stderr());
    }
    assert!(parse_csv("nonsense\n1,2").is_err());
}
