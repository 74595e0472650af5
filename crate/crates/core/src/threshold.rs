//! Monte Carlo failure-rate sweeps and threshold estimation.

use std::io::Write;

use rayon::prelude::*;

use crate::decoder::{sample_terms, trial_rng, ChannelKind, Decoder, NoiseChannel};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "code,decoder,channel,L,p,trials,failures,failure_rate,stderr,seed";

/// One (code, channel, L, p) Monte Carlo record.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdPoint {
    pub code: String,
    pub decoder: String,
    pub channel: String,
    pub l: usize,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub seed: u64,
}

impl ThresholdPoint {
    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        let r = self.failure_rate();
        (r * (1.0 - r) / self.trials as f64).sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.code,
            self.decoder,
            self.channel,
            self.l,
            self.p,
            self.trials,
            self.failures,
            self.failure_rate(),
            self.stderr(),
            self.seed
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdEstimate {
    /// None when no adjacent pair of curves crosses.
    pub p_star: Option<f64>,
    pub method: String,
    /// Per adjacent (L, L′) pair, the interpolated crossing if any.
    pub crossings: Vec<((usize, usize), Option<f64>)>,
}

impl ThresholdEstimate {
    /// `#`-prefixed summary lines for the end of a CSV file.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut out = vec![match self.p_star {
            Some(p) => format!("# estimate,method={},p_star={p}", self.method),
            None => format!("# estimate,method={},p_star=none (no threshold detected)", self.method),
        }];
        for ((a, b), c) in &self.crossings {
            out.push(match c {
                Some(p) => format!("# crossing,L={a}-{b},p={p}"),
                None => format!("# crossing,L={a}-{b},absent"),
            });
        }
        out
    }
}

pub fn decoder_name(code: &str) -> &'static str {
    match code {
        "tcc48" | "tscc48-sz" => "mapped-mwpm",
        "tscc48" => "gauge-mapped-mwpm",
        _ => "mwpm",
    }
}

/// Worker count: `TOPOMAP_WORKERS` if set, else the available parallelism.
pub fn workers() -> usize {
    std::env::var("TOPOMAP_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// `start:stop:step` (inclusive within 1e-12) or a comma list of values.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("`{t}` is not a number")));
    let out: Vec<f64> = match s.split(':').collect::<Vec<_>>()[..] {
        [a, b, c] => {
            let (a, b, c) = (num(a)?, num(b)?, num(c)?);
            if !(c > 0.0) || b < a {
                return Err(Error::Parse(format!("grid `{s}` needs start ≤ stop and step > 0")));
            }
            let mut v = Vec::new();
            let mut k = 0u32;
            loop {
                let x = a + k as f64 * c;
                if x > b + 1e-12 {
                    break;
                }
                v.push((x * 1e12).round() / 1e12);
                k += 1;
            }
            v
        }
        [_] => s.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(Error::Parse(format!("grid `{s}` is neither start:stop:step nor a list"))),
    };
    if out.is_empty() || out.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Parse(format!("grid `{s}` must contain probabilities in [0, 1]")));
    }
    Ok(out)
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("`{t}` is not a lattice size"))))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty size list".into()));
    }
    Ok(v)
}

/// Failures over `trials` samples on a prepared decoder. Trial t draws its
/// error from the stream of `sample_error(seed, t)`, so the count does not
/// depend on `workers`.
pub fn count_failures(dec: &Decoder, channel: &NoiseChannel, trials: u64, seed: u64, workers: usize) -> Result<u64> {
    let n = dec.code.n();
    let (name, l) = (dec.code.name.as_str(), dec.l());
    let one = |t: u64| -> Result<u64> {
        let terms = sample_terms(channel, n, &mut trial_rng(seed, name, l, 0, t));
        Ok(dec.fails(&terms)? as u64)
    };
    if workers <= 1 {
        return (0..trials).map(one).sum();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(one).try_reduce(|| 0, |a, b| Ok(a + b)))
}

pub fn run_point_on(dec: &Decoder, channel: &NoiseChannel, trials: u64, seed: u64, workers: usize) -> Result<ThresholdPoint> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let failures = count_failures(dec, channel, trials, seed, workers)?;
    Ok(ThresholdPoint {
        code: dec.code.name.clone(),
        decoder: decoder_name(&dec.code.name).into(),
        channel: channel.kind.name().into(),
        l: dec.l(),
        p: channel.p,
        trials,
        failures,
        seed,
    })
}

pub fn run_point(code: &str, channel: &NoiseChannel, l: usize, trials: u64, seed: u64) -> Result<ThresholdPoint> {
    run_point_on(&Decoder::new(code, l)?, channel, trials, seed, workers())
}

/// Full (L, p) product, rows streamed to `sink` as they complete; the
/// result is sorted by (code, L, p).
pub fn scan(
    code: &str,
    kind: ChannelKind,
    grid: &[f64],
    sizes: &[usize],
    trials: u64,
    seed: u64,
    mut sink: Option<&mut dyn Write>,
) -> Result<Vec<ThresholdPoint>> {
    if grid.is_empty() || sizes.is_empty() {
        return Err(Error::Precondition("empty p grid or size list".into()));
    }
    let w = workers();
    let mut out = Vec::with_capacity(grid.len() * sizes.len());
    for &l in sizes {
        let dec = Decoder::new(code, l)?;
        for &p in grid {
            let pt = run_point_on(&dec, &NoiseChannel::new(kind, p)?, trials, seed, w)?;
            if let Some(s) = sink.as_deref_mut() {
                writeln!(s, "{}", pt.csv_row())?;
                s.flush()?;
            }
            out.push(pt);
        }
    }
    out.sort_by(|a, b| (&a.code, a.l).cmp(&(&b.code, b.l)).then(a.p.total_cmp(&b.p)));
    Ok(out)
}

/// Median of the linearly interpolated crossings of adjacent-size curves.
pub fn estimate_threshold(points: &[ThresholdPoint]) -> Result<ThresholdEstimate> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.l).collect();
    sizes.sort();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::Precondition("need at least two lattice sizes".into()));
    }
    let curve = |l: usize| -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = points.iter().filter(|p| p.l == l).map(|p| (p.p, p.failure_rate())).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let mut crossings = Vec::new();
    for w in sizes.windows(2) {
        let (small, large) = (curve(w[0]), curve(w[1]));
        if small.len() < 3 || large.len() < 3 {
            return Err(Error::Precondition(format!("L = {} or {} has fewer than three p values", w[0], w[1])));
        }
        // difference on the common grid: negative where the larger lattice wins
        let diff: Vec<(f64, f64)> = small
            .iter()
            .filter_map(|&(p, r)| large.iter().find(|q| q.0 == p).map(|q| (p, q.1 - r)))
            .collect();
        crossings.push(((w[0], w[1]), crossing(&diff)));
    }
    let mut found: Vec<f64> = crossings.iter().filter_map(|c| c.1).collect();
    found.sort_by(f64::total_cmp);
    let p_star = match found.len() {
        0 => None,
        k if k % 2 == 1 => Some(found[k / 2]),
        k => Some(0.5 * (found[k / 2 - 1] + found[k / 2])),
    };
    Ok(ThresholdEstimate { p_star, method: "median-adjacent-linear-crossing".into(), crossings })
}

/// First sign change from negative to positive, skipping exact ties.
fn crossing(diff: &[(f64, f64)]) -> Option<f64> {
    let nz: Vec<usize> = (0..diff.len()).filter(|&i| diff[i].1 != 0.0).collect();
    for w in nz.windows(2) {
        let (i, j) = (w[0], w[1]);
        let ((p0, d0), (p1, d1)) = (diff[i], diff[j]);
        if d0 < 0.0 && d1 > 0.0 {
            return Some(if j == i + 1 {
                p0 + (p1 - p0) * (-d0) / (d1 - d0)
            } else {
                // curves touch on a run of grid points
                diff[i + 1..j].iter().map(|d| d.0).sum::<f64>() / (j - i - 1) as f64
            });
        }
    }
    None
}

pub fn emit_csv(points: &[ThresholdPoint], estimate: Option<&ThresholdEstimate>) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&p.csv_row());
        s.push('\n');
    }
    if let Some(e) = estimate {
        for line in e.comment_lines() {
            s.push_str(&line);
            s.push('\n');
        }
    }
    s
}

/// Rows of a CSV produced by [`emit_csv`]; comment lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<ThresholdPoint>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("missing CSV header".into()));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::Parse(format!("expected 10 fields: `{line}`")));
            }
            let bad = |what: &str| Error::Parse(format!("bad {what} in `{line}`"));
            let pt = ThresholdPoint {
                code: f[0].into(),
                decoder: f[1].into(),
                channel: f[2].into(),
                l: f[3].parse().map_err(|_| bad("L"))?,
                p: f[4].parse().map_err(|_| bad("p"))?,
                trials: f[5].parse().map_err(|_| bad("trials"))?,
                failures: f[6].parse().map_err(|_| bad("failures"))?,
                seed: f[9].parse().map_err(|_| bad("seed"))?,
            };
            if pt.failures > pt.trials || pt.trials == 0 {
                return Err(bad("failure count"));
            }
            Ok(pt)
        })
        .collect()
}
