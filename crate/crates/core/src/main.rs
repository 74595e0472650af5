use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use topomap::anyons::{charge_table, identify_fermions, AnyonFrame};
use topomap::codes::{build_intermediate_sz, by_name, instances, CodeKind};
use topomap::decoder::{sample_error, ChannelKind, Decoder, NoiseChannel, Verdict};
use topomap::mapper::{builtin_map, find_registered, padded_pair, verify_code_map, verify_symplectic, LocalCliffordMap};
use topomap::threshold::{emit_csv, estimate_threshold, parse_grid, parse_sizes, scan, CSV_HEADER};
use topomap::{Error, Result};

macro_rules! outln {
    ($o:expr, $($t:tt)*) => {{
        $o.push_str(&format!($($t)*));
        $o.push('\n');
    }};
}

/// CLI-facing code names.
const NAMES: [&str; 5] = ["ktc", "ktc-stack:n", "tcc48", "tscc48", "tscc48-sz"];

#[derive(Parser)]
#[command(name = "topomap", version, about = "Topological stabilizer and subsystem codes: maps, charges, decoding")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List or export codes
    Codes {
        #[command(subcommand)]
        cmd: CodesCmd,
    },
    /// Find or verify local Clifford maps
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
    /// Print the charge table of a code
    Charges {
        #[arg(long)]
        code: String,
        #[arg(long = "L", default_value_t = 6)]
        l: usize,
        /// Map file onto a toric-code stack (defaults to the shipped map)
        #[arg(long)]
        map: Option<String>,
    },
    /// Sample errors and decode them, printing every step
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        p: f64,
        #[arg(long = "L")]
        l: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Failure-rate scan over p and L, with a threshold estimate
    Threshold {
        #[arg(long)]
        code: String,
        #[arg(long)]
        channel: String,
        /// start:stop:step (inclusive) or a comma list
        #[arg(long)]
        p: String,
        /// Comma list of lattice sizes
        #[arg(long = "L")]
        l: String,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// CSV output file (stdout when absent)
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum CodesCmd {
    List,
    /// Generator instances in the operator text format
    Export {
        #[arg(long)]
        code: String,
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
        /// Export gauge generators instead of stabilizers
        #[arg(long)]
        gauge: bool,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    Find {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        #[arg(long)]
        out: Option<String>,
    },
    Verify {
        #[arg(long)]
        map: String,
        #[arg(long = "L", default_value_t = 4)]
        l: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut o = String::new();
    let res = run(cli.cmd, &mut o);
    // a closed pipe downstream is not an error
    if let Err(e) = std::io::stdout().lock().write_all(o.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            // bad names, numbers and ranges are usage errors
            let usage = matches!(e, Error::Parse(_) | Error::Domain(_) | Error::InvalidSize(_));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn run(cmd: Cmd, o: &mut String) -> Result<u8> {
    match cmd {
        Cmd::Codes { cmd: CodesCmd::List } => {
            for n in NAMES {
                outln!(o, "{n}");
            }
            Ok(0)
        }
        Cmd::Codes { cmd: CodesCmd::Export { code, l, gauge } } => {
            let c = by_name(&code, l)?;
            let ts = if gauge {
                if c.kind != CodeKind::Subsystem {
                    return Err(Error::Parse(format!("{code} has no gauge generators")));
                }
                &c.gauge
            } else {
                &c.stabilizers
            };
            outln!(o, "# {} L={} sites={} {}", c.name, l, c.sites(), if gauge { "gauge" } else { "stabilizers" });
            for p in instances(ts, c.lattice) {
                outln!(o, "{}", p.to_text());
            }
            Ok(0)
        }
        Cmd::Map { cmd: MapCmd::Find { source, target, radius, out } } => {
            let m = find_registered(&source, &target, radius)?;
            eprintln!("found {} -> {}: v = {}, {} target ancillas", m.source, m.target, m.v(), m.ancilla_out.len());
            write_or_print(out.as_deref(), &m.to_text(), o)?;
            Ok(0)
        }
        Cmd::Map { cmd: MapCmd::Verify { map, l } } => {
            let m = LocalCliffordMap::parse(&fs::read_to_string(&map)?)?;
            let sym = verify_symplectic(&m);
            let (s, t) = padded_pair(&m, l)?;
            let rep = verify_code_map(&m, &s, &t, l);
            outln!(o, "map {} -> {} at L = {l}", m.source, m.target);
            outln!(o, "symplectic: {}", ok(sym.symplectic_ok));
            outln!(o, "stabilizer groups: {}", ok(rep.group_map_ok));
            outln!(o, "v = {}, ancillas in/out = {}/{}", m.v(), m.ancilla_in.len(), m.ancilla_out.len());
            for f in sym.failures.iter().chain(&rep.failures) {
                outln!(o, "  {f}");
            }
            Ok(if sym.symplectic_ok && rep.symplectic_ok && rep.group_map_ok { 0 } else { 1 })
        }
        Cmd::Charges { code, l, map } => charges(&code, l, map.as_deref(), o),
        Cmd::Decode { code, channel, p, l, seed, trials } => {
            let ch = NoiseChannel::new(ChannelKind::parse(&channel)?, p)?;
            let dec = Decoder::new(&code, l)?;
            let l2 = l * l;
            for t in 0..trials {
                let e = sample_error(&ch, &dec.code, seed, t);
                let syn = dec.syndrome(&e);
                let out = dec.decode(&e)?;
                let fired: Vec<String> =
                    syn.iter().enumerate().filter(|s| *s.1).map(|(k, _)| format!("{}@{},{}", k / l2, k % l2 % l, k % l2 / l)).collect();
                outln!(o, "trial {t}");
                outln!(o, "error: {}", e.to_text());
                outln!(o, "syndrome: {} violated: {}", fired.len(), fired.join(" "));
                outln!(o, "correction: {}", out.correction.to_text());
                let verdict = match out.verdict {
                    Verdict::Success => "success",
                    Verdict::LogicalFailure => "logical_failure",
                };
                match out.residual_class {
                    Some([a, b]) => outln!(o, "verdict: {verdict} (residual loops {a} {b})"),
                    None => outln!(o, "verdict: {verdict}"),
                }
            }
            Ok(0)
        }
        Cmd::Threshold { code, channel, p, l, trials, seed, out } => {
            let kind = ChannelKind::parse(&channel)?;
            let grid = parse_grid(&p)?;
            let sizes = parse_sizes(&l)?;
            if trials == 0 {
                return Err(Error::Domain("trials must be at least 1".into()));
            }
            by_name(&code, 4)?;
            let mut file = match &out {
                Some(path) => {
                    let mut f = fs::File::create(path)?;
                    writeln!(f, "{CSV_HEADER}")?;
                    Some(f)
                }
                None => None,
            };
            let points = scan(&code, kind, &grid, &sizes, trials, seed, file.as_mut().map(|f| f as &mut dyn Write))?;
            let est = estimate_threshold(&points).ok();
            let mut text = emit_csv(&points, est.as_ref());
            if est.is_none() {
                text.push_str("# estimate,unavailable (needs two sizes and three p values)\n");
            }
            if let Some(e) = &est {
                match e.p_star {
                    Some(ps) => eprintln!("threshold estimate p* = {ps}"),
                    None => eprintln!("no threshold detected"),
                }
            }
            drop(file);
            write_or_print(out.as_deref(), &text, o)?;
            Ok(0)
        }
    }
}

fn charges(code: &str, l: usize, map: Option<&str>, o: &mut String) -> Result<u8> {
    let c = by_name(code, l)?;
    let load = |src: &str| -> Result<LocalCliffordMap> {
        match map {
            Some(path) => LocalCliffordMap::parse(&fs::read_to_string(path)?),
            None => builtin_map(src).ok_or_else(|| Error::NotFound(format!("no shipped map for {src}; pass --map"))),
        }
    };
    let table = match c.kind {
        CodeKind::Subsystem => {
            let sz = build_intermediate_sz(&c)?;
            let frame = AnyonFrame::mapped(&sz, &load(code)?)?;
            charge_table(&frame, Some(&c))?
        }
        _ if code == "ktc" || code.starts_with("ktc-stack:") => charge_table(&AnyonFrame::direct(&c)?, None)?,
        _ => charge_table(&AnyonFrame::mapped(&c, &load(code)?)?, None)?,
    };
    outln!(o, "# {} L={l}: {} charges, name vector spin statistics", c.name, table.charges.len());
    o.push_str(&table.to_text());
    if let Some(ids) = identify_fermions(&table) {
        let s: Vec<String> = ids.iter().map(|(ch, lab)| format!("{lab}={ch}")).collect();
        outln!(o, "# proper fermions: {}", s.join(" "));
    }
    let bad = table.consistency_failures();
    for f in &bad {
        outln!(o, "# inconsistent: {f}");
    }
    Ok(if bad.is_empty() { 0 } else { 1 })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn write_or_print(path: Option<&str>, text: &str, o: &mut String) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => o.push_str(text),
    }
    Ok(())
}
