use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use pusnec::ffield::{matrix, ExtElem};
use pusnec::gabidulin::serial::{deserialize, pack_symbols, serialize, unpack_symbols};
use pusnec::gabidulin::{registry, Codec, CodecSpec, OuterWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::{exit_err, Cli, EXIT_CONFIG, EXIT_INVARIANT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Roundtrip,
    Fuzz,
    Vectors,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Registry id, e.g. gab9-3 or gab11-4@8/3/1.
    #[arg(long)]
    pub spec: String,
    /// Interleaving depth (default: registry default).
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Roundtrip)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Vector file to verify instead of generating one (vectors mode).
    #[arg(long)]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize)]
struct Beyond {
    trials: usize,
    refused: usize,
    correct: usize,
    silent: usize,
}

#[derive(Debug, Serialize)]
struct Report {
    spec_id: String,
    spec: CodecSpec,
    mode: Mode,
    count: usize,
    failures: usize,
    beyond_capability: Option<Beyond>,
}

type Message = (Vec<Vec<ExtElem>>, Vec<Vec<ExtElem>>);

fn random_message(codec: &Codec, rng: &mut ChaCha8Rng) -> Message {
    let s = codec.spec();
    let f = codec.field();
    let draw = |len: usize, rng: &mut ChaCha8Rng| (0..len).map(|_| f.random(rng)).collect::<Vec<_>>();
    let u = (0..s.l).map(|_| draw(s.k0, rng)).collect();
    let r = (0..s.l).map(|_| draw(s.mu0, rng)).collect();
    (u, r)
}

/// Add a rank-≤τ error and ρ erasures on jointly independent column
/// combinations; returns the erasure location rows.
fn inject(codec: &Codec, y: &mut OuterWord, tau: usize, rho: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u16>> {
    let f = codec.field();
    let gf = f.ground();
    let n0 = codec.spec().n0;
    let rows = loop {
        let m: matrix::Mat = (0..tau + rho).map(|_| (0..n0).map(|_| gf.random(rng)).collect()).collect();
        if matrix::rank(gf, &m) == tau + rho {
            break m;
        }
    };
    for b in &rows {
        for comp in y.rows.iter_mut() {
            let a = f.random(rng);
            for (x, &c) in comp.iter_mut().zip(b) {
                *x += f.scale(a, c);
            }
        }
    }
    rows[tau..].to_vec()
}

fn decode_ok(codec: &Codec, y: &OuterWord, era: &[Vec<u16>], msg: &Message, timer: &mut Timer) -> bool {
    let t = Instant::now();
    let d = codec.decode(y, era);
    timer.add(t);
    matches!(d, Ok(d) if d.u == msg.0 && d.r == msg.1)
}

#[derive(Default)]
struct Timer {
    n: usize,
    secs: f64,
}

impl Timer {
    fn add(&mut self, t: Instant) {
        self.n += 1;
        self.secs += t.elapsed().as_secs_f64();
    }

    fn mean_us(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.secs / self.n as f64 * 1e6
        }
    }
}

fn roundtrip(codec: &Codec, count: usize, rng: &mut ChaCha8Rng, timer: &mut Timer) -> usize {
    let s = *codec.spec();
    (0..count)
        .filter(|_| {
            let msg = random_message(codec, rng);
            let Ok(y) = codec.encode_message(&msg.0, &msg.1) else { return true };
            let bytes = serialize(&y, s.n, s.w);
            let back = deserialize(&bytes, s.l, s.n0, s.n, s.w);
            !matches!(back, Ok(ref b) if *b == y) || !decode_ok(codec, &y, &[], &msg, timer)
        })
        .count()
}

fn fuzz(codec: &Codec, count: usize, rng: &mut ChaCha8Rng, timer: &mut Timer) -> (usize, Beyond) {
    let s = *codec.spec();
    let cap = s.capability();
    let pairs: Vec<(usize, usize)> = (0..=cap / 2).flat_map(|t| (0..=cap - 2 * t).map(move |r| (t, r))).collect();
    let mut failures = 0;
    for i in 0..count {
        let (tau, rho) = pairs[i % pairs.len()];
        let msg = random_message(codec, rng);
        let Ok(mut y) = codec.encode_message(&msg.0, &msg.1) else {
            failures += 1;
            continue;
        };
        let era = inject(codec, &mut y, tau, rho, rng);
        if !decode_ok(codec, &y, &era, &msg, timer) {
            failures += 1;
        }
    }
    // ρ = n0 − k erasures leave no redundancy, so any further error is
    // undetectable; beyond-capability patterns keep ρ below that
    let mut beyond = Beyond::default();
    if cap > 0 && cap / 2 < s.n0 {
        for _ in 0..count {
            let tau = rng.random_range(cap / 2 + 1..=s.n0);
            let rho = rng.random_range(0..=(s.n0 - tau).min(cap - 1));
            let msg = random_message(codec, rng);
            let Ok(mut y) = codec.encode_message(&msg.0, &msg.1) else { continue };
            let era = inject(codec, &mut y, tau, rho, rng);
            beyond.trials += 1;
            match codec.decode(&y, &era) {
                Err(_) => beyond.refused += 1,
                Ok(d) if d.u == msg.0 && d.r == msg.1 => beyond.correct += 1,
                Ok(_) => beyond.silent += 1,
            }
        }
    }
    (failures, beyond)
}

const VECTOR_HEADER: &str = "# pusnec codec vectors v1";

fn elems_hex(codec: &Codec, rows: &[Vec<ExtElem>]) -> String {
    let n = codec.spec().n;
    let syms: Vec<u16> = rows.iter().flatten().flat_map(|e| e.coords(n).to_vec()).collect();
    if syms.is_empty() {
        return "-".into();
    }
    hex::encode(pack_symbols(&syms, codec.spec().w))
}

fn hex_elems(codec: &Codec, text: &str, per_row: usize) -> Option<Vec<Vec<ExtElem>>> {
    let s = codec.spec();
    let bytes = if text == "-" { Vec::new() } else { hex::decode(text).ok()? };
    let syms = unpack_symbols(&bytes, s.w, s.l * per_row * s.n).ok()?;
    let elems: Vec<ExtElem> = syms.chunks(s.n).map(ExtElem::from_coords).collect();
    Some(if per_row == 0 { vec![Vec::new(); s.l] } else { elems.chunks(per_row).map(|c| c.to_vec()).collect() })
}

fn write_vectors(codec: &Codec, id: &str, count: usize, rng: &mut ChaCha8Rng) -> String {
    let s = *codec.spec();
    let mut out = format!("{VECTOR_HEADER}\nspec {id}\nl {}\n", s.l);
    for _ in 0..count {
        let msg = random_message(codec, rng);
        let y = codec.encode_message(&msg.0, &msg.1).expect("valid message");
        out += &format!(
            "vector {} {} {}\n",
            elems_hex(codec, &msg.0),
            elems_hex(codec, &msg.1),
            hex::encode(serialize(&y, s.n, s.w))
        );
    }
    out
}

/// Check every vector line; returns the number of bad vectors, or an error
/// for a malformed header.
fn verify_vectors(codec: &Codec, id: &str, text: &str, timer: &mut Timer) -> Result<(usize, usize), String> {
    let s = *codec.spec();
    let mut lines = text.lines();
    if lines.next() != Some(VECTOR_HEADER) {
        return Err("missing vector header".into());
    }
    if lines.next() != Some(&format!("spec {id}")) || lines.next() != Some(&format!("l {}", s.l)) {
        return Err(format!("vector file is not for {id} with l={}", s.l));
    }
    let (mut total, mut bad) = (0, 0);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        total += 1;
        let f: Vec<&str> = line.split_whitespace().collect();
        let ok = f.len() == 4 && f[0] == "vector" && {
            match (hex_elems(codec, f[1], s.k0), hex_elems(codec, f[2], s.mu0), hex::decode(f[3]).ok()) {
                (Some(u), Some(r), Some(word)) => {
                    let reenc = codec.encode_message(&u, &r).map(|y| serialize(&y, s.n, s.w));
                    let y = deserialize(&word, s.l, s.n0, s.n, s.w);
                    reenc.is_ok_and(|b| b == word) && y.is_ok_and(|y| decode_ok(codec, &y, &[], &(u, r), timer))
                }
                _ => false,
            }
        };
        if !ok {
            bad += 1;
        }
    }
    Ok((total, bad))
}

pub fn run(cli: &Cli, args: &Args, m: &mut RunManifest) -> anyhow::Result<()> {
    let (_, mut spec) = registry::lookup(&args.spec).map_err(|e| exit_err(EXIT_CONFIG, e.to_string()))?;
    if let Some(l) = args.l {
        spec.l = l;
    }
    let codec = Codec::new(spec).map_err(|e| exit_err(EXIT_CONFIG, e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut timer = Timer::default();
    let (count, failures, beyond) = match args.mode {
        Mode::Roundtrip => (args.count, roundtrip(&codec, args.count, &mut rng, &mut timer), None),
        Mode::Fuzz => {
            let (f, b) = fuzz(&codec, args.count, &mut rng, &mut timer);
            (args.count, f, Some(b))
        }
        Mode::Vectors => {
            let text = match &args.verify {
                Some(p) => std::fs::read_to_string(p)
                    .map_err(|e| exit_err(EXIT_CONFIG, format!("reading {}: {e}", p.display())))?,
                None => {
                    let t = write_vectors(&codec, &args.spec, args.count, &mut rng);
                    m.write(&cli.out, "vectors.txt", &t)?;
                    t
                }
            };
            let (total, bad) =
                verify_vectors(&codec, &args.spec, &text, &mut timer).map_err(|e| exit_err(EXIT_INVARIANT, e))?;
            (total, bad, None)
        }
    };
    let silent = beyond.as_ref().map_or(0, |b| b.silent);
    let report =
        Report { spec_id: args.spec.clone(), spec, mode: args.mode, count, failures, beyond_capability: beyond };
    m.write(&cli.out, "codec_report.json", serde_json::to_string_pretty(&report)? + "\n")?;
    m.timing.insert("decodes".into(), timer.n.into());
    m.timing.insert("mean_decode_us".into(), timer.mean_us().into());
    println!(
        "{} {:?}: {count} cases, {failures} failures, {silent} silent beyond-capability errors, mean decode {:.1} us",
        args.spec,
        args.mode,
        timer.mean_us()
    );
    if failures > 0 || silent > 0 {
        return Err(exit_err(EXIT_INVARIANT, format!("{failures} failures, {silent} silent errors")));
    }
    Ok(())
}
