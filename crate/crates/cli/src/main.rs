//! Command-line front end: generate schemes, verify their invariants,
//! detect single observations, run Monte Carlo simulations, and evaluate
//! bounds.
//!
//! Exit codes: 0 on success (all checks passed), 1 on usage or domain
//! errors, 2 when an exhaustive verification exceeds its budget
//! ("unverified at this scale").

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasedet::bounds;
use phasedet::channels::{mod2_mac, push_to_talk, transmit_dmc, Dmc, Mac};
use phasedet::codes::{parse_code_spec, pentagon_code};
use phasedet::gf2::Gf2Poly;
use phasedet::mac::{
    build_mod2_two_primitives, build_rate_splitting, verify_unique_sum_decomposition,
    MacDetection, MacDetectorConfig, MacScheme, MacSchemeFile, SplitLayerParams, SplitSpec,
    SymbolMap,
};
use phasedet::p2p::{
    build_adversarial, build_concat, build_zero_error, scheme_min_distance,
    sync_never_confusable, verify_zero_error_exhaustive, ConcatParams, DetectorConfig, InnerKind,
    Scheme, SchemeFile, ZeroErrorParams,
};
use phasedet::seqgen::{debruijn_generate, Construction};
use phasedet::{DetectionResult, Error};

mod seeding;

#[derive(Parser)]
#[command(name = "phasedet", version, about = "Phase detection sequence toolkit")]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file (scheme JSON for `gen`, report for `simulate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format for `simulate`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scheme and write it as JSON.
    Gen {
        #[command(subcommand)]
        construction: GenCommand,
    },
    /// Run the exhaustive invariant checks a scheme supports.
    Verify {
        /// Scheme JSON file.
        scheme: PathBuf,
    },
    /// Run a scheme's detector on one observation.
    Detect {
        /// Scheme JSON file.
        scheme: PathBuf,
        /// Observation: one symbol per character for binary alphabets, or
        /// comma-separated integers.
        obs: String,
    },
    /// Monte Carlo error-rate estimation over a channel.
    Simulate {
        /// Scheme JSON file.
        scheme: PathBuf,
        /// Channel spec: "bsc:P", "dmc:FILE", "mod2", "ptt", or "stored"
        /// (the channel embedded in a rate-splitting scheme).
        channel: String,
        /// Number of independent trials.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Evaluate bounds and capacity quantities as CSV tables.
    Bounds {
        #[command(subcommand)]
        bound: BoundCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Maximal-length LFSR scheme with the minimum-distance detector.
    Lfsr {
        /// Polynomial: exponent list "0,1,2,4,5" or ascending bits "111011".
        #[arg(long)]
        poly: String,
        /// Window length.
        #[arg(long)]
        k: usize,
    },
    /// de Bruijn scheme (window length defaults to the order).
    Debruijn {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Concatenated construction for probabilistic noise.
    Concat {
        /// Block code spec: "rep:5", "hamming74", "identity:2".
        #[arg(long)]
        code: String,
        /// Code blocks per sync period.
        #[arg(long)]
        l: usize,
        /// Sync chunk length (the sync word is three chunks).
        #[arg(long)]
        tau: usize,
    },
    /// Zero-error construction over the pentagon typewriter channel.
    ZeroError {
        /// Zero-error code: only "pentagon" is built in.
        #[arg(long, default_value = "pentagon")]
        code: String,
        /// de Bruijn order over the codeword alphabet.
        #[arg(long)]
        r: usize,
    },
    /// Mod-2 adder scheme from two distinct primitive polynomials.
    MacMod2 {
        #[arg(long)]
        poly1: String,
        #[arg(long)]
        poly2: String,
        #[arg(long)]
        k: usize,
    },
    /// Rate-splitting scheme from a built-in preset.
    MacSplit {
        /// "mod2-u" (single coded layer over the adder) or "parallel"
        /// (three coded layers over a lossless two-output channel).
        #[arg(long)]
        preset: String,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Achievable rate 1 - h(2p) for adversarial flips.
    Gv {
        #[arg(long)]
        p: f64,
    },
    /// Largest length with a guaranteed distance-d scheme at window k.
    Lll {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    /// Smallest window length passing the weight-c feasibility test.
    Thm4 {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        c: usize,
        #[arg(long, default_value_t = 80)]
        k_max: usize,
    },
    /// Weight-3 linear-scheme condition at (p, R), grid search over mu.
    Newub {
        #[arg(long)]
        p: f64,
        #[arg(long = "R")]
        rate: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Channel capacity by alternating maximization.
    Capacity {
        /// "bsc:P" or "dmc:FILE".
        channel: String,
    },
    /// Membership of a rate pair in the two-user region (product pmfs).
    MacRegion {
        /// "mod2" or "ptt".
        channel: String,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes early (e.g. `phasedet bounds ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version output is not an error
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e.downcast_ref::<Error>() {
                Some(Error::Resource(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen { construction } => cmd_gen(construction, cli.seed, cli.out),
        Command::Verify { scheme } => cmd_verify(&scheme),
        Command::Detect { scheme, obs } => cmd_detect(&scheme, &obs),
        Command::Simulate {
            scheme,
            channel,
            trials,
        } => cmd_simulate(&scheme, &channel, trials, cli.seed, cli.format, cli.out),
        Command::Bounds { bound } => cmd_bounds(bound),
    }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

enum AnyScheme {
    P2p(Scheme),
    Mac(MacScheme),
}

fn cmd_gen(gen: GenCommand, seed: u64, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let scheme = match gen {
        GenCommand::Lfsr { poly, k } => {
            let a = Gf2Poly::parse_spec(&poly)?;
            AnyScheme::P2p(build_adversarial(&a, k)?)
        }
        GenCommand::Debruijn { order, alphabet, k } => {
            let (seq, _) = debruijn_generate(alphabet, order)?;
            let k = k.unwrap_or(order);
            AnyScheme::P2p(Scheme::with_min_distance_detector(seq, k)?)
        }
        GenCommand::Concat { code, l, tau } => {
            let code = parse_code_spec(&code)?;
            AnyScheme::P2p(build_concat(ConcatParams::new(code, l, tau), seed)?)
        }
        GenCommand::ZeroError { code, r } => {
            if code != "pentagon" {
                anyhow::bail!("unknown zero-error code '{code}'");
            }
            AnyScheme::P2p(build_zero_error(ZeroErrorParams {
                code: pentagon_code(),
                beta: 0,
                gamma: 2,
                debruijn_order: r,
                channel: Dmc::cyclic_typewriter(5)?,
            })?)
        }
        GenCommand::MacMod2 { poly1, poly2, k } => {
            let a1 = Gf2Poly::parse_spec(&poly1)?;
            let a2 = Gf2Poly::parse_spec(&poly2)?;
            AnyScheme::Mac(build_mod2_two_primitives(&a1, &a2, k)?)
        }
        GenCommand::MacSplit { preset } => AnyScheme::Mac(split_preset(&preset, seed)?),
    };
    let path = out.unwrap_or_else(|| PathBuf::from("scheme.json"));
    match &scheme {
        AnyScheme::P2p(s) => {
            s.save(&path)?;
            println!("n={} k={} rate={:.6}", s.n(), s.k(), s.rate());
        }
        AnyScheme::Mac(s) => {
            s.save(&path)?;
            println!(
                "n1={} n2={} k={} rate1={:.6} rate2={:.6}",
                s.n1(),
                s.n2(),
                s.k(),
                s.rate1(),
                s.rate2()
            );
        }
    }
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn split_preset(preset: &str, seed: u64) -> anyhow::Result<MacScheme> {
    match preset {
        "mod2-u" => {
            let split = SplitSpec {
                mac: mod2_mac(),
                pu: vec![0.5, 0.5],
                pv: vec![1.0],
                px2: vec![1.0, 0.0],
                map: SymbolMap::new(vec![vec![0], vec![1]], 2)?,
            };
            let u = SplitLayerParams {
                code: parse_code_spec("identity:1")?,
                blocks_per_sync: 2,
                sync_chunk: 1,
                inner: InnerKind::DeBruijn { order: 2 },
            };
            Ok(build_rate_splitting(split, Some(u), None, None, seed)?)
        }
        "parallel" => {
            let mut tensor = vec![vec![vec![0.0; 8]; 2]; 4];
            for x1 in 0..4usize {
                for x2 in 0..2usize {
                    tensor[x1][x2][2 * x1 + x2] = 1.0;
                }
            }
            let split = SplitSpec {
                mac: Mac::new(tensor)?,
                pu: vec![0.5, 0.5],
                pv: vec![0.5, 0.5],
                px2: vec![0.5, 0.5],
                map: SymbolMap::new(vec![vec![0, 1], vec![2, 3]], 4)?,
            };
            let u = SplitLayerParams {
                code: parse_code_spec("identity:1")?,
                blocks_per_sync: 2,
                sync_chunk: 1,
                inner: InnerKind::DeBruijn { order: 2 },
            };
            let x2 = SplitLayerParams {
                code: parse_code_spec("identity:1")?,
                blocks_per_sync: 4,
                sync_chunk: 1,
                inner: InnerKind::DeBruijn { order: 4 },
            };
            let v = SplitLayerParams {
                code: parse_code_spec("identity:1")?,
                blocks_per_sync: 5,
                sync_chunk: 1,
                inner: InnerKind::MSeq(Gf2Poly::parse_spec("11001")?),
            };
            Ok(build_rate_splitting(split, Some(u), Some(x2), Some(v), seed)?)
        }
        other => anyhow::bail!("unknown mac-split preset '{other}'"),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

const VERIFY_ROUNDTRIP_BUDGET: usize = 1 << 20;
const VERIFY_DISTANCE_BUDGET: usize = 8192;
const VERIFY_ZERO_ERROR_BUDGET: u64 = 1 << 22;
const VERIFY_PAIR_BUDGET: usize = 1 << 20;

fn load_any(path: &PathBuf) -> anyhow::Result<AnyScheme> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(file) = serde_json::from_str::<SchemeFile>(&text) {
        return Ok(AnyScheme::P2p(file.into_scheme()?));
    }
    let file: MacSchemeFile = serde_json::from_str(&text)?;
    Ok(AnyScheme::Mac(file.into_scheme()?))
}

fn cmd_verify(path: &PathBuf) -> anyhow::Result<ExitCode> {
    let mut all_pass = true;
    match load_any(path)? {
        AnyScheme::P2p(s) => {
            if s.n() > VERIFY_ROUNDTRIP_BUDGET {
                println!("unverified at this scale: n={} exceeds budget", s.n());
                return Ok(ExitCode::from(2));
            }
            if let Some(pass) = phasedet::p2p::verify_construction(&s)? {
                all_pass &= pass;
                println!("construction_consistent {}", verdict(pass));
            }
            match s.detector() {
                DetectorConfig::MinDistance => {
                    if s.n() > VERIFY_DISTANCE_BUDGET {
                        println!("unverified at this scale: n={} exceeds distance budget", s.n());
                        return Ok(ExitCode::from(2));
                    }
                    let d = scheme_min_distance(&s)?;
                    let pass = d >= 1;
                    all_pass &= pass;
                    println!("min_distance={d} {}", verdict(pass));
                    if let Construction::DeBruijn { order, .. } = s.sequence().construction() {
                        let pass = debruijn_property(&s, *order);
                        all_pass &= pass;
                        println!("debruijn_property {}", verdict(pass));
                    }
                }
                DetectorConfig::Concat(_) => {}
                DetectorConfig::ZeroError(det) => {
                    let channel = support_channel(det.to_support_rows());
                    let pass = sync_never_confusable(&s, &channel)?;
                    all_pass &= pass;
                    println!("sync_never_confusable {}", verdict(pass));
                    match verify_zero_error_exhaustive(&s, &channel, VERIFY_ZERO_ERROR_BUDGET) {
                        Ok(pass) => {
                            all_pass &= pass;
                            println!(
                                "zero_error_exhaustive {}",
                                verdict(pass)
                            );
                        }
                        Err(Error::Resource(msg)) => {
                            println!("unverified at this scale: {msg}");
                            return Ok(ExitCode::from(2));
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            let mut failures = 0usize;
            for m in 1..=s.n() {
                if s.detect(&s.window(m)) != DetectionResult::Phase(m) {
                    failures += 1;
                }
            }
            let pass = failures == 0;
            all_pass &= pass;
            println!(
                "noiseless_roundtrip {} ({}/{})",
                verdict(pass),
                s.n() - failures,
                s.n()
            );
        }
        AnyScheme::Mac(s) => {
            if s.n1().saturating_mul(s.n2()) > VERIFY_PAIR_BUDGET {
                println!(
                    "unverified at this scale: {} pairs exceed budget",
                    s.n1() * s.n2()
                );
                return Ok(ExitCode::from(2));
            }
            {
                let pass = phasedet::mac::verify_construction(&s)?;
                all_pass &= pass;
                println!("construction_consistent {}", verdict(pass));
            }
            match s.detector() {
                MacDetectorConfig::Syndrome(_) => {
                    let unique = match verify_unique_sum_decomposition(&s) {
                        Ok(u) => u,
                        Err(Error::Resource(msg)) => {
                            println!("unverified at this scale: {msg}");
                            return Ok(ExitCode::from(2));
                        }
                        Err(e) => return Err(e.into()),
                    };
                    all_pass &= unique;
                    println!(
                        "unique_sum {} ({}/{})",
                        verdict(unique),
                        if unique { s.n1() * s.n2() } else { 0 },
                        s.n1() * s.n2()
                    );
                    let mut ok = 0usize;
                    for m1 in 1..=s.n1() {
                        let w1 = s.window1(m1);
                        for m2 in 1..=s.n2() {
                            let y: Vec<u16> = w1
                                .iter()
                                .zip(&s.window2(m2))
                                .map(|(&a, &b)| a ^ b)
                                .collect();
                            if s.detect(&y) == MacDetection::Phases(m1, m2) {
                                ok += 1;
                            }
                        }
                    }
                    let pass = ok == s.n1() * s.n2();
                    all_pass &= pass;
                    println!("syndrome_roundtrip {} ({ok}/{})", verdict(pass), s.n1() * s.n2());
                }
                MacDetectorConfig::Successive(det) => {
                    let mac = det.channel();
                    if !mac_is_deterministic(mac) {
                        println!("stochastic channel: noiseless roundtrip not applicable SKIP");
                    } else {
                        let mut rng = seeding::trial_rng(0, 0);
                        let mut ok = 0usize;
                        for m1 in 1..=s.n1() {
                            for m2 in 1..=s.n2() {
                                let y = mac.transmit(&s.window1(m1), &s.window2(m2), &mut rng)?;
                                if s.detect(&y) == MacDetection::Phases(m1, m2) {
                                    ok += 1;
                                }
                            }
                        }
                        let pass = ok == s.n1() * s.n2();
                        all_pass &= pass;
                        println!(
                            "successive_roundtrip {} ({ok}/{})",
                            verdict(pass),
                            s.n1() * s.n2()
                        );
                    }
                }
            }
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn debruijn_property(s: &Scheme, order: usize) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(s.n());
    for m in 1..=s.n() {
        if !seen.insert(s.sequence().window(m, order)) {
            return false;
        }
    }
    seen.len() == s.n()
}

fn support_channel(rows: Vec<Vec<usize>>) -> Dmc {
    // A uniform channel over each input's support set reproduces the
    // support structure the zero-error checks need.
    let ny = rows
        .iter()
        .flat_map(|r| r.iter().copied())
        .max()
        .map_or(1, |m| m + 1);
    let matrix = rows
        .iter()
        .map(|outputs| {
            let mut row = vec![0.0; ny];
            for &y in outputs {
                row[y] = 1.0 / outputs.len() as f64;
            }
            row
        })
        .collect();
    Dmc::new(matrix).expect("support rows form a valid channel")
}

fn mac_is_deterministic(mac: &Mac) -> bool {
    for x1 in 0..mac.x1_size() {
        for x2 in 0..mac.x2_size() {
            for y in 0..mac.y_size() {
                let p = mac.prob(y, x1, x2);
                if p != 0.0 && p != 1.0 {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

fn parse_observation(obs: &str) -> anyhow::Result<Vec<u16>> {
    let obs = obs.trim();
    if obs.contains(',') {
        obs.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u16>()
                    .map_err(|_| anyhow::anyhow!("invalid symbol '{p}'"))
            })
            .collect()
    } else {
        obs.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u16)
                    .ok_or_else(|| anyhow::anyhow!("invalid symbol '{c}'"))
            })
            .collect()
    }
}

fn cmd_detect(path: &PathBuf, obs: &str) -> anyhow::Result<ExitCode> {
    let y = parse_observation(obs)?;
    match load_any(path)? {
        AnyScheme::P2p(s) => match s.detect(&y) {
            DetectionResult::Phase(m) => println!("phase,{m}"),
            DetectionResult::Error => println!("phase,e"),
        },
        AnyScheme::Mac(s) => match s.detect(&y) {
            MacDetection::Phases(m1, m2) => println!("phases,{m1},{m2}"),
            MacDetection::Error => println!("phases,e"),
        },
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimReport {
    scheme: String,
    channel: String,
    trials: u64,
    errors: u64,
    error_rate: f64,
    ci95_half_width: f64,
    seed: u64,
    wall_clock_secs: f64,
}

impl SimReport {
    fn csv_header() -> &'static str {
        "scheme,channel,trials,errors,error_rate,ci95_half_width,seed,wall_clock_secs"
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.scheme,
            self.channel,
            self.trials,
            self.errors,
            self.error_rate,
            self.ci95_half_width,
            self.seed,
            self.wall_clock_secs
        )
    }
}

enum ChannelSpec {
    Point(Dmc),
    Multi(Mac),
    Stored,
}

fn parse_channel(spec: &str) -> anyhow::Result<ChannelSpec> {
    if let Some(p) = spec.strip_prefix("bsc:") {
        let p: f64 = p.parse().map_err(|_| anyhow::anyhow!("invalid bsc probability"))?;
        return Ok(ChannelSpec::Point(Dmc::bsc(p)?));
    }
    if let Some(path) = spec.strip_prefix("dmc:") {
        let text = std::fs::read_to_string(path)?;
        let matrix: Vec<Vec<f64>> = serde_json::from_str(&text)?;
        return Ok(ChannelSpec::Point(Dmc::new(matrix)?));
    }
    match spec {
        "mod2" => Ok(ChannelSpec::Multi(mod2_mac())),
        "ptt" => Ok(ChannelSpec::Multi(push_to_talk())),
        "stored" => Ok(ChannelSpec::Stored),
        other => anyhow::bail!("unknown channel spec '{other}'"),
    }
}

fn cmd_simulate(
    path: &PathBuf,
    channel: &str,
    trials: u64,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let spec = parse_channel(channel)?;
    let start = Instant::now();
    let errors = match (load_any(path)?, spec) {
        (AnyScheme::P2p(s), ChannelSpec::Point(ch)) => {
            if ch.input_size() != s.sequence().alphabet_size() {
                anyhow::bail!(
                    "channel input alphabet {} does not match scheme alphabet {}",
                    ch.input_size(),
                    s.sequence().alphabet_size()
                );
            }
            let mut errors = 0u64;
            for trial in 0..trials {
                let mut rng = seeding::trial_rng(seed, trial);
                let m = seeding::uniform_phase(&mut rng, s.n());
                let y = transmit_dmc(&ch, &s.window(m), &mut rng)?;
                if s.detect(&y) != DetectionResult::Phase(m) {
                    errors += 1;
                }
            }
            errors
        }
        (AnyScheme::Mac(s), spec) => {
            let mac = match spec {
                ChannelSpec::Multi(mac) => mac,
                ChannelSpec::Stored => match s.detector() {
                    MacDetectorConfig::Successive(det) => det.channel().clone(),
                    _ => anyhow::bail!("'stored' requires a rate-splitting scheme"),
                },
                ChannelSpec::Point(_) => {
                    anyhow::bail!("two-user scheme needs a two-user channel (mod2, ptt, stored)")
                }
            };
            let mut errors = 0u64;
            for trial in 0..trials {
                let mut rng = seeding::trial_rng(seed, trial);
                let m1 = seeding::uniform_phase(&mut rng, s.n1());
                let m2 = seeding::uniform_phase(&mut rng, s.n2());
                let y = mac.transmit(&s.window1(m1), &s.window2(m2), &mut rng)?;
                if s.detect(&y) != MacDetection::Phases(m1, m2) {
                    errors += 1;
                }
            }
            errors
        }
        (AnyScheme::P2p(_), _) => {
            anyhow::bail!("point-to-point scheme needs a point-to-point channel (bsc, dmc)")
        }
    };
    let rate = errors as f64 / trials as f64;
    let half_width = 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt();
    let report = SimReport {
        scheme: path.display().to_string(),
        channel: channel.to_string(),
        trials,
        errors,
        error_rate: rate,
        ci95_half_width: half_width,
        seed,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => format!("{}\n{}", SimReport::csv_header(), report.csv_line()),
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn cmd_bounds(bound: BoundCommand) -> anyhow::Result<ExitCode> {
    println!("param,value");
    match bound {
        BoundCommand::Gv { p } => {
            let r = bounds::gv_rate(p)?;
            println!("rate,{}", r.rate);
            println!("clamped,{}", r.clamped);
        }
        BoundCommand::Lll { k, d } => {
            println!("n_max,{}", bounds::lll_max_n(k, d)?);
        }
        BoundCommand::Thm4 { r, t, c, k_max } => match bounds::thm4_min_k(r, t, c, k_max)? {
            Some(min_k) => println!("min_k,{min_k}"),
            None => println!("min_k,none<= {k_max}"),
        },
        BoundCommand::Newub { p, rate, step } => {
            let violations = bounds::newub_violations(p, rate, step)?;
            println!("violated,{}", !violations.is_empty());
            if let Some(best) = bounds::newub_grid_search(p, rate, step)? {
                println!("mu_max_margin,{best}");
            }
            if let (Some(first), Some(last)) = (violations.first(), violations.last()) {
                println!("mu_first,{first}");
                println!("mu_last,{last}");
            }
        }
        BoundCommand::Capacity { channel } => {
            let ch = match parse_channel(&channel)? {
                ChannelSpec::Point(ch) => ch,
                _ => anyhow::bail!("capacity needs a point-to-point channel"),
            };
            let cap = bounds::dmc_capacity(&ch);
            println!("capacity,{}", cap.capacity);
            println!("iterations,{}", cap.iterations);
        }
        BoundCommand::MacRegion {
            channel,
            r1,
            r2,
            grid,
        } => {
            let mac = match parse_channel(&channel)? {
                ChannelSpec::Multi(mac) => mac,
                _ => anyhow::bail!("mac-region needs a two-user channel"),
            };
            let pt = bounds::RegionPoint::new(r1, r2)?;
            println!(
                "contained,{}",
                bounds::mac_ve_region_contains_any(&mac, pt, grid)?
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
