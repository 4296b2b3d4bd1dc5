//! Command-line front end. Every subcommand reads JSON problem files and
//! writes a JSON report to `--out` (or stdout).
//!
//! Exit codes: 0 computed and every asserted conclusion holds, 1 a
//! hypothesis gate failed, 2 a conclusion failed under certified
//! hypotheses, 3 input or usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{GapError, Result};
use crate::family::{walk_family, TraceKind};
use crate::gap::{gap_report, GapOptions};
use crate::generate::{generate, Kind};
use crate::io::{load_form, read_json, to_json, FormFile, OperatorFile, PathFile, SpaceFile, Workspace};
use crate::morse::{c_gap, morse_indices, verify_morse_stability, MorseProblem, MorseVariant};
use crate::reldim::{
    normalize_perturbation, relative_dim, synthesize_perturbation, verify_reldim_stability, PerturbationOperator,
    RelVariant,
};
use crate::splitting::split;
use crate::tetrad::{verify_tetrad_stability, Variant};
use crate::verdict::StabilityVerdict;

pub const SEED_ENV: &str = "GAPS_SEED";

#[derive(Parser, Debug)]
#[command(name = "subgap", version, about = "Certified gap, index and Morse-index computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every sampled quantity; GAPS_SEED overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per extremal problem.
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    /// Local refinement steps per search.
    #[arg(long)]
    refine_steps: Option<usize>,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Gaps and minimum gaps between two subspaces.
    Gap {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[command(flatten)]
        common: Common,
    },
    /// Tetrad index or stability certificate.
    Tetrad {
        #[command(subcommand)]
        action: TetradCmd,
    },
    /// Splitting construction for M = L + S near N.
    Split {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        l: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 0.3)]
        a: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Relative dimension [M-N], optionally with a stability certificate.
    Reldim {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        /// Operator file for K; a partial isometry is synthesized when absent.
        #[arg(long)]
        k: Option<PathBuf>,
        /// Certificate variant: 1.4c(m), 1.4d or 1.4e.
        #[arg(long)]
        verify: Option<String>,
        #[arg(long)]
        mprime: Option<String>,
        #[arg(long)]
        nprime: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetric forms: indices, c-gap, perturbation certificates.
    Morse {
        #[command(subcommand)]
        action: MorseCmd,
    },
    /// Index trace along a one-parameter family.
    Family {
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value = "tetrad-index")]
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded random instance with a ground-truth manifest.
    Generate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the instance files; the whole instance goes to
        /// stdout as one JSON object when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TetradCmd {
    Index {
        #[arg(long)]
        space: PathBuf,
        /// Names Y1,M,N,Y2.
        #[arg(long)]
        tetrad: String,
        #[command(flatten)]
        common: Common,
    },
    Verify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        tetrad: String,
        #[arg(long)]
        perturbed: String,
        #[arg(long, default_value = "1.2c")]
        variant: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct FormArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    q: PathBuf,
}

#[derive(Subcommand, Debug)]
enum MorseCmd {
    Indices {
        #[command(flatten)]
        forms: FormArgs,
        #[command(flatten)]
        common: Common,
    },
    Cgap {
        #[command(flatten)]
        forms: FormArgs,
        #[arg(long)]
        r: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[command(flatten)]
        common: Common,
    },
    Certify {
        #[command(flatten)]
        forms: FormArgs,
        #[arg(long)]
        r: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, default_value = "thm1.6")]
        variant: String,
        /// Subspace name for alpha; synthesized from the spectrum when absent.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        v0: Option<String>,
        #[arg(long)]
        w0: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Output of one command.
struct Outcome {
    json: String,
    code: i32,
}

fn outcome<T: Serialize>(v: &T, code: i32) -> Result<Outcome> {
    Ok(Outcome { json: to_json(v)?, code })
}

fn verdict(v: &StabilityVerdict) -> Result<Outcome> {
    outcome(v, v.exit_code())
}

fn options(c: &Common, env_seed: Option<&str>) -> Result<GapOptions> {
    let seed = match env_seed {
        Some(s) => s.trim().parse().map_err(|_| GapError::Input(format!("{SEED_ENV}='{s}' is not a u64")))?,
        None => c.seed,
    };
    let mut o = GapOptions::default().with_seed(seed).with_budget(c.budget);
    if let Some(r) = c.refine_steps {
        o.refine_steps = r;
    }
    Ok(o)
}

fn load(path: &Path) -> Result<(SpaceFile, Workspace)> {
    let f: SpaceFile = read_json(path)?;
    let ws = Workspace::from_file(&f)?;
    Ok((f, ws))
}

fn run_cmd(cmd: Cmd, env_seed: Option<&str>) -> Result<(Outcome, Option<PathBuf>)> {
    Ok(match cmd {
        Cmd::Gap { space, m, n, common } => {
            let o = options(&common, env_seed)?;
            let (_, ws) = load(&space)?;
            (outcome(&gap_report(&ws.get(&m)?, &ws.get(&n)?, &o)?, 0)?, common.out)
        }
        Cmd::Tetrad { action: TetradCmd::Index { space, tetrad, common } } => {
            let (_, ws) = load(&space)?;
            (outcome(&ws.tetrad(&tetrad)?.summary(), 0)?, common.out)
        }
        Cmd::Tetrad { action: TetradCmd::Verify { space, tetrad, perturbed, variant, common } } => {
            let o = options(&common, env_seed)?;
            let (_, ws) = load(&space)?;
            let variant: Variant = variant.parse()?;
            let v = verify_tetrad_stability(&ws.tetrad(&tetrad)?, &ws.tetrad(&perturbed)?, variant, &o)?;
            (verdict(&v)?, common.out)
        }
        Cmd::Split { space, l, s, n, a, common } => {
            let o = options(&common, env_seed)?;
            let (_, ws) = load(&space)?;
            let r = split(&ws.get(&l)?, &ws.get(&s)?, &ws.get(&n)?, a, &o)?;
            let code = if r.contradiction() {
                2
            } else if r.checks.iter().any(|c| !c.hypothesis_ok) {
                1
            } else {
                0
            };
            (outcome(&r.report(), code)?, common.out)
        }
        Cmd::Reldim { space, m, n, k, verify, mprime, nprime, common } => {
            let o = options(&common, env_seed)?;
            let (_, ws) = load(&space)?;
            let (m, n) = (ws.get(&m)?, ws.get(&n)?);
            let kop = match k {
                Some(p) => {
                    let f: OperatorFile = read_json(&p)?;
                    PerturbationOperator::new(&ws.space, ws.operator(f.rows())?)?
                }
                None => synthesize_perturbation(&m, &n)?,
            };
            let report = relative_dim(&m, &n, &kop)?;
            match verify {
                None => (outcome(&report, 0)?, common.out),
                Some(v) => {
                    let variant: RelVariant = v.parse()?;
                    let need = |x: Option<String>, flag: &str| {
                        x.ok_or_else(|| GapError::Input(format!("--verify needs --{flag}")))
                    };
                    let mp = ws.get(&need(mprime, "mprime")?)?;
                    let np = ws.get(&need(nprime, "nprime")?)?;
                    let norm = normalize_perturbation(&m, &n, &kop)?;
                    let vd = verify_reldim_stability(&m, &n, &mp, &np, &norm.k1, None, variant, &o)?;
                    #[derive(Serialize)]
                    struct Both<'a> {
                        relative_dim: &'a crate::reldim::RelDimReport,
                        verdict: &'a StabilityVerdict,
                    }
                    (outcome(&Both { relative_dim: &report, verdict: &vd }, vd.exit_code())?, common.out)
                }
            }
        }
        Cmd::Morse { action } => run_morse(action, env_seed)?,
        Cmd::Family { path, kind, common } => {
            let kind: TraceKind = kind.parse()?;
            let p: PathFile = read_json(&path)?;
            let (plan, base) = p.resolve()?;
            let tr = walk_family(&plan, &base, kind)?;
            let code = if !tr.constant {
                2
            } else if !tr.continuity.passes {
                1
            } else {
                0
            };
            (outcome(&tr, code)?, common.out)
        }
        Cmd::Generate { kind, size, seed, out_dir } => {
            let seed = match env_seed {
                Some(s) => s.trim().parse().map_err(|_| GapError::Input(format!("{SEED_ENV}='{s}' is not a u64")))?,
                None => seed,
            };
            let kind: Kind = kind.parse()?;
            let inst = generate(kind, seed, size)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let files = inst.files()?;
                    for (name, text) in &files {
                        std::fs::write(dir.join(name), text)?;
                    }
                    let names: Vec<&String> = files.iter().map(|(n, _)| n).collect();
                    (outcome(&serde_json::json!({ "written": names }), 0)?, None)
                }
                None => (outcome(&inst, 0)?, None),
            }
        }
    })
}

fn run_morse(action: MorseCmd, env_seed: Option<&str>) -> Result<(Outcome, Option<PathBuf>)> {
    let forms = |f: &FormArgs| -> Result<(SpaceFile, Workspace, crate::morse::SymmetricPair)> {
        let (sf, ws) = load(&f.space)?;
        let qf: FormFile = read_json(&f.q)?;
        let q = load_form(&ws, &sf, &qf)?;
        Ok((sf, ws, q))
    };
    Ok(match action {
        MorseCmd::Indices { forms: f, common } => {
            let (_, _, q) = forms(&f)?;
            let _ = morse_indices(&q);
            (outcome(&q.summary()?, 0)?, common.out)
        }
        MorseCmd::Cgap { forms: f, r, c, common } => {
            let o = options(&common, env_seed)?;
            let (sf, ws, q) = forms(&f)?;
            let r = load_form(&ws, &sf, &read_json(&r)?)?;
            (outcome(&c_gap(&q, &r, c, &o)?, 0)?, common.out)
        }
        MorseCmd::Certify { forms: f, r, c, h, variant, alpha, v0, w0, common } => {
            let o = options(&common, env_seed)?;
            let (sf, ws, q) = forms(&f)?;
            let r = load_form(&ws, &sf, &read_json(&r)?)?;
            let variant: MorseVariant = variant.parse()?;
            let get = |n: Option<String>| n.map(|n| ws.get(&n)).transpose();
            let p = MorseProblem { q, r, v0: get(v0)?, w0: get(w0)?, h, c, alpha: get(alpha)? };
            (verdict(&verify_morse_stability(&p, variant, &o)?)?, common.out)
        }
    })
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. `env_seed` is the value of `GAPS_SEED`, if set.
pub fn run_with(args: impl IntoIterator<Item = String>, env_seed: Option<&str>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cmd(cli.cmd, env_seed) {
        Ok((out, path)) => {
            let written = match &path {
                Some(p) => std::fs::write(p, &out.json),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.json.as_bytes())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return 3;
            }
            match out.code {
                1 => eprintln!("hypothesis gate failed; no conclusion asserted"),
                2 => eprintln!("conclusion violated under certified hypotheses"),
                _ => {}
            }
            out.code
        }
        Err(GapError::Gate(msg)) => {
            eprintln!("hypothesis gate failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

pub fn run() -> i32 {
    let env = std::env::var(SEED_ENV).ok();
    run_with(std::env::args(), env.as_deref())
}
