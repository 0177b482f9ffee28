//! Command-line front end: inspect covers, compute volume polynomials,
//! verify identities, and generate random test covers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use prym::cover::DoubleCover;
use prym::gen::{self, GenMode};
use prym::homology::{cycle_basis, gram_det_sym};
use prym::json;
use prym::poly::MultiPoly;
use prym::volumes::{self, CheckStatus};
use prym::Error;

#[derive(Parser)]
#[command(name = "prym", about = "Volume polynomials of tropical Jacobians and Prym varieties")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print genera, dilation statistics, and the cover class
    Info { file: PathBuf },
    /// Compute a volume polynomial (or evaluate it at given lengths)
    Volume {
        file: PathBuf,
        /// prym | jac-base | jac-cover
        #[arg(long, default_value = "prym")]
        target: String,
        /// combinatorial | homology | kernel
        #[arg(long, default_value = "combinatorial")]
        method: String,
        /// JSON file mapping edge ids to lengths; evaluates the polynomial
        #[arg(long)]
        eval: Option<PathBuf>,
        /// Emit a JSON volume report instead of the polynomial string
        #[arg(long)]
        json: bool,
    },
    /// List the ogods of a cover with their ranks
    Ogods {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check the paper identities on a cover
    Verify {
        file: PathBuf,
        /// all, or one of: thm-a thm-b main cd free-volume pushpull ogod-classify moves
        #[arg(long, default_value = "all")]
        identity: String,
    },
    /// Generate a random valid cover as JSON on stdout
    Gen {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        /// free | edge-free | general
        #[arg(long, default_value = "general")]
        mode: String,
        #[arg(long, default_value = "0")]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::KernelRouteFree => 3,
        Error::Infeasible(_) => 4,
        Error::Internal(_) | Error::NotDivisible => 1,
        _ => 2,
    }
}

fn load_cover(path: &PathBuf) -> Result<DoubleCover, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let cover = json::parse_cover(&text)?;
    let report = cover.validate();
    if !report.ok() {
        if report.violations.iter().any(|v| v.contains("disconnected")) {
            return Err(Error::TotalDisconnected);
        }
        return Err(Error::InvalidCover(report.violations.join("; ")));
    }
    Ok(cover)
}

fn cmd_info(file: &PathBuf) -> Result<(), Error> {
    let cover = load_cover(file)?;
    let s = cover.dilation_stats();
    let mut line = format!(
        "g_base={} g_total={} h={} m_d={} n_d={} d={}",
        s.g_base, s.g_total, s.h, s.m_d, s.n_d, s.d
    );
    if let Some((a, b, c)) = s.abc {
        line.push_str(&format!(" A={a} B={b} C={c}"));
    }
    line.push_str(&format!(" class={}", s.class.as_str()));
    println!("{line}");
    Ok(())
}

fn compute_volume(cover: &DoubleCover, target: &str, method: &str) -> Result<MultiPoly, Error> {
    match (target, method) {
        ("prym", "combinatorial") => volumes::prym_volume_combinatorial(cover),
        ("prym", "homology") => volumes::prym_volume_homology(cover),
        ("prym", "kernel") => volumes::prym_volume_kernel(cover),
        ("jac-base", "combinatorial") => volumes::jacobian_polynomial(cover.base()),
        ("jac-base", "homology") => {
            Ok(gram_det_sym(cover.base(), &cycle_basis(cover.base())))
        }
        ("jac-cover", "combinatorial") => volumes::jacobian_polynomial(cover.total()),
        ("jac-cover", "homology") => {
            Ok(gram_det_sym(cover.total(), &cycle_basis(cover.total())))
        }
        ("jac-base" | "jac-cover", "kernel") => Err(Error::KernelRouteFree),
        _ => Err(Error::Parse(format!("unknown target/method: {target}/{method}"))),
    }
}

fn cmd_volume(
    file: &PathBuf,
    target: &str,
    method: &str,
    eval: Option<&PathBuf>,
    json_out: bool,
) -> Result<(), Error> {
    let cover = load_cover(file)?;
    let value = compute_volume(&cover, target, method)?;
    if let Some(lengths_path) = eval {
        let text = std::fs::read_to_string(lengths_path)
            .map_err(|e| Error::Parse(format!("{}: {e}", lengths_path.display())))?;
        let lengths = json::parse_lengths(&text)?;
        let v = value.eval(&lengths)?;
        println!("{}", json::render_length(&v));
        return Ok(());
    }
    if json_out {
        let s = cover.dilation_stats();
        let report = serde_json::json!({
            "method": method,
            "target": target,
            "value": json::poly_to_json(&value),
            "stats": {
                "g_base": s.g_base, "g_total": s.g_total, "h": s.h,
                "m_d": s.m_d, "n_d": s.n_d, "d": s.d,
                "class": s.class.as_str(),
            },
        });
        println!("{report}");
    } else {
        println!("{}", value.render());
    }
    Ok(())
}

fn cmd_ogods(file: &PathBuf, json_out: bool) -> Result<(), Error> {
    let cover = load_cover(file)?;
    let ogods = volumes::enumerate_ogods(&cover)?;
    if json_out {
        let list: Vec<serde_json::Value> = ogods
            .iter()
            .map(|o| {
                serde_json::json!({
                    "edges": o.edges.iter().collect::<Vec<_>>(),
                    "rank": o.rank,
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(list));
    } else {
        for o in &ogods {
            println!("{} rank={}", o.edges.iter().collect::<Vec<_>>().join(","), o.rank);
        }
    }
    Ok(())
}

fn cmd_verify(file: &PathBuf, identity: &str) -> Result<bool, Error> {
    let cover = load_cover(file)?;
    let tags: Vec<&str> = if identity == "all" {
        volumes::IDENTITIES.to_vec()
    } else {
        if !volumes::IDENTITIES.contains(&identity) {
            return Err(Error::Parse(format!("unknown identity: {identity}")));
        }
        vec![identity]
    };
    let mut entries = Vec::new();
    let mut all_ok = true;
    for tag in tags {
        let check = volumes::verify_identity(&cover, tag)?;
        if check.status == CheckStatus::Fail {
            all_ok = false;
        }
        entries.push(serde_json::json!({
            "identity": tag,
            "status": check.status.as_str(),
            "detail": check.detail,
        }));
    }
    let report = serde_json::json!({
        "ok": all_ok,
        "identities": entries,
    });
    println!("{report}");
    Ok(all_ok)
}

fn cmd_gen(vertices: usize, edges: usize, mode: &str, seed: u64) -> Result<(), Error> {
    let mode = GenMode::parse(mode)?;
    let (spec, _cover) = gen::generate(vertices, edges, mode, seed)?;
    let file = json::voltage_to_file(&spec);
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Internal(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match &cli.cmd {
        Cmd::Info { file } => cmd_info(file).map(|_| true),
        Cmd::Volume { file, target, method, eval, json } => {
            cmd_volume(file, target, method, eval.as_ref(), *json).map(|_| true)
        }
        Cmd::Ogods { file, json } => cmd_ogods(file, *json).map(|_| true),
        Cmd::Verify { file, identity } => cmd_verify(file, identity),
        Cmd::Gen { vertices, edges, mode, seed } => {
            cmd_gen(*vertices, *edges, mode, *seed).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
