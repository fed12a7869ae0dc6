//! `nullcover` command-line tool.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nullcover::exactnum::Tolerance;
use nullcover::io::{
    experiment_to_json, read_experiment, read_representation, read_space, representation_to_json, space_to_json,
    ReadOptions,
};
use nullcover::ks::{is_ks_witness, SearchOptions, Verdict, DEFAULT_NODE_CAP};
use nullcover::models::{self, build_model};
use nullcover::nogo::{
    check_classical_representation, check_wc, check_weak_representation, dutch_book, find_null_cover, payoffs, reduce,
    NogoError, Outcome,
};
use nullcover::quantum::{find_contexts, DEFAULT_CONTEXT_CAP};
use nullcover::spaces::{check_flavor, AxiomReport, Flavor};

/// Exit status for malformed input, unreadable files and usage errors.
const EXIT_INPUT: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "nullcover",
    version,
    about = "Check hidden-variable representations for finite null covers"
)]
struct Cli {
    /// Comparison tolerance for approximate values.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT.eps())]
    tolerance: f64,
    /// Node cap for the coloring search.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_CAP)]
    cap: u64,
    /// Reject floating-point literals in input files.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a space file against its flavor's axioms.
    CheckSpace {
        path: PathBuf,
        /// Check against this flavor instead of the file's own.
        #[arg(long)]
        flavor: Option<Flavor>,
    },
    /// Check a representation: Born values, orthogonal nulls, WC.
    CheckRepresentation { path: PathBuf },
    /// Decide KS colorability of a ray set (a file, `cabello18` or `peres33`).
    Ks {
        source: String,
        /// Also forbid two orthogonal projectors from both taking 1.
        #[arg(long)]
        exclusive: bool,
    },
    /// Run the reduction on a representation.
    Nogo { path: PathBuf },
    /// Search a space for a finite null cover.
    NullCover { path: PathBuf },
    /// Build the Dutch book from a space's minimal null cover.
    DutchBook { path: PathBuf },
    /// Replay the consistency argument of a bundled model (`epr` or `ghz`). Exits 0 once the
    /// replay has run; the verdicts are in the transcript.
    Demo { id: String },
    /// Write a bundled model in the file formats.
    ExportModel {
        /// `epr`, `ghz`, `ghz-wired`, `cabello18` or `peres33`.
        id: String,
        /// Output directory; single-file models go to stdout without it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Config {
    tol: Tolerance,
    node_cap: u64,
    read: ReadOptions,
}

/// What a command produced: an exit code, human text and a machine report.
struct Done {
    code: u8,
    human: String,
    machine: Value,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Human => print!("{}", out.human),
                Format::Machine => {
                    let mut v = out.machine;
                    v["exit_code"] = json!(out.code);
                    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            match format {
                Format::Human => eprintln!("error: {e:#}"),
                Format::Machine => println!("{}", json!({ "error": format!("{e:#}"), "exit_code": EXIT_INPUT })),
            }
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<Done> {
    let tol = Tolerance::new(cli.tolerance).context("--tolerance must be a positive finite number")?;
    if cli.cap == 0 {
        bail!("--cap must be positive");
    }
    let cfg = Config {
        tol,
        node_cap: cli.cap,
        read: ReadOptions {
            exact_only: cli.exact,
            tolerance: tol,
        },
    };
    match cli.command {
        Command::CheckSpace { path, flavor } => check_space(&cfg, &path, flavor),
        Command::CheckRepresentation { path } => check_representation(&cfg, &path),
        Command::Ks { source, exclusive } => ks(&cfg, &source, exclusive),
        Command::Nogo { path } => nogo(&cfg, &path),
        Command::NullCover { path } => null_cover(&cfg, &path, false),
        Command::DutchBook { path } => null_cover(&cfg, &path, true),
        Command::Demo { id } => demo(&cfg, &id),
        Command::ExportModel { id, out } => export(&id, out.as_deref()),
    }
}

fn check_space(cfg: &Config, path: &Path, flavor: Option<Flavor>) -> Result<Done> {
    let mut space = read_space(path, cfg.read)?;
    if let Some(f) = flavor {
        space = space.with_flavor(f);
    }
    let report = check_flavor(&space, cfg.tol);
    Ok(Done {
        code: u8::from(!report.passed()),
        human: render::report(&report, &space),
        machine: json!({ "command": "check-space", "flavor": space.flavor(), "report": report }),
    })
}

fn check_representation(cfg: &Config, path: &Path) -> Result<Done> {
    let rep = read_representation(path, cfg.read)?;
    let structure = find_contexts(rep.experiment(), cfg.tol, DEFAULT_CONTEXT_CAP)?;
    let mut reports = vec![
        check_weak_representation(&rep, cfg.tol)?,
        check_wc(&rep, &structure, cfg.tol)?,
    ];
    if rep.space().flavor() == Flavor::Classical {
        reports.push(check_classical_representation(&rep, cfg.tol)?);
    }
    let passed = reports.iter().all(AxiomReport::passed);
    Ok(Done {
        code: u8::from(!passed),
        human: reports.iter().map(|r| render::report(r, rep.space())).collect(),
        machine: json!({ "command": "check-representation", "reports": reports }),
    })
}

fn ks(cfg: &Config, source: &str, exclusive: bool) -> Result<Done> {
    let path = Path::new(source);
    let exp = if path.exists() {
        read_experiment(path, cfg.read)?
    } else {
        models::load_ks_rayset(source).with_context(|| format!("`{source}` is neither a file nor a bundled ray set"))?
    };
    let options = SearchOptions {
        node_cap: cfg.node_cap,
        exclusive,
    };
    let cert = is_ks_witness(&exp, cfg.tol, DEFAULT_CONTEXT_CAP, options)?;
    let code = match cert.verdict {
        Verdict::Colorable(_) | Verdict::NotKsCandidate => 0,
        Verdict::Noncolorable => 2,
        Verdict::Undecided => 3,
    };
    Ok(Done {
        code,
        human: render::certificate(&cert),
        machine: json!({ "command": "ks", "certificate": cert }),
    })
}

fn nogo(cfg: &Config, path: &Path) -> Result<Done> {
    let rep = read_representation(path, cfg.read)?;
    match reduce(&rep, cfg.tol, DEFAULT_CONTEXT_CAP) {
        Ok(report) => {
            let code = match report.outcome {
                Outcome::Coloring { .. } => 0,
                Outcome::NullCover { .. } => 2,
                Outcome::Violation { .. } => 1,
            };
            Ok(Done {
                code,
                human: render::nogo(&report, rep.space()),
                machine: json!({ "command": "nogo", "report": report }),
            })
        }
        Err(NogoError::Precondition { stage, report }) => Ok(Done {
            code: 1,
            human: format!("precondition failed: {stage}\n{}", render::report(&report, rep.space())),
            machine: json!({ "command": "nogo", "precondition": stage, "report": report }),
        }),
        Err(e) => Err(e.into()),
    }
}

fn null_cover(cfg: &Config, path: &Path, with_book: bool) -> Result<Done> {
    let space = read_space(path, cfg.read)?;
    let command = if with_book { "dutch-book" } else { "null-cover" };
    let Some(cover) = find_null_cover(&space, cfg.tol) else {
        return Ok(Done {
            code: 0,
            human: "no finite null cover\n".into(),
            machine: json!({ "command": command, "cover": null }),
        });
    };
    let mut human = render::cover(&cover, &space);
    let mut machine = json!({ "command": command, "cover": cover });
    if with_book {
        let book = dutch_book(&cover, &space, cfg.tol)?;
        let pay = payoffs(&book, &space)?;
        human.push_str(&render::book(&book, &pay, &space));
        machine["book"] = json!(book);
        machine["payoffs"] = json!(pay);
    }
    Ok(Done {
        code: 2,
        human,
        machine,
    })
}

fn demo(cfg: &Config, id: &str) -> Result<Done> {
    let (model, consistency) = match id {
        "epr" => (models::build_epr_model(), models::verify_epr_consistency()),
        "ghz" => (models::build_ghz_model(), models::verify_ghz_consistency()),
        _ => bail!("unknown demo `{id}` (expected `epr` or `ghz`)"),
    };
    let space = &model.space;
    let flavor = check_flavor(space, cfg.tol);
    let cover = find_null_cover(space, cfg.tol);
    let book = cover.as_ref().map(|c| dutch_book(c, space, cfg.tol)).transpose()?;
    let pay = book.as_ref().map(|b| payoffs(b, space)).transpose()?;

    let mut human = format!(
        "{}\n{} points, {} assigned events, flavor {}\n\n",
        model.note,
        space.sample_size(),
        space.assigned_count(),
        space.flavor()
    );
    human.push_str(&render::report(&flavor, space));
    human.push_str("\nconsistency replay\n");
    for note in &consistency.notes {
        human.push_str(&format!("  {note}\n"));
    }
    human.push_str(&render::report(&consistency, space));
    match (&cover, &book, &pay) {
        (Some(c), Some(b), Some(p)) => {
            human.push('\n');
            human.push_str(&render::cover(c, space));
            human.push_str(&render::book(b, p, space));
        }
        _ => human.push_str("\nno finite null cover\n"),
    }
    Ok(Done {
        code: 0,
        human,
        machine: json!({
            "command": "demo",
            "model": model.id,
            "flavor_check": flavor,
            "consistency": consistency,
            "cover": cover,
            "book": book,
            "payoffs": pay,
        }),
    })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn export(id: &str, out: Option<&Path>) -> Result<Done> {
    let files: Vec<(String, String)> = match id {
        "cabello18" | "peres33" => {
            vec![(
                format!("{id}.rays.json"),
                experiment_to_json(&models::load_ks_rayset(id)?),
            )]
        }
        _ => {
            let model = build_model(id)?;
            match &model.representation {
                None => vec![(format!("{id}.space.json"), space_to_json(&model.space))],
                Some(rep) => {
                    let exp_name = format!("{id}.exp.json");
                    let space_name = format!("{id}.space.json");
                    vec![
                        (exp_name.clone(), experiment_to_json(rep.experiment())),
                        (space_name.clone(), space_to_json(rep.space())),
                        (
                            format!("{id}.rep.json"),
                            representation_to_json(rep, &exp_name, &space_name),
                        ),
                    ]
                }
            }
        }
    };
    let Some(dir) = out else {
        if files.len() != 1 {
            bail!("model `{id}` spans several files; pass --out DIR");
        }
        let (name, text) = &files[0];
        return Ok(Done {
            code: 0,
            human: format!("{text}\n"),
            machine: json!({ "command": "export-model", "file": name, "content": serde_json::from_str::<Value>(text)? }),
        });
    };
    let mut written = Vec::new();
    for (name, text) in &files {
        written.push(write(dir, name, text)?.display().to_string());
    }
    Ok(Done {
        code: 0,
        human: written.iter().map(|w| format!("wrote {w}\n")).collect(),
        machine: json!({ "command": "export-model", "written": written }),
    })
}
