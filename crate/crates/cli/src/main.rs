//! `ccnat`: batch front-end for the kernel.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccnat_core::cert;
use ccnat_core::script::{self, context_script, Exit, Options, DEFAULT_FUEL};
use ccnat_core::syntax::print_in_context;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ccnat", version, about = "Type checker for the calculus of constructions with Presburger conversion")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a script of declarations and commands.
    Run {
        file: PathBuf,
        /// Reduction fuel per normalization.
        #[arg(long, env = "CCNAT_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Write a certificate for every accepted conversion into DIR.
        #[arg(long, value_name = "DIR")]
        emit_cert: Option<PathBuf>,
        /// Replay a certificate against the `convert` commands with its goal.
        #[arg(long, value_name = "FILE")]
        verify_cert: Option<PathBuf>,
        /// Print the merges behind each conversion.
        #[arg(long)]
        explain: bool,
        /// Type the recursor's zero case against `nat` instead of `Q 0`.
        #[arg(long)]
        strict_iota_elim: bool,
    },
    /// Check a certificate in a fresh context.
    VerifyCert {
        file: PathBuf,
        /// Script whose declarations form the context.
        #[arg(long)]
        context: PathBuf,
        /// The certified goal, `t ~ u`.
        #[arg(long)]
        goal: String,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_certificates(dir: &Path, out: &script::Outcome) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for c in &out.certificates {
        let goal = format!("{} ~ {}\n", print_in_context(&c.context, &c.lhs), print_in_context(&c.context, &c.rhs));
        let files = [
            ("cert", cert::print(&c.certificate)),
            ("ctx", context_script(&c.context)),
            ("goal", goal),
        ];
        for (ext, text) in files {
            let path = dir.join(format!("{}.{ext}", c.stem));
            fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    Ok(())
}

fn run(file: &Path, opts: Options, emit: Option<&Path>) -> Result<Exit, String> {
    let src = read(file)?;
    let script = script::parse(&src).map_err(|e| format!("{}:{e}", file.display()))?;
    let out = script::run(&script, &opts);
    print!("{}", out.report());
    if let Some(dir) = emit {
        write_certificates(dir, &out)?;
    }
    Ok(out.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Run { file, fuel, emit_cert, verify_cert, explain, strict_iota_elim } => {
            let verify = match verify_cert.as_deref().map(read).transpose() {
                Ok(text) => text.map(|t| cert::parse(&t)).transpose().map_err(|e| format!("certificate: {e}")),
                Err(e) => Err(e),
            };
            verify.and_then(|verify| {
                let opts = Options { fuel, strict_iota_elim, explain, emit_certificates: emit_cert.is_some(), verify };
                run(&file, opts, emit_cert.as_deref())
            })
        }
        Cmd::VerifyCert { file, context, goal } => read(&context).and_then(|ctx| {
            let text = read(&file)?;
            match script::verify_certificate(&ctx, goal.trim(), &text)? {
                Ok(()) => {
                    println!("CERT ok");
                    Ok(Exit::Success)
                }
                Err(e) => {
                    println!("CERT fail {e}");
                    Ok(Exit::Rejected)
                }
            }
        }),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::Limit as u8)
        }
    }
}
