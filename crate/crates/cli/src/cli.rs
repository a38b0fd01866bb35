//! `kbshell` subcommands.
//!
//! Exit codes: 0 success, 1 parse/lint errors or a failed consultation,
//! 2 usage error.

use std::io::{BufRead, Write};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{CommandFactory, Parser, Subcommand};
use kbshell_core::{
    format_kb, lint, parse_kb, run_scripted, FinishReason, KnowledgeBase, ParamType, Session, Status,
};

use crate::service::{KbRegistry, SessionService};

#[derive(Debug, Parser)]
#[command(
    name = "kbshell",
    version,
    about = "Expert-system shell for .kb knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and lint a knowledge base
    Check { file: PathBuf },
    /// Print a knowledge base in canonical form
    Fmt { file: PathBuf },
    /// Run an interactive consultation on stdin/stdout
    Consult { file: PathBuf },
    /// Replay answers from a file and print the transcript
    Run {
        file: PathBuf,
        /// One answer per line
        #[arg(long)]
        answers: PathBuf,
    },
    /// Serve the consultation API and web client
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of *.kb files to offer, in addition to the bundled one
        #[arg(long, default_value = "kbs")]
        kb_dir: PathBuf,
        /// Directory with the built web client, served at `/`
        #[arg(long, default_value = "web/dist")]
        static_dir: PathBuf,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs the CLI against the process's standard streams.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdin = std::io::stdin();
    run_cli_with(
        argv,
        &mut stdin.lock(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}

pub fn run_cli_with<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            let _ = writeln!(err, "\n{}", Cli::command().render_help());
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Check { file } => check(&file, err),
        Command::Fmt { file } => fmt(&file, out, err),
        Command::Run { file, answers } => run(&file, &answers, out, err),
        Command::Consult { file } => consult(&file, input, out, err),
        Command::Serve {
            port,
            kb_dir,
            static_dir,
        } => serve(port, &kb_dir, &static_dir, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

type CmdResult = Result<i32, String>;

fn read_source(path: &Path) -> Result<String, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Parses and lints `path`, printing every problem. Returns the KB only when
/// it is free of errors.
fn load(path: &Path, err: &mut dyn Write) -> Result<Option<KnowledgeBase>, String> {
    let source = read_source(path)?;
    let name = path.display().to_string();
    let parsed = parse_kb(&source);
    for d in &parsed.diagnostics {
        let _ = writeln!(err, "{}", d.render(&name));
    }
    if parsed.has_errors() {
        return Ok(None);
    }
    let findings = lint(&parsed.kb);
    for f in &findings {
        let _ = writeln!(err, "{}", f.render(&name));
    }
    if findings.iter().any(|f| f.is_error()) {
        return Ok(None);
    }
    Ok(Some(parsed.kb))
}

fn check(path: &Path, err: &mut dyn Write) -> CmdResult {
    Ok(if load(path, err)?.is_some() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn fmt(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let source = read_source(path)?;
    let parsed = parse_kb(&source);
    let name = path.display().to_string();
    for d in &parsed.diagnostics {
        let _ = writeln!(err, "{}", d.render(&name));
    }
    if parsed.has_errors() {
        return Ok(EXIT_FAILURE);
    }
    out.write_all(format_kb(&parsed.kb).as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

fn run(path: &Path, answers: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(kb) = load(path, err)? else {
        return Ok(EXIT_FAILURE);
    };
    let answers = read_source(answers)?;
    let answers: Vec<&str> = answers.lines().collect();
    let transcript = run_scripted(Arc::new(kb), &answers).map_err(|e| e.to_string())?;
    out.write_all(transcript.to_canonical().as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(match transcript.finish_reason() {
        Some(FinishReason::Error { .. }) | None => EXIT_FAILURE,
        Some(_) => EXIT_OK,
    })
}

fn consult(path: &Path, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let Some(kb) = load(path, err)? else {
        return Ok(EXIT_FAILURE);
    };
    let io = |e: std::io::Error| e.to_string();
    if kb.has_title() {
        writeln!(out, "== {} ==", kb.title()).map_err(io)?;
    }
    let mut session = Session::start(Arc::new(kb)).map_err(|e| e.to_string())?;
    let mut shown = 0;
    loop {
        let advice = session.advice();
        for text in &advice[shown..] {
            writeln!(out, "\n{text}").map_err(io)?;
        }
        shown = advice.len();
        let question = match session.status() {
            Status::Finished(reason) => {
                writeln!(out, "\nConsultation finished: {reason}").map_err(io)?;
                return Ok(if matches!(reason, FinishReason::Error { .. }) {
                    EXIT_FAILURE
                } else {
                    EXIT_OK
                });
            }
            Status::AwaitingAnswer(q) => q.clone(),
        };
        writeln!(out, "\n{}", question.prompt).map_err(io)?;
        match question.ptype {
            ParamType::Category => {
                for v in &question.values {
                    writeln!(out, "  - {v}").map_err(io)?;
                }
            }
            ParamType::Boolean => writeln!(out, "  (yes/no)").map_err(io)?,
            ParamType::Number | ParamType::Text => {}
        }
        loop {
            write!(out, "> ").map_err(io)?;
            out.flush().map_err(io)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io)? == 0 {
                writeln!(err, "\nconsultation abandoned: no more input").map_err(io)?;
                return Ok(EXIT_FAILURE);
            }
            let answer = line.trim_end_matches(['\n', '\r']);
            match session.submit_answer(answer) {
                Ok(()) => break,
                Err(e) => writeln!(out, "{e}").map_err(io)?,
            }
        }
    }
}

fn serve(port: u16, kb_dir: &Path, static_dir: &Path, err: &mut dyn Write) -> CmdResult {
    let mut registry = KbRegistry::builtin();
    if kb_dir.is_dir() {
        let rejected = registry
            .load_dir(kb_dir)
            .map_err(|e| format!("cannot read {}: {e}", kb_dir.display()))?;
        for (file, reason) in rejected {
            let _ = writeln!(err, "skipping {file}: {reason}");
        }
    }
    let static_dir = static_dir.is_dir().then(|| static_dir.to_path_buf());
    let service = Arc::new(SessionService::new(registry));
    let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, port));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime
        .block_on(crate::http::serve(addr, service, static_dir))
        .map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}
