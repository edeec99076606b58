#![allow(dead_code)]

pub mod golden;
pub mod oracle;
pub mod props;

use std::path::PathBuf;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn jambu<I, S>(args: I) -> (u8, String, String)
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let mut argv: Vec<std::ffi::OsString> = vec!["jambu".into()];
    argv.extend(args.into_iter().map(|a| a.as_ref().to_owned()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = jambu::cli::run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
