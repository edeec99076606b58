fn main() -> std::process::ExitCode {
    jambu::cli::run()
}
