fn main() -> std::process::ExitCode {
    ess_core::cli::main()
}
