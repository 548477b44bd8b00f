fn main() -> std::process::ExitCode {
    gaitopt::cli::main()
}
