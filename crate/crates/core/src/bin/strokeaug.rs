fn main() -> std::process::ExitCode {
    strokeaug::cli::main()
}
