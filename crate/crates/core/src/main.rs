fn main() -> std::process::ExitCode {
    nctorus::cli::main()
}
