fn main() -> std::process::ExitCode {
    spinchain_vqe::cli::main()
}
