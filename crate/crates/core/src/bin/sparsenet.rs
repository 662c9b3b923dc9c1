fn main() -> std::process::ExitCode {
    sparsenet::cli::main_with_args(std::env::args_os())
}
