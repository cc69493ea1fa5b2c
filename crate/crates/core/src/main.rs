fn main() -> std::process::ExitCode {
    maint_sim::cli::main()
}
