fn main() -> std::process::ExitCode {
    dlviz_server::cli::main()
}
