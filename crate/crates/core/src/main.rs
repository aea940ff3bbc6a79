fn main() -> std::process::ExitCode {
    fdjrc_core::cli::main_entry()
}
