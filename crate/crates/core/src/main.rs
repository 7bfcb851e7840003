fn main() -> std::process::ExitCode {
    noiseless_codes::cli::main_entry()
}
