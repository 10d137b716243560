fn main() {
    std::process::exit(sbgas::cli::main_from_env());
}
