fn main() {
    std::process::exit(nonlocal_decay::cli::main_with(std::env::args_os()));
}
