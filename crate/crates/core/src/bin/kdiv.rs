fn main() {
    std::process::exit(kdiv::cli::main_with(std::env::args_os()));
}
