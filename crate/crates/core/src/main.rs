fn main() {
    std::process::exit(permdiv::cli::main_entry());
}
