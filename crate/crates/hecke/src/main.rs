fn main() {
    std::process::exit(hecke::cli::main());
}
