fn main() {
    std::process::exit(singobs::cli::main());
}
