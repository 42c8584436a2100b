fn main() {
    std::process::exit(dktab::cli::main());
}
