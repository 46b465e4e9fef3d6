fn main() {
    std::process::exit(ogeb::cli::main());
}
