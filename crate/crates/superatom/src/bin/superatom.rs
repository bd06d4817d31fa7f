fn main() {
    std::process::exit(superatom::cli::run());
}
