fn main() {
    std::process::exit(tdlf::cli::main());
}
