fn main() {
    std::process::exit(grasp::cli::run());
}
