fn main() {
    std::process::exit(treepp::cli::run());
}
