fn main() {
    std::process::exit(matgraph::cli::main_entry());
}
