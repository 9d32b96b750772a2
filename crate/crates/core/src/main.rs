fn main() {
    std::process::exit(ustat_markov::cli::main_with_args(std::env::args_os()));
}
