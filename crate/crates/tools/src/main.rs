fn main() {
    std::process::exit(rateq_tools::cli::main_with(std::env::args_os()));
}
