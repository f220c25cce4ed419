fn main() {
    std::process::exit(lis_assign::cli::run(std::env::args_os()));
}
