fn main() {
    std::process::exit(omodel::cli::dispatch(std::env::args_os()));
}
