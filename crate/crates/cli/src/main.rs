fn main() {
    std::process::exit(rwl_cli::dispatch(std::env::args_os()));
}
