fn main() {
    std::process::exit(bogochannel::cli::dispatch(std::env::args()));
}
