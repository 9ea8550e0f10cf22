fn main() {
    std::process::exit(efg::cli::run() as i32);
}
