fn main() {
    std::process::exit(sopcalc::run(std::env::args_os()));
}
