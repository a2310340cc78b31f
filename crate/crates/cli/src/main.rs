fn main() {
    std::process::exit(illuscope::run(std::env::args_os()));
}
