fn main() {
    std::process::exit(sbt_lab::cli::run(std::env::args_os()));
}
