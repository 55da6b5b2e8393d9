fn main() {
    std::process::exit(gridrisk::pipeline::cli::main_with_args(std::env::args_os()));
}
