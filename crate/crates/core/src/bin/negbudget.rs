fn main() {
    std::process::exit(negbudget::cli::main_with_args(std::env::args_os()));
}
