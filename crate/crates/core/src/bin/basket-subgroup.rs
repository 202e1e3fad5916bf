fn main() {
    std::process::exit(basket_subgroup::cli::run(std::env::args_os()));
}
