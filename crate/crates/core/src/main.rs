fn main() {
    std::process::exit(ultrahot::cli::main_entry());
}
