fn main() {
    std::process::exit(riemann_viscosity::report::cli::main());
}
