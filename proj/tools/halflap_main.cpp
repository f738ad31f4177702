#include <halflap/cli.hpp>

int main(int argc, char** argv) { return halflap::run_cli(argc, argv); }
