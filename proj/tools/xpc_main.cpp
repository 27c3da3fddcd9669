#include "xpc/cli.hpp"

int main(int argc, char** argv) { return xpc::cli::run_command(argc, argv); }
