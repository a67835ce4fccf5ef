#include "pathkernel/cli.hpp"

int main(int argc, char** argv) { return pathkernel::cli::main(argc, argv); }
