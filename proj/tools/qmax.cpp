#include "qmax/cli.hpp"

int main(int argc, char** argv) { return qmax::cli::main(argc, argv); }
