#include "lpplab/cli.hpp"

int main(int argc, char** argv) { return lpplab::cli::main(argc, argv); }
