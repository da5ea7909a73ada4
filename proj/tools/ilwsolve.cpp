#include "ilw/cli.hpp"

int main(int argc, char** argv) { return ilw::cli::main(argc, argv); }
