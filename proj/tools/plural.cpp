#include "plural/cli.hpp"

int main(int argc, char** argv) { return plural::cli::main(argc, argv); }
