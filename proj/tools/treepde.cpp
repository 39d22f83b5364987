#include "treepde/cli.hpp"

int main(int argc, char** argv) { return treepde::cli::run(argc, argv); }
