#include "pcafe/cli.hpp"

int main(int argc, char** argv) { return pcafe::cli::run(argc, argv); }
