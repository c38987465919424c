#include "acim/cli.hpp"

int main(int argc, char** argv) { return acim::cli::run(argc, argv); }
