#include "sbs/cli.hpp"

int main(int argc, char** argv) { return sbs::cli::run(argc, argv); }
