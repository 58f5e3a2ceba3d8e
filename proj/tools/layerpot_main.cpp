#include "layerpot/cli.hpp"

int main(int argc, char** argv) { return layerpot::cli::run(argc, argv); }
