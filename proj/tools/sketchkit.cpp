#include "sketchkit/cli.hpp"

int main(int argc, char** argv) { return sketchkit::cli::run(argc, argv); }
