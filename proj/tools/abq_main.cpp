#include "abq/cli.hpp"

int main(int argc, char** argv) { return abq::cli::run(argc, argv); }
