#include "fafl/cli.hpp"

int main(int argc, char** argv) { return fafl::cli::run(argc, argv); }
