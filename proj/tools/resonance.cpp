#include "resonance/cli.hpp"

int main(int argc, char** argv) { return resonance::cli::main(argc, argv); }
