#include "hjb/cli.hpp"

int main(int argc, char** argv) { return hjb::cli::main(argc, argv); }
