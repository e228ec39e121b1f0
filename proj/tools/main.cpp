#include "treesync/cli.hpp"

int main(int argc, char** argv) { return treesync::cliMain(argc, argv); }
