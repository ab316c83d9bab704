#include "bfly/cli.hpp"

int main(int argc, char** argv) { return bfly::cli_main(argc, argv); }
