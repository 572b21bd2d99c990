#include "dldd/cli.hpp"

int main(int argc, char** argv) { return dldd::cli_main(argc, argv); }
