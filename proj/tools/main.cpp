#include "emot/cli.hpp"

int main(int argc, char** argv) { return emot::cli_main(argc, argv); }
