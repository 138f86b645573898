#include "cli.hpp"

int main(int argc, char** argv) { return hbtree::cli::cli_main(argc, argv); }
