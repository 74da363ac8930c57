#include "fireball_cli.hpp"

int main(int argc, char** argv) { return fireball::cli::main(argc, argv); }
