#include "dmap/commands.hpp"

int main(int argc, char** argv) { return dmap::run_cli(argc, argv); }
