#include "archmix/cli.hpp"

int main(int argc, char** argv) { return archmix::run_main(argc, argv); }
