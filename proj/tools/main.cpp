#include "fracorder/cli.hpp"

int main(int argc, char** argv) { return fracorder::run_cli(argc, argv); }
