#include "gibq/cli.hpp"

int main(int argc, char** argv) { return gibq::run_cli(argc, argv); }
