#include "cli.hpp"

int main(int argc, char** argv) { return sohb::cli::run(argc, argv); }
