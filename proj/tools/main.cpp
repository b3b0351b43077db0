#include "cli.hpp"

int main(int argc, char** argv) { return tastic::cli::run(argc, argv); }
