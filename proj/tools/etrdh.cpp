#include "etrdh/cli.hpp"

int main(int argc, char** argv) { return etrdh::cli::run(argc, argv); }
