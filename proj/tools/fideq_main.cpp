#include "fideq/commands.hpp"

int main(int argc, char** argv) { return fideq::cli::run(argc, argv); }
