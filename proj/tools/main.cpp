#include "sphanova/cli.hpp"

int main(int argc, char** argv) { return sphanova::cli::dispatch(argc, argv); }
