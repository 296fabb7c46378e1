#include "apt_lab/cli.hpp"

int main(int argc, char** argv) { return apt_lab::cli::run(argc, argv); }
