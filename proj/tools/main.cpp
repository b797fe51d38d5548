#include "lab_cli.hpp"

int main(int argc, char** argv) { return pinnlab::cli::run(argc, argv); }
