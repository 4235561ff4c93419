#include "cli.hpp"

int main(int argc, char** argv) { return eqlms_cli::run(argc, argv); }
