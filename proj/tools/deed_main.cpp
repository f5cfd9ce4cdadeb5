#include "deed/cli.hpp"

int main(int argc, char** argv) { return deed::cli::cli_main(argc, argv); }
