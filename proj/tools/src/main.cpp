#include "screening_cli/run.hpp"

int main(int argc, char** argv) { return screening::cli::main_entry(argc, argv); }
