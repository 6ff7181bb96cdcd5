#include <hankelscope/cli.hpp>

int main(int argc, char** argv) { return hankelscope::cli::main_entry(argc, argv); }
