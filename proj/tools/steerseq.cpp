#include <steerseq/cli.hpp>

int main(int argc, char **argv) { return steerseq::cli::main_entry(argc, argv); }
