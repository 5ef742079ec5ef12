#include "nlcs/harness.hpp"

int main(int argc, char** argv) { return nlcs::cli_main(argc, argv); }
