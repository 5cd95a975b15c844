#include "cae/cli/app.hpp"

int main(int argc, char** argv) { return cae::cli::run(argc, argv); }
