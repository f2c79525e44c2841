#include "app.hpp"

int main(int argc, char** argv) { return biotlab::run_cli(argc, argv, std::cout, std::cerr); }
