#include "tanks/cli.hpp"

int main(int argc, char** argv) {
    return tanks::run_cli(argc, argv, std::cout, std::cerr, std::cin);
}
