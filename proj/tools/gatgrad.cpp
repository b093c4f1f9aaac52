#include "gatgrad/cli.hpp"

int main(int argc, char** argv) {
    return gatgrad::cli::main(argc, argv);
}
