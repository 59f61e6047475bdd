#include <iostream>
#include <string>
#include <vector>

#include "metakit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return metakit::cli::dispatch(args, std::cout, std::cerr);
}
