#include <string>
#include <vector>

#include "cskor/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cskor::cli::execute(args);
}
