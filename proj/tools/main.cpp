#include <string>
#include <vector>

#include "protoeval/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return protoeval::dispatch(std::move(args));
}
