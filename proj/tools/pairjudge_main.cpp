#include <string>
#include <vector>

#include "pairjudge/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pairjudge::run_cli(std::move(args));
}
