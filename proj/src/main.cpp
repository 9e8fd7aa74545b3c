#include <string>
#include <vector>

#include "swarmlab/cli.hpp"

int main(int argc, char** argv) {
    return swarmlab::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
