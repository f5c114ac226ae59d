#include "linrec/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return linrec::run(args, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "internal: " << e.what() << "\n";
        return linrec::kExitInternal;
    }
}
