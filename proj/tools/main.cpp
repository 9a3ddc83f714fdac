#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    try {
        const tailex::cli::Command cmd =
            tailex::cli::parse_command(argc, argv);
        return tailex::cli::run_command(cmd);
    } catch (const tailex::cli::UsageError& e) {
        std::cerr << "tailex: " << e.what() << "\n";
        return tailex::cli::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "tailex: " << e.what() << "\n";
        return 1;
    }
}
