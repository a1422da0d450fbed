#include <iostream>
#include <string>
#include <vector>

#include <jetcalc/cli.hpp>

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    const jetcalc::cli::Result r = jetcalc::cli::run(args);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}
