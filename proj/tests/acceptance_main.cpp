#include "acceptance.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    kripke::selftest::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        options.only.insert(std::stoi(argv[i]));
    }
    const auto results = kripke::selftest::run_acceptance(options, &std::cout);
    int failed = 0;
    for (const auto& r : results) {
        failed += r.pass ? 0 : 1;
    }
    std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
