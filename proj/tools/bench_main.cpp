#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "ascan/bench.hpp"
#include "ascan/errors.hpp"

int main(int argc, char** argv) {
    int repeats = 5;
    int chain_steps = 1000;
    bool csv = false;
    std::string out_path;

    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--repeats" && i + 1 < argc) repeats = std::atoi(argv[++i]);
        else if (arg == "--chain-steps" && i + 1 < argc) chain_steps = std::atoi(argv[++i]);
        else if (arg == "--csv") csv = true;
        else if (arg == "-o" && i + 1 < argc) out_path = argv[++i];
        else {
            std::cerr << "usage: ascan_bench [--repeats N] [--chain-steps N] [--csv] "
                         "[-o FILE]\n";
            return arg == "--help" || arg == "-h" ? 0 : 2;
        }
    }

    try {
        ascan::BenchReport forward = ascan::bench_forward(repeats);
        ascan::ChainBenchReport chain = ascan::bench_chain_cache(chain_steps);
        std::string report =
            csv ? ascan::to_csv(forward, chain) : ascan::to_markdown(forward, chain);
        if (out_path.empty()) {
            std::cout << report;
        } else {
            std::ofstream out(out_path);
            if (!out) throw ascan::IoError("cannot open '" + out_path + "'");
            out << report;
        }
    } catch (const ascan::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
