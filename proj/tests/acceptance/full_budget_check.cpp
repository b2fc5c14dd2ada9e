// Compares a full-budget exp1 coverage.csv against the reference coverage
// table: every coverage within 0.02 and every IQR within 0.03.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

namespace {

struct Entry {
    double coverage;
    double iqr;
};

// (n, level) -> reference coverage and IQR, first experiment.
const std::map<std::pair<int, int>, Entry>& reference_table() {
    static const std::map<std::pair<int, int>, Entry> table = [] {
        const std::array<int, 6> levels{990, 950, 900, 850, 800, 750};
        const std::array<int, 6> ns{100, 300, 500, 1000, 2000, 3000};
        const double cov[6][6] = {{0.993, 0.968, 0.929, 0.893, 0.854, 0.809},
                                  {0.988, 0.952, 0.906, 0.851, 0.805, 0.762},
                                  {0.993, 0.955, 0.909, 0.865, 0.812, 0.771},
                                  {0.990, 0.956, 0.908, 0.859, 0.817, 0.767},
                                  {0.992, 0.952, 0.898, 0.847, 0.793, 0.747},
                                  {0.992, 0.959, 0.908, 0.849, 0.802, 0.750}};
        const double iqr[6][6] = {{0.023, 0.061, 0.103, 0.145, 0.176, 0.204},
                                  {0.026, 0.085, 0.143, 0.184, 0.199, 0.216},
                                  {0.022, 0.072, 0.099, 0.108, 0.123, 0.126},
                                  {0.014, 0.049, 0.066, 0.067, 0.091, 0.104},
                                  {0.009, 0.030, 0.058, 0.064, 0.067, 0.065},
                                  {0.005, 0.024, 0.036, 0.054, 0.046, 0.063}};
        std::map<std::pair<int, int>, Entry> t;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) t[{ns[i], levels[j]}] = {cov[i][j], iqr[i][j]};
        }
        return t;
    }();
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: full_budget_check coverage.csv\n";
        return 2;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::cerr << "cannot read " << argv[1] << "\n";
        return 4;
    }
    std::string line;
    std::getline(in, line);
    int failures = 0;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string f[4];
        for (auto& field : f) std::getline(row, field, ',');
        const int n = std::stoi(f[0]);
        const int level = static_cast<int>(std::lround(std::stod(f[1]) * 1000));
        const double coverage = std::stod(f[2]);
        const double iqr = std::stod(f[3]);
        const auto it = reference_table().find({n, level});
        if (it == reference_table().end()) continue;
        ++rows;
        const bool ok = std::abs(coverage - it->second.coverage) <= 0.02 &&
                        std::abs(iqr - it->second.iqr) <= 0.03;
        std::printf("%s n=%d level=%.2f coverage=%.3f (reference %.3f) iqr=%.3f (reference %.3f)\n",
                    ok ? "PASS" : "FAIL", n, level / 1000.0, coverage, it->second.coverage, iqr,
                    it->second.iqr);
        failures += ok ? 0 : 1;
    }
    if (rows != 36) {
        std::printf("FAIL expected 36 table entries, found %d\n", rows);
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
