// Prints one line per acceptance criterion and exits nonzero if any fails.
#include "pgfl/verify.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

using namespace pgfl;

namespace {

struct Summary {
    bool passed = true;
    std::string worst;
    double worst_ratio = -1.0;
    double seconds = 0.0;
};

}  // namespace

int main() {
    VerifyOptions full;
    full.level = VerifyLevel::full;
    const auto report = run_suite(full);
    print_report(std::cout, report);
    std::cout << '\n';

    std::map<int, Summary> by_criterion;
    for (const auto& c : report.checks) {
        auto& s = by_criterion[c.criterion];
        s.passed = s.passed && c.passed();
        const double ratio = c.tolerance > 0 ? c.max_error / c.tolerance : (c.max_error > 0 ? 1e300 : 0.0);
        if (ratio > s.worst_ratio) {
            s.worst_ratio = ratio;
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s: max_err=%.3e tol=%.1e n=%zu", c.name.c_str(), c.max_error,
                          c.tolerance, c.instances);
            s.worst = buf;
        }
        if (c.criterion == 1 && c.name.find("partition posterior") != std::string::npos) s.seconds = c.seconds;
    }

    // The brute-force sweep has a 2 minute budget.
    auto& c1 = by_criterion[1];
    if (c1.seconds >= 120.0) c1.passed = false;
    c1.worst += "; sweep " + std::to_string(c1.seconds) + " s (budget 120 s)";

    // Fast verification under 10 s, on top of the large-update timing check.
    VerifyOptions fast;
    const auto start = std::chrono::steady_clock::now();
    const auto fast_report = run_suite(fast);
    const double fast_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto& c9 = by_criterion[9];
    c9.passed = c9.passed && fast_report.passed() && fast_seconds < 10.0;
    c9.worst += "; verify fast " + std::to_string(fast_seconds) + " s (budget 10 s)";

    bool all = true;
    for (int criterion = 1; criterion <= 9; ++criterion) {
        const auto it = by_criterion.find(criterion);
        const bool ok = it != by_criterion.end() && it->second.passed;
        all = all && ok;
        std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << "  "
                  << (it != by_criterion.end() ? it->second.worst : std::string("no checks")) << '\n';
    }
    return all ? 0 : 1;
}
