#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "meroloc/cli/commands.hpp"
#include "random_rational.hpp"
#include "reference_values.hpp"

namespace meroloc::cli {

namespace {

SearchConfig config_for(const SelftestArgs& args) {
    SearchConfig c;
    c.rank_tol = args.rank_tol;
    c.workers = args.workers;
    return c;
}

/// Every expected root matched by a report within tol with the same
/// multiplicity, and no extra reports.
template <typename Expected>
std::string compare(const std::vector<RootReport>& got, const Expected& expected, double tol) {
    std::ostringstream why;
    if (got.size() != expected.size()) why << got.size() << " roots reported, expected " << expected.size() << "; ";
    for (const auto& [z, m] : expected) {
        const auto it = std::min_element(got.begin(), got.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.location - z) < std::abs(b.location - z);
        });
        if (it == got.end()) {
            why << "no report near " << z << "; ";
            continue;
        }
        if (std::abs(it->location - z) > tol) why << "root " << z << " off by " << std::abs(it->location - z) << "; ";
        if (it->multiplicity != m) why << "root " << z << " multiplicity " << it->multiplicity << " not " << m << "; ";
    }
    return why.str();
}

SuiteOutcome suite(const std::string& name, const std::function<std::string()>& body) {
    SuiteOutcome s{name, false, ""};
    try {
        s.detail = body();
        s.passed = s.detail.empty();
    } catch (const Error& e) {
        s.detail = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return s;
}

}  // namespace

std::vector<SuiteOutcome> selftest_suites(const SelftestArgs& args) {
    const SearchConfig cfg = config_for(args);
    std::vector<SuiteOutcome> out;

    out.push_back(suite("table1", [&] {
        const auto roots = locate(make_rational(examples::three_zeros_double_pole()),
                                  Rectangle::from_corners({-1.0, -1.0}, {1.0, 1.0}), cfg);
        std::vector<std::pair<Complex, int>> expected;
        for (std::size_t i = 0; i < reference::kTable1.size(); ++i)
            expected.emplace_back(reference::kTable1[i], reference::kTable1Multiplicities[i]);
        return compare(roots, expected, 1e-8);
    }));

    out.push_back(suite("table2", [&] {
        const auto roots = locate(make_nlevp3(examples::transcendental_3x3()),
                                  Rectangle::from_corners({-10.0, -10.0}, {10.0, 10.0}), cfg);
        std::vector<std::pair<Complex, int>> expected;
        for (const auto z : reference::kTable2) expected.emplace_back(z, 1);
        return compare(roots, expected, 1e-8);
    }));

    out.push_back(suite("table3", [&] {
        const auto roots = locate(make_plasma_z(), Rectangle::from_corners({0.0, -5.0}, {5.5, 0.0}), cfg);
        std::vector<std::pair<Complex, int>> expected;
        for (const auto z : reference::kTable3) expected.emplace_back(z, 1);
        return compare(roots, expected, 1e-7);
    }));

    out.push_back(suite("random-rational", [&] {
        std::mt19937_64 rng(20240611);
        std::ostringstream why;
        for (int i = 0; i < args.random_cases; ++i) {
            const auto c = random_rational::make_case(rng);
            const auto result = locate_detailed(make_rational(c.spec), c.rect, cfg);
            std::vector<std::pair<Complex, int>> expected;
            for (const auto& z : c.spec.zeros)
                if (contains(c.rect, z.location, 0.0)) expected.emplace_back(z.location, z.multiplicity);
            for (const auto& p : c.spec.poles) expected.emplace_back(p.location, -p.multiplicity);
            std::string d = compare(result.roots, expected, 1e-6);
            if (!result.complete()) d += "unresolved regions; ";
            if (!d.empty()) why << "case " << i << ": " << d;
        }
        return why.str();
    }));

    return out;
}

}  // namespace meroloc::cli
