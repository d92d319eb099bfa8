#include "cmmc/conformal.hpp"

#include "cmmc/pattern_io.hpp"

#include <fstream>
#include <stdexcept>

namespace cmmc {

TestSetup::TestSetup(std::vector<CurveStatistic> nulls, std::vector<CurveStatistic> tests)
    : null_curves(std::move(nulls)), test_curves(std::move(tests)) {
    if (null_curves.empty() || test_curves.empty())
        throw std::invalid_argument("TestSetup: need n >= 1 and m >= 1");
    const DistanceGrid& g = null_curves[0].grid;
    for (const auto& c : null_curves)
        if (!(c.grid == g)) throw std::invalid_argument("TestSetup: grid mismatch");
    for (const auto& c : test_curves)
        if (!(c.grid == g)) throw std::invalid_argument("TestSetup: grid mismatch");
}

std::string pvalue_method_name(PValueMethod m) {
    switch (m) {
        case PValueMethod::joint_erl: return "joint_erl";
        case PValueMethod::parallel_erl: return "parallel_erl";
        case PValueMethod::naive: return "naive";
        case PValueMethod::scalar: return "scalar";
    }
    return "?";
}

namespace {

// p = (1 + #{nulls preceq test}) / (n+1); equivalence counts toward the sum,
// which keeps tied p-values conservative.
double erl_pvalue(const std::vector<ErlScore>& scores, std::size_t n_null,
                  std::size_t test_pos, long& tie_events) {
    long count = 0;
    for (std::size_t i = 0; i < n_null; ++i) {
        const ErlOrder ord = erl_compare(scores[i], scores[test_pos]);
        if (ord != ErlOrder::succeeds) ++count;
        if (ord == ErlOrder::equivalent) ++tie_events;
    }
    return static_cast<double>(1 + count) / static_cast<double>(n_null + 1);
}

} // namespace

PValueVector conformal_pvalues_joint_values(const ValueMatrix& nulls, const ValueMatrix& tests) {
    const std::size_t n = nulls.size(), m = tests.size();
    if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
    ValueMatrix all = nulls;
    all.insert(all.end(), tests.begin(), tests.end());
    const auto scores = erl_scores(all);

    PValueVector out{std::vector<double>(m), PValueMethod::joint_erl, static_cast<int>(n), 0};
    for (std::size_t j = 0; j < m; ++j)
        out.p[j] = erl_pvalue(scores, n, n + j, out.tie_events);
    return out;
}

PValueVector conformal_pvalues_parallel_values(const ValueMatrix& nulls,
                                               const ValueMatrix& tests) {
    const std::size_t n = nulls.size(), m = tests.size();
    if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");

    PValueVector out{std::vector<double>(m), PValueMethod::parallel_erl, static_cast<int>(n), 0};
    ValueMatrix local = nulls;
    local.emplace_back();
    for (std::size_t j = 0; j < m; ++j) {
        local[n] = tests[j];
        const auto scores = erl_scores(local);
        out.p[j] = erl_pvalue(scores, n, n, out.tie_events);
    }
    return out;
}

PValueVector conformal_pvalues_joint(const TestSetup& setup) {
    return conformal_pvalues_joint_values(curves_to_matrix(setup.null_curves),
                                          curves_to_matrix(setup.test_curves));
}

PValueVector conformal_pvalues_parallel(const TestSetup& setup) {
    return conformal_pvalues_parallel_values(curves_to_matrix(setup.null_curves),
                                             curves_to_matrix(setup.test_curves));
}

PValueVector naive_mmctest_pvalues(const std::vector<CurveStatistic>& nulls,
                                   const std::vector<CurveStatistic>& tests) {
    const std::size_t n = nulls.size(), m = tests.size();
    if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
    if (n % m != 0)
        throw std::invalid_argument(
            "naive_mmctest_pvalues: m must divide n; trim the null sample to a multiple of m");
    const std::size_t block = n / m;

    const ValueMatrix null_rows = curves_to_matrix(nulls);
    const ValueMatrix test_rows = curves_to_matrix(tests);

    PValueVector out{std::vector<double>(m), PValueMethod::naive, static_cast<int>(block), 0};
    for (std::size_t j = 0; j < m; ++j) {
        ValueMatrix local(null_rows.begin() + static_cast<std::ptrdiff_t>(j * block),
                          null_rows.begin() + static_cast<std::ptrdiff_t>((j + 1) * block));
        local.push_back(test_rows[j]);
        const auto scores = erl_scores(local);
        out.p[j] = erl_pvalue(scores, block, block, out.tie_events);
    }
    return out;
}

PValueVector conformal_pvalues_scalar(const std::vector<double>& null_scores,
                                      const std::vector<double>& test_scores) {
    const std::size_t n = null_scores.size(), m = test_scores.size();
    if (n < 1 || m < 1) throw std::invalid_argument("need n >= 1 and m >= 1");
    PValueVector out{std::vector<double>(m), PValueMethod::scalar, static_cast<int>(n), 0};
    for (std::size_t j = 0; j < m; ++j) {
        long count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (null_scores[i] <= test_scores[j]) ++count;
            if (null_scores[i] == test_scores[j]) ++out.tie_events;
        }
        out.p[j] = static_cast<double>(1 + count) / static_cast<double>(n + 1);
    }
    return out;
}

void write_pvalues_csv(const PValueVector& pv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "test_index,p_value,method,n_effective\n";
    for (std::size_t j = 0; j < pv.p.size(); ++j)
        out << (j + 1) << ',' << format_double(pv.p[j]) << ',' << pvalue_method_name(pv.method)
            << ',' << pv.n_effective << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace cmmc
