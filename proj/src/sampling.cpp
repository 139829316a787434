#include "sepfx/sampling.hpp"

#include <algorithm>
#include <map>

namespace sepfx {

std::size_t Dataset::column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorCode::unknown_column, "dataset has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

bool Dataset::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RowStream::RowStream(uint64_t seed, uint64_t row) : state_(splitmix64(splitmix64(seed) ^ row)) {}

uint64_t RowStream::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RowStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Dataset sample_dataset(const StructuralModel& model, std::size_t n, uint64_t seed) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "sample size must be at least 1");
    CompiledModel cm(model);

    Dataset data;
    data.columns = {role::A, role::D, role::Y};
    if (model.has_role(role::L)) data.columns.push_back(role::L);
    data.seed = seed;
    data.n = n;

    std::vector<std::size_t> source;
    for (const auto& c : data.columns) source.push_back(cm.index(model.role_variable(c)));
    const std::size_t d_var = cm.index(model.role_variable(role::D));
    const std::size_t y_col = 2;

    // Cumulative weights per exogenous variable, accumulated in support order.
    const auto& exo = cm.exogenous();
    std::vector<std::vector<double>> cumulative;
    for (auto v : exo) {
        std::vector<double> cum;
        double acc = 0.0;
        for (double w : cm.weights(v)) cum.push_back(acc += w);
        cumulative.push_back(std::move(cum));
    }

    const std::vector<int> forced(cm.variable_count(), -1);
    std::vector<int> values(cm.variable_count(), 0);
    data.cells.resize(n * data.columns.size());
    for (std::size_t i = 0; i < n; ++i) {
        RowStream rng(seed, i);
        for (std::size_t k = 0; k < exo.size(); ++k) {
            const double u = rng.uniform();
            const auto& cum = cumulative[k];
            std::size_t idx = 0;
            while (idx + 1 < cum.size() && !(u < cum[idx])) ++idx;
            // Never land on a zero-weight code at the tail of the support.
            while (idx > 0 && cm.weights(exo[k])[idx] == 0.0) --idx;
            values[exo[k]] = static_cast<int>(idx);
        }
        cm.evaluate(values, forced);
        int* out = &data.cells[i * data.columns.size()];
        for (std::size_t c = 0; c < source.size(); ++c) out[c] = cm.var(source[c]).support[values[source[c]]];
        if (model.truncation && cm.var(d_var).support[values[d_var]] == 1) out[y_col] = kUndefined;
    }
    return data;
}

std::vector<std::size_t> cell_counts(const Dataset& data, const ObservedLaw& law) {
    std::vector<std::size_t> data_cols;
    for (const auto& c : law.columns()) data_cols.push_back(data.column(c.name));
    std::map<std::vector<int>, std::size_t> slot;
    std::vector<int> key(law.cols());
    for (std::size_t r = 0; r < law.rows(); ++r) {
        for (std::size_t c = 0; c < law.cols(); ++c) key[c] = law.cell(r, c);
        slot[key] = r;
    }
    std::vector<std::size_t> counts(law.rows() + 1, 0);
    for (std::size_t i = 0; i < data.n; ++i) {
        for (std::size_t c = 0; c < law.cols(); ++c) key[c] = data.cell(i, data_cols[c]);
        auto it = slot.find(key);
        counts[it == slot.end() ? law.rows() : it->second]++;
    }
    return counts;
}

}  // namespace sepfx
