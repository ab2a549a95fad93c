#include "cgforge/discretize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "cgforge/error.hpp"

namespace cgforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_numeric(std::span<const std::string> raw, const std::string& variable) {
    std::vector<double> out;
    out.reserve(raw.size());
    for (const auto& cell : raw) {
        double v = 0.0;
        const char* first = cell.data();
        const char* last = first + cell.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
            throw EncodingError("non-numeric value '" + cell + "' in column '" + variable +
                                "' under a numeric discretization rule");
        }
        out.push_back(v);
    }
    return out;
}

// Labels sorted, codes assigned by sorted position.
EncodedColumn encode_sorted(const std::string& name, std::vector<std::string> labels) {
    std::vector<std::string> states = labels;
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    std::map<std::string, State> index;
    for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], static_cast<State>(i));
    EncodedColumn out{Variable{name, std::move(states), 1}, {}};
    out.codes.reserve(labels.size());
    for (const auto& l : labels) out.codes.push_back(index.at(l));
    return out;
}

EncodedColumn apply_cuts(const std::string& name, std::span<const std::string> raw,
                         const std::vector<double>& cuts) {
    const auto values = parse_numeric(raw, name);
    EncodedColumn out{Variable{name, {}, 1}, {}};
    auto& states = out.variable.states;
    if (cuts.empty()) {
        states.push_back("all");
    } else {
        states.push_back("<" + format_number(cuts.front()));
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            states.push_back("[" + format_number(cuts[i - 1]) + "," + format_number(cuts[i]) + ")");
        }
        states.push_back("≥" + format_number(cuts.back()));
    }
    out.codes.reserve(values.size());
    for (double v : values) {
        // bin i holds cut_{i-1} <= v < cut_i
        auto bin = std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin();
        out.codes.push_back(static_cast<State>(bin));
    }
    return out;
}

EncodedColumn apply_quantiles(const std::string& name, std::span<const std::string> raw, int bins) {
    const auto values = parse_numeric(raw, name);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    std::vector<double> cuts;
    if (n > 0) {
        for (int i = 1; i < bins; ++i) {
            // type-1 empirical quantile: smallest x with F_n(x) >= i/bins
            std::size_t rank = (static_cast<std::size_t>(i) * n + bins - 1) / bins;
            double c = sorted[rank == 0 ? 0 : rank - 1];
            if (c == sorted.back()) break;  // nothing would land above it
            if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
        }
    }

    EncodedColumn out{Variable{name, {}, 1}, {}};
    auto& states = out.variable.states;
    if (cuts.empty()) {
        states.push_back("all");
    } else {
        states.push_back("≤" + format_number(cuts.front()));
        for (std::size_t i = 1; i < cuts.size(); ++i) {
            states.push_back("(" + format_number(cuts[i - 1]) + "," + format_number(cuts[i]) + "]");
        }
        states.push_back(">" + format_number(cuts.back()));
    }
    out.codes.reserve(n);
    for (double v : values) {
        // ties with a cut go to the lower bin
        auto bin = std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin();
        out.codes.push_back(static_cast<State>(bin));
    }
    return out;
}

}  // namespace

void DiscretizationRule::validate() const {
    if (variable.empty()) throw ValidationError("discretization rule has no variable name");
    std::visit(overloaded{
                   [&](const ExplicitCuts& r) {
                       for (std::size_t i = 0; i < r.cuts.size(); ++i) {
                           if (!std::isfinite(r.cuts[i])) {
                               throw ValidationError("non-finite cut for '" + variable + "'");
                           }
                           if (i > 0 && !(r.cuts[i - 1] < r.cuts[i])) {
                               throw ValidationError("cuts for '" + variable +
                                                     "' must be strictly increasing");
                           }
                       }
                   },
                   [&](const QuantileBins& r) {
                       if (r.bins < 2) {
                           throw ValidationError("quantile rule for '" + variable +
                                                 "' needs at least 2 bins");
                       }
                   },
                   [&](const ValueMap&) {},
                   [&](const RareMerge& r) {
                       if (r.min_count < 1) {
                           throw ValidationError("rare-merge rule for '" + variable +
                                                 "' needs min_count >= 1");
                       }
                       if (r.merged_label.empty()) {
                           throw ValidationError("rare-merge rule for '" + variable +
                                                 "' needs a merged label");
                       }
                   },
               },
               kind);
}

EncodedColumn discretize(std::span<const std::string> raw, const DiscretizationRule& rule) {
    rule.validate();
    const auto& name = rule.variable;
    return std::visit(
        overloaded{
            [&](const ExplicitCuts& r) { return apply_cuts(name, raw, r.cuts); },
            [&](const QuantileBins& r) { return apply_quantiles(name, raw, r.bins); },
            [&](const ValueMap& r) {
                std::vector<std::string> labels;
                labels.reserve(raw.size());
                for (const auto& cell : raw) {
                    auto it = r.mapping.find(cell);
                    labels.push_back(it == r.mapping.end() ? cell : it->second);
                }
                return encode_sorted(name, std::move(labels));
            },
            [&](const RareMerge& r) {
                std::map<std::string_view, std::size_t> counts;
                for (const auto& cell : raw) ++counts[cell];
                std::vector<std::string> labels;
                labels.reserve(raw.size());
                for (const auto& cell : raw) {
                    labels.push_back(counts[cell] < r.min_count ? r.merged_label : cell);
                }
                return encode_sorted(name, std::move(labels));
            },
        },
        rule.kind);
}

}  // namespace cgforge
