#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "bookctl/policies.hpp"
#include "bookctl/routing.hpp"
#include "json.hpp"

namespace bookctl {

namespace {

constexpr const char* kPolicyFormat = "bookctl-policy-v1";

// All w >= 0 with sum(w) <= cap, lexicographic.
void enumerate_states(int n, int cap, std::vector<std::vector<int>>& out) {
    std::vector<int> w(n, 0);
    const std::function<void(int, int)> rec = [&](int dim, int remaining) {
        if (dim == n - 1) {
            for (int v = 0; v <= remaining; ++v) {
                w[dim] = v;
                out.push_back(w);
            }
            w[dim] = 0;
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            w[dim] = v;
            rec(dim + 1, remaining - v);
        }
        w[dim] = 0;
    };
    if (n == 0) {
        out.push_back({});
        return;
    }
    rec(0, cap);
}

double binomial(int top, int bottom) {
    double result = 1.0;
    for (int i = 1; i <= bottom; ++i) {
        result *= static_cast<double>(top - bottom + i) / static_cast<double>(i);
    }
    return result;
}

}  // namespace

TerminalCost exact_terminal(std::shared_ptr<const InstanceSpec> spec) {
    return [spec](const std::vector<int>& w) { return operational_cost(w, *spec).gamma; };
}

TerminalCost surrogate_terminal(std::shared_ptr<const ForestModel> model,
                                std::shared_ptr<const InstanceSpec> spec) {
    return [model, spec](const std::vector<int>& w) { return predict_cost(*model, w, *spec); };
}

double ValueTable::value(int t, const std::vector<int>& w) const {
    const double* v = find(t, w);
    if (!v) throw std::out_of_range("value table: state missing at t=" + std::to_string(t));
    return *v;
}

const double* ValueTable::find(int t, const std::vector<int>& w) const {
    if (t < 1 || t >= static_cast<int>(layers.size())) return nullptr;
    const auto& layer = layers[t];
    const auto it = layer.index.find(w);
    if (it == layer.index.end()) return nullptr;
    return &layer.values[it->second];
}

std::size_t ValueTable::state_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers) count += layer.states.size();
    return count;
}

void ValueTable::rebuild_indices() {
    for (auto& layer : layers) {
        layer.index.clear();
        layer.index.reserve(layer.states.size());
        for (std::size_t i = 0; i < layer.states.size(); ++i) {
            layer.index.emplace(layer.states[i], i);
        }
    }
}

ValueTable dp_solve(const InstanceSpec& spec, const TerminalCost& terminal,
                    const std::string& terminal_kind, const DpOptions& opts) {
    double projected = 0.0;
    for (int t = 1; t <= spec.T + 1; ++t) projected += binomial(t - 1 + spec.n, spec.n);
    if (projected > opts.state_cap) {
        throw std::runtime_error("dp: reachable state space (~" + std::to_string(projected) +
                                 " states) exceeds the cap of " + std::to_string(opts.state_cap));
    }

    const ArrivalTable arrivals = arrival_table(spec);
    ValueTable vt;
    vt.T = spec.T;
    vt.n = spec.n;
    vt.terminal_kind = terminal_kind;
    vt.instance_hash = instance_hash(spec);
    vt.layers.resize(spec.T + 2);

    auto& last = vt.layers[spec.T + 1];
    enumerate_states(spec.n, spec.T, last.states);
    last.values.resize(last.states.size());
    last.index.reserve(last.states.size());
    for (std::size_t i = 0; i < last.states.size(); ++i) last.index.emplace(last.states[i], i);
    for_each_index(last.states.size(), opts.exec,
                   [&](std::size_t i) { last.values[i] = terminal(last.states[i]); });

    for (int t = spec.T; t >= 1; --t) {
        auto& layer = vt.layers[t];
        enumerate_states(spec.n, t - 1, layer.states);
        layer.values.resize(layer.states.size());
        layer.index.reserve(layer.states.size());
        for (std::size_t i = 0; i < layer.states.size(); ++i) layer.index.emplace(layer.states[i], i);
        const auto& next = vt.layers[t + 1];
        for_each_index(layer.states.size(), opts.exec, [&](std::size_t i) {
            const auto& w = layer.states[i];
            const double stay = next.values[next.index.at(w)];
            double v = arrivals.prob(t, 0) * stay;
            std::vector<int> w2 = w;
            for (int j = 1; j <= spec.n; ++j) {
                w2[j - 1] += 1;
                const double accept = spec.revenues[j - 1] + next.values[next.index.at(w2)];
                w2[j - 1] -= 1;
                v += arrivals.prob(t, j) * std::max(accept, stay);
            }
            layer.values[i] = v;
        });
    }
    return vt;
}

bool dp_decide(const ValueTable& table, const BookingState& state, int j,
               const InstanceSpec& spec) {
    const double* stay = table.find(state.t + 1, state.w);
    std::vector<int> w2 = state.w;
    w2[j - 1] += 1;
    const double* accept = table.find(state.t + 1, w2);
    if (!stay || !accept) {
        throw std::out_of_range("dp: state missing from value table at t=" +
                                std::to_string(state.t));
    }
    return spec.revenues[j - 1] + *accept > *stay;
}

double bellman_rhs(const ValueTable& table, const ArrivalTable& arrivals,
                   const InstanceSpec& spec, int t, const std::vector<int>& w) {
    const double stay = table.value(t + 1, w);
    double v = arrivals.prob(t, 0) * stay;
    std::vector<int> w2 = w;
    for (int j = 1; j <= spec.n; ++j) {
        w2[j - 1] += 1;
        const double accept = spec.revenues[j - 1] + table.value(t + 1, w2);
        w2[j - 1] -= 1;
        v += arrivals.prob(t, j) * std::max(accept, stay);
    }
    return v;
}

DpPolicy::DpPolicy(std::shared_ptr<const ValueTable> table,
                   std::shared_ptr<const InstanceSpec> spec, std::string name)
    : table_(std::move(table)), spec_(std::move(spec)), name_(std::move(name)) {}

bool DpPolicy::decide(const BookingState& state, int j) {
    return dp_decide(*table_, state, j, *spec_);
}

std::unique_ptr<Policy> DpPolicy::clone() const {
    return std::make_unique<DpPolicy>(table_, spec_, name_);
}

bool rand_p_decide(double p, Rng& rng) { return rng.bernoulli(p); }

RandPPolicy::RandPPolicy(double p, std::uint64_t seed) : p_(p), seed_(seed), rng_(seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("rand-p: p outside [0, 1]");
}

bool RandPPolicy::decide(const BookingState&, int) { return rand_p_decide(p_, rng_); }

void RandPPolicy::begin_episode(std::uint64_t episode_seed) {
    rng_ = Rng(derive_seed(seed_, episode_seed));
}

std::string RandPPolicy::name() const {
    std::string text = std::to_string(p_);
    text.erase(text.find_last_not_of('0') + 1);
    if (!text.empty() && text.back() == '.') text.pop_back();
    return "rand-" + text;
}

std::unique_ptr<Policy> RandPPolicy::clone() const {
    return std::make_unique<RandPPolicy>(*this);
}

void save_value_table(const ValueTable& table, const std::string& path) {
    nlohmann::json j;
    j["format"] = kPolicyFormat;
    j["kind"] = "dp";
    j["terminal"] = table.terminal_kind;
    j["instance_hash"] = table.instance_hash;
    j["T"] = table.T;
    j["n"] = table.n;
    auto entries = nlohmann::json::array();
    for (int t = 1; t < static_cast<int>(table.layers.size()); ++t) {
        const auto& layer = table.layers[t];
        for (std::size_t i = 0; i < layer.states.size(); ++i) {
            entries.push_back({t, layer.states[i], layer.values[i]});
        }
    }
    j["entries"] = std::move(entries);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("policy: cannot open " + path + " for writing");
    out << j.dump() << "\n";
}

ValueTable load_value_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("policy: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != kPolicyFormat || j.value("kind", "") != "dp") {
        throw std::invalid_argument("policy: not a value-table policy file");
    }
    ValueTable table;
    table.terminal_kind = j.at("terminal").get<std::string>();
    table.instance_hash = j.at("instance_hash").get<std::uint64_t>();
    table.T = j.at("T").get<int>();
    table.n = j.at("n").get<int>();
    table.layers.resize(table.T + 2);
    for (const auto& entry : j.at("entries")) {
        const int t = entry[0].get<int>();
        auto& layer = table.layers.at(t);
        layer.states.push_back(entry[1].get<std::vector<int>>());
        layer.values.push_back(entry[2].get<double>());
    }
    table.rebuild_indices();
    return table;
}

}  // namespace bookctl
