#include "bookctl/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bookctl/hash.hpp"
#include "bookctl/rng.hpp"
#include "json.hpp"

namespace bookctl {

namespace {

constexpr const char* kInstanceFormat = "bookctl-instance-v1";

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument("instance: " + message);
}

}  // namespace

double InstanceSpec::lambda(int j, int t) const {
    if (j == 0) return lambda0;
    return lambda_init[j - 1] + static_cast<double>(t - 1) * lambda_drift[j - 1];
}

double InstanceSpec::raw_row_sum(int t) const {
    double sum = lambda0;
    for (int j = 1; j <= n; ++j) sum += lambda(j, t);
    return sum;
}

void InstanceSpec::validate() const {
    require(n >= 1, "n must be >= 1");
    require(T >= 1, "T must be >= 1");
    require(K0 >= 1, "K0 must be >= 1");
    require(Q >= 1, "Q must be >= 1");
    require(C > 0.0, "C must be > 0");
    require(LF > 0.0, "LF must be > 0");
    require(lambda0 > 0.0 && lambda0 < 1.0, "lambda0 must be in (0,1)");
    require(static_cast<int>(revenues.size()) == n, "revenues size mismatch");
    require(static_cast<int>(lambda_init.size()) == n, "lambda_init size mismatch");
    require(static_cast<int>(lambda_drift.size()) == n, "lambda_drift size mismatch");
    require(static_cast<int>(coords.size()) == n, "coords size mismatch");
    for (int j = 1; j <= n; ++j) {
        require(revenues[j - 1] > 0.0, "revenues must be entrywise > 0");
        require(lambda_init[j - 1] > 0.0, "lambda_init must be entrywise > 0");
        for (int t = 1; t <= T; ++t) {
            require(lambda(j, t) >= 0.0, "lambda_j^t must stay >= 0 over the horizon");
        }
    }
    require(Q == derive_capacity(*this), "Q must equal the load-factor capacity formula");
}

int derive_capacity(const InstanceSpec& spec) {
    double total = 0.0;
    for (int t = 1; t <= spec.T; ++t) total += spec.raw_row_sum(t);
    // The ratio is a quotient of short decimal sums; the epsilon keeps an
    // exact quotient like 22/2.2 from flooring one below its true value.
    const int capacity = static_cast<int>(std::floor(total / (spec.K0 * spec.LF) + 1e-9));
    if (capacity < 1) {
        throw std::invalid_argument("instance: derived capacity is < 1");
    }
    return capacity;
}

InstanceSpec build_family(int family, std::uint64_t seed) {
    InstanceSpec spec;
    spec.family = family;
    spec.seed = seed;
    spec.lambda0 = 0.10;
    double side = 10.0;

    auto fill = [&spec](int from, int to, double revenue, double init, double drift) {
        for (int j = from; j <= to; ++j) {
            spec.revenues[j - 1] = revenue;
            spec.lambda_init[j - 1] = init;
            spec.lambda_drift[j - 1] = drift;
        }
    };

    switch (family) {
        case 4:
            spec.n = 4;
            spec.T = 20;
            spec.K0 = 2;
            spec.C = 100.0;
            spec.LF = 1.1;
            spec.revenues = {4.0, 8.0, 12.0, 16.0};
            spec.lambda_init = {0.45, 0.40, 0.10, 0.05};
            spec.lambda_drift = {-0.01, -0.01, 0.01, 0.01};
            break;
        case 10:
            spec.n = 10;
            spec.T = 30;
            spec.K0 = 4;
            spec.C = 100.0;
            spec.LF = 1.2;
            spec.revenues.resize(10);
            spec.lambda_init.resize(10);
            spec.lambda_drift.resize(10);
            fill(1, 4, 10.0, 0.125, -0.001);
            fill(5, 8, 12.0, 0.075, 0.0);
            fill(9, 10, 20.0, 0.05, 0.002);
            break;
        case 15:
            spec.n = 15;
            spec.T = 50;
            spec.K0 = 4;
            spec.C = 250.0;
            spec.LF = 1.2;
            spec.revenues.resize(15);
            spec.lambda_init.resize(15);
            spec.lambda_drift.resize(15);
            fill(1, 5, 10.0, 0.10, -0.001);
            fill(6, 10, 12.0, 0.06, 0.0);
            fill(11, 15, 20.0, 0.02, 0.001);
            break;
        case 50:
            spec.n = 50;
            spec.T = 100;
            spec.K0 = 4;
            spec.C = 600.0;
            spec.LF = 1.3;
            side = 50.0;
            spec.revenues.resize(50);
            spec.lambda_init.resize(50);
            spec.lambda_drift.resize(50);
            fill(1, 30, 15.0, 0.0166, -0.0001);
            fill(31, 40, 22.0, 0.03, 0.0);
            fill(41, 50, 30.0, 0.01, 0.0003);
            break;
        default:
            throw std::invalid_argument("instance: unknown family " + std::to_string(family) +
                                        " (expected 4, 10, 15 or 50)");
    }

    Rng rng(seed);
    spec.coords.resize(spec.n);
    for (int j = 0; j < spec.n; ++j) {
        spec.coords[j].x = rng.uniform() * side;
        spec.coords[j].y = rng.uniform() * side;
    }
    // The depot position is not part of the family definition; it is sampled
    // in the same square and recorded in the instance file.
    spec.depot.x = rng.uniform() * side;
    spec.depot.y = rng.uniform() * side;

    spec.Q = derive_capacity(spec);
    spec.validate();
    return spec;
}

ArrivalTable arrival_table(const InstanceSpec& spec) {
    ArrivalTable table;
    table.T = spec.T;
    table.n = spec.n;
    table.probs.resize(static_cast<std::size_t>(spec.T) * (spec.n + 1));
    for (int t = 1; t <= spec.T; ++t) {
        double sum = 0.0;
        for (int j = 0; j <= spec.n; ++j) {
            const double value = spec.lambda(j, t);
            if (value < 0.0) {
                throw std::invalid_argument("instance: negative lambda at t=" + std::to_string(t));
            }
            sum += value;
        }
        for (int j = 0; j <= spec.n; ++j) {
            table.probs[static_cast<std::size_t>(t - 1) * (spec.n + 1) + j] = spec.lambda(j, t) / sum;
        }
    }
    return table;
}

std::string instance_to_json(const InstanceSpec& spec) {
    nlohmann::json j;
    j["format"] = kInstanceFormat;
    j["family"] = spec.family;
    j["seed"] = spec.seed;
    j["n"] = spec.n;
    j["T"] = spec.T;
    j["K0"] = spec.K0;
    j["C"] = spec.C;
    j["LF"] = spec.LF;
    j["Q"] = spec.Q;
    j["lambda0"] = spec.lambda0;
    j["revenues"] = spec.revenues;
    j["lambda_init"] = spec.lambda_init;
    j["lambda_drift"] = spec.lambda_drift;
    j["depot"] = {spec.depot.x, spec.depot.y};
    auto coords = nlohmann::json::array();
    for (const auto& p : spec.coords) coords.push_back({p.x, p.y});
    j["coords"] = coords;
    return j.dump(2) + "\n";
}

InstanceSpec instance_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format", "") != kInstanceFormat) {
        throw std::invalid_argument("instance: unsupported format tag");
    }
    InstanceSpec spec;
    spec.family = j.at("family").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.n = j.at("n").get<int>();
    spec.T = j.at("T").get<int>();
    spec.K0 = j.at("K0").get<int>();
    spec.C = j.at("C").get<double>();
    spec.LF = j.at("LF").get<double>();
    spec.Q = j.at("Q").get<int>();
    spec.lambda0 = j.at("lambda0").get<double>();
    spec.revenues = j.at("revenues").get<std::vector<double>>();
    spec.lambda_init = j.at("lambda_init").get<std::vector<double>>();
    spec.lambda_drift = j.at("lambda_drift").get<std::vector<double>>();
    spec.depot.x = j.at("depot")[0].get<double>();
    spec.depot.y = j.at("depot")[1].get<double>();
    for (const auto& c : j.at("coords")) {
        spec.coords.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    spec.validate();
    return spec;
}

void save_instance(const InstanceSpec& spec, const std::string& path) {
    spec.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("instance: cannot open " + path + " for writing");
    out << instance_to_json(spec);
}

InstanceSpec load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("instance: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return instance_from_json(buffer.str());
}

std::uint64_t instance_hash(const InstanceSpec& spec) {
    return fnv1a64(instance_to_json(spec));
}

}  // namespace bookctl
