#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bookctl/bench.hpp"
#include "bookctl/features.hpp"
#include "bookctl/forest.hpp"
#include "bookctl/instance.hpp"
#include "bookctl/mcts.hpp"
#include "bookctl/policies.hpp"
#include "bookctl/routing.hpp"
#include "bookctl/sarsa.hpp"
#include "bookctl/simulator.hpp"
#include "json.hpp"

namespace {

using namespace bookctl;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> parse_state(const std::string& text, int n) {
    std::vector<int> w;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) w.push_back(std::stoi(tok));
    if (static_cast<int>(w.size()) != n) {
        throw std::invalid_argument("state has " + std::to_string(w.size()) +
                                    " entries, instance has n=" + std::to_string(n));
    }
    return w;
}

struct MethodSpec {
    std::string token;
    enum class Kind { dp_exact, dp_ml, sarsa, mcts, rand_p } kind;
    double p = 0.0;          // rand-p
    int simulations = 0;     // mcts
    MctsBase base = MctsBase::random;
};

MethodSpec parse_method(const std::string& token, int default_simulations,
                        const std::string& default_base) {
    MethodSpec spec;
    spec.token = token;
    if (token == "mcts") {
        spec.kind = MethodSpec::Kind::mcts;
        spec.simulations = default_simulations;
        spec.base = default_base == "sarsa" ? MctsBase::sarsa : MctsBase::random;
        spec.token = std::string("mcts-") + (default_base == "sarsa" ? "sarsa" : "rand") + "-" +
                     std::to_string(default_simulations);
        return spec;
    }
    if (token == "dp-exact") {
        spec.kind = MethodSpec::Kind::dp_exact;
    } else if (token == "dp-ml") {
        spec.kind = MethodSpec::Kind::dp_ml;
    } else if (token == "sarsa") {
        spec.kind = MethodSpec::Kind::sarsa;
    } else if (token.rfind("rand-", 0) == 0) {
        spec.kind = MethodSpec::Kind::rand_p;
        spec.p = std::stod(token.substr(5));
    } else if (token.rfind("mcts-", 0) == 0) {
        spec.kind = MethodSpec::Kind::mcts;
        const std::string rest = token.substr(5);
        const auto dash = rest.find('-');
        if (dash == std::string::npos) throw std::invalid_argument("bad method " + token);
        const std::string base = rest.substr(0, dash);
        if (base == "rand") {
            spec.base = MctsBase::random;
        } else if (base == "sarsa") {
            spec.base = MctsBase::sarsa;
        } else {
            throw std::invalid_argument("unknown mcts base policy in " + token);
        }
        spec.simulations = std::stoi(rest.substr(dash + 1));
        if (spec.simulations < 1) throw std::invalid_argument("bad simulation count in " + token);
    } else {
        throw std::invalid_argument("unknown method " + token +
                                    " (expected dp-exact, dp-ml, sarsa, mcts-{rand|sarsa}-X or rand-P)");
    }
    return spec;
}

void check_hash(std::uint64_t artifact, std::uint64_t expected, const std::string& what) {
    if (artifact != expected) {
        throw std::runtime_error(what + " was built for a different instance (hash mismatch)");
    }
}

int run(int argc, char** argv) {
    CLI::App app{"bookctl: booking-control policies over a routing cost surrogate"};
    app.require_subcommand(1);

    // gen-instance ---------------------------------------------------------
    int family = 4;
    std::uint64_t seed = 0;
    std::string out_path, instance_path;
    auto* gen_instance = app.add_subcommand("gen-instance", "generate a standard instance");
    gen_instance->add_option("--family", family, "4, 10, 15 or 50")->required();
    gen_instance->add_option("--seed", seed, "coordinate seed")->required();
    gen_instance->add_option("--out", out_path, "instance file")->required();
    gen_instance->callback([&]() {
        const InstanceSpec spec = build_family(family, seed);
        save_instance(spec, out_path);
        std::printf("wrote %s (family=%d n=%d T=%d Q=%d hash=%llu)\n", out_path.c_str(),
                    spec.family, spec.n, spec.T, spec.Q,
                    static_cast<unsigned long long>(instance_hash(spec)));
    });

    // gen-realizations -----------------------------------------------------
    int count = 50;
    auto* gen_reals = app.add_subcommand("gen-realizations", "sample shared demand realizations");
    gen_reals->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    gen_reals->add_option("--count", count, "number of realizations");
    gen_reals->add_option("--seed", seed)->required();
    gen_reals->add_option("--out", out_path)->required();
    gen_reals->callback([&]() {
        const InstanceSpec spec = load_instance(instance_path);
        const RealizationSet set = gen_realizations(spec, count, seed);
        save_realizations(set, out_path);
        std::printf("wrote %s (count=%d T=%d events_hash=%llu)\n", out_path.c_str(), count, set.T,
                    static_cast<unsigned long long>(set.content_hash()));
    });

    // gen-data --------------------------------------------------------------
    int size = 1250;
    bool serial = false;
    auto* gen_data = app.add_subcommand("gen-data", "label terminal states for the surrogate");
    gen_data->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    gen_data->add_option("--size", size, "total rows (multiple of 10)");
    gen_data->add_option("--seed", seed)->required();
    gen_data->add_option("--out", out_path)->required();
    gen_data->add_flag("--serial", serial, "disable the parallel kernel");
    gen_data->callback([&]() {
        const InstanceSpec spec = load_instance(instance_path);
        const auto start = Clock::now();
        const Dataset data =
            generate_dataset(spec, size, seed, serial ? Exec::serial : Exec::parallel);
        const double elapsed = seconds_since(start);
        save_dataset(data, out_path);
        std::printf("wrote %s (rows=%zu train=%zu test=%zu, generation took %.2fs)\n",
                    out_path.c_str(), data.size(), data.train_indices.size(),
                    data.test_indices.size(), elapsed);
    });

    // train-rf ---------------------------------------------------------------
    std::string data_path, model_path;
    int trees = 100;
    auto* train_rf = app.add_subcommand("train-rf", "fit the routing-cost forest");
    train_rf->add_option("--data", data_path)->required()->check(CLI::ExistingFile);
    train_rf->add_option("--trees", trees);
    train_rf->add_option("--seed", seed)->required();
    train_rf->add_option("--out", out_path)->required();
    train_rf->add_flag("--serial", serial);
    train_rf->callback([&]() {
        const Dataset data = load_dataset(data_path);
        const auto start = Clock::now();
        const ForestModel model =
            train_forest(data, trees, seed, serial ? Exec::serial : Exec::parallel);
        const double elapsed = seconds_since(start);
        save_forest(model, out_path);
        const Metrics train = metrics(model, data, data.train_indices);
        std::printf("wrote %s (trees=%d, training took %.2fs, train MSE=%.2f MAE=%.2f)\n",
                    out_path.c_str(), trees, elapsed, train.mse, train.mae);
    });

    // eval-rf ----------------------------------------------------------------
    auto* eval_rf = app.add_subcommand("eval-rf", "report surrogate accuracy");
    eval_rf->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
    eval_rf->add_option("--data", data_path)->required()->check(CLI::ExistingFile);
    eval_rf->add_option("--out", out_path, "optional metrics file");
    eval_rf->add_option("--seed", seed, "unused; accepted for interface uniformity");
    eval_rf->callback([&]() {
        const Dataset data = load_dataset(data_path);
        const ForestModel model = load_forest(model_path);
        check_hash(model.instance_hash, data.instance_hash, "model");
        const Metrics train = metrics(model, data, data.train_indices);
        const Metrics test = metrics(model, data, data.test_indices);
        std::printf("train MSE=%.4f MAE=%.4f | test MSE=%.4f MAE=%.4f (train=%zu test=%zu)\n",
                    train.mse, train.mae, test.mse, test.mae, data.train_indices.size(),
                    data.test_indices.size());
        if (!out_path.empty()) {
            nlohmann::json j;
            j["format"] = "bookctl-metrics-v1";
            j["instance_hash"] = data.instance_hash;
            j["train"] = {{"mse", train.mse}, {"mae", train.mae}};
            j["test"] = {{"mse", test.mse}, {"mae", test.mae}};
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
            out << j.dump(2) << "\n";
        }
    });

    // dp-solve ----------------------------------------------------------------
    std::string terminal_kind = "exact";
    double cap = 2e7;
    auto* dp = app.add_subcommand("dp-solve", "backward induction over all reachable states");
    dp->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    dp->add_option("--terminal", terminal_kind, "exact | ml")
        ->check(CLI::IsMember({"exact", "ml"}));
    dp->add_option("--model", model_path, "surrogate (required for --terminal ml)");
    dp->add_option("--cap", cap, "state-count cap");
    dp->add_option("--out", out_path)->required();
    dp->add_option("--seed", seed, "unused; accepted for interface uniformity");
    dp->add_flag("--serial", serial);
    dp->callback([&]() {
        const auto spec = std::make_shared<const InstanceSpec>(load_instance(instance_path));
        TerminalCost terminal;
        if (terminal_kind == "exact") {
            terminal = exact_terminal(spec);
        } else {
            if (model_path.empty()) throw std::invalid_argument("--terminal ml needs --model");
            auto model = std::make_shared<const ForestModel>(load_forest(model_path));
            check_hash(model->instance_hash, instance_hash(*spec), "model");
            terminal = surrogate_terminal(model, spec);
        }
        const auto start = Clock::now();
        const ValueTable table =
            dp_solve(*spec, terminal, terminal_kind,
                     {cap, serial ? Exec::serial : Exec::parallel});
        const double elapsed = seconds_since(start);
        save_value_table(table, out_path);
        std::printf("wrote %s (states=%zu terminal=%s V1(0)=%.4f, solve took %.2fs)\n",
                    out_path.c_str(), table.state_count(), terminal_kind.c_str(),
                    table.value(1, std::vector<int>(spec->n, 0)), elapsed);
    });

    // train-sarsa ----------------------------------------------------------------
    int episodes = 25000;
    double epsilon = 0.10;
    int hidden = 0;
    double lr = 0.0;
    int eval_every = 100;
    int val_count = 50;
    auto* sarsa_cmd = app.add_subcommand("train-sarsa", "on-policy control with a Q-network");
    sarsa_cmd->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    sarsa_cmd->add_option("--model", model_path, "surrogate terminal cost")
        ->required()
        ->check(CLI::ExistingFile);
    sarsa_cmd->add_option("--episodes", episodes);
    sarsa_cmd->add_option("--epsilon", epsilon);
    sarsa_cmd->add_option("--hidden", hidden, "hidden width (default per family)");
    sarsa_cmd->add_option("--lr", lr, "learning rate (default per family)");
    sarsa_cmd->add_option("--eval-every", eval_every);
    sarsa_cmd->add_option("--val-count", val_count, "validation realizations");
    sarsa_cmd->add_option("--seed", seed)->required();
    sarsa_cmd->add_option("--out", out_path)->required();
    sarsa_cmd->callback([&]() {
        const auto spec = std::make_shared<const InstanceSpec>(load_instance(instance_path));
        auto model = std::make_shared<const ForestModel>(load_forest(model_path));
        check_hash(model->instance_hash, instance_hash(*spec), "model");
        SarsaConfig config =
            (hidden > 0 && lr > 0) ? SarsaConfig{} : default_sarsa_config(spec->family);
        config.episodes = episodes;
        config.epsilon = epsilon;
        config.eval_every = eval_every;
        config.eval_realizations = val_count;
        config.seed = seed;
        if (hidden > 0) config.hidden_dim = hidden;
        if (lr > 0) config.learning_rate = lr;
        const auto start = Clock::now();
        const SarsaArtifact artifact =
            sarsa_train(*spec, surrogate_terminal(model, spec), config);
        const double elapsed = seconds_since(start);
        save_sarsa(artifact, out_path);
        std::printf(
            "wrote %s (hidden=%d lr=%g best validation profit=%.2f at episode %d, "
            "training took %.2fs)\n",
            out_path.c_str(), config.hidden_dim, config.learning_rate, artifact.best_profit,
            artifact.best_episode, elapsed);
    });

    // route ----------------------------------------------------------------
    std::string state_text;
    bool exact = false;
    auto* route = app.add_subcommand("route", "operational cost of a terminal state");
    route->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    route->add_option("--state", state_text, "comma-separated accepted counts w1,...,wn")
        ->required();
    route->add_flag("--exact", exact, "use the exact solver (<= 8 customers)");
    route->add_option("--out", out_path, "optional solution file");
    route->add_option("--seed", seed, "unused; accepted for interface uniformity");
    route->callback([&]() {
        const InstanceSpec spec = load_instance(instance_path);
        const std::vector<int> w = parse_state(state_text, spec.n);
        const OperationalCost cost = operational_cost(w, spec);
        VrpSolution solution;
        if (cost.K > 0) {
            const RoutingProblem problem = make_routing_problem(w, spec, cost.K);
            solution = exact ? exact_cvrp(problem) : solve_cvrp(problem);
        }
        std::printf("K=%d K_used=%d z*=%.4f outsourced=%d Gamma=%.4f\n", cost.K, solution.K_used,
                    solution.cost, cost.outsourced,
                    exact ? -(solution.cost + spec.C * cost.outsourced) : cost.gamma);
        for (std::size_t r = 0; r < solution.routes.size(); ++r) {
            std::printf("route %zu: depot", r + 1);
            for (int c : solution.routes[r]) std::printf(" -> %d", c);
            std::printf(" -> depot\n");
        }
        if (!out_path.empty()) {
            nlohmann::json j;
            j["format"] = "bookctl-route-v1";
            j["instance_hash"] = instance_hash(spec);
            j["state"] = w;
            j["K"] = cost.K;
            j["K_used"] = solution.K_used;
            j["z_star"] = solution.cost;
            j["outsourced"] = cost.outsourced;
            j["gamma"] = exact ? -(solution.cost + spec.C * cost.outsourced) : cost.gamma;
            j["routes"] = solution.routes;
            std::ofstream out(out_path);
            if (!out) throw std::runtime_error("cannot open " + out_path + " for writing");
            out << j.dump(2) << "\n";
        }
    });

    // evaluate ----------------------------------------------------------------
    std::string realizations_path, methods_text, table_path, timing_path;
    std::vector<std::string> policy_args, uct_args;
    int simulations = 30;
    std::string base = "rand";
    auto* eval = app.add_subcommand("evaluate", "paired evaluation on shared realizations");
    eval->add_option("--instance", instance_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--realizations", realizations_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--methods", methods_text,
                     "comma-separated tokens: dp-exact, dp-ml, sarsa, rand-P, "
                     "mcts-{rand|sarsa}-X, or bare mcts (uses --simulations/--base)")
        ->required();
    eval->add_option("--policy", policy_args, "NAME=FILE policy artifact (repeatable)");
    eval->add_option("--model", model_path, "surrogate for the mcts methods");
    eval->add_option("--uct-c", uct_args, "C or NAME=C exploration constants (repeatable)");
    eval->add_option("--simulations", simulations, "simulation budget for a bare mcts token");
    eval->add_option("--base", base, "rollout policy for a bare mcts token")
        ->check(CLI::IsMember({"rand", "sarsa"}));
    eval->add_option("--seed", seed)->required();
    eval->add_option("--out", out_path, "results file")->required();
    eval->add_option("--table", table_path, "per-realization table")->required();
    eval->add_option("--timing-out", timing_path, "measured wall-clock split (not seed-stable)");
    eval->add_flag("--serial", serial);
    eval->callback([&]() {
        const auto spec = std::make_shared<const InstanceSpec>(load_instance(instance_path));
        const std::uint64_t expected_hash = instance_hash(*spec);
        const RealizationSet reals = load_realizations(realizations_path);

        std::map<std::string, std::string> policy_files;
        for (const auto& arg : policy_args) {
            const auto eq = arg.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--policy expects NAME=FILE");
            policy_files[arg.substr(0, eq)] = arg.substr(eq + 1);
        }
        double default_c = 1.0;
        std::map<std::string, double> uct_by_method;
        for (const auto& arg : uct_args) {
            const auto eq = arg.find('=');
            if (eq == std::string::npos) {
                default_c = std::stod(arg);
            } else {
                uct_by_method[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
            }
        }

        std::shared_ptr<const ForestModel> model;
        auto surrogate = [&]() {
            if (!model) {
                if (model_path.empty()) {
                    throw std::invalid_argument("mcts methods need --model");
                }
                model = std::make_shared<const ForestModel>(load_forest(model_path));
                check_hash(model->instance_hash, expected_hash, "model");
            }
            return surrogate_terminal(model, spec);
        };
        auto policy_file = [&](const std::string& name) {
            const auto it = policy_files.find(name);
            if (it == policy_files.end()) {
                throw std::invalid_argument("method " + name + " needs --policy " + name + "=FILE");
            }
            return it->second;
        };
        auto sarsa_policy = [&]() {
            const SarsaArtifact artifact = load_sarsa(policy_file("sarsa"));
            check_hash(artifact.instance_hash, expected_hash, "sarsa policy");
            return std::make_unique<SarsaPolicy>(artifact.net, spec);
        };

        std::vector<MethodEntry> methods;
        std::stringstream ss(methods_text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            const MethodSpec mspec = parse_method(token, simulations, base);
            MethodEntry entry;
            entry.name = mspec.token;
            const auto start = Clock::now();
            switch (mspec.kind) {
                case MethodSpec::Kind::dp_exact:
                case MethodSpec::Kind::dp_ml: {
                    auto table =
                        std::make_shared<const ValueTable>(load_value_table(policy_file(token)));
                    check_hash(table->instance_hash, expected_hash, token + " policy");
                    const std::string want =
                        mspec.kind == MethodSpec::Kind::dp_exact ? "exact" : "ml";
                    if (table->terminal_kind != want) {
                        throw std::runtime_error(token + " policy file has terminal=" +
                                                 table->terminal_kind);
                    }
                    entry.config = "terminal=" + want;
                    entry.policy = std::make_unique<DpPolicy>(table, spec, token);
                    break;
                }
                case MethodSpec::Kind::sarsa: {
                    entry.policy = sarsa_policy();
                    entry.config = "greedy";
                    break;
                }
                case MethodSpec::Kind::rand_p: {
                    entry.policy = std::make_unique<RandPPolicy>(mspec.p, seed);
                    entry.config = "p=" + std::to_string(mspec.p);
                    break;
                }
                case MethodSpec::Kind::mcts: {
                    MctsConfig config;
                    config.simulations = mspec.simulations;
                    config.base = mspec.base;
                    auto it = uct_by_method.find(mspec.token);
                    if (it == uct_by_method.end()) it = uct_by_method.find(token);
                    config.exploration = it == uct_by_method.end() ? default_c : it->second;
                    std::unique_ptr<Policy> base;
                    if (mspec.base == MctsBase::sarsa) base = sarsa_policy();
                    entry.policy = std::make_unique<MctsPolicy>(config, spec, surrogate(),
                                                                std::move(base), seed);
                    entry.config = "simulations=" + std::to_string(config.simulations) +
                                   " c=" + std::to_string(config.exploration);
                    break;
                }
            }
            entry.offline_seconds = seconds_since(start);
            methods.push_back(std::move(entry));
        }

        const EvalReport report =
            evaluate(*spec, methods, reals, {seed, serial ? Exec::serial : Exec::parallel});
        export_report(report, out_path, table_path);
        if (!timing_path.empty()) export_timing(report, timing_path);
        std::fputs(format_summary(report).c_str(), stdout);
        std::printf("wrote %s and %s (%d realizations, events_hash=%llu)\n", out_path.c_str(),
                    table_path.c_str(), report.realization_count,
                    static_cast<unsigned long long>(report.events_hash));
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bookctl: %s\n", e.what());
        return 1;
    }
}
