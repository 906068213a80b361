// Command-line front end. Every command loads its inputs, runs one library
// operation and emits a canonical JSON result document.

#include "pbmo/acceptance.hpp"
#include "pbmo/error.hpp"
#include "pbmo/io.hpp"
#include "pbmo/regret.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace pbmo;

namespace {

struct Globals {
    double tol = kDefaultTolerance;
    std::uint64_t seed = 1;
    std::size_t cap = kDefaultPolicyCap;
    std::size_t history_cap = kDefaultHistoryCap;
    std::string out;
    bool strict = true;
    bool wall_time = false;
};

struct Inputs {
    std::string instance;
    std::string policy;
    std::string policy_file;
    std::string first;
    std::string second;
    std::string policies;
    std::string preference = "auto";
    std::string weights;
    std::string method = "exact";
    std::string mode = "ordered-rewards";
    std::string order;
    std::string oracle;
    std::string only;
    std::string instance_out;
    std::size_t horizon = 0;
    std::size_t samples = 10'000;
    std::size_t trials = 100;
    std::size_t max_queries = 1000;
    int lemma = 1;
    double epsilon = 0.1;
    long start = -1;
    unsigned threads = 1;
};

Vector parse_numbers(const std::string& list, const std::string& flag) {
    Vector out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(flag + ": \"" + item + "\" is not a number");
        }
    }
    return out;
}

class Command {
public:
    Command(std::string name, const Globals& g, const Inputs& in) : name_(std::move(name)), g_(g), in_(in) {}

    LoadedInstance& load() {
        if (!loaded_) {
            if (in_.instance.empty()) throw ValidationError("an instance file is required");
            loaded_.emplace(load_instance(in_.instance, {g_.strict}));
            for (const auto& w : loaded_->warnings) std::cerr << "warning: " << w << "\n";
        }
        return *loaded_;
    }

    /// Symbolic instances become vector instances through their preference block.
    MdpInstance vector_instance() {
        const LoadedInstance& li = load();
        if (!std::holds_alternative<SymbolicReward>(li.mdp.reward())) {
            li.mdp.vector_reward();
            return li.mdp;
        }
        if (!li.preference)
            throw ValidationError("$.preference: a symbolic instance needs ordered_rewards or ordered_histories");
        if (li.preference->ordered_rewards) return ordered_reward_transform(li.mdp, *li.preference->ordered_rewards);
        return ordered_history_transform(li.mdp, *li.preference->ordered_histories);
    }

    Policy policy_from(const std::string& list, const std::string& file, const MdpInstance& mdp) {
        if (!file.empty()) return load_policy(file, mdp);
        if (list.empty()) throw ValidationError("a policy is required (--policy or --policy-file)");
        return parse_policy_list(list, mdp);
    }

    std::vector<Policy> policy_set(const MdpInstance& mdp) {
        std::vector<Policy> out;
        if (in_.policies.empty()) {
            for (auto& p : enumerate_deterministic_policies(mdp, g_.cap)) out.emplace_back(std::move(p));
            return out;
        }
        std::stringstream ss(in_.policies);
        std::string item;
        while (std::getline(ss, item, ';')) out.emplace_back(parse_policy_list(item, mdp));
        return out;
    }

    HistoryPreference preference(const MdpInstance& mdp) {
        const std::string& p = in_.preference;
        if (p == "utility" || (p == "auto" && std::holds_alternative<ScalarReward>(mdp.reward())))
            return utility_preference(mdp);
        if (p == "pareto" || p == "auto") return pareto_preference(mdp);
        if (p == "pareto-both") return pareto_preference(mdp, IncomparableCounting::Both);
        if (p == "linear") {
            if (in_.weights.empty()) throw ValidationError("--preference linear needs --weights");
            return scalarized_preference(mdp, ScalarizingFunction::linear(parse_numbers(in_.weights, "--weights")));
        }
        throw ValidationError("--preference: unknown value \"" + p + "\"");
    }

    /// Instance used for duels: scalar as is, others as vector instances.
    MdpInstance duel_instance() {
        const auto& mdp = load().mdp;
        if (std::holds_alternative<ScalarReward>(mdp.reward())) return mdp;
        return vector_instance();
    }

    DuelOptions duel_options(const MdpInstance& mdp) const {
        DuelOptions o;
        o.horizon = in_.horizon;
        o.cap = g_.history_cap;
        if (in_.start >= 0) {
            if (static_cast<std::size_t>(in_.start) >= mdp.state_count())
                throw ValidationError("--start: state out of range");
            o.start = static_cast<std::size_t>(in_.start);
        }
        return o;
    }

    DuelMethod duel_method() const {
        if (in_.method == "exact") return DuelMethod::Exact;
        if (in_.method == "mc") return DuelMethod::MonteCarlo;
        throw ValidationError("--method must be exact or mc");
    }

    Tournament tournament(const MdpInstance& mdp, const std::vector<Policy>& policies) {
        TournamentOptions o;
        o.method = duel_method();
        o.samples = in_.samples;
        o.seed = g_.seed;
        o.duel = duel_options(mdp);
        o.threads = in_.threads;
        return build_tournament(mdp, policies, preference(mdp), o);
    }

    Json document(Json parameters, Json outputs) {
        Json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = {{"name", name_}, {"parameters", std::move(parameters)}};
        doc["seed"] = g_.seed;
        doc["tolerances"] = {{"tol", g_.tol}, {"cap", g_.cap}, {"history_cap", g_.history_cap}};
        doc["input_digest"] = loaded_ ? Json(loaded_->digest) : Json(nullptr);
        doc["outputs"] = std::move(outputs);
        if (loaded_ && !loaded_->warnings.empty()) doc["warnings"] = loaded_->warnings;
        return doc;
    }

private:
    std::string name_;
    const Globals& g_;
    const Inputs& in_;
    std::optional<LoadedInstance> loaded_;
};

Json tournament_json(const Tournament& t) {
    Json p = Json::array(), q = Json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        Vector pr, qr;
        for (std::size_t j = 0; j < t.size(); ++j) {
            pr.push_back(t.at(i, j).p);
            qr.push_back(t.at(i, j).q);
        }
        p.push_back(pr);
        q.push_back(qr);
    }
    Json cycles = Json::array();
    for (const auto& c : detect_cycles(t)) cycles.push_back(c);
    return {{"p", p}, {"q", q}, {"cycles", cycles}};
}

Json policies_json(const std::vector<Policy>& policies) {
    Json out = Json::array();
    for (const auto& p : policies) out.push_back(to_json(p));
    return out;
}

Json run(const std::string& name, const Globals& g, const Inputs& in) {
    Command cmd(name, g, in);
    const Json instance_param = in.instance.empty() ? Json(nullptr) : Json(std::filesystem::path(in.instance).filename().string());

    if (name == "solve") {
        const auto& mdp = cmd.load().mdp;
        const auto vi = value_iteration(mdp, g.tol);
        return cmd.document({{"instance", instance_param}},
                            {{"values", vi.values},
                             {"value", aggregate(mdp, vi.values)},
                             {"policy", vi.policy.actions},
                             {"iterations", vi.iterations}});
    }
    if (name == "evaluate") {
        const auto& raw = cmd.load().mdp;
        const MdpInstance mdp = std::holds_alternative<ScalarReward>(raw.reward()) ? raw : cmd.vector_instance();
        const Policy policy = cmd.policy_from(in.policy, in.policy_file, mdp);
        Json outputs{{"policy", to_json(policy)}};
        if (std::holds_alternative<ScalarReward>(mdp.reward())) {
            const Vector v = evaluate_policy(mdp, policy, g.tol);
            outputs["values"] = v;
            outputs["value"] = aggregate(mdp, v);
        } else {
            const auto v = vector_evaluate(mdp, policy, g.tol);
            outputs["values"] = v.values;
            outputs["value"] = aggregate(mdp, v.values);
        }
        return cmd.document({{"instance", instance_param}}, outputs);
    }
    if (name == "frontier" || name == "cover") {
        const MdpInstance mdp = cmd.vector_instance();
        const ParetoSet frontier = pareto_frontier(mdp, g.cap, g.tol);
        Json members = Json::array();
        std::vector<Vector> points;
        for (const auto& m : frontier.members) {
            members.push_back(to_json(m));
            points.push_back(m.value);
        }
        Json outputs{{"frontier", members}, {"frontier_size", members.size()}};
        Json params{{"instance", instance_param}};
        if (name == "cover") {
            params["epsilon"] = in.epsilon;
            auto idx = epsilon_cover(points, in.epsilon);
            std::sort(idx.begin(), idx.end());
            Json cover = Json::array();
            std::vector<Vector> chosen;
            for (std::size_t k : idx) {
                cover.push_back(members[k]);
                chosen.push_back(points[k]);
            }
            outputs["cover"] = cover;
            outputs["cover_size"] = idx.size();
            outputs["verified"] = verify_cover(chosen, points, in.epsilon);
        }
        return cmd.document(params, outputs);
    }
    if (name == "duel") {
        const MdpInstance mdp = cmd.duel_instance();
        const Policy a = cmd.policy_from(in.first, {}, mdp);
        const Policy b = cmd.policy_from(in.second, {}, mdp);
        const HistoryPreference pref = cmd.preference(mdp);
        const DuelOptions options = cmd.duel_options(mdp);
        const DuelResult d = cmd.duel_method() == DuelMethod::Exact
                                 ? duel_exact(mdp, a, b, pref, options)
                                 : duel_monte_carlo(mdp, a, b, pref, in.samples, g.seed, options);
        const Dominance dom = probabilistic_dominance(d);
        Json params{{"instance", instance_param}, {"method", in.method}, {"horizon", in.horizon},
                    {"preference", to_string(pref.provenance)}};
        if (options.start) params["start"] = *options.start;
        if (d.method == DuelMethod::MonteCarlo) params["samples"] = in.samples;
        return cmd.document(params, {{"first", to_json(a)},
                                     {"second", to_json(b)},
                                     {"duel", to_json(d)},
                                     {"dominance", dom == Dominance::First    ? "first"
                                                   : dom == Dominance::Second ? "second"
                                                                              : "tie"}});
    }
    if (name == "tournament" || name == "condorcet" || name == "copeland" || name == "borda" || name == "mixed") {
        const MdpInstance mdp = cmd.duel_instance();
        const auto policies = cmd.policy_set(mdp);
        const Tournament t = cmd.tournament(mdp, policies);
        Json params{{"instance", instance_param}, {"method", in.method}, {"horizon", in.horizon},
                    {"preference", in.preference}};
        if (in.start >= 0) params["start"] = in.start;
        if (in.method == "mc") params["samples"] = in.samples;
        Json outputs{{"policies", policies_json(policies)}};
        if (name == "tournament") {
            outputs["tournament"] = tournament_json(t);
        } else if (name == "condorcet") {
            const auto w = condorcet_winner(t);
            outputs["winner"] = w ? Json(*w) : Json(nullptr);
            Json cycles = Json::array();
            for (const auto& c : detect_cycles(t)) cycles.push_back(c);
            outputs["cycles"] = cycles;
        } else if (name == "copeland") {
            outputs["scores"] = copeland_scores(t);
            outputs["winner"] = copeland_winner(t);
        } else if (name == "borda") {
            outputs["scores"] = borda_scores(t);
            outputs["winner"] = borda_winner(t);
        } else {
            const MixedStrategy m = optimal_mixed_policy(t);
            outputs["weights"] = m.weights;
            outputs["game_value"] = m.value;
        }
        return cmd.document(params, outputs);
    }
    if (name == "transform") {
        const LoadedInstance& li = cmd.load();
        Json outputs;
        MdpInstance result = li.mdp;
        if (in.mode == "ordered-rewards") {
            RewardOrder order;
            if (!in.order.empty()) {
                for (double x : parse_numbers(in.order, "--order")) {
                    if (x < 1 || x != std::floor(x)) throw ValidationError("--order: labels are 1-based integers");
                    order.ascending.push_back(static_cast<std::size_t>(x) - 1);
                }
            } else if (li.preference && li.preference->ordered_rewards) {
                order = *li.preference->ordered_rewards;
            } else {
                throw ValidationError("ordered-rewards needs --order or $.preference.ordered_rewards");
            }
            result = ordered_reward_transform(li.mdp, order);
        } else if (in.mode == "ordered-histories") {
            if (!li.preference || !li.preference->ordered_histories)
                throw ValidationError("ordered-histories needs $.preference.ordered_histories");
            const BasisMatrix basis = history_basis_matrix(li.mdp, *li.preference->ordered_histories);
            Json h = Json::array(), hinv = Json::array();
            for (std::size_t i = 0; i < basis.h.rows(); ++i) {
                Vector r1, r2;
                for (std::size_t j = 0; j < basis.h.cols(); ++j) {
                    r1.push_back(basis.h(i, j));
                    r2.push_back(basis.h_inv(i, j));
                }
                h.push_back(r1);
                hinv.push_back(r2);
            }
            outputs["basis"] = {{"h", h}, {"h_inverse", hinv}, {"condition", basis.condition}};
            result = ordered_history_transform(li.mdp, basis);
        } else {
            throw ValidationError("--mode must be ordered-rewards or ordered-histories");
        }
        outputs["instance"] = instance_to_json(result);
        if (!in.instance_out.empty()) emit_result(outputs["instance"], in.instance_out);
        return cmd.document({{"instance", instance_param}, {"mode", in.mode}}, outputs);
    }
    if (name == "verify") {
        const CriterionResult r = run_lemma_trials(in.lemma, in.trials, g.seed);
        return cmd.document({{"lemma", in.lemma}, {"trials", in.trials}},
                            {{"passed", r.passed}, {"summary", r.summary}, {"metrics", r.metrics}});
    }
    if (name == "chebyshev") {
        const MdpInstance mdp = cmd.vector_instance();
        const ChebyshevSolution c = chebyshev_optimal(mdp, std::min(g.tol, 1e-11));
        return cmd.document({{"instance", instance_param}},
                            {{"regret", c.regret},
                             {"ideal", c.ideal.point},
                             {"value", c.value},
                             {"active", c.active},
                             {"policy", to_json(c.policy)},
                             {"occupancy", c.occupancy.values},
                             {"flow_residual", flow_residual(mdp, c.occupancy)}});
    }
    if (name == "regret") {
        const MdpInstance mdp = cmd.vector_instance();
        const MinimaxRegretResult r = minimax_regret(mdp, std::min(g.tol, 1e-11), g.cap, true);
        return cmd.document({{"instance", instance_param}},
                            {{"regret", r.value},
                             {"chebyshev_regret", r.solution.regret},
                             {"ideal", r.solution.ideal.point},
                             {"policy", to_json(r.solution.policy)},
                             {"hypercube_regret", r.hypercube_value ? Json(*r.hypercube_value) : Json(nullptr)}});
    }
    if (name == "elicit") {
        const MdpInstance mdp = cmd.vector_instance();
        if (in.oracle.empty()) throw ValidationError("--oracle is required");
        const SimulatedOracle oracle = load_oracle(in.oracle, {g.strict});
        ElicitationOptions options;
        options.epsilon = in.epsilon;
        options.max_queries = in.max_queries;
        options.cap = g.cap;
        const ElicitationResult r = elicit_loop(mdp, oracle, options);
        Json rounds = Json::array();
        for (const auto& round : r.rounds)
            rounds.push_back({{"first", round.query.first},
                              {"second", round.query.second},
                              {"answer", round.answer == Answer::First ? "first" : "second"},
                              {"disagreement", round.disagreement},
                              {"remaining", round.remaining},
                              {"feasibly_best", round.feasibly_best}});
        Json candidates = Json::array();
        for (const auto& c : r.candidates) candidates.push_back(to_json(c));
        return cmd.document({{"instance", instance_param},
                             {"oracle", std::filesystem::path(in.oracle).filename().string()},
                             {"epsilon", in.epsilon},
                             {"max_queries", in.max_queries}},
                            {{"candidates", candidates},
                             {"rounds", rounds},
                             {"queries", r.rounds.size()},
                             {"converged", r.converged},
                             {"recommended", r.recommended},
                             {"recommended_policy", r.candidates[r.recommended].policy.actions},
                             {"center_weights", r.center},
                             {"cuts", r.polytope.cuts()}});
    }
    throw ValidationError("unknown command " + name);
}

} // namespace

int main(int argc, char** argv) {
    Globals g;
    Inputs in;
    CLI::App app{"Multiobjective and preference-based MDP toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol", g.tol, "Convergence tolerance for iterative solvers")->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--cap", g.cap, "Maximum number of enumerated deterministic policies")->capture_default_str();
    app.add_option("--history-cap", g.history_cap, "Maximum number of expanded history paths")->capture_default_str();
    app.add_option("--out", g.out, "Write the result document here instead of stdout");
    app.add_flag("--strict", g.strict, "Reject unknown fields (--strict=false only warns)")->capture_default_str();
    app.add_flag("--wall-time", g.wall_time, "Add elapsed seconds to the document (breaks byte stability)");

    auto instance_cmd = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("instance", in.instance, "Instance document")->required();
        return sub;
    };
    auto duel_flags = [&](CLI::App* sub) {
        sub->add_option("--horizon", in.horizon, "History length (0 = truncation horizon)")->capture_default_str();
        sub->add_option("--method", in.method, "exact or mc")->capture_default_str();
        sub->add_option("--n,--samples", in.samples, "Monte Carlo samples")->capture_default_str();
        sub->add_option("--start", in.start, "Start every history in this state instead of the initial distribution");
        sub->add_option("--preference", in.preference, "auto, utility, pareto, pareto-both or linear")
            ->capture_default_str();
        sub->add_option("--weights", in.weights, "Comma-separated weights for --preference linear");
    };

    instance_cmd("solve", "Value iteration on a scalar instance");
    auto* evaluate = instance_cmd("evaluate", "Evaluate one policy");
    evaluate->add_option("--policy", in.policy, "Comma-separated actions, one per state");
    evaluate->add_option("--policy-file", in.policy_file, "Policy document");
    instance_cmd("frontier", "Pareto frontier of deterministic policies");
    auto* cover = instance_cmd("cover", "Epsilon-cover of the Pareto frontier");
    cover->add_option("--epsilon", in.epsilon)->capture_default_str();
    auto* duel = instance_cmd("duel", "Probabilistic dominance between two policies");
    duel->add_option("--first", in.first, "First policy (comma-separated actions)")->required();
    duel->add_option("--second", in.second, "Second policy (comma-separated actions)")->required();
    duel_flags(duel);
    for (const char* name : {"tournament", "condorcet", "copeland", "borda", "mixed"}) {
        auto* sub = instance_cmd(name, std::string("Pairwise duels: ") + name);
        sub->add_option("--policies", in.policies, "Policies separated by ';' (default: all deterministic)");
        sub->add_option("--threads", in.threads, "Worker threads for the duels")->capture_default_str();
        duel_flags(sub);
    }
    auto* transform = instance_cmd("transform", "Symbolic to vector reward");
    transform->add_option("--mode", in.mode, "ordered-rewards or ordered-histories")->capture_default_str();
    transform->add_option("--order", in.order, "1-based labels from smallest to largest");
    transform->add_option("--instance-out", in.instance_out, "Also write the transformed instance here");
    auto* verify = app.add_subcommand("verify", "Random-instance identity checks");
    verify->add_option("--lemma", in.lemma, "1, 2 or 3")->capture_default_str();
    verify->add_option("--trials", in.trials)->capture_default_str();
    instance_cmd("chebyshev", "Chebyshev-optimal policy through the occupancy LP");
    instance_cmd("regret", "Minimax-regret policy over the weight simplex");
    auto* elicit = instance_cmd("elicit", "Simulated elicitation over an epsilon-cover");
    elicit->add_option("--oracle", in.oracle, "Oracle document with the hidden values")->required();
    elicit->add_option("--epsilon", in.epsilon)->capture_default_str();
    elicit->add_option("--max-queries", in.max_queries)->capture_default_str();
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
    selftest->add_option("--only", in.only, "Comma-separated criterion ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code(ErrorKind::Validation);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        Json doc;
        int status = 0;
        if (name == "selftest") {
            AcceptanceOptions options;
            options.seed = g.seed;
            for (double id : parse_numbers(in.only, "--only")) options.only.push_back(static_cast<int>(id));
            options.on_result = [](const CriterionResult& r) { std::cerr << format_criterion(r) << "\n"; };
            const auto results = run_acceptance(options);
            doc = acceptance_document(results, g.seed, g.wall_time);
            doc["command"] = {{"name", name}, {"parameters", {{"only", in.only}}}};
            doc["schema_version"] = kSchemaVersion;
            status = doc["passed"].get<bool>() ? 0 : 1;
        } else {
            doc = run(name, g, in);
        }
        if (g.wall_time)
            doc["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit_result(doc, g.out);
        return status;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::Numerical);
    }
}
