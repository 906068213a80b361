#include "pbmo/io.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace pbmo {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ValidationError(path + ": " + message);
}

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }
std::string child(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

class Reader {
public:
    Reader(const LoadOptions& options, std::vector<std::string>& warnings) : options_(options), warnings_(warnings) {}

    const Json& object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional) {
        if (!j.is_object()) fail(path, "expected an object");
        for (const char* key : required)
            if (!j.contains(key)) fail(child(path, key), "missing required field");
        for (const auto& [key, value] : j.items()) {
            const bool known = std::any_of(required.begin(), required.end(), [&](const char* k) { return key == k; }) ||
                               std::any_of(optional.begin(), optional.end(), [&](const char* k) { return key == k; });
            if (known) continue;
            if (options_.strict) fail(child(path, key), "unknown field (pass --strict=false to ignore)");
            warnings_.push_back(child(path, key) + ": unknown field ignored");
        }
        return j;
    }

    static const Json& array(const Json& j, const std::string& path, std::optional<std::size_t> size = {}) {
        if (!j.is_array()) fail(path, "expected an array");
        if (size && j.size() != *size)
            fail(path, "expected " + std::to_string(*size) + " entries, got " + std::to_string(j.size()));
        return j;
    }

    static double number(const Json& j, const std::string& path) {
        if (!j.is_number()) fail(path, "expected a number");
        const double x = j.get<double>();
        if (!std::isfinite(x)) fail(path, "number is not finite");
        return x;
    }

    static std::size_t index(const Json& j, const std::string& path, std::size_t lo, std::size_t hi) {
        if (!j.is_number_integer()) fail(path, "expected an integer");
        if (j.is_number_unsigned() || j.get<std::int64_t>() >= 0) {
            const auto v = j.get<std::uint64_t>();
            if (v >= lo && v <= hi) return static_cast<std::size_t>(v);
        }
        fail(path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    static Vector numbers(const Json& j, const std::string& path, std::optional<std::size_t> size = {}) {
        array(j, path, size);
        Vector out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(path, i)));
        return out;
    }

private:
    const LoadOptions& options_;
    std::vector<std::string>& warnings_;
};

RewardSpec parse_reward(Reader& in, const Json& j, std::size_t S, std::size_t A) {
    const std::string path = "$.reward";
    if (!j.is_object() || !j.contains("kind")) fail(path, "expected an object with a \"kind\" field");
    const Json& kind = j["kind"];
    if (!kind.is_string()) fail(child(path, "kind"), "expected a string");
    const std::string name = kind.get<std::string>();
    const std::string vpath = child(path, "values");

    if (name == "scalar") {
        in.object(j, path, {"kind", "values"}, {});
        ScalarReward r;
        Reader::array(j["values"], vpath, S);
        for (std::size_t s = 0; s < S; ++s) r.values.push_back(Reader::numbers(j["values"][s], child(vpath, s), A));
        return r;
    }
    if (name == "vector") {
        in.object(j, path, {"kind", "dimension", "values"}, {});
        VectorReward r;
        r.dimension = Reader::index(j["dimension"], child(path, "dimension"), 1, 1'000'000);
        Reader::array(j["values"], vpath, S);
        r.values.resize(S);
        for (std::size_t s = 0; s < S; ++s) {
            Reader::array(j["values"][s], child(vpath, s), A);
            for (std::size_t a = 0; a < A; ++a)
                r.values[s].push_back(Reader::numbers(j["values"][s][a], child(child(vpath, s), a), r.dimension));
        }
        return r;
    }
    if (name == "symbolic") {
        in.object(j, path, {"kind", "labels", "values"}, {});
        SymbolicReward r;
        r.labels = Reader::index(j["labels"], child(path, "labels"), 1, 1'000'000);
        Reader::array(j["values"], vpath, S);
        r.values.resize(S);
        for (std::size_t s = 0; s < S; ++s) {
            Reader::array(j["values"][s], child(vpath, s), A);
            for (std::size_t a = 0; a < A; ++a)
                r.values[s].push_back(Reader::index(j["values"][s][a], child(child(vpath, s), a), 1, r.labels) - 1);
        }
        return r;
    }
    fail(child(path, "kind"), "expected \"scalar\", \"vector\" or \"symbolic\", got \"" + name + "\"");
}

History parse_history(Reader& in, const Json& j, const std::string& path, std::size_t S, std::size_t A) {
    in.object(j, path, {"states", "actions"}, {});
    History h;
    Reader::array(j["states"], child(path, "states"));
    Reader::array(j["actions"], child(path, "actions"));
    for (std::size_t i = 0; i < j["states"].size(); ++i)
        h.states.push_back(Reader::index(j["states"][i], child(child(path, "states"), i), 0, S - 1));
    for (std::size_t i = 0; i < j["actions"].size(); ++i)
        h.actions.push_back(Reader::index(j["actions"][i], child(child(path, "actions"), i), 0, A - 1));
    if (h.states.size() != h.actions.size() + 1)
        fail(path, "a history with k actions needs k + 1 states");
    return h;
}

PreferenceSpec parse_preference(Reader& in, const Json& j, const MdpInstance& mdp) {
    const std::string path = "$.preference";
    in.object(j, path, {}, {"ordered_rewards", "ordered_histories"});
    if (j.contains("ordered_rewards") == j.contains("ordered_histories"))
        fail(path, "exactly one of \"ordered_rewards\" or \"ordered_histories\" is required");
    if (!std::holds_alternative<SymbolicReward>(mdp.reward()))
        fail(path, "preferences apply to symbolic rewards only");
    const std::size_t d = mdp.symbolic_reward().labels;

    PreferenceSpec spec;
    if (j.contains("ordered_rewards")) {
        const std::string p = child(path, "ordered_rewards");
        const Json& list = Reader::array(j["ordered_rewards"], p, d);
        RewardOrder order;
        for (std::size_t i = 0; i < d; ++i) order.ascending.push_back(Reader::index(list[i], child(p, i), 1, d) - 1);
        try {
            validate_order(order, d);
        } catch (const ValidationError& e) {
            fail(p, e.what());
        }
        spec.ordered_rewards = std::move(order);
    } else {
        const std::string p = child(path, "ordered_histories");
        const Json& list = Reader::array(j["ordered_histories"], p, d);
        OrderedHistories ordered;
        for (std::size_t i = 0; i < d; ++i) {
            History h = parse_history(in, list[i], child(p, i), mdp.state_count(), mdp.action_count());
            try {
                validate_history(mdp, h);
            } catch (const ValidationError& e) {
                fail(child(p, i), e.what());
            }
            ordered.histories.push_back(std::move(h));
        }
        spec.ordered_histories = std::move(ordered);
    }
    return spec;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("$: malformed JSON: ") + e.what());
    }
}

void check_schema_version(const Json& doc) {
    if (doc.contains("schema_version") &&
        Reader::index(doc["schema_version"], "$.schema_version", 0, 1'000'000) != static_cast<std::size_t>(kSchemaVersion))
        fail("$.schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
}

void write_number(std::ostream& out, const Json& j) {
    if (j.is_number_integer()) {
        out << j.dump();
        return;
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        out << "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
}

void write_canonical(std::ostream& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) { // std::map keeps keys sorted
            if (!first) out << ",\n";
            first = false;
            out << pad << Json(key).dump() << ": ";
            write_canonical(out, value, indent + 2);
        }
        out << "\n" << close << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out << "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        if (flat) {
            out << "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ", ";
                write_canonical(out, j[i], indent);
            }
            out << "]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out << ",\n";
            out << pad;
            write_canonical(out, j[i], indent + 2);
        }
        out << "\n" << close << "]";
    } else if (j.is_number()) {
        write_number(out, j);
    } else {
        out << j.dump();
    }
}

} // namespace

bool PreferenceSpec::operator==(const PreferenceSpec& o) const {
    auto same_order = [](const std::optional<RewardOrder>& a, const std::optional<RewardOrder>& b) {
        return a.has_value() == b.has_value() && (!a || a->ascending == b->ascending);
    };
    auto same_histories = [](const std::optional<OrderedHistories>& a, const std::optional<OrderedHistories>& b) {
        return a.has_value() == b.has_value() && (!a || a->histories == b->histories);
    };
    return same_order(ordered_rewards, o.ordered_rewards) && same_histories(ordered_histories, o.ordered_histories);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fnv1a64_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadedInstance parse_instance(const std::string& text, const LoadOptions& options) {
    const Json doc = parse_json(text);
    std::vector<std::string> warnings;
    Reader in(options, warnings);
    in.object(doc, "$", {"schema_version", "states", "actions", "gamma", "transitions", "reward", "initial_distribution"},
              {"preference", "name", "description"});
    check_schema_version(doc);

    const std::size_t S = Reader::index(doc["states"], "$.states", 1, 10'000'000);
    const std::size_t A = Reader::index(doc["actions"], "$.actions", 1, 10'000'000);
    if (S * A > kMaxTransitionEntries / S)
        fail("$.states", "instance exceeds the transition table cap of " + std::to_string(kMaxTransitionEntries) +
                             " entries");
    const double gamma = Reader::number(doc["gamma"], "$.gamma");
    if (gamma < 0.0 || gamma >= 1.0) fail("$.gamma", "discount must lie in [0, 1)");

    std::vector<std::vector<Vector>> transitions(S, std::vector<Vector>(A, Vector(S, 0.0)));
    std::vector<std::vector<std::vector<bool>>> seen(S, std::vector<std::vector<bool>>(A, std::vector<bool>(S, false)));
    const Json& triples = Reader::array(doc["transitions"], "$.transitions");
    for (std::size_t k = 0; k < triples.size(); ++k) {
        const std::string p = child("$.transitions", k);
        const Json& t = Reader::array(triples[k], p, 4);
        const std::size_t s = Reader::index(t[0], child(p, 0), 0, S - 1);
        const std::size_t a = Reader::index(t[1], child(p, 1), 0, A - 1);
        const std::size_t next = Reader::index(t[2], child(p, 2), 0, S - 1);
        const double prob = Reader::number(t[3], child(p, 3));
        if (prob < 0.0 || prob > 1.0) fail(child(p, 3), "probability must lie in [0, 1]");
        if (seen[s][a][next]) fail(p, "duplicate entry for (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                          ", s'=" + std::to_string(next) + ")");
        seen[s][a][next] = true;
        transitions[s][a][next] = prob;
    }

    RewardSpec reward = parse_reward(in, doc["reward"], S, A);
    Vector mu = Reader::numbers(doc["initial_distribution"], "$.initial_distribution", S);

    std::optional<MdpInstance> mdp;
    try {
        mdp.emplace(S, A, std::move(transitions), gamma, std::move(reward), std::move(mu));
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        const std::string where = what.starts_with("transition")  ? "$.transitions"
                                  : what.starts_with("initial")   ? "$.initial_distribution"
                                  : what.starts_with("reward")    ? "$.reward"
                                                                  : "$";
        fail(where, what);
    }

    LoadedInstance loaded{std::move(*mdp), std::nullopt, {}, fnv1a64_digest(text)};
    if (doc.contains("preference")) loaded.preference = parse_preference(in, doc["preference"], loaded.mdp);
    loaded.warnings = std::move(warnings);
    return loaded;
}

LoadedInstance load_instance(const std::string& path, const LoadOptions& options) {
    return parse_instance(read_file(path), options);
}

Json instance_to_json(const MdpInstance& mdp, const std::optional<PreferenceSpec>& preference) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["states"] = mdp.state_count();
    doc["actions"] = mdp.action_count();
    doc["gamma"] = mdp.discount();
    Json triples = Json::array();
    for (std::size_t s = 0; s < mdp.state_count(); ++s)
        for (std::size_t a = 0; a < mdp.action_count(); ++a)
            for (std::size_t t = 0; t < mdp.state_count(); ++t)
                if (mdp.transition(s, a, t) != 0.0) triples.push_back({s, a, t, mdp.transition(s, a, t)});
    doc["transitions"] = std::move(triples);

    Json reward;
    if (auto* r = std::get_if<ScalarReward>(&mdp.reward())) {
        reward["kind"] = "scalar";
        reward["values"] = r->values;
    } else if (auto* r = std::get_if<VectorReward>(&mdp.reward())) {
        reward["kind"] = "vector";
        reward["dimension"] = r->dimension;
        reward["values"] = r->values;
    } else {
        const auto& sym = mdp.symbolic_reward();
        reward["kind"] = "symbolic";
        reward["labels"] = sym.labels;
        Json rows = Json::array();
        for (const auto& row : sym.values) {
            Json labels = Json::array();
            for (std::size_t x : row) labels.push_back(x + 1);
            rows.push_back(std::move(labels));
        }
        reward["values"] = std::move(rows);
    }
    doc["reward"] = std::move(reward);
    doc["initial_distribution"] = mdp.initial_distribution();

    if (preference) {
        Json pref;
        if (preference->ordered_rewards) {
            Json order = Json::array();
            for (std::size_t x : preference->ordered_rewards->ascending) order.push_back(x + 1);
            pref["ordered_rewards"] = std::move(order);
        }
        if (preference->ordered_histories) {
            Json list = Json::array();
            for (const auto& h : preference->ordered_histories->histories) list.push_back(to_json(h));
            pref["ordered_histories"] = std::move(list);
        }
        doc["preference"] = std::move(pref);
    }
    return doc;
}

SimulatedOracle parse_oracle(const std::string& text, const LoadOptions& options) {
    const Json doc = parse_json(text);
    std::vector<std::string> warnings;
    Reader in(options, warnings);
    in.object(doc, "$", {}, {"schema_version", "reward_values", "weights"});
    check_schema_version(doc);
    if (doc.contains("reward_values") == doc.contains("weights"))
        fail("$", "exactly one of \"reward_values\" or \"weights\" is required");
    try {
        if (doc.contains("reward_values"))
            return SimulatedOracle::from_reward_values(Reader::numbers(doc["reward_values"], "$.reward_values"));
        return SimulatedOracle::from_weights(Reader::numbers(doc["weights"], "$.weights"));
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.starts_with("$")) throw;
        fail(doc.contains("weights") ? "$.weights" : "$.reward_values", what);
    }
}

SimulatedOracle load_oracle(const std::string& path, const LoadOptions& options) {
    return parse_oracle(read_file(path), options);
}

Policy parse_policy(const std::string& text, const MdpInstance& mdp) {
    const Json doc = parse_json(text);
    std::vector<std::string> warnings;
    LoadOptions strict;
    Reader in(strict, warnings);
    in.object(doc, "$", {}, {"actions", "probabilities"});
    if (doc.contains("actions") == doc.contains("probabilities"))
        fail("$", "exactly one of \"actions\" or \"probabilities\" is required");
    Policy policy;
    if (doc.contains("actions")) {
        DeterministicPolicy p;
        const Json& list = Reader::array(doc["actions"], "$.actions", mdp.state_count());
        for (std::size_t s = 0; s < list.size(); ++s)
            p.actions.push_back(Reader::index(list[s], child("$.actions", s), 0, mdp.action_count() - 1));
        policy = std::move(p);
    } else {
        RandomizedPolicy p;
        const Json& rows = Reader::array(doc["probabilities"], "$.probabilities", mdp.state_count());
        for (std::size_t s = 0; s < rows.size(); ++s)
            p.probabilities.push_back(Reader::numbers(rows[s], child("$.probabilities", s), mdp.action_count()));
        policy = std::move(p);
    }
    try {
        validate_policy(mdp, policy);
    } catch (const ValidationError& e) {
        fail("$", e.what());
    }
    return policy;
}

Policy load_policy(const std::string& path, const MdpInstance& mdp) { return parse_policy(read_file(path), mdp); }

DeterministicPolicy parse_policy_list(const std::string& list, const MdpInstance& mdp) {
    DeterministicPolicy p;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        unsigned long long a = 0;
        try {
            a = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || a >= mdp.action_count())
            throw ValidationError("--policy: entry " + std::to_string(p.actions.size()) + " (\"" + item +
                                  "\") is not an action in [0, " + std::to_string(mdp.action_count() - 1) + "]");
        p.actions.push_back(static_cast<std::size_t>(a));
    }
    if (p.actions.size() != mdp.state_count())
        throw ValidationError("--policy: expected " + std::to_string(mdp.state_count()) + " actions, got " +
                              std::to_string(p.actions.size()));
    return p;
}

std::string canonical_dump(const Json& doc) {
    std::ostringstream out;
    write_canonical(out, doc, 0);
    out << "\n";
    return out.str();
}

void emit_result(const Json& doc, const std::string& path) {
    const std::string text = canonical_dump(doc);
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path + ": cannot open for writing");
    out << text;
}

Json to_json(const Policy& policy) {
    Json j;
    if (auto* p = std::get_if<DeterministicPolicy>(&policy)) {
        j["actions"] = p->actions;
    } else if (auto* p = std::get_if<RandomizedPolicy>(&policy)) {
        j["probabilities"] = p->probabilities;
    } else {
        const auto& m = std::get<MixedPolicy>(policy);
        Json components = Json::array();
        for (const auto& c : m.components) components.push_back(c.actions);
        j["mixed"] = {{"components", components}, {"weights", m.weights}};
    }
    return j;
}

Json to_json(const History& h) { return {{"states", h.states}, {"actions", h.actions}}; }

Json to_json(const DuelResult& d) {
    Json j{{"p", d.p}, {"q", d.q}, {"horizon", d.horizon},
           {"method", d.method == DuelMethod::Exact ? "exact" : "mc"}};
    if (d.method == DuelMethod::MonteCarlo) {
        j["samples"] = d.samples;
        j["seed"] = d.seed;
    }
    return j;
}

Json to_json(const LemmaReport& r) {
    return {{"counting_residual", r.counting_residual},
            {"decumulative_residual", r.decumulative_residual},
            {"max_residual", r.max_residual()}};
}

Json to_json(const ParetoMember& m) {
    return {{"policy_index", m.policy_index}, {"actions", m.policy.actions}, {"value", m.value}};
}

} // namespace pbmo
