#pragma once

// JSON instance documents and byte-stable result documents.

#include "pbmo/elicitation.hpp"
#include "pbmo/pbmdp.hpp"
#include "pbmo/transforms.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace pbmo {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Largest states * actions * states accepted from a document.
inline constexpr std::size_t kMaxTransitionEntries = 50'000'000;

struct PreferenceSpec {
    std::optional<RewardOrder> ordered_rewards;      ///< zero-based in memory, one-based in files
    std::optional<OrderedHistories> ordered_histories;
    bool operator==(const PreferenceSpec&) const;
};

struct LoadOptions {
    bool strict = true; ///< unknown fields are errors; otherwise warnings
};

struct LoadedInstance {
    MdpInstance mdp;
    std::optional<PreferenceSpec> preference;
    std::vector<std::string> warnings;
    std::string digest; ///< of the raw document bytes
};

LoadedInstance parse_instance(const std::string& text, const LoadOptions& options = {});
LoadedInstance load_instance(const std::string& path, const LoadOptions& options = {});

Json instance_to_json(const MdpInstance& mdp, const std::optional<PreferenceSpec>& preference = std::nullopt);

/// Oracle document: {"schema_version": 1, "reward_values": [...]} or {"weights": [...]}.
SimulatedOracle parse_oracle(const std::string& text, const LoadOptions& options = {});
SimulatedOracle load_oracle(const std::string& path, const LoadOptions& options = {});

/// Policy document: {"actions": [...]} or {"probabilities": [[...], ...]}.
Policy parse_policy(const std::string& text, const MdpInstance& mdp);
Policy load_policy(const std::string& path, const MdpInstance& mdp);

/// "0,1,2" -> deterministic policy.
DeterministicPolicy parse_policy_list(const std::string& list, const MdpInstance& mdp);

/// Sorted keys, two-space indent, floats with 17 significant digits,
/// trailing newline.
std::string canonical_dump(const Json& doc);

/// Writes to `path`, or stdout when it is empty or "-".
void emit_result(const Json& doc, const std::string& path);

std::string read_file(const std::string& path);
std::string fnv1a64_digest(std::string_view bytes);

Json to_json(const Policy& policy);
Json to_json(const History& h);
Json to_json(const DuelResult& d);
Json to_json(const LemmaReport& r);
Json to_json(const ParetoMember& m);

} // namespace pbmo
