// Acceptance runner: one PASS/FAIL line per criterion.

#include "pbmo/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

// Runs `selftest` twice through the command-line tool and compares the bytes.
pbmo::CriterionResult reproducibility(const std::string& cli, std::uint64_t seed) {
    pbmo::CriterionResult r{10, "selftest reproducibility", false, {}, {}, 0.0, 0.0};
    const fs::path dir = fs::temp_directory_path() / ("pbmo-acceptance-" + std::to_string(seed));
    fs::create_directories(dir);
    const fs::path first = dir / "first.json", second = dir / "second.json";
    int codes[2];
    const fs::path outs[2] = {first, second};
    for (int k = 0; k < 2; ++k) {
        const std::string cmd = "\"" + cli + "\" selftest --seed " + std::to_string(seed) + " --out \"" +
                                outs[k].string() + "\" > /dev/null 2>&1";
        codes[k] = std::system(cmd.c_str());
    }
    const std::string a = pbmo::read_file(first.string());
    const std::string b = pbmo::read_file(second.string());
    r.passed = !a.empty() && a == b;
    r.summary = std::string(a == b ? "identical" : "different") + " documents (" + std::to_string(a.size()) +
                " bytes, digest " + pbmo::fnv1a64_digest(a) + ", exit codes " + std::to_string(codes[0]) + "/" +
                std::to_string(codes[1]) + ")";
    fs::remove_all(dir);
    return r;
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t seed = 1;
    std::string cli = PBMO_CLI_PATH;
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed") seed = std::stoull(argv[++i]);
        else if (arg == "--cli") cli = argv[++i];
    }

    bool all = true;
    pbmo::AcceptanceOptions options;
    options.seed = seed;
    options.on_result = [&](const pbmo::CriterionResult& r) {
        std::cout << pbmo::format_criterion(r) << std::endl;
        all = all && r.passed;
    };
    pbmo::run_acceptance(options);

    const auto start = std::chrono::steady_clock::now();
    auto r10 = reproducibility(cli, seed);
    r10.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    options.on_result(r10);

    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << std::endl;
    return all ? 0 : 1;
}
