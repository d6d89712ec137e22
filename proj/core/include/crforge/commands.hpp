#ifndef CRFORGE_COMMANDS_HPP
#define CRFORGE_COMMANDS_HPP

#include "crforge/manifest.hpp"
#include "crforge/report.hpp"

namespace crforge {

struct CommandFlags {
    int order = -1; // truncation override; must not exceed the manifest order
    std::string map, map2, manifold, target;
    int level = -1;       // jet level l (K for determine, alpha bound for holo-nondeg)
    int segre_level = -1; // j
    int epsilon_bound = -1;
    int trials = -1;
    unsigned seed = 0;
    bool timing = false;
    std::string format = "human";
};

std::vector<std::string> command_names();

/// Dispatch a CLI command against a parsed manifest.
Report run_command(const Manifest& m, const std::string& command, const CommandFlags& flags);

/// Serialize a Series as graded-lex (exponent tuple, "a/b+c/d*i") pairs.
nlohmann::ordered_json series_json(const Series& s);

} // namespace crforge

#endif
