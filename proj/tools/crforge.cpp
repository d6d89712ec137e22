// crforge: batch checker for formal generic manifolds, Segre machinery and
// reflection ideals. Reads a manifest, runs one subcommand, prints a report.
//
// Exit codes: 0 all verdicts affirmative, 1 a check failed, 2 usage or
// parse error, 3 inconclusive-only outcomes.

#include "crforge/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace crforge;

int main(int argc, char** argv) {
    CLI::App app{"crforge: exact checks for reflection ideals of formal CR mappings"};
    app.require_subcommand(1);

    std::string input, format = "human";
    std::string map, map2, manifold, target;
    int order = -1, level = -1, segre_level = -1, epsilon_bound = -1, trials = -1;
    long seed_flag = -1;
    bool timing = false;

    std::vector<CLI::App*> subs;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        if (name != "selftest") sub->add_option("--input", input, "manifest file");
        sub->add_option("--order", order, "truncation order (at most the manifest order)");
        sub->add_option("--map", map, "map name");
        sub->add_option("--map2", map2, "second map name");
        sub->add_option("--manifold", manifold, "manifold name");
        sub->add_option("--target", target, "target manifold override");
        sub->add_option("--level", level, "jet level l (K for determine)");
        sub->add_option("--segre-level", segre_level, "Segre level j");
        sub->add_option("--epsilon-bound", epsilon_bound, "epsilon bound for theta systems");
        sub->add_option("--trials", trials, "trial count for determine");
        sub->add_option("--seed", seed_flag, "RNG seed (fallback: CRFORGE_SEED)");
        sub->add_option("--format", format, "human | json-lines");
        sub->add_flag("--timing", timing, "report wall-clock milliseconds");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::string command;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) command = command_names()[i];

    CommandFlags flags;
    flags.order = order;
    flags.map = map;
    flags.map2 = map2;
    flags.manifold = manifold;
    flags.target = target;
    flags.level = level;
    flags.segre_level = segre_level;
    flags.epsilon_bound = epsilon_bound;
    flags.trials = trials;
    flags.timing = timing;
    flags.format = format;
    if (seed_flag >= 0) {
        flags.seed = static_cast<unsigned>(seed_flag);
    } else if (const char* env = std::getenv("CRFORGE_SEED")) {
        flags.seed = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }

    if (format != "human" && format != "json-lines") {
        std::cerr << "crforge: unknown format '" << format << "'\n";
        return 2;
    }

    try {
        Manifest m;
        if (command != "selftest") {
            if (input.empty()) {
                std::cerr << "crforge: " << command << " needs --input FILE\n";
                return 2;
            }
            std::ifstream in(input);
            if (!in) {
                std::cerr << "crforge: cannot open '" << input << "'\n";
                return 2;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            m = parse_manifest(buf.str());
        }
        Report rep = run_command(m, command, flags);
        std::cout << (format == "human" ? rep.human() : rep.json_lines());
        return rep.exit_code();
    } catch (const ParseError& e) {
        std::cerr << "crforge: parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "crforge: usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "crforge: error: " << e.what() << "\n";
        return 1;
    }
}
