#ifndef CRFORGE_REPORT_HPP
#define CRFORGE_REPORT_HPP

#include "crforge/manifold.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace crforge {

struct CheckRecord {
    std::string check;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    Verdict status = Verdict::Inconclusive;
    std::string verdict; // short human verdict text
    int certified_order = -1;
    nlohmann::ordered_json certificate = nlohmann::ordered_json::object();
    long millis = 0;
};

struct Report {
    std::string command;
    unsigned seed = 0;
    bool timing = false; // when false, millis is pinned to 0 for determinism
    std::vector<CheckRecord> records;

    void add(CheckRecord r) { records.push_back(std::move(r)); }

    /// 0: all affirmative; 1: some check failed; 3: inconclusive only.
    int exit_code() const;

    std::string human() const;
    std::string json_lines() const;
};

const char* verdict_name(Verdict v);

} // namespace crforge

#endif
