#include "crforge/report.hpp"

#include <sstream>

namespace crforge {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Affirmative: return "pass";
    case Verdict::Negative: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

int Report::exit_code() const {
    bool any_fail = false, any_inconclusive = false, any_pass = false;
    for (const auto& r : records) {
        switch (r.status) {
        case Verdict::Negative: any_fail = true; break;
        case Verdict::Inconclusive: any_inconclusive = true; break;
        case Verdict::Affirmative: any_pass = true; break;
        }
    }
    if (any_fail) return 1;
    if (any_inconclusive) return 3;
    (void)any_pass;
    return 0;
}

std::string Report::human() const {
    std::ostringstream os;
    os << "crforge " << command << " (seed " << seed << ")\n";
    for (const auto& r : records) {
        os << "  [" << verdict_name(r.status) << "] " << r.check;
        if (!r.verdict.empty()) os << ": " << r.verdict;
        if (r.certified_order >= 0) os << " (order " << r.certified_order << ")";
        if (!r.inputs.empty()) os << "  " << r.inputs.dump();
        if (!r.certificate.empty()) os << "\n      certificate: " << r.certificate.dump();
        if (timing) os << "  [" << r.millis << " ms]";
        os << "\n";
    }
    return os.str();
}

std::string Report::json_lines() const {
    std::ostringstream os;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["check"] = r.check;
        j["inputs"] = r.inputs;
        j["verdict"] = verdict_name(r.status);
        j["detail"] = r.verdict;
        j["certified_order"] = r.certified_order;
        j["certificate"] = r.certificate;
        j["seed"] = seed;
        j["millis"] = timing ? r.millis : 0;
        os << j.dump() << "\n";
    }
    return os.str();
}

} // namespace crforge
