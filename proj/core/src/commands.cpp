#include "crforge/commands.hpp"

#include <chrono>
#include <functional>

namespace crforge {

namespace {

using Clock = std::chrono::steady_clock;

long ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

struct Resolved {
    const Manifest* m = nullptr;
    int order = 0;

    GenericManifold manifold(const std::string& flag_name) const {
        std::string name = flag_name;
        if (name.empty()) {
            if (m->manifolds.size() == 1)
                name = m->manifolds.begin()->first;
            else
                throw std::invalid_argument("ambiguous manifold; pass --manifold NAME");
        }
        return m->manifold(name).truncated(order);
    }

    struct MapTriple {
        MapGerm germ;
        GenericManifold src, tgt;
        std::string name;
    };

    MapTriple map(const std::string& flag_map, const std::string& flag_target) const {
        if (flag_map.empty()) throw std::invalid_argument("this command needs --map NAME");
        const BuiltMap& bm = m->map(flag_map);
        std::string tgt = flag_target.empty() ? bm.tgt : flag_target;
        MapTriple t{MapGerm(bm.germ.H.truncated(order), bm.germ.srcN, bm.germ.tgtN),
                    m->manifold(bm.src).truncated(order), m->manifold(tgt).truncated(order),
                    flag_map};
        return t;
    }
};

nlohmann::ordered_json mono_json(const Mono& m) {
    auto arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.nvars(); ++i) arr.push_back(m[i]);
    return arr;
}

CheckRecord make_record(const std::string& check, Verdict status, const std::string& verdict,
                        int order) {
    CheckRecord r;
    r.check = check;
    r.status = status;
    r.verdict = verdict;
    r.certified_order = order;
    return r;
}

void run_selftest(const Manifest&, const CommandFlags& flags, Report& rep);

} // namespace

nlohmann::ordered_json series_json(const Series& s) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [m, c] : s.terms()) {
        auto pair = nlohmann::ordered_json::array();
        pair.push_back(mono_json(m));
        pair.push_back(c.str());
        arr.push_back(pair);
    }
    return arr;
}

std::vector<std::string> command_names() {
    return {"check-generic", "normal-form", "segre", "iterate-segre", "finite-type",
            "holo-nondeg", "check-map", "reflection-ideal", "ideal-equal", "rank",
            "not-totally-degenerate", "finite-map", "build-system", "check-jet-solution",
            "key-identity", "determine", "selftest"};
}

Report run_command(const Manifest& m, const std::string& command, const CommandFlags& flags) {
    Report rep;
    rep.command = command;
    rep.seed = flags.seed;
    rep.timing = flags.timing;

    int order = flags.order < 0 ? m.order : flags.order;
    if (order > m.order)
        throw std::invalid_argument("--order " + std::to_string(order) +
                                    " exceeds the manifest order " + std::to_string(m.order) +
                                    "; re-elaborate the manifest instead");
    Resolved rs{&m, order};
    auto t0 = Clock::now();

    if (command == "selftest") {
        run_selftest(m, flags, rep);
        return rep;
    }

    if (command == "check-generic") {
        GenericManifold M = rs.manifold(flags.manifold);
        CheckRecord r = make_record("generic+real", Verdict::Affirmative,
                                    "defining system is a real generic manifold ideal",
                                    M.order());
        r.inputs["manifold"] = M.name();
        r.certificate["N"] = M.N();
        r.certificate["codim"] = M.d();
        rep.add(std::move(r));
    } else if (command == "normal-form") {
        GenericManifold M = rs.manifold(flags.manifold);
        bool ok = true;
        for (const auto& c : M.reality_residual())
            if (!c.is_zero()) ok = false;
        CheckRecord r = make_record("normal-form", ok ? Verdict::Affirmative : Verdict::Negative,
                                    ok ? "w = Q(z,zeta) with Q(z,chi,Qbar(chi,z,w)) = w"
                                       : "reality identity FAILED",
                                    M.order());
        r.inputs["manifold"] = M.name();
        for (int k = 0; k < M.d(); ++k) {
            r.certificate["Q"].push_back(series_json(M.Q()[k]));
            r.certificate["Qbar"].push_back(series_json(M.Qbar()[k]));
        }
        rep.add(std::move(r));
    } else if (command == "segre") {
        GenericManifold M = rs.manifold(flags.manifold);
        SegreMapping g = SegreMapping::standard(M);
        bool ok = true;
        int res_order = M.order();
        for (const auto& rres : g.generator_residuals(M)) {
            res_order = std::min(res_order, rres.order());
            if (!rres.is_zero()) ok = false;
        }
        CheckRecord r = make_record("segre-mapping", ok ? Verdict::Affirmative : Verdict::Negative,
                                    ok ? "gamma = (t, Q(t,zeta)) annihilates I(M)"
                                       : "generator residual nonzero",
                                    res_order);
        r.inputs["manifold"] = M.name();
        for (int k = 0; k < M.d(); ++k) r.certificate["nu"].push_back(series_json(g.nu()[k]));
        rep.add(std::move(r));
    } else if (command == "iterate-segre") {
        GenericManifold M = rs.manifold(flags.manifold);
        int J = flags.segre_level < 0 ? 2 : flags.segre_level;
        SegreTower tower(M, SegreMapping::standard(M), std::max(J, 2));
        for (int j = 0; j + 1 <= std::max(J, 2); ++j) {
            bool ok = true;
            int res_order = M.order();
            for (const auto& rres : tower.iteration_residuals(j)) {
                res_order = std::min(res_order, rres.order());
                if (!rres.is_zero()) ok = false;
            }
            CheckRecord r = make_record("segre-iteration j=" + std::to_string(j),
                                        ok ? Verdict::Affirmative : Verdict::Negative,
                                        "h(v^j, vbar^{j+1}) = 0", res_order);
            r.inputs["manifold"] = M.name();
            rep.add(std::move(r));
        }
        for (int j = 0; j < tower.xi_count(); ++j) {
            bool ok = true;
            int res_order = M.order();
            for (const auto& rres : tower.retraction_residuals(j)) {
                res_order = std::min(res_order, rres.order());
                if (!rres.is_zero()) ok = false;
            }
            CheckRecord r = make_record("segre-retraction j=" + std::to_string(j),
                                        ok ? Verdict::Affirmative : Verdict::Negative,
                                        "v^{j+2}(., xi^j) = v^j", res_order);
            r.inputs["manifold"] = M.name();
            rep.add(std::move(r));
        }
        if (J >= 1) {
            CheckRecord r = make_record("v^" + std::to_string(J), Verdict::Affirmative,
                                        "iterated Segre mapping", M.order());
            for (int c = 0; c < M.N(); ++c)
                r.certificate["components"].push_back(series_json(tower.v(J)[c]));
            rep.add(std::move(r));
        }
    } else if (command == "finite-type") {
        GenericManifold M = rs.manifold(flags.manifold);
        FiniteTypeReport ft = finite_type_check(M);
        CheckRecord r = make_record("finite-type", ft.verdict,
                                    ft.verdict == Verdict::Affirmative ? "finite type"
                                    : ft.verdict == Verdict::Negative ? "not of finite type"
                                                                      : "inconclusive",
                                    ft.certified_order);
        r.inputs["manifold"] = M.name();
        r.certificate["target_dim"] = ft.target_dim;
        r.certificate["lie_dim"] = ft.lie_dim;
        r.certificate["depth_used"] = ft.depth_used;
        r.certificate["segre_j0"] = ft.segre_j0;
        r.certificate["rank_at_j0"] = ft.rank_at_j0;
        r.certificate["routes_agree"] = ft.routes_agree;
        rep.add(std::move(r));
    } else if (command == "holo-nondeg") {
        GenericManifold M = rs.manifold(flags.manifold);
        int bound = flags.level < 0 ? 3 : flags.level;
        HoloNondegReport hn = holo_nondegeneracy_check(M, bound);
        CheckRecord r = make_record(
            "holo-nondeg",
            hn.verdict,
            hn.verdict == Verdict::Affirmative   ? "holomorphically nondegenerate"
            : hn.verdict == Verdict::Negative ? "holomorphically degenerate up to order"
                                              : "inconclusive at this alpha bound",
            hn.certified_order);
        r.inputs["manifold"] = M.name();
        r.inputs["alpha_bound"] = bound;
        if (hn.verdict == Verdict::Affirmative) {
            for (const auto& [alpha, jcomp] : hn.cert_indices) {
                auto item = nlohmann::ordered_json::object();
                item["alpha"] = mono_json(alpha);
                item["component"] = jcomp + 1;
                r.certificate["indices"].push_back(item);
            }
            r.certificate["det"] = series_json(hn.cert_det);
        } else if (hn.verdict == Verdict::Negative) {
            for (const auto& a : hn.degeneracy_field)
                r.certificate["field"].push_back(series_json(a));
        }
        rep.add(std::move(r));
    } else if (command == "check-map") {
        auto t = rs.map(flags.map, flags.target);
        SendsIntoReport s = sends_into(t.src, t.tgt, t.germ);
        CheckRecord r = make_record("sends-into", s.holds ? Verdict::Affirmative : Verdict::Negative,
                                    s.holds ? "map sends source into target"
                                            : "violated at degree " +
                                                  std::to_string(s.obstruction_degree),
                                    s.order);
        r.inputs["map"] = t.name;
        if (!s.holds) {
            r.certificate["obstruction_degree"] = s.obstruction_degree;
            r.certificate["monomial"] = mono_json(s.obstruction_mono);
            r.certificate["coefficient"] = s.witness.str();
        }
        rep.add(std::move(r));
    } else if (command == "reflection-ideal") {
        auto t = rs.map(flags.map, flags.target);
        ReflectionIdeal ri = reflection_generators(t.tgt, t.germ);
        CheckRecord r = make_record("reflection-ideal", Verdict::Affirmative, ri.provenance,
                                    ri.order);
        r.inputs["map"] = t.name;
        for (int k = 0; k < ri.gens.size(); ++k)
            r.certificate["generators"].push_back(series_json(ri.gens[k]));
        r.certificate["max_term_degree"] = ri.max_term_degree;
        r.certificate["degree_stabilized"] = ri.degree_stabilized;
        rep.add(std::move(r));
    } else if (command == "ideal-equal") {
        auto t = rs.map(flags.map, flags.target);
        if (flags.map2.empty()) throw std::invalid_argument("ideal-equal needs --map2 NAME");
        auto t2 = rs.map(flags.map2, flags.target.empty() ? t.tgt.name() : flags.target);
        IdealEqualReport ie = ideal_equal(t.tgt, t.germ, t2.germ);
        CheckRecord r = make_record("ideal-equal", ie.equal ? Verdict::Affirmative : Verdict::Negative,
                                    ie.equal ? "reflection ideals coincide"
                                             : "ideals differ at degree " +
                                                   std::to_string(ie.first_difference_degree),
                                    ie.order);
        r.inputs["map"] = t.name;
        r.inputs["map2"] = flags.map2;
        rep.add(std::move(r));
    } else if (command == "rank") {
        auto t = rs.map(flags.map, flags.target);
        RankReport rr = generic_rank(t.germ.H, flags.seed);
        CheckRecord r = make_record("generic-rank", Verdict::Affirmative,
                                    "Rk >= " + std::to_string(rr.rank) + " via " + rr.route,
                                    rr.order);
        r.inputs["map"] = t.name;
        r.certificate["rank"] = rr.rank;
        r.certificate["route"] = rr.route;
        rep.add(std::move(r));
    } else if (command == "not-totally-degenerate") {
        auto t = rs.map(flags.map, flags.target);
        TotalDegeneracyReport td = not_totally_degenerate(t.src, t.tgt, t.germ);
        CheckRecord r = make_record("not-totally-degenerate",
                                    td.certified ? Verdict::Affirmative : Verdict::Inconclusive,
                                    td.certified ? "certified: Rk H o v^1 = n'"
                                                 : "not certified at this order",
                                    td.rank_report.order);
        r.inputs["map"] = t.name;
        r.certificate["rank"] = td.rank;
        r.certificate["required"] = td.required;
        rep.add(std::move(r));
    } else if (command == "finite-map") {
        auto t = rs.map(flags.map, flags.target);
        FiniteMapReport fm = finite_map_check(t.germ, order);
        CheckRecord r = make_record(
            "finite-map", fm.finite ? Verdict::Affirmative : Verdict::Negative,
            fm.finite ? "finite, multiplicity " + std::to_string(fm.multiplicity) +
                            (fm.exact ? "" : " (order-qualified)")
                      : "not finite up to this order",
            fm.order);
        r.inputs["map"] = t.name;
        if (fm.finite) {
            r.certificate["multiplicity"] = fm.multiplicity;
            r.certificate["stabilization_degree"] = fm.stabilization_degree;
            for (const auto& mn : fm.std_monos)
                r.certificate["standard_monomials"].push_back(mono_json(mn));
        } else {
            for (const auto& mn : fm.surviving)
                r.certificate["surviving_monomials"].push_back(mono_json(mn));
        }
        rep.add(std::move(r));
    } else if (command == "build-system" || command == "check-jet-solution") {
        auto t = rs.map(flags.map, flags.target);
        int l = flags.level < 0 ? 1 : flags.level;
        SystemKind kind = SystemKind::Phi;
        int j = 0;
        if (flags.epsilon_bound >= 0) kind = SystemKind::Theta;
        else if (flags.segre_level >= 0) kind = SystemKind::Psi;
        if (flags.segre_level >= 0) j = flags.segre_level;
        int eps = flags.epsilon_bound < 0 ? 0 : flags.epsilon_bound;
        ConstraintSystem sys = build_system(t.src, t.tgt, t.germ, kind, l, j, eps);
        if (command == "build-system") {
            CheckRecord r = make_record("build-system", Verdict::Affirmative,
                                        std::string("kind ") +
                                            (kind == SystemKind::Phi   ? "phi"
                                             : kind == SystemKind::Psi ? "psi"
                                                                       : "theta"),
                                        order - l);
            r.inputs["map"] = t.name;
            r.inputs["level"] = l;
            r.inputs["segre_level"] = j;
            r.certificate["entries"] = static_cast<int>(sys.nu_idx.size()) * sys.dp;
            r.certificate["c_table"] = static_cast<int>(sys.c_table.size());
            r.certificate["u_table"] = static_cast<int>(sys.u_table.size());
            rep.add(std::move(r));
        } else {
            MapGerm solmap = t.germ;
            std::string solname = t.name;
            if (!flags.map2.empty()) {
                auto t2 = rs.map(flags.map2, flags.target.empty() ? t.tgt.name() : flags.target);
                solmap = t2.germ;
                solname = flags.map2;
            }
            JetValue S = canonical_jet_solution(t.src, solmap, sys);
            SystemCheckReport sc = check_jet_solution(sys, S);
            bool ok = sc.plain_vanishes && sc.tilde_vanishes;
            CheckRecord r = make_record("check-jet-solution",
                                        ok ? Verdict::Affirmative : Verdict::Negative,
                                        ok ? "jet annihilates the system (plain and tilde)"
                                           : "system entries do not vanish",
                                        sc.certified_order);
            r.inputs["map"] = t.name;
            r.inputs["solution"] = solname;
            r.inputs["level"] = l;
            r.inputs["segre_level"] = j;
            rep.add(std::move(r));
        }
    } else if (command == "key-identity") {
        auto t = rs.map(flags.map, flags.target);
        if (flags.map2.empty()) throw std::invalid_argument("key-identity needs --map2 NAME");
        auto t2 = rs.map(flags.map2, flags.target.empty() ? t.tgt.name() : flags.target);
        int l = flags.level < 0 ? 1 : flags.level;
        int j = flags.segre_level < 0 ? 0 : flags.segre_level;
        ConstraintSystem psi = build_system(t.src, t.tgt, t.germ, SystemKind::Psi, l, j);
        JetValue S = canonical_jet_solution(t.src, t2.germ, psi);
        KeyIdentityReport ki = key_identity_check(t.src, t.tgt, t.germ, S, l, j, &t2.germ);
        Verdict v = !ki.precondition_ok ? Verdict::Inconclusive
                    : (ki.key_holds && (!ki.reformulation_checked || ki.reformulation_holds))
                        ? Verdict::Affirmative
                        : Verdict::Negative;
        CheckRecord r = make_record("key-identity", v,
                                    !ki.precondition_ok  ? "S is not a solution of the psi system"
                                    : ki.key_holds       ? "key identity holds"
                                                         : "key identity FAILS",
                                    ki.certified_order);
        r.inputs["map"] = t.name;
        r.inputs["map2"] = flags.map2;
        r.inputs["level"] = l;
        r.inputs["segre_level"] = j;
        r.certificate["reformulation"] = ki.reformulation_checked && ki.reformulation_holds;
        rep.add(std::move(r));
    } else if (command == "determine") {
        auto t = rs.map(flags.map, flags.target);
        int K = flags.level < 0 ? 2 : flags.level;
        int trials = flags.trials < 0 ? 20 : flags.trials;
        int pdeg = std::min(order, K + 2);
        DeterminationReport dr =
            determination_experiment(t.src, t.tgt, t.germ, K, trials, pdeg, flags.seed);
        Verdict v = dr.counterexamples > 0 ? Verdict::Negative
                    : dr.vacuous           ? Verdict::Inconclusive
                                           : Verdict::Affirmative;
        CheckRecord r = make_record(
            "determine", v,
            "survivors " + std::to_string(dr.survivors) + "/" + std::to_string(dr.trials) +
                ", passes " + std::to_string(dr.passes) + ", counterexamples " +
                std::to_string(dr.counterexamples) + (dr.vacuous ? " (vacuous)" : ""),
            dr.working_order);
        r.inputs["map"] = t.name;
        r.inputs["K"] = K;
        r.inputs["trials"] = trials;
        r.certificate["margin_order"] = dr.margin_order;
        r.certificate["perturbation_degree"] = pdeg;
        rep.add(std::move(r));
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }

    for (auto& r : rep.records)
        if (r.millis == 0) r.millis = ms_since(t0);
    return rep;
}

// ---- selftest -----------------------------------------------------------

namespace {

void run_selftest(const Manifest&, const CommandFlags& flags, Report& rep) {
    int order = flags.order < 0 ? 8 : flags.order;

    struct MapExpect {
        std::string name;
        bool sends;
    };
    struct FixtureExpect {
        std::string fixture;
        Verdict finite_type;
        Verdict holo;
        std::vector<MapExpect> maps;
    };
    const std::vector<FixtureExpect> corpus = {
        {"hyperplane", Verdict::Negative, Verdict::Negative, {{"Id", true}}},
        {"quadric",
         Verdict::Affirmative,
         Verdict::Affirmative,
         {{"Id", true}, {"Scale", true}, {"Stretch", false}}},
        {"twist",
         Verdict::Affirmative,
         Verdict::Negative,
         {{"Id", true}, {"H", true}, {"Swap", true}}},
        {"nonfinite", Verdict::Affirmative, Verdict::Affirmative, {{"H", true}}},
    };

    for (const auto& fx : corpus) {
        Manifest fm = parse_manifest(fixture_source(fx.fixture));
        auto expect = [&](const std::string& what, bool ok, int ord) {
            rep.add(make_record(fx.fixture + ": " + what,
                                ok ? Verdict::Affirmative : Verdict::Negative,
                                ok ? "as expected" : "UNEXPECTED", ord));
        };

        for (const auto& [name, M0] : fm.manifolds) {
            GenericManifold M = M0.truncated(order);
            bool reality = true;
            for (const auto& c : M.reality_residual())
                if (!c.is_zero()) reality = false;
            expect("reality identity (" + name + ")", reality, M.order());

            SegreTower tower(M, SegreMapping::standard(M), 3);
            bool it_ok = true;
            for (int j = 0; j <= 1; ++j)
                for (const auto& rres : tower.iteration_residuals(j))
                    if (!rres.is_zero()) it_ok = false;
            expect("Segre iteration identity (" + name + ")", it_ok, M.order());
            bool xi_ok = true;
            for (int j = 0; j < tower.xi_count(); ++j)
                for (const auto& rres : tower.retraction_residuals(j))
                    if (!rres.is_zero()) xi_ok = false;
            expect("Segre retraction identity (" + name + ")", xi_ok, M.order());
        }

        {
            // the first declared manifold carries the fixture's type/nondeg expectations
            GenericManifold M = fm.manifold(fm.manifold_decls.front().name).truncated(order);
            FiniteTypeReport ft = finite_type_check(M);
            expect("finite-type verdict", ft.verdict == fx.finite_type, ft.certified_order);
            HoloNondegReport hn = holo_nondegeneracy_check(M, 3);
            expect("holo-nondeg verdict", hn.verdict == fx.holo, hn.certified_order);
        }

        for (const auto& me : fx.maps) {
            const BuiltMap& bm = fm.map(me.name);
            MapGerm g(bm.germ.H.truncated(order), bm.germ.srcN, bm.germ.tgtN);
            SendsIntoReport s = sends_into(fm.manifold(bm.src).truncated(order),
                                           fm.manifold(bm.tgt).truncated(order), g);
            expect("map " + me.name + (me.sends ? " sends" : " must fail"), s.holds == me.sends,
                   s.order);
        }

        if (fx.fixture == "twist") {
            GenericManifold M = fm.manifold("M").truncated(order);
            MapGerm H(fm.map("H").germ.H.truncated(order), 3, 3);
            MapGerm Id(fm.map("Id").germ.H.truncated(order), 3, 3);
            expect("ideal-equal(H, Id)", ideal_equal(M, H, Id).equal, order);
        }
        if (fx.fixture == "nonfinite") {
            GenericManifold M = fm.manifold("M").truncated(order);
            GenericManifold Mp = fm.manifold("Mp").truncated(order);
            MapGerm H(fm.map("H").germ.H.truncated(order), 3, 3);
            expect("rank H = 3", generic_rank(H.H).rank == 3, order - 1);
            expect("H not totally degenerate", not_totally_degenerate(M, Mp, H).certified,
                   order - 1);
            expect("H not finite", !finite_map_check(H, order).finite, order);
            HoloNondegReport hn = holo_nondegeneracy_check(Mp, 3);
            expect("Mp holo-nondeg", hn.verdict == Verdict::Affirmative, hn.certified_order);
        }
    }
}

} // namespace

} // namespace crforge
