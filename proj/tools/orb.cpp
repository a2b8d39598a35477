// orb: generate h = 2 orbit instances and verify FL / AFL / reduction on them.
//
// Exit status: 0 when every verdict passes, 1 on any FAIL, 2 on any error or
// guard overflow.

#include <orbfl/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>

using namespace orbfl;

namespace {

struct Globals {
    int prec = kDefaultPrec;
    int guard = kDefaultGuard;
    std::string format = "json";
    std::uint64_t seed = 0;
};

json read_json(const std::string& path) {
    if (path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

OrbitInstance load(const std::string& path) { return instance_from_json(read_json(path)); }

std::string cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

// Top-level keys as a header row and a value row.
void emit(const json& j, const Globals& g) {
    if (g.format == "json") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::string head, row;
    for (auto& [k, v] : j.items()) {
        head += (head.empty() ? "" : "\t") + k;
        row += (row.empty() ? "" : "\t") + cell(v);
    }
    std::cout << head << "\n" << row << "\n";
}

int status_of(const std::vector<Verdict>& vs) {
    for (auto& v : vs)
        if (v.status == Status::fail) return 1;
    return 0;
}

// ---------------------------------------------------------------------------
// table

struct Row {
    InstanceSpec spec;
    std::string status;
    json fields;
};

std::vector<InstanceSpec> table_specs(const std::vector<int>& qs, const std::vector<std::string>& regimes,
                                      const std::vector<std::string>& kinds, int r_max, int v_max, const Globals& g) {
    std::vector<InstanceSpec> out;
    auto base = [&](int q, Regime reg) {
        InstanceSpec s;
        s.q = q;
        s.regime = reg;
        s.seed = g.seed;
        s.prec = g.prec;
        return s;
    };
    for (int q : qs)
        for (auto& name : regimes) {
            Regime reg = parse_regime(name);
            if (reg == Regime::uniformizer_w) {
                for (int v = 1; v <= v_max; ++v) {
                    if (v > 2 && v % 2 == 0) continue;
                    auto s = base(q, reg);
                    s.L_kind = AlgKind::ramified;
                    s.v = v;
                    out.push_back(s);
                }
                continue;
            }
            int top = reg == Regime::unit_w ? std::min(r_max, 1) : r_max;
            for (auto& k : kinds)
                for (int r = 0; r <= top; ++r) {
                    auto s = base(q, reg);
                    s.L_kind = parse_kind(k);
                    s.r = r;
                    out.push_back(s);
                }
        }
    return out;
}

Row table_row(const InstanceSpec& s, const Globals& g) {
    Row row{s, "PASS", json::object()};
    try {
        auto inst = generate(s);
        auto rep = verify_fl(inst, g.guard);
        std::string verdicts;
        for (auto& v : rep.verdicts) verdicts += (verdicts.empty() ? "" : ",") + v.name + "=" + status_name(v.status);
        row.fields = {{"v", inst.v},
                      {"analytic", rep.analytic.str()},
                      {"value_at_s0", rep.value_at_s0},
                      {"geometric", rep.geometric ? json(*rep.geometric) : json(nullptr)},
                      {"closed_form", rep.closed_form ? json(rep.closed_form->str()) : json(nullptr)},
                      {"verdicts", verdicts}};
        row.status = rep.failed() ? "FAIL" : "PASS";
    } catch (const GuardExceeded&) {
        row.status = "SKIPPED(guard)";
    } catch (const std::exception& e) {
        row.status = std::string("ERROR(") + e.what() + ")";
    }
    return row;
}

int run_table(const std::vector<int>& qs, const std::vector<std::string>& regimes,
              const std::vector<std::string>& kinds, int r_max, int v_max, const Globals& g) {
    auto specs = table_specs(qs, regimes, kinds, r_max, v_max, g);
    std::vector<std::future<Row>> jobs;
    for (auto& s : specs) jobs.push_back(std::async(std::launch::async, table_row, s, std::cref(g)));
    std::cout << "q\tregime\tL_kind\tr\tv\tseed\tanalytic\tvalue_at_s0\tgeometric\tclosed_form\tstatus\tverdicts\n";
    int code = 0;
    for (auto& j : jobs) {
        Row row = j.get();
        const auto& s = row.spec;
        auto f = [&](const char* k) { return row.fields.contains(k) ? cell(row.fields[k]) : std::string("-"); };
        std::cout << s.q << "\t" << regime_name(s.regime) << "\t" << kind_name(s.L_kind) << "\t" << s.r << "\t"
                  << (row.fields.contains("v") ? cell(row.fields["v"]) : std::to_string(s.v)) << "\t" << s.seed << "\t"
                  << f("analytic") << "\t" << f("value_at_s0") << "\t" << f("geometric") << "\t" << f("closed_form")
                  << "\t" << row.status << "\t" << f("verdicts") << "\n";
        if (row.status == "FAIL") code = std::max(code, 1);
        else if (row.status != "PASS") code = 2;
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orb: orbital integrals for the biquadratic fundamental lemma"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--prec", g.prec, "series precision")->check(CLI::PositiveNumber);
    app.add_option("--guard", g.guard, "maximal enumeration length")->check(CLI::PositiveNumber);
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "tsv"}));
    app.add_option("--seed", g.seed, "PRNG seed");
    app.fallthrough();

    int code = 0;

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance");
    InstanceSpec spec;
    std::string regime = "small_w", lkind = "unramified", k2kind, out_path;
    gen->add_option("--q", spec.q, "residue field size (odd prime)");
    gen->add_option("--regime", regime)->check(CLI::IsMember({"unit_w", "small_w", "uniformizer_w"}));
    gen->add_option("--L", lkind, "kind of L = F[w]")->check(CLI::IsMember({"unramified", "ramified", "split"}));
    gen->add_option("--k2", k2kind, "required kind of K2")->check(CLI::IsMember({"unramified", "ramified", "split"}));
    gen->add_option("--r", spec.r, "conductor of w");
    gen->add_option("--v", spec.v, "log_q |z^2|_L (uniformizer_w)");
    gen->add_option("-o,--output", out_path, "write to file instead of stdout");
    gen->callback([&] {
        spec.regime = parse_regime(regime);
        spec.L_kind = parse_kind(lkind);
        if (!k2kind.empty()) spec.k2_kind = parse_kind(k2kind);
        spec.seed = g.seed;
        spec.prec = g.prec;
        std::string text = to_json(generate(spec)).dump(2) + "\n";
        if (out_path.empty()) std::cout << text;
        else std::ofstream(out_path) << text;
    });

    // analytic / geometric
    std::string inst_path, hecke;
    auto* analytic = app.add_subcommand("analytic", "analytic orbital integral as a polynomial in u = -q^s");
    analytic->add_option("instance", inst_path)->required();
    analytic->add_option("--hecke", hecke, "Hecke function n,m1,m2,...");
    analytic->callback([&] {
        auto inst = load(inst_path);
        HeckeFunction f = hecke.empty() ? HeckeFunction{} : HeckeFunction::parse(hecke);
        json j = to_json(orbital_analytic(inst, f, g.guard));
        j["hecke"] = f.str();
        emit(j, g);
    });

    auto* geometric = app.add_subcommand("geometric", "geometric lattice count");
    geometric->add_option("instance", inst_path)->required();
    geometric->callback([&] { emit(to_json(orbital_geometric(load(inst_path), {}, g.guard)), g); });

    // verdicts
    auto* vfl = app.add_subcommand("verify-fl", "fundamental lemma report");
    vfl->add_option("instance", inst_path)->required();
    vfl->callback([&] {
        auto rep = verify_fl(load(inst_path), g.guard);
        emit(to_json(rep), g);
        code = status_of(rep.verdicts);
    });

    auto* vafl = app.add_subcommand("verify-afl", "arithmetic fundamental lemma report");
    vafl->add_option("instance", inst_path)->required();
    vafl->callback([&] {
        auto rep = verify_afl(load(inst_path), g.guard);
        emit(to_json(rep), g);
        code = status_of(rep.verdicts);
    });

    auto* reduce = app.add_subcommand("reduce", "reduced pair over L");
    reduce->add_option("instance", inst_path)->required();
    reduce->callback([&] {
        auto inst = load(inst_path);
        reduced_wz(inst.analytic);
        emit(to_json(shift_pair(inst.analytic)), g);
    });

    auto* vred = app.add_subcommand("verify-reduction", "compare GL_4/F and GL_2/L orbital integrals");
    vred->add_option("instance", inst_path)->required();
    vred->callback([&] {
        auto rep = verify_orbit_reduction(load(inst_path), g.guard);
        emit(to_json(rep), g);
        code = status_of(rep.verdicts);
    });

    // table
    auto* table = app.add_subcommand("table", "sweep instances and tabulate verdicts (TSV)");
    std::vector<int> qs{3};
    std::vector<std::string> regimes{"small_w", "unit_w", "uniformizer_w"}, kinds{"unramified", "ramified"};
    int r_max = 2, v_max = 3;
    table->add_option("--q", qs, "residue field sizes");
    table->add_option("--regime", regimes, "regimes to sweep")
        ->check(CLI::IsMember({"unit_w", "small_w", "uniformizer_w"}));
    table->add_option("--L", kinds, "kinds of L")->check(CLI::IsMember({"unramified", "ramified"}));
    table->add_option("--r-max", r_max, "largest conductor");
    table->add_option("--v-max", v_max, "largest v in the uniformizer regime");
    table->callback([&] { code = run_table(qs, regimes, kinds, r_max, v_max, g); });

    // algebra
    auto* algebra = app.add_subcommand("algebra", "print a canonical quadratic algebra");
    std::string akind = "unramified";
    int aq = 3;
    algebra->add_option("--kind", akind)->check(CLI::IsMember({"unramified", "ramified", "split"}));
    algebra->add_option("--q", aq);
    algebra->callback([&] {
        auto f = ResidueField::prime(aq);
        AlgKind k = parse_kind(akind);
        QuadAlg a = k == AlgKind::unramified ? QuadAlg::unramified(f, g.prec)
                    : k == AlgKind::ramified ? QuadAlg::ramified(f, false, g.prec)
                                             : QuadAlg::split(f, g.prec);
        json j = to_json(a);
        j["gen_matrix"] = to_json(a.gen_matrix());
        emit(j, g);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const GuardExceeded& e) {
        std::cerr << "guard exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}
