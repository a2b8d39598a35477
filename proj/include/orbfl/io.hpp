#pragma once

// JSON for instances and reports (nlohmann::json).  Instances round-trip:
// images are stored, w and z are recomputed and re-validated on load.

#include <orbfl/reduction.hpp>

#include <json.hpp>

namespace orbfl {

using json = nlohmann::json;

inline constexpr const char* kInstanceVersion = "orbfl-instance/1";

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Rings

inline json to_json(const ResidueField& f) {
    return {{"p", f.p()}, {"deg", f.deg()}, {"modulus", f.modulus()}};
}

inline ResidueField field_from_json(const json& j) {
    int p = j.at("p").get<int>();
    if (j.at("deg").get<int>() == 1) return ResidueField::prime(p);
    return ResidueField::quadratic(p, j.at("modulus").get<std::vector<int>>());
}

inline json to_json(const Series& s) {
    json coeffs = json::array();
    for (auto c : s.coeffs()) coeffs.push_back(s.field().components(c));
    return {{"val", s.is_zero() ? json(nullptr) : json(s.valuation())}, {"coeffs", coeffs}, {"prec", s.prec()}};
}

inline Series series_from_json(const ResidueField& f, const json& j) {
    int prec = j.at("prec").get<int>();
    if (j.at("val").is_null()) return Series::zero(f, prec);
    std::vector<ResidueField::Elem> c;
    for (auto& x : j.at("coeffs")) c.push_back(f.from_components(x.get<std::vector<int>>()));
    return Series::from_coeffs(f, j.at("val").get<int>(), c, prec);
}

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const ResidueField& f, const json& j) {
    int r = static_cast<int>(j.size()), c = r ? static_cast<int>(j[0].size()) : 0;
    Matrix m(r, c, f);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(j[i].size()) != c) throw FormatError("ragged matrix");
        for (int k = 0; k < c; ++k) m(i, k) = series_from_json(f, j[i][k]);
    }
    return m;
}

// minpoly [m0, m1] for x^2 + m1 x + m0
inline json to_json(const QuadAlg& k) {
    auto [m0, m1] = k.minpoly();
    return {{"kind", kind_name(k.kind())}, {"minpoly", {to_json(m0), to_json(m1)}}};
}

inline QuadAlg alg_from_json(const ResidueField& f, const json& j) {
    Series m0 = series_from_json(f, j.at("minpoly").at(0)), m1 = series_from_json(f, j.at("minpoly").at(1));
    QuadAlg k = QuadAlg::from_minpoly(-m1, m0);
    if (kind_name(k.kind()) != j.at("kind").get<std::string>())
        throw FormatError("algebra kind does not match its minimal polynomial");
    return k;
}

inline json to_json(const QuadElem& x) { return {{"a", to_json(x.a())}, {"b", to_json(x.b())}}; }

inline json to_json(const Lattice& l) { return to_json(l.basis()); }

// ---------------------------------------------------------------------------
// Pairs and instances

inline json to_json(const EmbeddingPair& p) {
    return {{"h", p.h},
            {"side", side_name(p.side)},
            {"alg1", to_json(p.alg1)},
            {"alg2", to_json(p.alg2)},
            {"img_gen1", to_json(p.img1)},
            {"img_gen2", to_json(p.img2)},
            {"prec", std::min(p.img1.prec(), p.img2.prec())}};
}

inline EmbeddingPair pair_from_json(const ResidueField& f, const json& j) {
    std::string side = j.at("side").get<std::string>();
    if (side != "analytic" && side != "geometric") throw FormatError("unknown side: " + side);
    auto p = build_pair(alg_from_json(f, j.at("alg1")), alg_from_json(f, j.at("alg2")),
                        matrix_from_json(f, j.at("img_gen1")), matrix_from_json(f, j.at("img_gen2")),
                        side == "analytic" ? Side::analytic : Side::geometric);
    if (p.h != j.at("h").get<int>()) throw FormatError("h does not match the image size");
    return p;
}

inline json to_json(const InstanceSpec& s) {
    return {{"q", s.q},
            {"k1_kind", kind_name(s.k1_kind)},
            {"k2_kind", s.k2_kind ? json(kind_name(*s.k2_kind)) : json(nullptr)},
            {"regime", regime_name(s.regime)},
            {"L_kind", kind_name(s.L_kind)},
            {"r", s.r},
            {"v", s.v},
            {"seed", s.seed},
            {"prec", s.prec}};
}

inline InstanceSpec spec_from_json(const json& j) {
    InstanceSpec s;
    s.q = j.at("q").get<int>();
    s.k1_kind = parse_kind(j.at("k1_kind").get<std::string>());
    if (!j.at("k2_kind").is_null()) s.k2_kind = parse_kind(j.at("k2_kind").get<std::string>());
    s.regime = parse_regime(j.at("regime").get<std::string>());
    s.L_kind = parse_kind(j.at("L_kind").get<std::string>());
    s.r = j.at("r").get<int>();
    s.v = j.at("v").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.prec = j.at("prec").get<int>();
    return s;
}

inline json to_json(const OrbitInstance& inst) {
    return {{"version", kInstanceVersion},
            {"spec", to_json(inst.spec)},
            {"field", to_json(inst.field())},
            {"k1", to_json(inst.k1)},
            {"k2", to_json(inst.k2)},
            {"L", to_json(inst.L)},
            {"w", to_json(inst.w)},
            {"r", inst.r},
            {"v", inst.v},
            {"vL_zsq", inst.vL_zsq},
            {"boundary", inst.boundary},
            {"coquadratic", inst.coquadratic},
            {"analytic", to_json(inst.analytic)},
            {"geometric", inst.geometric ? to_json(*inst.geometric) : json(nullptr)}};
}

inline OrbitInstance instance_from_json(const json& j) {
    if (j.value("version", "") != kInstanceVersion)
        throw FormatError("unsupported instance version: " + j.value("version", std::string("<missing>")));
    ResidueField f = field_from_json(j.at("field"));
    InstanceSpec spec = spec_from_json(j.at("spec"));
    QuadAlg k1 = alg_from_json(f, j.at("k1")), k2 = alg_from_json(f, j.at("k2")), L = alg_from_json(f, j.at("L"));
    EmbeddingPair pa = pair_from_json(f, j.at("analytic"));
    QuadElem w = L.elem(series_from_json(f, j.at("w").at("a")), series_from_json(f, j.at("w").at("b")));
    if (pa.w != Matrix::block_diag(w.mult_matrix(), w.mult_matrix()))
        throw FormatError("stored w does not match the analytic pair");
    IntermediateGenerator g = intermediate_generator(k1, k2);
    QuadElem zsq = z_squared(w, g);
    OrbitInstance inst{spec, k1, k2, L, w, zsq, conductor(w), zsq.norm().valuation(), zsq.valuation(), pa,
                       std::nullopt, j.at("boundary").get<bool>(), j.at("coquadratic").get<bool>()};
    if (!j.at("geometric").is_null()) inst.geometric = pair_from_json(f, j.at("geometric"));

    if (inst.r != j.at("r").get<int>() || inst.v != j.at("v").get<int>() || inst.vL_zsq != j.at("vL_zsq").get<int>())
        throw FormatError("stored invariants do not match the recomputed ones");
    if (!regularity(inst.analytic).is_rss) throw FormatError("analytic pair is not regular semisimple");
    if (inst.geometric && !same_invariant(matching_invariant(*inst.geometric), matching_invariant(inst.analytic)))
        throw FormatError("geometric pair does not match the analytic pair");
    return inst;
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const OrbitalPolynomial& p) {
    json j = {{"u_coeffs", p.coeffs},
              {"q", p.q},
              {"value_at_s0", p.value_at_s0()},
              {"afl_derivative", p.afl_derivative()}};
    if (p.low != 0) j["lowest_exponent"] = p.low;
    return j;
}

inline json to_json(const std::vector<Verdict>& vs) {
    json j = json::object();
    for (auto& v : vs) j[v.name] = {{"status", status_name(v.status)}, {"detail", v.detail}};
    return j;
}

inline json to_json(const GeometricCount& g) {
    return {{"count", g.count}, {"strict_orbits", g.strict_orbits}, {"lattices", g.lattices.size()},
            {"hull_window", g.hull_window}};
}

inline json to_json(const FLReport& r) {
    return {{"analytic", to_json(r.analytic)},
            {"closed_form", r.closed_form ? to_json(*r.closed_form) : json(nullptr)},
            {"geometric", r.geometric ? json(*r.geometric) : json(nullptr)},
            {"stated_center", r.stated_center ? json(*r.stated_center) : json(nullptr)},
            {"value_at_s0", r.value_at_s0},
            {"regime", regime_name(r.cls.regime)},
            {"L_kind", kind_name(r.cls.L_kind)},
            {"r", r.cls.r},
            {"v", r.cls.v},
            {"boundary", r.boundary},
            {"verdicts", to_json(r.verdicts)}};
}

inline json to_json(const AFLReport& r) {
    return {{"v", r.v},
            {"analytic", to_json(r.analytic)},
            {"afl_derivative", r.derivative},
            {"predicted_intersection", r.predicted},
            {"prediction_source", r.prediction_is_derived ? "derived prediction, not a proved value" : "proved case"},
            {"verdicts", to_json(r.verdicts)}};
}

inline json to_json(const ReductionReport& r) {
    return {{"v", r.v},
            {"one_plus_z_invertible", r.one_plus_z_invertible},
            {"one_minus_z_invertible", r.one_minus_z_invertible},
            {"gl4", to_json(r.gl4)},
            {"gl2", to_json(r.gl2)},
            {"lattices", r.lattices},
            {"unmatched", r.unmatched},
            {"exponent_mismatches", r.exponent_mismatches},
            {"gl4_geometric", r.gl4_geometric ? json(*r.gl4_geometric) : json(nullptr)},
            {"gl2_geometric", r.gl2_geometric ? json(*r.gl2_geometric) : json(nullptr)},
            {"verdicts", to_json(r.verdicts)}};
}

inline json to_json(const ReducedPair& rp) {
    return {{"version", kInstanceVersion},
            {"base", to_json(rp.base())},
            {"base_residue_field", to_json(rp.coords.field())},
            {"w", to_json(rp.coords.w())},
            {"pair", to_json(rp.pair)},
            {"w_red", to_json(rp.w_red)},
            {"z_red", to_json(rp.z_red)},
            {"one_plus_z_invertible", rp.one_plus_z_invertible},
            {"one_minus_z_invertible", rp.one_minus_z_invertible}};
}

}  // namespace orbfl
