#pragma once

// Closed-form orbital integrals for h = 2 and the FL / AFL verdict reports.

#include <orbfl/orbital_integrals.hpp>

namespace orbfl {

struct ClosedFormCase {
    int q = 3;
    Regime regime = Regime::small_w;
    AlgKind L_kind = AlgKind::unramified;
    int r = 0;
    int v = 2;

    static ClosedFormCase of(const OrbitInstance& inst) {
        return {inst.q(), inst.spec.regime, inst.L.kind(), inst.r, inst.v};
    }
};

struct UnsupportedRegime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_case(const ClosedFormCase& c) {
    if (c.regime == Regime::uniformizer_w && (c.L_kind != AlgKind::ramified || c.r != 0))
        throw UnsupportedRegime("uniformizer_w needs L ramified and r = 0");
    if (c.regime == Regime::small_w && c.v != 2) throw UnsupportedRegime("small_w needs v = 2");
    if (c.regime == Regime::small_w && c.L_kind == AlgKind::split)
        throw UnsupportedRegime("small_w needs L to be a field");
}

}  // namespace detail

inline OrbitalPolynomial closed_form_analytic(const ClosedFormCase& c) {
    detail::check_case(c);
    OrbitalPolynomial p{{}, c.q};
    if (c.regime == Regime::uniformizer_w) {
        for (int i = 0; i <= c.v; ++i) p.add(i, 1);
        return p;
    }
    if (c.regime != Regime::small_w) throw UnsupportedRegime("no closed form for this regime");
    // (1+u)^2 * m with u = -q^s
    long long m = 0, qk = 1;
    if (c.L_kind == AlgKind::unramified) {
        for (int k = 0; k < c.r; ++k, qk *= c.q) m += qk;
        m *= c.q + 1;
        p.add(0, 1);
        p.add(2, 1);
    } else {
        for (int k = 1; k <= c.r; ++k) m += (qk *= c.q);
        p.add(0, 1);
        p.add(1, 1);
        p.add(2, 1);
    }
    p.add(0, m);
    p.add(1, 2 * m);
    p.add(2, m);
    p.trim();
    return p;
}

inline long long closed_form_geometric(const ClosedFormCase& c) {
    detail::check_case(c);
    if (c.regime != Regime::small_w) throw UnsupportedRegime("geometric closed form covers small_w only");
    return c.L_kind == AlgKind::unramified ? 2 : 1;
}

// Published central value for small_w, kept for comparison with brute force.
inline long long stated_central_value(const ClosedFormCase& c) {
    detail::check_case(c);
    if (c.regime != Regime::small_w) throw UnsupportedRegime("no stated central value for this regime");
    return 2;
}

enum class Status { pass, fail, flag };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::pass: return "PASS";
        case Status::fail: return "FAIL";
        case Status::flag: return "FLAG";
    }
    return "?";
}

struct Verdict {
    std::string name;
    Status status;
    std::string detail;
};

inline Verdict verdict(std::string name, bool ok, std::string detail = {}) {
    return {std::move(name), ok ? Status::pass : Status::fail, std::move(detail)};
}

struct FLReport {
    ClosedFormCase cls;
    OrbitalPolynomial analytic;
    std::optional<OrbitalPolynomial> closed_form;
    std::optional<long long> geometric;
    std::optional<long long> stated_center;
    long long value_at_s0 = 0;
    bool boundary = false;
    std::vector<Verdict> verdicts;

    bool failed() const {
        for (auto& v : verdicts)
            if (v.status == Status::fail) return true;
        return false;
    }
};

inline FLReport verify_fl(const OrbitInstance& inst, int guard = kDefaultGuard) {
    FLReport rep;
    rep.cls = ClosedFormCase::of(inst);
    rep.boundary = inst.boundary;
    rep.analytic = orbital_analytic(inst, {}, guard);
    rep.value_at_s0 = rep.analytic.value_at_s0();
    if (inst.geometric) rep.geometric = orbital_geometric(inst, {}, guard).count;

    const auto& c = rep.cls;
    if (c.regime == Regime::small_w || c.regime == Regime::uniformizer_w) {
        rep.closed_form = closed_form_analytic(c);
        rep.verdicts.push_back(verdict("analytic_equals_closed_form", rep.analytic == *rep.closed_form,
                                       rep.analytic.str() + " vs " + rep.closed_form->str()));
    }
    if (c.regime == Regime::small_w) {
        long long g = closed_form_geometric(c);
        if (rep.geometric)
            rep.verdicts.push_back(verdict("geometric_equals_closed_form", *rep.geometric == g,
                                           std::to_string(*rep.geometric) + " vs " + std::to_string(g)));
        rep.stated_center = stated_central_value(c);
        Verdict v{"center_equals_stated_value", rep.value_at_s0 == *rep.stated_center ? Status::pass : Status::flag,
                  "brute force " + std::to_string(rep.value_at_s0) + ", stated " + std::to_string(*rep.stated_center)};
        if (v.status == Status::flag) v.detail += "; stated value disagrees with the enumeration";
        rep.verdicts.push_back(v);
    }
    if (rep.geometric)
        rep.verdicts.push_back(verdict("geometric_equals_center", *rep.geometric == rep.value_at_s0,
                                       std::to_string(*rep.geometric) + " vs " + std::to_string(rep.value_at_s0)));
    if (inst.v % 2 == 1)
        rep.verdicts.push_back(verdict("center_vanishes_for_odd_v", rep.value_at_s0 == 0, std::to_string(rep.value_at_s0)));
    if (c.regime == Regime::unit_w)
        rep.verdicts.push_back(verdict("unit_case_constant", rep.analytic.degree() == 0 && rep.analytic.low == 0,
                                       rep.analytic.str()));
    return rep;
}

struct AFLReport {
    int v = 0;
    OrbitalPolynomial analytic;
    long long derivative = 0;
    long long predicted = 0;
    bool prediction_is_derived = false;  // v > 1 extrapolates past the proved case
    std::vector<Verdict> verdicts;

    bool failed() const {
        for (auto& x : verdicts)
            if (x.status == Status::fail) return true;
        return false;
    }
};

inline AFLReport verify_afl(const OrbitInstance& inst, int guard = kDefaultGuard) {
    if (inst.v % 2 == 0) throw std::invalid_argument("not an AFL instance: v = " + std::to_string(inst.v) + " is even");
    AFLReport rep;
    rep.v = inst.v;
    rep.analytic = orbital_analytic(inst, {}, guard);
    rep.derivative = rep.analytic.afl_derivative();
    rep.predicted = (inst.v + 1) / 2;
    rep.prediction_is_derived = inst.v > 1;
    rep.verdicts.push_back(verdict("center_vanishes", rep.analytic.value_at_s0() == 0));
    rep.verdicts.push_back(verdict("derivative_equals_intersection_number", rep.derivative == rep.predicted,
                                   std::to_string(rep.derivative) + " vs " + std::to_string(rep.predicted) +
                                       (rep.prediction_is_derived ? " (derived prediction, not a proved value)" : "")));
    return rep;
}

}  // namespace orbfl
