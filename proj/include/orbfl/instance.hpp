#pragma once

// Seeded generation of h = 2 orbit instances in the three regimes.

#include <orbfl/biquadratic_core.hpp>

#include <random>

namespace orbfl {

enum class Regime { unit_w, small_w, uniformizer_w };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::unit_w: return "unit_w";
        case Regime::small_w: return "small_w";
        case Regime::uniformizer_w: return "uniformizer_w";
    }
    return "?";
}

inline Regime parse_regime(const std::string& s) {
    if (s == "unit_w") return Regime::unit_w;
    if (s == "small_w") return Regime::small_w;
    if (s == "uniformizer_w") return Regime::uniformizer_w;
    throw std::invalid_argument("unknown regime: " + s);
}

struct InstanceSpec {
    int q = 3;
    AlgKind k1_kind = AlgKind::unramified;
    std::optional<AlgKind> k2_kind;  // derived from the regime when unset
    Regime regime = Regime::small_w;
    AlgKind L_kind = AlgKind::unramified;
    int r = 0;  // conductor of w (small_w, unit_w)
    int v = 1;  // log_q |z^2|_L (uniformizer_w)
    std::uint64_t seed = 0;
    int prec = kDefaultPrec;
};

struct OrbitInstance {
    InstanceSpec spec;
    QuadAlg k1, k2;
    QuadAlg L;
    QuadElem w;
    QuadElem zsq;
    int r;        // conductor of w
    int v;        // log_q |z^2|_L = v_F(N(z^2))
    int vL_zsq;   // normalized valuation of z^2 in L
    EmbeddingPair analytic;
    std::optional<EmbeddingPair> geometric;
    bool boundary = false;     // |w|_L = |varpi3|_L
    bool coquadratic = false;  // K2 isomorphic to K1

    int q() const { return spec.q; }
    const ResidueField& field() const { return L.field(); }
};

struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline Series random_unit(std::mt19937_64& rng, const ResidueField& f, int prec, int terms = 3) {
    std::uniform_int_distribution<int> unit(1, f.q() - 1), any(0, f.q() - 1);
    Series s = Series::constant(f, static_cast<ResidueField::Elem>(unit(rng)), prec);
    for (int k = 1; k < terms; ++k) s += Series::monomial(f, static_cast<ResidueField::Elem>(any(rng)), k, prec);
    return s;
}

inline Series random_integral(std::mt19937_64& rng, const ResidueField& f, int prec, int terms = 3) {
    std::uniform_int_distribution<int> any(0, f.q() - 1);
    Series s = Series::zero(f, prec);
    for (int k = 0; k < terms; ++k) s += Series::monomial(f, static_cast<ResidueField::Elem>(any(rng)), k, prec);
    return s;
}

}  // namespace detail

inline OrbitInstance generate(const InstanceSpec& spec) {
    if (spec.k1_kind != AlgKind::unramified) throw SpecError("K1 must be unramified");
    if (spec.q < 3) throw SpecError("q must be an odd prime");
    const ResidueField f = ResidueField::prime(spec.q);
    const int N = spec.prec;
    std::mt19937_64 rng(spec.seed);
    QuadAlg k1 = QuadAlg::unramified(f, N);
    const Series c1 = -k1.nm();
    auto t = [&](int e) { return Series::t_power(f, e, N); };

    AlgKind k2_natural = AlgKind::ramified;
    std::optional<QuadAlg> k2;
    std::optional<QuadAlg> L;
    std::optional<QuadElem> w;
    bool boundary = false, coquadratic = false;

    switch (spec.regime) {
        case Regime::small_w: {
            if (spec.r < 0) throw SpecError("conductor must be >= 0");
            if (spec.L_kind == AlgKind::split) throw SpecError("small_w needs L to be a field");
            if (spec.r == 0 && spec.L_kind == AlgKind::unramified) {
                // L = K3 = K1 with K2 split; w = varpi3 + t*u.
                k2_natural = AlgKind::split;
                k2 = QuadAlg::split(f, N);
                L = QuadAlg::unramified(f, N);
                w = L->elem(t(1) * detail::random_unit(rng, f, N), Series::one(f, N));
                boundary = true;
            } else if (spec.r == 0) {
                // L ramified, not isomorphic to K3; w a uniformizer of L.
                k2 = QuadAlg::ramified(f, false, N);
                L = QuadAlg::ramified(f, false, N);
                w = L->gen();
                boundary = true;
            } else {
                k2 = QuadAlg::ramified(f, false, N);
                L = spec.L_kind == AlgKind::unramified ? QuadAlg::unramified(f, N) : QuadAlg::ramified(f, false, N);
                Series a = t(1) * detail::random_integral(rng, f, N);
                Series b = t(spec.r) * detail::random_unit(rng, f, N);
                w = L->elem(a, b);
            }
            break;
        }
        case Regime::uniformizer_w: {
            if (spec.L_kind != AlgKind::ramified) throw SpecError("uniformizer_w forces L ramified");
            if (spec.v == 1) {
                // K2 unramified with minpoly x^2 - x - c', c' = -c/(1+4c) + t; K3 splits.
                k2_natural = AlgKind::unramified;
                Series eps = Series::one(f, N) + c1.scale(f.from_int(4));
                Series cp = -(c1 / eps) + t(1);
                k2 = QuadAlg::from_minpoly(Series::one(f, N), -cp);
                L = QuadAlg::ramified(f, false, N);
                w = L->gen();
                coquadratic = true;
            } else if (spec.v == 2) {
                k2 = QuadAlg::ramified(f, false, N);
                L = QuadAlg::ramified(f, false, N);
                w = L->gen();
                boundary = true;
            } else if (spec.v % 2 == 1 && spec.v >= 3) {
                // L = K3; w = varpi3 + t^((v-1)/2) u.
                k2 = QuadAlg::ramified(f, false, N);
                L = QuadAlg::ramified(f, true, N);
                auto g = intermediate_generator(k1, *k2);
                auto v3 = root_in(*L, g.trace3, g.norm3);
                if (!v3) throw std::logic_error("varpi3 is not in L");
                std::uniform_int_distribution<int> unit(1, spec.q - 1);
                w = *v3 + L->from_base(t((spec.v - 1) / 2).scale(f.from_int(unit(rng))));
            } else {
                throw SpecError("uniformizer_w supports v = 1, 2 and odd v >= 3");
            }
            break;
        }
        case Regime::unit_w: {
            if (spec.r < 0 || spec.r > 1) throw SpecError("unit_w supports conductor 0 or 1");
            if (spec.L_kind == AlgKind::split) throw SpecError("unit_w needs L to be a field");
            k2 = QuadAlg::ramified(f, false, N);
            L = spec.L_kind == AlgKind::unramified ? QuadAlg::unramified(f, N) : QuadAlg::ramified(f, false, N);
            w = L->elem(Series::one(f, N), t(spec.r) * detail::random_unit(rng, f, N));
            break;
        }
    }
    if (spec.k2_kind && *spec.k2_kind != k2_natural)
        throw SpecError(std::string("this regime needs K2 ") + kind_name(k2_natural) + ", spec asks for " +
                        kind_name(*spec.k2_kind));

    IntermediateGenerator g = intermediate_generator(k1, *k2);
    QuadElem zsq = z_squared(*w, g);
    OrbitInstance inst{spec,
                       k1,
                       *k2,
                       *L,
                       *w,
                       zsq,
                       conductor(*w),
                       zsq.norm().valuation(),
                       zsq.valuation(),
                       analytic_pair(*w, g),
                       std::nullopt,
                       boundary,
                       coquadratic};
    if (geometric_partner_exists(*w, g)) inst.geometric = geometric_pair(k1, *k2, *w);

    // Re-validation.
    if (!regularity(inst.analytic).is_rss) throw std::logic_error("generated analytic pair is not regular semisimple");
    if (inst.geometric) {
        if (!regularity(*inst.geometric).is_rss) throw std::logic_error("generated geometric pair is not regular semisimple");
        if (!same_invariant(inst.geometric->w.charpoly(), inst.analytic.w.charpoly()))
            throw std::logic_error("generated pairs do not match");
    }
    if (spec.regime == Regime::small_w && inst.r != spec.r) throw std::logic_error("conductor mismatch");
    if (spec.regime == Regime::uniformizer_w && (inst.v != spec.v || w->valuation() != 1))
        throw std::logic_error("uniformizer instance has the wrong invariants");
    return inst;
}

}  // namespace orbfl
