#include <orbfl/orbital_integrals.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace orbfl;

namespace {

const ResidueField F3 = ResidueField::prime(3);

OrbitInstance small_w(int q, AlgKind lk, int r, std::uint64_t seed = 0) {
    InstanceSpec s;
    s.q = q;
    s.regime = Regime::small_w;
    s.L_kind = lk;
    s.r = r;
    s.seed = seed;
    return generate(s);
}

OrbitInstance uniformizer(int v, int q = 3) {
    InstanceSpec s;
    s.q = q;
    s.regime = Regime::uniformizer_w;
    s.L_kind = AlgKind::ramified;
    s.v = v;
    return generate(s);
}

OrbitInstance unit_w(AlgKind lk, int r, std::uint64_t seed = 0) {
    InstanceSpec s;
    s.regime = Regime::unit_w;
    s.L_kind = lk;
    s.r = r;
    s.seed = seed;
    return generate(s);
}

Matrix random_matrix(std::mt19937& rng, const ResidueField& f, int n, int max_val) {
    std::uniform_int_distribution<int> c(0, f.q() - 1), e(0, max_val);
    Matrix m(n, n, f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Series::monomial(f, c(rng), e(rng)) + Series::monomial(f, c(rng), e(rng));
    return m;
}

Matrix random_nonsingular(std::mt19937& rng, const ResidueField& f, int n, int max_val) {
    for (;;) {
        Matrix m = random_matrix(rng, f, n, max_val);
        if (!m.det().is_zero()) return m;
    }
}

// Elementary divisors (a, b), a <= b, of l2 relative to l1 at rank 2.
std::pair<int, int> elementary_divisors(const Lattice& l1, const Lattice& l2) {
    Matrix g = l1.basis().inverse() * l2.basis();
    int a = g.min_valuation();
    return {a, g.det().valuation() - a};
}

// Sublattices of index q: span(t l, v) for a line v in l / t l.
std::vector<Lattice> index_one_sublattices(const Lattice& l) {
    const auto& f = l.field();
    const Matrix& b = l.basis();
    std::vector<Lattice> out;
    for (int c = 0; c <= f.q(); ++c) {
        Matrix v = c < f.q() ? b.col(0) + b.col(1) * Series::from_int(f, c) : b.col(1);
        out.push_back(hermite_form(Matrix::hstack(b.shift(1), v)));
    }
    return out;
}

long long listed_chains(const Lattice& start, const Lattice& target, int steps) {
    if (steps == 0) return start == target ? 1 : 0;
    long long n = 0;
    for (auto& s : index_one_sublattices(start))
        if (s.contains(target)) n += listed_chains(s, target, steps - 1);
    return n;
}

}  // namespace

TEST(Polynomial, Functionals) {
    OrbitalPolynomial one{{1, 1}, 3};
    EXPECT_EQ(afl_derivative(one), 1);
    EXPECT_EQ(one.value_at_s0(), 0);
    OrbitalPolynomial four{{1, 1, 1, 1}, 3};
    EXPECT_EQ(afl_derivative(four), 2);
    OrbitalPolynomial c{{7}, 3};
    EXPECT_EQ(afl_derivative(c), 0);
    EXPECT_EQ(c.value_at_s0(), 7);
}

TEST(Polynomial, LaurentAccumulation) {
    OrbitalPolynomial p{{}, 3};
    p.add(1, 2);
    p.add(-1, 1);
    p.add(0, 0);
    EXPECT_EQ(p.low, -1);
    EXPECT_EQ(p.coeff(1), 2);
    EXPECT_EQ(p.value_at_s0(), -1 - 2);
    EXPECT_EQ(p.afl_derivative(), -1 + 2);
}

TEST(HeckeFunction, Parse) {
    auto f = HeckeFunction::parse("1,2,1");
    EXPECT_EQ(f.shift, 1);
    EXPECT_EQ(f.steps, (std::vector<int>{2, 1}));
    EXPECT_EQ(f.str(), "1,2,1");
    EXPECT_TRUE(HeckeFunction::parse("0").is_unit());
}

TEST(Transfer, IsomorphismGivesZero) {
    Matrix z(4, 4, F3);
    z.set_block(0, 2, Matrix::identity(2, F3));
    z.set_block(2, 0, Matrix::identity(2, F3));
    EXPECT_EQ(transfer_exponent(Lattice::standard(4, F3), z, zeta0_matrix(F3)), 0);
}

TEST(Transfer, UniformizerBlock) {
    Matrix z(4, 4, F3);
    z.set_block(0, 2, Matrix::identity(2, F3));
    z.set_block(2, 0, Matrix::identity(2, F3).shift(1));
    EXPECT_EQ(transfer_exponent(Lattice::standard(4, F3), z, zeta0_matrix(F3)), 2);
}

TEST(Transfer, MatchedPartnerStandardLattice) {
    // v_L(z^2) = 2 in normalized valuation only for ramified L.
    auto ram = small_w(3, AlgKind::ramified, 1);
    EXPECT_EQ(ram.vL_zsq, 2);
    EXPECT_EQ(transfer_exponent(Lattice::standard(4, F3), ram.analytic.z, ram.analytic.img1), 1);
    auto unr = small_w(3, AlgKind::unramified, 1);
    EXPECT_EQ(transfer_exponent(Lattice::standard(4, F3), unr.analytic.z, unr.analytic.img1), 2);
}

TEST(Transfer, InstabilityRaises) {
    auto inst = small_w(3, AlgKind::unramified, 1);
    Lattice bad = hermite_form(Matrix::identity(4, F3).shift(0) + Matrix::identity(4, F3).shift(-2) * Series::zero(F3));
    Matrix g = Matrix::identity(4, F3);
    g(2, 0) = Series::t_power(F3, -1);
    EXPECT_THROW(transfer_exponent(bad.image(g), inst.analytic.z, inst.analytic.img1), StabilityError);
}

TEST(Hecke, Examples) {
    Lattice l = Lattice::standard(2, F3);
    Matrix m = Matrix::identity(2, F3);
    m(0, 0) = Series::t_power(F3, 1);
    HeckeFunction t1{0, {1}}, t11{0, {1, 1}};
    EXPECT_EQ(hecke_eval(t1, l, hermite_form(m)), 1);
    Matrix cyc = Matrix::identity(2, F3);
    cyc(0, 0) = Series::t_power(F3, 2);
    EXPECT_EQ(hecke_eval(t11, l, hermite_form(cyc)), 1);
    EXPECT_EQ(hecke_eval(t11, l, l.scaled(1)), 4);
    EXPECT_EQ(hecke_eval(t1, l, l.scaled(2)), 0);
    EXPECT_EQ(hecke_eval(HeckeFunction{1, {}}, l, l.scaled(1)), 1);
}

TEST(Analytic, ReferenceValues) {
    for (int q : {3, 5}) EXPECT_EQ(orbital_analytic(small_w(q, AlgKind::unramified, 0)).coeffs, (std::vector<long long>{1, 0, 1}));
    EXPECT_EQ(orbital_analytic(small_w(3, AlgKind::ramified, 1)).coeffs, (std::vector<long long>{4, 7, 4}));
    EXPECT_EQ(orbital_analytic(uniformizer(3)).coeffs, (std::vector<long long>{1, 1, 1, 1}));
}

TEST(Analytic, ShiftedUnitMatchesUnit) {
    auto inst = small_w(3, AlgKind::ramified, 1);
    EXPECT_EQ(orbital_analytic(inst, HeckeFunction{1, {}}), orbital_analytic(inst));
    EXPECT_EQ(orbital_analytic(inst, HeckeFunction{-2, {}}), orbital_analytic(inst));
}

TEST(Analytic, HeckeT1FrozenValues) {
    // Frozen from the direct evaluation; the window and pruning are checked
    // against the unit case above.
    auto inst = small_w(3, AlgKind::ramified, 0);
    auto p = orbital_analytic(inst, HeckeFunction{0, {1}});
    EXPECT_EQ(p.low, -1);
    EXPECT_TRUE(p.is_palindromic());
    EXPECT_EQ(orbital_analytic(inst, HeckeFunction{1, {1}}), p);
    EXPECT_EQ(orbital_analytic(inst, HeckeFunction{0, {-1}}).coeffs.size(), 0u);
}

TEST(Geometric, ReferenceValues) {
    EXPECT_EQ(orbital_geometric(small_w(3, AlgKind::unramified, 2)).count, 2);
    EXPECT_EQ(orbital_geometric(small_w(3, AlgKind::ramified, 2)).count, 1);
}

TEST(Geometric, UnitCaseMatchesAnalytic) {
    for (auto lk : {AlgKind::unramified, AlgKind::ramified})
        for (int r : {0, 1}) {
            auto inst = unit_w(lk, r);
            auto g = orbital_geometric(inst);
            auto a = orbital_analytic(inst);
            ASSERT_EQ(a.coeffs.size(), 1u);
            EXPECT_EQ(g.count, a.coeffs[0]) << kind_name(lk) << " r=" << r;
            EXPECT_EQ(g.strict_orbits, r + 1);
        }
}

TEST(Geometric, RejectsUnsupported) {
    auto inst = uniformizer(3);
    EXPECT_FALSE(inst.geometric.has_value());
    EXPECT_THROW(orbital_geometric(inst), std::invalid_argument);
    auto ok = small_w(3, AlgKind::ramified, 1);
    EXPECT_THROW(orbital_geometric(ok, HeckeFunction{0, {1}}), UnsupportedError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(OrbitalProperty, CharacterIdentity) {
    std::mt19937 rng(5);
    auto inst = small_w(3, AlgKind::unramified, 1);
    const Matrix e = inst.analytic.img1;
    int cases = 0;
    for (int it = 0; it < 220; ++it, ++cases) {
        Matrix hp = random_nonsingular(rng, F3, 2, 2), hm = random_nonsingular(rng, F3, 2, 2);
        Matrix h = Matrix::block_diag(hp, hm);
        // Scale z so that both lattices are z-stable.
        int k = std::max(0, -(h.inverse() * inst.analytic.z * h).min_valuation());
        Matrix z = inst.analytic.z.shift(k);
        Lattice o = Lattice::standard(4, F3);
        Lattice ho = o.image(h);
        EXPECT_EQ(transfer_exponent(ho, z, e),
                  transfer_exponent(o, z, e) + hp.det().valuation() - hm.det().valuation());
    }
    EXPECT_GE(cases, 200);
}

TEST(OrbitalProperty, ScalingByLInvariance) {
    int cases = 0;
    for (auto lk : {AlgKind::unramified, AlgKind::ramified})
        for (int r = 1; r <= 2; ++r) {
            auto inst = small_w(3, lk, r);
            for (auto& t : analytic_terms(inst.analytic, inst.w)) {
                Matrix l = inst.analytic.w;
                for (int k = 1; k <= 2; ++k, l = l * inst.analytic.w) {
                    Lattice sc = t.lattice.image(l);
                    EXPECT_EQ(transfer_exponent(sc, inst.analytic.z, inst.analytic.img1), t.exponent);
                    ++cases;
                }
            }
        }
    EXPECT_GE(cases, 200);
}

TEST(OrbitalProperty, FastPathMatchesDirectEnumeration) {
    int cases = 0;
    for (int q : {3, 5})
        for (auto lk : {AlgKind::unramified, AlgKind::ramified})
            for (int r = 0; r <= (q == 3 ? 3 : 2); ++r)
                for (std::uint64_t seed = 0; seed < 4; ++seed) {
                    auto inst = small_w(q, lk, r, seed);
                    auto terms = analytic_terms(inst.analytic, inst.w);
                    EXPECT_EQ(orbital_analytic(inst), polynomial_of(terms, q));
                    for (auto& t : terms)
                        EXPECT_EQ(transfer_exponent(t.lattice, inst.analytic.z, inst.analytic.img1), t.exponent);
                    cases += static_cast<int>(terms.size() > 0);
                }
    for (int v : {1, 2, 3, 5}) {
        auto inst = uniformizer(v);
        EXPECT_EQ(orbital_analytic(inst), polynomial_of(analytic_terms(inst.analytic, inst.w), 3));
        ++cases;
    }
    EXPECT_GE(cases, 50);
}

TEST(OrbitalProperty, PalindromicAndOddVanishing) {
    int cases = 0;
    for (int q : {3, 5}) {
        for (auto lk : {AlgKind::unramified, AlgKind::ramified})
            for (int r = 0; r <= 3; ++r)
                for (std::uint64_t seed = 0; seed < 12; ++seed, ++cases) {
                    auto p = orbital_analytic(small_w(q, lk, r, seed));
                    EXPECT_TRUE(p.is_palindromic()) << p;
                }
        for (int v : {1, 2, 3, 5})
            for (std::uint64_t seed = 0; seed < 4; ++seed, ++cases) {
                InstanceSpec s;
                s.q = q;
                s.regime = Regime::uniformizer_w;
                s.L_kind = AlgKind::ramified;
                s.v = v;
                s.seed = seed;
                auto inst = generate(s);
                auto p = orbital_analytic(inst);
                EXPECT_TRUE(p.is_palindromic()) << p;
                if (inst.v % 2 == 1) {
                    EXPECT_EQ(p.value_at_s0(), 0) << "v=" << inst.v;
                }
            }
    }
    EXPECT_GE(cases, 200);
}

TEST(OrbitalProperty, HeckeUnitIsEquality) {
    std::mt19937 rng(17);
    int cases = 0;
    for (int it = 0; it < 240; ++it, ++cases) {
        Lattice a = hermite_form(random_nonsingular(rng, F3, 2, 2));
        Lattice b = it % 3 == 0 ? a : hermite_form(random_nonsingular(rng, F3, 2, 2));
        EXPECT_EQ(hecke_eval(HeckeFunction{}, a, b), a == b ? 1 : 0);
    }
    EXPECT_GE(cases, 200);
}

TEST(OrbitalProperty, HeckeMatchesDoubleCosetsAndChainListing) {
    std::mt19937 rng(19);
    const int q = 3;
    HeckeFunction t1{0, {1}}, t11{0, {1, 1}}, r1{1, {}};
    int cases = 0;
    for (int it = 0; it < 240; ++it) {
        Lattice l1 = hermite_form(random_nonsingular(rng, F3, 2, 1));
        Matrix g = random_nonsingular(rng, F3, 2, 1);
        if (g.det().valuation() > 2) continue;
        if (it % 4 == 0) g = Matrix::identity(2, F3).shift(1);
        Lattice l2 = hermite_form(l1.basis() * g);
        auto [a, b] = elementary_divisors(l1, l2);
        long long want1 = (a == 0 && b == 1) ? 1 : 0;
        long long want11 = (a == 0 && b == 2) ? 1 : (a == 1 && b == 1) ? q + 1 : 0;
        long long wantr = (a == 1 && b == 1) ? 1 : 0;
        EXPECT_EQ(hecke_eval(t1, l1, l2), want1);
        EXPECT_EQ(hecke_eval(t11, l1, l2), want11);
        EXPECT_EQ(hecke_eval(r1, l1, l2), wantr);
        if (a >= 0) {
            EXPECT_EQ(hecke_eval(t1, l1, l2), listed_chains(l1, l2, 1));
            EXPECT_EQ(hecke_eval(t11, l1, l2), listed_chains(l1, l2, 2));
        }
        ++cases;
    }
    EXPECT_GE(cases, 200);
}
