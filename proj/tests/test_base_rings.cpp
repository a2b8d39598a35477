#include <orbfl/base_rings.hpp>
#include <orbfl/matrix.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace orbfl;

namespace {

Series poly(const ResidueField& f, int val, std::vector<int> c, int prec) {
    std::vector<ResidueField::Elem> e;
    for (int x : c) e.push_back(f.from_int(x));
    return Series::from_coeffs(f, val, e, prec);
}

Series random_series(std::mt19937& rng, const ResidueField& f, int val, int prec, bool unit_lead = true) {
    std::uniform_int_distribution<int> d(0, f.q() - 1);
    std::vector<ResidueField::Elem> c(prec - val);
    for (auto& x : c) x = static_cast<ResidueField::Elem>(d(rng));
    if (unit_lead && c[0] == 0) c[0] = 1;
    return Series::from_coeffs(f, val, c, prec);
}

}  // namespace

TEST(ResidueField, PrimeAndQuadraticTables) {
    auto f3 = ResidueField::prime(3);
    EXPECT_EQ(f3.q(), 3);
    EXPECT_EQ(f3.mul(2, 2), 1);
    EXPECT_EQ(f3.inv(2), 2);
    // x^2 + 1 is irreducible over F_3.
    auto f9 = ResidueField::quadratic(3, {1, 0});
    EXPECT_EQ(f9.q(), 9);
    auto x = f9.x();
    EXPECT_EQ(f9.mul(x, x), f9.from_int(-1));
    for (int a = 1; a < 9; ++a) EXPECT_EQ(f9.mul(a, f9.inv(a)), 1);
    EXPECT_THROW(ResidueField::quadratic(3, {2, 0}), std::invalid_argument);  // x^2 + 2 = (x-1)(x+1)
    EXPECT_THROW(ResidueField::prime(4), std::invalid_argument);
}

TEST(ResidueField, SquaresAndPrimitiveElement) {
    for (int p : {3, 5, 7}) {
        auto f = ResidueField::prime(p);
        int squares = 0;
        for (int a = 1; a < p; ++a) squares += f.is_square(a);
        EXPECT_EQ(squares, (p - 1) / 2);
        auto g = f.primitive_element();
        EXPECT_NE(f.pow(g, (p - 1) / 2), 1);
    }
    EXPECT_THROW(ResidueField::prime(2).is_square(1), UnsupportedError);
}

TEST(Series, AdditionCancels) {
    auto f = ResidueField::prime(3);
    auto a = poly(f, 1, {1, 1}, 5);
    auto b = poly(f, 1, {-1}, 5);
    auto s = a + b;
    EXPECT_EQ(s.valuation(), 2);
    EXPECT_EQ(s.coeff(2), 1);
    EXPECT_EQ(s.prec(), 5);
    EXPECT_EQ(a + Series::zero(f, 5), a);
    EXPECT_TRUE((poly(f, 0, {1, 2}, 5) + poly(f, 0, {2, 1}, 5)).is_zero());
}

TEST(Series, ProductInverseValuation) {
    auto f = ResidueField::prime(3);
    EXPECT_EQ(Series::t_power(f, 1) * Series::t_power(f, 2), Series::t_power(f, 3));
    auto f2 = ResidueField::prime(2);
    auto inv = poly(f2, 0, {1, 1}, 4).inv();
    // 1/(1+t) = 1 + t + t^2 + t^3 over F_2, checked by multiplying back.
    EXPECT_EQ(inv, poly(f2, 0, {1, 1, 1, 1}, 4));
    EXPECT_EQ(inv * poly(f2, 0, {1, 1}, 4), Series::one(f2, 4));
    EXPECT_EQ(poly(f, -2, {1, 1}, 10).valuation(), -2);
    EXPECT_THROW(Series::zero(f, 5).inv(), PrecisionError);
}

TEST(Series, InverseKeepsRelativePrecision) {
    auto f = ResidueField::prime(5);
    auto a = poly(f, 3, {2, 1}, 10);
    auto b = a.inv();
    EXPECT_EQ(b.valuation(), -3);
    EXPECT_EQ(b.prec(), 4);
    EXPECT_EQ(a * b, Series::one(f, 20));
}

TEST(Series, SquareRoot) {
    auto f = ResidueField::prime(5);
    auto a = poly(f, 2, {4, 1, 3}, 20);
    auto b = a * a;
    auto s = b.sqrt();
    EXPECT_EQ(s * s, b);
    EXPECT_FALSE(poly(f, 1, {1}, 20).is_square());
    EXPECT_FALSE(poly(f, 0, {2}, 20).is_square());
}

TEST(SeriesProperty, RingAxioms) {
    std::mt19937 rng(11);
    for (int p : {3, 5}) {
        for (auto f : {ResidueField::prime(p), ResidueField::quadratic(p, {p == 3 ? 1 : 2, 0})}) {
            for (int it = 0; it < 120; ++it) {
                auto a = random_series(rng, f, it % 3 - 1, 16);
                auto b = random_series(rng, f, it % 2, 16);
                auto c = random_series(rng, f, 0, 16);
                EXPECT_EQ((a * b) * c, a * (b * c));
                EXPECT_EQ(a * (b + c), a * b + a * c);
                EXPECT_EQ(a * b, b * a);
                EXPECT_EQ(a + b, b + a);
                EXPECT_EQ((a * b).valuation(), a.valuation() + b.valuation());
                EXPECT_EQ(c * c.inv(), Series::one(f, 16));
            }
        }
    }
}

TEST(Matrix, CharpolyAndInverse) {
    auto f = ResidueField::prime(3);
    Matrix m(2, 2, f);
    m(0, 0) = Series::from_int(f, 1);
    m(0, 1) = Series::t_power(f, 1);
    m(1, 0) = Series::from_int(f, 2);
    m(1, 1) = Series::from_int(f, 1);
    auto cp = m.charpoly();
    // x^2 - 2x + (1 - 2t)
    EXPECT_EQ(cp[1], Series::from_int(f, -2));
    EXPECT_EQ(cp[2], Series::one(f) - Series::t_power(f, 1).scale(2));
    EXPECT_EQ(m * m.inverse(), Matrix::identity(2, f));
}

TEST(MatrixProperty, BerkowitzMatchesCofactorDeterminant) {
    std::mt19937 rng(5);
    auto f = ResidueField::prime(3);
    for (int it = 0; it < 200; ++it) {
        Matrix m(3, 3, f, 12);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = random_series(rng, f, 0, 12, false);
        Series cof = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        EXPECT_EQ(m.det(), cof);
        EXPECT_EQ(m.trace(), -m.charpoly()[1]);
    }
}
