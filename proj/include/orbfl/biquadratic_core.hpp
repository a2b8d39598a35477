#pragma once

// Pairs of quadratic embeddings into Mat_2h(F), the coproduct elements w, z,
// regularity, matching, partner synthesis and the base-change certificate.

#include <orbfl/quadratic_algebras.hpp>

#include <array>

namespace orbfl {

enum class Side { geometric, analytic };

inline const char* side_name(Side s) { return s == Side::geometric ? "geometric" : "analytic"; }

struct RelationError : std::runtime_error {
    int relation;
    RelationError(int r, const std::string& what)
        : std::runtime_error("coproduct relation (" + std::to_string(r) + ") fails: " + what), relation(r) {}
};

struct MinpolyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IntermediateGenerator {
    Series trace3, norm3;
};

// tr(x^2) = tr(x)^2 - 2 N(x)
inline Series trace_of_square(const QuadAlg& k) {
    return k.tr() * k.tr() - k.nm().scale(k.field().from_int(2));
}

inline IntermediateGenerator intermediate_generator(const QuadAlg& k1, const QuadAlg& k2) {
    return {k1.tr() * k2.tr(), trace_of_square(k1) * k2.nm() + trace_of_square(k2) * k1.nm()};
}

// x^2 - tr x + nm evaluated at a matrix.
inline Matrix quad_residual(const Matrix& m, const Series& tr, const Series& nm) {
    return m * m - m * tr + Matrix::scalar(m.rows(), nm);
}

inline Matrix conj_image(const QuadAlg& k, const Matrix& img) {
    return Matrix::scalar(img.rows(), k.tr()) - img;
}

struct EmbeddingPair {
    int h;
    Side side;
    QuadAlg alg1, alg2;
    Matrix img1, img2, w, z;
    IntermediateGenerator inter;

    Matrix conj1() const { return conj_image(alg1, img1); }
    Matrix conj2() const { return conj_image(alg2, img2); }
};

inline std::pair<Matrix, Matrix> coproduct_wz(const Matrix& a1, const Matrix& c1, const Matrix& a2, const Matrix& c2) {
    return {a1 * a2 + c2 * c1, a2 * a1 - a1 * a2};
}

// Throws RelationError naming the first relation that fails.
inline void check_relations(const EmbeddingPair& p) {
    if (p.w * p.img1 != p.img1 * p.w) throw RelationError(1, "w does not commute with the first image");
    if (p.w * p.z != p.z * p.w) throw RelationError(2, "w does not commute with z");
    if (p.z * p.img1 != p.conj1() * p.z) throw RelationError(3, "z is not semilinear for the first image");
    if (quad_residual(p.w, p.inter.trace3, p.inter.norm3) != p.z * p.z)
        throw RelationError(4, "(w - varpi3)(w - varpi3^s) differs from z^2");
}

inline EmbeddingPair build_pair(const QuadAlg& alg1, const QuadAlg& alg2, const Matrix& img1, const Matrix& img2,
                                Side side = Side::geometric) {
    if (img1.rows() != img1.cols() || img1.rows() % 2 != 0 || img2.rows() != img1.rows())
        throw std::invalid_argument("images must be square of even size 2h");
    if (!quad_residual(img1, alg1.tr(), alg1.nm()).is_zero())
        throw MinpolyError("first image does not satisfy its minimal polynomial");
    if (!quad_residual(img2, alg2.tr(), alg2.nm()).is_zero())
        throw MinpolyError("second image does not satisfy its minimal polynomial");
    Matrix c1 = conj_image(alg1, img1), c2 = conj_image(alg2, img2);
    auto [w, z] = coproduct_wz(img1, c1, img2, c2);
    EmbeddingPair p{img1.rows() / 2, side, alg1, alg2, img1, img2, w, z, intermediate_generator(alg1, alg2)};
    check_relations(p);
    return p;
}

// img2 = (w + z - conj(img1) tr(varpi2)) (img1 - conj(img1))^-1
inline Matrix embed_partner_from_wz(const Matrix& img1, const Matrix& w, const Matrix& z, const QuadAlg& alg1,
                                    const QuadAlg& alg2) {
    Matrix c1 = conj_image(alg1, img1);
    IntermediateGenerator g = intermediate_generator(alg1, alg2);
    if (w * img1 != img1 * w || w * z != z * w || z * img1 != c1 * z ||
        quad_residual(w, g.trace3, g.norm3) != z * z)
        throw std::invalid_argument("embed_partner_from_wz: (w, z) violate the coproduct relations");
    Matrix d = img1 - c1;
    if (d.det().is_zero()) throw std::invalid_argument("embed_partner_from_wz: img1 - conj(img1) is not invertible");
    Matrix img2 = (w + z - c1 * alg2.tr()) * d.inverse();
    if (!quad_residual(img2, alg2.tr(), alg2.nm()).is_zero())
        throw MinpolyError("partner does not satisfy the minimal polynomial of the second generator");
    return img2;
}

// ---------------------------------------------------------------------------
// Regularity

struct RegularityReport {
    bool is_rss = false;
    bool w_separable = false;
    std::vector<QuadElem> w_minpoly_over_K1;  // highest degree first
    int z_det_valuation = kInfVal;
};

namespace detail {

// Columns (v1, A v1, v2, A v2) for the first admissible pair of test vectors.
inline std::optional<Matrix> module_basis(const Matrix& a) {
    const int n = a.rows();
    const ResidueField& f = a.field();
    std::vector<Matrix> cand;
    for (int i = 0; i < n; ++i) {
        Matrix v(n, 1, f);
        v(i, 0) = Series::one(f);
        cand.push_back(v);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Matrix v(n, 1, f);
            v(i, 0) = Series::one(f);
            v(j, 0) = Series::one(f);
            cand.push_back(v);
        }
    for (size_t x = 0; x < cand.size(); ++x)
        for (size_t y = x + 1; y < cand.size(); ++y) {
            Matrix p(n, n, f);
            p.set_block(0, 0, cand[x]);
            p.set_block(0, 1, a * cand[x]);
            p.set_block(0, 2, cand[y]);
            p.set_block(0, 3, a * cand[y]);
            Series d = p.det();
            if (!d.is_zero()) return p;
        }
    return std::nullopt;
}

}  // namespace detail

inline RegularityReport regularity(const EmbeddingPair& p) {
    RegularityReport rep;
    Series dz = p.z.det();
    rep.z_det_valuation = dz.is_zero() ? kInfVal : dz.valuation();
    if (p.h == 1) {
        // The centralizer is K1 itself, so w is a scalar of K1.
        rep.w_separable = true;
        rep.w_minpoly_over_K1 = {p.alg1.one()};
    } else if (p.h == 2) {
        auto basis = detail::module_basis(p.img1);
        if (!basis) throw PrecisionError("no K1-basis found at working precision");
        Matrix x = basis->inverse() * p.w * *basis;
        auto entry = [&](int i, int j) { return p.alg1.elem(x(2 * i, 2 * j), x(2 * i + 1, 2 * j)); };
        QuadElem a = entry(0, 0), b = entry(0, 1), c = entry(1, 0), d = entry(1, 1);
        QuadElem tr = a + d, det = a * d - b * c;
        rep.w_minpoly_over_K1 = {p.alg1.one(), -tr, det};
        QuadElem disc = tr * tr - det * Series::from_int(p.alg1.field(), 4);
        rep.w_separable = !disc.norm().is_zero();
    } else {
        throw UnsupportedError("regularity is implemented for h <= 2");
    }
    rep.is_rss = rep.w_separable && rep.z_det_valuation != kInfVal;
    return rep;
}

inline std::vector<Series> matching_invariant(const EmbeddingPair& p) {
    if (!regularity(p).is_rss) throw std::invalid_argument("matching is only defined for regular semisimple pairs");
    return p.w.charpoly();
}

inline bool same_invariant(const std::vector<Series>& a, const std::vector<Series>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// The field L = F[w] at h = 2

// Minimal polynomial x^2 - s x + p of w, read off charpoly(w) = (x^2 - s x + p)^2.
inline std::pair<Series, Series> w_minpoly(const Matrix& w) {
    auto cp = w.charpoly();
    if (cp.size() != 5) throw UnsupportedError("w_minpoly needs a 4x4 matrix");
    const auto& f = w.field();
    Series half = Series::constant(f, f.inv(f.from_int(2)), cp[1].prec());
    Series s = -cp[1] * half;
    Series p = (cp[2] - s * s) * half;
    if (quad_residual(w, s, p).is_zero()) return {s, p};
    throw std::invalid_argument("w does not generate a quadratic field");
}

struct FieldOfW {
    QuadAlg L;
    QuadElem w;
};

// A canonical model of F[x]/(x^2 - s x + p) together with the root playing w.
inline FieldOfW canonical_field_of(const Series& s, const Series& p) {
    QuadAlg raw = QuadAlg::from_minpoly(s, p);
    const auto& f = s.field();
    std::vector<QuadAlg> models;
    int prec = std::max(s.prec(), p.prec());
    switch (raw.kind()) {
        case AlgKind::unramified: models = {QuadAlg::unramified(f, prec)}; break;
        case AlgKind::ramified: models = {QuadAlg::ramified(f, false, prec), QuadAlg::ramified(f, true, prec)}; break;
        case AlgKind::split: models = {QuadAlg::split(f, prec)}; break;
    }
    for (auto& m : models)
        if (auto r = root_in(m, s, p)) return {m, *r};
    throw std::invalid_argument("w does not lie in a supported canonical field");
}

// z^2 = (w - varpi3)(w - varpi3^s) inside L
inline QuadElem z_squared(const QuadElem& w, const IntermediateGenerator& g) {
    return w * w - w * g.trace3 + w.alg().from_base(g.norm3);
}

// ---------------------------------------------------------------------------
// Analytic side: zeta0 = diag(1, 1, 0, 0), w block diagonal, z anti-diagonal

inline Matrix zeta0_matrix(const ResidueField& f, int prec = kDefaultPrec) {
    Matrix e = Matrix::identity(4, f, prec);
    e(2, 2) = Series::zero(f, prec);
    e(3, 3) = Series::zero(f, prec);
    return e;
}

// z0 = varpi_L^ceil(v/2) with v = v_L(z^2).
inline QuadElem partner_z0(const QuadElem& zsq) {
    int v = zsq.valuation();
    int k = (v + 1) / 2;
    QuadElem pi = zsq.alg().uniformizer();
    QuadElem z0 = zsq.alg().one();
    for (int i = 0; i < k; ++i) z0 = z0 * pi;
    return z0;
}

inline EmbeddingPair analytic_pair(const QuadElem& w, const IntermediateGenerator& g) {
    const QuadAlg& L = w.alg();
    const auto& f = L.field();
    const int prec = L.prec();
    QuadElem zsq = z_squared(w, g);
    QuadElem z0 = partner_z0(zsq);
    Matrix mw = w.mult_matrix();
    Matrix W = Matrix::block_diag(mw, mw);
    Matrix Z(4, 4, f, prec);
    Z.set_block(0, 2, (zsq / z0).mult_matrix());
    Z.set_block(2, 0, z0.mult_matrix());
    QuadAlg k0 = QuadAlg::split(f, prec);
    QuadAlg k3 = QuadAlg::from_minpoly(g.trace3, g.norm3);
    Matrix e = zeta0_matrix(f, prec);
    Matrix a3 = embed_partner_from_wz(e, W, Z, k0, k3);
    return build_pair(k0, k3, e, a3, Side::analytic);
}

inline EmbeddingPair build_matched_partner(const EmbeddingPair& pg) {
    if (pg.side != Side::geometric) throw std::invalid_argument("build_matched_partner expects a geometric pair");
    if (pg.h != 2) throw UnsupportedError("partner synthesis is implemented for h = 2");
    if (!regularity(pg).is_rss) throw std::invalid_argument("source pair is not regular semisimple");
    auto [s, p] = w_minpoly(pg.w);
    auto fw = canonical_field_of(s, p);
    EmbeddingPair pa = analytic_pair(fw.w, pg.inter);
    if (!same_invariant(pa.w.charpoly(), pg.w.charpoly())) throw std::logic_error("partner invariant mismatch");
    return pa;
}

// ---------------------------------------------------------------------------
// Geometric side model at h = 2: F^4 = L + L*zeta (zeta the K1 generator).

namespace detail {

// Multiplication by x + y*zeta on L + L*zeta, zeta^2 = zeta + c1.
inline Matrix lprime_mult(const QuadElem& x, const QuadElem& y, const Series& c1) {
    Matrix mx = x.mult_matrix(), my = y.mult_matrix();
    Matrix m(4, 4, mx.field(), mx.prec());
    m.set_block(0, 0, mx);
    m.set_block(0, 2, my * c1);
    m.set_block(2, 0, my);
    m.set_block(2, 2, mx + my);
    return m;
}

// x, y in O_L with x^2 + x y - c1 y^2 = u (a unit of a ramified L).
inline std::pair<QuadElem, QuadElem> solve_unit_norm(const QuadElem& u, const Series& c1) {
    const QuadAlg& L = u.alg();
    const ResidueField& f = L.field();
    auto u0 = u.a().coeff(0);
    auto c1r = c1.coeff(0);
    for (int xr = 0; xr < f.q(); ++xr)
        for (int yr = 0; yr < f.q(); ++yr) {
            auto X = static_cast<ResidueField::Elem>(xr), Y = static_cast<ResidueField::Elem>(yr);
            auto nrm = f.sub(f.add(f.mul(X, X), f.mul(X, Y)), f.mul(c1r, f.mul(Y, Y)));
            auto deriv = f.add(f.add(X, X), Y);
            if (nrm != u0 || deriv == 0) continue;
            QuadElem x = L.from_base(Series::constant(f, X, L.prec()));
            QuadElem y = L.from_base(Series::constant(f, Y, L.prec()));
            for (int it = 0; it < 2 * L.prec() + 4; ++it) {
                QuadElem r = x * x + x * y - y * y * c1 - u;
                if (r.is_zero()) break;
                x = x - r / (x + x + y);
            }
            return {x, y};
        }
    throw std::logic_error("residue norm equation has no solution");
}

}  // namespace detail

inline bool geometric_partner_exists(const QuadElem& w, const IntermediateGenerator& g) {
    const QuadAlg& L = w.alg();
    if (L.kind() == AlgKind::unramified) return true;
    if (L.kind() == AlgKind::split) return false;
    return z_squared(w, g).valuation() % 2 == 0;
}

// Geometric pair (K1 unramified canonical, K2) with the given w in L.
inline EmbeddingPair geometric_pair(const QuadAlg& k1, const QuadAlg& k2, const QuadElem& w) {
    const QuadAlg& L = w.alg();
    const auto& f = L.field();
    const int prec = L.prec();
    if (k1.kind() != AlgKind::unramified || !k1.is_canonical())
        throw std::invalid_argument("the first algebra must be the canonical unramified one");
    Series c1 = -k1.nm();
    IntermediateGenerator g = intermediate_generator(k1, k2);
    QuadElem P = z_squared(w, g);
    QuadElem x = L.one(), y = L.zero();
    if (L.kind() == AlgKind::unramified) {
        QuadElem rho = L.gen();
        y = (P - L.one()) / (rho + rho - L.one());
        x = L.one() - y * (L.one() - rho);
    } else if (L.kind() == AlgKind::ramified) {
        int v = P.valuation();
        if (v % 2 != 0) throw std::invalid_argument("no geometric partner: v_L(z^2) is odd for ramified L");
        QuadElem pik = L.one();
        for (int i = 0; i < v / 2; ++i) pik = pik * L.uniformizer();
        QuadElem u = P / (pik * pik);
        auto [ux, uy] = detail::solve_unit_norm(u, c1);
        x = pik * ux;
        y = pik * uy;
    } else {
        throw UnsupportedError("split L has no geometric model here");
    }
    Matrix I2 = Matrix::identity(2, f, prec);
    Matrix a1(4, 4, f, prec);
    a1.set_block(0, 2, I2 * c1);
    a1.set_block(2, 0, I2);
    a1.set_block(2, 2, I2);
    Matrix mw = w.mult_matrix();
    Matrix W = Matrix::block_diag(mw, mw);
    Matrix S(4, 4, f, prec);
    S.set_block(0, 0, I2);
    S.set_block(0, 2, I2);
    S.set_block(2, 2, -I2);
    Matrix Z = detail::lprime_mult(x, y, c1) * S;
    Matrix a2 = embed_partner_from_wz(a1, W, Z, k1, k2);
    return build_pair(k1, k2, a1, a2, Side::geometric);
}

// ---------------------------------------------------------------------------
// Base change to K1: K1 (x) F^4 = F^8, coordinate 2i + k for e_i (x) {1, zeta}_k.

namespace detail {

struct ScalarExtension {
    QuadAlg k1;

    Matrix ext(const Matrix& x) const {
        const int n = x.rows();
        Matrix m(2 * n, 2 * n, x.field(), x.prec());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m(2 * i, 2 * j) = x(i, j);
                m(2 * i + 1, 2 * j + 1) = x(i, j);
            }
        return m;
    }
    Matrix scal(const QuadElem& a, int n) const {
        Matrix ma = a.mult_matrix();
        Matrix m(2 * n, 2 * n, ma.field(), ma.prec());
        for (int i = 0; i < n; ++i) m.set_block(2 * i, 2 * i, ma);
        return m;
    }
    // K1-linear map with the given K1-columns.
    Matrix k1_linear(const std::vector<Matrix>& cols) const {
        const int n2 = cols[0].rows();
        Matrix zeta = scal(k1.gen(), n2 / 2);
        Matrix m(n2, n2, cols[0].field());
        for (size_t i = 0; i < cols.size(); ++i) {
            m.set_block(0, 2 * i, cols[i]);
            m.set_block(0, 2 * i + 1, zeta * cols[i]);
        }
        return m;
    }
};

}  // namespace detail

// Checks the explicit base-change identity and produces a conjugation of the
// geometric data over K1 onto the analytic pair.
inline bool verify_base_change(const EmbeddingPair& p1, const EmbeddingPair& p2) {
    if (p1.side == p2.side) throw std::invalid_argument("verify_base_change needs one pair from each side");
    const EmbeddingPair& pg = p1.side == Side::geometric ? p1 : p2;
    const EmbeddingPair& pa = p1.side == Side::geometric ? p2 : p1;
    if (pg.h != 2 || pa.h != 2) throw UnsupportedError("base change is implemented for h = 2");
    if (!same_invariant(matching_invariant(pg), matching_invariant(pa))) return false;
    if (pg.inter.trace3 != pa.inter.trace3 || pg.inter.norm3 != pa.inter.norm3) return false;
    const QuadAlg& k1 = pg.alg1;
    const auto& f = k1.field();
    detail::ScalarExtension X{k1};
    QuadElem zeta = k1.gen(), zs = zeta.conj();
    QuadElem den = zeta * zeta - zs * zs;
    QuadElem alpha = zeta / den, beta = -(zs / den);
    Matrix e0 = X.scal(alpha, 4) * X.ext(pg.img1) + X.scal(beta, 4) * X.ext(pg.conj1());
    Matrix I8 = Matrix::identity(8, f);
    Matrix W = X.ext(pg.w), Z = X.ext(pg.z);
    if (e0 * e0 != e0 || e0 * W != W * e0 || Z * e0 != (I8 - e0) * Z) return false;
    // c(1 (x) varpi3) = zeta (x) varpi2 + zeta^s (x) varpi2^s
    Matrix lhs = (W + Z - (I8 - e0) * pa.inter.trace3) * (e0 * Series::from_int(f, 2) - I8);
    Matrix rhs = X.scal(zeta, 4) * X.ext(pg.img2) + X.scal(zs, 4) * X.ext(pg.conj2());
    if (lhs != rhs) return false;
    // Cyclic bases [v, Wv, Zv, ZWv] on both sides.
    Matrix Wa = X.ext(pa.w), Za = X.ext(pa.z), Ea = X.ext(pa.img1);
    auto cyclic = [&](const Matrix& v, const Matrix& w, const Matrix& z) {
        return X.k1_linear({v, w * v, z * v, z * (w * v)});
    };
    Matrix e1(8, 1, f);
    e1(0, 0) = Series::one(f);
    Matrix pa_basis = cyclic(e1, Wa, Za);
    if (pa_basis.det().is_zero()) return false;
    for (int i = 0; i < 4; ++i) {
        Matrix u(8, 1, f);
        u(2 * i, 0) = Series::one(f);
        Matrix v = e0 * u;
        Matrix pg_basis = cyclic(v, W, Z);
        if (pg_basis.det().is_zero()) continue;
        Matrix g = pa_basis * pg_basis.inverse();
        Matrix a3 = X.ext(pa.img2);
        return g * e0 == Ea * g && g * W == Wa * g && g * Z == Za * g && g * rhs == a3 * g;
    }
    return false;
}

}  // namespace orbfl
