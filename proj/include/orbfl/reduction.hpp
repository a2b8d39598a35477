#pragma once

// Maximal-order reduction: the shifted generator eta, the reduced (w, z), and
// a comparison of orbital integrals over GL_4(F) and GL_2(L).
//
// Everything commuting with W = diag(M_w, M_w) is a 2x2 matrix over L.  L
// itself is modelled as Laurent series over its residue field in a
// uniformizer s of L:  s = g (g^2 = delta*t) for ramified L, s = t for
// unramified L with g read as the residue-field generator.

#include <orbfl/closed_forms.hpp>

#include <future>

namespace orbfl {

class LCoordinates {
public:
    LCoordinates(QuadAlg L, QuadElem w) : L_(std::move(L)), w_(std::move(w)), lf_(L_.field()) {
        if (!L_.is_canonical()) throw UnsupportedError("L must be in canonical form");
        switch (L_.kind()) {
            case AlgKind::ramified: delta_ = (-L_.nm()).coeff(1); break;
            case AlgKind::unramified:
                if (L_.field().deg() != 1) throw UnsupportedError("unramified L over a non-prime residue field");
                lf_ = L_.residue_field();
                break;
            case AlgKind::split: throw UnsupportedError("reduction needs L to be a field");
        }
    }

    const QuadAlg& L() const { return L_; }
    const QuadElem& w() const { return w_; }
    const ResidueField& field() const { return lf_; }
    int residue_degree() const { return L_.residue_degree(); }

    Series series(const QuadElem& x) const {
        const Series &a = x.a(), &b = x.b();
        const ResidueField& f = L_.field();
        if (L_.kind() == AlgKind::unramified) {
            int prec = std::min(a.prec(), b.prec());
            int lo = std::min(a.valuation(), b.valuation());
            if (lo >= prec) return Series::zero(lf_, prec);
            std::vector<ResidueField::Elem> c;
            for (int i = lo; i < prec; ++i) c.push_back(lf_.add(a.coeff(i), lf_.mul(b.coeff(i), lf_.x())));
            return Series::from_coeffs(lf_, lo, c, prec);
        }
        int prec = std::min(2 * a.prec(), 2 * b.prec() + 1);
        int lo = std::min(a.is_zero() ? kInfVal : 2 * a.valuation(), b.is_zero() ? kInfVal : 2 * b.valuation() + 1);
        if (lo >= prec) return Series::zero(lf_, prec);
        const auto dinv = f.inv(delta_);
        std::vector<ResidueField::Elem> c;
        for (int e = lo; e < prec; ++e) {
            int parity = e & 1, i = (e - parity) / 2;
            auto scale = i >= 0 ? f.pow(dinv, i) : f.pow(delta_, -i);
            c.push_back(f.mul(parity ? b.coeff(i) : a.coeff(i), scale));
        }
        return Series::from_coeffs(lf_, lo, c, prec);
    }

    // The L-element acting as a 2x2 block; throws if the block is not L-linear.
    QuadElem element(const Matrix& block) const {
        QuadElem y = L_.elem(block(0, 0), block(1, 0));
        if (y.mult_matrix() != block) throw std::invalid_argument("block does not commute with w");
        return y;
    }

    Matrix to_l(const Matrix& x) const {
        if (x.rows() % 2 || x.cols() % 2) throw std::invalid_argument("to_l needs even dimensions");
        Matrix m(x.rows() / 2, x.cols() / 2, lf_);
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) m(i, j) = series(element(x.block(2 * i, 2 * j, 2, 2)));
        return m;
    }

    // O_L-span of an F-lattice in L^n.
    Lattice to_l(const Lattice& lam) const {
        const Matrix& b = lam.basis();
        Matrix g(b.rows() / 2, b.cols(), lf_);
        for (int j = 0; j < b.cols(); ++j)
            for (int i = 0; i < g.rows(); ++i) g(i, j) = series(L_.elem(b(2 * i, j), b(2 * i + 1, j)));
        return hermite_form(g);
    }

    Series base(const Series& x) const { return series(L_.from_base(x)); }

private:
    QuadAlg L_;
    QuadElem w_;
    ResidueField lf_;
    ResidueField::Elem delta_ = 1;
};

struct ReducedPair {
    LCoordinates coords;
    EmbeddingPair pair;  // rank 2 over L: (zeta, eta)
    Matrix eta;           // 4x4 over F
    Matrix w_red, z_red;  // 2x2 over L
    bool one_plus_z_invertible = false;
    bool one_minus_z_invertible = false;

    const QuadAlg& base() const { return coords.L(); }
};

namespace detail {

inline bool invertible_over_o(const Matrix& m) {
    Series d = m.det();
    return !d.is_zero() && d.valuation() == 0;
}

// L = F[w] with w read off the W blocks.
inline LCoordinates coordinates_of(const EmbeddingPair& p) {
    if (p.h != 2) throw UnsupportedError("reduction is implemented for h = 2");
    auto [s, n] = w_minpoly(p.w);
    auto fw = canonical_field_of(s, n);
    Matrix mw = p.w.block(0, 0, 2, 2);
    if (p.w != Matrix::block_diag(mw, mw)) throw UnsupportedError("w must act diagonally on two copies of L");
    for (const QuadElem& w : {fw.w, fw.w.conj()})
        if (w.mult_matrix() == mw) return LCoordinates(fw.L, w);
    throw UnsupportedError("w blocks are not multiplication by a root of its minimal polynomial");
}

}  // namespace detail

inline ReducedPair shift_pair(const EmbeddingPair& p) {
    LCoordinates lc = detail::coordinates_of(p);
    if (conductor(lc.w()) != 0) throw std::invalid_argument("reduction needs O_F[w] = O_L (conductor 0)");
    const auto& f = p.z.field();
    Matrix I = Matrix::identity(4, f);
    bool plus = detail::invertible_over_o(I + p.z), minus = detail::invertible_over_o(I - p.z);
    if (!plus)
        throw std::invalid_argument(std::string("1 + z is not invertible over O_F (1 - z is ") +
                                    (minus ? "invertible)" : "not invertible either)"));

    const Matrix zeta = p.img1, zs = p.conj1();
    Matrix u = (I + p.z).inverse();
    Matrix eta = u * (zeta - zs) + zs;
    Matrix etas = u * (zs - zeta) + zeta;
    if (eta + etas != zeta + zs || eta * etas != zeta * zs)
        throw std::logic_error("shifted generator does not preserve trace and norm");

    QuadAlg alg = QuadAlg::from_minpoly(lc.base(p.alg1.tr()), lc.base(p.alg1.nm()));
    EmbeddingPair red = build_pair(alg, alg, lc.to_l(zeta), lc.to_l(eta), p.side);
    return {lc, red, eta, red.w, red.z, plus, minus};
}

// Closed forms (1 - z^2)^-1 (zs - zeta)^2 + 2 zeta zs and -z (1 - z^2)^-1 (zeta - zs)^2,
// checked against the coproduct of (zeta, eta).
inline std::pair<Matrix, Matrix> reduced_wz(const EmbeddingPair& p) {
    ReducedPair rp = shift_pair(p);
    const auto& f = p.z.field();
    Matrix I = Matrix::identity(4, f);
    if (!detail::invertible_over_o(I - p.z * p.z)) throw std::invalid_argument("1 - z^2 is not invertible over O_F");
    Matrix m = (I - p.z * p.z).inverse();
    Matrix d = p.img1 - p.conj1();
    Matrix w = m * d * d + p.img1 * p.conj1() * Series::from_int(f, 2);
    Matrix z = -(p.z * m * d * d);
    Matrix etas = conj_image(p.alg1, rp.eta);
    auto [w2, z2] = coproduct_wz(p.img1, p.conj1(), rp.eta, etas);
    if (w != w2 || z != z2) throw std::logic_error("reduced (w, z) closed forms disagree with the coproduct");
    if (rp.coords.to_l(w) != rp.pair.w || rp.coords.to_l(z) != rp.pair.z)
        throw std::logic_error("reduced (w, z) do not match the pair over L");
    return {w, z};
}

struct ReductionReport {
    int v = 0;
    bool one_plus_z_invertible = false;
    bool one_minus_z_invertible = false;
    bool reduced_rss = false;
    OrbitalPolynomial gl4, gl2;
    int lattices = 0;
    int exponent_mismatches = 0;
    int unmatched = 0;
    std::optional<long long> gl4_geometric, gl2_geometric;
    std::string geometric_note;
    std::vector<Verdict> verdicts;

    bool failed() const {
        for (auto& x : verdicts)
            if (x.status == Status::fail) return true;
        return false;
    }
};

struct ReducedTerm {
    Lattice lattice;
    int exponent;  // log_q units
};

// Lambda_- = O_L, Lambda_+ between b O_L and c^-1 O_L, stable under (zeta, eta).
inline std::vector<ReducedTerm> reduced_analytic_terms(const ReducedPair& rp) {
    if (coordinate_idempotent_rank(rp.pair.img1) != 1) throw UnsupportedError("expected zeta = diag(1, 0) over L");
    const Matrix& z = rp.pair.z;
    const Series &b = z(0, 1), &c = z(1, 0);
    if (b.is_zero() || c.is_zero()) throw std::invalid_argument("reduced pair is not regular semisimple");
    const auto& lf = rp.coords.field();
    Matrix top = Matrix::identity(2, lf), bot = Matrix::identity(2, lf);
    top(0, 0) = Series::t_power(lf, -c.valuation());
    bot(0, 0) = Series::t_power(lf, b.valuation());
    std::vector<ReducedTerm> out;
    for (auto& lam : enumerate_between(hermite_form(top), hermite_form(bot), {rp.pair.img1, rp.pair.img2},
                                       b.valuation() + c.valuation()))
        out.push_back({lam, transfer_exponent(lam, z, rp.pair.img1) * rp.coords.residue_degree()});
    return out;
}

// Lattices in L^2 stable under (zeta, eta), counted modulo s^Z: the
// representatives inside O_L^2 but not inside s O_L^2.
inline long long reduced_geometric_count(const ReducedPair& rp) {
    const Matrix &a = rp.pair.img1, &e = rp.pair.img2;
    const auto& lf = rp.coords.field();
    Matrix span(4, 4, lf);
    std::vector<Matrix> gens{Matrix::identity(2, lf), a, e, a * e};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) span(2 * j + i, k) = gens[k](i, j);
    if (span.det().is_zero()) throw std::invalid_argument("reduced pair does not generate an order");
    // s^k M_2(O_L) lies in the order spanned by gens.
    int k = hermite_form(span).det_valuation();
    Lattice o = Lattice::standard(2, lf);
    long long n = 0;
    for (auto& lam : enumerate_between(o, o.scaled(k), {a, e}, 2 * k))
        if (!o.scaled(1).contains(lam)) ++n;
    return n;
}

inline ReductionReport verify_orbit_reduction(const OrbitInstance& inst, int guard = kDefaultGuard) {
    if (inst.r != 0) throw std::invalid_argument("reduction needs conductor 0");
    ReductionReport rep;
    rep.v = inst.v;
    auto gl4_terms = std::async(std::launch::async, [&] { return analytic_terms(inst.analytic, inst.w, {}, guard); });
    ReducedPair rp = shift_pair(inst.analytic);
    reduced_wz(inst.analytic);
    rep.one_plus_z_invertible = rp.one_plus_z_invertible;
    rep.one_minus_z_invertible = rp.one_minus_z_invertible;
    rep.reduced_rss = regularity(rp.pair).is_rss;

    auto gl2_terms = reduced_analytic_terms(rp);
    auto terms = gl4_terms.get();
    rep.gl4 = polynomial_of(terms, inst.q());
    rep.gl2 = OrbitalPolynomial{{}, inst.q()};
    std::map<Lattice, int> by_lattice;
    for (auto& t : gl2_terms) {
        rep.gl2.add(t.exponent, 1);
        by_lattice.emplace(t.lattice, t.exponent);
    }
    rep.gl2.trim();
    for (auto& t : terms) {
        ++rep.lattices;
        auto it = by_lattice.find(rp.coords.to_l(t.lattice));
        if (it == by_lattice.end()) ++rep.unmatched;
        else if (it->second != t.exponent) ++rep.exponent_mismatches;
    }
    if (gl2_terms.size() != terms.size()) rep.unmatched += static_cast<int>(gl2_terms.size()) - static_cast<int>(terms.size());

    rep.verdicts.push_back(verdict("reduced_pair_rss", rep.reduced_rss));
    rep.verdicts.push_back(verdict("polynomials_equal", rep.gl4 == rep.gl2, rep.gl4.str() + " vs " + rep.gl2.str()));
    rep.verdicts.push_back(verdict("lattices_correspond", rep.unmatched == 0,
                                   std::to_string(rep.lattices) + " lattices, " + std::to_string(rep.unmatched) + " unmatched"));
    rep.verdicts.push_back(verdict("exponents_agree", rep.exponent_mismatches == 0,
                                   std::to_string(rep.exponent_mismatches) + " mismatches"));

    if (inst.geometric) {
        try {
            ReducedPair gp = shift_pair(*inst.geometric);
            rep.gl2_geometric = reduced_geometric_count(gp);
            rep.gl4_geometric = orbital_geometric(inst, {}, guard).count;
            rep.verdicts.push_back(verdict("geometric_counts_equal", *rep.gl4_geometric == *rep.gl2_geometric,
                                           std::to_string(*rep.gl4_geometric) + " vs " + std::to_string(*rep.gl2_geometric)));
        } catch (const std::invalid_argument& e) {
            rep.geometric_note = e.what();
            rep.verdicts.push_back({"geometric_counts_equal", Status::flag, std::string("not checked: ") + e.what()});
        }
    }
    return rep;
}

}  // namespace orbfl
