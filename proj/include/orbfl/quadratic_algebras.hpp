#pragma once

// Quadratic etale algebras K = F[g], g^2 = tr*g - nm, elements a + b*g.
//
// Canonical models:
//   unramified  g^2 = g + c      (1 + 4c a non-square unit)
//   ramified    g^2 = d          (d = t or eps*t, eps = 1 + 4c)
//   split       g^2 = g          (g = (1, 0); a + b*g = (a + b, a))

#include <orbfl/lattice_engine.hpp>

#include <map>
#include <memory>
#include <optional>

namespace orbfl {

enum class AlgKind { split, unramified, ramified };

inline const char* kind_name(AlgKind k) {
    switch (k) {
        case AlgKind::split: return "split";
        case AlgKind::unramified: return "unramified";
        case AlgKind::ramified: return "ramified";
    }
    return "?";
}

inline AlgKind parse_kind(const std::string& s) {
    if (s == "split") return AlgKind::split;
    if (s == "unramified") return AlgKind::unramified;
    if (s == "ramified") return AlgKind::ramified;
    throw std::invalid_argument("unknown algebra kind: " + s);
}

// Smallest c in F_p with 1 + 4c a non-zero non-square.
inline ResidueField::Elem canonical_c(const ResidueField& f) {
    f.require_odd();
    for (int c = 0; c < f.q(); ++c) {
        auto e = f.add(1, f.mul(f.from_int(4), static_cast<ResidueField::Elem>(c)));
        if (e != 0 && !f.is_square(e)) return static_cast<ResidueField::Elem>(c);
    }
    throw std::logic_error("no non-square found");
}

inline ResidueField::Elem canonical_nonsquare(const ResidueField& f) {
    return f.add(1, f.mul(f.from_int(4), canonical_c(f)));
}

class QuadElem;

class QuadAlg {
public:
    static QuadAlg unramified(const ResidueField& f, int prec = kDefaultPrec) {
        return QuadAlg(AlgKind::unramified, Series::one(f, prec), -Series::constant(f, canonical_c(f), prec));
    }
    // d = t, or eps*t with eps the canonical non-square when nonsquare_class is set.
    static QuadAlg ramified(const ResidueField& f, bool nonsquare_class = false, int prec = kDefaultPrec) {
        f.require_odd();
        auto d = Series::monomial(f, nonsquare_class ? canonical_nonsquare(f) : 1, 1, prec);
        return QuadAlg(AlgKind::ramified, Series::zero(f, prec), -d);
    }
    static QuadAlg split(const ResidueField& f, int prec = kDefaultPrec) {
        f.require_odd();
        return QuadAlg(AlgKind::split, Series::one(f, prec), Series::zero(f, prec));
    }
    // The algebra F[x]/(x^2 - tr x + nm), classified by its discriminant.
    static QuadAlg from_minpoly(const Series& tr, const Series& nm) {
        tr.field().require_odd();
        Series disc = tr * tr - nm.scale(tr.field().from_int(4));
        if (disc.is_zero()) throw std::invalid_argument("minimal polynomial is inseparable at working precision");
        AlgKind k;
        if (disc.valuation() % 2 != 0) k = AlgKind::ramified;
        else k = tr.field().is_square(disc.leading()) ? AlgKind::split : AlgKind::unramified;
        return QuadAlg(k, tr, nm);
    }

    AlgKind kind() const { return d_->kind; }
    bool is_field() const { return d_->kind != AlgKind::split; }
    const Series& tr() const { return d_->tr; }
    const Series& nm() const { return d_->nm; }
    const ResidueField& field() const { return d_->tr.field(); }
    int prec() const { return std::min(d_->tr.prec(), d_->nm.prec()); }
    Series disc() const { return tr() * tr() - nm().scale(field().from_int(4)); }
    // x^2 + m[1] x + m[0]
    std::pair<Series, Series> minpoly() const { return {nm(), -tr()}; }

    int ramification_index() const { return kind() == AlgKind::ramified ? 2 : 1; }
    int residue_degree() const { return kind() == AlgKind::unramified ? 2 : 1; }

    // True when the model is one of the canonical normal forms above, so that
    // {1, g} is an O_F-basis of the maximal order.
    bool is_canonical() const {
        const auto& f = field();
        switch (kind()) {
            case AlgKind::unramified:
                return tr() == Series::one(f, prec()) && nm().valuation() == 0 && nm().from(1).is_zero();
            case AlgKind::ramified: return tr().is_zero() && nm().valuation() == 1;
            case AlgKind::split: return tr() == Series::one(f, prec()) && nm().is_zero();
        }
        return false;
    }

    // Multiplication by g in the basis {1, g}.
    Matrix gen_matrix() const {
        Matrix m(2, 2, field(), prec());
        m(0, 1) = -nm();
        m(1, 0) = Series::one(field(), prec());
        m(1, 1) = tr();
        return m;
    }

    // Residue field of the maximal order, for canonical models.
    ResidueField residue_field() const {
        if (kind() != AlgKind::unramified) return field();
        if (field().deg() != 1) throw UnsupportedError("unramified extension of a non-prime residue field");
        // x^2 - x + nm
        return ResidueField::quadratic(field().p(), {nm().coeff(0), field().p() - 1});
    }

    bool operator==(const QuadAlg& o) const {
        return d_ == o.d_ || (kind() == o.kind() && tr() == o.tr() && nm() == o.nm());
    }
    bool operator!=(const QuadAlg& o) const { return !(*this == o); }

    QuadElem elem(const Series& a, const Series& b) const;
    QuadElem from_base(const Series& a) const;
    QuadElem gen() const;
    QuadElem one() const;
    QuadElem zero() const;
    // t for unramified/split, g for canonical ramified.
    QuadElem uniformizer() const;

private:
    struct Data {
        AlgKind kind;
        Series tr, nm;
    };
    std::shared_ptr<const Data> d_;
    QuadAlg(AlgKind k, Series tr, Series nm)
        : d_(std::make_shared<const Data>(Data{k, std::move(tr), std::move(nm)})) {}
};

class QuadElem {
public:
    QuadElem(QuadAlg alg, Series a, Series b) : alg_(std::move(alg)), a_(std::move(a)), b_(std::move(b)) {}

    const QuadAlg& alg() const { return alg_; }
    const Series& a() const { return a_; }
    const Series& b() const { return b_; }

    QuadElem operator+(const QuadElem& o) const { return {alg_, a_ + o.a_, b_ + o.b_}; }
    QuadElem operator-(const QuadElem& o) const { return {alg_, a_ - o.a_, b_ - o.b_}; }
    QuadElem operator-() const { return {alg_, -a_, -b_}; }
    QuadElem operator*(const QuadElem& o) const {
        check(o);
        Series bb = b_ * o.b_;
        return {alg_, a_ * o.a_ - alg_.nm() * bb, a_ * o.b_ + o.a_ * b_ + alg_.tr() * bb};
    }
    QuadElem operator*(const Series& s) const { return {alg_, a_ * s, b_ * s}; }
    QuadElem shift(int k) const { return {alg_, a_.shift(k), b_.shift(k)}; }

    QuadElem conj() const { return {alg_, a_ + b_ * alg_.tr(), -b_}; }
    Series trace() const { return a_ + a_ + b_ * alg_.tr(); }
    Series norm() const { return a_ * a_ + a_ * b_ * alg_.tr() + b_ * b_ * alg_.nm(); }
    QuadElem inv() const {
        Series n = norm();
        if (n.is_zero()) throw PrecisionError("element is not certified invertible");
        Series ni = n.inv();
        return conj() * ni;
    }
    QuadElem operator/(const QuadElem& o) const { return *this * o.inv(); }

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool operator==(const QuadElem& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const QuadElem& o) const { return !(*this == o); }

    // Split-algebra coordinates (x, y) with g = (1, 0).
    std::pair<Series, Series> split_pair() const {
        if (alg_.kind() != AlgKind::split || !alg_.is_canonical())
            throw UnsupportedError("split coordinates need the canonical split model");
        return {a_ + b_, a_};
    }

    // Normalized valuation of L (uniformizer has valuation 1).  For split
    // algebras, the minimum over both factors.
    int valuation() const {
        if (alg_.kind() == AlgKind::split) {
            auto [x, y] = split_pair();
            return std::min(x.valuation(), y.valuation());
        }
        Series n = norm();
        if (n.is_zero()) throw PrecisionError("valuation of zero-up-to-precision");
        return alg_.kind() == AlgKind::ramified ? n.valuation() : n.valuation() / 2;
    }
    bool is_integral() const {
        if (is_zero()) return true;
        if (alg_.is_canonical()) return a_.is_integral() && b_.is_integral();
        return valuation() >= 0;
    }
    bool is_unit() const { return !is_zero() && is_integral() && norm().valuation() == 0; }

    // Multiplication by this element on F^2 = F + F g.
    Matrix mult_matrix() const {
        Matrix m(2, 2, a_.field(), std::min(a_.prec(), b_.prec()));
        m(0, 0) = a_;
        m(0, 1) = -(b_ * alg_.nm());
        m(1, 0) = b_;
        m(1, 1) = a_ + b_ * alg_.tr();
        return m;
    }
    // Column vector (a, b).
    Matrix vec() const {
        Matrix v(2, 1, a_.field());
        v(0, 0) = a_;
        v(1, 0) = b_;
        return v;
    }

    std::string str() const { return "(" + a_.str() + ") + (" + b_.str() + ")*g"; }

private:
    QuadAlg alg_;
    Series a_, b_;
    void check(const QuadElem& o) const {
        if (alg_ != o.alg_) throw std::invalid_argument("quadratic algebra mismatch");
    }
};

inline QuadElem operator*(const Series& s, const QuadElem& x) { return x * s; }

inline QuadElem QuadAlg::elem(const Series& a, const Series& b) const { return {*this, a, b}; }
inline QuadElem QuadAlg::from_base(const Series& a) const { return {*this, a, Series::zero(field(), a.prec())}; }
inline QuadElem QuadAlg::gen() const {
    return {*this, Series::zero(field(), prec()), Series::one(field(), prec())};
}
inline QuadElem QuadAlg::one() const { return from_base(Series::one(field(), prec())); }
inline QuadElem QuadAlg::zero() const { return from_base(Series::zero(field(), prec())); }
inline QuadElem QuadAlg::uniformizer() const {
    if (kind() == AlgKind::ramified) {
        if (!is_canonical()) throw UnsupportedError("uniformizer of a non-canonical ramified model");
        return gen();
    }
    return from_base(Series::t_power(field(), 1, prec()));
}

inline QuadElem conjugate(const QuadElem& x) { return x.conj(); }
inline Series trace(const QuadElem& x) { return x.trace(); }
inline Series norm(const QuadElem& x) { return x.norm(); }
inline int abs_value_exponent(const QuadElem& x) { return x.norm().valuation(); }

// A root of y^2 - tr*y + nm inside alg, when one exists.
inline std::optional<QuadElem> root_in(const QuadAlg& alg, const Series& tr, const Series& nm) {
    const auto& f = alg.field();
    Series d = tr * tr - nm.scale(f.from_int(4));
    Series delta = alg.disc();
    Series ratio = d / delta;
    if (!ratio.is_square()) return std::nullopt;
    Series s = ratio.sqrt();
    Series half = Series::constant(f, f.inv(f.from_int(2)), tr.prec());
    // (2g - tr_alg)^2 = delta
    QuadElem sq = alg.elem(-alg.tr(), Series::from_int(f, 2, alg.prec())) * s;
    QuadElem y = (alg.from_base(tr) + sq) * half;
    return y;
}

// Order R_n = O_F + t^n O_L as a lattice in F^2 (canonical models).
inline Lattice order_lattice(const QuadAlg& alg, int n) {
    if (!alg.is_canonical()) throw UnsupportedError("orders need a canonical model");
    Matrix m = Matrix::identity(2, alg.field(), alg.prec());
    m(1, 1) = Series::t_power(alg.field(), n, alg.prec());
    return hermite_form(m);
}

inline bool in_order(const QuadElem& x, int n) {
    if (!x.alg().is_canonical()) throw UnsupportedError("orders need a canonical model");
    return x.a().is_integral() && (x.b().is_zero() || x.b().valuation() >= n);
}

// O_F[w] = R_r for w in O_L generating L.
inline int conductor(const QuadElem& w) {
    if (!w.alg().is_canonical()) throw UnsupportedError("conductor needs a canonical model");
    if (w.b().is_zero()) throw std::invalid_argument("element lies in F; it has no conductor");
    if (!w.is_integral()) throw std::invalid_argument("element is not integral");
    return w.b().valuation();
}

struct FractionalClass {
    int n;
    QuadElem x;
};

// Lambda = x R_n.
inline FractionalClass classify_fractional(const Lattice& lam, const QuadAlg& alg) {
    if (lam.dim() != 2) throw RankError("fractional lattice must have rank 2");
    if (!alg.is_canonical()) throw UnsupportedError("classification needs a canonical model");
    const Matrix& b = lam.basis();
    QuadElem c0 = alg.elem(b(0, 0), b(1, 0)), c1 = alg.elem(b(0, 1), b(1, 1));
    QuadElem x = alg.one();
    if (alg.is_field()) {
        x = c0.valuation() <= c1.valuation() ? c0 : c1;
    } else {
        // An element whose two coordinates both reach the minimal valuations
        // of the projections; some residue combination of the basis works.
        int v1 = INT_MAX, v2 = INT_MAX;
        for (auto& c : {c0, c1}) {
            auto [p1, p2] = c.split_pair();
            v1 = std::min(v1, p1.valuation());
            v2 = std::min(v2, p2.valuation());
        }
        const auto& f = alg.field();
        bool found = false;
        for (int al = 0; al < f.q() && !found; ++al)
            for (int be = 0; be < f.q() && !found; ++be) {
                QuadElem y = c0 * Series::constant(f, al, alg.prec()) + c1 * Series::constant(f, be, alg.prec());
                auto [p1, p2] = y.split_pair();
                if (!p1.is_zero() && !p2.is_zero() && p1.valuation() == v1 && p2.valuation() == v2) {
                    x = y;
                    found = true;
                }
            }
        if (!found) throw std::invalid_argument("lattice is not a translate of an order");
    }
    Lattice y = lam.image(x.inv().mult_matrix());
    int n = INT_MAX;
    for (int j = 0; j < 2; ++j) {
        const Series& bj = y.basis()(1, j);
        if (!bj.is_zero()) n = std::min(n, bj.valuation());
    }
    if (n == INT_MAX || n < 0 || y != order_lattice(alg, n))
        throw std::invalid_argument("lattice is not a translate of an order");
    return {n, x};
}

inline long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// [O_L^x : R_n^x]
inline long long unit_index(AlgKind kind, int n, int q) {
    if (n == 0) return 1;
    switch (kind) {
        case AlgKind::unramified: return ipow(q, n) + ipow(q, n - 1);
        case AlgKind::ramified: return ipow(q, n);
        case AlgKind::split: return ipow(q, n - 1) * (q - 1);
    }
    return 0;
}

// Types of the index-q sublattices of R_n.
inline std::map<int, int> count_sublattices_by_type(const QuadAlg& alg, int n) {
    Lattice top = order_lattice(alg, n);
    std::map<int, int> out;
    for (auto& l : enumerate_between(top, top.scaled(1))) {
        if (index_exp(top, l) != 1) continue;
        ++out[classify_fractional(l, alg).n];
    }
    return out;
}

}  // namespace orbfl
