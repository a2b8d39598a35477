#pragma once

// O_F-lattices in F^n in canonical column Hermite form, and bounded
// enumeration of stable lattices between two given ones.

#include <orbfl/matrix.hpp>

#include <deque>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace orbfl {

struct RankError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StabilityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultGuard = 12;

class Lattice;
Lattice hermite_form(const Matrix& gens);

// Upper triangular basis with diagonal t^{d_i}; entry (i, j), j > i, holds
// only terms of exponent < d_i.
class Lattice {
public:
    int dim() const { return basis_.rows(); }
    const Matrix& basis() const { return basis_; }
    const std::vector<int>& diag_exponents() const { return d_; }
    int det_valuation() const { return std::accumulate(d_.begin(), d_.end(), 0); }
    const ResidueField& field() const { return basis_.field(); }
    int prec() const { return prec_; }
    const std::vector<int>& key() const { return key_; }

    static Lattice standard(int n, const ResidueField& f, int prec = kDefaultPrec) {
        return hermite_form(Matrix::identity(n, f, prec));
    }

    bool contains_vector(const Matrix& x) const {
        const int n = dim();
        Matrix r = x;
        for (int i = n - 1; i >= 0; --i) {
            const Series& e = r(i, 0);
            if (e.is_zero()) {
                if (e.prec() < d_[i]) throw PrecisionError("membership test needs more precision");
                continue;
            }
            if (e.valuation() < d_[i]) return false;
            Series c = e.shift(-d_[i]);
            for (int k = 0; k <= i; ++k) r(k, 0) -= c * basis_(k, i);
        }
        return true;
    }
    bool contains(const Lattice& o) const {
        for (int j = 0; j < o.dim(); ++j)
            if (!contains_vector(o.basis_.col(j))) return false;
        return true;
    }
    bool is_stable(const Matrix& m) const {
        Matrix img = m * basis_;
        for (int j = 0; j < dim(); ++j)
            if (!contains_vector(img.col(j))) return false;
        return true;
    }
    Lattice scaled(int k) const { return hermite_form(basis_.shift(k)); }
    Lattice image(const Matrix& g) const { return hermite_form(g * basis_); }
    Lattice sum(const Lattice& o) const { return hermite_form(Matrix::hstack(basis_, o.basis_)); }

    bool operator==(const Lattice& o) const { return key_ == o.key_; }
    bool operator!=(const Lattice& o) const { return key_ != o.key_; }
    bool operator<(const Lattice& o) const { return key_ < o.key_; }

private:
    friend Lattice hermite_form(const Matrix& gens);
    Lattice(Matrix b, std::vector<int> d, int prec) : basis_(std::move(b)), d_(std::move(d)), prec_(prec) {
        key_.reserve(dim() * dim() * 4);
        for (int j = 0; j < dim(); ++j)
            for (int i = 0; i <= j; ++i) basis_(i, j).append_key(key_);
    }
    Matrix basis_;
    std::vector<int> d_;
    int prec_;
    std::vector<int> key_;
};

// Canonical form of the O_F-span of the columns of gens (n x m, m >= n).
inline Lattice hermite_form(const Matrix& gens) {
    const int n = gens.rows();
    const ResidueField& f = gens.field();
    Matrix a = gens;
    std::vector<int> active(a.cols());
    std::iota(active.begin(), active.end(), 0);
    std::vector<int> pivot_col(n, -1);
    std::vector<int> d(n);
    for (int i = n - 1; i >= 0; --i) {
        int best = -1;
        for (int idx = 0; idx < static_cast<int>(active.size()); ++idx) {
            const Series& e = a(i, active[idx]);
            if (e.is_zero()) continue;
            if (best < 0 || e.valuation() < a(i, active[best]).valuation()) best = idx;
        }
        if (best < 0) throw RankError("lattice generators are not of full rank at working precision");
        int p = active[best];
        active.erase(active.begin() + best);
        Series piv = a(i, p);
        Series pinv = piv.inv();
        for (int k : active) {
            if (a(i, k).is_zero()) continue;
            Series c = a(i, k) * pinv;
            for (int r = 0; r <= i; ++r) a(r, k) -= c * a(r, p);
            a(i, k) = Series::zero(f, a(i, k).prec());
        }
        // Scale the pivot column so the pivot is exactly t^v.
        int v = piv.valuation();
        Series u = pinv.shift(v);
        for (int r = 0; r < i; ++r) a(r, p) = a(r, p) * u;
        a(i, p) = Series::t_power(f, v, std::max(v + 1, kDefaultPrec));
        pivot_col[i] = p;
        d[i] = v;
    }
    const int work = std::max(kDefaultPrec, gens.prec());
    int prec = INT_MAX;
    Matrix h(n, n, f);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= j; ++i) {
            h(i, j) = a(i, pivot_col[j]);
            prec = std::min(prec, h(i, j).prec());
        }
    for (int j = 0; j < n; ++j) {
        for (int i = j - 1; i >= 0; --i) {
            Series hi = h(i, j).from(d[i]);
            if (hi.is_zero()) continue;
            if (h(i, j).prec() < d[i]) throw PrecisionError("hermite reduction needs more precision");
            Series c = hi.shift(-d[i]);
            for (int k = 0; k <= i; ++k) h(k, j) -= c * h(k, i);
        }
        for (int i = 0; i < j; ++i) {
            h(i, j) = h(i, j).below(d[i]).assume_prec(work + d[i]);
        }
        h(j, j) = Series::t_power(f, d[j], work + d[j]);
    }
    for (int j = 0; j < n; ++j)
        for (int i = j + 1; i < n; ++i) h(i, j) = Series::zero(f, work + d[j]);
    return Lattice(std::move(h), std::move(d), prec);
}

// log_q [l1 : l2] with q the residue cardinality of the base.
inline int index_exp(const Lattice& l1, const Lattice& l2) {
    if (l1.dim() != l2.dim()) throw std::invalid_argument("index_exp: dimension mismatch");
    return l2.det_valuation() - l1.det_valuation();
}

inline bool is_stable(const Lattice& l, const Matrix& m) { return l.is_stable(m); }

// Grows l to the smallest lattice stable under every constraint.  Returns
// false as soon as it is no longer contained in top.
inline bool stable_closure(Lattice& l, const std::vector<Matrix>& constraints, const Lattice* top) {
    for (;;) {
        if (top && !top->contains(l)) return false;
        Matrix gens = l.basis();
        bool grew = false;
        for (auto& c : constraints) {
            Matrix img = c * l.basis();
            for (int j = 0; j < img.cols(); ++j)
                if (!l.contains_vector(img.col(j))) {
                    gens = Matrix::hstack(gens, img.col(j));
                    grew = true;
                }
        }
        if (!grew) return true;
        l = hermite_form(gens);
    }
}

// All nonzero vectors of k^n up to scaling (first nonzero coordinate 1).
inline std::vector<std::vector<ResidueField::Elem>> projective_points(const ResidueField& f, int n) {
    std::vector<std::vector<ResidueField::Elem>> out;
    const int q = f.q();
    for (int lead = 0; lead < n; ++lead) {
        int tail = n - lead - 1;
        long long count = 1;
        for (int k = 0; k < tail; ++k) count *= q;
        for (long long m = 0; m < count; ++m) {
            std::vector<ResidueField::Elem> a(n, 0);
            a[lead] = 1;
            long long x = m;
            for (int k = lead + 1; k < n; ++k) {
                a[k] = static_cast<ResidueField::Elem>(x % q);
                x /= q;
            }
            out.push_back(std::move(a));
        }
    }
    return out;
}

// Every lattice L with top >= L >= bot that is stable under all constraints.
inline std::vector<Lattice> enumerate_between(const Lattice& top, const Lattice& bot,
                                              const std::vector<Matrix>& constraints = {},
                                              int guard = kDefaultGuard) {
    if (!top.contains(bot)) throw std::invalid_argument("enumerate_between: bottom lattice not contained in top");
    int len = index_exp(top, bot);
    if (len > guard)
        throw GuardExceeded("quotient length " + std::to_string(len) + " exceeds guard " + std::to_string(guard));
    Lattice start = bot;
    if (!stable_closure(start, constraints, &top)) return {};
    const int n = top.dim();
    const ResidueField& f = top.field();
    const auto points = projective_points(f, n);
    std::vector<Lattice> out;
    std::set<std::vector<int>> seen;
    std::deque<Lattice> queue{start};
    seen.insert(start.key());
    while (!queue.empty()) {
        Lattice m = std::move(queue.front());
        queue.pop_front();
        out.push_back(m);
        if (m == top) continue;
        const Matrix& b = m.basis();
        for (auto& a : points) {
            Matrix x(n, 1, f);
            for (int j = 0; j < n; ++j) {
                if (!a[j]) continue;
                for (int i = 0; i <= j; ++i) x(i, 0) += b(i, j).scale(a[j]);
            }
            x = x.shift(-1);
            if (!top.contains_vector(x)) continue;
            Lattice c = hermite_form(Matrix::hstack(b, x));
            if (!stable_closure(c, constraints, &top)) continue;
            if (seen.insert(c.key()).second) queue.push_back(std::move(c));
        }
    }
    return out;
}

// Coordinate idempotent diag(1,..,1,0,..,0): returns its rank h, or -1.
inline int coordinate_idempotent_rank(const Matrix& e) {
    const int n = e.rows();
    int h = 0;
    while (h < n && e(h, h) == Series::one(e.field(), e(h, h).prec())) ++h;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool one = i == j && i < h;
            const Series& x = e(i, j);
            if (one ? x != Series::one(e.field(), x.prec()) : !x.is_zero()) return -1;
        }
    return h;
}

// (e L, (1 - e) L) as lattices in the two coordinate blocks of ranks h, n - h.
inline std::pair<Lattice, Lattice> split_by_idempotent(const Lattice& l, const Matrix& e) {
    int h = coordinate_idempotent_rank(e);
    if (h < 0) throw UnsupportedError("split_by_idempotent needs a coordinate idempotent diag(I_h, 0)");
    if (!l.is_stable(e)) throw StabilityError("lattice is not stable under the idempotent");
    const int n = l.dim();
    const Matrix& b = l.basis();
    Lattice plus = hermite_form(b.block(0, 0, h, n));
    Lattice minus = hermite_form(b.block(h, 0, n - h, n));
    return {plus, minus};
}

// Block-diagonal embedding of a pair of lattices.
inline Lattice direct_sum(const Lattice& a, const Lattice& b) {
    return hermite_form(Matrix::block_diag(a.basis(), b.basis()));
}

// O_L * lam = O_L for lam inside L = F^2 with O_L-generator action g
// (multiplication by the distinguished generator of O_L).
inline bool generates_unit_ideal(const Lattice& lam, const Matrix& g) {
    Lattice ol = hermite_form(Matrix::hstack(lam.basis(), g * lam.basis()));
    return ol == Lattice::standard(lam.dim(), lam.field());
}

}  // namespace orbfl
