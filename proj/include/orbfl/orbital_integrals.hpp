#pragma once

// Orbital integrals at h = 2.  The analytic side is a polynomial in
// u = -q^s with integer coefficients; the geometric side is an orbit count.

#include <orbfl/instance.hpp>

#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace orbfl {

struct OrbitalPolynomial {
    std::vector<long long> coeffs;  // a_low, a_low+1, ... of sum a_k u^k
    int q = 0;
    int low = 0;  // negative only for Hecke functions whose support leaves the stable lattices

    void add(int k, long long a) {
        if (coeffs.empty()) low = k;
        if (k < low) {
            coeffs.insert(coeffs.begin(), static_cast<size_t>(low - k), 0);
            low = k;
        }
        size_t i = static_cast<size_t>(k - low);
        if (coeffs.size() <= i) coeffs.resize(i + 1, 0);
        coeffs[i] += a;
    }
    // Drops trailing zeros, and leading zeros down to exponent 0.
    void trim() {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
        while (!coeffs.empty() && coeffs.front() == 0 && low < 0) {
            coeffs.erase(coeffs.begin());
            ++low;
        }
        if (coeffs.empty()) low = 0;
        if (low > 0) {
            coeffs.insert(coeffs.begin(), static_cast<size_t>(low), 0);
            low = 0;
        }
    }
    int degree() const { return low + static_cast<int>(coeffs.size()) - 1; }
    long long coeff(int k) const {
        int i = k - low;
        return i < 0 || i >= static_cast<int>(coeffs.size()) ? 0 : coeffs[i];
    }

    long long value_at_s0() const {
        long long v = 0;
        for (size_t i = 0; i < coeffs.size(); ++i) v += (low + static_cast<int>(i)) % 2 ? -coeffs[i] : coeffs[i];
        return v;
    }
    // -(1/ln q) d/ds at s = 0, with du/ds = -ln q at s = 0.
    long long afl_derivative() const {
        long long d = 0;
        for (size_t i = 0; i < coeffs.size(); ++i) {
            long long k = low + static_cast<long long>(i);
            d += k * (k % 2 ? coeffs[i] : -coeffs[i]);
        }
        return d;
    }
    bool is_palindromic() const {
        for (size_t k = 0; k < coeffs.size(); ++k)
            if (coeffs[k] != coeffs[coeffs.size() - 1 - k]) return false;
        return true;
    }
    bool operator==(const OrbitalPolynomial& o) const { return low == o.low && coeffs == o.coeffs; }
    bool operator!=(const OrbitalPolynomial& o) const { return !(*this == o); }

    std::string str() const {
        std::ostringstream os;
        if (low != 0) os << "u^" << low << "*";
        os << "(";
        for (size_t k = 0; k < coeffs.size(); ++k) os << (k ? ", " : "") << coeffs[k];
        os << ")";
        return os.str();
    }
};

inline std::ostream& operator<<(std::ostream& os, const OrbitalPolynomial& p) { return os << p.str(); }

inline long long afl_derivative(const OrbitalPolynomial& p) { return p.afl_derivative(); }

// f = R_shift * T_{m_1} * ... * T_{m_k}
struct HeckeFunction {
    int shift = 0;
    std::vector<int> steps;

    bool is_unit() const { return shift == 0 && steps.empty(); }
    int total() const { return std::accumulate(steps.begin(), steps.end(), 0); }

    // "n,m1,m2,..."
    static HeckeFunction parse(const std::string& s) {
        HeckeFunction f;
        std::stringstream ss(s);
        std::string tok;
        bool first = true;
        while (std::getline(ss, tok, ',')) {
            int v = std::stoi(tok);
            if (first) f.shift = v;
            else f.steps.push_back(v);
            first = false;
        }
        if (first) throw std::invalid_argument("empty Hecke function");
        return f;
    }
    std::string str() const {
        std::string s = std::to_string(shift);
        for (int m : steps) s += "," + std::to_string(m);
        return s;
    }
};

// log_q [lam_- : z lam_+] for a lattice stable under z and the coordinate
// idempotent e.
inline int transfer_exponent(const Lattice& lam, const Matrix& z, const Matrix& e) {
    if (!lam.is_stable(e)) throw StabilityError("lattice is not stable under the idempotent");
    if (!lam.is_stable(z)) throw StabilityError("lattice is not stable under z");
    const int h = coordinate_idempotent_rank(e);
    const int n = lam.dim();
    auto [plus, minus] = split_by_idempotent(lam, e);
    Matrix c = z.block(h, 0, n - h, h);
    return index_exp(minus, hermite_form(c * plus.basis()));
}

// ---------------------------------------------------------------------------
// Hecke chains

namespace detail {

inline long long count_chains(const Lattice& cur, const std::vector<int>& steps, size_t i,
                              const std::function<bool(const Lattice&)>& accept, const Lattice* target, int guard) {
    if (i == steps.size()) return accept(cur) ? 1 : 0;
    if (steps[i] < 0) return 0;
    const Lattice bot = target ? *target : cur.scaled(steps[i]);
    if (target && !cur.contains(*target)) return 0;
    long long total = 0;
    for (auto& next : enumerate_between(cur, bot, {}, guard)) {
        if (index_exp(cur, next) != steps[i]) continue;
        total += count_chains(next, steps, i + 1, accept, target, guard);
    }
    return total;
}

}  // namespace detail

// Number of chains l1 = L^0 > L^1 > ... > L^k = t^-n l2 with [L^(i-1) : L^i] = q^(m_i).
inline long long hecke_eval(const HeckeFunction& f, const Lattice& l1, const Lattice& l2, int guard = kDefaultGuard) {
    if (l1.dim() != l2.dim()) throw std::invalid_argument("hecke_eval: dimension mismatch");
    Lattice target = l2.scaled(-f.shift);
    if (!l1.contains(target) || index_exp(l1, target) != f.total()) return 0;
    for (int m : f.steps)
        if (m < 0) return 0;
    if (index_exp(l1, target) > guard) throw GuardExceeded("Hecke chain length exceeds guard");
    return detail::count_chains(l1, f.steps, 0, [&](const Lattice& l) { return l == target; }, &target, guard);
}

// ---------------------------------------------------------------------------
// Analytic side

// Sum over n <= r of [O_L^x : R_n^x] * sum_{R_n > lam > z^2 R_n, w lam < lam} u^{log_q [R_n : lam]}.
inline OrbitalPolynomial orbital_analytic_fast(const QuadElem& w, const QuadElem& zsq, int guard = kDefaultGuard) {
    const QuadAlg& L = w.alg();
    const int q = L.field().q();
    const int r = conductor(w);
    Matrix mw = w.mult_matrix(), mz2 = zsq.mult_matrix();
    OrbitalPolynomial p{{}, q};
    for (int n = 0; n <= r; ++n) {
        Lattice rn = order_lattice(L, n);
        long long weight = unit_index(L.kind(), n, q);
        for (auto& lam : enumerate_between(rn, rn.image(mz2), {mw}, guard)) p.add(index_exp(rn, lam), weight);
    }
    p.trim();
    return p;
}

struct AnalyticTerm {
    Lattice lattice;  // lam_+ (+) lam_- in F^4
    int exponent;     // log_q [lam_- : z lam_+]
    long long weight; // number of Hecke chains (1 for f = unit)
};

// Direct evaluation of sum_{(lam0, lam3)} f(lam0, lam3) Omega(lam0, s) over
// primitive zeta0-stable lam0.  The pair must be in reference form: img1 =
// diag(1,1,0,0) and the lower block of w equal to the multiplication matrix
// of w in the canonical model of L.
inline std::vector<AnalyticTerm> analytic_terms(const EmbeddingPair& pa, const QuadElem& w,
                                                const HeckeFunction& f = {}, int guard = kDefaultGuard) {
    if (pa.side != Side::analytic || pa.h != 2) throw std::invalid_argument("analytic_terms expects an h = 2 analytic pair");
    if (coordinate_idempotent_rank(pa.img1) != 2) throw UnsupportedError("first image must be diag(1, 1, 0, 0)");
    const Matrix mw = w.mult_matrix();
    if (pa.w.block(2, 2, 2, 2) != mw || pa.w.block(0, 0, 2, 2) != mw)
        throw UnsupportedError("w must act as the canonical multiplication matrix on both blocks");
    if (f.total() > guard) throw GuardExceeded("Hecke support exceeds guard");
    for (int m : f.steps)
        if (m < 0) return {};

    const QuadAlg& L = w.alg();
    const auto& fld = L.field();
    const int r = conductor(w);
    const int s = f.total();
    const Matrix B = pa.z.block(0, 2, 2, 2), C = pa.z.block(2, 0, 2, 2);
    const Matrix Cinv = C.inverse();
    const Matrix wstep = mw.shift(2 * s);
    const Matrix mg = L.gen().mult_matrix();
    const Lattice ol = Lattice::standard(2, fld, L.prec());
    const int wide = 1 << 20;  // windows below are derived, not user-sized

    std::vector<AnalyticTerm> out;
    for (auto& minus : enumerate_between(ol, ol.scaled(r + 2 * s), {wstep}, wide)) {
        if (!generates_unit_ideal(minus, mg)) continue;
        Lattice top = hermite_form((Cinv * minus.basis()).shift(-2 * s));
        Lattice bot = hermite_form((B * minus.basis()).shift(2 * s));
        for (auto& plus : enumerate_between(top, bot, {wstep}, wide)) {
            Lattice lam0 = direct_sum(plus, minus);
            if (s > 0) {
                // Some img2-stable M with t^s lam0 < M < lam0 must exist.
                Lattice m = lam0.scaled(s);
                if (!stable_closure(m, {pa.img2}, &lam0)) continue;
            }
            int e = index_exp(minus, hermite_form(C * plus.basis()));
            auto stable = [&](const Lattice& l) { return l.is_stable(pa.img2); };
            long long chains = detail::count_chains(lam0, f.steps, 0, stable, nullptr, guard);
            if (chains) out.push_back({lam0, e, chains});
        }
    }
    return out;
}

inline OrbitalPolynomial polynomial_of(const std::vector<AnalyticTerm>& terms, int q) {
    OrbitalPolynomial p{{}, q};
    for (auto& t : terms) p.add(t.exponent, t.weight);
    p.trim();
    return p;
}

inline OrbitalPolynomial orbital_analytic(const OrbitInstance& inst, const HeckeFunction& f = {},
                                          int guard = kDefaultGuard) {
    if (f.is_unit()) return orbital_analytic_fast(inst.w, inst.zsq, guard);
    return polynomial_of(analytic_terms(inst.analytic, inst.w, f, guard), inst.q());
}

// ---------------------------------------------------------------------------
// Geometric side

// Multiplication by y in L = F[w] on F^4, written as c + d W.
inline Matrix l_action(const QuadElem& y, const QuadElem& w, const Matrix& W) {
    Series d = y.b() / w.b();
    Series c = y.a() - d * w.a();
    return Matrix::scalar(W.rows(), c) + W * d;
}

struct GeometricCount {
    long long count = 0;          // lattices modulo varpi_L^Z (Vol(O_L^x) = 1)
    long long strict_orbits = 0;  // orbits of the full group L^x, for diagnostics
    std::vector<Lattice> lattices;
    int hull_window = 0;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Generators of O_L^x modulo 1 + t^r O_L: residue lifts and 1 + varpi^j c x.
inline std::vector<QuadElem> unit_generators(const QuadAlg& L, int r) {
    const auto& f = L.field();
    std::vector<QuadElem> gens;
    for (int a = 0; a < f.q(); ++a)
        for (int b = 0; b < f.q(); ++b) {
            QuadElem x = L.elem(Series::constant(f, static_cast<ResidueField::Elem>(a), L.prec()),
                                Series::constant(f, static_cast<ResidueField::Elem>(b), L.prec()));
            if (x.is_unit()) gens.push_back(x);
        }
    const int e = L.kind() == AlgKind::ramified ? 2 : 1;
    QuadElem pij = L.one();
    for (int j = 1; j < e * r; ++j) {
        pij = pij * L.uniformizer();
        for (int c = 1; c < f.q(); ++c) {
            Series cs = Series::constant(f, static_cast<ResidueField::Elem>(c), L.prec());
            gens.push_back(L.one() + pij * cs);
            gens.push_back(L.one() + pij * L.gen() * cs);
        }
    }
    return gens;
}

}  // namespace detail

// O_K1-lattices stable under w and z, modulo powers of a uniformizer of L:
// with Vol(O_L^x) = 1 an L^x-orbit contributes its O_L^x-orbit size.  Every
// such lattice lies between its O_L-hull H and t^r H; hulls are enumerated in
// a window that grows until the count of normalized hulls is stable.
inline GeometricCount orbital_geometric(const EmbeddingPair& pg, const QuadElem& w, const HeckeFunction& f = {},
                                        int guard = kDefaultGuard, int max_window = 6) {
    if (pg.side != Side::geometric) throw std::invalid_argument("orbital_geometric expects a geometric pair");
    if (pg.h != 2) throw UnsupportedError("geometric counts are implemented for h = 2");
    if (!f.steps.empty()) throw UnsupportedError("geometric side supports f = R_n only");
    const QuadAlg& L = w.alg();
    if (!L.is_field()) throw UnsupportedError("geometric count needs L to be a field");
    if (!regularity(pg).is_rss) throw std::invalid_argument("pair is not regular semisimple");
    const auto& fld = L.field();
    const int r = conductor(w);
    const Matrix mg = l_action(L.gen(), w, pg.w);
    const Matrix mpi = l_action(L.uniformizer(), w, pg.w);
    const int step = mpi.det().valuation();
    const std::vector<Matrix> cons{pg.img1, pg.w, pg.z};
    std::vector<Matrix> hull_cons = cons;
    hull_cons.push_back(mg);
    const Lattice std4 = Lattice::standard(4, fld, L.prec());
    auto hull = [&](const Lattice& l) { return hermite_form(Matrix::hstack(l.basis(), mg * l.basis())); };

    std::vector<Lattice> hulls;
    int prev = -1;
    int B = 1;
    for (;; ++B) {
        if (B > max_window) throw GuardExceeded("hull window did not stabilize");
        std::vector<Lattice> found;
        for (auto& h : enumerate_between(std4.scaled(-B), std4.scaled(B), hull_cons, 8 * B))
            if (h.det_valuation() >= 0 && h.det_valuation() < step) found.push_back(h);
        if (static_cast<int>(found.size()) == prev && B >= 2) break;
        prev = static_cast<int>(found.size());
        hulls = std::move(found);
    }

    GeometricCount out;
    out.hull_window = B - 1;
    const auto units = detail::unit_generators(L, r);
    std::vector<Matrix> unit_mats;
    for (auto& u : units) unit_mats.push_back(l_action(u, w, pg.w));
    for (auto& H : hulls) {
        std::vector<Lattice> members;
        for (auto& l : enumerate_between(H, H.scaled(r), cons, guard))
            if (hull(l) == H) members.push_back(l);
        std::map<std::vector<int>, int> index;
        for (size_t i = 0; i < members.size(); ++i) index[members[i].key()] = static_cast<int>(i);
        detail::UnionFind uf(static_cast<int>(members.size()));
        for (size_t i = 0; i < members.size(); ++i)
            for (auto& m : unit_mats) {
                auto it = index.find(members[i].image(m).key());
                if (it == index.end()) throw std::logic_error("unit translate left the hull class");
                uf.unite(static_cast<int>(i), it->second);
            }
        for (size_t i = 0; i < members.size(); ++i)
            if (uf.find(static_cast<int>(i)) == static_cast<int>(i)) ++out.strict_orbits;
        out.lattices.insert(out.lattices.end(), members.begin(), members.end());
    }
    out.count = static_cast<long long>(out.lattices.size());
    return out;
}

inline GeometricCount orbital_geometric(const OrbitInstance& inst, const HeckeFunction& f = {},
                                        int guard = kDefaultGuard) {
    if (!inst.geometric) throw std::invalid_argument("instance has no geometric partner");
    return orbital_geometric(*inst.geometric, inst.w, f, guard);
}

}  // namespace orbfl
