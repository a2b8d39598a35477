#pragma once

// Finite residue fields and truncated Laurent series over them.
//
// A Series models an element of F = F_q((t)) known modulo t^prec.  The zero
// element carries an infinite valuation; "zero" always means "zero up to the
// stored precision".

#include <algorithm>
#include <climits>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbfl {

inline constexpr int kDefaultPrec = 32;
inline constexpr int kInfVal = INT_MAX;

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FieldMismatch : std::invalid_argument {
    FieldMismatch() : std::invalid_argument("residue field mismatch") {}
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ResidueField {
public:
    using Elem = std::uint16_t;

    static ResidueField prime(int p) { return ResidueField(p, {}); }

    // F_p[x] / (x^2 + m[1] x + m[0]); the modulus must be irreducible.
    static ResidueField quadratic(int p, std::vector<int> modulus) {
        if (modulus.size() != 2) throw std::invalid_argument("quadratic modulus needs 2 coefficients");
        return ResidueField(p, std::move(modulus));
    }

    int p() const { return d_->p; }
    int deg() const { return d_->deg; }
    int q() const { return d_->q; }
    // Low-order coefficients of the monic modulus; empty for a prime field.
    const std::vector<int>& modulus() const { return d_->modulus; }

    Elem add(Elem a, Elem b) const { return d_->add[a * d_->q + b]; }
    Elem mul(Elem a, Elem b) const { return d_->mul[a * d_->q + b]; }
    Elem neg(Elem a) const { return d_->neg[a]; }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem inv(Elem a) const {
        if (a == 0) throw std::domain_error("inverse of 0 in residue field");
        return d_->inv[a];
    }

    Elem from_int(long long v) const {
        long long r = v % d_->p;
        if (r < 0) r += d_->p;
        return static_cast<Elem>(r);
    }
    Elem from_components(const std::vector<int>& c) const {
        if (static_cast<int>(c.size()) != d_->deg) throw std::invalid_argument("wrong component count");
        int e = 0, base = 1;
        for (int i = 0; i < d_->deg; ++i) {
            int ci = ((c[i] % d_->p) + d_->p) % d_->p;
            e += ci * base;
            base *= d_->p;
        }
        return static_cast<Elem>(e);
    }
    std::vector<int> components(Elem a) const {
        std::vector<int> c(d_->deg);
        for (int i = 0; i < d_->deg; ++i) {
            c[i] = a % d_->p;
            a = static_cast<Elem>(a / d_->p);
        }
        return c;
    }
    // The class of x in F_p[x]/(modulus); requires deg 2.
    Elem x() const {
        if (d_->deg != 2) throw std::logic_error("prime field has no adjoined root");
        return static_cast<Elem>(d_->p);
    }

    bool is_square(Elem a) const {
        require_odd();
        return a == 0 || d_->is_sq[a];
    }
    Elem sqrt(Elem a) const {
        require_odd();
        if (a == 0) return 0;
        if (!d_->is_sq[a]) throw std::domain_error("not a square in residue field");
        return d_->sqrt_tab[a];
    }
    Elem primitive_element() const { return d_->prim; }
    Elem pow(Elem a, long long e) const {
        Elem r = 1;
        while (e > 0) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    bool operator==(const ResidueField& o) const {
        return d_ == o.d_ || (d_->p == o.d_->p && d_->modulus == o.d_->modulus);
    }
    bool operator!=(const ResidueField& o) const { return !(*this == o); }

    void require_odd() const {
        if (d_->p == 2) throw UnsupportedError("residue characteristic 2 is not supported");
    }

private:
    struct Data {
        int p = 0, deg = 1, q = 0;
        std::vector<int> modulus;
        std::vector<Elem> add, mul, neg, inv, sqrt_tab;
        std::vector<char> is_sq;
        Elem prim = 1;
    };
    std::shared_ptr<const Data> d_;

    static bool is_prime(int p) {
        if (p < 2) return false;
        for (int i = 2; i * i <= p; ++i)
            if (p % i == 0) return false;
        return true;
    }

    ResidueField(int p, std::vector<int> modulus) {
        if (!is_prime(p)) throw std::invalid_argument("characteristic must be prime: " + std::to_string(p));
        auto d = std::make_shared<Data>();
        d->p = p;
        d->deg = modulus.empty() ? 1 : 2;
        d->q = d->deg == 1 ? p : p * p;
        if (d->q > 1024) throw UnsupportedError("residue field too large for table arithmetic");
        for (auto& m : modulus) m = ((m % p) + p) % p;
        d->modulus = modulus;
        if (d->deg == 2) {
            for (int r = 0; r < p; ++r)
                if ((r * r + modulus[1] * r + modulus[0]) % p == 0)
                    throw std::invalid_argument("modulus has a root in F_p, not irreducible");
        }
        const int q = d->q;
        d->add.resize(q * q);
        d->mul.resize(q * q);
        d->neg.resize(q);
        d->inv.assign(q, 0);
        auto comp = [&](int a) { return std::pair<int, int>{a % p, a / p}; };
        for (int a = 0; a < q; ++a) {
            auto [a0, a1] = comp(a);
            d->neg[a] = static_cast<Elem>(((p - a0) % p) + ((p - a1) % p) * p);
            for (int b = 0; b < q; ++b) {
                auto [b0, b1] = comp(b);
                d->add[a * q + b] = static_cast<Elem>((a0 + b0) % p + ((a1 + b1) % p) * p);
                if (d->deg == 1) {
                    d->mul[a * q + b] = static_cast<Elem>((a0 * b0) % p);
                } else {
                    // x^2 = -m1 x - m0
                    int c0 = a0 * b0, c1 = a0 * b1 + a1 * b0, c2 = a1 * b1;
                    c0 -= c2 * modulus[0];
                    c1 -= c2 * modulus[1];
                    c0 = ((c0 % p) + p) % p;
                    c1 = ((c1 % p) + p) % p;
                    d->mul[a * q + b] = static_cast<Elem>(c0 + c1 * p);
                }
            }
        }
        for (int a = 1; a < q; ++a)
            for (int b = 1; b < q; ++b)
                if (d->mul[a * q + b] == 1) {
                    d->inv[a] = static_cast<Elem>(b);
                    break;
                }
        d->is_sq.assign(q, 0);
        d->sqrt_tab.assign(q, 0);
        for (int a = 1; a < q; ++a) {
            Elem s = d->mul[a * q + a];
            if (!d->is_sq[s]) {
                d->is_sq[s] = 1;
                d->sqrt_tab[s] = static_cast<Elem>(a);
            }
        }
        for (int g = 1; g < q; ++g) {
            int order = 1;
            Elem x = static_cast<Elem>(g);
            while (x != 1) {
                x = d->mul[x * q + g];
                ++order;
            }
            if (order == q - 1) {
                d->prim = static_cast<Elem>(g);
                break;
            }
        }
        d_ = std::move(d);
    }
};

class Series {
public:
    using Elem = ResidueField::Elem;

    Series(ResidueField f, int prec = kDefaultPrec) : f_(std::move(f)), val_(kInfVal), prec_(prec) {}

    static Series zero(const ResidueField& f, int prec = kDefaultPrec) { return Series(f, prec); }
    static Series constant(const ResidueField& f, Elem c, int prec = kDefaultPrec) {
        return monomial(f, c, 0, prec);
    }
    static Series from_int(const ResidueField& f, long long c, int prec = kDefaultPrec) {
        return constant(f, f.from_int(c), prec);
    }
    static Series one(const ResidueField& f, int prec = kDefaultPrec) { return constant(f, 1, prec); }
    // c * t^e
    static Series monomial(const ResidueField& f, Elem c, int e, int prec = kDefaultPrec) {
        Series s(f, prec);
        if (c != 0 && e < prec) {
            s.val_ = e;
            s.c_.assign(1, c);
        }
        return s;
    }
    static Series t_power(const ResidueField& f, int e, int prec = kDefaultPrec) {
        return monomial(f, 1, e, prec);
    }
    // coeffs[i] is the coefficient of t^(val + i).
    static Series from_coeffs(const ResidueField& f, int val, const std::vector<Elem>& coeffs,
                              int prec = kDefaultPrec) {
        Series s(f, prec);
        s.val_ = val;
        s.c_ = coeffs;
        s.normalize();
        return s;
    }

    const ResidueField& field() const { return f_; }
    int valuation() const { return val_; }
    int prec() const { return prec_; }
    bool is_zero() const { return val_ == kInfVal; }
    // Coefficients from index valuation(); omitted trailing terms are zero up to prec().
    const std::vector<Elem>& coeffs() const { return c_; }

    Elem coeff(int i) const {
        if (i >= prec_) throw PrecisionError("coefficient beyond precision");
        if (is_zero() || i < val_ || i >= val_ + static_cast<int>(c_.size())) return 0;
        return c_[i - val_];
    }
    Elem leading() const {
        if (is_zero()) throw PrecisionError("leading coefficient of zero-up-to-precision");
        return c_[0];
    }
    bool is_unit() const { return !is_zero() && val_ == 0; }
    bool is_integral() const { return is_zero() || val_ >= 0; }

    Series with_prec(int p) const {
        Series r = *this;
        r.prec_ = std::min(prec_, p);
        r.truncate();
        return r;
    }
    // Claim a larger precision; only valid for exact representatives.
    Series assume_prec(int p) const {
        Series r = *this;
        r.prec_ = p;
        r.truncate();
        return r;
    }
    // Multiply by t^k.
    Series shift(int k) const {
        Series r = *this;
        if (!r.is_zero()) r.val_ += k;
        r.prec_ += k;
        return r;
    }
    // Terms of exponent < k (a canonical representative modulo t^k).
    Series below(int k) const {
        if (prec_ < k) throw PrecisionError("reduction modulo t^" + std::to_string(k) + " needs more precision");
        Series r(f_, prec_);
        if (is_zero() || val_ >= k) return r;
        r.val_ = val_;
        r.c_.assign(c_.begin(), c_.begin() + std::min<int>(c_.size(), k - val_));
        r.normalize();
        return r;
    }
    // Terms of exponent >= k.
    Series from(int k) const {
        Series r(f_, prec_);
        if (is_zero()) return r;
        if (val_ >= k) return *this;
        int skip = k - val_;
        if (skip >= static_cast<int>(c_.size())) return r;
        r.val_ = k;
        r.c_.assign(c_.begin() + skip, c_.end());
        r.normalize();
        return r;
    }

    Series operator-() const {
        Series r = *this;
        for (auto& c : r.c_) c = f_.neg(c);
        return r;
    }
    Series operator+(const Series& b) const { return combine(b, false); }
    Series operator-(const Series& b) const { return combine(b, true); }
    Series operator*(const Series& b) const {
        check(b);
        long long va = is_zero() ? prec_ : val_, vb = b.is_zero() ? b.prec_ : b.val_;
        long long p = std::min(va + b.prec_, vb + prec_);
        int prec = static_cast<int>(std::clamp<long long>(p, INT_MIN / 4, INT_MAX / 4));
        Series r(f_, prec);
        if (is_zero() || b.is_zero()) return r;
        int v = val_ + b.val_;
        int n = prec - v;
        if (n <= 0) return r;
        std::vector<Elem> out(n, 0);
        int na = std::min<int>(c_.size(), n), nb = std::min<int>(b.c_.size(), n);
        for (int i = 0; i < na; ++i) {
            Elem ai = c_[i];
            if (ai == 0) continue;
            int lim = std::min(nb, n - i);
            for (int j = 0; j < lim; ++j)
                if (b.c_[j]) out[i + j] = f_.add(out[i + j], f_.mul(ai, b.c_[j]));
        }
        r.val_ = v;
        r.c_ = std::move(out);
        r.normalize();
        return r;
    }
    Series scale(Elem c) const {
        if (c == 0) return Series(f_, is_zero() ? prec_ : prec_);
        Series r = *this;
        for (auto& x : r.c_) x = f_.mul(x, c);
        return r;
    }
    Series inv() const {
        if (is_zero()) throw PrecisionError("cannot certify a nonzero leading term for inversion");
        int n = prec_ - val_;
        std::vector<Elem> b(n, 0);
        Elem b0 = f_.inv(c_[0]);
        b[0] = b0;
        for (int k = 1; k < n; ++k) {
            Elem s = 0;
            int lim = std::min<int>(k, static_cast<int>(c_.size()) - 1);
            for (int i = 1; i <= lim; ++i)
                if (c_[i] && b[k - i]) s = f_.add(s, f_.mul(c_[i], b[k - i]));
            b[k] = f_.neg(f_.mul(b0, s));
        }
        Series r(f_, -val_ + n);
        r.val_ = -val_;
        r.c_ = std::move(b);
        r.normalize();
        return r;
    }
    Series operator/(const Series& b) const { return *this * b.inv(); }
    Series& operator+=(const Series& b) { return *this = *this + b; }
    Series& operator-=(const Series& b) { return *this = *this - b; }
    Series& operator*=(const Series& b) { return *this = *this * b; }

    // Equality up to the smaller precision.
    bool operator==(const Series& b) const { return (*this - b).is_zero(); }
    bool operator!=(const Series& b) const { return !(*this == b); }

    bool is_square() const {
        f_.require_odd();
        if (is_zero()) throw PrecisionError("squareness of zero-up-to-precision");
        return val_ % 2 == 0 && f_.is_square(c_[0]);
    }
    Series sqrt() const {
        f_.require_odd();
        if (is_zero()) return *this;
        if (!is_square()) throw std::domain_error("series is not a square");
        // Unit part u, sqrt by Newton: y <- (y + u/y) / 2.
        Series u = shift(-val_);
        Series y = constant(f_, f_.sqrt(c_[0]), u.prec());
        Elem half = f_.inv(f_.from_int(2));
        for (int k = 1; k < 2 * u.prec() + 2; k *= 2) y = (y + u / y).scale(half);
        return y.with_prec(u.prec()).shift(val_ / 2);
    }

    // Canonical integer encoding used for hashing lattice keys.
    void append_key(std::vector<int>& out) const {
        if (is_zero()) {
            out.push_back(INT_MIN);
            return;
        }
        out.push_back(val_);
        out.push_back(static_cast<int>(c_.size()));
        for (Elem c : c_) out.push_back(c);
    }

    std::string str() const {
        if (is_zero()) return "O(t^" + std::to_string(prec_) + ")";
        std::string s;
        for (int i = 0; i < static_cast<int>(c_.size()); ++i) {
            if (!c_[i]) continue;
            if (!s.empty()) s += " + ";
            auto comp = f_.components(c_[i]);
            std::string cs;
            if (comp.size() == 1) cs = std::to_string(comp[0]);
            else cs = "(" + std::to_string(comp[0]) + "+" + std::to_string(comp[1]) + "x)";
            s += cs + "*t^" + std::to_string(val_ + i);
        }
        return s + " + O(t^" + std::to_string(prec_) + ")";
    }

private:
    ResidueField f_;
    int val_;
    std::vector<Elem> c_;
    int prec_;

    void check(const Series& b) const {
        if (f_ != b.f_) throw FieldMismatch();
    }
    void truncate() {
        if (is_zero()) return;
        if (val_ >= prec_) {
            c_.clear();
            val_ = kInfVal;
            return;
        }
        if (val_ + static_cast<int>(c_.size()) > prec_) c_.resize(prec_ - val_);
        normalize();
    }
    void normalize() {
        if (val_ == kInfVal) {
            c_.clear();
            return;
        }
        if (val_ + static_cast<int>(c_.size()) > prec_) c_.resize(std::max(0, prec_ - val_));
        size_t k = 0;
        while (k < c_.size() && c_[k] == 0) ++k;
        if (k == c_.size()) {
            c_.clear();
            val_ = kInfVal;
            return;
        }
        if (k) {
            c_.erase(c_.begin(), c_.begin() + k);
            val_ += static_cast<int>(k);
        }
        while (c_.back() == 0) c_.pop_back();
    }
    Series combine(const Series& b, bool subtract) const {
        check(b);
        int prec = std::min(prec_, b.prec_);
        Series r(f_, prec);
        int lo = std::min(val_, b.val_);
        if (lo == kInfVal || lo >= prec) return r;
        int n = prec - lo;
        std::vector<Elem> out(n, 0);
        if (!is_zero())
            for (int i = 0; i < static_cast<int>(c_.size()) && val_ - lo + i < n; ++i) out[val_ - lo + i] = c_[i];
        if (!b.is_zero())
            for (int i = 0; i < static_cast<int>(b.c_.size()) && b.val_ - lo + i < n; ++i) {
                Elem x = subtract ? f_.neg(b.c_[i]) : b.c_[i];
                out[b.val_ - lo + i] = f_.add(out[b.val_ - lo + i], x);
            }
        r.val_ = lo;
        r.c_ = std::move(out);
        r.normalize();
        return r;
    }
};

inline int valuation(const Series& a) { return a.valuation(); }
inline Series series_add(const Series& a, const Series& b) { return a + b; }
inline Series series_mul(const Series& a, const Series& b) { return a * b; }
inline Series series_inv(const Series& a) { return a.inv(); }

}  // namespace orbfl
