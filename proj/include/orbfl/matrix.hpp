#pragma once

// Dense matrices over truncated Laurent series.

#include <orbfl/base_rings.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace orbfl {

class Matrix {
public:
    Matrix(int rows, int cols, const ResidueField& f, int prec = kDefaultPrec)
        : r_(rows), c_(cols), f_(f), a_(static_cast<size_t>(rows) * cols, Series::zero(f, prec)) {}

    static Matrix identity(int n, const ResidueField& f, int prec = kDefaultPrec) {
        Matrix m(n, n, f, prec);
        for (int i = 0; i < n; ++i) m(i, i) = Series::one(f, prec);
        return m;
    }
    static Matrix scalar(int n, const Series& s) {
        Matrix m(n, n, s.field(), s.prec());
        for (int i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }
    static Matrix block_diag(const Matrix& a, const Matrix& b) {
        Matrix m(a.r_ + b.r_, a.c_ + b.c_, a.f_, std::max(a.prec(), b.prec()));
        m.set_block(0, 0, a);
        m.set_block(a.r_, a.c_, b);
        return m;
    }
    static Matrix hstack(const Matrix& a, const Matrix& b) {
        if (a.r_ != b.r_) throw std::invalid_argument("hstack: row mismatch");
        Matrix m(a.r_, a.c_ + b.c_, a.f_);
        m.set_block(0, 0, a);
        m.set_block(0, a.c_, b);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    const ResidueField& field() const { return f_; }

    Series& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const Series& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    Matrix block(int r0, int c0, int nr, int nc) const {
        Matrix m(nr, nc, f_);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
        return m;
    }
    void set_block(int r0, int c0, const Matrix& b) {
        for (int i = 0; i < b.r_; ++i)
            for (int j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
    Matrix col(int j) const { return block(0, j, r_, 1); }

    // Smallest precision among the entries.
    int prec() const {
        int p = INT_MAX;
        for (auto& x : a_) p = std::min(p, x.prec());
        return p;
    }
    int min_valuation() const {
        int v = kInfVal;
        for (auto& x : a_) v = std::min(v, x.valuation());
        return v;
    }
    bool is_zero() const {
        for (auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_integral() const { return min_valuation() >= 0; }

    Matrix operator+(const Matrix& b) const {
        same_shape(b);
        Matrix m = *this;
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] + b.a_[k];
        return m;
    }
    Matrix operator-(const Matrix& b) const {
        same_shape(b);
        Matrix m = *this;
        for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] - b.a_[k];
        return m;
    }
    Matrix operator-() const {
        Matrix m = *this;
        for (auto& x : m.a_) x = -x;
        return m;
    }
    Matrix operator*(const Matrix& b) const {
        if (c_ != b.r_) throw std::invalid_argument("matrix product: shape mismatch");
        Matrix m(r_, b.c_, f_, std::min(prec(), b.prec()));
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                const Series& x = (*this)(i, k);
                if (x.is_zero() && x.prec() >= m.prec()) continue;
                for (int j = 0; j < b.c_; ++j) m(i, j) += x * b(k, j);
            }
        return m;
    }
    Matrix operator*(const Series& s) const {
        Matrix m = *this;
        for (auto& x : m.a_) x = x * s;
        return m;
    }
    // Multiply by t^k.
    Matrix shift(int k) const {
        Matrix m = *this;
        for (auto& x : m.a_) x = x.shift(k);
        return m;
    }
    Matrix with_prec(int p) const {
        Matrix m = *this;
        for (auto& x : m.a_) x = x.with_prec(p);
        return m;
    }
    Matrix transpose() const {
        Matrix m(c_, r_, f_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    bool operator==(const Matrix& b) const {
        if (r_ != b.r_ || c_ != b.c_) return false;
        for (size_t k = 0; k < a_.size(); ++k)
            if (a_[k] != b.a_[k]) return false;
        return true;
    }
    bool operator!=(const Matrix& b) const { return !(*this == b); }

    // Coefficients of det(xI - A), highest degree first (leading 1).
    // Berkowitz's division-free algorithm, valid in any characteristic.
    std::vector<Series> charpoly() const {
        if (r_ != c_) throw std::invalid_argument("charpoly of a non-square matrix");
        const int n = r_;
        const int P = prec();
        std::vector<Series> v{Series::one(f_, P)};
        if (n == 0) return v;
        v.push_back(-(*this)(0, 0));
        for (int r = 1; r < n; ++r) {
            // c = [1, -a_rr, -R S, -R A S, ..., -R A^{r-1} S]
            std::vector<Series> col{Series::one(f_, P), -(*this)(r, r)};
            std::vector<Series> s(r, Series::zero(f_, P));
            for (int i = 0; i < r; ++i) s[i] = (*this)(i, r);
            for (int k = 0; k < r; ++k) {
                Series dot = Series::zero(f_, P);
                for (int j = 0; j < r; ++j) dot += (*this)(r, j) * s[j];
                col.push_back(-dot);
                if (k + 1 < r) {
                    std::vector<Series> ns(r, Series::zero(f_, P));
                    for (int i = 0; i < r; ++i)
                        for (int j = 0; j < r; ++j) ns[i] += (*this)(i, j) * s[j];
                    s = std::move(ns);
                }
            }
            std::vector<Series> nv(r + 2, Series::zero(f_, P));
            for (int i = 0; i < r + 2; ++i)
                for (int j = 0; j <= std::min(i, r); ++j) nv[i] += col[i - j] * v[j];
            v = std::move(nv);
        }
        return v;
    }
    Series det() const {
        auto cp = charpoly();
        return r_ % 2 == 0 ? cp.back() : -cp.back();
    }
    Series trace() const {
        Series s = Series::zero(f_, prec());
        for (int i = 0; i < r_; ++i) s += (*this)(i, i);
        return s;
    }

    // Gauss-Jordan with minimal-valuation pivots.
    Matrix inverse() const {
        if (r_ != c_) throw std::invalid_argument("inverse of a non-square matrix");
        const int n = r_;
        Matrix a = *this;
        Matrix b = identity(n, f_, std::max(prec(), kDefaultPrec));
        for (int j = 0; j < n; ++j) {
            int piv = -1;
            for (int i = j; i < n; ++i)
                if (!a(i, j).is_zero() && (piv < 0 || a(i, j).valuation() < a(piv, j).valuation())) piv = i;
            if (piv < 0) throw PrecisionError("matrix is singular at working precision");
            if (piv != j)
                for (int k = 0; k < n; ++k) {
                    std::swap(a(j, k), a(piv, k));
                    std::swap(b(j, k), b(piv, k));
                }
            Series pinv = a(j, j).inv();
            for (int k = 0; k < n; ++k) {
                a(j, k) = a(j, k) * pinv;
                b(j, k) = b(j, k) * pinv;
            }
            for (int i = 0; i < n; ++i) {
                if (i == j || a(i, j).is_zero()) continue;
                Series f = a(i, j);
                for (int k = 0; k < n; ++k) {
                    a(i, k) -= f * a(j, k);
                    b(i, k) -= f * b(j, k);
                }
            }
        }
        return b;
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < r_; ++i) {
            s += "[";
            for (int j = 0; j < c_; ++j) s += (j ? ", " : "") + (*this)(i, j).str();
            s += "]\n";
        }
        return s;
    }

private:
    int r_, c_;
    ResidueField f_;
    std::vector<Series> a_;

    void same_shape(const Matrix& b) const {
        if (r_ != b.r_ || c_ != b.c_) throw std::invalid_argument("matrix shape mismatch");
    }
};

inline Matrix operator*(const Series& s, const Matrix& m) { return m * s; }

inline std::ostream& operator<<(std::ostream& os, const Series& s) { return os << s.str(); }
inline std::ostream& operator<<(std::ostream& os, const Matrix& m) { return os << m.str(); }

}  // namespace orbfl
