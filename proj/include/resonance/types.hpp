#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace resonance {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

enum class ErrorKind {
    invalid_state,
    validation,
    wrong_arity,
    degeneracy_resolution,
    dimension_cap,
    quadrature_failure,
    divergent_integral,
    infinite_rate,
    non_semisimple,
    sign_violation,
    io
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::invalid_state: return "invalid_state";
    case ErrorKind::validation: return "validation";
    case ErrorKind::wrong_arity: return "wrong_arity";
    case ErrorKind::degeneracy_resolution: return "degeneracy_resolution";
    case ErrorKind::dimension_cap: return "dimension_cap";
    case ErrorKind::quadrature_failure: return "quadrature_failure";
    case ErrorKind::divergent_integral: return "divergent_integral";
    case ErrorKind::infinite_rate: return "infinite_rate";
    case ErrorKind::non_semisimple: return "non_semisimple";
    case ErrorKind::sign_violation: return "sign_violation";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

// Numerical failures map to CLI exit code 3, everything else to 2.
inline bool is_numerical(ErrorKind k)
{
    return k == ErrorKind::quadrature_failure || k == ErrorKind::divergent_integral ||
           k == ErrorKind::infinite_rate || k == ErrorKind::non_semisimple ||
           k == ErrorKind::sign_violation;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg, std::string field = {})
        : std::runtime_error(msg), kind_(kind), field_(std::move(field)) {}
    ErrorKind kind() const { return kind_; }
    const std::string& field() const { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double achieved)
        : Error(ErrorKind::quadrature_failure, msg), achieved_(achieved) {}
    double achieved_error() const { return achieved_; }

private:
    double achieved_;
};

// Real number that may be +infinity (divergent rate) or undefined (0/0 ratio).
struct ExtReal {
    enum class Kind { finite, infinite, undefined };
    Kind kind = Kind::finite;
    double value = 0.0;

    static ExtReal finite(double v) { return {Kind::finite, v}; }
    static ExtReal infinity() { return {Kind::infinite, std::numeric_limits<double>::infinity()}; }
    static ExtReal undefined() { return {Kind::undefined, std::numeric_limits<double>::quiet_NaN()}; }
    bool is_finite() const { return kind == Kind::finite; }
    bool is_infinite() const { return kind == Kind::infinite; }
};

// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, cplx fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    CMatrix(std::initializer_list<std::initializer_list<cplx>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw Error(ErrorKind::validation, "ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static CMatrix identity(std::size_t n)
    {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMatrix diagonal(const std::vector<double>& d)
    {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<cplx>& data() const { return data_; }

    CMatrix adjoint() const
    {
        CMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }
    CMatrix conjugate() const
    {
        CMatrix r(*this);
        for (auto& v : r.data_) v = std::conj(v);
        return r;
    }

    CMatrix& operator+=(const CMatrix& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CMatrix& operator*=(cplx s)
    {
        for (auto& v : data_) v *= s;
        return *this;
    }
    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b)
    {
        if (a.cols_ != b.rows_) throw Error(ErrorKind::validation, "matrix product shape mismatch");
        CMatrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    friend CVector operator*(const CMatrix& a, const CVector& x)
    {
        if (a.cols_ != x.size()) throw Error(ErrorKind::validation, "matrix-vector shape mismatch");
        CVector y(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
        return y;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void check_same(const CMatrix& o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::validation, "matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

inline cplx dot(const CVector& a, const CVector& b)
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm(const CVector& a) { return std::sqrt(std::real(dot(a, a))); }

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

}  // namespace resonance
