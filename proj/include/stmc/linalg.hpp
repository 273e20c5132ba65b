#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

// Small fixed-capacity vector/matrix types for state-space dimensions 1..3.
// Everything lives on the stack so the integrator inner loops never allocate.

namespace stmc {

inline constexpr int kMaxDim = 3;

class Vec {
public:
    Vec() = default;

    explicit Vec(int dim, double fill = 0.0) : d_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vec: dim must be in [1,3]");
        for (int i = 0; i < d_; ++i) c_[i] = fill;
    }

    Vec(std::initializer_list<double> xs) : d_(static_cast<int>(xs.size())) {
        if (d_ < 1 || d_ > kMaxDim) throw std::invalid_argument("Vec: dim must be in [1,3]");
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }

    int dim() const { return d_; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double a) {
        for (int i = 0; i < d_; ++i) c_[i] *= a;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += c_[i] * o.c_[i];
        return s;
    }
    double norm_sq() const { return dot(*this); }
    double norm() const { return std::sqrt(norm_sq()); }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < d_; ++i) m = std::max(m, std::fabs(c_[i]));
        return m;
    }

    bool finite() const {
        for (int i = 0; i < d_; ++i)
            if (!std::isfinite(c_[i])) return false;
        return true;
    }

private:
    int d_ = 0;
    std::array<double, kMaxDim> c_{};
};

// Row-major square matrix, dimension matching Vec.
class Mat {
public:
    Mat() = default;

    explicit Mat(int dim, double fill = 0.0) : d_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Mat: dim must be in [1,3]");
        for (int i = 0; i < d_ * d_; ++i) a_[i] = fill;
    }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return d_; }
    double operator()(int i, int j) const { return a_[i * d_ + j]; }
    double& operator()(int i, int j) { return a_[i * d_ + j]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < d_ * d_; ++i) a_[i] += o.a_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < d_ * d_; ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < d_ * d_; ++i) a_[i] *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r(a.d_);
        for (int i = 0; i < a.d_; ++i)
            for (int j = 0; j < a.d_; ++j) {
                double s = 0.0;
                for (int k = 0; k < a.d_; ++k) s += a(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }

    friend Vec operator*(const Mat& a, const Vec& x) {
        Vec r(a.d_);
        for (int i = 0; i < a.d_; ++i) {
            double s = 0.0;
            for (int k = 0; k < a.d_; ++k) s += a(i, k) * x[k];
            r[i] = s;
        }
        return r;
    }

    double det() const {
        const Mat& m = *this;
        switch (d_) {
            case 1: return m(0, 0);
            case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            default:
                return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                     - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                     + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        }
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < d_; ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < d_ * d_; ++i) s += a_[i] * a_[i];
        return std::sqrt(s);
    }

    bool finite() const {
        for (int i = 0; i < d_ * d_; ++i)
            if (!std::isfinite(a_[i])) return false;
        return true;
    }

private:
    int d_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

}  // namespace stmc
