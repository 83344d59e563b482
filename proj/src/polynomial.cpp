#include "qd/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace qd {

Polynomial Polynomial::monomial(int k, cplx a) {
    std::vector<cplx> c(k + 1, cplx(0.0));
    c[k] = a;
    return Polynomial(std::move(c));
}

bool Polynomial::is_zero(double tol) const {
    for (auto& v : c_)
        if (std::abs(v) > tol) return false;
    return true;
}

cplx Polynomial::operator()(cplx z) const {
    cplx acc = 0.0;
    for (int k = (int)c_.size() - 1; k >= 0; --k) acc = acc * z + c_[k];
    return acc;
}

double Polynomial::eval_scale(cplx z) const {
    double az = std::abs(z), acc = 0.0, p = 1.0;
    for (auto& v : c_) {
        acc += std::abs(v) * p;
        p *= az;
    }
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<cplx> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * double(k);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<cplx> d(c_.size() + 1, cplx(0.0));
    for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / double(k + 1);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::conj_coeffs() const {
    std::vector<cplx> d(c_.size());
    for (size_t k = 0; k < c_.size(); ++k) d[k] = std::conj(c_[k]);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::deflate(cplx a, cplx* rem) const {
    // p(z) = (z-a) q(z) + r via Horner
    int n = degree();
    if (n == 0) {
        if (rem) *rem = c_[0];
        return Polynomial();
    }
    std::vector<cplx> q(n);
    cplx acc = c_[n];
    for (int k = n - 1; k >= 0; --k) {
        q[k] = acc;
        acc = acc * a + c_[k];
    }
    if (rem) *rem = acc;
    return Polynomial(std::move(q));
}

std::vector<cplx> Polynomial::taylor_at(cplx a) const {
    // full Horner: t[j] = p^(j)(a)/j!
    std::vector<cplx> t = c_;
    int n = degree();
    for (int j = 0; j <= n; ++j)
        for (int k = n - 1; k >= j; --k) t[k] += a * t[k + 1];
    return t;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<cplx> d(std::max(c_.size(), o.c_.size()), cplx(0.0));
    for (size_t k = 0; k < c_.size(); ++k) d[k] += c_[k];
    for (size_t k = 0; k < o.c_.size(); ++k) d[k] += o.c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    std::vector<cplx> d(std::max(c_.size(), o.c_.size()), cplx(0.0));
    for (size_t k = 0; k < c_.size(); ++k) d[k] += c_[k];
    for (size_t k = 0; k < o.c_.size(); ++k) d[k] -= o.c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::vector<cplx> d(c_.size() + o.c_.size() - 1, cplx(0.0));
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) d[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator*(cplx s) const {
    std::vector<cplx> d = c_;
    for (auto& v : d) v *= s;
    return Polynomial(std::move(d));
}

double Polynomial::coeff_norm() const {
    double m = 0.0;
    for (auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

void Polynomial::trim(double tol) {
    while (c_.size() > 1 && std::abs(c_.back()) <= tol) c_.pop_back();
}

void poly_divmod(const Polynomial& a, const Polynomial& b, Polynomial& q, Polynomial& r) {
    if (b.is_zero()) throw Error("poly_divmod: division by zero polynomial");
    int db = b.degree();
    std::vector<cplx> rem = a.coeffs();
    if ((int)rem.size() - 1 < db) {
        q = Polynomial();
        r = a;
        return;
    }
    std::vector<cplx> quo(rem.size() - db, cplx(0.0));
    cplx lead = b.coeffs()[db];
    for (int k = (int)rem.size() - 1; k >= db; --k) {
        cplx f = rem[k] / lead;
        quo[k - db] = f;
        for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.coeffs()[j];
        rem[k] = 0.0;
    }
    rem.resize(db == 0 ? 1 : db);
    q = Polynomial(std::move(quo));
    r = Polynomial(std::move(rem));
}

} // namespace qd
