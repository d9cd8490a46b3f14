#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>

#include "dnls/errors.hpp"

namespace dnls {

using cplx = std::complex<double>;

// Finite window [n_min, n_max] of Z with zero (Dirichlet) ghost values.
struct Lattice {
    int n_min = -256;
    int n_max = 256;

    Lattice() = default;
    Lattice(int lo, int hi);

    static Lattice symmetric(int half) { return Lattice(-half, half); }

    int size() const { return n_max - n_min + 1; }
    int index(int site) const { return site - n_min; }
    int site(int idx) const { return idx + n_min; }
    bool contains(int site) const { return site >= n_min && site <= n_max; }

    friend bool operator==(const Lattice&, const Lattice&) = default;
};

// <n> = sqrt(1 + n^2)
inline double japanese_bracket(int n) { return std::sqrt(1.0 + double(n) * double(n)); }

template <typename Scalar>
struct Field {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Lattice lattice;
    Vector values;

    Field() : values(Vector::Zero(lattice.size())) {}
    explicit Field(const Lattice& lat) : lattice(lat), values(Vector::Zero(lat.size())) {}
    Field(const Lattice& lat, Vector v) : lattice(lat), values(std::move(v))
    {
        if (values.size() != lattice.size())
            throw DomainError("field length does not match the lattice window");
    }

    int size() const { return lattice.size(); }

    // Dirichlet read: zero outside the window.
    Scalar at(int site) const { return lattice.contains(site) ? values[lattice.index(site)] : Scalar(0); }
    Scalar& operator()(int site) { return values[lattice.index(site)]; }

    bool finite() const { return values.allFinite(); }
};

using LatticeField = Field<cplx>;
using RealField = Field<double>;

inline void require_same_lattice(const Lattice& a, const Lattice& b)
{
    if (!(a == b)) throw LatticeMismatch();
}

template <typename Scalar>
Field<Scalar> delta_field(const Lattice& lat, int site, Scalar amplitude = Scalar(1))
{
    Field<Scalar> f(lat);
    f(site) = amplitude;
    return f;
}

inline LatticeField to_complex(const RealField& f)
{
    return LatticeField(f.lattice, f.values.template cast<cplx>());
}

template <typename Scalar>
Field<Scalar> apply_laplacian(const Field<Scalar>& u)
{
    const auto& v = u.values;
    const Eigen::Index n = v.size();
    Field<Scalar> out(u.lattice);
    for (Eigen::Index i = 0; i < n; ++i) {
        Scalar left = i > 0 ? v[i - 1] : Scalar(0);
        Scalar right = i + 1 < n ? v[i + 1] : Scalar(0);
        out.values[i] = left + right - Scalar(2) * v[i];
    }
    return out;
}

// (Hu)(n) = -(Delta u)(n) + q(n) u(n)
template <typename Scalar>
Field<Scalar> apply_H(const RealField& q, const Field<Scalar>& u)
{
    require_same_lattice(q.lattice, u.lattice);
    Field<Scalar> out = apply_laplacian(u);
    out.values = -out.values + (q.values.template cast<Scalar>().array() * u.values.array()).matrix();
    return out;
}

// Sesquilinear pairing <a, b> = sum a(n) conj(b(n)).
inline cplx inner(const LatticeField& a, const LatticeField& b)
{
    require_same_lattice(a.lattice, b.lattice);
    return b.values.dot(a.values);
}

inline double inner(const RealField& a, const RealField& b)
{
    require_same_lattice(a.lattice, b.lattice);
    return a.values.dot(b.values);
}

struct WeightedNormSpec {
    double p = 2.0;
    double sigma = 0.0;

    static WeightedNormSpec sup(double sigma = 0.0)
    {
        return {std::numeric_limits<double>::infinity(), sigma};
    }
};

// ||u||_{l^{p,sigma}}; p = inf gives sup <n>^sigma |u(n)|.
template <typename Scalar>
double weighted_norm(const Field<Scalar>& u, const WeightedNormSpec& spec)
{
    if (!(spec.p >= 1.0)) throw DomainError("weighted norm needs p >= 1");
    const Lattice& lat = u.lattice;
    if (std::isinf(spec.p)) {
        double m = 0.0;
        for (int i = 0; i < lat.size(); ++i)
            m = std::max(m, std::pow(japanese_bracket(lat.site(i)), spec.sigma) * std::abs(u.values[i]));
        return m;
    }
    double s = 0.0;
    for (int i = 0; i < lat.size(); ++i) {
        double a = std::abs(u.values[i]);
        if (a == 0.0) continue;
        s += std::pow(japanese_bracket(lat.site(i)), spec.p * spec.sigma) * std::pow(a, spec.p);
    }
    return std::pow(s, 1.0 / spec.p);
}

// Diagonal weight <n>^sigma on the window.
Eigen::VectorXd weight_vector(const Lattice& lat, double sigma);

struct DecayFit {
    double rate = 0.0;       // a in C e^{-a|n|}
    double prefactor = 0.0;  // C
    double rms_residual = 0.0;
    int samples = 0;
    bool ok = false;
};

// Least-squares fit of log|u(n)| against |n| over sites with |u(n)| > 1e-13.
DecayFit fit_exponential_decay(const Eigen::VectorXd& magnitudes, const Lattice& lat);

template <typename Scalar>
DecayFit fit_exponential_decay(const Field<Scalar>& u)
{
    return fit_exponential_decay(Eigen::VectorXd(u.values.cwiseAbs()), u.lattice);
}

}  // namespace dnls
