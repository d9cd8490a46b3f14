#include "dnls/linearization.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace dnls {

// ---------------------------------------------------------------- spinors

SpinorField::SpinorField(const Lattice& lat)
    : lattice(lat), top(Eigen::VectorXcd::Zero(lat.size())), bottom(Eigen::VectorXcd::Zero(lat.size()))
{
}

SpinorField::SpinorField(const Lattice& lat, Eigen::VectorXcd t, Eigen::VectorXcd b)
    : lattice(lat), top(std::move(t)), bottom(std::move(b))
{
    if (top.size() != lat.size() || bottom.size() != lat.size())
        throw DomainError("spinor components do not match the lattice");
}

SpinorField SpinorField::from_stacked(const Lattice& lat, const Eigen::VectorXcd& v)
{
    const int n = lat.size();
    if (v.size() != 2 * n) throw DomainError("stacked spinor has the wrong length");
    return SpinorField(lat, v.head(n), v.tail(n));
}

SpinorField SpinorField::from_scalar(const LatticeField& r)
{
    return SpinorField(r.lattice, r.values, r.values.conjugate());
}

Eigen::VectorXcd SpinorField::stacked() const
{
    Eigen::VectorXcd v(2 * top.size());
    v << top, bottom;
    return v;
}

double SpinorField::real_structure_defect() const
{
    return std::sqrt((bottom - top.conjugate()).squaredNorm() + (top - bottom.conjugate()).squaredNorm());
}

cplx inner(const SpinorField& a, const SpinorField& b)
{
    require_same_lattice(a.lattice, b.lattice);
    return b.top.dot(a.top) + b.bottom.dot(a.bottom);
}

double weighted_norm(const SpinorField& a, double sigma)
{
    Eigen::VectorXd w = weight_vector(a.lattice, sigma);
    return std::sqrt((w.array() * a.top.array()).matrix().squaredNorm() +
                     (w.array() * a.bottom.array()).matrix().squaredNorm());
}

Eigen::VectorXcd sigma1(const Eigen::VectorXcd& v)
{
    const Eigen::Index n = v.size() / 2;
    Eigen::VectorXcd out(v.size());
    out << v.tail(n), v.head(n);
    return out;
}

Eigen::VectorXcd sigma3(const Eigen::VectorXcd& v)
{
    const Eigen::Index n = v.size() / 2;
    Eigen::VectorXcd out = v;
    out.tail(n) = -out.tail(n);
    return out;
}

Eigen::VectorXcd to_interleaved(const Eigen::VectorXcd& s)
{
    const Eigen::Index n = s.size() / 2;
    Eigen::VectorXcd out(s.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out[2 * i] = s[i];
        out[2 * i + 1] = s[n + i];
    }
    return out;
}

Eigen::VectorXcd from_interleaved(const Eigen::VectorXcd& v)
{
    const Eigen::Index n = v.size() / 2;
    Eigen::VectorXcd out(v.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out[i] = v[2 * i];
        out[n + i] = v[2 * i + 1];
    }
    return out;
}

// ---------------------------------------------------------------- banded LU

namespace {
constexpr int KL = 2, KU = 2, LDAB = 2 * KL + KU + 1;
}

BandedLU::BandedLU(int n, const std::vector<cplx>& band) : n_(n), ab_(band), ipiv_(n)
{
    lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, KL, KU, reinterpret_cast<lapack_complex_double*>(ab_.data()), LDAB, ipiv_.data());
    if (info != 0) throw NumericalFailure("banded factorization is singular (zgbtrf info " + std::to_string(info) + ")");
}

Eigen::VectorXcd BandedLU::solve(const Eigen::VectorXcd& rhs) const
{
    Eigen::VectorXcd x = rhs;
    lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, KL, KU, 1, reinterpret_cast<const lapack_complex_double*>(ab_.data()), LDAB,
                                     ipiv_.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n_);
    if (info != 0) throw NumericalFailure("banded solve failed");
    return x;
}

// ---------------------------------------------------------------- operator

BlockOperator::BlockOperator(const Potential& q, double omega, const RealField& phi)
    : lattice_(q.lattice()), omega_(omega)
{
    require_same_lattice(q.lattice(), phi.lattice);
    hdiag_ = q.field.values.array() + 2.0 + omega;
    v6_ = phi.values.array().pow(6);
}

Eigen::VectorXcd BlockOperator::apply(const Eigen::VectorXcd& v) const
{
    const int n = lattice_.size();
    if (v.size() != 2 * n) throw DomainError("spinor length mismatch");
    Eigen::VectorXcd out(2 * n);
    for (int i = 0; i < n; ++i) {
        cplx a = v[i], b = v[n + i];
        cplx ha = hdiag_[i] * a, hb = hdiag_[i] * b;
        if (i > 0) {
            ha -= v[i - 1];
            hb -= v[n + i - 1];
        }
        if (i + 1 < n) {
            ha -= v[i + 1];
            hb -= v[n + i + 1];
        }
        out[i] = ha + v6_[i] * (-4.0 * a - 3.0 * b);
        out[n + i] = -hb + v6_[i] * (3.0 * a + 4.0 * b);
    }
    return out;
}

Eigen::VectorXcd BlockOperator::apply_adjoint(const Eigen::VectorXcd& v) const { return sigma3(apply(sigma3(v))); }

SpinorField BlockOperator::apply(const SpinorField& s) const
{
    require_same_lattice(lattice_, s.lattice);
    return SpinorField::from_stacked(lattice_, apply(s.stacked()));
}

Eigen::MatrixXd BlockOperator::dense() const
{
    const int n = lattice_.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = hdiag_[i] - 4.0 * v6_[i];
        d(i, n + i) = -3.0 * v6_[i];
        d(n + i, i) = 3.0 * v6_[i];
        d(n + i, n + i) = -hdiag_[i] + 4.0 * v6_[i];
        if (i > 0) {
            d(i, i - 1) = -1.0;
            d(n + i, n + i - 1) = 1.0;
        }
        if (i + 1 < n) {
            d(i, i + 1) = -1.0;
            d(n + i, n + i + 1) = 1.0;
        }
    }
    return d;
}

std::shared_ptr<const BandedLU> BlockOperator::factor(cplx mu) const
{
    const int n = lattice_.size();
    const int dim = 2 * n;
    std::vector<cplx> ab(size_t(LDAB) * dim, cplx(0.0));
    auto set = [&](int i, int j, cplx v) { ab[size_t(KL + KU + i - j) + size_t(j) * LDAB] = v; };
    for (int s = 0; s < n; ++s) {
        const int t = 2 * s, b = 2 * s + 1;
        set(t, t, hdiag_[s] - 4.0 * v6_[s] - mu);
        set(t, b, -3.0 * v6_[s]);
        set(b, t, 3.0 * v6_[s]);
        set(b, b, -hdiag_[s] + 4.0 * v6_[s] - mu);
        if (s > 0) {
            set(t, t - 2, -1.0);
            set(b, b - 2, 1.0);
        }
        if (s + 1 < n) {
            set(t, t + 2, -1.0);
            set(b, b + 2, 1.0);
        }
    }
    return std::make_shared<BandedLU>(dim, ab);
}

Eigen::VectorXcd BlockOperator::solve_shifted(cplx mu, const Eigen::VectorXcd& rhs) const
{
    return from_interleaved(factor(mu)->solve(to_interleaved(rhs)));
}

// ---------------------------------------------------------------- data

Eigen::VectorXcd LinearizationData::Phi() const
{
    const int n = lattice().size();
    Eigen::VectorXcd v(2 * n);
    v << point.phi.values.cast<cplx>(), point.phi.values.cast<cplx>();
    return v;
}

Eigen::VectorXcd LinearizationData::sigma3_Phi() const { return sigma3(Phi()); }

Eigen::VectorXcd LinearizationData::dPhi() const
{
    const int n = lattice().size();
    Eigen::VectorXcd v(2 * n);
    v << point.dphi.values.cast<cplx>(), point.dphi.values.cast<cplx>();
    return v;
}

// <x, y> = y^H x
static cplx pair(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) { return y.dot(x); }

Eigen::VectorXcd LinearizationData::project_ng(const Eigen::VectorXcd& x) const
{
    Eigen::VectorXcd s3p = sigma3_Phi(), dp = dPhi();
    return s3p * (pair(x, sigma3(dp)) / qprime) + dp * (pair(x, Phi()) / qprime);
}

Eigen::VectorXcd LinearizationData::project_lambda(const Eigen::VectorXcd& x) const
{
    return xi * pair(x, sigma3(xi));
}

Eigen::VectorXcd LinearizationData::project_minus_lambda(const Eigen::VectorXcd& x) const
{
    Eigen::VectorXcd s1 = sigma1(xi);
    return -s1 * pair(x, sigma3(s1));
}

Eigen::VectorXcd LinearizationData::project_c(const Eigen::VectorXcd& x) const
{
    return x - project_ng(x) - project_lambda(x) - project_minus_lambda(x);
}

Eigen::VectorXcd LinearizationData::project_c_adjoint(const Eigen::VectorXcd& x) const
{
    return sigma3(project_c(sigma3(x)));
}

LinearizationData build_linearization(const GroundStateBranch& branch, const GroundStatePoint& point)
{
    LinearizationData d;
    d.omega = point.omega;
    d.E0 = branch.E0;
    d.E1 = branch.E1;
    d.point = point;
    d.op = BlockOperator(branch.q, point.omega, point.phi);
    d.qprime = 2.0 * point.phi.values.dot(point.dphi.values);
    return d;
}

LinearizationData build_linearization(const GroundStateBranch& branch, double omega)
{
    return build_linearization(branch, branch.evaluate(omega));
}

KernelReport generalized_kernel(const LinearizationData& data)
{
    KernelReport r;
    Eigen::VectorXcd s3p = data.sigma3_Phi(), dp = data.dPhi();
    r.kernel_residual = data.op.apply(s3p).norm() / data.Phi().norm();
    Eigen::VectorXcd y = data.op.apply(dp);
    r.jordan_c = (pair(y, s3p) / s3p.squaredNorm()).real();
    r.jordan_e = (y - r.jordan_c * s3p).norm() / y.norm();
    r.nilpotent_residual = data.op.apply(y).norm() / dp.norm();
    return r;
}

// ---------------------------------------------------------------- internal mode

static std::vector<cplx> dense_eigenvalues(const Eigen::MatrixXd& m)
{
    const int n = int(m.rows());
    Eigen::MatrixXd a = m;
    Eigen::VectorXd wr(n), wi(n);
    double dummy = 0.0;
    lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), &dummy, 1,
                                    &dummy, 1);
    if (info != 0) throw NumericalFailure("dgeev failed with info " + std::to_string(info));
    std::vector<cplx> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
    return ev;
}

void refine_internal_mode(LinearizationData& data, double lambda_guess, const Eigen::VectorXcd& xi_guess,
                          const RealField& phi1)
{
    const int n = data.lattice().size();
    double shift = lambda_guess;
    std::shared_ptr<const BandedLU> lu;
    for (int attempt = 0;; ++attempt) {
        try {
            lu = data.op.factor(shift);
            break;
        } catch (const NumericalFailure&) {
            if (attempt > 3) throw;
            shift += 1e-13 * std::max(1.0, std::abs(shift)) * std::pow(10.0, attempt);
        }
    }
    Eigen::VectorXcd x = to_interleaved(xi_guess.normalized());
    double lam = lambda_guess;
    for (int it = 0; it < 4; ++it) {
        x = lu->solve(x);
        x /= x.norm();
    }
    Eigen::VectorXcd v = from_interleaved(x);
    // A real matrix with a simple real eigenvalue has a real eigenvector up to phase.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::abs(v[imax]) / v[imax];
    v = v.real().cast<cplx>();
    v /= v.norm();
    lam = (pair(data.op.apply(v), sigma3(v)) / pair(v, sigma3(v))).real();

    const double p = pair(v, sigma3(v)).real();
    data.xi_pairing_raw = p;
    if (!(p > 0.0)) throw NumericalFailure("internal-mode eigenvector has <xi, sigma3 xi> <= 0: normalization impossible");
    v /= std::sqrt(p);
    if (phi1.size() == n && v.head(n).real().dot(phi1.values) < 0.0) v = -v;

    data.lambda = lam;
    data.xi = v;
    data.eigen_residual = (data.op.apply(v) - lam * v).norm() / v.norm();
    Eigen::VectorXcd s1 = sigma1(v);
    data.mirror_residual = (data.op.apply(s1) + lam * s1).norm() / v.norm();
}

void internal_mode(LinearizationData& data, const RealField& phi1)
{
    if (!std::isfinite(data.E1)) throw NumericalFailure("H has no eigenvalue above 4: no internal mode");
    data.eigenvalues = dense_eigenvalues(data.op.dense());
    const double target = data.E1 + data.omega;
    const double window = 10.0 * (data.omega - data.E0) + 1e-8;
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& e : data.eigenvalues) {
        if (std::abs(e.imag()) > 1e-8 || e.real() <= 4.0 + data.omega) continue;
        if (std::isnan(best) || std::abs(e.real() - target) < std::abs(best - target)) best = e.real();
    }
    if (std::isnan(best) || std::abs(best - target) > window)
        throw NumericalFailure("no isolated real eigenvalue found near E1 + omega");

    const int n = data.lattice().size();
    Eigen::VectorXcd guess = Eigen::VectorXcd::Zero(2 * n);
    guess.head(n) = phi1.values.cast<cplx>();
    refine_internal_mode(data, best, guess, phi1);
}

void internal_mode_iterative(LinearizationData& data, const RealField& phi1)
{
    if (!std::isfinite(data.E1)) throw NumericalFailure("H has no eigenvalue above 4: no internal mode");
    const int n = data.lattice().size();
    Eigen::VectorXcd guess = Eigen::VectorXcd::Zero(2 * n);
    guess.head(n) = phi1.values.cast<cplx>();
    double lam = data.E1 + data.omega;
    for (int round = 0; round < 4; ++round) {
        refine_internal_mode(data, lam, guess, phi1);
        if (std::abs(data.lambda - lam) <= 1e-14 * lam) break;
        lam = data.lambda;
        guess = data.xi;
    }
    if (!(data.lambda > 4.0 + data.omega) || data.eigen_residual > 1e-10)
        throw NumericalFailure("inverse iteration did not isolate the internal mode");
}

InternalModeDerivative internal_mode_derivative(const LinearizationData& data)
{
    const int n = data.lattice().size();
    const Eigen::VectorXd phi = data.point.phi.values, dphi = data.point.dphi.values;
    // dH/domega = sigma3 + 6 phi^5 dphi [[-4, -3], [3, 4]]
    Eigen::VectorXd dv = 6.0 * phi.array().pow(5) * dphi.array();
    auto dH = [&](const Eigen::VectorXcd& x) {
        Eigen::VectorXcd y(2 * n);
        for (int i = 0; i < n; ++i) {
            y[i] = x[i] + dv[i] * (-4.0 * x[i] - 3.0 * x[n + i]);
            y[n + i] = -x[n + i] + dv[i] * (3.0 * x[i] + 4.0 * x[n + i]);
        }
        return y;
    };
    const Eigen::VectorXcd& xi = data.xi;
    Eigen::VectorXcd s3xi = sigma3(xi);
    InternalModeDerivative out;
    Eigen::VectorXcd dHxi = dH(xi);
    out.dlambda = pair(dHxi, s3xi).real();
    Eigen::VectorXcd rhs = -(dHxi - out.dlambda * xi);
    // (H - lambda) x + xi <x, sigma3 xi> = rhs; the bordered term removes the kernel.
    Eigen::MatrixXd m = data.op.dense();
    m.diagonal().array() -= data.lambda;
    m += xi.real() * s3xi.real().transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    Eigen::VectorXd x = lu.solve(rhs.real());
    out.dxi = x.cast<cplx>();
    return out;
}

// ---------------------------------------------------------------- nonresonance

NonresonanceReport nonresonance_margin(double lambda, double omega)
{
    NonresonanceReport r;
    const double a = std::abs(lambda);
    if (a == 0.0) return r;
    r.n_max = int(std::ceil((4.0 + omega) / a)) + 1;
    r.margin = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= r.n_max; ++k) {
        double x = k * a;  // the band set is symmetric, so |k lambda| suffices
        double d = x < omega ? omega - x : (x > 4.0 + omega ? x - 4.0 - omega : 0.0);
        if (d < r.margin) {
            r.margin = d;
            r.worst_n = k;
        }
    }
    r.pass = r.margin > 0.0;
    return r;
}

NonresonanceReport nonresonance_certificate(const LinearizationData& data)
{
    return nonresonance_margin(data.lambda, data.omega);
}

// ---------------------------------------------------------------- projections

static Eigen::MatrixXd discrete_projection_dense(const LinearizationData& data)
{
    const int dim = data.op.size();
    Eigen::VectorXd s3p = data.sigma3_Phi().real(), dp = data.dPhi().real(), ph = data.Phi().real();
    Eigen::VectorXd xi = data.xi.real();
    Eigen::VectorXd s1 = sigma1(data.xi).real();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
    p += s3p * sigma3(dp.cast<cplx>()).real().transpose() / data.qprime;
    p += dp * ph.transpose() / data.qprime;
    p += xi * sigma3(data.xi).real().transpose();
    p -= s1 * sigma3(sigma1(data.xi)).real().transpose();
    return p;
}

SpectralProjections spectral_projections(const LinearizationData& data)
{
    const int dim = data.op.size();
    const int n = dim / 2;
    SpectralProjections sp;
    Eigen::VectorXd s3p = data.sigma3_Phi().real(), dp = data.dPhi().real(), ph = data.Phi().real();
    sp.P_ng = s3p * sigma3(dp.cast<cplx>()).real().transpose() / data.qprime + dp * ph.transpose() / data.qprime;
    Eigen::VectorXd xi = data.xi.real(), s1 = sigma1(data.xi).real();
    sp.P_disc = xi * sigma3(data.xi).real().transpose() - s1 * sigma3(sigma1(data.xi)).real().transpose();
    sp.P_c = Eigen::MatrixXd::Identity(dim, dim) - sp.P_ng - sp.P_disc;

    // Eigendecomposition of H P_c: the discrete part collapses to a
    // semisimple zero eigenvalue, so no Jordan block reaches dgeev.
    Eigen::MatrixXd b = data.op.dense() * sp.P_c;
    Eigen::VectorXd wr(dim), wi(dim);
    Eigen::MatrixXd vr(dim, dim);
    double dummy = 0.0;
    lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', dim, b.data(), dim, wr.data(), wi.data(), &dummy, 1,
                                    vr.data(), dim);
    if (info != 0) throw NumericalFailure("dgeev failed with info " + std::to_string(info));
    Eigen::MatrixXcd v(dim, dim);
    for (int k = 0; k < dim; ++k) {
        if (wi[k] == 0.0) {
            v.col(k) = vr.col(k).cast<cplx>();
        } else if (k + 1 < dim) {
            v.col(k) = vr.col(k).cast<cplx>() + cplx(0, 1) * vr.col(k + 1).cast<cplx>();
            v.col(k + 1) = vr.col(k).cast<cplx>() - cplx(0, 1) * vr.col(k + 1).cast<cplx>();
            ++k;
        }
    }
    Eigen::MatrixXcd w = v.partialPivLu().inverse();
    Eigen::MatrixXcd pp = Eigen::MatrixXcd::Zero(dim, dim), pm = Eigen::MatrixXcd::Zero(dim, dim);
    const double cut = 0.5 * data.omega;
    for (int k = 0; k < dim; ++k) {
        if (std::abs(wr[k]) <= cut) continue;
        sp.cluster.push_back({wr[k], wi[k]});
        sp.max_cluster_imag = std::max(sp.max_cluster_imag, std::abs(wi[k]));
        if (wr[k] > 0)
            pp += v.col(k) * w.row(k);
        else
            pm += v.col(k) * w.row(k);
    }
    if (int(sp.cluster.size()) != dim - 4)
        throw NumericalFailure("continuous cluster has " + std::to_string(sp.cluster.size()) + " eigenvalues, expected " +
                               std::to_string(dim - 4));
    if (sp.max_cluster_imag > 1e-6)
        throw NumericalFailure("continuous cluster is not real: defective or complex cluster, grow or regularize the window");
    (void)n;
    sp.P_plus = pp.real();
    sp.P_minus = pm.real();
    return sp;
}

double projection_defect_weighted_norm(const SpectralProjections& p, const Lattice& lat)
{
    const int n = lat.size();
    Eigen::VectorXd w(2 * n);
    Eigen::VectorXd w1 = weight_vector(lat, 2.0);
    w << w1, w1;
    Eigen::MatrixXd d = p.P_c;
    d.rightCols(n) = -d.rightCols(n);  // P_c sigma3
    d -= p.P_plus - p.P_minus;
    d = w.asDiagonal() * d * w.asDiagonal();
    // Largest singular value by power iteration on d^T d.
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2 * n).normalized();
    double s = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd y = d.transpose() * (d * x);
        double ny = y.norm();
        if (ny == 0.0) return 0.0;
        double s_new = std::sqrt(ny);
        x = y / ny;
        if (std::abs(s_new - s) <= 1e-10 * s_new) {
            s = s_new;
            break;
        }
        s = s_new;
    }
    return s;
}

// ---------------------------------------------------------------- continuous solves

Eigen::VectorXcd solve_on_continuous(const LinearizationData& data, cplx mu, const Eigen::VectorXcd& b, bool adjoint,
                                     double* residual)
{
    Eigen::VectorXcd rhs = data.project_c(adjoint ? sigma3(b) : b);
    const double dist = std::min({std::abs(mu), std::abs(mu - data.lambda), std::abs(mu + data.lambda)});
    Eigen::VectorXcd y;
    if (dist > 1e-6) {
        y = data.project_c(data.op.solve_shifted(mu, rhs));
    } else {
        // mu meets the discrete spectrum: shift the discrete part away.
        const int dim = data.op.size();
        const double s = 2.0 * (std::abs(mu) + data.lambda) + 1.0;
        Eigen::MatrixXcd m = (data.op.dense() + s * discrete_projection_dense(data)).cast<cplx>();
        m.diagonal().array() -= mu;
        y = m.partialPivLu().solve(rhs);
        (void)dim;
    }
    if (residual) {
        double nb = rhs.norm();
        *residual = nb == 0.0 ? 0.0 : (data.op.apply(y) - mu * y - rhs).norm() / nb;
    }
    return adjoint ? sigma3(y) : y;
}

std::vector<double> continuous_cluster(const LinearizationData& data)
{
    std::vector<double> c;
    for (const auto& e : data.eigenvalues) {
        double d = std::min({std::abs(e), std::abs(e - data.lambda), std::abs(e + data.lambda)});
        if (d > 1e-6) c.push_back(e.real());
    }
    std::sort(c.begin(), c.end());
    return c;
}

nlohmann::json spectrum_report(const LinearizationData& data)
{
    nlohmann::json j;
    j["omega"] = data.omega;
    j["E0"] = data.E0;
    j["E1"] = std::isfinite(data.E1) ? nlohmann::json(data.E1) : nlohmann::json(nullptr);
    j["lambda"] = data.lambda;
    j["lambda_minus_E1_minus_omega"] = data.lambda - data.E1 - data.omega;
    j["xi_pairing_raw"] = data.xi_pairing_raw;
    j["eigen_residual"] = data.eigen_residual;
    j["mirror_residual"] = data.mirror_residual;
    auto k = generalized_kernel(data);
    j["generalized_kernel"] = {{"kernel_residual", k.kernel_residual},
                               {"jordan_c", k.jordan_c},
                               {"jordan_e", k.jordan_e},
                               {"nilpotent_residual", k.nilpotent_residual}};
    auto nr = nonresonance_certificate(data);
    j["nonresonance"] = {{"margin", nr.margin}, {"n_max", nr.n_max}, {"worst_n", nr.worst_n}, {"pass", nr.pass}};
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : data.eigenvalues) ev.push_back({e.real(), e.imag()});
    j["eigenvalues"] = ev;
    return j;
}

}  // namespace dnls
