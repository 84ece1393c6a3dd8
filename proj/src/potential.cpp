#include "osmd/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace osmd {

double lp_norm(const VectorRef& v, double p) {
    if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    // Scale by the max entry so large exponents (q ≈ 11 on the ball) do not
    // overflow.
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return scale * std::pow((v.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
}

double conjugate_exponent(double p) {
    require(p >= 1.0, "conjugate_exponent: p must be >= 1");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

Potential::Potential(PotentialKind kind, double alpha, double p, int clip)
    : kind_(kind), alpha_(alpha), p_(p), clip_(clip) {
    if (kind_ != PotentialKind::ClippedLp) return;
    const double d = clip_;
    if (p_ == 2.0) {
        knot_ = 0.0;
    } else if (p_ == 1.0) {
        knot_ = 1.0 / d;
        knot_pm1_ = 1.0;
        knot_p_ = knot_;
    } else {
        knot_ = std::pow(d, 1.0 / (p_ - 2.0));
        knot_pm1_ = std::pow(d, (p_ - 1.0) / (p_ - 2.0));
        knot_p_ = std::pow(d, p_ / (p_ - 2.0));
    }
}

Potential Potential::negentropy() { return {PotentialKind::Negentropy, 0.0, 0.0, 0}; }

Potential Potential::tsallis_half() { return {PotentialKind::TsallisHalf, 0.5, 0.0, 0}; }

Potential Potential::tsallis_alpha(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "tsallis_alpha: alpha must lie in (0, 1)");
    return {PotentialKind::TsallisAlpha, alpha, 0.0, 0};
}

Potential Potential::graph_tsallis(int k) {
    require(k >= 3, "graph_tsallis: alpha = 1 - 1/log(k) needs k >= 3");
    return tsallis_alpha(1.0 - 1.0 / std::log(static_cast<double>(k)));
}

Potential Potential::clipped_lp(double p, int d) {
    require(p >= 1.0 && p <= 2.0, "clipped_lp: p must lie in [1, 2]");
    require(d >= 1, "clipped_lp: d must be a positive integer");
    return {PotentialKind::ClippedLp, 0.0, p, d};
}

std::string Potential::name() const {
    std::ostringstream os;
    switch (kind_) {
        case PotentialKind::Negentropy: os << "negentropy"; break;
        case PotentialKind::TsallisHalf: os << "tsallis_half"; break;
        case PotentialKind::TsallisAlpha: os << "tsallis_alpha(" << alpha_ << ")"; break;
        case PotentialKind::ClippedLp: os << "clipped_lp(p=" << p_ << ",d=" << clip_ << ")"; break;
    }
    return os.str();
}

double Potential::h(double x) const {
    switch (kind_) {
        case PotentialKind::Negentropy:
            return x == 0.0 ? 0.0 : x * std::log(x) - x;
        case PotentialKind::TsallisHalf:
            return -2.0 * std::sqrt(x);
        case PotentialKind::TsallisAlpha:
            return -std::pow(x, alpha_) / (alpha_ * (1.0 - alpha_));
        case PotentialKind::ClippedLp: {
            const double a = std::abs(x);
            const double d = clip_;
            if (p_ == 2.0) return 0.5 * std::min(1.0, d) * a * a;
            if (a <= knot_) return 0.5 * d * a * a;
            if (p_ == 1.0) return a * std::log(d * a) + 0.5 / d;
            return (p_ - 2.0) / (p_ - 1.0) * knot_pm1_ * a + std::pow(a, p_) / (p_ * (p_ - 1.0)) +
                   (2.0 - p_) / (2.0 * p_) * knot_p_;
        }
    }
    return 0.0;
}

double Potential::dh(double x) const {
    switch (kind_) {
        case PotentialKind::Negentropy:
            return std::log(x);
        case PotentialKind::TsallisHalf:
            return -1.0 / std::sqrt(x);
        case PotentialKind::TsallisAlpha:
            return -std::pow(x, alpha_ - 1.0) / (1.0 - alpha_);
        case PotentialKind::ClippedLp: {
            const double a = std::abs(x);
            const double s = x < 0.0 ? -1.0 : 1.0;
            const double d = clip_;
            if (p_ == 2.0) return std::min(1.0, d) * x;
            if (a <= knot_) return d * x;
            if (p_ == 1.0) return s * (1.0 + std::log(d * a));
            return s * ((p_ - 2.0) / (p_ - 1.0) * knot_pm1_ + std::pow(a, p_ - 1.0) / (p_ - 1.0));
        }
    }
    return 0.0;
}

double Potential::d2h(double x) const {
    switch (kind_) {
        case PotentialKind::Negentropy:
            return 1.0 / x;
        case PotentialKind::TsallisHalf:
            return 0.5 / (x * std::sqrt(x));
        case PotentialKind::TsallisAlpha:
            return std::pow(x, alpha_ - 2.0);
        case PotentialKind::ClippedLp: {
            const double a = std::abs(x);
            const double d = clip_;
            if (p_ == 2.0) return std::min(1.0, d);
            if (a <= knot_) return d;
            return std::min(std::pow(a, p_ - 2.0), d);
        }
    }
    return 0.0;
}

std::optional<double> Potential::dh_inverse(double theta) const {
    switch (kind_) {
        case PotentialKind::Negentropy:
            return std::exp(theta);
        case PotentialKind::TsallisHalf:
            if (!(theta < 0.0)) return std::nullopt;
            return 1.0 / (theta * theta);
        case PotentialKind::TsallisAlpha:
            if (!(theta < 0.0)) return std::nullopt;
            return std::pow(-(1.0 - alpha_) * theta, 1.0 / (alpha_ - 1.0));
        case PotentialKind::ClippedLp: {
            const double u = std::abs(theta);
            const double s = theta < 0.0 ? -1.0 : 1.0;
            const double d = clip_;
            if (p_ == 2.0) return theta / std::min(1.0, d);
            if (u <= d * knot_) return theta / d;
            if (p_ == 1.0) return s * std::exp(u - 1.0) / d;
            return s * std::pow((p_ - 1.0) * u + (2.0 - p_) * knot_pm1_, 1.0 / (p_ - 1.0));
        }
    }
    return std::nullopt;
}

int dimension(const Geometry& geometry) {
    return std::visit([](const auto& g) {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, Simplex>)
            return g.k;
        else
            return g.d;
    }, geometry);
}

namespace {

void require_in_domain(const Potential& F, const VectorRef& x) {
    if (!F.positive_domain()) return;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] >= 0.0))
            throw DomainError("potential " + F.name() + ": coordinate " + std::to_string(i) +
                              " is outside the positive orthant");
}

}  // namespace

void require_interior(const Potential& F, const VectorRef& x) {
    if (!F.positive_domain()) return;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0))
            throw DomainError("potential " + F.name() + ": coordinate " + std::to_string(i) +
                              " is not in the interior of the domain");
}

double value(const Potential& F, const VectorRef& x) {
    require_in_domain(F, x);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += F.h(x[i]);
    return sum;
}

Vector gradient(const Potential& F, const VectorRef& x) {
    require_interior(F, x);
    return x.unaryExpr([&](double v) { return F.dh(v); });
}

Vector hessian_diag(const Potential& F, const VectorRef& x) {
    require_interior(F, x);
    return x.unaryExpr([&](double v) { return F.d2h(v); });
}

double bregman_term(const Potential& F, double x, double y) {
    switch (F.kind()) {
        case PotentialKind::Negentropy: {
            if (x == 0.0) return y;
            const double delta = x / y - 1.0;
            double phi;  // (1+δ) log(1+δ) − δ
            if (std::abs(delta) < 1e-3) {
                const double d2 = delta * delta;
                phi = d2 * (0.5 - delta / 6.0 + d2 / 12.0 - d2 * delta / 20.0);
            } else {
                const double r = x / y;
                phi = (r > 0.0 ? r * std::log(r) : 0.0) - (r - 1.0);
            }
            return std::max(0.0, y * phi);
        }
        case PotentialKind::TsallisHalf: {
            const double diff = std::sqrt(x) - std::sqrt(y);
            return diff * diff / std::sqrt(y);
        }
        case PotentialKind::TsallisAlpha: {
            const double a = F.alpha();
            const double scale = std::pow(y, a) / (a * (1.0 - a));
            const double delta = x / y - 1.0;
            double psi;  // α(r − 1) − (r^α − 1), r = x / y
            if (std::abs(delta) < 1e-3) {
                const double c2 = a * (a - 1.0) / 2.0;
                const double c3 = c2 * (a - 2.0) / 3.0;
                const double c4 = c3 * (a - 3.0) / 4.0;
                psi = -delta * delta * (c2 + delta * (c3 + delta * c4));
            } else {
                const double r = x / y;
                psi = a * (r - 1.0) - (std::pow(r, a) - 1.0);
            }
            return std::max(0.0, scale * psi);
        }
        case PotentialKind::ClippedLp: {
            const double diff = x - y;
            if (std::abs(x) <= F.knot() && std::abs(y) <= F.knot())
                return 0.5 * F.d2h(0.0) * diff * diff;
            if (std::abs(diff) <= 1e-7 * std::max(std::abs(y), F.knot()))
                return 0.5 * F.d2h(y) * diff * diff;
            return std::max(0.0, F.h(x) - F.h(y) - F.dh(y) * diff);
        }
    }
    return 0.0;
}

double bregman(const Potential& F, const VectorRef& x, const VectorRef& y) {
    require(x.size() == y.size(), "bregman: dimension mismatch");
    require_in_domain(F, x);
    require_interior(F, y);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) sum += bregman_term(F, x[i], y[i]);
    return sum;
}

double diameter_upper_bound(const Potential& F, const Geometry& geometry) {
    if (const auto* simplex = std::get_if<Simplex>(&geometry)) {
        const double k = simplex->k;
        require(simplex->k >= 1, "diameter_upper_bound: simplex needs k >= 1");
        switch (F.kind()) {
            case PotentialKind::Negentropy: return std::log(k);
            case PotentialKind::TsallisHalf: return 2.0 * std::sqrt(k);
            case PotentialKind::TsallisAlpha: {
                const double a = F.alpha();
                return std::pow(k, 1.0 - a) / (a * (1.0 - a));
            }
            case PotentialKind::ClippedLp: break;
        }
        throw DomainError("diameter_upper_bound: " + F.name() + " is not paired with the simplex");
    }
    const auto& ball = std::get<LpBall>(geometry);
    if (F.kind() != PotentialKind::ClippedLp)
        throw DomainError("diameter_upper_bound: " + F.name() + " is not paired with the lp ball");
    require(F.p() == ball.p && F.clip() == ball.d,
            "diameter_upper_bound: clipped potential parameters must match the ball (p, d)");
    const double log_bound = 2.0 * std::log(static_cast<double>(ball.d)) + 1.0;
    if (ball.p == 1.0) return log_bound;
    return std::min(2.0 / (ball.p - 1.0), log_bound);
}

Vector minimizer(const Potential& F, const Geometry& geometry) {
    if (const auto* simplex = std::get_if<Simplex>(&geometry)) {
        require(F.positive_domain(), "minimizer: " + F.name() + " is not paired with the simplex");
        return Vector::Constant(simplex->k, 1.0 / simplex->k);
    }
    require(F.kind() == PotentialKind::ClippedLp, "minimizer: " + F.name() + " is not paired with the lp ball");
    return Vector::Zero(std::get<LpBall>(geometry).d);
}

}  // namespace osmd
