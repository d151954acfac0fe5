#include "repvol/special_functions.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace repvol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kTermCap = 1'000'000;

// Even Bernoulli numbers B_0, B_2, ..., B_30 as exact rationals.
constexpr double kBernoulliNum[] = {1.0, 1.0, -1.0, 1.0, -1.0, 5.0, -691.0, 7.0,
                                    -3617.0, 43867.0, -174611.0, 854513.0,
                                    -236364091.0, 8553103.0, -23749461029.0,
                                    8615841276005.0};
constexpr double kBernoulliDen[] = {1.0, 6.0, 30.0, 42.0, 30.0, 66.0, 2730.0, 6.0,
                                    510.0, 798.0, 330.0, 138.0, 2730.0, 6.0,
                                    870.0, 14322.0};

// Li2 on the region |z| <= 1, Re z <= 1/2, via the expansion
// Li2(z) = sum_n B_n w^{n+1} / (n+1)!  with w = -log(1 - z).
std::complex<double> dilog_base(std::complex<double> z) {
    const std::complex<double> w = -std::log(1.0 - z);
    const std::complex<double> w2 = w * w;
    // n = 0 and n = 1 terms, then even n only.
    std::complex<double> sum = w - w2 / 4.0;
    std::complex<double> wpow = w;  // w^(2m-1) running power
    double factorial = 1.0;         // (2m+1)! running value
    for (int m = 1; m < 16; ++m) {
        wpow *= w2;
        factorial *= (2.0 * m) * (2.0 * m + 1.0);
        const std::complex<double> term =
            (kBernoulliNum[m] / kBernoulliDen[m]) * wpow / factorial;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

std::complex<double> dilog(std::complex<double> z) {
    constexpr double kPi2_6 = kPi * kPi / 6.0;
    if (z == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
    if (z == std::complex<double>(1.0, 0.0)) return {kPi2_6, 0.0};
    std::complex<double> shift{0.0, 0.0};
    double sign = 1.0;
    if (std::abs(z) > 1.0) {
        const std::complex<double> lg = std::log(-z);
        shift += -kPi2_6 - 0.5 * lg * lg;
        sign = -sign;
        z = 1.0 / z;
    }
    if (z.real() > 0.5) {
        shift += sign * (kPi2_6 - std::log(z) * std::log(1.0 - z));
        sign = -sign;
        z = 1.0 - z;
    }
    return shift + sign * dilog_base(z);
}

double lobachevsky(double theta, double* est_error) {
    if (!std::isfinite(theta)) {
        if (est_error) *est_error = 0.0;
        return 0.0;
    }
    // pi-periodicity and oddness: reduce to r in [0, pi/2].
    double r = theta - kPi * std::round(theta / kPi);
    double sign = 1.0;
    if (r < 0.0) {
        sign = -1.0;
        r = -r;
    }
    if (r == 0.0) {
        if (est_error) *est_error = 0.0;
        return 0.0;
    }

    const double s1 = std::sin(2.0 * r);
    const double c1 = std::cos(2.0 * r);
    double sk = s1;
    double ck = c1;
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    const double sin_r = std::sin(r);
    std::int64_t k = 1;
    double bound = 1.0 / sin_r;  // tail bound (1/sin r)/(K+1)^2 after K terms
    for (; k <= kTermCap; ++k) {
        const double term = sk / (static_cast<double>(k) * static_cast<double>(k));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        bound = 1.0 / (sin_r * (static_cast<double>(k) + 1.0) * (static_cast<double>(k) + 1.0));
        if (bound <= 5e-14) break;
        if ((k & 0xFFF) == 0) {
            // resync the angle recurrence to stop rounding drift
            sk = std::sin(2.0 * r * static_cast<double>(k + 1));
            ck = std::cos(2.0 * r * static_cast<double>(k + 1));
        } else {
            const double sn = sk * c1 + ck * s1;
            ck = ck * c1 - sk * s1;
            sk = sn;
        }
    }
    if (est_error) *est_error = bound + 1e-16 * std::abs(sum);
    return sign * 0.5 * sum;
}

double bloch_wigner(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return 0.0;
    if (z.imag() == 0.0) return 0.0;  // flat tetrahedron
    const double result = dilog(z).imag() + std::arg(1.0 - z) * std::log(std::abs(z));
    return result;
}

}  // namespace repvol
