#include "freqbench/stats.hpp"

#include "freqbench/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace freqbench {

namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

// Continued fraction for I_x(a, b), modified Lentz. Converges for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEpsilon = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEpsilon) break;
    }
    return h;
}

// I_x(a, b) given both x and 1 - x, so callers can pass an exact complement.
double incomplete_beta(double a, double b, double x, double one_minus_x) {
    if (x <= 0.0) return 0.0;
    if (one_minus_x <= 0.0) return 1.0;
    const double log_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log(one_minus_x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

} // namespace

SampleStats summarize(std::span<const double> sample) {
    if (sample.empty()) {
        throw Error(ErrorKind::InsufficientSample, "sample is empty");
    }
    SampleStats s;
    s.n = sample.size();
    double sum = 0.0;
    for (double v : sample) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n >= 2) {
        double ss = 0.0;
        for (double v : sample) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.n - 1);
    }
    return s;
}

double improvement_pct(double t_baseline, double t_optimized) {
    if (!(t_baseline > 0.0)) {
        throw Error(ErrorKind::NonPositiveBaseline, "baseline time must be positive, got " + std::to_string(t_baseline));
    }
    return 100.0 * (t_baseline - t_optimized) / t_baseline;
}

double mean_improvement(std::span<const std::pair<double, double>> trials) {
    if (trials.empty()) {
        throw Error(ErrorKind::EmptyInput, "mean_improvement needs at least one trial");
    }
    double sum = 0.0;
    for (const auto& [baseline, optimized] : trials) {
        sum += improvement_pct(baseline, optimized);
    }
    return sum / static_cast<double>(trials.size());
}

double regularized_incomplete_beta(double a, double b, double x) {
    return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    const double t2 = t * t;
    // P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    return incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
}

double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided_p(t, df);
    return t < 0.0 ? tail : 1.0 - tail;
}

MeansTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error(ErrorKind::InsufficientSample, "means test needs at least two values per sample (got " +
                                                       std::to_string(a.size()) + " and " +
                                                       std::to_string(b.size()) + ")");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::InvalidSpec, "alpha must lie strictly between 0 and 1");
    }
    const SampleStats sa = summarize(a);
    const SampleStats sb = summarize(b);
    const double na = static_cast<double>(sa.n);
    const double nb = static_cast<double>(sb.n);

    MeansTestResult r;
    r.alpha = alpha;
    const double ea = sa.variance / na;
    const double eb = sb.variance / nb;
    const double se2 = ea + eb;
    if (se2 == 0.0) {
        r.degrees_of_freedom = na + nb - 2.0;
        if (sa.mean == sb.mean) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = sa.mean > sb.mean ? std::numeric_limits<double>::infinity()
                                              : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
    } else {
        r.t_statistic = (sa.mean - sb.mean) / std::sqrt(se2);
        r.degrees_of_freedom = se2 * se2 / (ea * ea / (na - 1.0) + eb * eb / (nb - 1.0));
        r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
    }
    r.reject_null = r.p_value < alpha;
    return r;
}

} // namespace freqbench
